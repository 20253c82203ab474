//! Verification suites: exact, seeded checks of every algebraic identity the
//! library relies on, each producing a [`VerifyReport`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::{
    self, gammas_closed_form, generic_coefficients, resonant_deltas, solve_fixed,
    solve_lambda_free, LambdaFreeSolution, Weights, GAMMA_NAMES,
};
use crate::curved::{self, conformal_invariance_difference};
use crate::error::{Error, Result};
use crate::flat::{
    ansatz_map, equivariance_residual_with, formal_adjoint, monomial_basis, quantize_ansatz_with,
    quantize_components, quantize_components_with, QuantizationParams, Symbol2,
};
use crate::geometry::{
    self, conformal_rescale, curvature_from_jets, gamma_conf_flat, rescaled_curvature_closed_form,
    schwarzian_nd, ConformalFactorJet, MetricJet2,
};
use crate::invariant::{
    commutation_residual, commutator, compose, ideal_generator_z, CommutationRelation,
    InvariantOperator as I,
};
use crate::linalg::SolutionSet;
use crate::metric::FlatMetric;
use crate::operator::{inversion_action_formula, lie_operator_defn, lie_operator_field, DiffOperator2};
use crate::poly::Poly;
use crate::random::{PolyGen, DEFAULT_SEED};
use crate::scalar::{format_rational, int, rat, Rational};
use crate::vector_field::VectorFieldGenerator;

/// The frozen witness that the ideal generator `Z` is nonzero for `n = 3`.
pub const IDEAL_WITNESS_FIXTURE: &str = include_str!("../fixtures/ideal_witness_n3.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Equivariance,
    Commutators,
    Ideal,
    System,
    Adjoint,
    ConformalInvariance,
    CurvatureTransforms,
    Agreement,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Equivariance,
        Suite::Commutators,
        Suite::Ideal,
        Suite::System,
        Suite::Adjoint,
        Suite::ConformalInvariance,
        Suite::CurvatureTransforms,
        Suite::Agreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Equivariance => "equivariance",
            Suite::Commutators => "commutators",
            Suite::Ideal => "ideal",
            Suite::System => "system",
            Suite::Adjoint => "adjoint",
            Suite::ConformalInvariance => "conformal-invariance",
            Suite::CurvatureTransforms => "curvature-transforms",
            Suite::Agreement => "agreement",
        }
    }

    fn default_dims(self) -> Vec<usize> {
        match self {
            Suite::Equivariance | Suite::Adjoint | Suite::Agreement => vec![1, 2, 3],
            Suite::Commutators | Suite::Ideal => vec![2, 3],
            Suite::System => vec![1, 2, 3, 4, 5, 6],
            Suite::ConformalInvariance => vec![1, 2, 3, 4],
            Suite::CurvatureTransforms => vec![2, 3, 4],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s || x.name().replace('-', "_") == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|x| x.name()).collect();
                Error::Parse(format!("unknown suite `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Restricts the suite to one dimension.
    pub n: Option<usize>,
    pub seed: u64,
    /// Bound on the x-degree of generated symbols.
    pub max_degree: Option<u32>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n: None,
            seed: DEFAULT_SEED,
            max_degree: None,
        }
    }
}

impl VerifyOptions {
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn dims(&self, suite: Suite) -> Vec<usize> {
        self.n.map_or_else(|| suite.default_dims(), |n| vec![n])
    }

    fn gen(&self, n: usize, salt: u64) -> PolyGen {
        let mix = (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
        PolyGen::new(self.seed ^ mix, n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub case_id: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub cases_run: usize,
    pub failures: Vec<CaseFailure>,
    pub notes: Vec<String>,
    pub seed: u64,
    pub elapsed_seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Run {
    report: VerifyReport,
    start: Instant,
}

impl Run {
    fn new(suite: Suite, seed: u64) -> Self {
        Run {
            report: VerifyReport {
                suite: suite.name().into(),
                cases_run: 0,
                failures: Vec::new(),
                notes: Vec::new(),
                seed,
                elapsed_seconds: 0.0,
            },
            start: Instant::now(),
        }
    }

    fn fail(&mut self, id: String, residual: String) {
        self.report.failures.push(CaseFailure { case_id: id, residual });
    }

    /// Records a case whose residual must vanish.
    fn zero(&mut self, id: impl FnOnce() -> String, outcome: Result<Rational>) {
        self.report.cases_run += 1;
        match outcome {
            Ok(r) if r.is_zero() => {}
            Ok(r) => self.fail(id(), format!("max |coefficient| = {}", format_rational(&r))),
            Err(e) => self.fail(id(), format!("error: {e}")),
        }
    }

    /// Records a case that must hold, with a description on failure.
    fn holds(&mut self, id: impl FnOnce() -> String, outcome: Result<bool>, detail: impl FnOnce() -> String) {
        self.report.cases_run += 1;
        match outcome {
            Ok(true) => {}
            Ok(false) => self.fail(id(), detail()),
            Err(e) => self.fail(id(), format!("error: {e}")),
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.report.notes.push(text.into());
    }

    fn finish(mut self) -> VerifyReport {
        self.report.elapsed_seconds = self.start.elapsed().as_secs_f64();
        self.report
    }
}

/// Runs one suite.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.n == Some(0) {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let mut run = Run::new(suite, opts.seed);
    match suite {
        Suite::Equivariance => equivariance(&mut run, opts)?,
        Suite::Commutators => commutators(&mut run, opts),
        Suite::Ideal => ideal(&mut run, opts)?,
        Suite::System => system(&mut run, opts),
        Suite::Adjoint => adjoint(&mut run, opts),
        Suite::ConformalInvariance => conformal_invariance(&mut run, opts),
        Suite::CurvatureTransforms => curvature_transforms(&mut run, opts),
        Suite::Agreement => agreement(&mut run, opts)?,
    }
    Ok(run.finish())
}

/// Signatures exercised in dimension `n`.
pub fn signatures(n: usize) -> Vec<(usize, usize)> {
    if n == 1 {
        vec![(1, 0)]
    } else {
        vec![(n, 0), (n - 1, 1)]
    }
}

/// The two weight choices used by the flat suites.
pub fn suite_weights() -> [(Rational, Rational); 2] {
    [(rat(1, 2), rat(1, 2)), (rat(1, 3), rat(3, 4))]
}

fn signs(p: usize, q: usize) -> Vec<i64> {
    std::iter::repeat(1).take(p).chain(std::iter::repeat(-1).take(q)).collect()
}

fn max_x(opts: &VerifyOptions) -> u32 {
    opts.max_degree.unwrap_or(3)
}

/// Symbols of suite 1: every monomial with momentum degree at most two.
pub fn equivariance_symbols(n: usize, max_x: u32) -> Vec<Poly> {
    monomial_basis(n, max_x, 2)
}

fn equivariance(run: &mut Run, opts: &VerifyOptions) -> Result<()> {
    let mx = max_x(opts);
    for n in opts.dims(Suite::Equivariance) {
        let basis = equivariance_symbols(n, mx);
        for (p, q) in signatures(n) {
            for (l, mu) in suite_weights() {
                let w = Weights::new(p, q, l, mu)?;
                let set = QuantizationParams::new(w.clone()).coefficients()?;
                for x in VectorFieldGenerator::all(w.metric()) {
                    for s in &basis {
                        let r = equivariance_residual_with(&set, &x, s).map(|d| d.max_abs_coeff());
                        run.zero(|| format!("{w} / {x} / {s}"), r);
                    }
                }
            }
        }
        run.note(format!("n = {n}: {} monomial symbols per generator", basis.len()));
    }
    Ok(())
}

fn commutators(run: &mut Run, opts: &VerifyOptions) {
    let deg = opts.max_degree.unwrap_or(3);
    let deltas = [int(0), rat(1, 2), rat(-2, 3), rat(5, 4), rat(7, 3)];
    for n in opts.dims(Suite::Commutators) {
        let mut g = opts.gen(n, 1);
        let sigs = signatures(n);
        for k in 0..100 {
            let (p, q) = sigs[k % sigs.len()];
            let m = FlatMetric::new(p, q).expect("valid signature");
            let poly = g.poly(deg, 3, 4);
            let delta = &deltas[k % deltas.len()];
            for rel in CommutationRelation::ALL {
                let r = commutation_residual(rel, delta, &m, &poly).map(|x| x.max_abs_coeff());
                run.zero(|| format!("n={n} ({p},{q}) #{k} {rel} delta={delta}"), r);
            }
            let op = |o: I| move |x: &Poly| compose(&[o], &m, x);
            let brackets: [(&str, Poly, Poly); 6] = [
                ("[D,G] = L", commutator(op(I::D), op(I::G), &poly), compose(&[I::L], &m, &poly)),
                ("[L,G] = 0", commutator(op(I::L), op(I::G), &poly), Poly::zero(n)),
                ("[L,D] = 0", commutator(op(I::L), op(I::D), &poly), Poly::zero(n)),
                ("[E,R] = 2R", commutator(op(I::E), op(I::R), &poly), compose(&[I::R], &m, &poly).scale_rat(&int(2))),
                ("[E,T] = -2T", commutator(op(I::E), op(I::T), &poly), compose(&[I::T], &m, &poly).scale_rat(&int(-2))),
                ("[T,R] = 4E", commutator(op(I::T), op(I::R), &poly), compose(&[I::E], &m, &poly).scale_rat(&int(4))),
            ];
            for (name, lhs, rhs) in brackets {
                run.zero(|| format!("n={n} ({p},{q}) #{k} {name}"), Ok((&lhs - &rhs).max_abs_coeff()));
            }
            if k % 10 == 0 {
                for x in VectorFieldGenerator::euclidean(m) {
                    for o in I::BASIC {
                        let r = (|| -> Result<Rational> {
                            let a = x.lie_symbol(delta, &compose(&[o], &m, &poly))?;
                            let b = compose(&[o], &m, &x.lie_symbol(delta, &poly)?);
                            Ok((&a - &b).max_abs_coeff())
                        })();
                        run.zero(|| format!("n={n} ({p},{q}) #{k} [{o}, L_{x}]"), r);
                    }
                }
            }
        }
    }
}

/// The frozen `Z` witness: a symbol in dimension 3 and its image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealWitness {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub witness: String,
    pub image: String,
}

impl IdealWitness {
    pub fn frozen() -> Result<Self> {
        serde_json::from_str(IDEAL_WITNESS_FIXTURE).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn metric(&self) -> Result<FlatMetric> {
        FlatMetric::new(self.p, self.q)
    }
}

/// The first monomial (in basis order) with nonzero image under `Z`.
pub fn find_ideal_witness(m: &FlatMetric, max_x: u32, max_xi: u32) -> Option<(Poly, Poly)> {
    monomial_basis(m.n(), max_x, max_xi).into_iter().find_map(|p| {
        let z = ideal_generator_z(m, &p);
        (!z.is_zero()).then_some((p, z))
    })
}

fn ideal(run: &mut Run, opts: &VerifyOptions) -> Result<()> {
    for n in opts.dims(Suite::Ideal) {
        match n {
            1 => return Err(Error::InvalidInput("the ideal suite needs n >= 2".into())),
            2 => {
                let mut g = opts.gen(n, 2);
                let deg = opts.max_degree.unwrap_or(4);
                for k in 0..100 {
                    let (p, q) = signatures(2)[k % 2];
                    let m = FlatMetric::new(p, q)?;
                    let poly = g.poly(deg, 4, 4);
                    let z = ideal_generator_z(&m, &poly);
                    run.zero(|| format!("n=2 ({p},{q}) #{k} Z = 0 on {poly}"), Ok(z.max_abs_coeff()));
                }
                run.note("n = 2: Z vanishes on every sampled symbol");
            }
            _ => {
                let m = FlatMetric::euclidean(n);
                let found = find_ideal_witness(&m, 2, 2);
                run.holds(
                    || format!("n={n} witness search"),
                    Ok(found.is_some()),
                    || "no monomial of degree (2, 2) has nonzero Z".into(),
                );
                if let Some((w, z)) = &found {
                    run.note(format!("nonzero witness found: Z({w}) = {z}"));
                }
                if n == 3 {
                    let frozen = IdealWitness::frozen()?;
                    let fm = frozen.metric()?;
                    let w = Poly::parse(frozen.n, &frozen.witness)?;
                    let image = Poly::parse(frozen.n, &frozen.image)?;
                    let z = ideal_generator_z(&fm, &w);
                    let searched = found.as_ref().map(|(p, _)| p);
                    run.holds(
                        || "n=3 frozen witness".into(),
                        Ok(!z.is_zero() && z == image && searched == Some(&w)),
                        || format!("Z({w}) = {z}, fixture says {image}"),
                    );
                    run.note(format!("frozen witness {} reproduced", frozen.witness));
                }
            }
        }
    }
    Ok(())
}

/// Random weights off resonance for which every closed form is defined.
pub fn random_generic_weights(g: &mut PolyGen, n: usize) -> Weights {
    loop {
        let w = Weights::euclidean(n, g.rational(), g.rational());
        if !resonant_deltas(n).contains(&w.delta()) && generic_coefficients(&w).is_ok() {
            return w;
        }
    }
}

fn system(run: &mut Run, opts: &VerifyOptions) {
    for n in opts.dims(Suite::System) {
        if n <= 4 {
            let mut g = opts.gen(n, 3);
            for k in 0..50 {
                let w = random_generic_weights(&mut g, n);
                let ok = system_matches_closed_form(&w);
                run.holds(|| format!("n={n} #{k} {w}"), ok, || "solution differs from the closed forms".into());
            }
        }
        let half = Weights::euclidean(n, rat(1, 2), rat(1, 2));
        let ok = generic_coefficients(&half).map(|set| {
            let nn = int(n as i64);
            let expected = [
                int(0),
                rat(1, 2),
                int(0),
                &nn / (int(8) * (&nn + int(1)) * (&nn + int(2))),
                &nn / (int(8) * (&nn + int(1))),
            ];
            GAMMA_NAMES
                .iter()
                .zip(&expected)
                .all(|(name, e)| set.get(name) == Some(e))
        });
        run.holds(|| format!("n={n} half-density"), ok, || "half-density gammas differ".into());
        let ok = resonance_table_matches(n);
        run.holds(|| format!("n={n} resonance table"), ok, || "resonance data differs from the table".into());
    }
}

/// Solves the equivariance system and compares with the closed forms.
pub fn system_matches_closed_form(w: &Weights) -> Result<bool> {
    let sol = solve_fixed(w)?;
    let SolutionSet::Unique(x) = sol.solution else {
        return Ok(false);
    };
    if w.n == 1 {
        let set = generic_coefficients(w)?;
        let get = |name: &str| set.require(name);
        let expected = [
            get("alpha")?,
            get("beta1")? + get("beta2")?,
            get("beta3")? + get("beta4")?,
        ];
        return Ok(x == expected);
    }
    let closed: Option<Vec<Rational>> = gammas_closed_form(w).into_iter().collect();
    Ok(closed.is_some_and(|c| c == x))
}

/// The table of admissible `(lambda, mu)` at each resonance, independent of
/// the library's classification.
pub fn resonance_table(n: usize) -> Vec<(Rational, Vec<Rational>)> {
    let nr = int(n as i64);
    if n == 1 {
        return vec![
            (int(1), vec![int(0)]),
            (rat(3, 2), vec![rat(-1, 2), int(0)]),
            (int(2), vec![rat(-1, 2)]),
        ];
    }
    let yam = (&nr - int(2)) / (int(2) * &nr);
    let inv = int(-1) / &nr;
    let mut cols: Vec<(Rational, Vec<Rational>)> = Vec::new();
    let mut push = |d: Rational, ls: Vec<Rational>| {
        if let Some(c) = cols.iter_mut().find(|(x, _)| *x == d) {
            c.1.extend(ls);
        } else {
            cols.push((d, ls));
        }
    };
    push(int(2) / &nr, vec![yam.clone()]);
    push((&nr + int(2)) / (int(2) * &nr), vec![int(0), yam]);
    push(int(1), vec![int(0)]);
    push((&nr + int(1)) / &nr, vec![int(0), inv.clone()]);
    push((&nr + int(2)) / &nr, vec![inv]);
    for (_, ls) in cols.iter_mut() {
        ls.sort();
        ls.dedup();
    }
    cols.sort();
    cols
}

/// Checks the classification and the `lambda`-free solve against the table.
pub fn resonance_table_matches(n: usize) -> Result<bool> {
    let table = resonance_table(n);
    let deltas: Vec<Rational> = table.iter().map(|(d, _)| d.clone()).collect();
    if resonant_deltas(n) != deltas {
        return Ok(false);
    }
    for (d, lambdas) in &table {
        let slice = coefficients::classify_resonance(n, d)?;
        let listed: Vec<Rational> = slice.pairs.iter().map(|p| p.lambda.clone()).collect();
        if !slice.resonant || listed != *lambdas || slice.pairs.iter().any(|p| &p.mu - &p.lambda != *d) {
            return Ok(false);
        }
        match solve_lambda_free(n, d)? {
            LambdaFreeSolution::Finite(v) => {
                let solved: Vec<Rational> = v.into_iter().map(|(l, _)| l).collect();
                if solved != *lambdas {
                    return Ok(false);
                }
            }
            LambdaFreeSolution::Generic { .. } => return Ok(false),
        }
    }
    for d in [int(0), rat(1, 2), rat(-3, 7), int(3)] {
        if deltas.contains(&d) {
            continue;
        }
        let generic = matches!(
            solve_lambda_free(n, &d)?,
            LambdaFreeSolution::Generic { ref exceptions } if exceptions.is_empty()
        );
        if !generic || coefficients::classify_resonance(n, &d)?.resonant {
            return Ok(false);
        }
    }
    Ok(true)
}

fn adjoint(run: &mut Run, opts: &VerifyOptions) {
    let deg = max_x(opts);
    for n in opts.dims(Suite::Adjoint) {
        let mut g = opts.gen(n, 4);
        for l in [int(0), rat(1, 4), rat(1, 2)] {
            let w = Weights::euclidean(n, l.clone(), int(1) - &l);
            let params = QuantizationParams::new(w.clone())
                .with_hbar(rat(2, 3))
                .with_free_value(rat(1, 7));
            for k in 0..10 {
                let s = Symbol2::new(g.poly(deg, 2, 5), w.clone());
                let r = s.and_then(|s| quantize_components(&params, &s)).map(|q| formal_adjoint(&q).sub(&q).max_abs_coeff());
                run.zero(|| format!("n={n} lambda={l} #{k}"), r);
            }
        }
        let w = Weights::euclidean(n, rat(1, 3), rat(3, 4));
        let params = QuantizationParams::new(w.clone()).with_hbar(int(1));
        let witness = Symbol2::parse("x1*xi1", w.clone());
        let r = witness.and_then(|s| quantize_components(&params, &s)).map(|q| formal_adjoint(&q) != q);
        run.holds(
            || format!("n={n} witness x1*xi1 at {w}"),
            r,
            || "the quantization is self-adjoint although lambda + mu != 1".into(),
        );
    }
}

fn conformal_invariance(run: &mut Run, opts: &VerifyOptions) {
    for n in opts.dims(Suite::ConformalInvariance) {
        let mut g = opts.gen(n, 5);
        let weights: Vec<(Rational, Rational)> = if n <= 2 {
            vec![(rat(1, 2), rat(1, 2)), (rat(1, 3), rat(3, 4)), (rat(-1, 2), rat(3, 2))]
        } else {
            suite_weights().to_vec()
        };
        for (l, mu) in weights {
            let w = Weights::euclidean(n, l, mu);
            let set = match coefficients::default_coefficients(&w) {
                Ok(set) if set.is_resolved() => set,
                _ => {
                    run.note(format!("skipped {w}: coefficients not resolved"));
                    continue;
                }
            };
            let sigs = signatures(n);
            let count = if n <= 2 { 20 } else { 50 };
            for k in 0..count {
                let (p, q) = sigs[k % sigs.len()];
                let s = curved::random::symbol_jet(&mut g, &w);
                let r = if n <= 2 {
                    let g0 = FlatMetric::new(p, q).expect("valid").matrix();
                    let fp = geometry::random::factor_jet(&mut g, n);
                    let f = geometry::random::factor_jet(&mut g, n);
                    MetricJet2::presentation(&fp, &g0)
                        .and_then(|m| conformal_invariance_difference(&set, &m, &f, &s, Some(&fp)))
                } else {
                    let m = geometry::random::metric_jet(&mut g, &signs(p, q));
                    let f = geometry::random::factor_jet(&mut g, n);
                    conformal_invariance_difference(&set, &m, &f, &s, None)
                };
                run.zero(|| format!("n={n} ({p},{q}) {w} #{k}"), r.map(|d| d.max_abs()));
            }
        }
    }
}

fn curvature_transforms(run: &mut Run, opts: &VerifyOptions) {
    for n in opts.dims(Suite::CurvatureTransforms) {
        let mut g = opts.gen(n, 6);
        let sigs = signatures(n);
        for k in 0..50 {
            let (p, q) = sigs[k % sigs.len()];
            let m = geometry::random::metric_jet(&mut g, &signs(p, q));
            let f = geometry::random::factor_jet(&mut g, n);
            let ok = two_route_curvature(&m, &f);
            run.holds(|| format!("n={n} ({p},{q}) #{k} rescaled curvature"), ok, || "routes disagree".into());
            let g0 = FlatMetric::new(p, q).expect("valid").matrix();
            let ok = MetricJet2::conformally_flat(&f, &g0).and_then(|cf| {
                Ok(curvature_from_jets(&cf)?.gamma == gamma_conf_flat(&f, &g0)?)
            });
            run.holds(|| format!("n={n} ({p},{q}) #{k} conformally flat Christoffel"), ok, || "routes disagree".into());
            if n == 2 {
                let ok = MetricJet2::presentation(&f, &g0).and_then(|pm| {
                    let s = schwarzian_nd(&f, &pm)?;
                    let c = curvature_from_jets(&pm)?;
                    Ok(int(-2) * c.trace(&s.s) == c.scalar)
                });
                run.holds(|| format!("n=2 ({p},{q}) #{k} trace of the Schwarzian"), ok, || "R != -2 tr S".into());
            }
        }
    }
}

/// Curvature of `F m` computed from the rescaled jets and from the closed-form laws.
pub fn two_route_curvature(m: &MetricJet2, f: &ConformalFactorJet) -> Result<bool> {
    let direct = curvature_from_jets(&conformal_rescale(m, f))?;
    let closed = rescaled_curvature_closed_form(m, f)?;
    Ok(direct.gamma == closed.gamma && direct.ricci == closed.ricci && direct.scalar == closed.scalar)
}

fn agreement(run: &mut Run, opts: &VerifyOptions) -> Result<()> {
    let mx = max_x(opts);
    for n in opts.dims(Suite::Agreement) {
        let basis = equivariance_symbols(n, mx);
        for (p, q) in signatures(n) {
            for (l, mu) in suite_weights() {
                let w = Weights::new(p, q, l, mu)?;
                let set = QuantizationParams::new(w.clone()).coefficients()?;
                for s in &basis {
                    let r = (|| -> Result<Rational> {
                        let a = quantize_components_with(&set, s, None)?;
                        let b = quantize_ansatz_with(&set, s)?;
                        Ok(a.sub(&b).max_abs_coeff())
                    })();
                    run.zero(|| format!("{w} components = ansatz on {s}"), r);
                }
                for name in ["alpha", "beta1", "beta2", "beta3", "beta4"] {
                    let ok = mutation_detected(&set, name, &basis, false);
                    run.holds(|| format!("{w} mutated {name}"), ok, || "mutation left every residual zero".into());
                }
                for name in GAMMA_NAMES {
                    let ok = mutation_detected(&set, name, &basis, true);
                    run.holds(|| format!("{w} mutated {name}"), ok, || "mutation left every residual zero".into());
                }
            }
        }
        let mut g = opts.gen(n, 7);
        for k in 0..100 {
            let sigs = signatures(n);
            let (p, q) = sigs[k % sigs.len()];
            let m = FlatMetric::new(p, q)?;
            let (l, mu) = (g.rational(), g.rational());
            let a = g.operator(mx, 5);
            let r = inversion_matches_definition(&m, &l, &mu, &a);
            run.holds(|| format!("n={n} ({p},{q}) #{k} inversion action"), r, || "formula differs from the composition".into());
        }
    }
    Ok(())
}

/// Compares the closed-form inversion action with the composition definition.
pub fn inversion_matches_definition(m: &FlatMetric, l: &Rational, mu: &Rational, a: &DiffOperator2) -> Result<bool> {
    let formula = inversion_action_formula(m, l, mu, a)?;
    for (r, f) in formula.iter().enumerate() {
        let direct = lie_operator_defn(&VectorFieldGenerator::inversion(*m, r), l, mu, a)?;
        if &direct != f {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether adding one to coefficient `name` breaks equivariance on some
/// generator and some symbol of `basis`. With `ansatz`, the mutated
/// coefficient feeds the invariant-operator form of the map.
pub fn mutation_detected(
    set: &crate::coefficients::CoefficientSet,
    name: &str,
    basis: &[Poly],
    ansatz: bool,
) -> Result<bool> {
    let mut mutated = set.clone();
    let value = mutated.require(name)?;
    mutated.set(name, Some(value + Rational::one()))?;
    let w = &set.weights;
    let m = w.metric();
    let gammas = mutated.gammas()?;
    let q = |s: &Poly| -> Result<DiffOperator2> {
        if ansatz {
            DiffOperator2::from_symbol(&ansatz_map(&gammas, &m, s))
        } else {
            quantize_components_with(&mutated, s, None)
        }
    };
    let delta = w.delta();
    for x in VectorFieldGenerator::all(m) {
        let field = x.field();
        for s in basis {
            let lhs = q(&field.lie_symbol(&delta, s)?)?;
            let rhs = lie_operator_field(&field, &w.lambda, &w.mu, &q(s)?)?;
            if !lhs.sub(&rhs).is_zero() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
