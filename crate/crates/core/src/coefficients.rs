//! Coefficients of the equivariant quantization map, resonance
//! classification, and the exact equivariance linear system.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, PolyMatrix, SolutionSet, UniPoly};
use crate::metric::FlatMetric;
use crate::scalar::{format_rational, int, rat, serde_rational, Rational};

/// Dimension, signature and density weights; `delta = mu - lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightsJson", into = "WeightsJson")]
pub struct Weights {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub lambda: Rational,
    pub mu: Rational,
}

#[derive(Serialize, Deserialize)]
struct WeightsJson {
    n: usize,
    p: usize,
    q: usize,
    #[serde(with = "serde_rational")]
    lambda: Rational,
    #[serde(with = "serde_rational")]
    mu: Rational,
}

impl TryFrom<WeightsJson> for Weights {
    type Error = Error;

    fn try_from(j: WeightsJson) -> Result<Self> {
        if j.n != j.p + j.q {
            return Err(Error::InvalidInput(format!(
                "n = {} does not equal p + q = {}",
                j.n,
                j.p + j.q
            )));
        }
        Weights::new(j.p, j.q, j.lambda, j.mu)
    }
}

impl From<Weights> for WeightsJson {
    fn from(w: Weights) -> Self {
        WeightsJson {
            n: w.n,
            p: w.p,
            q: w.q,
            lambda: w.lambda,
            mu: w.mu,
        }
    }
}

impl Weights {
    pub fn new(p: usize, q: usize, lambda: Rational, mu: Rational) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        Ok(Weights {
            n: p + q,
            p,
            q,
            lambda,
            mu,
        })
    }

    pub fn euclidean(n: usize, lambda: Rational, mu: Rational) -> Self {
        Self::new(n, 0, lambda, mu).expect("n >= 1")
    }

    pub fn delta(&self) -> Rational {
        &self.mu - &self.lambda
    }

    pub fn metric(&self) -> FlatMetric {
        FlatMetric::new(self.p, self.q).expect("validated signature")
    }

    fn nr(&self) -> Rational {
        int(self.n as i64)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} ({},{}) lambda={} mu={}",
            self.n, self.p, self.q, self.lambda, self.mu
        )
    }
}

/// A `(lambda, mu)` pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightPair {
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_rational")]
    pub mu: Rational,
}

impl fmt::Display for WeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lambda, self.mu)
    }
}

fn ratio(num: Rational, den: Rational) -> Option<Rational> {
    (!den.is_zero()).then(|| num / den)
}

pub fn alpha(w: &Weights) -> Option<Rational> {
    ratio(w.lambda.clone(), int(1) - w.delta())
}

/// `beta_1 .. beta_4` in order.
pub fn betas_14(w: &Weights) -> [Option<Rational>; 4] {
    let n = w.nr();
    let (l, m, d) = (&w.lambda, &w.mu, w.delta());
    let nl = &n * l;
    let a = int(2) + &n * (int(1) - &d);
    let b = int(2) - &n * &d;
    let c = int(1) + &n * (int(1) - &d);
    let e = int(2) + &n * (int(1) - int(2) * &d);
    let b4_num = &nl
        * (&n * &n * m * (int(2) - l - m) + int(2) * (&nl + int(1)) * (&nl + int(1))
            - &n * (&n + int(1)));
    [
        ratio(int(2) * (&nl + int(1)), a.clone()),
        ratio(&n * (l + m - int(1)), &a * &b),
        ratio(&nl * (&nl + int(1)), &c * &a),
        ratio(b4_num, &c * &a * &e * &b),
    ]
}

/// `beta_5, beta_6`, meaningful for `n >= 3`.
pub fn betas_56(w: &Weights) -> [Option<Rational>; 2] {
    let n = w.nr();
    let d = w.delta();
    let num = &n * &n * &w.lambda * (&w.mu - int(1));
    let c = int(1) + &n * (int(1) - &d);
    let e = int(2) + &n * (int(1) - int(2) * &d);
    [
        ratio(num.clone(), (&n - int(2)) * &c),
        ratio(
            num * (&n * &d - int(2)),
            (&n - int(1)) * (&n - int(2)) * &c * &e,
        ),
    ]
}

/// The scalar-curvature coefficient `C_{lambda,mu}` of the quantized
/// geodesic Hamiltonian. At `lambda = 0` the numerator vanishes identically
/// and a vanishing denominator is resolved to `0`.
pub fn c_coefficient(w: &Weights) -> Option<Rational> {
    let n = w.nr();
    let den = (&n - int(1)) * (&n + int(2) - int(2) * &n * w.delta());
    if den.is_zero() {
        return w.lambda.is_zero().then(Rational::zero);
    }
    Some(&n * &n * &w.lambda * (&w.mu - int(1)) / den)
}

/// `gamma_1 .. gamma_5` from the closed-form solution.
pub fn gammas_closed_form(w: &Weights) -> [Option<Rational>; 5] {
    let n = w.nr();
    let (l, m, d) = (&w.lambda, &w.mu, w.delta());
    let nd2 = &n * &d - int(2);
    let nd12 = &n * (&d - int(1)) - int(2);
    let nd11 = &n * (&d - int(1)) - int(1);
    let n2d = &n * (int(2) * &d - int(1)) - int(2);
    let g4_num = &n
        * l
        * (int(2)
            + (int(4) * l - int(1)) * &n
            + (int(2) * l * l - l * m - m * m + int(2) * m - int(1)) * &n * &n);
    [
        ratio(&n * (l + m - int(1)), int(2) * &nd2 * &nd12),
        ratio(l.clone(), int(1) - &d),
        ratio(int(1) - l - m, (&d - int(1)) * &nd12),
        ratio(g4_num, int(2) * &nd11 * &n2d * &nd2 * &nd12),
        ratio(&n * l * (&n * l + int(1)), int(2) * &nd11 * &nd12),
    ]
}

/// Names of the unknowns of the equivariance system, per dimension.
pub const GAMMA_NAMES: [&str; 5] = ["gamma1", "gamma2", "gamma3", "gamma4", "gamma5"];
pub const ONE_DIM_NAMES: [&str; 3] = ["alpha", "beta1", "beta3"];

/// Elimination order: designated free unknowns come last.
const GAMMA_ORDER: [usize; 5] = [0, 1, 4, 2, 3];
const ONE_DIM_ORDER: [usize; 3] = [0, 1, 2];

/// The equivariance system as an affine function of `lambda` for fixed
/// `n` and `delta`. For `n >= 2` the unknowns are `gamma_1..gamma_5`; for
/// `n = 1` they are `(alpha, b12, b34)` with `b12 = beta_1 + beta_2` and
/// `b34 = beta_3 + beta_4`.
pub fn system_in_lambda(n: usize, delta: &Rational) -> (PolyMatrix, Vec<UniPoly>) {
    let c = |v: Rational| UniPoly::constant(v);
    let z = UniPoly::zero;
    let lin = |a: Rational, b: Rational| UniPoly::linear(a, b);
    let nr = int(n as i64);
    if n == 1 {
        let a = vec![
            vec![c(int(1) - delta), z(), z()],
            vec![z(), c(int(2) - delta), z()],
            vec![z(), lin(int(0), int(-1)), c(int(3) - int(2) * delta)],
        ];
        let b = vec![lin(int(0), int(1)), lin(int(1), int(2)), z()];
        return (a, b);
    }
    let minus_nl = lin(int(0), -&nr);
    let k5 = int(2) + &nr * (int(1) - delta);
    let a = vec![
        vec![c(int(2) - &nr * delta), c(int(-1)), c(int(-1)), z(), z()],
        vec![
            minus_nl.clone(),
            z(),
            z(),
            c(&nr * (int(1) - int(2) * delta) + int(2)),
            c(int(-1)),
        ],
        vec![
            z(),
            minus_nl.clone(),
            minus_nl,
            z(),
            c(int(2) * (&nr * (int(1) - delta) + int(1))),
        ],
        vec![z(), c(int(1) - delta), z(), z(), z()],
        vec![z(), c(k5.clone()), c(k5), z(), z()],
    ];
    let b = vec![
        c(rat(-1, 2)),
        z(),
        z(),
        lin(int(0), int(1)),
        lin(int(1), nr),
    ];
    (a, b)
}

fn evaluate_system(a: &PolyMatrix, b: &[UniPoly], lambda: &Rational) -> (Matrix, Vec<Rational>) {
    (
        a.iter()
            .map(|row| row.iter().map(|e| e.eval(lambda)).collect())
            .collect(),
        b.iter().map(|e| e.eval(lambda)).collect(),
    )
}

fn unknown_names(n: usize) -> &'static [&'static str] {
    if n == 1 {
        &ONE_DIM_NAMES
    } else {
        &GAMMA_NAMES
    }
}

fn elimination_order(n: usize) -> &'static [usize] {
    if n == 1 {
        &ONE_DIM_ORDER
    } else {
        &GAMMA_ORDER
    }
}

/// Solves `A x = b` eliminating columns in `order`; the result is indexed
/// canonically.
fn solve_ordered(a: &Matrix, b: &[Rational], order: &[usize]) -> Result<SolutionSet> {
    let permuted: Matrix = a
        .iter()
        .map(|row| order.iter().map(|&c| row[c].clone()).collect())
        .collect();
    let unpermute = |v: Vec<Rational>| {
        let mut out = vec![Rational::zero(); v.len()];
        for (k, x) in v.into_iter().enumerate() {
            out[order[k]] = x;
        }
        out
    };
    Ok(match linalg::solve(&permuted, b)? {
        SolutionSet::Unique(x) => SolutionSet::Unique(unpermute(x)),
        SolutionSet::None => SolutionSet::None,
        SolutionSet::Affine {
            particular,
            basis,
            free_columns,
        } => SolutionSet::Affine {
            particular: unpermute(particular),
            basis: basis.into_iter().map(unpermute).collect(),
            free_columns: free_columns.into_iter().map(|c| order[c]).collect(),
        },
    })
}

/// Solution of the equivariance system at fixed weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSolution {
    pub unknowns: Vec<String>,
    pub solution: SolutionSet,
}

impl SystemSolution {
    pub fn free_parameters(&self) -> Vec<String> {
        self.solution
            .free_columns()
            .iter()
            .map(|&c| self.unknowns[c].clone())
            .collect()
    }
}

/// Values of `lambda` for which a resonant system is solvable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaFreeSolution {
    /// Solvable for every `lambda` except the listed ones.
    Generic { exceptions: Vec<Rational> },
    /// Solvable exactly for the listed `lambda`.
    Finite(Vec<(Rational, SystemSolution)>),
}

impl LambdaFreeSolution {
    pub fn lambdas(&self) -> Vec<Rational> {
        match self {
            LambdaFreeSolution::Generic { .. } => Vec::new(),
            LambdaFreeSolution::Finite(v) => v.iter().map(|(l, _)| l.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivarianceSolution {
    Fixed(SystemSolution),
    LambdaFree(LambdaFreeSolution),
}

/// Solves the equivariance system exactly. With `lambda_free`, the weight
/// `lambda` becomes an unknown at fixed `delta` and the admissible values are
/// returned.
pub fn solve_equivariance_system(w: &Weights, lambda_free: bool) -> Result<EquivarianceSolution> {
    if lambda_free {
        solve_lambda_free(w.n, &w.delta()).map(EquivarianceSolution::LambdaFree)
    } else {
        solve_fixed(w).map(EquivarianceSolution::Fixed)
    }
}

pub fn solve_fixed(w: &Weights) -> Result<SystemSolution> {
    let (a, b) = system_in_lambda(w.n, &w.delta());
    let (a, b) = evaluate_system(&a, &b, &w.lambda);
    Ok(SystemSolution {
        unknowns: unknown_names(w.n).iter().map(|s| s.to_string()).collect(),
        solution: solve_ordered(&a, &b, elimination_order(w.n))?,
    })
}

pub fn solve_lambda_free(n: usize, delta: &Rational) -> Result<LambdaFreeSolution> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let (a, b) = system_in_lambda(n, delta);
    let (pivots, conditions) = linalg::bareiss(&a, &b)?;
    let mut candidates: Vec<Rational> = pivots
        .iter()
        .chain(&conditions)
        .flat_map(UniPoly::rational_roots)
        .collect();
    candidates.sort();
    candidates.dedup();
    let solve_at = |lambda: &Rational| -> Result<SystemSolution> {
        let w = Weights::euclidean(n, lambda.clone(), lambda + delta);
        solve_fixed(&w)
    };
    if conditions.iter().all(UniPoly::is_zero) {
        let mut exceptions = Vec::new();
        for l in candidates {
            if !solve_at(&l)?.solution.is_consistent() {
                exceptions.push(l);
            }
        }
        return Ok(LambdaFreeSolution::Generic { exceptions });
    }
    let mut out = Vec::new();
    for l in candidates {
        let s = solve_at(&l)?;
        if s.solution.is_consistent() {
            out.push((l, s));
        }
    }
    Ok(LambdaFreeSolution::Finite(out))
}

/// The resonant shifts for dimension `n`, ascending.
pub fn resonant_deltas(n: usize) -> Vec<Rational> {
    let nr = int(n as i64);
    let mut v = if n == 1 {
        vec![int(1), rat(3, 2), int(2)]
    } else {
        vec![
            int(2) / &nr,
            (&nr + int(2)) / (int(2) * &nr),
            int(1),
            (&nr + int(1)) / &nr,
            (&nr + int(2)) / &nr,
        ]
    };
    v.sort();
    v.dedup();
    v
}

/// Admissible `lambda` values at a resonant `delta`, from the resonance table.
pub fn admissible_lambdas(n: usize, delta: &Rational) -> Vec<Rational> {
    let nr = int(n as i64);
    let mut out = Vec::new();
    if n == 1 {
        if *delta == int(1) {
            out.push(int(0));
        } else if *delta == rat(3, 2) {
            out.extend([int(0), rat(-1, 2)]);
        } else if *delta == int(2) {
            out.push(rat(-1, 2));
        }
    } else {
        let yam = (&nr - int(2)) / (int(2) * &nr);
        let inv = -(int(1) / &nr);
        let columns = [
            (int(2) / &nr, vec![yam.clone()]),
            ((&nr + int(2)) / (int(2) * &nr), vec![int(0), yam]),
            (int(1), vec![int(0)]),
            ((&nr + int(1)) / &nr, vec![int(0), inv.clone()]),
            ((&nr + int(2)) / &nr, vec![inv]),
        ];
        for (d, ls) in columns {
            if d == *delta {
                out.extend(ls);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Resonance membership of one shift with its admissible pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceSlice {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    pub resonant: bool,
    pub pairs: Vec<WeightPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub n: usize,
    pub resonant_deltas: Vec<String>,
    pub pairs: BTreeMap<String, Vec<WeightPair>>,
}

pub fn classify_resonance(n: usize, delta: &Rational) -> Result<ResonanceSlice> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let resonant = resonant_deltas(n).contains(delta);
    let pairs = admissible_lambdas(n, delta)
        .into_iter()
        .map(|l| WeightPair {
            mu: &l + delta,
            lambda: l,
        })
        .collect();
    Ok(ResonanceSlice {
        n,
        delta: delta.clone(),
        resonant,
        pairs,
    })
}

pub fn resonance_report(n: usize) -> Result<ResonanceReport> {
    let mut pairs = BTreeMap::new();
    let deltas = resonant_deltas(n);
    for d in &deltas {
        pairs.insert(format_rational(d), classify_resonance(n, d)?.pairs);
    }
    Ok(ResonanceReport {
        n,
        resonant_deltas: deltas.iter().map(format_rational).collect(),
        pairs,
    })
}

/// A free parameter of a resonant family, with its value once resolved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub name: String,
    #[serde(with = "serde_rational::option")]
    pub value: Option<Rational>,
}

/// The coefficients of the quantization map at given weights.
///
/// Fields that are inapplicable or undetermined are `None`, with a reason in
/// `notes`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub weights: Weights,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    #[serde(with = "serde_rational::option")]
    pub alpha: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub beta1: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub beta2: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub beta3: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub beta4: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub beta5: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub beta6: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub gamma1: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub gamma2: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub gamma3: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub gamma4: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub gamma5: Option<Rational>,
    #[serde(rename = "C", with = "serde_rational::option")]
    pub c: Option<Rational>,
    pub resonant: bool,
    pub free_parameters: Vec<FreeParameter>,
    pub notes: BTreeMap<String, String>,
}

/// Coefficient names accepted by [`CoefficientSet::get`] and [`CoefficientSet::set`].
pub const COEFFICIENT_NAMES: [&str; 13] = [
    "alpha", "beta1", "beta2", "beta3", "beta4", "beta5", "beta6", "gamma1", "gamma2", "gamma3",
    "gamma4", "gamma5", "C",
];

impl CoefficientSet {
    fn empty(w: &Weights) -> Self {
        CoefficientSet {
            weights: w.clone(),
            delta: w.delta(),
            alpha: None,
            beta1: None,
            beta2: None,
            beta3: None,
            beta4: None,
            beta5: None,
            beta6: None,
            gamma1: None,
            gamma2: None,
            gamma3: None,
            gamma4: None,
            gamma5: None,
            c: None,
            resonant: false,
            free_parameters: Vec::new(),
            notes: BTreeMap::new(),
        }
    }

    fn slot(&mut self, name: &str) -> Option<&mut Option<Rational>> {
        Some(match name {
            "alpha" => &mut self.alpha,
            "beta1" => &mut self.beta1,
            "beta2" => &mut self.beta2,
            "beta3" => &mut self.beta3,
            "beta4" => &mut self.beta4,
            "beta5" => &mut self.beta5,
            "beta6" => &mut self.beta6,
            "gamma1" => &mut self.gamma1,
            "gamma2" => &mut self.gamma2,
            "gamma3" => &mut self.gamma3,
            "gamma4" => &mut self.gamma4,
            "gamma5" => &mut self.gamma5,
            "C" => &mut self.c,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        match name {
            "alpha" => self.alpha.as_ref(),
            "beta1" => self.beta1.as_ref(),
            "beta2" => self.beta2.as_ref(),
            "beta3" => self.beta3.as_ref(),
            "beta4" => self.beta4.as_ref(),
            "beta5" => self.beta5.as_ref(),
            "beta6" => self.beta6.as_ref(),
            "gamma1" => self.gamma1.as_ref(),
            "gamma2" => self.gamma2.as_ref(),
            "gamma3" => self.gamma3.as_ref(),
            "gamma4" => self.gamma4.as_ref(),
            "gamma5" => self.gamma5.as_ref(),
            "C" => self.c.as_ref(),
            _ => None,
        }
    }

    /// Overwrites one coefficient; used for mutation tests.
    pub fn set(&mut self, name: &str, value: Option<Rational>) -> Result<()> {
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown coefficient `{name}`")))?;
        *slot = value;
        Ok(())
    }

    fn put(&mut self, name: &str, value: Option<Rational>, reason: &str) {
        if value.is_none() {
            self.notes.insert(name.to_string(), reason.to_string());
        }
        *self.slot(name).expect("known name") = value;
    }

    /// The named coefficient, or an error explaining why it is unavailable.
    pub fn require(&self, name: &str) -> Result<Rational> {
        self.get(name).cloned().ok_or_else(|| {
            let reason = self
                .notes
                .get(name)
                .cloned()
                .unwrap_or_else(|| "not available".into());
            if self.free_parameters.iter().any(|p| p.value.is_none()) {
                Error::Unresolved(format!("{name}: {reason}"))
            } else {
                Error::InvalidInput(format!("{name}: {reason}"))
            }
        })
    }

    pub fn gammas(&self) -> Result<[Rational; 5]> {
        Ok([
            self.require("gamma1")?,
            self.require("gamma2")?,
            self.require("gamma3")?,
            self.require("gamma4")?,
            self.require("gamma5")?,
        ])
    }

    pub fn is_resolved(&self) -> bool {
        self.free_parameters.iter().all(|p| p.value.is_some())
    }

    /// Fills `beta_5`, `beta_6` and `C` from the weights.
    fn fill_curvature(&mut self) {
        let w = self.weights.clone();
        if w.n >= 3 {
            let [b5, b6] = betas_56(&w);
            self.put("beta5", b5, "0/0 at this resonance");
            self.put("beta6", b6, "0/0 at this resonance");
        } else {
            let reason = "inapplicable for n < 3; curvature enters through the Schwarzian";
            self.put("beta5", None, reason);
            self.put("beta6", None, reason);
        }
        let c = if w.n >= 2 { c_coefficient(&w) } else { None };
        let reason = if w.n < 2 { "inapplicable for n = 1" } else { "0/0 at this resonance" };
        self.put("C", c, reason);
    }
}

/// Residuals of the five equations of the gamma system.
pub fn system_residuals(w: &Weights, gammas: &[Rational; 5]) -> Vec<Rational> {
    let (a, b) = gamma_system_at(&w.nr(), &w.delta(), &w.lambda);
    linalg::mat_vec(&a, gammas)
        .into_iter()
        .zip(b)
        .map(|(l, r)| l - r)
        .collect()
}

fn gamma_system_at(n: &Rational, delta: &Rational, lambda: &Rational) -> (Matrix, Vec<Rational>) {
    let nl = n * lambda;
    let k5 = int(2) + n * (int(1) - delta);
    let z = Rational::zero;
    (
        vec![
            vec![int(2) - n * delta, int(-1), int(-1), z(), z()],
            vec![-&nl, z(), z(), n * (int(1) - int(2) * delta) + int(2), int(-1)],
            vec![z(), -&nl, -&nl, z(), int(2) * (n * (int(1) - delta) + int(1))],
            vec![z(), int(1) - delta, z(), z(), z()],
            vec![z(), k5.clone(), k5, z(), z()],
        ],
        vec![rat(-1, 2), z(), z(), lambda.clone(), &nl + int(1)],
    )
}

fn is_resonant(w: &Weights) -> bool {
    resonant_deltas(w.n).contains(&w.delta())
}

/// Closed-form coefficients at non-resonant weights.
pub fn generic_coefficients(w: &Weights) -> Result<CoefficientSet> {
    let delta = w.delta();
    if is_resonant(w) {
        return Err(Error::Resonant {
            n: w.n,
            delta: format_rational(&delta),
        });
    }
    let mut set = CoefficientSet::empty(w);
    let gammas = gammas_closed_form(w);
    if w.n == 1 && gammas.iter().any(Option::is_none) {
        let a = alpha(w).expect("delta != 1");
        let b12 = (int(2) * &w.lambda + int(1)) / (int(2) - &delta);
        let b34 = &w.lambda * &b12 / (int(3) - int(2) * &delta);
        set.apply_one_dim(&[a, b12, b34]);
        set.notes.insert(
            "split".into(),
            "n = 1: beta2 = beta4 = 0 and beta1, beta3 carry the sums".into(),
        );
    } else {
        let gammas: Vec<Rational> = gammas
            .into_iter()
            .map(|g| g.expect("non-resonant weights have finite gammas"))
            .collect();
        let gammas: [Rational; 5] = gammas.try_into().expect("five gammas");
        if system_residuals(w, &gammas).iter().any(|r| !r.is_zero()) {
            return Err(Error::Invariant(format!(
                "closed-form gammas violate the equivariance system at {w}"
            )));
        }
        for (name, g) in GAMMA_NAMES.iter().zip(gammas) {
            set.put(name, Some(g), "");
        }
        set.put("alpha", alpha(w), "");
        for (k, b) in betas_14(w).into_iter().enumerate() {
            set.put(&format!("beta{}", k + 1), b, "");
        }
    }
    set.fill_curvature();
    Ok(set)
}

impl CoefficientSet {
    /// Sets the one-dimensional coefficients `(alpha, b12, b34)` with the
    /// split `beta2 = beta4 = 0`, `gamma1 = gamma4 = 0`.
    fn apply_one_dim(&mut self, v: &[Rational; 3]) {
        let [a, b12, b34] = v.clone();
        let half = rat(1, 2);
        self.put("alpha", Some(a.clone()), "");
        self.put("beta1", Some(b12.clone()), "");
        self.put("beta2", Some(int(0)), "");
        self.put("beta3", Some(b34.clone()), "");
        self.put("beta4", Some(int(0)), "");
        self.put("gamma1", Some(int(0)), "");
        self.put("gamma2", Some(a.clone()), "");
        self.put("gamma3", Some(&b12 * &half - &a), "");
        self.put("gamma4", Some(int(0)), "");
        self.put("gamma5", Some(&b34 * &half), "");
    }
}

/// The free parameter designated by the resonance: `gamma3` (or `alpha`
/// when `n = 1`) at `delta = 1`, `gamma4` (or `beta3` when `n = 1`)
/// otherwise.
pub fn designated_free_parameter(n: usize, delta: &Rational) -> &'static str {
    match (n == 1, delta.is_one()) {
        (true, true) => "alpha",
        (true, false) => "beta3",
        (false, true) => "gamma3",
        (false, false) => "gamma4",
    }
}

/// Resonant coefficients with the designated free parameter set to
/// `free_value` or pinned by formal self-adjointness.
pub fn resonant_coefficients(
    w: &Weights,
    free_value: Option<Rational>,
    pin_by_symmetry: bool,
) -> Result<CoefficientSet> {
    let mut values = BTreeMap::new();
    if let Some(v) = free_value {
        values.insert(designated_free_parameter(w.n, &w.delta()).to_string(), v);
    }
    resonant_coefficients_with(w, &values, pin_by_symmetry)
}

/// As [`resonant_coefficients`], with values for any of the free unknowns.
pub fn resonant_coefficients_with(
    w: &Weights,
    free_values: &BTreeMap<String, Rational>,
    pin_by_symmetry: bool,
) -> Result<CoefficientSet> {
    let delta = w.delta();
    if !is_resonant(w) {
        return generic_coefficients(w);
    }
    let slice = classify_resonance(w.n, &delta)?;
    if !slice.pairs.iter().any(|p| p.lambda == w.lambda) {
        return Err(Error::Inadmissible {
            lambda: format_rational(&w.lambda),
            mu: format_rational(&w.mu),
            delta: format_rational(&delta),
            admissible: slice
                .pairs
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", "),
        });
    }
    let names = unknown_names(w.n);
    let (pa, pb) = system_in_lambda(w.n, &delta);
    let (mut a, mut b) = evaluate_system(&pa, &pb, &w.lambda);
    let mut add_row = |col: usize, value: Rational| {
        let mut row = vec![Rational::zero(); names.len()];
        row[col] = int(1);
        a.push(row);
        b.push(value);
    };
    if pin_by_symmetry {
        if w.lambda.clone() + &w.mu != int(1) {
            return Err(Error::InvalidInput(format!(
                "symmetry pinning requires lambda + mu = 1, got {}",
                &w.lambda + &w.mu
            )));
        }
        if w.n == 1 {
            add_row(0, rat(1, 2));
            add_row(1, int(1));
        } else {
            add_row(0, int(0));
            add_row(1, rat(1, 2));
            add_row(2, int(0));
        }
    }
    for (name, value) in free_values {
        let col = names.iter().position(|n| n == name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "`{name}` is not an unknown here; expected one of {}",
                names.join(", ")
            ))
        })?;
        add_row(col, value.clone());
    }
    let solution = solve_ordered(&a, &b, elimination_order(w.n))?;
    if !solution.is_consistent() {
        return Err(Error::InvalidInput(format!(
            "the resonant system at {w} has no solution with the requested constraints"
        )));
    };
    let mut set = CoefficientSet::empty(w);
    set.resonant = true;
    let free: Vec<usize> = solution.free_columns().to_vec();
    let mut pinned: Vec<String> = Vec::new();
    if pin_by_symmetry {
        pinned.push("symmetry".into());
    }
    let unresolved: Vec<String> = free.iter().map(|&c| names[c].to_string()).collect();
    let family = SystemSolution {
        unknowns: names.iter().map(|s| s.to_string()).collect(),
        solution: solution.clone(),
    };
    let designated = designated_free_parameter(w.n, &delta);
    let original = solve_fixed(w)?.free_parameters();
    for name in &original {
        let value = if unresolved.contains(name) {
            None
        } else {
            family_value(&family, &unit(names, name))
        };
        set.free_parameters.push(FreeParameter {
            name: name.clone(),
            value,
        });
    }
    if !original.iter().any(|n| n == designated) {
        return Err(Error::Invariant(format!(
            "expected {designated} to be free at {w}"
        )));
    }
    let reason = format!("depends on free parameter(s) {}", unresolved.join(", "));
    let functional = |coeffs: &[(&str, Rational)]| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); names.len()];
        for (name, c) in coeffs {
            let k = names.iter().position(|n| n == name).expect("known unknown");
            v[k] += c;
        }
        v
    };
    let outputs: Vec<(&str, Vec<Rational>)> = if w.n == 1 {
        let half = rat(1, 2);
        vec![
            ("alpha", functional(&[("alpha", int(1))])),
            ("beta1", functional(&[("beta1", int(1))])),
            ("beta2", functional(&[])),
            ("beta3", functional(&[("beta3", int(1))])),
            ("beta4", functional(&[])),
            ("gamma1", functional(&[])),
            ("gamma2", functional(&[("alpha", int(1))])),
            ("gamma3", functional(&[("beta1", half.clone()), ("alpha", int(-1))])),
            ("gamma4", functional(&[])),
            ("gamma5", functional(&[("beta3", half)])),
        ]
    } else {
        vec![
            ("alpha", functional(&[("gamma2", int(1))])),
            ("beta1", functional(&[("gamma2", int(2)), ("gamma3", int(2))])),
            ("beta2", functional(&[("gamma1", int(2))])),
            ("beta3", functional(&[("gamma5", int(2))])),
            ("beta4", functional(&[("gamma4", int(2))])),
            ("gamma1", functional(&[("gamma1", int(1))])),
            ("gamma2", functional(&[("gamma2", int(1))])),
            ("gamma3", functional(&[("gamma3", int(1))])),
            ("gamma4", functional(&[("gamma4", int(1))])),
            ("gamma5", functional(&[("gamma5", int(1))])),
        ]
    };
    for (name, f) in outputs {
        set.put(name, family_value(&family, &f), &reason);
    }
    set.fill_curvature();
    if pin_by_symmetry {
        set.notes
            .insert("pinning".into(), "formal self-adjointness".into());
    }
    Ok(set)
}

fn unit(names: &[&str], name: &str) -> Vec<Rational> {
    names
        .iter()
        .map(|n| if *n == name { int(1) } else { int(0) })
        .collect()
}

/// Value of a linear functional on the family, if it does not depend on the
/// free parameters.
fn family_value(family: &SystemSolution, f: &[Rational]) -> Option<Rational> {
    let dot = |v: &[Rational]| -> Rational { f.iter().zip(v).map(|(a, b)| a * b).sum() };
    match &family.solution {
        SolutionSet::Unique(x) => Some(dot(x)),
        SolutionSet::None => None,
        SolutionSet::Affine {
            particular, basis, ..
        } => basis
            .iter()
            .all(|v| dot(v).is_zero())
            .then(|| dot(particular)),
    }
}

/// Coefficients at any weights: closed forms off resonance, the family
/// (optionally resolved) on resonance.
pub fn coefficients(
    w: &Weights,
    free_value: Option<Rational>,
    pin_by_symmetry: bool,
) -> Result<CoefficientSet> {
    if is_resonant(w) {
        resonant_coefficients(w, free_value, pin_by_symmetry)
    } else {
        generic_coefficients(w)
    }
}

/// Coefficients with the default resolution policy: symmetry pinning at
/// resonance when `lambda + mu = 1`.
pub fn default_coefficients(w: &Weights) -> Result<CoefficientSet> {
    let pin = is_resonant(w) && &w.lambda + &w.mu == int(1);
    coefficients(w, None, pin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::PolyGen;

    fn w(n: usize, l: Rational, m: Rational) -> Weights {
        Weights::euclidean(n, l, m)
    }

    #[test]
    fn half_density_values() {
        for n in 1..=6usize {
            let set = generic_coefficients(&w(n, rat(1, 2), rat(1, 2))).unwrap();
            let nn = int(n as i64);
            assert_eq!(set.alpha, Some(rat(1, 2)));
            assert_eq!(set.beta1, Some(int(1)));
            assert_eq!(set.beta2, Some(int(0)));
            assert_eq!(set.gamma1, Some(int(0)));
            assert_eq!(set.gamma2, Some(rat(1, 2)));
            assert_eq!(set.gamma3, Some(int(0)));
            assert_eq!(
                set.gamma4,
                Some(&nn / (int(8) * (&nn + int(1)) * (&nn + int(2))))
            );
            assert_eq!(set.gamma5, Some(&nn / (int(8) * (&nn + int(1)))));
        }
    }

    #[test]
    fn lambda_zero_kills_coefficients() {
        for n in 3..=5 {
            let set = generic_coefficients(&w(n, int(0), rat(2, 7))).unwrap();
            for name in ["alpha", "beta3", "beta4", "beta5", "beta6"] {
                assert_eq!(set.get(name), Some(&int(0)), "{name}");
            }
        }
    }

    #[test]
    fn dictionary_matches_closed_forms() {
        let mut g = PolyGen::new(11, 1);
        for n in 2..=5usize {
            for _ in 0..20 {
                let wt = w(n, g.rational(), g.rational());
                if is_resonant(&wt) {
                    continue;
                }
                let s = generic_coefficients(&wt).unwrap();
                let [g1, g2, g3, g4, g5] = s.gammas().unwrap();
                assert_eq!(s.alpha.clone().unwrap(), g2);
                assert_eq!(s.beta1.clone().unwrap(), int(2) * (&g2 + &g3));
                assert_eq!(s.beta2.clone().unwrap(), int(2) * g1);
                assert_eq!(s.beta3.clone().unwrap(), int(2) * g5);
                assert_eq!(s.beta4.clone().unwrap(), int(2) * g4);
            }
        }
    }

    #[test]
    fn c_is_beta5_plus_n_beta6() {
        let mut g = PolyGen::new(5, 1);
        for n in 3..=6usize {
            for _ in 0..10 {
                let wt = w(n, g.rational(), g.rational());
                if is_resonant(&wt) {
                    continue;
                }
                let [b5, b6] = betas_56(&wt);
                let expected = b5.unwrap() + int(n as i64) * b6.unwrap();
                assert_eq!(c_coefficient(&wt).unwrap(), expected);
            }
        }
    }

    #[test]
    fn system_solution_matches_closed_form() {
        let mut g = PolyGen::new(3, 1);
        let mut checked = 0;
        while checked < 50 {
            let n = 1 + checked % 4;
            let wt = w(n, g.rational(), g.rational());
            if is_resonant(&wt) || gammas_closed_form(&wt).iter().any(Option::is_none) {
                continue;
            }
            let s = solve_fixed(&wt).unwrap();
            let SolutionSet::Unique(x) = s.solution else {
                panic!("expected unique solution at {wt}");
            };
            if n == 1 {
                let [b1, b2, b3, b4] = betas_14(&wt).map(Option::unwrap);
                assert_eq!(x, vec![alpha(&wt).unwrap(), b1 + b2, b3 + b4]);
            } else {
                let closed: Vec<Rational> =
                    gammas_closed_form(&wt).into_iter().map(Option::unwrap).collect();
                assert_eq!(x, closed, "{wt}");
            }
            checked += 1;
        }
    }

    #[test]
    fn resonance_sets() {
        assert_eq!(resonant_deltas(1), vec![int(1), rat(3, 2), int(2)]);
        assert_eq!(
            resonant_deltas(3),
            vec![rat(2, 3), rat(5, 6), int(1), rat(4, 3), rat(5, 3)]
        );
        assert!(!classify_resonance(3, &rat(1, 2)).unwrap().resonant);
        assert!(classify_resonance(0, &int(1)).is_err());
        let s = classify_resonance(4, &rat(1, 2)).unwrap();
        assert_eq!(
            s.pairs,
            vec![WeightPair {
                lambda: rat(1, 4),
                mu: rat(3, 4)
            }]
        );
    }

    #[test]
    fn resonance_iff_denominator_vanishes() {
        for n in 2..=6usize {
            let nn = int(n as i64);
            for num in -12..=24 {
                let d = rat(num, 2 * n as i64);
                let dens = [
                    int(1) - &d,
                    int(2) + &nn * (int(1) - &d),
                    int(1) + &nn * (int(1) - &d),
                    int(2) + &nn * (int(1) - int(2) * &d),
                    int(2) - &nn * &d,
                ];
                let vanishes = dens.iter().any(Zero::is_zero);
                assert_eq!(classify_resonance(n, &d).unwrap().resonant, vanishes, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn lambda_free_reproduces_table() {
        for n in 1..=6usize {
            for d in resonant_deltas(n) {
                let sol = solve_lambda_free(n, &d).unwrap();
                assert_eq!(sol.lambdas(), admissible_lambdas(n, &d), "n={n} d={d}");
            }
        }
        let sol = solve_lambda_free(3, &rat(1, 2)).unwrap();
        assert!(matches!(sol, LambdaFreeSolution::Generic { .. }));
    }

    #[test]
    fn delta_one_family() {
        let LambdaFreeSolution::Finite(v) = solve_lambda_free(4, &int(1)).unwrap() else {
            panic!("finite");
        };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].0, int(0));
        assert_eq!(v[0].1.free_parameters(), vec!["gamma3".to_string()]);
    }

    #[test]
    fn pinned_resonant_pairs() {
        for n in 3..=6usize {
            let nn = int(n as i64);
            let yam = w(n, (&nn - int(2)) / (int(2) * &nn), (&nn + int(2)) / (int(2) * &nn));
            let s = resonant_coefficients(&yam, None, true).unwrap();
            assert!(s.is_resolved());
            assert_eq!(s.c, Some(-(&nn - int(2)) / (int(4) * (&nn - int(1)))));
            let lap = resonant_coefficients(&w(n, int(0), int(1)), None, true).unwrap();
            assert_eq!(lap.c, Some(int(0)));
            assert_eq!(lap.alpha, Some(rat(1, 2)));
            let new = w(n, -(int(1) / &nn), (&nn + int(1)) / &nn);
            let s = resonant_coefficients(&new, None, false).unwrap();
            assert_eq!(s.c, Some(int(1) / ((&nn - int(1)) * (&nn + int(2)))));
        }
    }

    #[test]
    fn unresolved_family_reports_free() {
        let s = resonant_coefficients(&w(3, int(0), int(1)), None, false).unwrap();
        assert!(!s.is_resolved());
        assert_eq!(s.gamma3, None);
        assert_eq!(s.gamma1, Some(int(0)));
        assert_eq!(s.beta1, Some(int(1)));
        assert!(matches!(s.require("alpha"), Err(Error::Unresolved(_))));
        let fixed = resonant_coefficients(&w(3, int(0), int(1)), Some(rat(1, 5)), false).unwrap();
        assert_eq!(fixed.gamma3, Some(rat(1, 5)));
        assert_eq!(fixed.alpha, Some(rat(3, 10)));
        let two = resonant_coefficients(&w(2, int(0), int(1)), None, true).unwrap();
        let names: Vec<_> = two.free_parameters.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, vec!["gamma1", "gamma3", "gamma4"]);
        assert_eq!(two.gamma4, None);
        assert_eq!(two.alpha, Some(rat(1, 2)));
    }

    #[test]
    fn inadmissible_pair_lists_alternatives() {
        let err = resonant_coefficients(&w(3, rat(1, 3), rat(4, 3)), None, false).unwrap_err();
        let Error::Inadmissible { admissible, .. } = err else {
            panic!("expected inadmissible");
        };
        assert_eq!(admissible, "(0, 1)");
        assert!(matches!(
            generic_coefficients(&w(3, int(0), int(1))),
            Err(Error::Resonant { .. })
        ));
    }

    #[test]
    fn one_dimensional_split_at_delta_three() {
        let s = generic_coefficients(&w(1, int(1), int(4))).unwrap();
        assert_eq!(s.beta1, Some(int(-3)));
        assert_eq!(s.beta3, Some(int(1)));
        assert_eq!(s.alpha, Some(rat(-1, 2)));
        let sl = resonant_coefficients(&w(1, rat(-1, 2), rat(3, 2)), None, true).unwrap();
        assert_eq!(sl.beta1, Some(int(1)));
        assert_eq!(sl.beta3, Some(rat(1, 2)));
    }

    #[test]
    fn json_round_trip() {
        let s = generic_coefficients(&w(3, rat(1, 2), rat(1, 2))).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"gamma2\":\"1/2\""));
        let back: CoefficientSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let two = generic_coefficients(&w(2, rat(1, 2), rat(1, 2))).unwrap();
        let v = serde_json::to_value(&two).unwrap();
        assert!(v["beta5"].is_null());
        assert!(v["notes"]["beta5"].is_string());
    }
}
