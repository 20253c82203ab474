//! The quantization map on flat space, built two ways, and the exact
//! equivariance, equivariance-equation and self-adjointness checks.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coefficients::{self, CoefficientSet, Weights};
use crate::error::{Error, Result};
use crate::invariant::{compose, contracted_commutator, InvariantOperator as Op};
use crate::linalg::{self, SolutionSet};
use crate::metric::FlatMetric;
use crate::operator::{lie_operator_field, DiffOperator2};
use crate::poly::{Monomial, Poly, PolyJson, Var};
use crate::scalar::{int, rat, ExactScalar, Rational};
use crate::vector_field::{VectorField, VectorFieldGenerator};

/// A symbol of momentum degree at most two, tagged with its weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol2 {
    poly: Poly,
    weights: Weights,
}

impl Symbol2 {
    pub fn new(poly: Poly, weights: Weights) -> Result<Self> {
        if poly.n() != weights.n {
            return Err(Error::DimensionMismatch {
                expected: weights.n,
                found: poly.n(),
            });
        }
        if poly.xi_degree().unwrap_or(0) > 2 {
            return Err(Error::InvalidInput(format!(
                "symbol has momentum degree above 2: {poly}"
            )));
        }
        Ok(Symbol2 { poly, weights })
    }

    pub fn parse(text: &str, weights: Weights) -> Result<Self> {
        Self::new(Poly::parse(weights.n, text)?, weights)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// The homogeneous part of momentum degree `k`.
    pub fn part(&self, k: u32) -> Poly {
        self.poly.homogeneous_xi(k)
    }
}

#[derive(Serialize, Deserialize)]
struct Symbol2Json {
    #[serde(flatten)]
    poly: PolyJson,
    weights: Weights,
}

impl Serialize for Symbol2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Symbol2Json {
            poly: self.poly.to_json(),
            weights: self.weights.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Symbol2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = Symbol2Json::deserialize(d)?;
        let poly = Poly::from_json(&j.poly).map_err(serde::de::Error::custom)?;
        Symbol2::new(poly, j.weights).map_err(serde::de::Error::custom)
    }
}

/// Weights, Planck constant and resonance resolution for one quantization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizationParams {
    pub weights: Weights,
    /// When set, symbols are first rescaled by `(i hbar)^k` in degree `k`.
    pub hbar: Option<Rational>,
    pub resonant_free: Option<Rational>,
}

impl QuantizationParams {
    pub fn new(weights: Weights) -> Self {
        QuantizationParams {
            weights,
            hbar: None,
            resonant_free: None,
        }
    }

    pub fn with_hbar(mut self, hbar: Rational) -> Self {
        self.hbar = Some(hbar);
        self
    }

    pub fn with_free_value(mut self, value: Rational) -> Self {
        self.resonant_free = Some(value);
        self
    }

    /// Closed forms off resonance. On resonance the family is pinned by
    /// symmetry when `lambda + mu = 1`; the explicit free value then fixes
    /// the designated parameter, or the single one left after pinning.
    pub fn coefficients(&self) -> Result<CoefficientSet> {
        let w = &self.weights;
        let delta = w.delta();
        let resonant = coefficients::resonant_deltas(w.n).contains(&delta);
        if !resonant {
            return coefficients::generic_coefficients(w);
        }
        let pin = &w.lambda + &w.mu == int(1);
        let base = coefficients::resonant_coefficients(w, None, pin)?;
        let open: Vec<String> = base
            .free_parameters
            .iter()
            .filter(|p| p.value.is_none())
            .map(|p| p.name.clone())
            .collect();
        let Some(value) = &self.resonant_free else {
            if open.is_empty() {
                return Ok(base);
            }
            return Err(Error::Unresolved(open.join(", ")));
        };
        let designated = coefficients::designated_free_parameter(w.n, &delta);
        let name = if open.iter().any(|n| n == designated) {
            designated.to_string()
        } else if open.len() == 1 {
            open[0].clone()
        } else if open.is_empty() {
            return Ok(base);
        } else {
            return Err(Error::Unresolved(open.join(", ")));
        };
        let values = BTreeMap::from([(name, value.clone())]);
        let set = coefficients::resonant_coefficients_with(w, &values, pin)?;
        if !set.is_resolved() {
            let rest: Vec<_> = set
                .free_parameters
                .iter()
                .filter(|p| p.value.is_none())
                .map(|p| p.name.clone())
                .collect();
            return Err(Error::Unresolved(rest.join(", ")));
        }
        Ok(set)
    }
}

/// Multiplies the momentum-degree-`k` part by `(i hbar)^k`.
pub fn apply_hbar(p: &Poly, hbar: &Rational) -> Poly {
    let ih = ExactScalar::imag(hbar.clone());
    let mut out = Poly::zero(p.n());
    for (m, c) in p.terms() {
        let f = ih.pow(m.xi_degree());
        out.add_term(m.clone(), c * &f);
    }
    out
}

fn prepared(params: &QuantizationParams, s: &Symbol2) -> Result<Poly> {
    if s.weights() != &params.weights {
        return Err(Error::InvalidInput(format!(
            "symbol weights {} differ from quantization weights {}",
            s.weights(),
            params.weights
        )));
    }
    Ok(match &params.hbar {
        Some(h) => apply_hbar(s.poly(), h),
        None => s.poly().clone(),
    })
}

/// `alpha, beta_1 .. beta_4`: the coefficients of the component formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentCoefficients {
    pub alpha: Rational,
    pub beta: [Rational; 4],
}

impl ComponentCoefficients {
    pub fn from_set(set: &CoefficientSet) -> Result<Self> {
        Ok(ComponentCoefficients {
            alpha: set.require("alpha")?,
            beta: [
                set.require("beta1")?,
                set.require("beta2")?,
                set.require("beta3")?,
                set.require("beta4")?,
            ],
        })
    }
}

/// The component formula: `A2 = P2`,
/// `A1 = P1 + beta1 d_j P2^{ij} + beta2 g^{ij} g_kl d_j P2^{kl}`,
/// `A0 = P0 + alpha d_i P1^i + beta3 d_ij P2^{ij} + beta4 g^{ij} g_kl d_ij P2^{kl}`.
pub fn components_operator(
    c: &ComponentCoefficients,
    metric: &FlatMetric,
    p: &Poly,
) -> Result<DiffOperator2> {
    let n = metric.n();
    let parts = DiffOperator2::from_symbol(p)?;
    let (p2, p1, p0) = (&parts.a2, &parts.a1, &parts.a0);
    let dx = |q: &Poly, i: usize| q.partial(Var::X(i));
    let mut trace = Poly::zero(n);
    for k in 0..n {
        trace = &trace + &p2[k][k].scale(&metric.sign_scalar(k));
    }
    let [b1, b2, b3, b4] = &c.beta;
    let mut op = DiffOperator2::zero(n);
    op.a2 = p2.clone();
    let mut a0 = p0.clone();
    for i in 0..n {
        let mut div = Poly::zero(n);
        for j in 0..n {
            div = &div + &dx(&p2[i][j], j);
            a0 = &a0 + &dx(&dx(&p2[i][j], i), j).scale_rat(b3);
        }
        let grad_trace = dx(&trace, i).scale(&metric.sign_scalar(i));
        op.a1[i] = &(&p1[i] + &div.scale_rat(b1)) + &grad_trace.scale_rat(b2);
        a0 = &a0 + &dx(&p1[i], i).scale_rat(&c.alpha);
        a0 = &a0 + &dx(&grad_trace, i).scale_rat(b4);
    }
    op.a0 = a0;
    Ok(op)
}

/// `Id + g1 G0 + g2 D + g3 Euler D + g4 L0 + g5 D^2` applied to a symbol.
pub fn ansatz_map(gammas: &[Rational; 5], metric: &FlatMetric, p: &Poly) -> Poly {
    let terms: [(&Rational, &[Op]); 5] = [
        (&gammas[0], &[Op::G0]),
        (&gammas[1], &[Op::D]),
        (&gammas[2], &[Op::Euler, Op::D]),
        (&gammas[3], &[Op::L0]),
        (&gammas[4], &[Op::D, Op::D]),
    ];
    let mut out = p.clone();
    for (g, ops) in terms {
        if !g.is_zero() {
            out = &out + &compose(ops, metric, p).scale_rat(g);
        }
    }
    out
}

pub fn quantize_components(params: &QuantizationParams, s: &Symbol2) -> Result<DiffOperator2> {
    let set = params.coefficients()?;
    quantize_components_with(&set, s.poly(), params.hbar.as_ref())
}

/// Component quantization with an explicit (possibly mutated) coefficient set.
pub fn quantize_components_with(
    set: &CoefficientSet,
    p: &Poly,
    hbar: Option<&Rational>,
) -> Result<DiffOperator2> {
    let p = hbar.map_or_else(|| p.clone(), |h| apply_hbar(p, h));
    components_operator(
        &ComponentCoefficients::from_set(set)?,
        &set.weights.metric(),
        &p,
    )
}

pub fn quantize_ansatz(params: &QuantizationParams, s: &Symbol2) -> Result<DiffOperator2> {
    let set = params.coefficients()?;
    let p = prepared(params, s)?;
    quantize_ansatz_with(&set, &p)
}

pub fn quantize_ansatz_with(set: &CoefficientSet, p: &Poly) -> Result<DiffOperator2> {
    DiffOperator2::from_symbol(&ansatz_map(&set.gammas()?, &set.weights.metric(), p))
}

/// Convenience: quantize with the component formula, checking weights.
pub fn quantize(params: &QuantizationParams, s: &Symbol2) -> Result<DiffOperator2> {
    prepared(params, s)?;
    quantize_components(params, s)
}

pub fn apply_operator(a: &DiffOperator2, f: &Poly) -> Result<Poly> {
    a.apply(f)
}

pub fn formal_adjoint(a: &DiffOperator2) -> DiffOperator2 {
    a.formal_adjoint()
}

/// `Q(L^delta_X P) - L^{lambda,mu}_X(Q(P))` for any polynomial vector field.
pub fn equivariance_residual_field(
    set: &CoefficientSet,
    field: &VectorField,
    p: &Poly,
) -> Result<DiffOperator2> {
    let w = &set.weights;
    let q = |s: &Poly| quantize_components_with(set, s, None);
    let lifted = field.lie_symbol(&w.delta(), p)?;
    let lhs = q(&lifted)?;
    let rhs = lie_operator_field(field, &w.lambda, &w.mu, &q(p)?)?;
    Ok(lhs.sub(&rhs))
}

pub fn equivariance_residual_with(
    set: &CoefficientSet,
    x: &VectorFieldGenerator,
    p: &Poly,
) -> Result<DiffOperator2> {
    equivariance_residual_field(set, &x.field(), p)
}

pub fn equivariance_residual(
    params: &QuantizationParams,
    x: &VectorFieldGenerator,
    s: &Symbol2,
) -> Result<DiffOperator2> {
    let set = params.coefficients()?;
    equivariance_residual_with(&set, x, &prepared(params, s)?)
}

/// Residual of the equivariance equation for a linear map `q` on symbols:
/// `sum_r xi^r (q(L^delta_r P) - L^delta_r q(P)) - (-1/2 R0 (E - 1) + 2E + 2(n lambda - 1)) E q(P)`,
/// with `E` the momentum-degree counter and `R0 = R T`.
pub fn equivariance_equation_residual_map(
    w: &Weights,
    q: impl Fn(&Poly) -> Poly,
    p: &Poly,
) -> Result<Poly> {
    let m = w.metric();
    let n = w.n;
    let commutator = contracted_commutator(&m, &w.delta(), &q, p)?;
    let eq = compose(&[Op::Euler], &m, &q(p));
    let shifted = &compose(&[Op::Euler], &m, &eq) - &eq;
    let r0 = compose(&[Op::R0], &m, &shifted).scale_rat(&rat(-1, 2));
    let lin = &compose(&[Op::Euler], &m, &eq).scale_rat(&int(2))
        + &eq.scale_rat(&(int(2) * (int(n as i64) * &w.lambda - int(1))));
    Ok(&commutator - &(&r0 + &lin))
}

pub fn equivariance_equation_residual(params: &QuantizationParams, s: &Symbol2) -> Result<Poly> {
    let set = params.coefficients()?;
    let gammas = set.gammas()?;
    let m = params.weights.metric();
    equivariance_equation_residual_map(
        &params.weights,
        |p| ansatz_map(&gammas, &m, p),
        &prepared(params, s)?,
    )
}

/// Every monomial symbol of momentum degree at most `max_xi` and
/// `x`-degree at most `max_x`.
pub fn monomial_basis(n: usize, max_x: u32, max_xi: u32) -> Vec<Poly> {
    fn exps(n: usize, max: u32) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| {
                    let used: u32 = v.iter().sum();
                    (0..=max - used).map(move |e| {
                        let mut w = v.clone();
                        w.push(e);
                        w
                    })
                })
                .collect();
        }
        out
    }
    let mut out = Vec::new();
    for xi in exps(n, max_xi) {
        for x in exps(n, max_x) {
            let mono = Monomial::new(&x, &xi).expect("same length");
            out.push(Poly::monomial(n, mono, ExactScalar::from_int(1)));
        }
    }
    out
}

/// Independent oracle: solves for `(alpha, beta_1..beta_4)` directly from
/// equivariance under every conformal generator on a monomial basis. For
/// `n = 1` the unknowns are `(alpha, beta_1, beta_3)` with `beta_2 = beta_4 = 0`.
pub fn derive_coefficients_from_equivariance(w: &Weights, max_x: u32) -> Result<SolutionSet> {
    let m = w.metric();
    let n = w.n;
    let unknowns: Vec<usize> = if n == 1 { vec![0, 1, 3] } else { (0..5).collect() };
    let unit = |k: Option<usize>| {
        let mut beta = [int(0), int(0), int(0), int(0)];
        let mut alpha = int(0);
        match k {
            Some(0) => alpha = int(1),
            Some(k) => beta[k - 1] = int(1),
            None => {}
        }
        ComponentCoefficients { alpha, beta }
    };
    let zero_part = unit(None);
    let parts: Vec<ComponentCoefficients> = unknowns.iter().map(|&k| unit(Some(k))).collect();
    let linear_part = |c: &ComponentCoefficients, p: &Poly| -> Result<DiffOperator2> {
        let full = components_operator(c, &m, p)?;
        let base = components_operator(&zero_part, &m, p)?;
        Ok(full.sub(&base))
    };
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for x in VectorFieldGenerator::all(m) {
        let field = x.field();
        for p in monomial_basis(n, max_x, 2) {
            let lifted = field.lie_symbol(&w.delta(), &p)?;
            let residual = |q: &dyn Fn(&Poly) -> Result<DiffOperator2>| -> Result<Poly> {
                let lhs = q(&lifted)?;
                let rhs = lie_operator_field(&field, &w.lambda, &w.mu, &q(&p)?)?;
                Ok(lhs.sub(&rhs).to_symbol())
            };
            let r0 = residual(&|s| components_operator(&zero_part, &m, s))?;
            let rk: Vec<Poly> = parts
                .iter()
                .map(|c| residual(&|s| linear_part(c, s)))
                .collect::<Result<_>>()?;
            let mut monos: Vec<Monomial> = r0.terms().map(|(m, _)| m.clone()).collect();
            for r in &rk {
                monos.extend(r.terms().map(|(m, _)| m.clone()));
            }
            monos.sort();
            monos.dedup();
            for mono in monos {
                rows.push(rk.iter().map(|r| r.coeff(&mono).re().clone()).collect());
                rhs.push(-r0.coeff(&mono).re().clone());
            }
        }
    }
    linalg::solve(&rows, &rhs)
}

/// Maps the derived unknowns onto `(alpha, beta_1..beta_4)`.
pub fn expand_derived(n: usize, x: &[Rational]) -> [Rational; 5] {
    if n == 1 {
        [x[0].clone(), x[1].clone(), int(0), x[2].clone(), int(0)]
    } else {
        [
            x[0].clone(),
            x[1].clone(),
            x[2].clone(),
            x[3].clone(),
            x[4].clone(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::PolyGen;

    fn params(n: usize, l: Rational, m: Rational) -> QuantizationParams {
        QuantizationParams::new(Weights::euclidean(n, l, m))
    }

    fn sym(params: &QuantizationParams, text: &str) -> Symbol2 {
        Symbol2::parse(text, params.weights.clone()).unwrap()
    }

    #[test]
    fn spec_examples() {
        let pr = params(2, rat(1, 3), rat(3, 4));
        let q = quantize_components(&pr, &sym(&pr, "x1*x2 + 3")).unwrap();
        assert_eq!(q, DiffOperator2::multiplication(Poly::parse(2, "x1*x2 + 3").unwrap()));
        let c = quantize_components(&pr, &sym(&pr, "2*xi1^2 + xi1*xi2")).unwrap();
        assert_eq!(c.to_symbol(), Poly::parse(2, "2*xi1^2 + xi1*xi2").unwrap());

        let one = params(1, rat(1, 5), rat(2, 3));
        let w = one.weights.clone();
        let a = quantize_components(&one, &sym(&one, "x1^2*xi1^2")).unwrap();
        let b12 = (int(2) * &w.lambda + int(1)) / (int(2) - w.delta());
        assert_eq!(a.a1[0], Poly::parse(1, "2*x1").unwrap().scale_rat(&b12));

        let half = params(2, rat(1, 2), rat(1, 2));
        let op = quantize_components(&half, &sym(&half, "xi1^2")).unwrap();
        assert_eq!(
            apply_operator(&op, &Poly::parse(2, "x1^2").unwrap()).unwrap(),
            Poly::parse(2, "2").unwrap()
        );
    }

    #[test]
    fn hbar_scaling() {
        let p = Poly::parse(2, "xi1^2 + xi2 + 5").unwrap();
        let expected = &Poly::parse(2, "-xi1^2 + 5").unwrap() + &Poly::xi(2, 1).scale(&ExactScalar::i());
        assert_eq!(apply_hbar(&p, &int(1)), expected);
        let p1 = Poly::parse(1, "xi1").unwrap();
        assert_eq!(apply_hbar(&p1, &int(2)).to_string(), "2*i*xi1");
    }

    #[test]
    fn ansatz_agrees_with_components() {
        let mut g = PolyGen::new(17, 3);
        for (l, m) in [(rat(1, 2), rat(1, 2)), (rat(1, 3), rat(3, 4)), (rat(-2, 5), rat(1, 7))] {
            let pr = params(3, l, m);
            for _ in 0..20 {
                let s = Symbol2::new(g.poly(3, 2, 6), pr.weights.clone()).unwrap();
                assert_eq!(
                    quantize_components(&pr, &s).unwrap(),
                    quantize_ansatz(&pr, &s).unwrap()
                );
            }
        }
    }

    #[test]
    fn half_density_ansatz_matches_closed_form() {
        let pr = params(2, rat(1, 2), rat(1, 2));
        let set = pr.coefficients().unwrap();
        assert_eq!(set.gamma4, Some(rat(1, 48)));
        assert_eq!(set.gamma5, Some(rat(1, 12)));
    }

    #[test]
    fn inversion_equivariance_example() {
        let pr = params(2, rat(1, 2), rat(1, 2));
        let s = sym(&pr, "x2*xi1*xi2");
        let inv = VectorFieldGenerator::inversion(pr.weights.metric(), 0);
        assert!(equivariance_residual(&pr, &inv, &s).unwrap().is_zero());
        let mut set = pr.coefficients().unwrap();
        set.set("alpha", Some(rat(3, 2))).unwrap();
        let s1 = Poly::parse(2, "x1^2*xi1").unwrap();
        assert!(!equivariance_residual_with(&set, &inv, &s1).unwrap().is_zero());
    }

    #[test]
    fn equivariance_equation() {
        for n in [2usize, 3] {
            let mut g = PolyGen::new(23 + n as u64, n);
            let pr = params(n, rat(1, 3), rat(3, 4));
            for _ in 0..10 {
                let s = Symbol2::new(g.poly(3, 2, 5), pr.weights.clone()).unwrap();
                assert!(equivariance_equation_residual(&pr, &s).unwrap().is_zero());
            }
        }
        let w = Weights::euclidean(2, rat(1, 3), rat(3, 4));
        let p = Poly::parse(2, "x1^2*xi1").unwrap();
        let r = equivariance_equation_residual_map(&w, |q| q.clone(), &p).unwrap();
        assert!(!r.is_zero());
        let p0 = Poly::parse(2, "x1^3").unwrap();
        assert!(equivariance_equation_residual_map(&w, |q| q.clone(), &p0)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn self_adjoint_when_weights_sum_to_one() {
        let mut g = PolyGen::new(31, 2);
        for l in [int(0), rat(1, 4), rat(1, 2)] {
            let pr = params(2, l.clone(), int(1) - &l)
                .with_hbar(rat(2, 3))
                .with_free_value(rat(1, 7));
            for _ in 0..5 {
                let s = Symbol2::new(g.poly(3, 2, 5), pr.weights.clone()).unwrap();
                let q = quantize_components(&pr, &s).unwrap();
                assert_eq!(formal_adjoint(&q), q);
            }
        }
        let pr = params(2, rat(1, 3), rat(3, 4)).with_hbar(int(1));
        let s = sym(&pr, "x1*xi1");
        let q = quantize_components(&pr, &s).unwrap();
        assert_ne!(formal_adjoint(&q), q);
    }

    #[test]
    fn derived_system_matches_closed_forms() {
        for (n, l, m) in [
            (1, rat(1, 3), rat(3, 4)),
            (2, rat(1, 3), rat(3, 4)),
            (3, rat(-1, 2), rat(2, 5)),
        ] {
            let w = Weights::euclidean(n, l, m);
            let SolutionSet::Unique(x) = derive_coefficients_from_equivariance(&w, 2).unwrap()
            else {
                panic!("unique at {w}");
            };
            let set = coefficients::generic_coefficients(&w).unwrap();
            let mut expected = [
                set.alpha.clone().unwrap(),
                set.beta1.clone().unwrap(),
                set.beta2.clone().unwrap(),
                set.beta3.clone().unwrap(),
                set.beta4.clone().unwrap(),
            ];
            if n == 1 {
                expected = [
                    expected[0].clone(),
                    &expected[1] + &expected[2],
                    int(0),
                    &expected[3] + &expected[4],
                    int(0),
                ];
            }
            assert_eq!(expand_derived(n, &x), expected, "{w}");
        }
    }

    #[test]
    fn one_dimensional_resonant_families_from_equivariance() {
        let sl = Weights::euclidean(1, rat(-1, 2), rat(3, 2));
        let fam = derive_coefficients_from_equivariance(&sl, 3).unwrap();
        assert_eq!(fam.free_columns().len(), 1);
        let bad = Weights::euclidean(1, int(0), int(2));
        assert_eq!(
            derive_coefficients_from_equivariance(&bad, 3).unwrap(),
            SolutionSet::None
        );
        let d3 = Weights::euclidean(1, int(1), int(4));
        assert!(derive_coefficients_from_equivariance(&d3, 3).unwrap().is_unique());
    }
}
