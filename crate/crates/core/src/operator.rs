//! Differential operators with polynomial coefficients.
//!
//! [`DiffOp`] is a general operator `sum_alpha a_alpha d^alpha` used for
//! composition. [`DiffOperator2`] is the second-order normal form with
//! coefficient arrays `(A2, A1, A0)`.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{FlatMetric, Slot};
use crate::poly::{Monomial, Poly, Var};
use crate::scalar::{int, ExactScalar, Rational};
use crate::vector_field::{GeneratorKind, VectorField, VectorFieldGenerator};

pub type MultiIndex = Vec<u32>;

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, t| acc * i64::from(n - t) / i64::from(t + 1))
}

fn sub_indices(alpha: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |g| {
                    let mut v = prefix.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
    }
    out
}

fn derive(p: &Poly, gamma: &[u32]) -> Poly {
    let mut out = p.clone();
    for (i, &g) in gamma.iter().enumerate() {
        for _ in 0..g {
            out = out.partial(Var::X(i));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    n: usize,
    terms: BTreeMap<MultiIndex, Poly>,
}

impl DiffOp {
    pub fn zero(n: usize) -> Self {
        DiffOp {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn multiplication(f: Poly) -> Self {
        let n = f.n();
        let mut op = Self::zero(n);
        op.add_term(vec![0; n], f);
        op
    }

    pub fn partial(n: usize, i: usize) -> Self {
        let mut alpha = vec![0; n];
        alpha[i] = 1;
        let mut op = Self::zero(n);
        op.add_term(alpha, Poly::one(n));
        op
    }

    /// `L^lambda_X = X^i d_i + lambda Div(X)`.
    pub fn lie_density(field: &VectorField, lambda: &Rational) -> Self {
        let n = field.n();
        let mut op = Self::multiplication(field.divergence().scale_rat(lambda));
        for (i, c) in field.components().iter().enumerate() {
            let mut alpha = vec![0; n];
            alpha[i] = 1;
            op.add_term(alpha, c.clone());
        }
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Poly {
        self.terms.get(alpha).cloned().unwrap_or_else(|| Poly::zero(self.n))
    }

    pub fn add_term(&mut self, alpha: MultiIndex, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(alpha).or_insert_with(|| Poly::zero(coeff.n()));
        *entry = &*entry + &coeff;
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.iter().sum()).max()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c);
        }
        out
    }

    /// Operator product `self ∘ other` via the Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(self.n);
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                for gamma in sub_indices(alpha) {
                    let db = derive(b, &gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let c: i64 = alpha
                        .iter()
                        .zip(&gamma)
                        .map(|(&al, &g)| binomial(al, g))
                        .product();
                    let idx: MultiIndex = alpha
                        .iter()
                        .zip(&gamma)
                        .zip(beta)
                        .map(|((&al, &g), &be)| al - g + be)
                        .collect();
                    out.add_term(idx, (a * &db).scale(&ExactScalar::from_int(c)));
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (alpha, a) in &self.terms {
            out = &out + &(a * &derive(f, alpha));
        }
        out
    }

    /// Formal adjoint `sum (-1)^|alpha| d^alpha ∘ conj(a_alpha)`.
    pub fn adjoint(&self) -> DiffOp {
        let mut out = DiffOp::zero(self.n);
        for (alpha, a) in &self.terms {
            let sign = if alpha.iter().sum::<u32>() % 2 == 0 { 1 } else { -1 };
            let mut d = DiffOp::zero(self.n);
            d.add_term(alpha.clone(), Poly::one(self.n).scale(&ExactScalar::from_int(sign)));
            out = out.add(&d.compose(&DiffOp::multiplication(a.conj())));
        }
        out
    }

    /// The full symbol `sum a_alpha xi^alpha`.
    pub fn to_symbol(&self) -> Poly {
        let mut out = Poly::zero(self.n);
        for (alpha, a) in &self.terms {
            let mono = Monomial::new(&vec![0; self.n], alpha).expect("same length");
            out = &out + &(a * &Poly::monomial(self.n, mono, ExactScalar::one()));
        }
        out
    }

    pub fn from_symbol(p: &Poly) -> DiffOp {
        let n = p.n();
        let mut out = DiffOp::zero(n);
        for (m, c) in p.terms() {
            let x_part = Monomial::new(m.x(), &vec![0; n]).expect("same length");
            out.add_term(m.xi().to_vec(), Poly::monomial(n, x_part, c.clone()));
        }
        out
    }
}

/// A differential operator of order at most two,
/// `A2^{ij} d_i d_j + A1^i d_i + A0`, with `A2` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator2 {
    pub a2: Vec<Vec<Poly>>,
    pub a1: Vec<Poly>,
    pub a0: Poly,
}

impl DiffOperator2 {
    pub fn zero(n: usize) -> Self {
        DiffOperator2 {
            a2: vec![vec![Poly::zero(n); n]; n],
            a1: vec![Poly::zero(n); n],
            a0: Poly::zero(n),
        }
    }

    pub fn new(a2: Vec<Vec<Poly>>, a1: Vec<Poly>, a0: Poly) -> Result<Self> {
        let op = DiffOperator2 { a2, a1, a0 };
        op.validate()?;
        Ok(op)
    }

    pub fn n(&self) -> usize {
        self.a1.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let all = self.a2.iter().flatten().chain(&self.a1).chain(std::iter::once(&self.a0));
        for p in all {
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
            if !p.is_x_only() {
                return Err(Error::UnexpectedMomentum(p.to_string()));
            }
        }
        if self.a2.len() != n || self.a2.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("A2 must be n x n".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if self.a2[i][j] != self.a2[j][i] {
                    return Err(Error::InvalidInput("A2 must be symmetric".into()));
                }
            }
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Self {
        Self::multiplication(Poly::one(n))
    }

    pub fn multiplication(f: Poly) -> Self {
        let mut op = Self::zero(f.n());
        op.a0 = f;
        op
    }

    /// The symbol `A2^{ij} xi_i xi_j + A1^i xi_i + A0`.
    pub fn to_symbol(&self) -> Poly {
        let n = self.n();
        let mut out = self.a0.clone();
        for i in 0..n {
            out = &out + &self.a1[i].mul_var(Var::Xi(i));
            for j in 0..n {
                out = &out + &self.a2[i][j].mul_var(Var::Xi(i)).mul_var(Var::Xi(j));
            }
        }
        out
    }

    /// Inverse of [`DiffOperator2::to_symbol`]; rejects momentum degree above two.
    pub fn from_symbol(p: &Poly) -> Result<Self> {
        let n = p.n();
        if p.xi_degree().unwrap_or(0) > 2 {
            return Err(Error::InvalidInput(format!(
                "symbol has momentum degree above 2: {p}"
            )));
        }
        let mut op = Self::zero(n);
        let mut beta = vec![0u32; n];
        op.a0 = p.xi_coefficient(&beta);
        let half = ExactScalar::real(Rational::new(1.into(), 2.into()));
        for i in 0..n {
            beta[i] = 1;
            op.a1[i] = p.xi_coefficient(&beta);
            for j in i + 1..n {
                beta[j] = 1;
                let c = p.xi_coefficient(&beta).scale(&half);
                op.a2[i][j] = c.clone();
                op.a2[j][i] = c;
                beta[j] = 0;
            }
            beta[i] = 2;
            op.a2[i][i] = p.xi_coefficient(&beta);
            beta[i] = 0;
        }
        Ok(op)
    }

    pub fn to_diffop(&self) -> DiffOp {
        DiffOp::from_symbol(&self.to_symbol())
    }

    /// Rejects operators of order above two.
    pub fn from_diffop(op: &DiffOp) -> Result<Self> {
        if op.order().unwrap_or(0) > 2 {
            return Err(Error::Invariant(format!(
                "operator of order {} where at most 2 was expected",
                op.order().unwrap_or(0)
            )));
        }
        Self::from_symbol(&op.to_symbol())
    }

    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        if f.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: f.n(),
            });
        }
        if !f.is_x_only() {
            return Err(Error::UnexpectedMomentum(f.to_string()));
        }
        Ok(self.to_diffop().apply(f))
    }

    pub fn formal_adjoint(&self) -> DiffOperator2 {
        Self::from_diffop(&self.to_diffop().adjoint()).expect("adjoint keeps the order")
    }

    pub fn add(&self, other: &DiffOperator2) -> DiffOperator2 {
        Self::from_symbol(&(&self.to_symbol() + &other.to_symbol())).expect("order kept")
    }

    pub fn sub(&self, other: &DiffOperator2) -> DiffOperator2 {
        Self::from_symbol(&(&self.to_symbol() - &other.to_symbol())).expect("order kept")
    }

    pub fn is_zero(&self) -> bool {
        self.to_symbol().is_zero()
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.to_symbol().max_abs_coeff()
    }

    pub fn to_json(&self) -> DiffOperator2Json {
        DiffOperator2Json {
            a2: self.a2.clone(),
            a1: self.a1.clone(),
            a0: self.a0.clone(),
        }
    }
}

/// Wire format `{"A2": [[Poly]], "A1": [Poly], "A0": Poly}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffOperator2Json {
    #[serde(rename = "A2")]
    pub a2: Vec<Vec<Poly>>,
    #[serde(rename = "A1")]
    pub a1: Vec<Poly>,
    #[serde(rename = "A0")]
    pub a0: Poly,
}

impl Serialize for DiffOperator2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffOperator2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DiffOperator2Json::deserialize(d)?;
        DiffOperator2::new(j.a2, j.a1, j.a0).map_err(serde::de::Error::custom)
    }
}

/// `L^mu_X ∘ A - A ∘ L^lambda_X`, for any polynomial vector field.
pub fn lie_operator_field(
    field: &VectorField,
    lambda: &Rational,
    mu: &Rational,
    a: &DiffOperator2,
) -> Result<DiffOperator2> {
    let op = a.to_diffop();
    let left = DiffOp::lie_density(field, mu).compose(&op);
    let right = op.compose(&DiffOp::lie_density(field, lambda));
    DiffOperator2::from_diffop(&left.sub(&right))
}

/// `L^{lambda,mu}_X(A)` computed by composing operators.
pub fn lie_operator_defn(
    x: &VectorFieldGenerator,
    lambda: &Rational,
    mu: &Rational,
    a: &DiffOperator2,
) -> Result<DiffOperator2> {
    lie_operator_field(&x.field(), lambda, mu, a)
}

/// Closed-form action of the inversion `X_r` on an operator written as its symbol.
pub fn inversion_action_symbol(
    metric: &FlatMetric,
    r: usize,
    lambda: &Rational,
    mu: &Rational,
    p: &Poly,
) -> Result<Poly> {
    let n = metric.n();
    let delta = mu - lambda;
    let inv = VectorFieldGenerator::new(GeneratorKind::Inversion(r), *metric)?;
    let mut out = inv.lie_symbol(&delta, p)?;
    let top = p.xi_degree().unwrap_or(0);
    let nl = lambda * int(n as i64);
    for k in 1..=top {
        let pk = p.homogeneous_xi(k);
        if pk.is_zero() {
            continue;
        }
        let t = metric.contract_slots(&pk, Slot::Xi)?;
        out = &out - &t.mul_var(Var::Xi(r));
        let c = (int(i64::from(k) - 1) + &nl) * int(2 * metric.sign(r));
        out = &out + &pk.partial(Var::Xi(r)).scale_rat(&c);
    }
    Ok(out)
}

/// Closed-form inversion action, one operator per inversion generator.
pub fn inversion_action_formula(
    metric: &FlatMetric,
    lambda: &Rational,
    mu: &Rational,
    a: &DiffOperator2,
) -> Result<Vec<DiffOperator2>> {
    let p = a.to_symbol();
    (0..metric.n())
        .map(|r| DiffOperator2::from_symbol(&inversion_action_symbol(metric, r, lambda, mu, &p)?))
        .collect()
}

/// The contracted action `xi^r L_{X_r}` in the form
/// `sum_l [L^delta(A_l) + (l+1)(-l/2 RT + 2(l + n lambda)) A_{l+1}]`.
pub fn contracted_inversion_action(
    metric: &FlatMetric,
    lambda: &Rational,
    mu: &Rational,
    p: &Poly,
) -> Result<Poly> {
    let n = metric.n();
    let delta = mu - lambda;
    let mut out = Poly::zero(n);
    for r in 0..n {
        let inv = VectorFieldGenerator::inversion(*metric, r);
        out = &out + &(&metric.xi_upper(r) * &inv.lie_symbol(&delta, p)?);
    }
    let rsq = metric.xi_square();
    let nl = lambda * int(n as i64);
    for k in 1..=p.xi_degree().unwrap_or(0) {
        let pk = p.homogeneous_xi(k);
        let l = i64::from(k) - 1;
        let rt = &rsq * &metric.contract_slots(&pk, Slot::Xi)?;
        out = &out
            + &rt.scale_rat(&(Rational::new((-l * (l + 1)).into(), 2.into())));
        out = &out + &pk.scale_rat(&((int(l) + &nl) * int(2 * (l + 1))));
    }
    Ok(out)
}

/// `sum_r xi^r L_{X_r}` evaluated from the per-generator closed form.
pub fn contract_inversions(metric: &FlatMetric, per_r: &[Poly]) -> Poly {
    let n = metric.n();
    per_r
        .iter()
        .enumerate()
        .fold(Poly::zero(n), |acc, (r, p)| &acc + &(&metric.xi_upper(r) * p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn p(n: usize, s: &str) -> Poly {
        Poly::parse(n, s).unwrap()
    }

    fn op(n: usize, s: &str) -> DiffOperator2 {
        DiffOperator2::from_symbol(&p(n, s)).unwrap()
    }

    #[test]
    fn symbol_dictionary() {
        let a = op(2, "x1*xi1*xi2 + 3*xi2^2 + x2*xi1 + 5");
        assert_eq!(a.a2[0][1], p(2, "1/2*x1"));
        assert_eq!(a.a2[1][1], p(2, "3"));
        assert_eq!(a.a1[0], p(2, "x2"));
        assert_eq!(a.a0, p(2, "5"));
        assert!(DiffOperator2::from_symbol(&p(1, "xi1^3")).is_err());
        assert!(DiffOperator2::new(vec![vec![p(1, "xi1")]], vec![Poly::zero(1)], Poly::zero(1)).is_err());
    }

    #[test]
    fn application() {
        assert_eq!(op(1, "xi1^2").apply(&p(1, "x1^3")).unwrap(), p(1, "6*x1"));
        assert_eq!(op(2, "x2").apply(&p(2, "x1")).unwrap(), p(2, "x1*x2"));
        assert_eq!(op(2, "2*xi1*xi2").apply(&p(2, "x1*x2")).unwrap(), p(2, "2"));
        assert!(op(2, "1").apply(&p(2, "xi1")).is_err());
    }

    #[test]
    fn composition_leibniz() {
        let d = DiffOp::partial(1, 0);
        let x = DiffOp::multiplication(p(1, "x1"));
        let comm = d.compose(&x).sub(&x.compose(&d));
        assert_eq!(comm, DiffOp::multiplication(Poly::one(1)));
        let d2 = d.compose(&d);
        let f = p(1, "x1^2 + x1^3");
        assert_eq!(d2.compose(&x).apply(&f), d2.apply(&x.apply(&f)));
    }

    #[test]
    fn adjoint_examples() {
        let a = op(2, "2*xi1^2 + xi1*xi2 + 3*xi2 + 7");
        let adj = a.formal_adjoint();
        assert_eq!(adj, op(2, "2*xi1^2 + xi1*xi2 - 3*xi2 + 7"));
        let b = op(1, "x1*xi1");
        assert_eq!(b.formal_adjoint(), op(1, "-x1*xi1 - 1"));
        let c = op(1, "i*x1^2");
        assert_eq!(c.formal_adjoint(), op(1, "-i*x1^2"));
        assert_eq!(a.formal_adjoint().formal_adjoint(), a);
    }

    #[test]
    fn lie_operator_examples() {
        let m = FlatMetric::euclidean(2);
        let (lam, mu) = (rat(1, 3), rat(3, 4));
        let inv = VectorFieldGenerator::inversion(m, 0);
        let id = DiffOperator2::identity(2);
        assert_eq!(
            lie_operator_defn(&inv, &lam, &mu, &id).unwrap(),
            op(2, "-5/3*x1")
        );
        let t2 = VectorFieldGenerator::translation(m, 1);
        assert!(lie_operator_defn(&t2, &lam, &mu, &op(2, "xi1")).unwrap().is_zero());
        let rot = VectorFieldGenerator::rotation(FlatMetric::new(1, 1).unwrap(), 0, 1);
        let lap = op(2, "xi1^2 - xi2^2");
        assert!(lie_operator_defn(&rot, &lam, &lam, &lap).unwrap().is_zero());
    }

    #[test]
    fn inversion_formula_special_cases() {
        let m = FlatMetric::new(2, 1).unwrap();
        let (lam, mu) = (rat(2, 7), rat(1, 2));
        let delta = &mu - &lam;
        let a0 = op(3, "x2^2 + x1");
        let per_r = inversion_action_formula(&m, &lam, &mu, &a0).unwrap();
        for (r, got) in per_r.iter().enumerate() {
            let inv = VectorFieldGenerator::inversion(m, r);
            assert_eq!(got.to_symbol(), inv.lie_symbol(&delta, &a0.to_symbol()).unwrap());
        }
        let d1 = op(3, "xi1");
        let per_r = inversion_action_formula(&m, &lam, &mu, &d1).unwrap();
        let inv = VectorFieldGenerator::inversion(m, 0);
        let extra = &per_r[0].to_symbol() - &inv.lie_symbol(&delta, &d1.to_symbol()).unwrap();
        assert_eq!(extra, p(3, "12/7"));
    }

    #[test]
    fn inversion_formula_matches_composition() {
        let m = FlatMetric::new(1, 1).unwrap();
        let (lam, mu) = (rat(1, 3), rat(3, 4));
        let a = op(2, "x1*x2*xi1^2 + x2^2*xi1*xi2 + x1^2*xi2 + x1 - 2*xi2^2 + x2*xi1");
        let formula = inversion_action_formula(&m, &lam, &mu, &a).unwrap();
        for (r, f) in formula.iter().enumerate() {
            let direct = lie_operator_defn(&VectorFieldGenerator::inversion(m, r), &lam, &mu, &a).unwrap();
            assert_eq!(&direct, f);
        }
        let contracted = contracted_inversion_action(&m, &lam, &mu, &a.to_symbol()).unwrap();
        let symbols: Vec<Poly> = formula.iter().map(DiffOperator2::to_symbol).collect();
        assert_eq!(contracted, contract_inversions(&m, &symbols));
    }
}
