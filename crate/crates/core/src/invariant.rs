//! Invariant operators on symbols and the relations between them.
//!
//! Every operator acts on a [`Poly`]; composites, commutators and the Casimir
//! are evaluated by composing these actions.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::metric::{FlatMetric, Slot};
use crate::poly::{Poly, Var};
use crate::scalar::{int, rat, ExactScalar, Rational};
use crate::vector_field::VectorFieldGenerator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvariantOperator {
    /// Multiplication by `xi^i xi_i`.
    R,
    /// `Euler + n/2`.
    E,
    /// Momentum degree counter `xi_i d_{xi_i}`.
    Euler,
    /// `g^{ij} d_{xi_i} d_{xi_j}`.
    T,
    /// `xi^i d_{x^i}`.
    G,
    /// `d_{xi_i} d_{x^i}`.
    D,
    /// `g^{ij} d_{x^i} d_{x^j}`.
    L,
    R0,
    G0,
    L0,
    Casimir,
    Z,
}

impl InvariantOperator {
    pub const ALL: [InvariantOperator; 12] = [
        Self::R,
        Self::E,
        Self::Euler,
        Self::T,
        Self::G,
        Self::D,
        Self::L,
        Self::R0,
        Self::G0,
        Self::L0,
        Self::Casimir,
        Self::Z,
    ];

    /// The generators of the Euclidean commutant.
    pub const BASIC: [InvariantOperator; 6] =
        [Self::R, Self::E, Self::T, Self::G, Self::D, Self::L];

    pub fn name(self) -> &'static str {
        match self {
            Self::R => "R",
            Self::E => "E",
            Self::Euler => "Euler",
            Self::T => "T",
            Self::G => "G",
            Self::D => "D",
            Self::L => "L",
            Self::R0 => "R0",
            Self::G0 => "G0",
            Self::L0 => "L0",
            Self::Casimir => "Casimir",
            Self::Z => "Z",
        }
    }

    pub fn apply(self, m: &FlatMetric, p: &Poly) -> Result<Poly> {
        if p.n() != m.n() {
            return Err(Error::DimensionMismatch {
                expected: m.n(),
                found: p.n(),
            });
        }
        Ok(self.apply_unchecked(m, p))
    }

    fn apply_unchecked(self, m: &FlatMetric, p: &Poly) -> Poly {
        let n = m.n();
        match self {
            Self::R => p * &m.xi_square(),
            Self::Euler => euler(p),
            Self::E => &euler(p) + &p.scale_rat(&rat(n as i64, 2)),
            Self::T => m.contract_slots(p, Slot::Xi).expect("checked dimension"),
            Self::G => {
                let mut out = Poly::zero(n);
                for i in 0..n {
                    let d = p.partial(Var::X(i));
                    if !d.is_zero() {
                        out = &out + &d.mul_var(Var::Xi(i)).scale(&m.sign_scalar(i));
                    }
                }
                out
            }
            Self::D => {
                let mut out = Poly::zero(n);
                for i in 0..n {
                    out = &out + &p.partial(Var::X(i)).partial(Var::Xi(i));
                }
                out
            }
            Self::L => m.contract_slots(p, Slot::X).expect("checked dimension"),
            Self::R0 => Self::R.apply_unchecked(m, &Self::T.apply_unchecked(m, p)),
            Self::G0 => Self::G.apply_unchecked(m, &Self::T.apply_unchecked(m, p)),
            Self::L0 => Self::L.apply_unchecked(m, &Self::T.apply_unchecked(m, p)),
            Self::Casimir => casimir(m, p),
            Self::Z => ideal_generator_z(m, p),
        }
    }
}

impl fmt::Display for InvariantOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InvariantOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown invariant operator `{s}`")))
    }
}

pub fn apply_invariant(op: InvariantOperator, m: &FlatMetric, p: &Poly) -> Result<Poly> {
    op.apply(m, p)
}

fn euler(p: &Poly) -> Poly {
    let mut out = Poly::zero(p.n());
    for (mono, c) in p.terms() {
        let k = mono.xi_degree();
        if k > 0 {
            out.add_term(mono.clone(), c * &ExactScalar::from_int(i64::from(k)));
        }
    }
    out
}

/// Applies the operators right to left: `ops[0] ∘ ops[1] ∘ ...`.
pub fn compose(ops: &[InvariantOperator], m: &FlatMetric, p: &Poly) -> Poly {
    ops.iter()
        .rev()
        .fold(p.clone(), |acc, op| op.apply_unchecked(m, &acc))
}

/// `[a, b] p = a(b(p)) - b(a(p))`.
pub fn commutator(
    a: impl Fn(&Poly) -> Poly,
    b: impl Fn(&Poly) -> Poly,
    p: &Poly,
) -> Poly {
    &a(&b(p)) - &b(&a(p))
}

fn casimir(m: &FlatMetric, p: &Poly) -> Poly {
    use InvariantOperator::*;
    let e2 = compose(&[E, E], m, p);
    let rt = compose(&[R, T], m, p);
    let tr = compose(&[T, R], m, p);
    &e2 - &(&rt + &tr).scale_rat(&rat(1, 2))
}

/// `Z = (C + 3/2) L + 1/4 (D[G,C] + [G,C]D - G[D,C] - [D,C]G)`.
pub fn ideal_generator_z(m: &FlatMetric, p: &Poly) -> Poly {
    use InvariantOperator::*;
    let op = |o: InvariantOperator| move |q: &Poly| o.apply_unchecked(m, q);
    let gc = |q: &Poly| commutator(op(G), op(Casimir), q);
    let dc = |q: &Poly| commutator(op(D), op(Casimir), q);

    let lp = L.apply_unchecked(m, p);
    let mut out = &Casimir.apply_unchecked(m, &lp) + &lp.scale_rat(&rat(3, 2));
    let bracket = &(&(&D.apply_unchecked(m, &gc(p)) + &gc(&D.apply_unchecked(m, p)))
        - &G.apply_unchecked(m, &dc(p)))
        - &dc(&G.apply_unchecked(m, p));
    out = &out + &bracket.scale_rat(&rat(1, 4));
    out
}

/// `sum_r xi^r (A(L_r P) - L_r(A P))`, where `L_r` is the inversion `X_r`
/// acting on symbols of weight `delta`.
pub fn contracted_commutator(
    m: &FlatMetric,
    delta: &Rational,
    a: impl Fn(&Poly) -> Poly,
    p: &Poly,
) -> Result<Poly> {
    let n = m.n();
    let mut out = Poly::zero(n);
    let ap = a(p);
    for r in 0..n {
        let inv = VectorFieldGenerator::inversion(*m, r);
        let term = &a(&inv.lie_symbol(delta, p)?) - &inv.lie_symbol(delta, &ap)?;
        out = &out + &(&m.xi_upper(r) * &term);
    }
    Ok(out)
}

/// The six commutation relations with the contracted inversion action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CommutationRelation {
    R0,
    Euler,
    G0,
    D,
    L0,
    D2,
}

impl CommutationRelation {
    pub const ALL: [CommutationRelation; 6] =
        [Self::R0, Self::Euler, Self::G0, Self::D, Self::L0, Self::D2];

    pub fn id(self) -> &'static str {
        match self {
            Self::R0 => "R0_inv",
            Self::Euler => "Euler_inv",
            Self::G0 => "G0_inv",
            Self::D => "D_inv",
            Self::L0 => "L0_inv",
            Self::D2 => "D2_inv",
        }
    }

    fn lhs_operator(self) -> &'static [InvariantOperator] {
        use InvariantOperator as I;
        match self {
            Self::R0 => &[I::R0],
            Self::Euler => &[I::Euler],
            Self::G0 => &[I::G0],
            Self::D => &[I::D],
            Self::L0 => &[I::L0],
            Self::D2 => &[I::D, I::D],
        }
    }

    /// Right-hand side applied to `p`. `shift` is added to the last scalar
    /// constant (and multiplies `Euler` for the relations whose right side is zero).
    pub fn rhs(self, delta: &Rational, m: &FlatMetric, p: &Poly, shift: &Rational) -> Poly {
        use InvariantOperator as I;
        let n = int(m.n() as i64);
        let c = |ops: &[I]| compose(ops, m, p);
        match self {
            Self::R0 | Self::Euler => c(&[I::Euler]).scale_rat(shift),
            Self::G0 => {
                let k = -(&n * delta) + shift;
                let inner = &c(&[I::Euler]) + &p.scale_rat(&k);
                compose(&[I::R0], m, &inner).scale_rat(&int(2))
            }
            Self::D => {
                let k = int(-2) * (&n * (delta - int(1)) + int(2)) + shift;
                &(&c(&[I::R0]).scale_rat(&int(-2)) + &c(&[I::Euler, I::Euler]).scale_rat(&int(4)))
                    + &c(&[I::Euler]).scale_rat(&k)
            }
            Self::L0 => {
                let k = int(2) * (&n * (int(1) - int(2) * delta) - int(2)) + shift;
                &(&c(&[I::R0, I::D]).scale_rat(&int(-4)) + &c(&[I::Euler, I::G0]).scale_rat(&int(8)))
                    + &c(&[I::G0]).scale_rat(&k)
            }
            Self::D2 => {
                let k = int(4) * (&n * (int(1) - delta) - int(1)) + shift;
                let a = &c(&[I::R0, I::D]).scale_rat(&int(-4)) - &c(&[I::G0]).scale_rat(&int(2));
                let b = &c(&[I::Euler, I::Euler, I::D]).scale_rat(&int(8))
                    + &c(&[I::Euler, I::D]).scale_rat(&k);
                &a + &b
            }
        }
    }
}

impl fmt::Display for CommutationRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for CommutationRelation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown relation `{s}`")))
    }
}

/// Left side minus right side of a commutation relation, evaluated on `p`.
pub fn commutation_residual(
    rel: CommutationRelation,
    delta: &Rational,
    m: &FlatMetric,
    p: &Poly,
) -> Result<Poly> {
    commutation_residual_shifted(rel, delta, m, p, &Rational::zero())
}

/// As [`commutation_residual`] with a perturbed right-hand side constant.
pub fn commutation_residual_shifted(
    rel: CommutationRelation,
    delta: &Rational,
    m: &FlatMetric,
    p: &Poly,
    shift: &Rational,
) -> Result<Poly> {
    if p.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: p.n(),
        });
    }
    let ops = rel.lhs_operator();
    let lhs = contracted_commutator(m, delta, |q| compose(ops, m, q), p)?;
    Ok(&lhs - &rel.rhs(delta, m, p, shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::PolyGen;
    use InvariantOperator as I;

    fn p(n: usize, s: &str) -> Poly {
        Poly::parse(n, s).unwrap()
    }

    #[test]
    fn examples() {
        let m2 = FlatMetric::euclidean(2);
        assert_eq!(I::Euler.apply(&m2, &p(2, "xi1*xi2")).unwrap(), p(2, "2*xi1*xi2"));
        let m11 = FlatMetric::new(1, 1).unwrap();
        assert_eq!(I::R.apply(&m11, &Poly::one(2)).unwrap(), p(2, "xi1^2 - xi2^2"));
        assert_eq!(I::D.apply(&m2, &p(2, "x1*xi1")).unwrap(), Poly::one(2));
        assert_eq!(I::E.apply(&m2, &p(2, "xi1")).unwrap(), p(2, "2*xi1"));
        assert!(I::R.apply(&m2, &Poly::one(3)).is_err());
        assert_eq!("G0".parse::<I>().unwrap(), I::G0);
    }

    fn brute_force_constant(lhs: &Poly, rhs: &Poly) -> Option<Rational> {
        let (m, c) = rhs.terms().next()?;
        let ratio = lhs.coeff(m).checked_div(c).ok()?;
        let r = ratio.as_real()?.clone();
        (rhs.scale_rat(&r) == *lhs).then_some(r)
    }

    #[test]
    fn sl2_and_heisenberg_brackets() {
        for m in [FlatMetric::euclidean(2), FlatMetric::new(2, 1).unwrap()] {
            let mut gen = PolyGen::new(7, m.n());
            for _ in 0..30 {
                let q = gen.poly(4, 4, 4);
                let ap = |o: I| move |x: &Poly| o.apply(&m, x).unwrap();
                let tr = commutator(ap(I::T), ap(I::R), &q);
                let e = I::E.apply(&m, &q).unwrap();
                if !e.is_zero() {
                    assert_eq!(brute_force_constant(&tr, &e), Some(int(4)));
                }
                assert_eq!(commutator(ap(I::E), ap(I::R), &q), I::R.apply(&m, &q).unwrap().scale_rat(&int(2)));
                assert_eq!(commutator(ap(I::E), ap(I::T), &q), I::T.apply(&m, &q).unwrap().scale_rat(&int(-2)));
                assert_eq!(commutator(ap(I::D), ap(I::G), &q), I::L.apply(&m, &q).unwrap());
                assert!(commutator(ap(I::L), ap(I::G), &q).is_zero());
                assert!(commutator(ap(I::L), ap(I::D), &q).is_zero());
            }
        }
    }

    #[test]
    fn relations_hold() {
        for (p_, q_) in [(1, 0), (2, 0), (1, 1), (3, 0), (2, 1)] {
            let m = FlatMetric::new(p_, q_).unwrap();
            let mut gen = PolyGen::new(11, m.n());
            for delta in [rat(0, 1), rat(1, 2), rat(-2, 3), rat(5, 4)] {
                for _ in 0..4 {
                    let q = gen.poly(3, 3, 4);
                    for rel in CommutationRelation::ALL {
                        let res = commutation_residual(rel, &delta, &m, &q).unwrap();
                        assert!(res.is_zero(), "{rel} n={} delta={delta}: {res}", m.n());
                    }
                }
            }
        }
    }

    #[test]
    fn relation_examples() {
        let m = FlatMetric::euclidean(3);
        let delta = rat(1, 3);
        let xi1 = p(3, "xi1");
        assert!(commutation_residual(CommutationRelation::D, &delta, &m, &xi1).unwrap().is_zero());
        assert!(!commutation_residual_shifted(CommutationRelation::D, &delta, &m, &xi1, &int(1))
            .unwrap()
            .is_zero());
        assert_eq!("D2_inv".parse::<CommutationRelation>().unwrap(), CommutationRelation::D2);
    }

    #[test]
    fn z_vanishes_in_dimension_two() {
        let m = FlatMetric::euclidean(2);
        assert!(ideal_generator_z(&m, &Poly::one(2)).is_zero());
        let mut gen = PolyGen::new(3, 2);
        for _ in 0..10 {
            assert!(ideal_generator_z(&m, &gen.poly(4, 4, 4)).is_zero());
        }
    }

    #[test]
    fn z_has_a_witness_in_dimension_three() {
        let m = FlatMetric::euclidean(3);
        let w = p(3, "x1^2*xi2^2");
        assert!(!ideal_generator_z(&m, &w).is_zero());
    }
}
