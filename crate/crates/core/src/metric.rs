use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::scalar::{ExactScalar, Rational};

/// Which variable family a contraction acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    X,
    Xi,
}

/// The constant metric `diag(+1 (p times), -1 (q times))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlatMetric {
    pub p: usize,
    pub q: usize,
}

impl FlatMetric {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidInput("dimension p + q must be at least 1".into()));
        }
        Ok(FlatMetric { p, q })
    }

    pub fn euclidean(n: usize) -> Self {
        FlatMetric { p: n, q: 0 }
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Diagonal entry `g_ii`, equal to its own inverse.
    pub fn sign(&self, i: usize) -> i64 {
        if i < self.p {
            1
        } else {
            -1
        }
    }

    pub fn sign_scalar(&self, i: usize) -> ExactScalar {
        ExactScalar::from_int(self.sign(i))
    }

    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Rational::from_integer(if i == j { self.sign(i) } else { 0 }.into()))
                    .collect()
            })
            .collect()
    }

    fn check(&self, p: &Poly) -> Result<()> {
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: p.n(),
            });
        }
        Ok(())
    }

    /// `sum_i g^{ii} a_i b_i`.
    pub fn contract(&self, a: &[Poly], b: &[Poly]) -> Result<Poly> {
        let n = self.n();
        if a.len() != n || b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.len().min(b.len()),
            });
        }
        let mut out = Poly::zero(n);
        for i in 0..n {
            self.check(&a[i])?;
            self.check(&b[i])?;
            out = &out + &(&a[i] * &b[i]).scale(&self.sign_scalar(i));
        }
        Ok(out)
    }

    /// Trace of the second derivatives in one slot family: `g^{ij} d_i d_j p`.
    pub fn contract_slots(&self, p: &Poly, slot: Slot) -> Result<Poly> {
        self.check(p)?;
        let mut out = Poly::zero(self.n());
        for i in 0..self.n() {
            let v = match slot {
                Slot::X => Var::X(i),
                Slot::Xi => Var::Xi(i),
            };
            out = &out + &p.partial(v).partial(v).scale(&self.sign_scalar(i));
        }
        Ok(out)
    }

    /// `xi^i xi_i`.
    pub fn xi_square(&self) -> Poly {
        let xi: Vec<Poly> = (0..self.n()).map(|i| Poly::xi(self.n(), i)).collect();
        self.contract(&xi, &xi).expect("consistent dimension")
    }

    /// `x_i x^i`.
    pub fn x_square(&self) -> Poly {
        let x: Vec<Poly> = (0..self.n()).map(|i| Poly::x(self.n(), i)).collect();
        self.contract(&x, &x).expect("consistent dimension")
    }

    /// `x_i = g_ij x^j`.
    pub fn lower_x(&self, i: usize) -> Poly {
        Poly::x(self.n(), i).scale(&self.sign_scalar(i))
    }

    /// `xi^i = g^ij xi_j`.
    pub fn xi_upper(&self, i: usize) -> Poly {
        Poly::xi(self.n(), i).scale(&self.sign_scalar(i))
    }
}
