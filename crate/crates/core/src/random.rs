//! Seeded generators of random exact test data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::DiffOperator2;
use crate::poly::{Monomial, Poly};
use crate::scalar::{rat, ExactScalar, Rational};

/// Default seed for every randomized suite.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Reads `CONFQUANT_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("CONFQUANT_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub struct PolyGen {
    rng: ChaCha8Rng,
    n: usize,
}

impl PolyGen {
    pub fn new(seed: u64, n: usize) -> Self {
        PolyGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A small nonzero-or-zero rational `a/b` with `|a| <= 5`, `1 <= b <= 4`.
    pub fn rational(&mut self) -> Rational {
        rat(self.rng.gen_range(-5..=5), self.rng.gen_range(1..=4))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != rat(0, 1) {
                return r;
            }
        }
    }

    fn exponents(&mut self, max_deg: u32) -> Vec<u32> {
        let total = self.rng.gen_range(0..=max_deg);
        let mut e = vec![0; self.n];
        for _ in 0..total {
            let k = self.rng.gen_range(0..self.n);
            e[k] += 1;
        }
        e
    }

    /// Random polynomial with `terms` terms, x-degree and xi-degree capped.
    pub fn poly(&mut self, max_x: u32, max_xi: u32, terms: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for _ in 0..terms {
            let x = self.exponents(max_x);
            let xi = self.exponents(max_xi);
            let c = self.rational();
            out.add_term(Monomial::new(&x, &xi).expect("same length"), ExactScalar::real(c));
        }
        out
    }

    pub fn x_poly(&mut self, max_x: u32, terms: usize) -> Poly {
        self.poly(max_x, 0, terms)
    }

    /// Random second-order operator with real polynomial coefficients.
    pub fn operator(&mut self, max_x: u32, terms: usize) -> DiffOperator2 {
        DiffOperator2::from_symbol(&self.poly(max_x, 2, terms)).expect("degree at most 2")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = PolyGen::new(1, 3).poly(3, 2, 5);
        let b = PolyGen::new(1, 3).poly(3, 2, 5);
        assert_eq!(a, b);
        assert!(a.xi_degree().unwrap_or(0) <= 2);
    }
}
