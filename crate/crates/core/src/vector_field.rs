//! Polynomial vector fields, the conformal generators, and their Lie
//! derivatives on densities and on symbols.

use std::fmt;

use crate::error::{Error, Result};
use crate::metric::FlatMetric;
use crate::poly::{Poly, Var};
use crate::scalar::{ExactScalar, Rational};

/// A vector field `X = X^i d_i` with polynomial components in `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    components: Vec<Poly>,
}

impl VectorField {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let n = components.len();
        for c in &components {
            if c.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.n(),
                });
            }
            if !c.is_x_only() {
                return Err(Error::UnexpectedMomentum(c.to_string()));
            }
        }
        Ok(VectorField { components })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn divergence(&self) -> Poly {
        let mut out = Poly::zero(self.n());
        for (i, c) in self.components.iter().enumerate() {
            out = &out + &c.partial(Var::X(i));
        }
        out
    }

    /// `X^i d_{x^i} p`.
    pub fn derivative(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(self.n());
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = &out + &(c * &p.partial(Var::X(i)));
        }
        out
    }

    /// `L^lambda_X f = X(f) + lambda Div(X) f` on densities.
    pub fn lie_density(&self, lambda: &Rational, f: &Poly) -> Result<Poly> {
        if f.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: f.n(),
            });
        }
        if !f.is_x_only() {
            return Err(Error::UnexpectedMomentum(f.to_string()));
        }
        Ok(&self.derivative(f) + &(&self.divergence() * f).scale_rat(lambda))
    }

    /// Cotangent lift plus weight: `X^i d_{x^i} P - xi_j d_i X^j d_{xi_i} P + delta Div(X) P`.
    pub fn lie_symbol(&self, delta: &Rational, p: &Poly) -> Result<Poly> {
        let n = self.n();
        if p.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.n(),
            });
        }
        let mut out = self.derivative(p);
        for i in 0..n {
            let dp = p.partial(Var::Xi(i));
            if dp.is_zero() {
                continue;
            }
            for (j, c) in self.components.iter().enumerate() {
                let dx = c.partial(Var::X(i));
                if dx.is_zero() {
                    continue;
                }
                out = &out - &(&dx * &dp).mul_var(Var::Xi(j));
            }
        }
        Ok(&out + &(&self.divergence() * p).scale_rat(delta))
    }
}

/// The generators of the conformal algebra, indices zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Translation(usize),
    Rotation(usize, usize),
    Dilation,
    Inversion(usize),
}

/// A conformal generator together with the signature it lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VectorFieldGenerator {
    pub kind: GeneratorKind,
    pub metric: FlatMetric,
}

impl VectorFieldGenerator {
    pub fn new(kind: GeneratorKind, metric: FlatMetric) -> Result<Self> {
        let n = metric.n();
        let ok = match kind {
            GeneratorKind::Translation(i) | GeneratorKind::Inversion(i) => i < n,
            GeneratorKind::Rotation(i, j) => i < n && j < n && i != j,
            GeneratorKind::Dilation => true,
        };
        if !ok {
            return Err(Error::InvalidInput(format!("bad generator indices {kind:?} for n = {n}")));
        }
        Ok(VectorFieldGenerator { kind, metric })
    }

    pub fn translation(metric: FlatMetric, i: usize) -> Self {
        Self::new(GeneratorKind::Translation(i), metric).expect("valid index")
    }

    pub fn rotation(metric: FlatMetric, i: usize, j: usize) -> Self {
        Self::new(GeneratorKind::Rotation(i, j), metric).expect("valid indices")
    }

    pub fn dilation(metric: FlatMetric) -> Self {
        VectorFieldGenerator {
            kind: GeneratorKind::Dilation,
            metric,
        }
    }

    pub fn inversion(metric: FlatMetric, i: usize) -> Self {
        Self::new(GeneratorKind::Inversion(i), metric).expect("valid index")
    }

    /// Parses `translation:1`, `rotation:1:2`, `dilation` or `inversion:1`.
    pub fn parse(id: &str, metric: FlatMetric) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown generator `{id}`"));
        let parts: Vec<&str> = id.split(':').collect();
        let idx = |s: &str| -> Result<usize> {
            let k: usize = s.parse().map_err(|_| bad())?;
            k.checked_sub(1).ok_or_else(bad)
        };
        let kind = match parts.as_slice() {
            ["translation", i] => GeneratorKind::Translation(idx(i)?),
            ["rotation", i, j] => GeneratorKind::Rotation(idx(i)?, idx(j)?),
            ["dilation"] => GeneratorKind::Dilation,
            ["inversion", i] => GeneratorKind::Inversion(idx(i)?),
            _ => return Err(bad()),
        };
        Self::new(kind, metric)
    }

    /// Every generator of the conformal algebra for the given signature.
    pub fn all(metric: FlatMetric) -> Vec<Self> {
        let n = metric.n();
        let mut out: Vec<Self> = (0..n).map(|i| Self::translation(metric, i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                out.push(Self::rotation(metric, i, j));
            }
        }
        out.push(Self::dilation(metric));
        out.extend((0..n).map(|i| Self::inversion(metric, i)));
        out
    }

    /// Translations and rotations.
    pub fn euclidean(metric: FlatMetric) -> Vec<Self> {
        Self::all(metric)
            .into_iter()
            .filter(|g| {
                matches!(
                    g.kind,
                    GeneratorKind::Translation(_) | GeneratorKind::Rotation(..)
                )
            })
            .collect()
    }

    pub fn field(&self) -> VectorField {
        let m = &self.metric;
        let n = m.n();
        let mut comps = vec![Poly::zero(n); n];
        match self.kind {
            GeneratorKind::Translation(i) => comps[i] = Poly::one(n),
            GeneratorKind::Rotation(i, j) => {
                comps[j] = m.lower_x(i);
                comps[i] = -m.lower_x(j);
            }
            GeneratorKind::Dilation => {
                for (i, c) in comps.iter_mut().enumerate() {
                    *c = Poly::x(n, i);
                }
            }
            GeneratorKind::Inversion(r) => {
                let two_xr = m.lower_x(r).scale(&ExactScalar::from_int(2));
                for (j, c) in comps.iter_mut().enumerate() {
                    *c = -(&two_xr * &Poly::x(n, j));
                }
                comps[r] = &comps[r] + &m.x_square();
            }
        }
        VectorField::new(comps).expect("generator components are x-only")
    }

    pub fn lie_density(&self, lambda: &Rational, f: &Poly) -> Result<Poly> {
        self.field().lie_density(lambda, f)
    }

    pub fn lie_symbol(&self, delta: &Rational, p: &Poly) -> Result<Poly> {
        self.field().lie_symbol(delta, p)
    }
}

impl fmt::Display for VectorFieldGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::Translation(i) => write!(f, "translation:{}", i + 1),
            GeneratorKind::Rotation(i, j) => write!(f, "rotation:{}:{}", i + 1, j + 1),
            GeneratorKind::Dilation => f.write_str("dilation"),
            GeneratorKind::Inversion(i) => write!(f, "inversion:{}", i + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p(n: usize, s: &str) -> Poly {
        Poly::parse(n, s).unwrap()
    }

    #[test]
    fn density_examples() {
        let m = FlatMetric::euclidean(2);
        let lam = rat(1, 3);
        let t1 = VectorFieldGenerator::translation(m, 0);
        assert_eq!(t1.lie_density(&lam, &p(2, "x1^2")).unwrap(), p(2, "2*x1"));
        let dil = VectorFieldGenerator::dilation(m);
        assert_eq!(dil.lie_density(&lam, &Poly::one(2)).unwrap(), p(2, "2/3"));
        let m3 = FlatMetric::new(2, 1).unwrap();
        let inv = VectorFieldGenerator::inversion(m3, 0);
        assert_eq!(inv.field().divergence(), p(3, "-6*x1"));
        assert_eq!(inv.lie_density(&lam, &Poly::one(3)).unwrap(), p(3, "-2*x1"));
        assert!(t1.lie_density(&lam, &p(2, "xi1")).is_err());
    }

    #[test]
    fn inversion_divergence_uses_lowered_index() {
        let m = FlatMetric::new(1, 2).unwrap();
        let inv = VectorFieldGenerator::inversion(m, 2);
        assert_eq!(inv.field().divergence(), p(3, "6*x3"));
    }

    #[test]
    fn symbol_examples() {
        let m = FlatMetric::euclidean(2);
        let delta = rat(2, 5);
        let t1 = VectorFieldGenerator::translation(m, 0);
        assert_eq!(t1.lie_symbol(&delta, &p(2, "x1*xi1")).unwrap(), p(2, "xi1"));
        let dil = VectorFieldGenerator::dilation(m);
        assert_eq!(
            dil.lie_symbol(&delta, &p(2, "x1^2*xi1")).unwrap(),
            p(2, "9/5*x1^2*xi1")
        );
        let inv = VectorFieldGenerator::inversion(m, 0);
        assert_eq!(inv.lie_symbol(&delta, &Poly::one(2)).unwrap(), p(2, "-8/5*x1"));
    }

    #[test]
    fn generator_ids_round_trip() {
        let m = FlatMetric::new(2, 1).unwrap();
        for g in VectorFieldGenerator::all(m) {
            assert_eq!(VectorFieldGenerator::parse(&g.to_string(), m).unwrap(), g);
        }
        assert_eq!(VectorFieldGenerator::all(m).len(), 10);
        assert!(VectorFieldGenerator::parse("rotation:1:1", m).is_err());
        assert!(VectorFieldGenerator::parse("inversion:4", m).is_err());
        assert!(VectorFieldGenerator::parse("boost:1", m).is_err());
    }

    #[test]
    fn generators_are_conformal_killing() {
        // d_i X_j + d_j X_i is proportional to g_ij
        for m in [FlatMetric::euclidean(3), FlatMetric::new(1, 2).unwrap()] {
            let n = m.n();
            for g in VectorFieldGenerator::all(m) {
                let x = g.field();
                let div = x.divergence();
                for i in 0..n {
                    for j in 0..n {
                        let lower = |k: usize| x.component(k).scale(&m.sign_scalar(k));
                        let sym = &lower(j).partial(Var::X(i)) + &lower(i).partial(Var::X(j));
                        let expected = if i == j {
                            div.scale_rat(&(int(2) * int(m.sign(i)) / int(n as i64)))
                        } else {
                            Poly::zero(n)
                        };
                        assert_eq!(sym, expected, "{g} ({i},{j})");
                    }
                }
            }
        }
    }
}
