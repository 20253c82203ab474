//! Exact linear algebra over the rationals and over `Q[lambda]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Solution set of a linear system `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionSet {
    Unique(Vec<Rational>),
    None,
    /// `particular + sum_k t_k basis[k]`, where `t_k` is the value of the
    /// unknown `free_columns[k]`.
    Affine {
        particular: Vec<Rational>,
        basis: Vec<Vec<Rational>>,
        free_columns: Vec<usize>,
    },
}

impl SolutionSet {
    pub fn is_unique(&self) -> bool {
        matches!(self, SolutionSet::Unique(_))
    }

    pub fn is_consistent(&self) -> bool {
        !matches!(self, SolutionSet::None)
    }

    pub fn free_columns(&self) -> &[usize] {
        match self {
            SolutionSet::Affine { free_columns, .. } => free_columns,
            _ => &[],
        }
    }

    /// Evaluates the family at the given values of the free unknowns.
    pub fn point(&self, free_values: &[Rational]) -> Option<Vec<Rational>> {
        match self {
            SolutionSet::Unique(x) => Some(x.clone()),
            SolutionSet::None => None,
            SolutionSet::Affine {
                particular, basis, ..
            } => {
                if free_values.len() != basis.len() {
                    return None;
                }
                let mut x = particular.clone();
                for (t, v) in free_values.iter().zip(basis) {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi += t * vi;
                    }
                }
                Some(x)
            }
        }
    }
}

/// Reduced row echelon form of `[A | b]` with pivots chosen left to right.
/// Returns the solution set of `A x = b`.
pub fn solve(a: &Matrix, b: &[Rational]) -> Result<SolutionSet> {
    let rows = a.len();
    if b.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            found: b.len(),
        });
    }
    let cols = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput("ragged matrix".into()));
    }
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return Ok(SolutionSet::None);
    }
    let mut particular = vec![Rational::zero(); cols];
    for (k, &c) in pivots.iter().enumerate() {
        particular[c] = m[k][cols].clone();
    }
    let free_columns: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    if free_columns.is_empty() {
        return Ok(SolutionSet::Unique(particular));
    }
    let basis = free_columns
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (k, &c) in pivots.iter().enumerate() {
                v[c] = -&m[k][f];
            }
            v
        })
        .collect();
    Ok(SolutionSet::Affine {
        particular,
        basis,
        free_columns,
    })
}

pub fn mat_vec(a: &Matrix, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Inverse of a square matrix by Gauss-Jordan elimination.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let mut m: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, e)| row.iter().cloned().chain(e).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).ok_or(Error::Singular)?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for v in m[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let d = &f * &m[c][j];
                    m[i][j] -= d;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn determinant(a: &Matrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let d = &f * &m[c][j];
                m[i][j] -= d;
            }
        }
    }
    det
}

/// A univariate polynomial over `Q`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `a + b t`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![a, b])
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let len = self.0.len().max(other.0.len());
        let get = |v: &[Rational], k: usize| v.get(k).cloned().unwrap_or_else(Rational::zero);
        UniPoly::new((0..len).map(|k| get(&self.0, k) + get(&other.0, k)).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Quotient and remainder of polynomial long division.
    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead = divisor.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = &rem[rem.len() - 1] / &lead;
            for (j, dc) in divisor.0.iter().enumerate() {
                let d = &c * dc;
                rem[k + j] -= d;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Ok((UniPoly::new(quot), UniPoly::new(rem)))
    }

    /// All distinct rational roots, in ascending order.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.is_zero() {
            return Vec::new();
        }
        let denom_lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * Rational::from_integer(denom_lcm.clone())).to_integer())
            .collect();
        let mut roots = Vec::new();
        let mut low = 0;
        while ints[low].is_zero() {
            low += 1;
        }
        if low > 0 {
            roots.push(Rational::zero());
        }
        let ints = &ints[low..];
        if ints.len() > 1 {
            let ps = divisors(&ints[0]);
            let qs = divisors(ints.last().expect("nonempty"));
            for p in &ps {
                for q in &qs {
                    for sign in [1, -1] {
                        let cand = Rational::new(p * sign, q.clone());
                        if !roots.contains(&cand) && self.eval(&cand).is_zero() {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{k}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

pub type PolyMatrix = Vec<Vec<UniPoly>>;

/// Fraction-free (Bareiss) elimination of the augmented matrix `[A | b]`
/// over `Q[t]`.
///
/// Returns the pivot polynomials and the right-hand sides of the rows that
/// became identically zero on the left; the system is consistent for a value
/// of `t` away from the pivot roots exactly when those all vanish there.
pub fn bareiss(a: &PolyMatrix, b: &[UniPoly]) -> Result<(Vec<UniPoly>, Vec<UniPoly>)> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: PolyMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut prev = UniPoly::constant(Rational::one());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in 0..=cols {
                if j == c {
                    continue;
                }
                let num = m[r][c].mul(&m[i][j]).sub(&m[i][c].mul(&m[r][j]));
                let (q, rem) = num.div_rem(&prev)?;
                if !rem.is_zero() {
                    return Err(Error::Invariant("inexact Bareiss division".into()));
                }
                m[i][j] = q;
            }
            m[i][c] = UniPoly::zero();
        }
        prev = m[r][c].clone();
        pivots.push(prev.clone());
        r += 1;
    }
    let conditions = m[r..].iter().map(|row| row[cols].clone()).collect();
    Ok((pivots, conditions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn unique_none_affine() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        assert_eq!(
            solve(&a, &[int(3), int(5)]).unwrap(),
            SolutionSet::Unique(vec![rat(4, 5), rat(7, 5)])
        );
        let s = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(solve(&s, &[int(1), int(3)]).unwrap(), SolutionSet::None);
        let fam = solve(&s, &[int(1), int(2)]).unwrap();
        assert_eq!(fam.free_columns(), &[1]);
        let x = fam.point(&[int(5)]).unwrap();
        assert_eq!(mat_vec(&s, &x), vec![int(1), int(2)]);
    }

    #[test]
    fn inverse_and_determinant() {
        let a = mat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert_eq!(determinant(&a), int(18));
        assert_eq!(inverse(&mat(&[&[1, 2], &[2, 4]])), Err(Error::Singular));
    }

    #[test]
    fn unipoly_roots() {
        // (2t - 1)(t + 3) t
        let p = UniPoly::linear(int(-1), int(2))
            .mul(&UniPoly::linear(int(3), int(1)))
            .mul(&UniPoly::linear(int(0), int(1)));
        assert_eq!(p.rational_roots(), vec![int(-3), int(0), rat(1, 2)]);
        let (q, r) = p.div_rem(&UniPoly::linear(int(3), int(1))).unwrap();
        assert!(r.is_zero());
        assert_eq!(q.degree(), Some(2));
        assert!(UniPoly::constant(int(4)).rational_roots().is_empty());
    }

    #[test]
    fn bareiss_finds_condition() {
        // [t, 1; 0, 0] x = [1, t - 2]
        let t = UniPoly::linear(int(0), int(1));
        let one = UniPoly::constant(int(1));
        let a = vec![vec![t.clone(), one.clone()], vec![UniPoly::zero(), UniPoly::zero()]];
        let b = vec![one, UniPoly::linear(int(-2), int(1))];
        let (pivots, conds) = bareiss(&a, &b).unwrap();
        assert_eq!(pivots, vec![t]);
        assert_eq!(conds[0].rational_roots(), vec![int(0), int(2)]);
    }
}
