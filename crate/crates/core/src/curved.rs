//! The intrinsic quantization map evaluated at a point of a curved background.
//!
//! Operators are returned in the coordinates of the jets: a [`PointOperator`]
//! acts on the local representative `f` of a density `phi = f |dx|^lambda` as
//! `A2^{ij} d_i d_j f + A1^i d_i f + A0 f`, and its value is the local
//! representative of a `mu`-density.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::{c_coefficient, default_coefficients, CoefficientSet, Weights};
use crate::error::{Error, Result};
use crate::flat::Symbol2;
use crate::geometry::{
    conformal_rescale, curvature_from_jets, presentation_base, schwarzian_nd, ConformalFactorJet,
    CurvatureData, MetricJet2, Tensor3, Tensor4,
};
use crate::linalg::{self, Matrix, SolutionSet};
use crate::operator::DiffOperator2;
use crate::poly::Var;
use crate::scalar::{int, rat, serde_exact, serde_rational, ExactScalar, Rational};

fn zeros2(n: usize) -> Matrix {
    vec![vec![Rational::zero(); n]; n]
}

fn zeros3(n: usize) -> Tensor3 {
    vec![zeros2(n); n]
}

fn zeros4(n: usize) -> Tensor4 {
    vec![zeros3(n); n]
}

fn kron(a: usize, b: usize) -> Rational {
    if a == b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn symmetric(a: &Matrix, n: usize) -> bool {
    a.len() == n
        && a.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

/// Value, first and second derivatives of the symbol components at the point.
///
/// `dp2[k][i][j] = d_k P^{ij}`, `ddp2[k][l][i][j] = d_k d_l P^{ij}` and
/// `dp1[k][i] = d_k P1^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolJet2 {
    pub p2: Matrix,
    pub dp2: Tensor3,
    pub ddp2: Tensor4,
    pub p1: Vec<Rational>,
    pub dp1: Matrix,
    pub p0: Rational,
    pub weights: Weights,
}

impl SymbolJet2 {
    pub fn new(
        weights: Weights,
        p2: Matrix,
        dp2: Tensor3,
        ddp2: Tensor4,
        p1: Vec<Rational>,
        dp1: Matrix,
        p0: Rational,
    ) -> Result<Self> {
        let n = weights.n;
        let bad = |what: &str| Error::InvalidInput(format!("symbol jet {what} has the wrong shape or symmetry"));
        if !symmetric(&p2, n) {
            return Err(bad("P2"));
        }
        if dp2.len() != n || !dp2.iter().all(|a| symmetric(a, n)) {
            return Err(bad("dP2"));
        }
        if ddp2.len() != n
            || !ddp2
                .iter()
                .all(|r| r.len() == n && r.iter().all(|a| symmetric(a, n)))
            || !(0..n).all(|k| (0..k).all(|l| ddp2[k][l] == ddp2[l][k]))
        {
            return Err(bad("ddP2"));
        }
        if p1.len() != n || dp1.len() != n || dp1.iter().any(|r| r.len() != n) {
            return Err(bad("P1"));
        }
        Ok(SymbolJet2 {
            p2,
            dp2,
            ddp2,
            p1,
            dp1,
            p0,
            weights,
        })
    }

    pub fn zero(weights: Weights) -> Self {
        let n = weights.n;
        SymbolJet2 {
            p2: zeros2(n),
            dp2: zeros3(n),
            ddp2: zeros4(n),
            p1: vec![Rational::zero(); n],
            dp1: zeros2(n),
            p0: Rational::zero(),
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.weights.n
    }

    /// Freezes a polynomial symbol with real coefficients at `point`.
    pub fn from_symbol(s: &Symbol2, point: &[Rational]) -> Result<Self> {
        let n = s.weights().n;
        if point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: point.len(),
            });
        }
        let parts = DiffOperator2::from_symbol(s.poly())?;
        let eval = |p: &crate::poly::Poly| -> Result<Rational> {
            let v = p.eval_scalar(point)?;
            v.as_real()
                .cloned()
                .ok_or_else(|| Error::InvalidInput("symbol jets must be real".into()))
        };
        let dx = |p: &crate::poly::Poly, k: usize| p.partial(Var::X(k));
        let mut out = SymbolJet2::zero(s.weights().clone());
        out.p0 = eval(&parts.a0)?;
        for i in 0..n {
            out.p1[i] = eval(&parts.a1[i])?;
            for k in 0..n {
                out.dp1[k][i] = eval(&dx(&parts.a1[i], k))?;
            }
            for j in 0..n {
                let p = &parts.a2[i][j];
                out.p2[i][j] = eval(p)?;
                for k in 0..n {
                    out.dp2[k][i][j] = eval(&dx(p, k))?;
                    for l in 0..n {
                        out.ddp2[k][l][i][j] = eval(&dx(&dx(p, k), l))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// The geodesic Hamiltonian `g^{ij} xi_i xi_j` as a `delta`-density,
    /// normalized by `(rho / rho(x0))^delta` with `rho = |det g|^{1/2}`.
    pub fn geodesic(weights: Weights, m: &MetricJet2) -> Result<Self> {
        let n = check_dims(&weights, m)?;
        let delta = weights.delta();
        let c = curvature_from_jets(m)?;
        let (gi, dgi, ddgi) = m.inverse_jets();
        let (r1, r2) = density_factor(&c, &delta);
        let mut out = SymbolJet2::zero(weights);
        for i in 0..n {
            for j in 0..n {
                out.p2[i][j] = gi[i][j].clone();
                for k in 0..n {
                    out.dp2[k][i][j] = &dgi[k][i][j] + &gi[i][j] * &r1[k];
                    for l in 0..n {
                        out.ddp2[k][l][i][j] = &ddgi[k][l][i][j]
                            + &dgi[k][i][j] * &r1[l]
                            + &dgi[l][i][j] * &r1[k]
                            + &gi[i][j] * &r2[k][l];
                    }
                }
            }
        }
        Ok(out)
    }

    /// The coupled Hamiltonian `g^{jk}(xi_j - A_j)(xi_k - A_k)` as a
    /// `delta`-density with the normalization of [`SymbolJet2::geodesic`].
    pub fn minimal_coupling(weights: Weights, m: &MetricJet2, a: &ConnectionJet) -> Result<Self> {
        let mut out = Self::geodesic(weights, m)?;
        let n = out.n();
        if a.a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.a.len(),
            });
        }
        let delta = out.weights.delta();
        let c = curvature_from_jets(m)?;
        let (gi, dgi, _) = m.inverse_jets();
        let (r1, _) = density_factor(&c, &delta);
        for j in 0..n {
            let mut v = Rational::zero();
            for k in 0..n {
                v += &gi[j][k] * &a.a[k];
            }
            out.p1[j] = int(-2) * &v;
            for l in 0..n {
                let mut d = Rational::zero();
                for k in 0..n {
                    d += &dgi[l][j][k] * &a.a[k] + &gi[j][k] * &a.da[l][k];
                }
                out.dp1[l][j] = int(-2) * (d + &v * &r1[l]);
            }
        }
        out.p0 = c.pair(&a.a, &a.a);
        Ok(out)
    }
}

/// First and second derivatives of `(rho / rho(x0))^delta` at `x0`.
fn density_factor(c: &CurvatureData, delta: &Rational) -> (Vec<Rational>, Matrix) {
    let gam = c.contracted();
    let dgam = c.d_contracted();
    let n = gam.len();
    let r1 = gam.iter().map(|g| delta * g).collect();
    let r2 = (0..n)
        .map(|k| {
            (0..n)
                .map(|l| delta * (&dgam[k][l] + delta * &gam[k] * &gam[l]))
                .collect()
        })
        .collect();
    (r1, r2)
}

/// A `U(1)` connection `A = A_i dx^i` with `da[k][i] = d_k A_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionJet {
    #[serde(rename = "A", with = "rational_vec")]
    pub a: Vec<Rational>,
    #[serde(rename = "dA", with = "rational_mat")]
    pub da: Matrix,
}

impl ConnectionJet {
    pub fn new(a: Vec<Rational>, da: Matrix) -> Result<Self> {
        let n = a.len();
        if da.len() != n || da.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("dA must be n x n".into()));
        }
        Ok(ConnectionJet { a, da })
    }

    pub fn zero(n: usize) -> Self {
        ConnectionJet {
            a: vec![Rational::zero(); n],
            da: zeros2(n),
        }
    }
}

/// `A2^{ij} d_i d_j + A1^i d_i + A0` at the point, from `lambda`- to `mu`-densities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOperator {
    pub a2: Vec<Vec<ExactScalar>>,
    pub a1: Vec<ExactScalar>,
    pub a0: ExactScalar,
    pub lambda: Rational,
    pub mu: Rational,
}

impl PointOperator {
    pub fn zero(n: usize, lambda: Rational, mu: Rational) -> Self {
        PointOperator {
            a2: vec![vec![ExactScalar::zero(); n]; n],
            a1: vec![ExactScalar::zero(); n],
            a0: ExactScalar::zero(),
            lambda,
            mu,
        }
    }

    fn from_real(a2: Matrix, a1: Vec<Rational>, a0: Rational, w: &Weights) -> Self {
        PointOperator {
            a2: a2
                .into_iter()
                .map(|r| r.into_iter().map(ExactScalar::real).collect())
                .collect(),
            a1: a1.into_iter().map(ExactScalar::real).collect(),
            a0: ExactScalar::real(a0),
            lambda: w.lambda.clone(),
            mu: w.mu.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.a1.len()
    }

    pub fn acts_between(&self) -> (Rational, Rational) {
        (self.lambda.clone(), self.mu.clone())
    }

    fn zip(&self, other: &PointOperator, f: impl Fn(&ExactScalar, &ExactScalar) -> ExactScalar) -> Self {
        PointOperator {
            a2: self
                .a2
                .iter()
                .zip(&other.a2)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect())
                .collect(),
            a1: self.a1.iter().zip(&other.a1).map(|(a, b)| f(a, b)).collect(),
            a0: f(&self.a0, &other.a0),
            lambda: self.lambda.clone(),
            mu: self.mu.clone(),
        }
    }

    pub fn add(&self, other: &PointOperator) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PointOperator) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        self.zip(self, |a, _| a * c)
    }

    fn entries(&self) -> impl Iterator<Item = &ExactScalar> {
        self.a2.iter().flatten().chain(&self.a1).chain(std::iter::once(&self.a0))
    }

    pub fn max_abs(&self) -> Rational {
        self.entries().map(ExactScalar::max_abs).max().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries().all(Zero::is_zero)
    }

    /// Evaluates the coefficients of a polynomial operator at `point`.
    pub fn from_polynomial(op: &DiffOperator2, point: &[Rational], w: &Weights) -> Result<Self> {
        let n = op.n();
        let mut out = PointOperator::zero(n, w.lambda.clone(), w.mu.clone());
        out.a0 = op.a0.eval_scalar(point)?;
        for i in 0..n {
            out.a1[i] = op.a1[i].eval_scalar(point)?;
            for j in 0..n {
                out.a2[i][j] = op.a2[i][j].eval_scalar(point)?;
            }
        }
        Ok(out)
    }
}

/// Levi-Civita data together with the density connection `Gamma_i`.
struct Background {
    n: usize,
    g: Matrix,
    c: CurvatureData,
    gam: Vec<Rational>,
    dgam: Matrix,
}

impl Background {
    fn new(m: &MetricJet2) -> Result<Self> {
        let c = curvature_from_jets(m)?;
        Ok(Background {
            n: m.n(),
            g: m.g().clone(),
            gam: c.contracted(),
            dgam: c.d_contracted(),
            c,
        })
    }

    fn gamma(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.c.gamma[k][i][j]
    }

    /// `nabla_i nabla_j phi = d_i d_j f + c[i][j][k] d_k f + d[i][j] f`.
    fn density_hessian(&self, lambda: &Rational) -> (Tensor3, Matrix) {
        let n = self.n;
        let mut c = zeros3(n);
        let mut d = zeros2(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c[i][j][k] = -(lambda * &self.gam[j] * kron(i, k))
                        - self.gamma(k, i, j)
                        - lambda * &self.gam[i] * kron(j, k);
                }
                let mut v = -(lambda * &self.dgam[i][j]) + lambda * lambda * &self.gam[i] * &self.gam[j];
                for k in 0..n {
                    v += lambda * self.gamma(k, i, j) * &self.gam[k];
                }
                d[i][j] = v;
            }
        }
        (c, d)
    }

    /// `t[k][i][j] = nabla_k P^{ij}` for a `delta`-density-valued bivector.
    fn nabla_p2(&self, s: &SymbolJet2, delta: &Rational) -> Tensor3 {
        let n = self.n;
        let mut t = zeros3(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = &s.dp2[k][i][j] - delta * &self.gam[k] * &s.p2[i][j];
                    for l in 0..n {
                        v += self.gamma(i, k, l) * &s.p2[l][j] + self.gamma(j, k, l) * &s.p2[i][l];
                    }
                    t[k][i][j] = v;
                }
            }
        }
        t
    }

    /// `nabla_m nabla_k P^{ij}` for one index tuple.
    #[allow(clippy::too_many_arguments)]
    fn nabla2_entry(
        &self,
        s: &SymbolJet2,
        delta: &Rational,
        t: &Tensor3,
        m: usize,
        k: usize,
        i: usize,
        j: usize,
    ) -> Rational {
        let n = self.n;
        let dg = &self.c.dgamma;
        let mut dt = &s.ddp2[m][k][i][j]
            - delta * (&self.dgam[m][k] * &s.p2[i][j] + &self.gam[k] * &s.dp2[m][i][j]);
        for l in 0..n {
            dt += &dg[m][i][k][l] * &s.p2[l][j]
                + self.gamma(i, k, l) * &s.dp2[m][l][j]
                + &dg[m][j][k][l] * &s.p2[i][l]
                + self.gamma(j, k, l) * &s.dp2[m][i][l];
        }
        let mut v = dt - delta * &self.gam[m] * &t[k][i][j];
        for l in 0..n {
            v += -(self.gamma(l, m, k) * &t[l][i][j])
                + self.gamma(i, m, l) * &t[k][l][j]
                + self.gamma(j, m, l) * &t[k][i][l];
        }
        v
    }

    /// `nabla_i nabla_j P^{ij}`.
    fn double_divergence(&self, s: &SymbolJet2, delta: &Rational, t: &Tensor3) -> Rational {
        let n = self.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.nabla2_entry(s, delta, t, i, j, i, j))
            .sum()
    }

    /// `g^{ij} nabla_i nabla_j (g_kl P^{kl})`, using that the trace is a
    /// scalar `delta`-density.
    fn laplacian_of_trace(&self, m: &MetricJet2, s: &SymbolJet2, delta: &Rational) -> Rational {
        let n = self.n;
        let g = m.g();
        let mut tau = Rational::zero();
        let mut d_tau = vec![Rational::zero(); n];
        let mut dd_tau = zeros2(n);
        for k in 0..n {
            for l in 0..n {
                tau += &g[k][l] * &s.p2[k][l];
                for a in 0..n {
                    d_tau[a] += &m.dg()[a][k][l] * &s.p2[k][l] + &g[k][l] * &s.dp2[a][k][l];
                    for b in a..n {
                        dd_tau[a][b] += &m.ddg()[a][b][k][l] * &s.p2[k][l]
                            + &m.dg()[a][k][l] * &s.dp2[b][k][l]
                            + &m.dg()[b][k][l] * &s.dp2[a][k][l]
                            + &g[k][l] * &s.ddp2[a][b][k][l];
                    }
                }
            }
        }
        let (hc, hd) = self.density_hessian(delta);
        let gi = &self.c.inverse;
        let mut out = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                let dd = if i <= j { &dd_tau[i][j] } else { &dd_tau[j][i] };
                let mut h = dd + &hd[i][j] * &tau;
                for k in 0..n {
                    h += &hc[i][j][k] * &d_tau[k];
                }
                out += &gi[i][j] * h;
            }
        }
        out
    }

    fn contract_lower(&self, p: &Matrix) -> Rational {
        let n = self.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| &self.g[i][j] * &p[i][j])
            .sum()
    }
}

/// The zero-order curvature block of the second-order formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvatureTerm {
    /// `beta5 Ric_ij P^{ij} + beta6 R g_ij P^{ij}`, for `n >= 3`.
    Ricci { beta5: Rational, beta6: Rational },
    /// `prefactor (S_ij P^{ij} + r_coeff R g_ij P^{ij})`, for `n = 2`.
    Schwarzian { prefactor: Rational, r_coeff: Rational },
    /// `coeff S_11 P^{11}`, for `n = 1`.
    OneDim { coeff: Rational },
}

/// Numerical coefficients of the second-order block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondOrderCoefficients {
    pub beta: [Rational; 4],
    pub curvature: CurvatureTerm,
}

fn ratio_or_zero(num: Rational, den: Rational, w: &Weights) -> Result<Rational> {
    if !den.is_zero() {
        Ok(num / den)
    } else if num.is_zero() {
        Ok(Rational::zero())
    } else {
        Err(Error::Resonant {
            n: w.n,
            delta: w.delta().to_string(),
        })
    }
}

impl SecondOrderCoefficients {
    /// Reads the coefficients for the dimension of `set.weights`.
    pub fn from_set(set: &CoefficientSet) -> Result<Self> {
        let w = &set.weights;
        let delta = w.delta();
        let nr = int(w.n as i64);
        let lm = &w.lambda * (&w.mu - int(1));
        let curvature = match w.n {
            1 => CurvatureTerm::OneDim {
                coeff: ratio_or_zero(int(-2) * &lm, int(3) - int(2) * &delta, w)?,
            },
            2 => CurvatureTerm::Schwarzian {
                prefactor: ratio_or_zero(int(4) * &lm, int(2) * &delta - int(3), w)?,
                r_coeff: if delta == int(1) {
                    Rational::zero()
                } else {
                    int(1) / (int(8) * (&delta - int(1)))
                },
            },
            _ => {
                let _ = nr;
                CurvatureTerm::Ricci {
                    beta5: set.require("beta5")?,
                    beta6: set.require("beta6")?,
                }
            }
        };
        let optional = |name: &str| -> Result<Rational> {
            if w.n == 1 {
                Ok(set.get(name).cloned().unwrap_or_default())
            } else {
                set.require(name)
            }
        };
        Ok(SecondOrderCoefficients {
            beta: [
                set.require("beta1")?,
                optional("beta2")?,
                set.require("beta3")?,
                optional("beta4")?,
            ],
            curvature,
        })
    }
}

fn check_dims(w: &Weights, m: &MetricJet2) -> Result<usize> {
    if w.n != m.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n,
            found: m.n(),
        });
    }
    Ok(w.n)
}

fn check_symbol(w: &Weights, s: &SymbolJet2) -> Result<()> {
    if s.weights.n != w.n || s.weights.lambda != w.lambda || s.weights.mu != w.mu {
        return Err(Error::InvalidInput(format!(
            "symbol weights {} differ from quantization weights {}",
            s.weights, w
        )));
    }
    Ok(())
}

/// The Schwarzian tensor for `n <= 2`, from a presentation of `m`.
fn schwarzian_for(m: &MetricJet2, presentation: Option<&ConformalFactorJet>) -> Result<Option<Matrix>> {
    if m.n() > 2 {
        return Ok(None);
    }
    let f = presentation.ok_or(Error::PresentationRequired(m.n()))?;
    presentation_base(f, m)?;
    Ok(Some(schwarzian_nd(f, m)?.s))
}

/// The second-order block `Q(P2)` alone, with explicit coefficients.
pub fn second_order_block(
    w: &Weights,
    coeffs: &SecondOrderCoefficients,
    m: &MetricJet2,
    s: &SymbolJet2,
    presentation: Option<&ConformalFactorJet>,
) -> Result<PointOperator> {
    check_dims(w, m)?;
    second_order_on(&Background::new(m)?, w, coeffs, m, s, presentation)
}

fn second_order_on(
    bg: &Background,
    w: &Weights,
    coeffs: &SecondOrderCoefficients,
    m: &MetricJet2,
    s: &SymbolJet2,
    presentation: Option<&ConformalFactorJet>,
) -> Result<PointOperator> {
    let n = bg.n;
    check_symbol(w, s)?;
    let schwarzian = match coeffs.curvature {
        CurvatureTerm::Ricci { .. } => None,
        _ => schwarzian_for(m, presentation)?,
    };
    let lambda = &w.lambda;
    let delta = w.delta();
    let gi = &bg.c.inverse;
    let (hc, hd) = bg.density_hessian(lambda);
    let t = bg.nabla_p2(s, &delta);
    let [b1, b2, b3, b4] = &coeffs.beta;

    let trace_t: Vec<Rational> = (0..n).map(|i| bg.contract_lower(&t[i])).collect();
    let v: Vec<Rational> = (0..n)
        .map(|j| {
            let div: Rational = (0..n).map(|i| &t[i][i][j]).sum();
            let grad: Rational = (0..n).map(|i| &gi[i][j] * &trace_t[i]).sum();
            b1 * div + b2 * grad
        })
        .collect();

    let mut a1 = v.clone();
    let mut a0 = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            for (k, a) in a1.iter_mut().enumerate() {
                *a += &s.p2[i][j] * &hc[i][j][k];
            }
            a0 += &s.p2[i][j] * &hd[i][j];
        }
        a0 -= lambda * &v[i] * &bg.gam[i];
    }
    if !b3.is_zero() {
        a0 += b3 * bg.double_divergence(s, &delta, &t);
    }
    if !b4.is_zero() {
        a0 += b4 * bg.laplacian_of_trace(m, s, &delta);
    }
    let trace_p = bg.contract_lower(&s.p2);
    let pair = |a: &Matrix| -> Rational {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| &a[i][j] * &s.p2[i][j])
            .sum()
    };
    a0 += match (&coeffs.curvature, &schwarzian) {
        (CurvatureTerm::Ricci { beta5, beta6 }, _) => {
            beta5 * pair(&bg.c.ricci) + beta6 * &bg.c.scalar * &trace_p
        }
        (CurvatureTerm::Schwarzian { prefactor, r_coeff }, Some(sch)) => {
            prefactor * (pair(sch) + r_coeff * &bg.c.scalar * &trace_p)
        }
        (CurvatureTerm::OneDim { coeff }, Some(sch)) => coeff * pair(sch),
        _ => return Err(Error::PresentationRequired(n)),
    };
    Ok(PointOperator::from_real(s.p2.clone(), a1, a0, w))
}

/// The first-order block `P1^i nabla_i + alpha nabla_i(P1^i)` alone.
pub fn first_order_block(
    w: &Weights,
    alpha: &Rational,
    m: &MetricJet2,
    s: &SymbolJet2,
) -> Result<PointOperator> {
    check_dims(w, m)?;
    first_order_on(&Background::new(m)?, w, alpha, s)
}

fn first_order_on(bg: &Background, w: &Weights, alpha: &Rational, s: &SymbolJet2) -> Result<PointOperator> {
    let n = bg.n;
    check_symbol(w, s)?;
    let delta = w.delta();
    let mut div: Rational = (0..n).map(|i| &s.dp1[i][i]).sum();
    let mut contracted = Rational::zero();
    for l in 0..n {
        contracted += &bg.gam[l] * &s.p1[l];
    }
    div += (int(1) - &delta) * &contracted;
    let a0 = alpha * div - &w.lambda * contracted;
    Ok(PointOperator::from_real(zeros2(n), s.p1.clone(), a0, w))
}

fn zero_order_block(w: &Weights, s: &SymbolJet2) -> PointOperator {
    PointOperator::from_real(zeros2(w.n), vec![Rational::zero(); w.n], s.p0.clone(), w)
}

fn resolved(w: &Weights) -> Result<CoefficientSet> {
    let set = default_coefficients(w)?;
    let open: Vec<_> = set
        .free_parameters
        .iter()
        .filter(|p| p.value.is_none())
        .map(|p| p.name.clone())
        .collect();
    if open.is_empty() {
        Ok(set)
    } else {
        Err(Error::Unresolved(open.join(", ")))
    }
}

/// `P1^i nabla_i + alpha nabla_i(P1^i) + P0`; the degree-two part must vanish.
pub fn quantize_first_order(w: &Weights, m: &MetricJet2, s: &SymbolJet2) -> Result<PointOperator> {
    if s.p2.iter().flatten().any(|v| !v.is_zero()) {
        return Err(Error::InvalidInput(
            "quantize_first_order takes symbols of degree at most one".into(),
        ));
    }
    let set = default_coefficients(w)?;
    let alpha = set.require("alpha")?;
    Ok(first_order_block(w, &alpha, m, s)?.add(&zero_order_block(w, s)))
}

/// `Q(P)` for a symbol of degree at most two, without `hbar`.
pub fn quantize_second_order(
    w: &Weights,
    m: &MetricJet2,
    s: &SymbolJet2,
    presentation: Option<&ConformalFactorJet>,
) -> Result<PointOperator> {
    quantize_curved_with(&resolved(w)?, m, s, presentation, None)
}

/// `Q(I_hbar P) = (i hbar)^2 Q(P2) + (i hbar) Q(P1) + P0` with explicit coefficients.
pub fn quantize_curved_with(
    set: &CoefficientSet,
    m: &MetricJet2,
    s: &SymbolJet2,
    presentation: Option<&ConformalFactorJet>,
    hbar: Option<&Rational>,
) -> Result<PointOperator> {
    let w = &set.weights;
    check_dims(w, m)?;
    let bg = Background::new(m)?;
    let q2 = second_order_on(&bg, w, &SecondOrderCoefficients::from_set(set)?, m, s, presentation)?;
    let q1 = first_order_on(&bg, w, &set.require("alpha")?, s)?;
    let q0 = zero_order_block(w, s);
    Ok(match hbar {
        None => q2.add(&q1).add(&q0),
        Some(h) => {
            let ih = ExactScalar::imag(h.clone());
            q2.scale(&(&ih * &ih)).add(&q1.scale(&ih)).add(&q0)
        }
    })
}

/// `-hbar^2 (g^{ij} nabla_i nabla_j + c R)` on `lambda`-densities.
fn laplacian_operator(w: &Weights, c: &Rational, m: &MetricJet2, hbar: &Rational) -> Result<PointOperator> {
    let n = check_dims(w, m)?;
    let bg = Background::new(m)?;
    let gi = bg.c.inverse.clone();
    let (hc, hd) = bg.density_hessian(&w.lambda);
    let mut a1 = vec![Rational::zero(); n];
    let mut a0 = c * &bg.c.scalar;
    for i in 0..n {
        for j in 0..n {
            for (k, a) in a1.iter_mut().enumerate() {
                *a += &gi[i][j] * &hc[i][j][k];
            }
            a0 += &gi[i][j] * &hd[i][j];
        }
    }
    let h2 = ExactScalar::real(-(hbar * hbar));
    Ok(PointOperator::from_real(gi, a1, a0, w).scale(&h2))
}

fn require_non_resonant_geodesic(w: &Weights) -> Result<Rational> {
    if w.n < 2 {
        return Err(Error::InvalidInput("the geodesic quantization needs n >= 2".into()));
    }
    if crate::coefficients::resonant_deltas(w.n).contains(&w.delta()) {
        return Err(Error::Resonant {
            n: w.n,
            delta: w.delta().to_string(),
        });
    }
    c_coefficient(w).ok_or_else(|| Error::Resonant {
        n: w.n,
        delta: w.delta().to_string(),
    })
}

/// `-hbar^2 (Delta + C R)`, the quantized geodesic Hamiltonian.
pub fn quantize_geodesic(w: &Weights, m: &MetricJet2, hbar: &Rational) -> Result<PointOperator> {
    let c = require_non_resonant_geodesic(w)?;
    laplacian_operator(w, &c, m, hbar)
}

/// The quantized coupled Hamiltonian: `-hbar^2 Q(H2) + i hbar Q(H1) + H0`.
pub fn quantize_minimal_coupling(
    w: &Weights,
    m: &MetricJet2,
    a: &ConnectionJet,
    hbar: &Rational,
) -> Result<PointOperator> {
    let geodesic = quantize_geodesic(w, m, hbar)?;
    let alpha = crate::coefficients::alpha(w).expect("non-resonant delta != 1");
    let s = SymbolJet2::minimal_coupling(w.clone(), m, a)?;
    let q1 = first_order_block(w, &alpha, m, &s)?;
    Ok(geodesic
        .add(&q1.scale(&ExactScalar::imag(hbar.clone())))
        .add(&zero_order_block(w, &s)))
}

/// The resonant Laplacians singled out by formal self-adjointness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianCase {
    Yamabe,
    Laplace,
    New,
    SturmLiouville,
}

impl LaplacianCase {
    pub const ALL: [LaplacianCase; 4] = [
        LaplacianCase::Yamabe,
        LaplacianCase::Laplace,
        LaplacianCase::New,
        LaplacianCase::SturmLiouville,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LaplacianCase::Yamabe => "yamabe",
            LaplacianCase::Laplace => "laplace",
            LaplacianCase::New => "new",
            LaplacianCase::SturmLiouville => "sturm_liouville",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == text || c.name().replace('_', "-") == text)
            .ok_or_else(|| Error::Parse(format!("unknown Laplacian case `{text}`")))
    }

    /// The weights `(lambda, mu)` of the case in dimension `n`.
    pub fn weights(self, n: usize) -> Result<(Rational, Rational)> {
        let nr = int(n as i64);
        match self {
            LaplacianCase::SturmLiouville if n == 1 => Ok((rat(-1, 2), rat(3, 2))),
            LaplacianCase::SturmLiouville => Err(Error::InvalidInput(
                "the Sturm-Liouville case requires n = 1".into(),
            )),
            _ if n < 2 => Err(Error::InvalidInput(format!(
                "the {} case requires n >= 2",
                self.name()
            ))),
            LaplacianCase::Yamabe => Ok((
                (&nr - int(2)) / (int(2) * &nr),
                (&nr + int(2)) / (int(2) * &nr),
            )),
            LaplacianCase::Laplace => Ok((int(0), int(1))),
            LaplacianCase::New => Ok((int(-1) / &nr, (&nr + int(1)) / &nr)),
        }
    }

    /// The coefficient `c` of `-hbar^2 (Delta + c R)`, for `n >= 2`.
    pub fn scalar_coefficient(self, n: usize) -> Result<Rational> {
        let nr = int(n as i64);
        self.weights(n)?;
        match self {
            LaplacianCase::Yamabe => Ok(-(&nr - int(2)) / (int(4) * (&nr - int(1)))),
            LaplacianCase::Laplace => Ok(int(0)),
            LaplacianCase::New => Ok(int(1) / ((&nr - int(1)) * (&nr + int(2)))),
            LaplacianCase::SturmLiouville => Err(Error::InvalidInput(
                "the Sturm-Liouville operator carries a Schwarzian term instead".into(),
            )),
        }
    }
}

/// The resonant Laplacian of `case` on the background `m`.
pub fn resonant_laplacians(
    case: LaplacianCase,
    m: &MetricJet2,
    presentation: Option<&ConformalFactorJet>,
    hbar: &Rational,
) -> Result<PointOperator> {
    let n = m.n();
    let (lambda, mu) = case.weights(n)?;
    let w = Weights::euclidean(n, lambda, mu);
    match case {
        LaplacianCase::SturmLiouville => {
            let set = resolved(&w)?;
            let h = SymbolJet2::geodesic(w.clone(), m)?;
            let q2 = second_order_block(&w, &SecondOrderCoefficients::from_set(&set)?, m, &h, presentation)?;
            Ok(q2.scale(&ExactScalar::real(-(hbar * hbar))))
        }
        _ => laplacian_operator(&w, &case.scalar_coefficient(n)?, m, hbar),
    }
}

/// `Q` computed with `m` and with `F m`, symbol jets held fixed.
pub fn conformal_invariance_difference(
    set: &CoefficientSet,
    m: &MetricJet2,
    f: &ConformalFactorJet,
    s: &SymbolJet2,
    presentation: Option<&ConformalFactorJet>,
) -> Result<PointOperator> {
    let rescaled = conformal_rescale(m, f);
    let rescaled_presentation = presentation.map(|p| p.mul(&f.reciprocal()));
    let a = quantize_curved_with(set, m, s, presentation, None)?;
    let b = quantize_curved_with(set, &rescaled, s, rescaled_presentation.as_ref(), None)?;
    Ok(b.sub(&a))
}

/// The largest absolute coefficient of [`conformal_invariance_difference`].
pub fn conformal_invariance_residual(
    w: &Weights,
    m: &MetricJet2,
    f: &ConformalFactorJet,
    s: &SymbolJet2,
    presentation: Option<&ConformalFactorJet>,
) -> Result<Rational> {
    Ok(conformal_invariance_difference(&resolved(w)?, m, f, s, presentation)?.max_abs())
}

/// Solves for `beta1 .. beta6` from conformal invariance alone on the given
/// samples, for `n >= 3`: the difference is affine in the betas.
pub fn derive_betas_from_invariance(
    w: &Weights,
    samples: &[(MetricJet2, ConformalFactorJet, SymbolJet2)],
) -> Result<SolutionSet> {
    if w.n < 3 {
        return Err(Error::InvalidInput("the Ricci form of the block needs n >= 3".into()));
    }
    let coeffs = |b: &[Rational; 6]| SecondOrderCoefficients {
        beta: [b[0].clone(), b[1].clone(), b[2].clone(), b[3].clone()],
        curvature: CurvatureTerm::Ricci {
            beta5: b[4].clone(),
            beta6: b[5].clone(),
        },
    };
    let diff = |b: &[Rational; 6], m: &MetricJet2, f: &ConformalFactorJet, s: &SymbolJet2| -> Result<Vec<Rational>> {
        let c = coeffs(b);
        let rescaled = conformal_rescale(m, f);
        let a = second_order_on(&Background::new(m)?, w, &c, m, s, None)?;
        let r = second_order_on(&Background::new(&rescaled)?, w, &c, &rescaled, s, None)?;
        Ok(r.sub(&a).entries().map(|e| e.re().clone()).collect())
    };
    let zero: [Rational; 6] = Default::default();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs = Vec::new();
    for (m, f, s) in samples {
        let base = diff(&zero, m, f, s)?;
        let mut cols = Vec::new();
        for k in 0..6 {
            let mut e = zero.clone();
            e[k] = int(1);
            let d = diff(&e, m, f, s)?;
            cols.push(d.iter().zip(&base).map(|(a, b)| a - b).collect::<Vec<_>>());
        }
        for (r, b) in base.iter().enumerate() {
            rows.push((0..6).map(|k| cols[k][r].clone()).collect());
            rhs.push(-b.clone());
        }
    }
    linalg::solve(&rows, &rhs)
}

mod rational_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

mod rational_mat {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|r| r.iter().map(format_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ExactCell(#[serde(with = "serde_exact")] ExactScalar);

#[derive(Serialize, Deserialize)]
struct PointOperatorJson {
    #[serde(rename = "A2")]
    a2: Vec<Vec<ExactCell>>,
    #[serde(rename = "A1")]
    a1: Vec<ExactCell>,
    #[serde(rename = "A0")]
    a0: ExactCell,
    #[serde(with = "serde_rational")]
    lambda: Rational,
    #[serde(with = "serde_rational")]
    mu: Rational,
}

impl Serialize for PointOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointOperatorJson {
            a2: self
                .a2
                .iter()
                .map(|r| r.iter().cloned().map(ExactCell).collect())
                .collect(),
            a1: self.a1.iter().cloned().map(ExactCell).collect(),
            a0: ExactCell(self.a0.clone()),
            lambda: self.lambda.clone(),
            mu: self.mu.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PointOperatorJson::deserialize(d)?;
        let n = j.a1.len();
        if j.a2.len() != n || j.a2.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("A2 must be n x n"));
        }
        let op = PointOperator {
            a2: j
                .a2
                .into_iter()
                .map(|r| r.into_iter().map(|c| c.0).collect())
                .collect(),
            a1: j.a1.into_iter().map(|c| c.0).collect(),
            a0: j.a0.0,
            lambda: j.lambda,
            mu: j.mu,
        };
        if !(0..n).all(|i| (0..i).all(|k| op.a2[i][k] == op.a2[k][i])) {
            return Err(serde::de::Error::custom("A2 must be symmetric"));
        }
        Ok(op)
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolJet2Json {
    weights: Weights,
    #[serde(rename = "P2", with = "rational_mat")]
    p2: Matrix,
    #[serde(rename = "dP2")]
    dp2: Vec<RationalMat>,
    #[serde(rename = "ddP2")]
    ddp2: Vec<Vec<RationalMat>>,
    #[serde(rename = "P1", with = "rational_vec")]
    p1: Vec<Rational>,
    #[serde(rename = "dP1", with = "rational_mat")]
    dp1: Matrix,
    #[serde(rename = "P0", with = "serde_rational")]
    p0: Rational,
}

#[derive(Serialize, Deserialize)]
struct RationalMat(#[serde(with = "rational_mat")] Matrix);

impl Serialize for SymbolJet2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolJet2Json {
            weights: self.weights.clone(),
            p2: self.p2.clone(),
            dp2: self.dp2.iter().cloned().map(RationalMat).collect(),
            ddp2: self
                .ddp2
                .iter()
                .map(|r| r.iter().cloned().map(RationalMat).collect())
                .collect(),
            p1: self.p1.clone(),
            dp1: self.dp1.clone(),
            p0: self.p0.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolJet2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SymbolJet2Json::deserialize(d)?;
        SymbolJet2::new(
            j.weights,
            j.p2,
            j.dp2.into_iter().map(|m| m.0).collect(),
            j.ddp2
                .into_iter()
                .map(|r| r.into_iter().map(|m| m.0).collect())
                .collect(),
            j.p1,
            j.dp1,
            j.p0,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Seeded random symbol jets.
pub mod random {
    use super::*;
    use crate::random::PolyGen;

    fn sym(g: &mut PolyGen, n: usize) -> Matrix {
        let mut a = zeros2(n);
        for i in 0..n {
            for j in i..n {
                let v = g.rational();
                a[i][j] = v.clone();
                a[j][i] = v;
            }
        }
        a
    }

    pub fn symbol_jet(g: &mut PolyGen, w: &Weights) -> SymbolJet2 {
        let n = w.n;
        let mut ddp2 = zeros4(n);
        for k in 0..n {
            for l in k..n {
                let a = sym(g, n);
                ddp2[k][l] = a.clone();
                ddp2[l][k] = a;
            }
        }
        SymbolJet2 {
            p2: sym(g, n),
            dp2: (0..n).map(|_| sym(g, n)).collect(),
            ddp2,
            p1: (0..n).map(|_| g.rational()).collect(),
            dp1: (0..n).map(|_| (0..n).map(|_| g.rational()).collect()).collect(),
            p0: g.rational(),
            weights: w.clone(),
        }
    }

    pub fn connection_jet(g: &mut PolyGen, n: usize) -> ConnectionJet {
        ConnectionJet {
            a: (0..n).map(|_| g.rational()).collect(),
            da: (0..n).map(|_| (0..n).map(|_| g.rational()).collect()).collect(),
        }
    }
}
