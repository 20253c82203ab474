//! Pseudo-Riemannian geometry at a point from exact 2-jets.
//!
//! Index conventions: `dg[k][i][j] = d_k g_ij`, `ddg[k][l][i][j] = d_k d_l g_ij`,
//! `gamma[k][i][j] = Gamma^k_ij` and `dgamma[m][k][i][j] = d_m Gamma^k_ij`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::metric::FlatMetric;
use crate::scalar::{int, rat, serde_rational, Rational};

pub type Tensor3 = Vec<Vec<Vec<Rational>>>;
pub type Tensor4 = Vec<Vec<Vec<Vec<Rational>>>>;

fn zeros2(n: usize) -> Matrix {
    vec![vec![Rational::zero(); n]; n]
}

fn zeros3(n: usize) -> Tensor3 {
    vec![zeros2(n); n]
}

fn zeros4(n: usize) -> Tensor4 {
    vec![zeros3(n); n]
}

fn is_symmetric(a: &Matrix) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

fn check_shape(name: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} has the wrong shape or symmetry")))
    }
}

/// The 2-jet `(g, dg, ddg)` of a metric at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricJet2 {
    g: Matrix,
    dg: Tensor3,
    ddg: Tensor4,
}

impl MetricJet2 {
    pub fn new(g: Matrix, dg: Tensor3, ddg: Tensor4) -> Result<Self> {
        let n = g.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty metric".into()));
        }
        check_shape("g", is_symmetric(&g))?;
        check_shape("dg", dg.len() == n && dg.iter().all(is_symmetric) && dg.iter().all(|a| a.len() == n))?;
        check_shape(
            "ddg",
            ddg.len() == n
                && ddg.iter().all(|row| {
                    row.len() == n && row.iter().all(|a| a.len() == n && is_symmetric(a))
                }),
        )?;
        for k in 0..n {
            for l in 0..k {
                check_shape("ddg", ddg[k][l] == ddg[l][k])?;
            }
        }
        if linalg::determinant(&g).is_zero() {
            return Err(Error::Singular);
        }
        Ok(MetricJet2 { g, dg, ddg })
    }

    /// A metric with constant coefficients.
    pub fn constant(g: Matrix) -> Result<Self> {
        let n = g.len();
        Self::new(g, zeros3(n), zeros4(n))
    }

    pub fn flat(m: &FlatMetric) -> Self {
        Self::constant(m.matrix()).expect("flat metric is invertible")
    }

    /// Jets of `F * g0` for a constant metric `g0`.
    pub fn conformally_flat(f: &ConformalFactorJet, g0: &Matrix) -> Result<Self> {
        Ok(conformal_rescale(&Self::constant(g0.clone())?, f))
    }

    /// Jets of `F^{-1} * g0`, the presentation used in dimensions one and two.
    pub fn presentation(f: &ConformalFactorJet, g0: &Matrix) -> Result<Self> {
        Self::conformally_flat(&f.reciprocal(), g0)
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn dg(&self) -> &Tensor3 {
        &self.dg
    }

    pub fn ddg(&self) -> &Tensor4 {
        &self.ddg
    }

    pub fn inverse(&self) -> Matrix {
        linalg::inverse(&self.g).expect("validated invertible")
    }

    /// Jets of the inverse metric: `(g^{ij}, d_k g^{ij}, d_k d_l g^{ij})`.
    pub fn inverse_jets(&self) -> (Matrix, Tensor3, Tensor4) {
        let n = self.n();
        let gi = self.inverse();
        let d: Tensor3 = (0..n)
            .map(|k| {
                let t = linalg::mat_mul(&linalg::mat_mul(&gi, &self.dg[k]), &gi);
                t.into_iter()
                    .map(|r| r.into_iter().map(|v| -v).collect())
                    .collect()
            })
            .collect();
        let mut dd = zeros4(n);
        for k in 0..n {
            for l in 0..n {
                let a = linalg::mat_mul(&linalg::mat_mul(&self.dg[l], &gi), &self.dg[k]);
                let b = linalg::mat_mul(&linalg::mat_mul(&self.dg[k], &gi), &self.dg[l]);
                let inner: Matrix = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| &a[i][j] + &b[i][j] - &self.ddg[k][l][i][j])
                            .collect()
                    })
                    .collect();
                dd[k][l] = linalg::mat_mul(&linalg::mat_mul(&gi, &inner), &gi);
            }
        }
        (gi, d, dd)
    }
}

/// The 2-jet `(F, F_i, F_ij)` of a positive conformal factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalFactorJet {
    pub f: Rational,
    pub df: Vec<Rational>,
    pub ddf: Matrix,
}

impl ConformalFactorJet {
    pub fn new(f: Rational, df: Vec<Rational>, ddf: Matrix) -> Result<Self> {
        if !f.is_positive() {
            return Err(Error::InvalidInput(format!("conformal factor must be positive, got {f}")));
        }
        check_shape("ddF", ddf.len() == df.len() && is_symmetric(&ddf))?;
        Ok(ConformalFactorJet { f, df, ddf })
    }

    pub fn constant(n: usize, f: Rational) -> Result<Self> {
        Self::new(f, vec![Rational::zero(); n], zeros2(n))
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(n, Rational::one()).expect("positive")
    }

    pub fn n(&self) -> usize {
        self.df.len()
    }

    /// Jets of the product `F G`.
    pub fn mul(&self, other: &ConformalFactorJet) -> Self {
        let n = self.n();
        let df = (0..n)
            .map(|i| &self.df[i] * &other.f + &self.f * &other.df[i])
            .collect();
        let ddf = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        &self.ddf[i][j] * &other.f
                            + &self.df[i] * &other.df[j]
                            + &self.df[j] * &other.df[i]
                            + &self.f * &other.ddf[i][j]
                    })
                    .collect()
            })
            .collect();
        ConformalFactorJet {
            f: &self.f * &other.f,
            df,
            ddf,
        }
    }

    /// Jets of `1 / F`.
    pub fn reciprocal(&self) -> Self {
        let n = self.n();
        let f2 = &self.f * &self.f;
        let f3 = &f2 * &self.f;
        let df = self.df.iter().map(|d| -d / &f2).collect();
        let ddf = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        -&self.ddf[i][j] / &f2
                            + int(2) * &self.df[i] * &self.df[j] / &f3
                    })
                    .collect()
            })
            .collect();
        ConformalFactorJet {
            f: int(1) / &self.f,
            df,
            ddf,
        }
    }
}

/// Levi-Civita data at the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureData {
    pub gamma: Tensor3,
    pub dgamma: Tensor4,
    pub ricci: Matrix,
    pub scalar: Rational,
    pub inverse: Matrix,
}

impl CurvatureData {
    /// `Gamma_i = Gamma^j_ij`.
    pub fn contracted(&self) -> Vec<Rational> {
        let n = self.gamma.len();
        (0..n)
            .map(|i| (0..n).map(|j| &self.gamma[j][i][j]).sum())
            .collect()
    }

    /// `d_m Gamma_i`, indexed `[m][i]`.
    pub fn d_contracted(&self) -> Matrix {
        let n = self.gamma.len();
        (0..n)
            .map(|m| {
                (0..n)
                    .map(|i| (0..n).map(|j| &self.dgamma[m][j][i][j]).sum())
                    .collect()
            })
            .collect()
    }

    /// `nabla_i d_j F = F_ij - Gamma^k_ij F_k`.
    pub fn hessian(&self, f: &ConformalFactorJet) -> Matrix {
        let n = self.gamma.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c: Rational = (0..n).map(|k| &self.gamma[k][i][j] * &f.df[k]).sum();
                        &f.ddf[i][j] - c
                    })
                    .collect()
            })
            .collect()
    }

    /// `g^{ij} a_i b_j`.
    pub fn pair(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let n = a.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| &self.inverse[i][j] * &a[i] * &b[j])
            .sum()
    }

    /// `g^{ij} a_ij`.
    pub fn trace(&self, a: &Matrix) -> Rational {
        let n = a.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| &self.inverse[i][j] * &a[i][j])
            .sum()
    }
}

pub fn curvature_from_jets(m: &MetricJet2) -> Result<CurvatureData> {
    let n = m.n();
    let gi = m.inverse();
    let half = rat(1, 2);
    // Christoffel symbols of the first kind and their derivatives.
    let mut first = zeros3(n);
    let mut d_first = zeros4(n);
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = &half * (&m.dg[i][l][j] + &m.dg[j][l][i] - &m.dg[l][i][j]);
                first[l][i][j] = v.clone();
                first[l][j][i] = v;
                for mm in 0..n {
                    let d = &m.ddg[mm];
                    let v = &half * (&d[i][l][j] + &d[j][l][i] - &d[l][i][j]);
                    d_first[mm][l][i][j] = v.clone();
                    d_first[mm][l][j][i] = v;
                }
            }
        }
    }
    let mut gamma = zeros3(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = Rational::zero();
                for l in 0..n {
                    s += &gi[k][l] * &first[l][i][j];
                }
                gamma[k][i][j] = s.clone();
                gamma[k][j][i] = s;
            }
        }
    }
    // d_m Gamma^k_ij = g^{kl} (d_m Gamma_lij - d_m g_lb Gamma^b_ij)
    let mut dgamma = zeros4(n);
    for mm in 0..n {
        for i in 0..n {
            for j in i..n {
                let inner: Vec<Rational> = (0..n)
                    .map(|l| {
                        let mut v = d_first[mm][l][i][j].clone();
                        for b in 0..n {
                            v -= &m.dg[mm][l][b] * &gamma[b][i][j];
                        }
                        v
                    })
                    .collect();
                for k in 0..n {
                    let mut t = Rational::zero();
                    for l in 0..n {
                        t += &gi[k][l] * &inner[l];
                    }
                    dgamma[mm][k][i][j] = t.clone();
                    dgamma[mm][k][j][i] = t;
                }
            }
        }
    }
    let mut ricci = zeros2(n);
    for i in 0..n {
        for j in 0..n {
            let mut r = Rational::zero();
            for k in 0..n {
                r += &dgamma[k][k][i][j] - &dgamma[j][k][i][k];
                for l in 0..n {
                    r += &gamma[k][k][l] * &gamma[l][i][j] - &gamma[k][j][l] * &gamma[l][i][k];
                }
            }
            ricci[i][j] = r;
        }
    }
    let scalar = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| &gi[i][j] * &ricci[i][j])
        .sum();
    Ok(CurvatureData {
        gamma,
        dgamma,
        ricci,
        scalar,
        inverse: gi,
    })
}

/// Jets of `F g` by the product rule.
pub fn conformal_rescale(m: &MetricJet2, f: &ConformalFactorJet) -> MetricJet2 {
    let n = m.n();
    let mut g = zeros2(n);
    let mut dg = zeros3(n);
    let mut ddg = zeros4(n);
    for i in 0..n {
        for j in 0..n {
            g[i][j] = &f.f * &m.g[i][j];
            for k in 0..n {
                dg[k][i][j] = &f.df[k] * &m.g[i][j] + &f.f * &m.dg[k][i][j];
                for l in 0..n {
                    ddg[k][l][i][j] = &f.ddf[k][l] * &m.g[i][j]
                        + &f.df[k] * &m.dg[l][i][j]
                        + &f.df[l] * &m.dg[k][i][j]
                        + &f.f * &m.ddg[k][l][i][j];
                }
            }
        }
    }
    MetricJet2 { g, dg, ddg }
}

/// Christoffel symbols, Ricci tensor and scalar curvature of `F g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RescaledCurvature {
    pub gamma: Tensor3,
    pub ricci: Matrix,
    pub scalar: Rational,
}

/// The closed-form rescaling laws applied to the curvature of `m`.
pub fn rescaled_curvature_closed_form(
    m: &MetricJet2,
    f: &ConformalFactorJet,
) -> Result<RescaledCurvature> {
    let n = m.n();
    let c = curvature_from_jets(m)?;
    let nr = int(n as i64);
    let ff = &f.f;
    let f_up: Vec<Rational> = (0..n)
        .map(|k| (0..n).map(|j| &c.inverse[j][k] * &f.df[j]).sum())
        .collect();
    let delta = |a: usize, b: usize| if a == b { int(1) } else { int(0) };
    let mut gamma = zeros3(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let extra = &f.df[i] * delta(j, k) + &f.df[j] * delta(i, k) - &f_up[k] * &m.g[i][j];
                gamma[k][i][j] = &c.gamma[k][i][j] + extra / (int(2) * ff);
            }
        }
    }
    let hess = c.hessian(f);
    let lap = c.trace(&hess);
    let norm = c.pair(&f.df, &f.df);
    let f2 = ff * ff;
    let mut ricci = zeros2(n);
    for i in 0..n {
        for j in 0..n {
            let a = &hess[i][j] / ff - rat(3, 2) * &f.df[i] * &f.df[j] / &f2;
            let b = &lap / ff + (&nr - int(4)) / int(2) * &norm / &f2;
            ricci[i][j] = &c.ricci[i][j] - (&nr - int(2)) / int(2) * a - rat(1, 2) * b * &m.g[i][j];
        }
    }
    let scalar = &c.scalar / ff
        - (&nr - int(1)) * (&lap / &f2 + (&nr - int(6)) / int(4) * &norm / (&f2 * ff));
    Ok(RescaledCurvature {
        gamma,
        ricci,
        scalar,
    })
}

/// Christoffel symbols of `F g0` for a constant metric `g0`, in closed form.
pub fn gamma_conf_flat(f: &ConformalFactorJet, g0: &Matrix) -> Result<Tensor3> {
    let n = g0.len();
    let gi = linalg::inverse(g0)?;
    let f_up: Vec<Rational> = (0..n)
        .map(|k| (0..n).map(|j| &gi[j][k] * &f.df[j]).sum())
        .collect();
    let mut gamma = zeros3(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = -&f_up[k] * &g0[i][j];
                if j == k {
                    v += &f.df[i];
                }
                if i == k {
                    v += &f.df[j];
                }
                gamma[k][i][j] = v / (int(2) * &f.f);
            }
        }
    }
    Ok(gamma)
}

/// The 3-jet `(phi', phi'', phi''')` of a diffeomorphism of the line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffeoJet1D {
    #[serde(with = "serde_rational")]
    pub d1: Rational,
    #[serde(with = "serde_rational")]
    pub d2: Rational,
    #[serde(with = "serde_rational")]
    pub d3: Rational,
}

impl DiffeoJet1D {
    pub fn new(d1: Rational, d2: Rational, d3: Rational) -> Result<Self> {
        if d1.is_zero() {
            return Err(Error::InvalidInput("phi' must be nonzero".into()));
        }
        Ok(DiffeoJet1D { d1, d2, d3 })
    }

    /// Jets of `x -> exp(x)` at a point where `exp` takes the value `e`.
    pub fn exponential(e: Rational) -> Result<Self> {
        Self::new(e.clone(), e.clone(), e)
    }

    /// The presentation `g = phi'^2 dx^2 = F^{-1} dx^2`, i.e. `F = phi'^{-2}`.
    pub fn presentation(&self) -> ConformalFactorJet {
        let (a, b, c) = (&self.d1, &self.d2, &self.d3);
        let a2 = a * a;
        let a3 = &a2 * a;
        let a4 = &a3 * a;
        let f = int(1) / &a2;
        let df = int(-2) * b / &a3;
        let ddf = int(-2) * c / &a3 + int(6) * b * b / &a4;
        ConformalFactorJet::new(f, vec![df], vec![vec![ddf]]).expect("positive")
    }
}

/// `phi'''/phi' - 3/2 (phi''/phi')^2`.
pub fn schwarzian_1d(j: &DiffeoJet1D) -> Result<Rational> {
    if j.d1.is_zero() {
        return Err(Error::InvalidInput("phi' must be nonzero".into()));
    }
    let r = &j.d2 / &j.d1;
    Ok(&j.d3 / &j.d1 - rat(3, 2) * &r * &r)
}

/// A symmetric 2-tensor at the point; `1 x 1` in dimension one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchwarzianTensor {
    pub s: Matrix,
}

impl SchwarzianTensor {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// The scalar value in dimension one.
    pub fn scalar(&self) -> Option<&Rational> {
        (self.n() == 1).then(|| &self.s[0][0])
    }
}

/// Recovers the constant metric `g0 = F g` and checks that `m` is exactly the
/// presentation `F^{-1} g0`.
pub fn presentation_base(f: &ConformalFactorJet, m: &MetricJet2) -> Result<Matrix> {
    if f.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: f.n(),
        });
    }
    let g0: Matrix = m
        .g
        .iter()
        .map(|r| r.iter().map(|v| v * &f.f).collect())
        .collect();
    if MetricJet2::presentation(f, &g0)? != *m {
        return Err(Error::InvalidInput(
            "metric jets are not the conformally flat presentation F^{-1} g0 of this factor".into(),
        ));
    }
    Ok(g0)
}

/// The Schwarzian tensor of a conformally flat presentation `g = F^{-1} g0`:
/// `-(1/(2F)) nabla dF + (3/(4F^2)) dF dF - (1/(8F^2)) |dF|^2 g`.
///
/// In dimension one it equals the classical Schwarzian of `phi` when
/// `F = phi'^{-2}`; in dimension two its trace satisfies `R = -2 g^{ij} S_ij`.
pub fn schwarzian_nd(f: &ConformalFactorJet, m: &MetricJet2) -> Result<SchwarzianTensor> {
    presentation_base(f, m)?;
    let n = m.n();
    let c = curvature_from_jets(m)?;
    let hess = c.hessian(f);
    let norm = c.pair(&f.df, &f.df);
    let ff = &f.f;
    let f2 = ff * ff;
    let s = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    -(&hess[i][j] / (int(2) * ff))
                        + rat(3, 4) * &f.df[i] * &f.df[j] / &f2
                        - &norm * &m.g[i][j] / (int(8) * &f2)
                })
                .collect()
        })
        .collect();
    Ok(SchwarzianTensor { s })
}

#[derive(Serialize, Deserialize)]
struct Q(#[serde(with = "serde_rational")] Rational);

fn wrap2(a: &Matrix) -> Vec<Vec<Q>> {
    a.iter().map(|r| r.iter().cloned().map(Q).collect()).collect()
}

fn unwrap2(a: Vec<Vec<Q>>) -> Matrix {
    a.into_iter().map(|r| r.into_iter().map(|q| q.0).collect()).collect()
}

#[derive(Serialize, Deserialize)]
struct MetricJet2Json {
    n: usize,
    g: Vec<Vec<Q>>,
    dg: Vec<Vec<Vec<Q>>>,
    ddg: Vec<Vec<Vec<Vec<Q>>>>,
}

impl Serialize for MetricJet2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MetricJet2Json {
            n: self.n(),
            g: wrap2(&self.g),
            dg: self.dg.iter().map(wrap2).collect(),
            ddg: self
                .ddg
                .iter()
                .map(|r| r.iter().map(wrap2).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricJet2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MetricJet2Json::deserialize(d)?;
        let m = MetricJet2::new(
            unwrap2(j.g),
            j.dg.into_iter().map(unwrap2).collect(),
            j.ddg
                .into_iter()
                .map(|r| r.into_iter().map(unwrap2).collect())
                .collect(),
        )
        .map_err(serde::de::Error::custom)?;
        if m.n() != j.n {
            return Err(serde::de::Error::custom("n does not match the jet shape"));
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct ConformalFactorJetJson {
    #[serde(rename = "F", with = "serde_rational")]
    f: Rational,
    #[serde(rename = "dF")]
    df: Vec<Q>,
    #[serde(rename = "ddF")]
    ddf: Vec<Vec<Q>>,
}

impl Serialize for ConformalFactorJet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConformalFactorJetJson {
            f: self.f.clone(),
            df: self.df.iter().cloned().map(Q).collect(),
            ddf: wrap2(&self.ddf),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConformalFactorJet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ConformalFactorJetJson::deserialize(d)?;
        ConformalFactorJet::new(j.f, j.df.into_iter().map(|q| q.0).collect(), unwrap2(j.ddf))
            .map_err(serde::de::Error::custom)
    }
}

/// Closed-form example metrics with exact jets.
pub mod examples {
    use super::*;

    /// The round sphere of radius `r` in stereographic coordinates,
    /// `g = 4 r^2 / (1 + |x|^2)^2 * delta`, as a conformal factor over the
    /// Euclidean metric. Its scalar curvature is `n(n-1)/r^2`.
    pub fn sphere_factor(r: &Rational, point: &[Rational]) -> ConformalFactorJet {
        let n = point.len();
        let u: Rational = int(1) + point.iter().map(|x| x * x).sum::<Rational>();
        let r2 = r * r;
        let u2 = &u * &u;
        let u3 = &u2 * &u;
        let u4 = &u3 * &u;
        let f = int(4) * &r2 / &u2;
        let df = point.iter().map(|x| int(-16) * &r2 * x / &u3).collect();
        let ddf = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let diag = if i == j { int(-16) * &r2 / &u3 } else { int(0) };
                        diag + int(96) * &r2 * &point[i] * &point[j] / &u4
                    })
                    .collect()
            })
            .collect();
        ConformalFactorJet::new(f, df, ddf).expect("positive factor")
    }

    pub fn sphere(r: &Rational, point: &[Rational]) -> MetricJet2 {
        let n = point.len();
        MetricJet2::conformally_flat(&sphere_factor(r, point), &linalg::identity(n))
            .expect("invertible")
    }

    /// The upper half-plane `g = (dx^2 + dy^2) / y^2`, scalar curvature `-2`.
    pub fn hyperbolic_factor(point: &[Rational; 2]) -> ConformalFactorJet {
        let y = &point[1];
        let y2 = y * y;
        let f = int(1) / &y2;
        let fy = int(-2) / (&y2 * y);
        let fyy = int(6) / (&y2 * &y2);
        ConformalFactorJet::new(
            f,
            vec![int(0), fy],
            vec![vec![int(0), int(0)], vec![int(0), fyy]],
        )
        .expect("positive factor")
    }

    pub fn hyperbolic(point: &[Rational; 2]) -> MetricJet2 {
        MetricJet2::conformally_flat(&hyperbolic_factor(point), &linalg::identity(2))
            .expect("invertible")
    }
}

/// Seeded random jets for property tests.
pub mod random {
    use rand::Rng;

    use super::*;
    use crate::random::PolyGen;

    fn half_integer(g: &mut PolyGen) -> Rational {
        rat(g.rng().gen_range(-4..=4), 2)
    }

    /// Symmetric matrix of half-integers in `[-2, 2]`; small entries keep
    /// exact arithmetic on derived curvature cheap.
    fn sym_matrix(g: &mut PolyGen, n: usize) -> Matrix {
        let mut a = zeros2(n);
        for i in 0..n {
            for j in i..n {
                let v = half_integer(g);
                a[i][j] = v.clone();
                a[j][i] = v;
            }
        }
        a
    }

    /// A random metric 2-jet near `diag(signs)`, guaranteed invertible.
    pub fn metric_jet(g: &mut PolyGen, signs: &[i64]) -> MetricJet2 {
        let n = signs.len();
        loop {
            let mut base = sym_matrix(g, n);
            for (i, row) in base.iter_mut().enumerate() {
                for v in row.iter_mut() {
                    *v = &*v / int(4);
                }
                row[i] += int(signs[i]);
            }
            let dg = (0..n).map(|_| sym_matrix(g, n)).collect();
            let mut ddg = zeros4(n);
            for k in 0..n {
                for l in k..n {
                    let a = sym_matrix(g, n);
                    ddg[k][l] = a.clone();
                    ddg[l][k] = a;
                }
            }
            if let Ok(m) = MetricJet2::new(base, dg, ddg) {
                return m;
            }
        }
    }

    pub fn factor_jet(g: &mut PolyGen, n: usize) -> ConformalFactorJet {
        let f = rat(g.rng().gen_range(1..=6), g.rng().gen_range(1..=2));
        let df = (0..n).map(|_| half_integer(g)).collect();
        ConformalFactorJet::new(f, df, sym_matrix(g, n)).expect("positive")
    }
}

#[cfg(test)]
mod tests {
    use super::random::{factor_jet, metric_jet};
    use super::*;
    use crate::random::PolyGen;

    #[test]
    fn flat_has_no_curvature() {
        let c = curvature_from_jets(&MetricJet2::flat(&FlatMetric::new(2, 1).unwrap())).unwrap();
        assert!(c.gamma.iter().flatten().flatten().all(Zero::is_zero));
        assert!(c.ricci.iter().flatten().all(Zero::is_zero));
        assert!(c.scalar.is_zero());
    }

    #[test]
    fn conf_flat_christoffel_example() {
        let a = rat(3, 7);
        let f = ConformalFactorJet::new(int(1), vec![a.clone(), int(0)], zeros2(2)).unwrap();
        let m = MetricJet2::conformally_flat(&f, &linalg::identity(2)).unwrap();
        let c = curvature_from_jets(&m).unwrap();
        assert_eq!(c.gamma[0][0][0], &a / int(2));
        let mut g = PolyGen::new(9, 3);
        for g0 in [linalg::identity(3), FlatMetric::new(2, 1).unwrap().matrix()] {
            for _ in 0..10 {
                let f = factor_jet(&mut g, 3);
                let m = MetricJet2::conformally_flat(&f, &g0).unwrap();
                assert_eq!(curvature_from_jets(&m).unwrap().gamma, gamma_conf_flat(&f, &g0).unwrap());
            }
        }
    }

    #[test]
    fn sphere_and_hyperbolic_curvature() {
        for n in 2..=4usize {
            let point: Vec<Rational> = (0..n).map(|i| rat(1, i as i64 + 2)).collect();
            let r = rat(3, 2);
            let c = curvature_from_jets(&examples::sphere(&r, &point)).unwrap();
            let nn = int(n as i64);
            assert_eq!(c.scalar, &nn * (&nn - int(1)) / (&r * &r));
        }
        let h = curvature_from_jets(&examples::hyperbolic(&[rat(1, 3), rat(5, 4)])).unwrap();
        assert_eq!(h.scalar, int(-2));
    }

    #[test]
    fn flat_rescaling_scalar_curvature() {
        let mut g = PolyGen::new(4, 3);
        for n in 2..=4usize {
            let f = factor_jet(&mut g, n);
            let m = MetricJet2::conformally_flat(&f, &linalg::identity(n)).unwrap();
            let lap: Rational = (0..n).map(|i| &f.ddf[i][i]).sum();
            let norm: Rational = f.df.iter().map(|x| x * x).sum();
            let nn = int(n as i64);
            let ff = &f.f;
            let expected = -(&nn - int(1))
                * (&lap / (ff * ff) + (&nn - int(6)) / int(4) * &norm / (ff * ff * ff));
            assert_eq!(curvature_from_jets(&m).unwrap().scalar, expected);
        }
    }

    #[test]
    fn rescaling_two_routes_agree() {
        let mut g = PolyGen::new(77, 2);
        for n in 2..=4usize {
            let signs: Vec<i64> = (0..n).map(|i| if i + 1 == n && n > 2 { -1 } else { 1 }).collect();
            for _ in 0..10 {
                let m = metric_jet(&mut g, &signs);
                let f = factor_jet(&mut g, n);
                let direct = curvature_from_jets(&conformal_rescale(&m, &f)).unwrap();
                let closed = rescaled_curvature_closed_form(&m, &f).unwrap();
                assert_eq!(direct.gamma, closed.gamma);
                assert_eq!(direct.ricci, closed.ricci);
                assert_eq!(direct.scalar, closed.scalar);
            }
        }
        let m = metric_jet(&mut g, &[1, 1, 1]);
        assert_eq!(conformal_rescale(&m, &ConformalFactorJet::identity(3)), m);
    }

    #[test]
    fn schwarzian_examples() {
        let affine = DiffeoJet1D::new(int(3), int(0), int(0)).unwrap();
        assert_eq!(schwarzian_1d(&affine).unwrap(), int(0));
        let e = DiffeoJet1D::exponential(rat(5, 2)).unwrap();
        assert_eq!(schwarzian_1d(&e).unwrap(), rat(-1, 2));
        let inv = DiffeoJet1D::new(int(-1), int(2), int(-6)).unwrap();
        assert_eq!(schwarzian_1d(&inv).unwrap(), int(0));
        assert!(DiffeoJet1D::new(int(0), int(1), int(1)).is_err());
    }

    #[test]
    fn one_dimensional_reduction() {
        let mut g = PolyGen::new(8, 1);
        for _ in 0..20 {
            let j = DiffeoJet1D::new(g.nonzero_rational(), g.rational(), g.rational()).unwrap();
            let f = j.presentation();
            let m = MetricJet2::presentation(&f, &vec![vec![int(1)]]).unwrap();
            let s = schwarzian_nd(&f, &m).unwrap();
            assert_eq!(s.scalar(), Some(&schwarzian_1d(&j).unwrap()));
        }
    }

    #[test]
    fn trace_of_schwarzian_is_curvature() {
        let mut g = PolyGen::new(12, 2);
        for g0 in [linalg::identity(2), FlatMetric::new(1, 1).unwrap().matrix()] {
            for _ in 0..20 {
                let f = factor_jet(&mut g, 2);
                let m = MetricJet2::presentation(&f, &g0).unwrap();
                let s = schwarzian_nd(&f, &m).unwrap();
                let c = curvature_from_jets(&m).unwrap();
                assert_eq!(int(-2) * c.trace(&s.s), c.scalar);
            }
        }
        let f = ConformalFactorJet::constant(2, rat(3, 2)).unwrap();
        let m = MetricJet2::presentation(&f, &linalg::identity(2)).unwrap();
        assert!(schwarzian_nd(&f, &m).unwrap().s.iter().flatten().all(Zero::is_zero));
        let other = factor_jet(&mut g, 2);
        assert!(schwarzian_nd(&other, &m).is_err());
    }

    #[test]
    fn inverse_jets_match_product_rule() {
        let mut g = PolyGen::new(2, 2);
        let m = metric_jet(&mut g, &[1, -1, 1]);
        let (gi, dgi, ddgi) = m.inverse_jets();
        let n = 3;
        for k in 0..n {
            // d(g g^{-1}) = 0
            let a = linalg::mat_mul(&m.dg()[k], &gi);
            let b = linalg::mat_mul(m.g(), &dgi[k]);
            for i in 0..n {
                for j in 0..n {
                    assert!((&a[i][j] + &b[i][j]).is_zero());
                }
            }
            for l in 0..n {
                let t1 = linalg::mat_mul(&m.ddg()[k][l], &gi);
                let t2 = linalg::mat_mul(&m.dg()[k], &dgi[l]);
                let t3 = linalg::mat_mul(&m.dg()[l], &dgi[k]);
                let t4 = linalg::mat_mul(m.g(), &ddgi[k][l]);
                for i in 0..n {
                    for j in 0..n {
                        assert!((&t1[i][j] + &t2[i][j] + &t3[i][j] + &t4[i][j]).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let m = examples::sphere(&int(1), &[rat(1, 2), rat(1, 3)]);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<MetricJet2>(&text).unwrap(), m);
        let f = examples::hyperbolic_factor(&[int(0), int(2)]);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"F\":\"1/4\""));
        assert_eq!(serde_json::from_str::<ConformalFactorJet>(&text).unwrap(), f);
    }

    fn fd_jets(metric: impl Fn(&[f64]) -> Vec<Vec<f64>>, x: &[f64]) -> (Vec<Vec<Vec<f64>>>, Vec<Vec<Vec<Vec<f64>>>>) {
        let n = x.len();
        let h = 1e-3;
        let at = |shift: &[(usize, f64)]| {
            let mut y = x.to_vec();
            for &(k, d) in shift {
                y[k] += d;
            }
            metric(&y)
        };
        let d1 = |k: usize, f: &dyn Fn(f64) -> Vec<Vec<f64>>| {
            let w = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
            let _ = k;
            let mut out = vec![vec![0.0; n]; n];
            for (s, c) in w {
                let v = f(s * h);
                for i in 0..n {
                    for j in 0..n {
                        out[i][j] += c * v[i][j] / (12.0 * h);
                    }
                }
            }
            out
        };
        let dg = (0..n).map(|k| d1(k, &|t| at(&[(k, t)]))).collect();
        let ddg = (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| d1(k, &|t| d1(l, &|u| at(&[(k, t), (l, u)]))))
                    .collect()
            })
            .collect();
        (dg, ddg)
    }

    fn close(a: &Rational, b: f64) -> bool {
        use num_traits::ToPrimitive;
        (a.to_f64().unwrap() - b).abs() < 1e-8
    }

    #[test]
    fn example_jets_match_finite_differences() {
        let sphere = |r: f64| {
            move |y: &[f64]| {
                let u = 1.0 + y.iter().map(|v| v * v).sum::<f64>();
                let f = 4.0 * r * r / (u * u);
                (0..y.len())
                    .map(|i| (0..y.len()).map(|j| if i == j { f } else { 0.0 }).collect())
                    .collect::<Vec<Vec<f64>>>()
            }
        };
        let check = |m: &MetricJet2, fd: (Vec<Vec<Vec<f64>>>, Vec<Vec<Vec<Vec<f64>>>>)| {
            let n = m.n();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        assert!(close(&m.dg()[k][i][j], fd.0[k][i][j]));
                        for l in 0..n {
                            assert!(close(&m.ddg()[k][l][i][j], fd.1[k][l][i][j]));
                        }
                    }
                }
            }
        };
        for n in 2..=3usize {
            let point: Vec<Rational> = (0..n).map(|i| rat(1, i as i64 + 2)).collect();
            let x: Vec<f64> = (0..n).map(|i| 1.0 / (i as f64 + 2.0)).collect();
            check(&examples::sphere(&rat(3, 2), &point), fd_jets(sphere(1.5), &x));
        }
        let hyp = |y: &[f64]| vec![vec![1.0 / (y[1] * y[1]), 0.0], vec![0.0, 1.0 / (y[1] * y[1])]];
        check(&examples::hyperbolic(&[rat(1, 3), rat(5, 4)]), fd_jets(hyp, &[1.0 / 3.0, 1.25]));
    }

}
