//! Exact polynomials in positions `x1..xn` and momenta `xi1..xin`.
//!
//! A [`Poly`] stores its terms in canonical form: a map from [`Monomial`] to a
//! nonzero [`ExactScalar`]. Equality of polynomials is equality of those maps.
//!
//! ```
//! use confquant::poly::Poly;
//! let p = Poly::parse(2, "(x1 + xi1)*(x1 - xi1)").unwrap();
//! assert_eq!(p.to_string(), "x1^2 - xi1^2");
//! ```

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, ExactScalar, Rational};

/// A base variable `x^i` or a momentum `xi_i`, indexed from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Xi(usize),
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::X(i) | Var::Xi(i) => i,
        }
    }

    fn slot(self, n: usize) -> usize {
        match self {
            Var::X(i) => i,
            Var::Xi(i) => n + i,
        }
    }

    /// Parses `x3`, `xi2` or `ξ2` (one-based).
    pub fn parse(name: &str, n: usize) -> Result<Var> {
        let unknown = || Error::UnknownVariable(name.to_string());
        let (ctor, digits): (fn(usize) -> Var, &str) = if let Some(d) = name.strip_prefix("xi") {
            (Var::Xi, d)
        } else if let Some(d) = name.strip_prefix('\u{3be}') {
            (Var::Xi, d)
        } else if let Some(d) = name.strip_prefix('x') {
            (Var::X, d)
        } else {
            return Err(unknown());
        };
        let index: usize = digits.parse().map_err(|_| unknown())?;
        if index == 0 || index > n {
            return Err(unknown());
        }
        Ok(ctor(index - 1))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::Xi(i) => write!(f, "xi{}", i + 1),
        }
    }
}

/// Exponent vector over `(x1..xn, xi1..xin)`.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// vector compared left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; 2 * n])
    }

    pub fn new(x: &[u32], xi: &[u32]) -> Result<Self> {
        if x.len() != xi.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: xi.len(),
            });
        }
        let mut exps = x.to_vec();
        exps.extend_from_slice(xi);
        Ok(Monomial(exps))
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn x(&self) -> &[u32] {
        &self.0[..self.n()]
    }

    pub fn xi(&self) -> &[u32] {
        &self.0[self.n()..]
    }

    pub fn exponent(&self, var: Var) -> u32 {
        self.0[var.slot(self.n())]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn x_degree(&self) -> u32 {
        self.x().iter().sum()
    }

    pub fn xi_degree(&self) -> u32 {
        self.xi().iter().sum()
    }

    pub fn with_exponent(mut self, var: Var, exp: u32) -> Self {
        let slot = var.slot(self.n());
        self.0[slot] = exp;
        self
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let mut first = true;
        for (slot, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let var = if slot < n { Var::X(slot) } else { Var::Xi(slot - n) };
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{var}")?;
            } else {
                write!(f, "{var}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, ExactScalar::one())
    }

    pub fn constant(n: usize, c: impl Into<ExactScalar>) -> Self {
        Self::monomial(n, Monomial::one(n), c)
    }

    pub fn monomial(n: usize, mono: Monomial, c: impl Into<ExactScalar>) -> Self {
        let mut p = Self::zero(n);
        p.add_term(mono, c.into());
        p
    }

    pub fn var(n: usize, var: Var) -> Self {
        Self::monomial(n, Monomial::one(n).with_exponent(var, 1), ExactScalar::one())
    }

    /// The coordinate `x^i` (zero-based).
    pub fn x(n: usize, i: usize) -> Self {
        Self::var(n, Var::X(i))
    }

    /// The momentum `xi_i` (zero-based).
    pub fn xi(n: usize, i: usize) -> Self {
        Self::var(n, Var::Xi(i))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> ExactScalar {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    /// The constant term.
    pub fn constant_term(&self) -> ExactScalar {
        self.coeff(&Monomial::one(self.n))
    }

    pub fn add_term(&mut self, mono: Monomial, c: ExactScalar) {
        debug_assert_eq!(mono.n(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += &c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = Poly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ExactScalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn scale_rat(&self, c: &Rational) -> Poly {
        self.scale(&ExactScalar::real(c.clone()))
    }

    /// Multiplies by a single variable.
    pub fn mul_var(&self, var: Var) -> Poly {
        let slot = var.slot(self.n);
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.0[slot] += 1;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut out = Poly::one(self.n);
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }

    pub fn partial(&self, var: Var) -> Poly {
        let slot = var.slot(self.n);
        let mut out = Poly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[slot];
            if e == 0 {
                continue;
            }
            let mut m = m.clone();
            m.0[slot] -= 1;
            out.add_term(m, c * &ExactScalar::from_int(i64::from(e)));
        }
        out
    }

    /// Partial derivative by one-based variable name such as `x2` or `xi1`.
    pub fn partial_named(&self, name: &str) -> Result<Poly> {
        Ok(self.partial(Var::parse(name, self.n)?))
    }

    pub fn partial_multi(&self, vars: &[Var]) -> Poly {
        vars.iter().fold(self.clone(), |p, &v| p.partial(v))
    }

    pub fn conj(&self) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    /// Highest momentum degree, or `None` for the zero polynomial.
    pub fn xi_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::xi_degree).max()
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::x_degree).max()
    }

    pub fn is_x_only(&self) -> bool {
        self.xi_degree().unwrap_or(0) == 0
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(ExactScalar::is_real)
    }

    /// The part of momentum degree exactly `k`.
    pub fn homogeneous_xi(&self, k: u32) -> Poly {
        self.filter(|m| m.xi_degree() == k)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Poly {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `xi^beta` as a polynomial in `x` alone.
    pub fn xi_coefficient(&self, beta: &[u32]) -> Poly {
        let mut out = Poly::zero(self.n);
        for (m, c) in &self.terms {
            if m.xi() == beta {
                let stripped = Monomial::new(m.x(), &vec![0; self.n]).expect("same length");
                out.add_term(stripped, c.clone());
            }
        }
        out
    }

    /// Substitutes rational values for all `x` variables.
    pub fn eval_x(&self, point: &[Rational]) -> Result<Poly> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: point.len(),
            });
        }
        let mut out = Poly::zero(self.n);
        for (m, c) in &self.terms {
            let mut value = c.clone();
            for (xv, &e) in point.iter().zip(m.x()) {
                if e > 0 {
                    value *= &ExactScalar::real(num_traits::pow(xv.clone(), e as usize));
                }
            }
            let stripped = Monomial::new(&vec![0; self.n], m.xi()).expect("same length");
            out.add_term(stripped, value);
        }
        Ok(out)
    }

    /// Evaluates an `x`-only polynomial at a point.
    pub fn eval_scalar(&self, point: &[Rational]) -> Result<ExactScalar> {
        if !self.is_x_only() {
            return Err(Error::UnexpectedMomentum(self.to_string()));
        }
        Ok(self.eval_x(point)?.constant_term())
    }

    /// Largest `max(|re|, |im|)` over all coefficients.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(ExactScalar::max_abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn parse(n: usize, text: &str) -> Result<Poly> {
        Parser::new(n, text)?.parse_all()
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    x: m.x().to_vec(),
                    xi: m.xi().to_vec(),
                    re: format_rational(c.re()),
                    im: format_rational(c.im()),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolyJson) -> Result<Poly> {
        let mut out = Poly::zero(json.n);
        for t in &json.terms {
            if t.x.len() != json.n || t.xi.len() != json.n {
                return Err(Error::DimensionMismatch {
                    expected: json.n,
                    found: t.x.len().max(t.xi.len()),
                });
            }
            let c = ExactScalar::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            out.add_term(Monomial::new(&t.x, &t.xi)?, c);
        }
        Ok(out)
    }
}

fn format_coeff_term(c: &ExactScalar, mono: &Monomial) -> String {
    let is_one = mono.degree() == 0;
    if let Some(r) = c.as_real() {
        if is_one {
            return format_rational(r);
        }
        if r.is_one() {
            return mono.to_string();
        }
        if (-r).is_one() {
            return format!("-{mono}");
        }
        return format!("{}*{mono}", format_rational(r));
    }
    let coeff = if c.re().is_zero() {
        if c.im().is_one() {
            "i".to_string()
        } else if (-c.im()).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", format_rational(c.im()))
        }
    } else {
        let sign = if c.im().is_negative() { "-" } else { "+" };
        let im = c.im().abs();
        format!("({} {sign} {}*i)", format_rational(c.re()), format_rational(&im))
    };
    if is_one {
        coeff
    } else {
        format!("{coeff}*{mono}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let term = format_coeff_term(c, m);
            match (k, term.strip_prefix('-')) {
                (0, _) => f.write_str(&term)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub x: Vec<u32>,
    pub xi: Vec<u32>,
    pub re: String,
    pub im: String,
}

/// Wire format: `{"n": .., "terms": [{"x": [..], "xi": [..], "re": "p/q", "im": "p/q"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = PolyJson::deserialize(d)?;
        Poly::from_json(&json).map_err(serde::de::Error::custom)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("dimension mismatch")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("dimension mismatch")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&ExactScalar::from_int(-1))
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Sym(char),
}

struct Parser {
    n: usize,
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(n: usize, text: &str) -> Result<Parser> {
        let mut tokens = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k];
            if c.is_whitespace() {
                k += 1;
            } else if c.is_ascii_digit() {
                let start = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                tokens.push(Token::Num(chars[start..k].iter().collect()));
            } else if c.is_alphabetic() {
                let start = k;
                while k < chars.len() && chars[k].is_alphabetic() {
                    k += 1;
                }
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                tokens.push(Token::Ident(chars[start..k].iter().collect()));
            } else if "+-*/^()\u{2212}".contains(c) {
                tokens.push(Token::Sym(if c == '\u{2212}' { '-' } else { c }));
                k += 1;
            } else {
                return Err(Error::Parse(format!("unexpected character `{c}`")));
            }
        }
        Ok(Parser { n, tokens, pos: 0 })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Poly> {
        if self.tokens.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let p = self.expr()?;
        if self.pos != self.tokens.len() {
            return Err(Error::Parse(format!("trailing input at token {}", self.pos)));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero(self.n);
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        loop {
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.factor()?;
            } else if self.eat('/') {
                let den = match self.tokens.get(self.pos) {
                    Some(Token::Num(d)) => d.clone(),
                    _ => return Err(Error::Parse("expected integer after `/`".into())),
                };
                self.pos += 1;
                let den = parse_rational(&den)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                acc = acc.scale_rat(&den.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos) {
                Some(Token::Num(e)) => {
                    let e: u32 = e.parse().map_err(|_| Error::Parse("bad exponent".into()))?;
                    self.pos += 1;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected exponent after `^`".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        let token = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match token {
            Token::Num(d) => Ok(Poly::constant(self.n, ExactScalar::real(parse_rational(&d)?))),
            Token::Ident(name) if name == "i" => Ok(Poly::constant(self.n, ExactScalar::i())),
            Token::Ident(name) => Ok(Poly::var(self.n, Var::parse(&name, self.n)?)),
            Token::Sym('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(inner)
            }
            Token::Sym('-') => Ok(-self.factor()?),
            Token::Sym(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn p(n: usize, s: &str) -> Poly {
        Poly::parse(n, s).unwrap()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(p(2, "(x1 + xi1)*(x1 - xi1)"), p(2, "x1^2 - xi1^2"));
        assert_eq!(&p(2, "x1*xi2") + &Poly::zero(2), p(2, "x1*xi2"));
        assert_eq!(&p(2, "1/2*x1") * &p(2, "1/3*xi2"), p(2, "1/6*x1*xi2"));
        assert!(Poly::one(2).try_add(&Poly::one(3)).is_err());
    }

    #[test]
    fn partial_examples() {
        assert_eq!(p(2, "x1^2*xi2").partial_named("x1").unwrap(), p(2, "2*x1*xi2"));
        assert!(p(2, "x2").partial(Var::Xi(0)).is_zero());
        assert_eq!(p(2, "xi1*xi2").partial(Var::Xi(1)), p(2, "xi1"));
        assert!(p(2, "x1").partial_named("x3").is_err());
        assert!(p(2, "x1").partial_named("y1").is_err());
    }

    #[test]
    fn printing_is_canonical() {
        let q = p(2, "3 - x1 + 1/2*xi1^2*x2 + (1 - 2*i)*xi2 + i");
        assert_eq!(q.to_string(), "1/2*x2*xi1^2 - x1 + (1 - 2*i)*xi2 + (3 + 1*i)");
        assert_eq!(Poly::zero(3).to_string(), "0");
        assert_eq!(p(1, "-2*i*x1").to_string(), "-2*i*x1");
    }

    #[test]
    fn json_round_trip() {
        let q = p(2, "1/2*x1*xi2 - 3*i");
        let text = serde_json::to_string(&q).unwrap();
        assert!(text.contains("\"re\":\"1/2\""));
        let back: Poly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn evaluation() {
        let q = p(2, "x1^2*xi1 + x2");
        let at = q.eval_x(&[rat(1, 2), rat(3, 1)]).unwrap();
        assert_eq!(at, p(2, "1/4*xi1 + 3"));
        assert!(q.eval_scalar(&[rat(1, 1), rat(1, 1)]).is_err());
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Poly> {
        let term = (
            proptest::collection::vec(0u32..3, 2 * n),
            -5i64..6,
            1i64..4,
            -2i64..3,
        );
        proptest::collection::vec(term, 0..5).prop_map(move |terms| {
            let mut out = Poly::zero(n);
            for (exps, a, b, c) in terms {
                out.add_term(
                    Monomial(exps),
                    ExactScalar::new(rat(a, b), rat(c, 1)),
                );
            }
            out
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

        #[test]
        fn parse_print_round_trip(a in arb_poly(2)) {
            prop_assert_eq!(Poly::parse(2, &a.to_string()).unwrap(), a);
        }

        #[test]
        fn ring_axioms(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn partials_commute(a in arb_poly(2), u in 0usize..4, v in 0usize..4) {
            let var = |k: usize| if k < 2 { Var::X(k) } else { Var::Xi(k - 2) };
            prop_assert_eq!(
                a.partial(var(u)).partial(var(v)),
                a.partial(var(v)).partial(var(u))
            );
        }
    }
}
