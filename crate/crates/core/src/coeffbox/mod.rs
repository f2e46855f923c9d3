//! Coefficient domains and the declarative sequence-rule language.
//!
//! Two backends are available: exact rationals ([`Rational`]) and fixed
//! precision binary floats ([`Real`]). Generic code is written against the
//! [`Coeff`] trait; the backend is chosen once per computation.

mod real;
mod rule;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use dashu::base::{BitTest, Sign, UnsignedAbs};
use dashu::integer::{IBig, UBig};
use serde::{Deserialize, Serialize};

pub use real::{compare_relative, compare_with_tolerance, Precision, Real};
pub use rule::{Builtin, SequenceRule};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = dashu::rational::RBig;

/// Coefficient backend chosen for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "kebab-case")]
pub enum Backend {
    Exact,
    Float { precision: Precision },
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float { precision } => write!(f, "float({precision})"),
        }
    }
}

/// n! as an unbounded integer.
pub fn factorial(n: u64) -> UBig {
    (2..=n).fold(UBig::ONE, |acc, k| acc * UBig::from(k))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num = IBig::from_str(num.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        let den = IBig::from_str(den.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        if den == IBig::ZERO {
            return Err(Error::Parse(format!("`{s}`: zero denominator")));
        }
        let (sign, den) = den.into_parts();
        let num = if sign == Sign::Negative { -num } else { num };
        Ok(Rational::from_parts(num, den))
    } else {
        let num = IBig::from_str(t).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        Ok(Rational::from(num))
    }
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn render_rational(q: &Rational) -> String {
    q.to_string()
}

/// Serde adapter: rationals travel as `"p/q"` strings.
pub mod qstr {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::super::{parse_rational, Rational};
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&q.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// Serde adapter writing any coefficient in its report rendering.
pub fn serialize_coeff<C: Coeff, S: serde::Serializer>(
    c: &C,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.render())
}

/// Arithmetic surface shared by both coefficient backends.
pub trait Coeff: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    /// Per-run context (nothing for rationals, the precision for floats).
    type Ctx: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn from_int(ctx: &Self::Ctx, n: i64) -> Self;
    fn from_ibig(ctx: &Self::Ctx, n: &IBig) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;
    /// Evaluates a sequence rule in this backend.
    fn from_rule(ctx: &Self::Ctx, rule: &SequenceRule, n: u64) -> Result<Self>;
    fn backend(ctx: &Self::Ctx) -> Backend;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Division; `rhs` must be nonzero.
    fn div(&self, rhs: &Self) -> Self;
    fn mul_int(&self, k: i64) -> Self;
    fn div_int(&self, k: i64) -> Self;

    fn signum(&self) -> Ordering;
    fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }
    fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// `self <= rhs`, exact on the rational backend and with a relative slack
    /// of a few ulps on the float backend.
    fn approx_le(&self, rhs: &Self) -> bool;

    fn to_real(&self, prec: Precision) -> Real;
    fn to_f64(&self) -> f64;
    /// Natural log of a positive value as f64; works far outside f64 range.
    fn ln_f64(&self) -> f64 {
        self.to_real(Precision(128)).ln().to_f64()
    }
    /// `p/q` for rationals, scientific decimal for floats.
    fn render(&self) -> String;
}

impl Coeff for Rational {
    type Ctx = ();

    fn zero(_: &()) -> Self {
        Rational::ZERO
    }
    fn from_int(_: &(), n: i64) -> Self {
        Rational::from(n)
    }
    fn from_ibig(_: &(), n: &IBig) -> Self {
        Rational::from(n.clone())
    }
    fn from_rational(_: &(), q: &Rational) -> Self {
        q.clone()
    }
    fn from_rule(_: &(), rule: &SequenceRule, n: u64) -> Result<Self> {
        rule.eval_exact(n)
    }
    fn backend(_: &()) -> Backend {
        Backend::Exact
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn mul_int(&self, k: i64) -> Self {
        self * Rational::from(k)
    }
    fn div_int(&self, k: i64) -> Self {
        self / Rational::from(k)
    }

    fn signum(&self) -> Ordering {
        self.cmp(&Rational::ZERO)
    }
    fn approx_le(&self, rhs: &Self) -> bool {
        self <= rhs
    }

    fn to_real(&self, prec: Precision) -> Real {
        Real::from_rational(self, prec)
    }
    fn to_f64(&self) -> f64 {
        self.to_f64().value()
    }
    fn ln_f64(&self) -> f64 {
        // Scale into a comfortable range first; huge numerators would
        // otherwise need a very wide float.
        let num = self.numerator().unsigned_abs();
        let den = self.denominator();
        ln_ubig(&num) - ln_ubig(den)
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Coeff for Real {
    type Ctx = Precision;

    fn zero(p: &Precision) -> Self {
        Real::zero(*p)
    }
    fn from_int(p: &Precision, n: i64) -> Self {
        Real::from_i64(n, *p)
    }
    fn from_ibig(p: &Precision, n: &IBig) -> Self {
        Real::from_ibig(n, *p)
    }
    fn from_rational(p: &Precision, q: &Rational) -> Self {
        Real::from_rational(q, *p)
    }
    fn from_rule(p: &Precision, rule: &SequenceRule, n: u64) -> Result<Self> {
        rule.eval_real(n, *p)
    }
    fn backend(p: &Precision) -> Backend {
        Backend::Float { precision: *p }
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn mul_int(&self, k: i64) -> Self {
        self * &Real::from_i64(k, self.precision())
    }
    fn div_int(&self, k: i64) -> Self {
        self / &Real::from_i64(k, self.precision())
    }

    fn signum(&self) -> Ordering {
        Real::signum(self)
    }
    fn approx_le(&self, rhs: &Self) -> bool {
        if self <= rhs {
            return true;
        }
        let slack = Real::from_f64(self.precision().epsilon() * 256.0, self.precision())
            .expect("finite epsilon");
        (self - rhs) <= slack * self.abs().max(rhs.abs())
    }

    fn to_real(&self, prec: Precision) -> Real {
        self.rounded(prec)
    }
    fn to_f64(&self) -> f64 {
        Real::to_f64(self)
    }
    fn ln_f64(&self) -> f64 {
        self.ln().to_f64()
    }
    fn render(&self) -> String {
        Real::render(self)
    }
}

/// ln of a positive big integer, accurate to f64 for any size.
pub fn ln_ubig(n: &UBig) -> f64 {
    let bits = n.bit_len();
    if bits <= 1000 {
        return Real::from_ubig(n, Precision(64)).ln().to_f64();
    }
    let shift = bits - 64;
    let top = n >> shift;
    Real::from_ubig(&top, Precision(64)).ln().to_f64() + (shift as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_render() {
        let q = parse_rational("27/6").unwrap();
        assert_eq!(render_rational(&q), "9/2");
        assert_eq!(render_rational(&parse_rational("-3/-6").unwrap()), "1/2");
        assert_eq!(render_rational(&parse_rational(" 12 ").unwrap()), "12");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn ln_of_huge_integers() {
        let f = factorial(500);
        let expected: f64 = (2..=500).map(|k| (k as f64).ln()).sum();
        assert!((ln_ubig(&f) - expected).abs() < 1e-9 * expected);
        let q = Rational::from_parts(IBig::from(1), factorial(200));
        let expected: f64 = -(2..=200).map(|k| (k as f64).ln()).sum::<f64>();
        assert!((Coeff::ln_f64(&q) - expected).abs() < 1e-9);
    }

    #[test]
    fn float_to_real_changes_precision() {
        let x = Real::from_i64(3, Precision(256)).sqrt();
        let y = x.to_real(Precision(64));
        assert_eq!(y.precision(), Precision(64));
        assert!((y.to_f64() - 3f64.sqrt()).abs() < 1e-15);
    }
}
