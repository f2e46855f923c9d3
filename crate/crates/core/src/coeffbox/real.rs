//! Fixed-precision binary floats.
//!
//! Every [`Real`] carries its precision (in significant bits). Values built
//! through the constructors here always have a finite precision, so the
//! arithmetic below never hits dashu's "unlimited precision" division path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu::base::{Signed, SquareRoot};
use dashu::float::round::mode::HalfEven;
use dashu::float::{DBig, FBig};
use dashu::integer::{IBig, UBig};
use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

type Inner = FBig<HalfEven, 2>;

/// Number of significant bits carried by float computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Precision(pub usize);

impl Precision {
    pub const DEFAULT: Precision = Precision(256);

    /// Decimal digits that are meaningful at this precision.
    pub fn decimal_digits(self) -> usize {
        // log10(2) ~ 0.30103
        ((self.0 as f64) * std::f64::consts::LOG10_2)
            .floor()
            .max(1.0) as usize
    }

    /// 2^(-bits), the unit roundoff scale at this precision.
    pub fn epsilon(self) -> f64 {
        2f64.powi(-(self.0.min(1000) as i32))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Inner);

impl Real {
    fn wrap(x: Inner, prec: Precision) -> Self {
        Real(x.with_precision(prec.0).value())
    }

    pub fn zero(prec: Precision) -> Self {
        Self::wrap(Inner::ZERO, prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::wrap(Inner::ONE, prec)
    }

    pub fn from_i64(n: i64, prec: Precision) -> Self {
        Self::wrap(Inner::from(n), prec)
    }

    pub fn from_ibig(n: &IBig, prec: Precision) -> Self {
        Self::wrap(Inner::from(n.clone()), prec)
    }

    pub fn from_ubig(n: &UBig, prec: Precision) -> Self {
        Self::wrap(Inner::from(n.clone()), prec)
    }

    pub fn from_rational(q: &Rational, prec: Precision) -> Self {
        Real(q.to_float::<HalfEven, 2>(prec.0).value())
    }

    pub fn from_f64(x: f64, prec: Precision) -> Result<Self> {
        let v = Inner::try_from(x).map_err(|_| Error::invalid(format!("non-finite float {x}")))?;
        Ok(Self::wrap(v, prec))
    }

    /// Parses a decimal literal such as `8.66e-1` and rounds it to `prec`.
    pub fn parse(s: &str, prec: Precision) -> Result<Self> {
        let d = DBig::from_str(s.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        let b = d
            .with_precision(prec.0.max(1))
            .value()
            .with_base_and_precision::<2>(prec.0)
            .value();
        Ok(Real(b.with_rounding::<HalfEven>()))
    }

    pub fn pi(prec: Precision) -> Self {
        Real(Inner::pi(prec.0))
    }

    /// n! rounded to `prec`.
    pub fn factorial(n: u64, prec: Precision) -> Self {
        Self::from_ubig(&crate::coeffbox::factorial(n), prec)
    }

    /// Re-rounds to `prec` (widening is exact).
    pub fn rounded(&self, prec: Precision) -> Real {
        Real(self.0.clone().with_precision(prec.0).value())
    }

    pub fn precision(&self) -> Precision {
        Precision(self.0.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }

    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.0.repr().significand().is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn exp(&self) -> Self {
        Real(self.0.exp())
    }

    /// Natural logarithm; the caller guarantees `self > 0`.
    pub fn ln(&self) -> Self {
        Real(self.0.ln())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt())
    }

    pub fn powi(&self, k: i64) -> Self {
        Real(self.0.powi(IBig::from(k)))
    }

    /// self^exponent for positive `self`.
    pub fn powf(&self, exponent: &Real) -> Self {
        Real(self.0.powf(&exponent.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    /// Truncated integer part.
    pub fn trunc_int(&self) -> IBig {
        self.0.trunc().to_int().value()
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Scientific decimal rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let d = self
            .0
            .clone()
            .with_base_and_precision::<10>(digits.max(1))
            .value();
        format!("{d:e}")
    }

    /// Rendering used in reports: every meaningful digit of the precision.
    pub fn render(&self) -> String {
        self.to_sci(self.precision().decimal_digits())
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({}, {} bits)", self.to_sci(20), self.0.precision())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(self.0.$method(&rhs.0))
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

/// Compares `a` and `b`, collapsing `|a - b| <= tol` to `Equal`.
pub fn compare_with_tolerance(a: &Real, b: &Real, tol: f64) -> Result<Ordering> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let prec = a.precision().max(b.precision());
    let diff = a - b;
    let tol = Real::from_f64(tol, prec)?;
    if diff.abs() <= tol {
        Ok(Ordering::Equal)
    } else {
        Ok(diff.signum())
    }
}

/// Relative-tolerance variant: `|a - b| <= tol * max(|a|, |b|, 1)` counts as equal.
///
/// Strict inequalities between large magnitudes go through this so that a
/// difference below the working precision is never certified.
pub fn compare_relative(a: &Real, b: &Real, tol: f64) -> Result<Ordering> {
    let prec = a.precision().max(b.precision());
    let scale = a.abs().max(b.abs()).max(Real::one(prec));
    let diff = a - b;
    let tol = Real::from_f64(tol, prec)? * &scale;
    if diff.abs() <= tol {
        Ok(Ordering::Equal)
    } else {
        Ok(diff.signum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Precision = Precision(256);

    #[test]
    fn tolerance_collapses_near_ties() {
        let one = Real::one(P);
        let near = &one + &Real::parse("1e-40", P).unwrap();
        assert_eq!(
            compare_with_tolerance(&one, &near, 1e-30).unwrap(),
            Ordering::Equal
        );
        let a = Real::parse("0.5", P).unwrap();
        let b = Real::parse("0.8660", P).unwrap();
        assert_eq!(
            compare_with_tolerance(&a, &b, 1e-6).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            compare_with_tolerance(&b, &a, 1e-6).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn negative_tolerance_rejected() {
        let one = Real::one(P);
        assert!(matches!(
            compare_with_tolerance(&one, &one, -1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn half_sqrt3_agrees_across_precisions() {
        let lo = Real::from_i64(3, Precision(128)).sqrt() / Real::from_i64(2, Precision(128));
        let hi = Real::from_i64(3, Precision(512)).sqrt() / Real::from_i64(2, Precision(512));
        assert_eq!(
            compare_with_tolerance(&lo, &hi, 1e-20).unwrap(),
            Ordering::Equal
        );
        assert!((hi.to_f64() - 0.866_025_403_784_438_6).abs() < 1e-15);
    }

    #[test]
    fn parse_and_render() {
        let x = Real::parse("8.66e-1", P).unwrap();
        assert_eq!(x.to_sci(3), "8.66e-1");
        assert_eq!(Real::zero(P).to_sci(5), "0");
        assert_eq!(x.precision(), P);
    }

    #[test]
    fn pi_and_exp() {
        let e6 = Real::from_i64(6, P).exp();
        assert!((e6.to_f64() - 403.428_793_492_735_1).abs() < 1e-9);
        assert!((Real::pi(P).to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }
}
