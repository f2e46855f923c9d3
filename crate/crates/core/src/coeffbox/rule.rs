use std::collections::BTreeSet;
use std::str::FromStr;

use dashu::base::Sign;
use dashu::integer::{IBig, UBig};
use serde::{Deserialize, Serialize};

use super::{factorial, parse_rational, qstr, Precision, Rational, Real};
use crate::error::{Error, Result};

/// Declarative recipe for a coefficient sequence `n -> value`.
///
/// Serialized as a JSON object tagged by `"kind"`; rationals are `"p/q"`
/// strings. See `docs/sequence-rule.schema.json` for the full schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceRule {
    /// Listed values for n = 0, 1, ...; zero beyond the list.
    Explicit {
        #[serde(with = "qstr::vec")]
        values: Vec<Rational>,
    },
    /// sum_i coeffs[i] * n^i.
    Polynomial {
        #[serde(with = "qstr::vec")]
        coeffs: Vec<Rational>,
    },
    ConstantOne,
    /// c * b^n.
    Geometric {
        #[serde(with = "qstr")]
        c: Rational,
        #[serde(with = "qstr")]
        b: Rational,
    },
    /// n^(alpha*n)/n! for n >= 1 (value 0 at n = 0). With `floor` the
    /// numerator is replaced by floor(n^(alpha*n)), which keeps the rule exact.
    PowerOverFactorial {
        #[serde(with = "qstr")]
        alpha: Rational,
        #[serde(default)]
        floor: bool,
    },
    /// 1 on the listed indices, 0 elsewhere.
    BinarySupport {
        support: BTreeSet<u64>,
    },
    /// inner(n - by) for n >= by, else 0.
    Shifted {
        inner: Box<SequenceRule>,
        by: u64,
    },
    Scaled {
        inner: Box<SequenceRule>,
        #[serde(with = "qstr")]
        factor: Rational,
    },
    /// inner(n) for n <= max, else 0.
    Truncated {
        inner: Box<SequenceRule>,
        max: u64,
    },
    /// Pointwise product.
    Product {
        factors: Vec<SequenceRule>,
    },
    Builtin(Builtin),
}

/// Named sequences that are awkward to express with the generic kinds.
/// All of them vanish at n = 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum Builtin {
    /// Labelled broom components: 1 at n = 1, 2^m (3m)!/(2m)! at n = 3m.
    BroomLabelled,
    /// Unlabelled broom components: 1 at n = 1, 2^m at n = 3m.
    BroomUnlabelled,
    /// 2^n - 1 for n >= 1.
    SelectionPartitions,
    /// n! * base^n for n >= 1.
    FactorialGeometric { base: u64 },
}

impl SequenceRule {
    pub fn explicit_ints(values: &[i64]) -> Self {
        SequenceRule::Explicit {
            values: values.iter().map(|&v| Rational::from(v)).collect(),
        }
    }

    pub fn power_over_factorial(alpha: Rational, floor: bool) -> Self {
        SequenceRule::PowerOverFactorial { alpha, floor }
    }

    pub fn geometric(c: i64, b: i64) -> Self {
        SequenceRule::Geometric {
            c: Rational::from(c),
            b: Rational::from(b),
        }
    }

    /// True when every value of the rule is rational and the exact backend may be used.
    pub fn is_exact(&self) -> bool {
        match self {
            SequenceRule::PowerOverFactorial { alpha, floor } => {
                *floor || *alpha.denominator() == UBig::ONE
            }
            SequenceRule::Shifted { inner, .. }
            | SequenceRule::Scaled { inner, .. }
            | SequenceRule::Truncated { inner, .. } => inner.is_exact(),
            SequenceRule::Product { factors } => factors.iter().all(SequenceRule::is_exact),
            _ => true,
        }
    }

    /// The n-th term on the exact backend.
    pub fn eval_exact(&self, n: u64) -> Result<Rational> {
        match self {
            SequenceRule::Explicit { values } => {
                Ok(values.get(n as usize).cloned().unwrap_or(Rational::ZERO))
            }
            SequenceRule::Polynomial { coeffs } => {
                let x = Rational::from(n);
                Ok(coeffs
                    .iter()
                    .rev()
                    .fold(Rational::ZERO, |acc, c| acc * &x + c))
            }
            SequenceRule::ConstantOne => Ok(Rational::ONE),
            SequenceRule::Geometric { c, b } => Ok(c * pow_rational(b, n)),
            SequenceRule::PowerOverFactorial { alpha, floor } => {
                check_alpha(alpha)?;
                if n == 0 {
                    return Ok(Rational::ZERO);
                }
                // With an integer alpha the floor is the exact value.
                let num = if *floor || *alpha.denominator() == UBig::ONE {
                    floor_power(n, alpha)
                } else {
                    return Err(Error::DomainMismatch(format!(
                        "n^({alpha} n)/n! is irrational in general; use the float backend or set floor"
                    )));
                };
                Ok(Rational::from_parts(IBig::from(num), factorial(n)))
            }
            SequenceRule::BinarySupport { support } => Ok(if support.contains(&n) {
                Rational::ONE
            } else {
                Rational::ZERO
            }),
            SequenceRule::Shifted { inner, by } => {
                if n >= *by {
                    inner.eval_exact(n - by)
                } else {
                    Ok(Rational::ZERO)
                }
            }
            SequenceRule::Scaled { inner, factor } => Ok(inner.eval_exact(n)? * factor),
            SequenceRule::Truncated { inner, max } => {
                if n <= *max {
                    inner.eval_exact(n)
                } else {
                    Ok(Rational::ZERO)
                }
            }
            SequenceRule::Product { factors } => factors
                .iter()
                .try_fold(Rational::ONE, |acc, f| Ok(acc * f.eval_exact(n)?)),
            SequenceRule::Builtin(b) => Ok(Rational::from(b.eval(n))),
        }
    }

    /// The n-th term on the float backend. Exact rules are evaluated exactly
    /// and rounded once.
    pub fn eval_real(&self, n: u64, prec: Precision) -> Result<Real> {
        match self {
            SequenceRule::PowerOverFactorial {
                alpha,
                floor: false,
            } if *alpha.denominator() != UBig::ONE => {
                check_alpha(alpha)?;
                if n == 0 {
                    return Ok(Real::zero(prec));
                }
                Ok(power_over_factorial_real(n, alpha, prec))
            }
            SequenceRule::Shifted { inner, by } if !self.is_exact() => {
                if n >= *by {
                    inner.eval_real(n - by, prec)
                } else {
                    Ok(Real::zero(prec))
                }
            }
            SequenceRule::Scaled { inner, factor } if !self.is_exact() => {
                Ok(inner.eval_real(n, prec)? * Real::from_rational(factor, prec))
            }
            SequenceRule::Truncated { inner, max } if !self.is_exact() => {
                if n <= *max {
                    inner.eval_real(n, prec)
                } else {
                    Ok(Real::zero(prec))
                }
            }
            SequenceRule::Product { factors } if !self.is_exact() => factors
                .iter()
                .try_fold(Real::one(prec), |acc, f| Ok(acc * f.eval_real(n, prec)?)),
            _ => Ok(Real::from_rational(&self.eval_exact(n)?, prec)),
        }
    }

    /// Parses a compact textual form used on the command line:
    /// `1`, `1/n!`, `n^n/n!`, `n^(a*n)/n!`, `floor(n^(a*n))/n!`.
    pub fn from_shorthand(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_alpha = |a: &str| -> Result<Rational> {
            let a = a.trim_end_matches("*n").trim_end_matches('n');
            let a = a.trim_end_matches('*');
            parse_rational(a)
        };
        match t.as_str() {
            "1" => return Ok(SequenceRule::ConstantOne),
            "1/n!" => return Ok(SequenceRule::power_over_factorial(Rational::ZERO, false)),
            "n^n/n!" => return Ok(SequenceRule::power_over_factorial(Rational::ONE, false)),
            "2^n-1" => return Ok(SequenceRule::Builtin(Builtin::SelectionPartitions)),
            _ => {}
        }
        if let Some(inner) = t
            .strip_prefix("floor(n^(")
            .and_then(|r| r.strip_suffix("))/n!"))
        {
            return Ok(SequenceRule::power_over_factorial(
                parse_alpha(inner)?,
                true,
            ));
        }
        if let Some(inner) = t.strip_prefix("n^(").and_then(|r| r.strip_suffix(")/n!")) {
            return Ok(SequenceRule::power_over_factorial(
                parse_alpha(inner)?,
                false,
            ));
        }
        Err(Error::Parse(format!("unrecognised rule shorthand `{s}`")))
    }
}

impl FromStr for SequenceRule {
    type Err = Error;

    /// Accepts inline JSON or a shorthand.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
        } else {
            SequenceRule::from_shorthand(s)
        }
    }
}

impl Builtin {
    pub fn eval(&self, n: u64) -> IBig {
        match self {
            Builtin::BroomLabelled => match n {
                1 => IBig::ONE,
                n if n > 0 && n % 3 == 0 => {
                    let m = n / 3;
                    IBig::from((UBig::ONE << m as usize) * factorial(3 * m) / factorial(2 * m))
                }
                _ => IBig::ZERO,
            },
            Builtin::BroomUnlabelled => match n {
                1 => IBig::ONE,
                n if n > 0 && n % 3 == 0 => IBig::from(UBig::ONE << (n / 3) as usize),
                _ => IBig::ZERO,
            },
            Builtin::SelectionPartitions => {
                if n == 0 {
                    IBig::ZERO
                } else {
                    IBig::from((UBig::ONE << n as usize) - UBig::ONE)
                }
            }
            Builtin::FactorialGeometric { base } => {
                if n == 0 {
                    IBig::ZERO
                } else {
                    IBig::from(factorial(n) * UBig::from(*base).pow(n as usize))
                }
            }
        }
    }
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if alpha.sign() == Sign::Negative {
        Err(Error::invalid(format!(
            "alpha must be nonnegative, got {alpha}"
        )))
    } else {
        Ok(())
    }
}

fn pow_rational(b: &Rational, n: u64) -> Rational {
    let num = b.numerator().pow(n as usize);
    let den = b.denominator().pow(n as usize);
    Rational::from_parts(num, den)
}

/// floor(n^(alpha*n)) for alpha = p/q >= 0, computed as the integer q-th root of n^(p n).
fn floor_power(n: u64, alpha: &Rational) -> UBig {
    let p: UBig = alpha
        .numerator()
        .clone()
        .try_into()
        .expect("alpha checked nonnegative");
    let q = alpha.denominator().clone();
    let p = usize::try_from(p).expect("alpha numerator fits in usize");
    let q = usize::try_from(q).expect("alpha denominator fits in usize");
    let full = UBig::from(n).pow(p * n as usize);
    if q == 1 {
        full
    } else {
        full.nth_root(q)
    }
}

/// n^(alpha n)/n! through exp/ln at the working precision.
fn power_over_factorial_real(n: u64, alpha: &Rational, prec: Precision) -> Real {
    let work = Precision(prec.0 + 32);
    let exponent = Real::from_rational(alpha, work) * Real::from_i64(n as i64, work);
    let power = Real::from_i64(n as i64, work).powf(&exponent);
    let value = power / Real::factorial(n, work);
    value.rounded(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffbox::Coeff;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn constant_one() {
        assert_eq!(
            SequenceRule::ConstantOne.eval_exact(7).unwrap(),
            Rational::ONE
        );
    }

    #[test]
    fn floor_power_over_factorial() {
        let r = SequenceRule::power_over_factorial(Rational::ONE, true);
        assert_eq!(r.eval_exact(3).unwrap(), q("9/2"));
        let half = SequenceRule::power_over_factorial(q("1/2"), true);
        // floor(3^1.5) = floor(5.196) = 5
        assert_eq!(half.eval_exact(3).unwrap(), q("5/6"));
        assert_eq!(half.eval_exact(4).unwrap(), q("16/24"));
        assert_eq!(half.eval_exact(0).unwrap(), Rational::ZERO);
    }

    #[test]
    fn broom_builtin_matches_enumeration_value() {
        let r = SequenceRule::Builtin(Builtin::BroomLabelled);
        assert_eq!(r.eval_exact(6).unwrap(), Rational::from(120));
        assert_eq!(r.eval_exact(3).unwrap(), Rational::from(6));
        assert_eq!(r.eval_exact(4).unwrap(), Rational::ZERO);
        let u = SequenceRule::Builtin(Builtin::BroomUnlabelled);
        assert_eq!(u.eval_exact(9).unwrap(), Rational::from(8));
        assert_eq!(u.eval_exact(1).unwrap(), Rational::ONE);
    }

    #[test]
    fn float_only_rule_refuses_exact_backend() {
        let r = SequenceRule::power_over_factorial(q("1/2"), false);
        assert!(!r.is_exact());
        assert!(matches!(r.eval_exact(3), Err(Error::DomainMismatch(_))));
        let v = r.eval_real(3, Precision::DEFAULT).unwrap();
        assert!((v.to_f64() - 27f64.sqrt() / 6.0).abs() < 1e-14);
        let wrapped = SequenceRule::Scaled {
            inner: Box::new(r),
            factor: q("2"),
        };
        assert!(!wrapped.is_exact());
        assert!(wrapped.eval_exact(2).is_err());
    }

    #[test]
    fn wrappers() {
        let base = SequenceRule::explicit_ints(&[0, 1, 2, 3]);
        let shifted = SequenceRule::Shifted {
            inner: Box::new(base.clone()),
            by: 2,
        };
        assert_eq!(shifted.eval_exact(1).unwrap(), Rational::ZERO);
        assert_eq!(shifted.eval_exact(4).unwrap(), Rational::from(2));
        let trunc = SequenceRule::Truncated {
            inner: Box::new(SequenceRule::ConstantOne),
            max: 3,
        };
        assert_eq!(trunc.eval_exact(3).unwrap(), Rational::ONE);
        assert_eq!(trunc.eval_exact(4).unwrap(), Rational::ZERO);
        let prod = SequenceRule::Product {
            factors: vec![
                SequenceRule::Polynomial {
                    coeffs: vec![q("0"), q("1")],
                },
                SequenceRule::geometric(1, 2),
            ],
        };
        assert_eq!(prod.eval_exact(5).unwrap(), Rational::from(160));
        let poly = SequenceRule::Polynomial {
            coeffs: vec![q("1"), q("0"), q("1/2")],
        };
        assert_eq!(poly.eval_exact(3).unwrap(), q("11/2"));
        let geo = SequenceRule::Geometric {
            c: q("3"),
            b: q("1/2"),
        };
        assert_eq!(geo.eval_exact(3).unwrap(), q("3/8"));
    }

    #[test]
    fn json_round_trip_and_schema_shape() {
        let r = SequenceRule::Scaled {
            inner: Box::new(SequenceRule::power_over_factorial(q("1/2"), true)),
            factor: q("3/4"),
        };
        let js = serde_json::to_string(&r).unwrap();
        assert_eq!(
            js,
            r#"{"kind":"scaled","inner":{"kind":"power-over-factorial","alpha":"1/2","floor":true},"factor":"3/4"}"#
        );
        assert_eq!(serde_json::from_str::<SequenceRule>(&js).unwrap(), r);
        let b: SequenceRule =
            serde_json::from_str(r#"{"kind":"builtin","tag":"factorial-geometric","base":2}"#)
                .unwrap();
        assert_eq!(
            b,
            SequenceRule::Builtin(Builtin::FactorialGeometric { base: 2 })
        );
        assert_eq!(b.eval_exact(3).unwrap(), Rational::from(48));
    }

    #[test]
    fn shorthands() {
        assert_eq!(
            SequenceRule::from_shorthand("n^n/n!").unwrap(),
            SequenceRule::power_over_factorial(Rational::ONE, false)
        );
        assert_eq!(
            SequenceRule::from_shorthand("floor(n^(1/2*n))/n!").unwrap(),
            SequenceRule::power_over_factorial(q("1/2"), true)
        );
        assert_eq!(
            SequenceRule::from_shorthand("n^(3/4 n)/n!").unwrap(),
            SequenceRule::power_over_factorial(q("3/4"), false)
        );
        assert!(SequenceRule::from_shorthand("sin(n)").is_err());
    }

    fn exact_rule() -> impl Strategy<Value = SequenceRule> {
        prop_oneof![
            Just(SequenceRule::ConstantOne),
            (0i64..5, 1i64..4).prop_map(|(c, b)| SequenceRule::geometric(c, b)),
            (0u64..4, 1u64..4, any::<bool>()).prop_map(|(p, d, floor)| {
                SequenceRule::power_over_factorial(
                    Rational::from_parts(IBig::from(p), UBig::from(d)),
                    floor || p % d != 0,
                )
            }),
            Just(SequenceRule::Builtin(Builtin::BroomLabelled)),
            Just(SequenceRule::Builtin(Builtin::SelectionPartitions)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eval_is_pure(rule in exact_rule(), n in 0u64..60) {
            prop_assert_eq!(rule.eval_exact(n).unwrap(), rule.eval_exact(n).unwrap());
        }

        #[test]
        fn float_agrees_with_exact(rule in exact_rule(), n in 0u64..=200) {
            let prec = Precision::DEFAULT;
            let exact = rule.eval_exact(n).unwrap();
            let float = rule.eval_real(n, prec).unwrap();
            let reference = Real::from_rational(&exact, Precision(prec.0 + 64));
            let err = (float.to_real(Precision(prec.0 + 64)) - reference.clone()).abs();
            let bound = reference.abs() * Real::from_f64(2f64.powi(-(prec.0 as i32) + 4), Precision(prec.0 + 64)).unwrap();
            prop_assert!(err <= bound);
        }

        #[test]
        fn rational_add_sub_round_trips(a in -1000i64..1000, b in 1u64..1000, c in -1000i64..1000, d in 1u64..1000) {
            let x = Rational::from_parts(IBig::from(a), UBig::from(b));
            let y = Rational::from_parts(IBig::from(c), UBig::from(d));
            prop_assert_eq!((x.clone() + &y) - &y, x);
        }
    }
}
