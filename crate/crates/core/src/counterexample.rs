//! The recursive construction of `g <= t` whose `exp` has infinitely many
//! ratio violations `f(d)/f(d-1) > 1`, for thresholds `t` that are not
//! `O(n^(theta n)/n!)` for any `theta < 1`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize, Serializer};

use crate::coeffbox::{compare_relative, Coeff, Precision, Rational, Real, SequenceRule};
use crate::diagnostics::{gcd, ratio_sequence, RatioReport, TrendConfig};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::series::{exp, Series};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    pub precision: Precision,
    /// Relative tolerance below which two values count as tied.
    pub tol: f64,
    pub search_cap: u64,
    pub mode: ExecMode,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            precision: Precision::DEFAULT,
            tol: 1e-40,
            search_cap: 500,
            mode: ExecMode::Parallel,
        }
    }
}

fn strictly_greater(a: &Real, b: &Real, tol: f64) -> Result<bool> {
    Ok(compare_relative(a, b, tol)? == Ordering::Greater)
}

fn check_theta(theta: &Rational) -> Result<()> {
    if *theta <= Rational::ZERO || *theta >= Rational::ONE {
        Err(Error::invalid(format!(
            "theta must lie in (0, 1), got {theta}"
        )))
    } else {
        Ok(())
    }
}

fn threshold(theta: &Rational, n: u64, prec: Precision) -> Result<Real> {
    SequenceRule::power_over_factorial(theta.clone(), false).eval_real(n, prec)
}

/// `n in S(theta)`, i.e. `t(n) > n^(theta n)/n!` beyond the tie tolerance.
pub fn s_theta_member(
    t: &SequenceRule,
    theta: &Rational,
    n: u64,
    config: &CounterexampleConfig,
) -> Result<bool> {
    check_theta(theta)?;
    if n < 1 {
        return Err(Error::invalid("membership is defined for n >= 1"));
    }
    let p = config.precision;
    strictly_greater(&t.eval_real(n, p)?, &threshold(theta, n, p)?, config.tol)
}

/// `1 - 1/(2d)`, the exponent used after a stage of degree `d`.
pub fn stage_theta(d: u64) -> Rational {
    Rational::ONE - Rational::from_parts(1.into(), (2 * d).into())
}

/// `h_d(n) = n^((1 - 1/(2d)) n) / n!`.
pub fn h_value(d: u64, n: u64, prec: Precision) -> Result<Real> {
    if d < 1 || n < 1 {
        return Err(Error::invalid(format!(
            "h needs d >= 1 and n >= 1, got d = {d}, n = {n}"
        )));
    }
    threshold(&stage_theta(d), n, prec)
}

fn ser_real<S: Serializer>(x: &Real, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.render())
}

fn ser_opt_real<S: Serializer>(x: &Option<Real>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&v.render()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub m: u64,
    pub d: u64,
    /// `h_{m-1}(d_m)`; absent for the first stage.
    #[serde(serialize_with = "ser_opt_real")]
    pub added_coeff: Option<Real>,
    /// `f_m(d_m) / f_m(d_m - 1)` for `m >= 2`.
    #[serde(serialize_with = "ser_opt_real")]
    pub ratio_at_d: Option<Real>,
}

/// The smallest `d > d_m` with `d in S(1 - 1/(2 d_m))` and `h_m(d) > f_m(d-1)`,
/// together with `h_m(d)`.
pub fn next_degree(
    t: &SequenceRule,
    d_m: u64,
    f_m: &Series<Real>,
    config: &CounterexampleConfig,
) -> Result<(u64, Real)> {
    let cap = config.search_cap;
    if f_m.order() + 1 < cap {
        return Err(Error::invalid(format!(
            "f_m has order {} but the search reaches {cap}",
            f_m.order()
        )));
    }
    if cap <= d_m {
        return Err(Error::SearchExhausted {
            after: d_m,
            cap,
            trace: "empty candidate range".into(),
        });
    }
    let p = config.precision;
    let theta = stage_theta(d_m);
    // (member, h beats f_m(d-1)) per candidate, evaluated lazily in order.
    let check = |d: u64| -> Result<Option<Real>> {
        let h = h_value(d_m, d, p)?;
        if !strictly_greater(&t.eval_real(d, p)?, &h, config.tol)? {
            return Ok(None);
        }
        Ok(strictly_greater(&h, f_m.coeff(d - 1), config.tol)?.then_some(h))
    };
    let found = exec::find_first(config.mode, d_m + 1..=cap, |d| match check(d) {
        Ok(Some(h)) => Some(Ok(h)),
        Ok(None) => None,
        Err(e) => Some(Err(e)),
    });
    match found {
        Some((d, Ok(h))) => Ok((d, h)),
        Some((_, Err(e))) => Err(e),
        None => {
            let mut members = 0u64;
            let mut beats = 0u64;
            for d in d_m + 1..=cap {
                let h = h_value(d_m, d, p)?;
                if strictly_greater(&t.eval_real(d, p)?, &h, config.tol)? {
                    members += 1;
                }
                if strictly_greater(&h, f_m.coeff(d - 1), config.tol)? {
                    beats += 1;
                }
            }
            Err(Error::SearchExhausted {
                after: d_m,
                cap,
                trace: format!(
                    "theta = {theta}: membership held at {members} of {} candidates, \
                     h_m(d) > f_m(d-1) at {beats}, never both",
                    cap - d_m
                ),
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub d: u64,
    #[serde(serialize_with = "ser_real")]
    pub ratio: Real,
}

#[derive(Clone, Debug, Serialize)]
pub struct Coefficient {
    pub n: u64,
    #[serde(serialize_with = "ser_real")]
    pub value: Real,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleResult {
    pub t: SequenceRule,
    #[serde(rename = "M")]
    pub m_cutoff: u64,
    pub order: u64,
    pub precision: Precision,
    pub degrees: Vec<u64>,
    pub stages: Vec<Stage>,
    /// Nonzero coefficients of the final g.
    pub coefficients: Vec<Coefficient>,
    pub violations: Vec<Violation>,
    pub ratio_report: RatioReport,
    #[serde(skip)]
    pub g: Series<Real>,
    #[serde(skip)]
    pub f: Series<Real>,
}

/// Runs `stages` stages of the construction from the prefix `t(1..=M)` and
/// returns the final series truncated at `order`.
pub fn build_counterexample(
    t: &SequenceRule,
    m_cutoff: u64,
    stages: usize,
    order: u64,
    config: &CounterexampleConfig,
) -> Result<CounterexampleResult> {
    if stages < 1 {
        return Err(Error::invalid("at least one stage is required"));
    }
    let p = config.precision;
    let prefix: Vec<Real> = (1..=m_cutoff)
        .map(|n| t.eval_real(n, p))
        .collect::<Result<_>>()?;
    let prefix_gcd = (1..=m_cutoff)
        .filter(|&n| prefix[n as usize - 1].is_positive())
        .fold(0, gcd);
    if prefix_gcd != 1 {
        return Err(Error::invalid(format!(
            "gcd of the support of t on [1, {m_cutoff}] is {prefix_gcd}, not 1"
        )));
    }
    let work = order.max(config.search_cap);
    let mut g = Series::from_fn(work, p, |n| {
        if n >= 1 && n <= m_cutoff {
            prefix[n as usize - 1].clone()
        } else {
            Real::zero(p)
        }
    });
    let mut d = g.degree().expect("gcd 1 support is nonempty");
    let mut f = exp(&g)?;
    let mut out = vec![Stage {
        m: 1,
        d,
        added_coeff: None,
        ratio_at_d: None,
    }];
    for m in 2..=stages as u64 {
        let (next, h) = next_degree(t, d, &f, config)?;
        g = g.map_coeffs(|n, c| if n == next { c.add(&h) } else { c.clone() });
        f = exp(&g)?;
        let ratio = f.coeff(next).div(f.coeff(next - 1));
        out.push(Stage {
            m,
            d: next,
            added_coeff: Some(h),
            ratio_at_d: Some(ratio),
        });
        d = next;
    }
    if d > order {
        return Err(Error::invalid(format!(
            "order {order} is below the last stage degree {d}"
        )));
    }
    let g = g.resized(order);
    let f = f.resized(order);

    for n in 1..=order {
        let tn = t.eval_real(n, p)?;
        if !g.coeff(n).approx_le(&tn) {
            return Err(Error::CheckFailure {
                n,
                detail: format!("g(n) = {} exceeds t(n) = {}", g.coeff(n), tn),
            });
        }
    }
    let mut violations = Vec::new();
    for stage in out.iter().skip(1) {
        let ratio = f.coeff(stage.d).div(f.coeff(stage.d - 1));
        if !strictly_greater(&ratio, &Real::one(p), config.tol)? {
            return Err(Error::CheckFailure {
                n: stage.d,
                detail: format!("f(d)/f(d-1) = {ratio} is not above 1"),
            });
        }
        violations.push(Violation { d: stage.d, ratio });
    }
    let ratio_report = ratio_sequence(&f, 1, &TrendConfig::default())?;
    let coefficients = (1..=order)
        .filter(|&n| g.coeff(n).is_positive())
        .map(|n| Coefficient {
            n,
            value: g.coeff(n).clone(),
        })
        .collect();
    Ok(CounterexampleResult {
        t: t.clone(),
        m_cutoff,
        order,
        precision: p,
        degrees: out.iter().map(|s| s.d).collect(),
        stages: out,
        coefficients,
        violations,
        ratio_report,
        g,
        f,
    })
}
