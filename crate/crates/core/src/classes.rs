//! Adequate classes given by component counts: total counts through the
//! labelled and unlabelled fundamental equations, and numeric 0-1 law criteria.

use std::collections::BTreeMap;
use std::fmt;

use dashu::integer::UBig;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coeffbox::{factorial, ln_ubig, Builtin, Coeff, Rational, SequenceRule};
use crate::diagnostics::{classify_trend, gcd, ratio_sequence, Trend, TrendConfig};
use crate::error::{Error, Result};
use crate::series::{egf_count, euler_product, exp, rational_to_ubig, Series};

/// An adequate class described by its connected-component counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub name: String,
    /// Labelled connected structures of each size.
    #[serde(rename = "p_L", default, skip_serializing_if = "Option::is_none")]
    pub p_l: Option<SequenceRule>,
    /// Unlabelled connected structures of each size.
    #[serde(rename = "p_U", default, skip_serializing_if = "Option::is_none")]
    pub p_u: Option<SequenceRule>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    /// Caveats copied into every verdict for this class.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "unary-predicates",
    "height1-forests",
    "finitely-many-components",
    "equivalence-relations",
    "selection-partitions",
    "broom",
];

fn ones_from(start: u64) -> SequenceRule {
    SequenceRule::Shifted {
        inner: Box::new(SequenceRule::ConstantOne),
        by: start,
    }
}

fn identity_from_one() -> SequenceRule {
    SequenceRule::Polynomial {
        coeffs: vec![Rational::ZERO, Rational::ONE],
    }
}

impl ClassSpec {
    fn new(name: &str, p_l: SequenceRule, p_u: SequenceRule) -> Self {
        ClassSpec {
            name: name.into(),
            p_l: Some(p_l),
            p_u: Some(p_u),
            params: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// A registered class by name. `finitely-many-components` uses sizes {1, 2}.
    pub fn builtin(name: &str) -> Result<Self> {
        Ok(match name {
            "unary-predicates" => {
                let single = SequenceRule::BinarySupport {
                    support: [1].into(),
                };
                ClassSpec::new(name, single.clone(), single)
            }
            "height1-forests" => ClassSpec::new(name, identity_from_one(), ones_from(1)),
            "finitely-many-components" => ClassSpec::finitely_many_components(&[1, 2])?,
            "equivalence-relations" => ClassSpec::new(name, ones_from(1), ones_from(1)),
            "selection-partitions" => ClassSpec::new(
                name,
                SequenceRule::Builtin(Builtin::SelectionPartitions),
                identity_from_one(),
            ),
            "broom" => {
                let mut spec = ClassSpec::new(
                    name,
                    SequenceRule::Builtin(Builtin::BroomLabelled),
                    SequenceRule::Builtin(Builtin::BroomUnlabelled),
                );
                spec.notes.push(
                    "the literature value 2^(1/3) for the unlabelled radius is the reciprocal \
                     of the radius of sum 2^n x^(3n), which is 2^(-1/3)"
                        .into(),
                );
                spec
            }
            _ => return Err(Error::UnknownClass(name.into())),
        })
    }

    /// One rigid component type of each listed size, on both sides.
    pub fn finitely_many_components(sizes: &[u64]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::invalid(
                "component sizes must be a nonempty list of positive sizes",
            ));
        }
        let support: std::collections::BTreeSet<u64> = sizes.iter().copied().collect();
        let rule = SequenceRule::BinarySupport {
            support: support.clone(),
        };
        let mut spec = ClassSpec::new("finitely-many-components", rule.clone(), rule);
        spec.params.insert("sizes".into(), json!(support));
        Ok(spec)
    }

    pub fn p_l(&self) -> Result<&SequenceRule> {
        self.p_l
            .as_ref()
            .ok_or_else(|| Error::NotApplicable(format!("{} has no labelled counts", self.name)))
    }

    pub fn p_u(&self) -> Result<&SequenceRule> {
        self.p_u
            .as_ref()
            .ok_or_else(|| Error::NotApplicable(format!("{} has no unlabelled counts", self.name)))
    }
}

/// Colors the elements of every structure with `r` colors. Only the
/// labelled side is transformed; the unlabelled side is dropped because
/// color symmetries make it depend on more than `p_U`.
pub fn color_wrapper(spec: &ClassSpec, r: u64) -> Result<ClassSpec> {
    if r < 1 {
        return Err(Error::invalid("color count must be at least 1"));
    }
    if r == 1 {
        return Ok(spec.clone());
    }
    let p_l = SequenceRule::Product {
        factors: vec![spec.p_l()?.clone(), SequenceRule::geometric(1, r as i64)],
    };
    let mut params = spec.params.clone();
    params.insert("colors".into(), json!(r));
    Ok(ClassSpec {
        name: format!("{}-colored-{r}", spec.name),
        p_l: Some(p_l),
        p_u: None,
        params,
        notes: spec.notes.clone(),
    })
}

fn integer_counts(rule: &SequenceRule, order: u64, what: &str) -> Result<Vec<UBig>> {
    (0..=order)
        .map(|n| {
            let v = rule.eval_exact(n)?;
            rational_to_ubig(&v).ok_or_else(|| {
                Error::invalid(format!("{what}({n}) = {v} is not a nonnegative integer"))
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Totals {
    /// `a(n)/n!` on the labelled side, `a(n)` on the unlabelled side.
    pub series: Series<Rational>,
    pub counts: Vec<UBig>,
}

/// `A_L = exp(sum_{n>=1} p_L(n) x^n / n!)` and the integers `a_L(n)`.
pub fn labelled_totals(spec: &ClassSpec, order: u64) -> Result<Totals> {
    let p = integer_counts(spec.p_l()?, order, "p_L")?;
    let g = Series::from_fn(order, (), |n| {
        if n == 0 {
            Rational::ZERO
        } else {
            Rational::from(p[n as usize].clone()) / Rational::from(factorial(n))
        }
    });
    let series = exp(&g)?;
    let counts = (0..=order)
        .map(|n| {
            let c = series.coeff(n);
            egf_count(c, n)
                .and_then(|v| UBig::try_from(v).ok())
                .ok_or_else(|| Error::IntegralityFailure {
                    n,
                    value: c.render(),
                })
        })
        .collect::<Result<_>>()?;
    Ok(Totals { series, counts })
}

/// `A_U = prod_j (1 - x^j)^(-p_U(j))` and its integer coefficients.
pub fn unlabelled_totals(spec: &ClassSpec, order: u64) -> Result<Totals> {
    let series = euler_product(spec.p_u()?, order)?;
    let counts = series.nonnegative_integers()?;
    Ok(Totals { series, counts })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Labelled,
    Unlabelled,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Labelled => "labelled",
            Side::Unlabelled => "unlabelled",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Sub-factorial component growth plus the shift test on `a_L(n)/n!`.
    #[serde(rename = "compton-labelled")]
    ComptonLabelled,
    #[serde(rename = "bell-poly-bounded")]
    BellPolyBounded,
    #[serde(rename = "bateman-erdos")]
    BatemanErdos,
    #[serde(rename = "schur-finitely-generated")]
    SchurFinitelyGenerated,
    #[serde(rename = "radius-in-(0,1)")]
    RadiusInUnitInterval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    HoldsByCriterion,
    FailsByCriterion,
    Inconclusive,
}

/// The verdict of one criterion with the finite evidence it rests on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawVerdict {
    pub class: String,
    pub side: Side,
    pub criterion: Criterion,
    pub verdict: VerdictKind,
    pub order: u64,
    pub evidence: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassConfig {
    pub trend: TrendConfig,
    /// Largest on-window growth exponent accepted for the labelled hypothesis.
    pub theta_max: f64,
    /// How many of the smallest component sizes enter the shift test.
    pub shift_sizes: usize,
    /// Largest log-log slope of `p_U` still called polynomially bounded.
    pub poly_slope_max: f64,
    /// A radius counts as bounded away from 1 when estimate + band is below this.
    pub radius_cutoff: f64,
    /// Order used for the root test on `p_U`.
    pub radius_order: u64,
}

impl Default for ClassConfig {
    fn default() -> Self {
        ClassConfig {
            trend: TrendConfig::default(),
            theta_max: 0.95,
            shift_sizes: 3,
            poly_slope_max: 8.0,
            radius_cutoff: 0.98,
            radius_order: 600,
        }
    }
}

fn tail_window(order: u64) -> (u64, u64) {
    ((order / 2).max(2), order)
}

/// `log p(n) / (n log n)` for `n >= 2` with `p(n) > 0`.
pub fn growth_exponents(counts: &[UBig], lo: u64, hi: u64) -> Vec<(u64, f64)> {
    (lo.max(2)..=hi)
        .filter(|&n| counts[n as usize] > UBig::ZERO)
        .map(|n| {
            (
                n,
                ln_ubig(&counts[n as usize]) / (n as f64 * (n as f64).ln()),
            )
        })
        .collect()
}

fn ratio_points(f: &Series<Rational>, k: u64) -> Vec<(u64, f64)> {
    (k + 1..=f.order())
        .filter(|&n| f.coeff(n).is_positive() && f.coeff(n - k).is_positive())
        .map(|n| (n, Coeff::to_f64(&f.coeff(n - k).div(f.coeff(n)))))
        .collect()
}

fn verdict_evidence(pairs: Vec<(&str, Value)>) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Labelled criterion: if `p_L(n) = O(n^(theta n))` on the window for some
/// `theta <= theta_max`, `a_L(n)/n!` must satisfy `f(n-k)/f(n) -> infinity`
/// for the smallest component sizes `k`.
pub fn labelled_01_verdict(
    spec: &ClassSpec,
    order: u64,
    config: &ClassConfig,
) -> Result<LawVerdict> {
    let p = integer_counts(spec.p_l()?, order, "p_L")?;
    let totals = labelled_totals(spec, order)?;
    let (lo, hi) = tail_window(order);
    let exponents = growth_exponents(&p, lo, hi);
    let theta_hat = exponents
        .iter()
        .map(|e| e.1)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let exponent_increasing = exponents.windows(2).any(|w| w[1].1 > w[0].1 + 1e-12);
    let hypothesis = theta_hat.is_none_or(|t| t <= config.theta_max) && !exponent_increasing;

    let ratio = ratio_sequence(&totals.series, 1, &config.trend)?;
    let sizes: Vec<u64> = (1..=order)
        .filter(|&k| p[k as usize] > UBig::ZERO)
        .take(config.shift_sizes)
        .collect();
    let mut shifts = BTreeMap::new();
    let mut shifts_diverge = !sizes.is_empty();
    for &k in &sizes {
        let pts = ratio_points(&totals.series, k);
        let trend = classify_trend(&pts, &config.trend).map(|c| c.trend).ok();
        shifts_diverge &= trend == Some(Trend::Diverging);
        shifts.insert(
            k.to_string(),
            json!({
                "trend": trend,
                "last": pts.last().map(|p| json!({"n": p.0, "ratio": p.1})),
            }),
        );
    }
    let verdict = if hypothesis && shifts_diverge && ratio.trend == Some(Trend::Diverging) {
        VerdictKind::HoldsByCriterion
    } else {
        VerdictKind::Inconclusive
    };
    let mut flags = spec.notes.clone();
    if !hypothesis {
        flags.push("growth hypothesis not met on the window; no claim".into());
    }
    Ok(LawVerdict {
        class: spec.name.clone(),
        side: Side::Labelled,
        criterion: Criterion::ComptonLabelled,
        verdict,
        order,
        evidence: verdict_evidence(vec![
            ("exponent_window", json!([lo, hi])),
            ("theta_hat", json!(theta_hat)),
            ("theta_max", json!(config.theta_max)),
            ("exponent_increasing", json!(exponent_increasing)),
            ("exponents", json!(exponents)),
            ("ratio_trend", json!(ratio.trend)),
            (
                "ratio_evidence",
                serde_json::to_value(&ratio.evidence).expect("plain data"),
            ),
            ("shift_tests", json!(shifts)),
        ]),
        flags,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Root-test radius estimate with a band from the spread between window halves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub band: f64,
    pub window: (u64, u64),
    pub first_half: f64,
    pub second_half: f64,
}

/// `1 / max a(n)^(1/n)` over the tail window `[N/2, N]`.
pub fn radius_estimate(a: &[UBig]) -> Result<RadiusEstimate> {
    let logs: Vec<Option<f64>> = a
        .iter()
        .map(|v| (*v > UBig::ZERO).then(|| ln_ubig(v)))
        .collect();
    radius_from_logs(&logs)
}

/// [`radius_estimate`] for series coefficients, e.g. `a_L(n)/n!`.
pub fn radius_estimate_series<C: Coeff>(s: &Series<C>) -> Result<RadiusEstimate> {
    let logs: Vec<Option<f64>> = s
        .coeffs()
        .iter()
        .map(|c| c.is_positive().then(|| c.ln_f64()))
        .collect();
    radius_from_logs(&logs)
}

fn radius_from_logs(logs: &[Option<f64>]) -> Result<RadiusEstimate> {
    let order = logs.len().saturating_sub(1) as u64;
    let (lo, hi) = tail_window(order);
    let mid = lo + (hi - lo) / 2;
    let root = |from: u64, to: u64| -> Option<f64> {
        (from.max(1)..=to)
            .filter_map(|n| logs[n as usize].map(|l| l / n as f64))
            .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
            .map(|l| (-l).exp())
    };
    let radius = root(lo, hi)
        .ok_or_else(|| Error::NotApplicable(format!("no nonzero coefficient on [{lo}, {hi}]")))?;
    let first_half = root(lo, mid).unwrap_or(radius);
    let second_half = root(mid + 1, hi).unwrap_or(radius);
    Ok(RadiusEstimate {
        radius,
        band: (first_half - second_half).abs(),
        window: (lo, hi),
        first_half,
        second_half,
    })
}

/// [`radius_estimate`] on the values of an integer-valued rule.
pub fn radius_estimate_rule(rule: &SequenceRule, order: u64) -> Result<RadiusEstimate> {
    radius_estimate(&integer_counts(rule, order, "a")?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurFit {
    /// Number of connected unlabelled structures.
    pub r: u64,
    /// `a_U(N) / N^(r-1)`.
    pub c_fit: f64,
    /// `1 / ((r-1)! prod_j j^(p_U(j)))`.
    pub c_limit: f64,
    pub window: (u64, u64),
    /// `a_U(n)/n^(r-1) - c_limit` on the window.
    pub residuals: Vec<(u64, f64)>,
    pub drift_first: f64,
    pub drift_last: f64,
    pub shrinking: bool,
}

/// Polynomial growth `a_U(n) ~ C n^(r-1)` for finitely many component types.
pub fn schur_fit(spec: &ClassSpec, order: u64) -> Result<SchurFit> {
    let rule = spec.p_u()?;
    let p = integer_counts(rule, order, "p_U")?;
    let (lo, hi) = tail_window(order);
    if (lo + 1..=hi).any(|n| p[n as usize] > UBig::ZERO) {
        return Err(Error::NotApplicable(format!(
            "p_U is nonzero beyond {lo}; support is not finite on the window"
        )));
    }
    let support: Vec<u64> = (1..=lo).filter(|&n| p[n as usize] > UBig::ZERO).collect();
    let g = support.iter().fold(0, |acc, &n| gcd(acc, n));
    if g != 1 {
        return Err(Error::PreconditionViolation(format!(
            "gcd of the component sizes is {g}, not 1"
        )));
    }
    let r: u64 = support
        .iter()
        .map(|&n| u64::try_from(&p[n as usize]).expect("small component counts"))
        .sum();
    let log_denominator = (1..r).map(|k| (k as f64).ln()).sum::<f64>()
        + support
            .iter()
            .map(|&n| (u64::try_from(&p[n as usize]).expect("small") as f64) * (n as f64).ln())
            .sum::<f64>();
    let c_limit = (-log_denominator).exp();
    let a = unlabelled_totals(spec, order)?.counts;
    let scaled = |n: u64| (ln_ubig(&a[n as usize]) - (r - 1) as f64 * (n as f64).ln()).exp();
    let residuals: Vec<(u64, f64)> = (lo..=hi).map(|n| (n, scaled(n) - c_limit)).collect();
    let half = residuals.len() / 2;
    let mean_abs =
        |s: &[(u64, f64)]| s.iter().map(|x| x.1.abs()).sum::<f64>() / s.len().max(1) as f64;
    let drift_first = mean_abs(&residuals[..half]);
    let drift_last = mean_abs(&residuals[half..]);
    Ok(SchurFit {
        r,
        c_fit: scaled(order),
        c_limit,
        window: (lo, hi),
        residuals,
        drift_first,
        drift_last,
        shrinking: drift_last <= drift_first,
    })
}

/// Unlabelled criteria in a fixed order: polynomially bounded `p_U`,
/// `{0,1}`-valued `p_U`, finite support, and finally the radius rule.
pub fn unlabelled_01_verdict(
    spec: &ClassSpec,
    order: u64,
    config: &ClassConfig,
) -> Result<LawVerdict> {
    let rule = spec.p_u()?;
    let p = integer_counts(rule, order, "p_U")?;
    let totals = unlabelled_totals(spec, order)?;
    let ratio = ratio_sequence(&totals.series, 1, &config.trend)?;
    let (lo, hi) = tail_window(order);
    let mut evidence = verdict_evidence(vec![
        ("ratio_trend", json!(ratio.trend)),
        (
            "ratio_evidence",
            serde_json::to_value(&ratio.evidence).expect("plain data"),
        ),
        ("a_U_last", json!(totals.counts[order as usize].to_string())),
    ]);
    let mut flags = spec.notes.clone();
    let done = |criterion, verdict, evidence, flags| LawVerdict {
        class: spec.name.clone(),
        side: Side::Unlabelled,
        criterion,
        verdict,
        order,
        evidence,
        flags,
    };

    let tail: Vec<u64> = (lo..=hi).filter(|&n| p[n as usize] > UBig::ZERO).collect();
    if !tail.is_empty() {
        let pts: Vec<(f64, f64)> = tail
            .iter()
            .map(|&n| ((n as f64).ln(), ln_ubig(&p[n as usize])))
            .collect();
        let mid = pts.len() / 2;
        let slope_first = least_squares_slope(&pts[..mid.max(2).min(pts.len())]);
        let slope_last = least_squares_slope(&pts[mid.min(pts.len().saturating_sub(2))..]);
        let slope = least_squares_slope(&pts);
        evidence.insert(
            "log_log_slope".into(),
            json!({"all": slope, "first_half": slope_first, "last_half": slope_last}),
        );
        let bounded = match (slope, slope_first, slope_last) {
            (Some(s), Some(a), Some(b)) => s <= config.poly_slope_max && b <= a + 0.05,
            _ => pts.iter().all(|p| p.1 == pts[0].1),
        };
        if bounded {
            return Ok(done(
                Criterion::BellPolyBounded,
                VerdictKind::HoldsByCriterion,
                evidence,
                flags,
            ));
        }
        let binary = (1..=order).all(|n| p[n as usize] <= UBig::ONE);
        let support_gcd = (1..=order)
            .filter(|&n| p[n as usize] > UBig::ZERO)
            .fold(0, gcd);
        if binary {
            evidence.insert("support_gcd".into(), json!(support_gcd));
            let verdict = if support_gcd == 1 {
                VerdictKind::HoldsByCriterion
            } else {
                VerdictKind::Inconclusive
            };
            return Ok(done(Criterion::BatemanErdos, verdict, evidence, flags));
        }
    } else {
        match schur_fit(spec, order) {
            Ok(fit) => {
                let verdict = if fit.shrinking {
                    VerdictKind::HoldsByCriterion
                } else {
                    VerdictKind::Inconclusive
                };
                evidence.insert(
                    "schur".into(),
                    serde_json::to_value(&fit).expect("plain data"),
                );
                return Ok(done(
                    Criterion::SchurFinitelyGenerated,
                    verdict,
                    evidence,
                    flags,
                ));
            }
            Err(Error::PreconditionViolation(msg)) => {
                flags.push(msg);
                return Ok(done(
                    Criterion::SchurFinitelyGenerated,
                    VerdictKind::Inconclusive,
                    evidence,
                    flags,
                ));
            }
            Err(e) => return Err(e),
        }
    }

    let est = radius_estimate_rule(rule, order.max(config.radius_order))?;
    evidence.insert(
        "radius".into(),
        serde_json::to_value(&est).expect("plain data"),
    );
    if let Ok(a_est) = radius_estimate(&totals.counts) {
        evidence.insert(
            "radius_of_totals".into(),
            serde_json::to_value(&a_est).expect("plain data"),
        );
    }
    let verdict = if est.radius > 0.0 && est.radius + est.band < config.radius_cutoff {
        VerdictKind::FailsByCriterion
    } else {
        VerdictKind::Inconclusive
    };
    Ok(done(
        Criterion::RadiusInUnitInterval,
        verdict,
        evidence,
        flags,
    ))
}
