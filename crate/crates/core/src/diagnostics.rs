//! Ratio-test evidence, support gcd / Frobenius analysis and positivity onset.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeffbox::{Coeff, SequenceRule};
use crate::error::{Error, Result};
use crate::series::{exp, Series};

/// Heuristic label for a finite window of ratios `rho(n) = f(n-1)/f(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Diverging,
    TendingToOne,
    TendingToZero,
    NonMonotone,
    Inconclusive,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Diverging => "diverging",
            Trend::TendingToOne => "tending-to-one",
            Trend::TendingToZero => "tending-to-zero",
            Trend::NonMonotone => "non-monotone",
            Trend::Inconclusive => "inconclusive",
        })
    }
}

/// Thresholds for [`classify_trend`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendConfig {
    /// Growth factor required for `diverging`: final >= kappa * window minimum.
    pub kappa: f64,
    /// Closeness required for `tending-to-one`: final |rho - 1| < delta.
    pub delta: f64,
    pub min_points: usize,
    /// Largest period tried when looking for monotone residue classes.
    pub max_period: u64,
    /// Alternative to `delta`: fitted power-law decay exponent of |rho - 1|.
    pub decay_min: f64,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig {
            kappa: 1.5,
            delta: 0.05,
            min_points: 10,
            max_period: 6,
            decay_min: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub n: u64,
    /// f(n), rendered in the series backend.
    pub f: String,
    pub ratio: Option<f64>,
    pub defined: bool,
}

/// Raw numbers behind a trend label.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrendEvidence {
    pub defined_points: usize,
    pub undefined_points: usize,
    pub first: Option<f64>,
    pub last: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Last-half steps where rho did not increase.
    pub monotone_violations: usize,
    /// Period of the residue classes that were found monotone, if any.
    pub period: Option<u64>,
    /// final / min over the final point's residue class.
    pub growth: Option<f64>,
    /// Fitted exponent a in |rho - 1| ~ n^(-a) over the last half.
    pub decay_exponent: Option<f64>,
    /// Last n where the sign of the ratio increment flipped.
    pub last_flip: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub start: u64,
    pub end: u64,
    pub points: Vec<RatioPoint>,
    /// `None` when there are too few defined points to classify.
    pub trend: Option<Trend>,
    pub evidence: TrendEvidence,
    pub thresholds: TrendConfig,
}

impl RatioReport {
    pub fn ratio_at(&self, n: u64) -> Option<f64> {
        self.points.iter().find(|p| p.n == n).and_then(|p| p.ratio)
    }

    pub fn defined(&self) -> Vec<(u64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.ratio.map(|r| (p.n, r)))
            .collect()
    }
}

/// `rho(n) = f(n-1)/f(n)` for `n` in `[n0, N]`, plus a trend label.
pub fn ratio_sequence<C: Coeff>(
    f: &Series<C>,
    n0: u64,
    config: &TrendConfig,
) -> Result<RatioReport> {
    if n0 < 1 {
        return Err(Error::invalid("ratio window must start at n0 >= 1"));
    }
    let end = f.order();
    if n0 > end {
        return Err(Error::invalid(format!(
            "window start {n0} beyond order {end}"
        )));
    }
    if (n0 - 1..=end).all(|n| f.coeff(n).is_zero()) {
        return Err(Error::EmptyReport { start: n0, end });
    }
    let points: Vec<RatioPoint> = (n0..=end)
        .map(|n| {
            let fnv = f.coeff(n);
            let ratio = fnv.is_positive().then(|| f.coeff(n - 1).div(fnv).to_f64());
            RatioPoint {
                n,
                f: fnv.render(),
                ratio,
                defined: ratio.is_some(),
            }
        })
        .collect();
    let defined: Vec<(u64, f64)> = points
        .iter()
        .filter_map(|p| p.ratio.map(|r| (p.n, r)))
        .collect();
    let (trend, mut evidence) = match classify_trend(&defined, config) {
        Ok(c) => (Some(c.trend), c.evidence),
        Err(_) => (None, basic_evidence(&defined)),
    };
    evidence.undefined_points = points.len() - defined.len();
    Ok(RatioReport {
        start: n0,
        end,
        points,
        trend,
        evidence,
        thresholds: *config,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub trend: Trend,
    pub evidence: TrendEvidence,
}

fn basic_evidence(points: &[(u64, f64)]) -> TrendEvidence {
    TrendEvidence {
        defined_points: points.len(),
        first: points.first().map(|p| p.1),
        last: points.last().map(|p| p.1),
        min: points.iter().map(|p| p.1).reduce(f64::min),
        max: points.iter().map(|p| p.1).reduce(f64::max),
        ..TrendEvidence::default()
    }
}

/// Smallest period `q` for which every residue class of `n mod q` is
/// strictly monotone (in the direction of `cmp`) over `tail`.
fn monotone_period(tail: &[(u64, f64)], max_period: u64, increasing: bool) -> Option<u64> {
    (1..=max_period).find(|&q| {
        let mut classes: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        for &(n, v) in tail {
            classes.entry(n % q).or_default().push(v);
        }
        classes.values().all(|vs| {
            vs.len() >= 2
                && vs
                    .windows(2)
                    .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
        })
    })
}

fn class_values(points: &[(u64, f64)], q: u64, residue: u64) -> impl Iterator<Item = f64> + '_ {
    points
        .iter()
        .filter(move |p| p.0 % q == residue)
        .map(|p| p.1)
}

/// Least-squares slope of ln y against ln n, negated.
fn decay_exponent(points: &[(u64, f64)]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0 && p.0 > 0)
        .map(|p| ((p.0 as f64).ln(), p.1.ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Labels a window of defined ratio points `(n, rho(n))`.
///
/// Rules, in order:
/// * diverging: for the smallest period `q <= max_period`, each residue class
///   mod `q` strictly increases over the last half; the final value exceeds 1
///   and is at least `kappa` times the minimum of its class over the window;
/// * tending-to-zero: the mirror image (decreasing, final < 1, final * kappa
///   at most the class maximum);
/// * tending-to-one: |rho - 1| strictly decreases over the last half and
///   either the final value is below `delta` or the fitted decay exponent is
///   at least `decay_min`;
/// * non-monotone: the sign of rho(n) - rho(n-1) flips after the first
///   quarter of the window;
/// * inconclusive otherwise.
pub fn classify_trend(points: &[(u64, f64)], config: &TrendConfig) -> Result<Classification> {
    if points.len() < config.min_points.max(4) {
        return Err(Error::InsufficientData {
            needed: config.min_points.max(4),
            got: points.len(),
        });
    }
    let mut ev = basic_evidence(points);
    let tail = &points[points.len() / 2..];
    ev.monotone_violations = tail.windows(2).filter(|w| w[1].1 <= w[0].1).count();
    let deltas: Vec<(u64, f64)> = points
        .windows(2)
        .map(|w| (w[1].0, w[1].1 - w[0].1))
        .collect();
    let quarter = points.len() / 4;
    ev.last_flip = deltas
        .windows(2)
        .enumerate()
        .filter(|(i, w)| {
            i + 1 >= quarter && w[0].1 != 0.0 && w[1].1 != 0.0 && (w[0].1 > 0.0) != (w[1].1 > 0.0)
        })
        .map(|(_, w)| w[1].0)
        .next_back();
    let (n_last, last) = *points.last().expect("nonempty");

    if let Some(q) = monotone_period(tail, config.max_period, true) {
        let class_min = class_values(points, q, n_last % q).fold(f64::INFINITY, f64::min);
        ev.period = Some(q);
        ev.growth = (class_min > 0.0).then(|| last / class_min);
        if last > 1.0 && last >= config.kappa * class_min {
            return Ok(Classification {
                trend: Trend::Diverging,
                evidence: ev,
            });
        }
    }
    if let Some(q) = monotone_period(tail, config.max_period, false) {
        let class_max = class_values(points, q, n_last % q).fold(f64::NEG_INFINITY, f64::max);
        ev.period = Some(q);
        ev.growth = (last > 0.0).then(|| last / class_max);
        if last < 1.0 && last * config.kappa <= class_max {
            return Ok(Classification {
                trend: Trend::TendingToZero,
                evidence: ev,
            });
        }
    }
    let dist: Vec<(u64, f64)> = tail.iter().map(|&(n, v)| (n, (v - 1.0).abs())).collect();
    if dist.windows(2).all(|w| w[1].1 < w[0].1) {
        ev.decay_exponent = decay_exponent(&dist);
        let close = dist.last().expect("nonempty").1 < config.delta;
        if close || ev.decay_exponent.is_some_and(|a| a >= config.decay_min) {
            return Ok(Classification {
                trend: Trend::TendingToOne,
                evidence: ev,
            });
        }
    }
    let trend = if ev.last_flip.is_some() {
        Trend::NonMonotone
    } else {
        Trend::Inconclusive
    };
    Ok(Classification {
        trend,
        evidence: ev,
    })
}

/// Largest integer not representable as a nonnegative combination, or a marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrobeniusBound {
    Value(i64),
    NotApplicable,
}

impl Serialize for FrobeniusBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FrobeniusBound::Value(v) => s.serialize_i64(*v),
            FrobeniusBound::NotApplicable => s.serialize_str("not-applicable"),
        }
    }
}

impl<'de> Deserialize<'de> for FrobeniusBound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(FrobeniusBound::Value(v)),
            Raw::Tag(t) if t == "not-applicable" => Ok(FrobeniusBound::NotApplicable),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!(
                "unexpected frobenius value `{t}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportProfile {
    pub window: u64,
    pub support: Vec<u64>,
    pub gcd: u64,
    pub frobenius_bound: FrobeniusBound,
    /// Smallest certified positivity onset, when one exists within the window.
    pub onset_l: Option<u64>,
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Representability table `0..=limit` for nonnegative combinations of `gens`.
pub fn representable(gens: &[u64], limit: u64) -> Vec<bool> {
    let mut table = vec![false; limit as usize + 1];
    table[0] = true;
    for n in 1..=limit as usize {
        table[n] = gens
            .iter()
            .any(|&g| g as usize <= n && table[n - g as usize]);
    }
    table
}

/// Frobenius number of a gcd-1 generating set by dynamic programming; -1
/// when every nonnegative integer is representable.
pub fn frobenius(gens: &[u64]) -> Option<i64> {
    let gens: Vec<u64> = gens.iter().copied().filter(|&g| g > 0).collect();
    if gens.is_empty() || gens.iter().copied().fold(0, gcd) != 1 {
        return None;
    }
    let lo = *gens.iter().min().expect("nonempty");
    if lo == 1 {
        return Some(-1);
    }
    let hi = *gens.iter().max().expect("nonempty");
    // Every n beyond (lo-1)(hi-1)-1 is representable; scan a little past it.
    let limit = (lo - 1) * (hi - 1) + lo;
    let table = representable(&gens, limit);
    Some(table.iter().rposition(|&r| !r).map_or(-1, |i| i as i64))
}

fn profile_from_support(support: Vec<u64>, window: u64) -> Result<SupportProfile> {
    if support.is_empty() {
        return Err(Error::EmptySupport { window });
    }
    let g = support.iter().copied().fold(0, gcd);
    let frobenius_bound = match frobenius(&support) {
        Some(v) => FrobeniusBound::Value(v),
        None => FrobeniusBound::NotApplicable,
    };
    Ok(SupportProfile {
        window,
        support,
        gcd: g,
        frobenius_bound,
        onset_l: None,
    })
}

/// Support profile of a series' coefficients on `1..=window`. The onset
/// field is filled by the smallest certified L within the series order.
pub fn support_gcd<C: Coeff>(g: &Series<C>, window: u64) -> Result<SupportProfile> {
    if window < 1 {
        return Err(Error::invalid("support window must be at least 1"));
    }
    let top = window.min(g.order());
    let support: Vec<u64> = (1..=top).filter(|&n| g.coeff(n).is_positive()).collect();
    let mut profile = profile_from_support(support, window)?;
    if profile.gcd == 1 && g.order() >= 3 {
        profile.onset_l = smallest_certified_onset(g, g.order() - 1)?;
    }
    Ok(profile)
}

/// Support profile of a sequence rule on `1..=window` (no onset search).
pub fn support_gcd_rule(rule: &SequenceRule, window: u64) -> Result<SupportProfile> {
    if window < 1 {
        return Err(Error::invalid("support window must be at least 1"));
    }
    let mut support = Vec::new();
    for n in 1..=window {
        let positive = if rule.is_exact() {
            rule.eval_exact(n)?.is_positive()
        } else {
            rule.eval_real(n, crate::Precision(64))?.is_positive()
        };
        if positive {
            support.push(n);
        }
    }
    profile_from_support(support, window)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnsetVerdict {
    Certified,
    WindowOnly,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnsetReport {
    pub l: u64,
    pub verdict: OnsetVerdict,
    pub low_support: Vec<u64>,
    pub low_gcd: u64,
    pub frobenius_bound: FrobeniusBound,
    pub window_end: u64,
    /// First n > L in the window where the truncated exp is not positive.
    pub witness: Option<u64>,
    pub detail: String,
}

/// Checks that `[x^n] exp(g(1)x + ... + g(L)x^L) > 0` for every `n > L`.
///
/// Certified when the window check passes, the low coefficients are
/// nonnegative with gcd 1, the Frobenius bound is at most L, and the window
/// reaches at least frobenius + L.
pub fn positivity_onset<C: Coeff>(g: &Series<C>, l: u64) -> Result<OnsetReport> {
    if l < 2 {
        return Err(Error::invalid(format!(
            "onset candidate must be >= 2, got {l}"
        )));
    }
    let order = g.order();
    let zero = C::zero(g.ctx());
    let low = g.map_coeffs(|n, c| {
        if n >= 1 && n <= l {
            c.clone()
        } else {
            zero.clone()
        }
    });
    let low_support: Vec<u64> = (1..=l.min(order))
        .filter(|&n| low.coeff(n).is_positive())
        .collect();
    let low_gcd = low_support.iter().copied().fold(0, gcd);
    let frob = frobenius(&low_support);
    let frobenius_bound = frob.map_or(FrobeniusBound::NotApplicable, FrobeniusBound::Value);
    let mut report = OnsetReport {
        l,
        verdict: OnsetVerdict::Fails,
        low_support,
        low_gcd,
        frobenius_bound,
        window_end: order,
        witness: None,
        detail: String::new(),
    };
    let f0 = exp(&low)?;
    report.witness = (l + 1..=order).find(|&n| !f0.coeff(n).is_positive());
    if low_gcd != 1 {
        report.witness = report.witness.or(Some(l + 1));
        report.detail = format!("gcd of low-part support is {low_gcd}");
        return Ok(report);
    }
    if let Some(n) = report.witness {
        report.detail = format!("coefficient {n} of the truncated exp is not positive");
        return Ok(report);
    }
    let nonneg = (1..=l.min(order)).all(|n| low.coeff(n).signum() != std::cmp::Ordering::Less);
    let frob = frob.expect("gcd 1 support has a Frobenius number");
    if nonneg && frob <= l as i64 && order as i64 >= frob + l as i64 && order > l {
        report.verdict = OnsetVerdict::Certified;
        report.detail = format!("positive on ({l}, {order}] and every n > {frob} is representable");
    } else {
        report.verdict = OnsetVerdict::WindowOnly;
        report.detail = format!("positive on ({l}, {order}] only; Frobenius bound {frob}");
    }
    Ok(report)
}

/// Smallest `L` in `[2, max_l]` with a certified onset.
pub fn smallest_certified_onset<C: Coeff>(g: &Series<C>, max_l: u64) -> Result<Option<u64>> {
    for l in 2..=max_l {
        if positivity_onset(g, l)?.verdict == OnsetVerdict::Certified {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffbox::Rational;
    use crate::series::euler_product;
    use proptest::prelude::*;

    fn ints(v: &[i64], order: u64) -> Series<Rational> {
        Series::from_ints(v).resized(order)
    }

    #[test]
    fn exp_x_ratios_are_n() {
        let f = exp(&ints(&[0, 1], 100)).unwrap();
        let r = ratio_sequence(&f, 2, &TrendConfig::default()).unwrap();
        for p in &r.points {
            assert_eq!(p.ratio, Some(p.n as f64));
        }
        assert_eq!(r.trend, Some(Trend::Diverging));
    }

    #[test]
    fn partition_ratios_tend_to_one() {
        let a = euler_product(&SequenceRule::ConstantOne, 60).unwrap();
        let r = ratio_sequence(&a, 2, &TrendConfig::default()).unwrap();
        let rho30 = r.ratio_at(30).unwrap();
        assert!((rho30 - 4565.0 / 5604.0).abs() < 1e-15);
        assert_eq!(r.trend, Some(Trend::TendingToOne));
        assert!(r.evidence.decay_exponent.unwrap() > 0.25);
    }

    #[test]
    fn undefined_points_are_recorded() {
        let f = exp(&ints(&[0, 0, 1], 12)).unwrap();
        let r = ratio_sequence(&f, 1, &TrendConfig::default()).unwrap();
        let undefined: Vec<u64> = r
            .points
            .iter()
            .filter(|p| !p.defined)
            .map(|p| p.n)
            .collect();
        assert_eq!(undefined, vec![1, 3, 5, 7, 9, 11]);
        assert_eq!(r.evidence.undefined_points, 6);
    }

    #[test]
    fn empty_window_is_an_error() {
        let f: Series<Rational> = Series::zero(10, ());
        assert!(matches!(
            ratio_sequence(&f, 1, &TrendConfig::default()),
            Err(Error::EmptyReport { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let cfg = TrendConfig::default();
        let lin: Vec<(u64, f64)> = (2..=100).map(|n| (n, n as f64)).collect();
        assert_eq!(classify_trend(&lin, &cfg).unwrap().trend, Trend::Diverging);

        let inv: Vec<(u64, f64)> = (2..=100).map(|n| (n, 1.0 / n as f64)).collect();
        assert_eq!(
            classify_trend(&inv, &cfg).unwrap().trend,
            Trend::TendingToZero
        );

        let wobble: Vec<(u64, f64)> = (1..=40).map(|n| (n, 2.0 + (n % 2) as f64)).collect();
        assert_eq!(
            classify_trend(&wobble, &cfg).unwrap().trend,
            Trend::NonMonotone
        );

        let flat: Vec<(u64, f64)> = (1..=40).map(|n| (n, 2.0)).collect();
        assert_eq!(
            classify_trend(&flat, &cfg).unwrap().trend,
            Trend::Inconclusive
        );

        let short: Vec<(u64, f64)> = (1..=5).map(|n| (n, n as f64)).collect();
        assert!(matches!(
            classify_trend(&short, &cfg),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn periodic_growth_is_diverging() {
        let cfg = TrendConfig::default();
        let pts: Vec<(u64, f64)> = (1..=90)
            .map(|n| (n, n as f64 * [1.0, 0.2, 3.0][(n % 3) as usize]))
            .collect();
        let c = classify_trend(&pts, &cfg).unwrap();
        assert_eq!(c.trend, Trend::Diverging);
        assert_eq!(c.evidence.period, Some(3));
    }

    #[test]
    fn support_examples() {
        let p = support_gcd(&ints(&[0, 0, 1, 1], 30), 30).unwrap();
        assert_eq!((p.gcd, p.frobenius_bound), (1, FrobeniusBound::Value(1)));
        assert_eq!(p.support, vec![2, 3]);

        let p = support_gcd(&ints(&[0, 0, 1, 0, 1], 30), 30).unwrap();
        assert_eq!(
            (p.gcd, p.frobenius_bound),
            (2, FrobeniusBound::NotApplicable)
        );

        let mut v = vec![0i64; 16];
        for k in [6, 10, 15] {
            v[k] = 1;
        }
        let p = support_gcd(&ints(&v, 60), 60).unwrap();
        assert_eq!((p.gcd, p.frobenius_bound), (1, FrobeniusBound::Value(29)));

        assert!(matches!(
            support_gcd(&ints(&[0], 10), 10),
            Err(Error::EmptySupport { .. })
        ));
        assert_eq!(
            serde_json::to_string(&FrobeniusBound::NotApplicable).unwrap(),
            "\"not-applicable\""
        );
    }

    #[test]
    fn onset_examples() {
        let r = positivity_onset(&ints(&[0, 0, 1, 1], 20), 3).unwrap();
        assert_eq!(r.verdict, OnsetVerdict::Certified);
        let r = positivity_onset(&ints(&[0, 1], 20), 2).unwrap();
        assert_eq!(r.verdict, OnsetVerdict::Certified);
        let r = positivity_onset(&ints(&[0, 0, 1, 0, 1], 20), 4).unwrap();
        assert_eq!(r.verdict, OnsetVerdict::Fails);
        assert_eq!(r.witness, Some(5));
        assert!(positivity_onset(&ints(&[0, 1], 20), 1).is_err());

        // {3, 5}: Frobenius 7, so L = 7 is the first certified onset.
        let g = ints(&[0, 0, 0, 1, 0, 1], 40);
        assert_eq!(smallest_certified_onset(&g, 39).unwrap(), Some(7));
        assert_eq!(
            positivity_onset(&g, 6).unwrap().verdict,
            OnsetVerdict::Fails
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn frobenius_table_is_sharp(gens in proptest::collection::btree_set(2u64..12, 1..4)) {
            let gens: Vec<u64> = gens.into_iter().collect();
            if let Some(f) = frobenius(&gens) {
                let table = representable(&gens, f as u64 + 40);
                prop_assert!(!table[f as usize]);
                prop_assert!(table[f as usize + 1..].iter().all(|&r| r));
            } else {
                prop_assert!(gens.iter().copied().fold(0, gcd) != 1);
            }
        }

        #[test]
        fn positivity_beyond_frobenius(gens in proptest::collection::btree_set(1u64..9, 1..4)) {
            let gens: Vec<u64> = gens.into_iter().collect();
            prop_assume!(gens.iter().copied().fold(0, gcd) == 1);
            let f_bound = frobenius(&gens).unwrap();
            let order = (f_bound + 20).max(10) as u64;
            let g = Series::from_fn(order, (), |n| {
                if gens.contains(&n) { Rational::ONE } else { Rational::ZERO }
            });
            let f = exp(&g).unwrap();
            for n in (f_bound + 1) as u64..=order {
                prop_assert!(f.coeff(n).is_positive());
            }
            if f_bound >= 0 {
                prop_assert!(f.coeff(f_bound as u64).is_zero());
            }
        }

        #[test]
        fn classification_is_deterministic(vals in proptest::collection::vec(0.01f64..10.0, 10..40)) {
            let pts: Vec<(u64, f64)> = vals.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v)).collect();
            let cfg = TrendConfig::default();
            prop_assert_eq!(classify_trend(&pts, &cfg).unwrap(), classify_trend(&pts, &cfg).unwrap());
        }
    }
}
