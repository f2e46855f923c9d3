//! Splitting `G = G0 + G1`, the `C_r` bounds, the two ratio lemmas and the
//! end-to-end demonstration for `g(n) = O(n^(theta n)/n!)`.

use serde::{Deserialize, Serialize};

use crate::coeffbox::{factorial, ln_ubig, Coeff, Rational, SequenceRule};
use crate::diagnostics::{
    gcd, ratio_sequence, smallest_certified_onset, RatioReport, Trend, TrendConfig,
};
use crate::error::{Error, Result};
use crate::series::{exp, mul, split_at, Series, SplitPair};

/// `g` split at `ell`, with all the exponentials the lemmas talk about.
#[derive(Clone, Debug)]
pub struct Decomposition<C: Coeff> {
    pub g: Series<C>,
    pub l: u64,
    pub split: SplitPair<C>,
    pub f0: Series<C>,
    pub f1: Series<C>,
    pub f: Series<C>,
}

impl<C: Coeff> Decomposition<C> {
    pub fn order(&self) -> u64 {
        self.g.order()
    }

    /// Whether `f0 * f1 = f` holds coefficientwise.
    pub fn convolution_holds(&self) -> Result<bool> {
        Ok(mul(&self.f0, &self.f1)? == self.f)
    }
}

/// Splits `g` at `ell > l` and computes `f0 = exp(G0)`, `f1 = exp(G1)`, `f = exp(G)`.
pub fn decompose<C: Coeff>(g: &Series<C>, l: u64, ell: u64) -> Result<Decomposition<C>> {
    if ell <= l {
        return Err(Error::PreconditionViolation(format!(
            "split degree {ell} must exceed the onset L = {l}"
        )));
    }
    let split = split_at(g, ell)?;
    Ok(Decomposition {
        f0: exp(&split.low)?,
        f1: exp(&split.high)?,
        f: exp(g)?,
        g: g.clone(),
        l,
        split,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct CrBound<C: Coeff> {
    pub r: i64,
    #[serde(serialize_with = "crate::coeffbox::serialize_coeff")]
    pub c_r: C,
    /// Window index attaining the maximum; `None` when g vanishes on the window.
    pub argmax_n: Option<u64>,
    pub window: (u64, u64),
}

fn check_r(r: i64) -> Result<()> {
    if r < -1 {
        Err(Error::invalid(format!("shift r must be >= -1, got {r}")))
    } else {
        Ok(())
    }
}

/// `C_r = max n g(n) / f0(n + r)` over `n` in `[max(1, L+1-r), N - max(r, 0)]`.
pub fn cr_bound<C: Coeff>(dec: &Decomposition<C>, r: i64) -> Result<CrBound<C>> {
    check_r(r)?;
    let lo = (dec.l as i64 + 1 - r).max(1) as u64;
    let hi = dec.order() as i64 - r.max(0);
    if hi < lo as i64 {
        return Err(Error::invalid(format!("empty C_r window [{lo}, {hi}]")));
    }
    let hi = hi as u64;
    let ctx = dec.g.ctx();
    let mut c_r = C::zero(ctx);
    let mut argmax_n = None;
    for n in lo..=hi {
        let idx = (n as i64 + r) as u64;
        let denom = dec.f0.coeff(idx);
        if !denom.is_positive() {
            return Err(Error::OnsetViolation { index: idx });
        }
        let q = dec.g.coeff(n).mul_int(n as i64).div(denom);
        if q.sub(&c_r).is_positive() {
            c_r = q;
            argmax_n = Some(n);
        }
    }
    // Re-assert the defining inequality independently of the max search.
    for n in lo..=hi {
        let idx = (n as i64 + r) as u64;
        let lhs = dec.g.coeff(n).mul_int(n as i64);
        if !lhs.approx_le(&c_r.mul(dec.f0.coeff(idx))) {
            return Err(Error::CheckFailure {
                n,
                detail: format!("n g(n) exceeds C_{r} f0(n+r)"),
            });
        }
    }
    Ok(CrBound {
        r,
        c_r,
        argmax_n,
        window: (lo, hi),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct Lemma31Report<C: Coeff> {
    pub r: i64,
    /// Indices n checked, `1 <= n <= N - max(r, 0)`.
    pub checked: u64,
    #[serde(serialize_with = "crate::coeffbox::serialize_coeff")]
    pub max_quotient: C,
    pub argmax_n: Option<u64>,
    /// Always zero when the function returns `Ok`.
    pub violations: usize,
}

/// Checks `n f1(n) <= C_r f(n + r)` at every index of the order.
pub fn lemma31_check<C: Coeff>(
    dec: &Decomposition<C>,
    cr: &CrBound<C>,
) -> Result<Lemma31Report<C>> {
    check_r(cr.r)?;
    let r = cr.r;
    let top = dec.order() as i64 - r.max(0);
    let ctx = dec.g.ctx();
    let mut max_quotient = C::zero(ctx);
    let mut argmax_n = None;
    let mut checked = 0;
    for n in 1..=top.max(0) as u64 {
        let idx = (n as i64 + r) as u64;
        let lhs = dec.f1.coeff(n).mul_int(n as i64);
        let rhs_f = dec.f.coeff(idx);
        if !lhs.approx_le(&cr.c_r.mul(rhs_f)) {
            return Err(Error::CheckFailure {
                n,
                detail: format!(
                    "n f1(n) = {} exceeds C_{r} f(n{r:+}) = {}",
                    lhs.render(),
                    cr.c_r.mul(rhs_f).render()
                ),
            });
        }
        checked += 1;
        if rhs_f.is_positive() {
            let q = lhs.div(rhs_f);
            if q.sub(&max_quotient).is_positive() {
                max_quotient = q;
                argmax_n = Some(n);
            }
        }
    }
    Ok(Lemma31Report {
        r,
        checked,
        max_quotient,
        argmax_n,
        violations: 0,
    })
}

/// Monotone envelope `eps(n) = (1 + 1e-6) max_{n <= m <= hi} f0(m)/f0(m-1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct EpsilonEnvelope<C: Coeff> {
    pub lo: u64,
    pub hi: u64,
    pub rows: Vec<EnvelopeRow<C>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct EnvelopeRow<C: Coeff> {
    pub n: u64,
    #[serde(serialize_with = "crate::coeffbox::serialize_coeff")]
    pub ratio: C,
    #[serde(serialize_with = "crate::coeffbox::serialize_coeff")]
    pub eps: C,
}

impl<C: Coeff> EpsilonEnvelope<C> {
    pub fn eps_at(&self, n: u64) -> Option<&C> {
        (n >= self.lo && n <= self.hi).then(|| &self.rows[(n - self.lo) as usize].eps)
    }
}

pub fn epsilon_envelope<C: Coeff>(f0: &Series<C>, lo: u64, hi: u64) -> Result<EpsilonEnvelope<C>> {
    if lo < 1 || hi > f0.order() {
        return Err(Error::invalid(format!(
            "envelope window [{lo}, {hi}] outside [1, {}]",
            f0.order()
        )));
    }
    let len = (hi + 1).saturating_sub(lo) as usize;
    if len < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: len,
        });
    }
    let ctx = f0.ctx();
    let ratios = (lo..=hi)
        .map(|m| {
            let prev = f0.coeff(m - 1);
            if !prev.is_positive() {
                return Err(Error::OnsetViolation { index: m - 1 });
            }
            Ok(f0.coeff(m).div(prev))
        })
        .collect::<Result<Vec<C>>>()?;
    let strict = C::from_rational(
        ctx,
        &Rational::from_parts(1_000_001.into(), 1_000_000u64.into()),
    );
    let mut eps = vec![C::zero(ctx); len];
    let mut running: Option<C> = None;
    for i in (0..len).rev() {
        let q = &ratios[i];
        running = Some(match running {
            Some(cur) if !q.sub(&cur).is_positive() => cur,
            _ => q.clone(),
        });
        eps[i] = running.as_ref().expect("set").mul(&strict);
    }
    if !eps[0].sub(&eps[len - 1]).is_positive() {
        return Err(Error::CheckFailure {
            n: hi,
            detail: format!(
                "envelope does not decrease on [{lo}, {hi}] (eps = {}); ratios do not tend to 0",
                eps[0].render()
            ),
        });
    }
    let rows = (lo..=hi)
        .zip(ratios.into_iter().zip(eps))
        .map(|(n, (ratio, eps))| EnvelopeRow { n, ratio, eps })
        .collect();
    Ok(EpsilonEnvelope { lo, hi, rows })
}

/// One row of the tail-splitting argument at cutoff M:
/// `f(n) = head + tail` with `tail <= eps(M) f(n-1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma32Row {
    pub n: u64,
    pub head_over_prev: f64,
    pub tail_over_prev: f64,
    pub eps_m: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma32Table {
    pub m: u64,
    pub rows: Vec<Lemma32Row>,
}

pub fn lemma32_table<C: Coeff>(
    dec: &Decomposition<C>,
    env: &EpsilonEnvelope<C>,
    m: u64,
    ns: &[u64],
) -> Result<Lemma32Table> {
    let eps_m = env
        .eps_at(m)
        .ok_or_else(|| Error::invalid(format!("cutoff M = {m} outside the envelope window")))?
        .clone();
    let ctx = dec.g.ctx();
    let mut rows = Vec::new();
    for &n in ns {
        if n < m || n > env.hi {
            return Err(Error::invalid(format!(
                "row n = {n} outside [{m}, {}]",
                env.hi
            )));
        }
        let mut head = C::zero(ctx);
        let mut tail = C::zero(ctx);
        let mut shifted = C::zero(ctx);
        for j in 0..=n {
            let term = dec.f0.coeff(j).mul(dec.f1.coeff(n - j));
            if j < m {
                head = head.add(&term);
            } else {
                tail = tail.add(&term);
                shifted = shifted.add(&dec.f0.coeff(j - 1).mul(dec.f1.coeff(n - j)));
            }
        }
        let prev = dec.f.coeff(n - 1);
        let bound = eps_m.mul(&shifted);
        let holds = tail.approx_le(&bound) && bound.approx_le(&eps_m.mul(prev));
        rows.push(Lemma32Row {
            n,
            head_over_prev: head.div(prev).to_f64(),
            tail_over_prev: tail.div(prev).to_f64(),
            eps_m: eps_m.to_f64(),
            holds,
        });
    }
    Ok(Lemma32Table { m, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub trend: TrendConfig,
    /// Largest acceptable g(n) n! / n^(theta n) on the window.
    pub hypothesis_cap: f64,
    pub r_values: Vec<i64>,
    /// Rows sampled per shifted-ratio table.
    pub lemma32_rows: usize,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            trend: TrendConfig::default(),
            hypothesis_cap: 1.0,
            r_values: vec![-1, 0, 1, 2],
            lemma32_rows: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrSummary {
    pub r: i64,
    pub c_r: String,
    pub argmax_n: Option<u64>,
    pub window: (u64, u64),
    pub lemma31_checked: u64,
    pub lemma31_max_quotient: String,
    pub lemma31_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoRow {
    pub n: u64,
    pub f: String,
    pub ratio: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremDemoReport {
    pub rule: SequenceRule,
    #[serde(with = "crate::coeffbox::qstr")]
    pub theta: Rational,
    pub order: u64,
    pub backend: crate::coeffbox::Backend,
    pub hypothesis_constant: f64,
    pub hypothesis_argmax: u64,
    pub support_gcd: u64,
    #[serde(rename = "L")]
    pub l: u64,
    pub ell: u64,
    pub cr_table: Vec<CrSummary>,
    pub ratio_report: RatioReport,
    pub epsilon_window: (u64, u64),
    pub lemma32: Vec<Lemma32Table>,
    pub trend: Option<Trend>,
    pub expected: Trend,
    pub rows: Vec<DemoRow>,
}

impl TheoremDemoReport {
    pub fn matches_expected(&self) -> bool {
        self.trend == Some(self.expected)
    }
}

/// max over `1..=N` of `g(n) n! / n^(theta n)`, with the first index where
/// it exceeds `cap` (relative slack 1e-9 absorbs float noise at exact ties).
fn hypothesis_scan<C: Coeff>(
    g: &Series<C>,
    theta: f64,
    cap: f64,
) -> (f64, u64, Option<(u64, f64)>) {
    let mut best = (0.0f64, 1u64);
    let mut first_bad = None;
    for n in 1..=g.order() {
        let c = g.coeff(n);
        if !c.is_positive() {
            continue;
        }
        let nf = n as f64;
        let ln_ratio = c.ln_f64() + ln_ubig(&factorial(n)) - theta * nf * nf.ln();
        let ratio = ln_ratio.exp();
        if ratio > best.0 {
            best = (ratio, n);
        }
        if first_bad.is_none() && ratio > cap * (1.0 + 1e-9) {
            first_bad = Some((n, ratio));
        }
    }
    (best.0, best.1, first_bad)
}

fn sample_rows(from: u64, to: u64, count: usize) -> Vec<u64> {
    if to <= from || count <= 1 {
        return vec![to];
    }
    let span = to - from;
    let mut out: Vec<u64> = (0..count as u64)
        .map(|i| from + span * i / (count as u64 - 1))
        .collect();
    out.dedup();
    out
}

/// Runs the whole pipeline for `g = rule` with the stated exponent `theta`.
pub fn theorem_demo<C: Coeff>(
    rule: &SequenceRule,
    theta: &Rational,
    order: u64,
    ctx: C::Ctx,
    config: &DemoConfig,
) -> Result<TheoremDemoReport> {
    if *theta <= Rational::ZERO || *theta >= Rational::ONE {
        return Err(Error::invalid(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    if order < 8 {
        return Err(Error::invalid("the demonstration needs order >= 8"));
    }
    let g: Series<C> = Series::without_constant(rule, order, ctx)?;
    let theta_f = theta.to_f64().value();
    let (hypothesis_constant, hypothesis_argmax, bad) =
        hypothesis_scan(&g, theta_f, config.hypothesis_cap);
    if let Some((n, ratio)) = bad {
        return Err(Error::HypothesisFailure {
            n,
            ratio,
            cap: config.hypothesis_cap,
        });
    }
    let support_gcd = g.positive_support().into_iter().fold(0, gcd);
    if support_gcd != 1 {
        return Err(Error::PreconditionViolation(format!(
            "support of g has gcd {support_gcd} on the window"
        )));
    }
    let l = smallest_certified_onset(&g, order - 1)?.ok_or_else(|| {
        Error::PreconditionViolation("no certified positivity onset within the window".into())
    })?;
    // Smallest ell with ell > L, 1/ell < 1 - theta and g(ell) > 0.
    let inv = Rational::ONE / (Rational::ONE - theta);
    let floor_inv: u64 = inv
        .floor()
        .to_string()
        .parse()
        .map_err(|_| Error::invalid("theta too close to 1"))?;
    let start = (l + 1).max(floor_inv + 1);
    let ell = (start..=order)
        .find(|&n| g.coeff(n).is_positive())
        .ok_or_else(|| {
            Error::PreconditionViolation(format!("no n in [{start}, {order}] with g(n) > 0"))
        })?;
    let dec = decompose(&g, l, ell)?;

    let mut cr_table = Vec::new();
    for &r in &config.r_values {
        let cr = cr_bound(&dec, r)?;
        let check = lemma31_check(&dec, &cr)?;
        cr_table.push(CrSummary {
            r,
            c_r: cr.c_r.render(),
            argmax_n: cr.argmax_n,
            window: cr.window,
            lemma31_checked: check.checked,
            lemma31_max_quotient: check.max_quotient.render(),
            lemma31_violations: check.violations,
        });
    }

    let ratio_report = ratio_sequence(&dec.f, 1, &config.trend)?;
    let env = epsilon_envelope(&dec.f0, l + 2, order)?;
    let cutoffs: Vec<u64> = {
        let mut c = vec![l + 2, (order / 4).max(l + 2), (order / 2).max(l + 2)];
        c.dedup();
        c
    };
    let lemma32 = cutoffs
        .iter()
        .map(|&m| lemma32_table(&dec, &env, m, &sample_rows(m, order, config.lemma32_rows)))
        .collect::<Result<Vec<_>>>()?;

    let rows = (0..=order)
        .map(|n| DemoRow {
            n,
            f: dec.f.coeff(n).render(),
            ratio: if n == 0 {
                None
            } else {
                ratio_report.ratio_at(n)
            },
            eps: env.eps_at(n).map(Coeff::to_f64),
        })
        .collect();

    Ok(TheoremDemoReport {
        rule: rule.clone(),
        theta: theta.clone(),
        order,
        backend: g.backend(),
        hypothesis_constant,
        hypothesis_argmax,
        support_gcd,
        l,
        ell,
        cr_table,
        trend: ratio_report.trend,
        ratio_report,
        epsilon_window: (env.lo, env.hi),
        lemma32,
        expected: Trend::Diverging,
        rows,
    })
}
