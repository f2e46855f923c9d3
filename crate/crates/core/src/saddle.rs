//! Saddle-point asymptotics for `F = exp(G)` with `G` a polynomial.
//!
//! For `n >= 1` the saddle point `r_n` solves `x G'(x) = n`, and
//! `f(n) ~ exp(G(r_n)) / (r_n^n sqrt(2 pi B(r_n)))` with
//! `B(x) = x^2 G''(x) + x G'(x)`.

use serde::{Serialize, Serializer};

use crate::coeffbox::{Coeff, Precision, Rational, Real};
use crate::diagnostics::gcd;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::series::{exp, Series};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct SaddleConfig {
    pub precision: Precision,
    /// Residual tolerance on |r G'(r) - n|.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SaddleConfig {
    fn default() -> Self {
        SaddleConfig {
            precision: Precision::DEFAULT,
            tol: 1e-30,
            max_iter: 10_000,
        }
    }
}

/// The test polynomials `x`, `x + x^2`, `x^2 + x^3`.
pub fn builtin_polynomials() -> Vec<(&'static str, Series<Rational>)> {
    vec![
        ("x", Series::from_ints(&[0, 1])),
        ("x+x^2", Series::from_ints(&[0, 1, 1])),
        ("x^2+x^3", Series::from_ints(&[0, 0, 1, 1])),
    ]
}

/// Nonnegative polynomial without constant term, in float form.
#[derive(Clone, Debug)]
pub struct Polynomial {
    /// `(j, c_j)` for the nonzero coefficients.
    terms: Vec<(u64, Real)>,
    prec: Precision,
}

impl Polynomial {
    pub fn from_series<C: Coeff>(g: &Series<C>, prec: Precision) -> Result<Self> {
        if !g.coeff(0).is_zero() {
            return Err(Error::invalid("saddle analysis needs G(0) = 0"));
        }
        if let Some(n) = (1..=g.order()).find(|&n| g.coeff(n).signum() == std::cmp::Ordering::Less)
        {
            return Err(Error::invalid(format!("coefficient {n} of G is negative")));
        }
        let terms: Vec<(u64, Real)> = (1..=g.order())
            .filter(|&n| g.coeff(n).is_positive())
            .map(|n| (n, g.coeff(n).to_real(prec)))
            .collect();
        if terms.is_empty() {
            return Err(Error::invalid("G is identically zero"));
        }
        Ok(Polynomial { terms, prec })
    }

    pub fn degree(&self) -> u64 {
        self.terms.last().expect("nonempty").0
    }

    pub fn leading(&self) -> &Real {
        &self.terms.last().expect("nonempty").1
    }

    fn sum_weighted(&self, x: &Real, power: u32) -> Real {
        let mut acc = Real::zero(self.prec);
        for (j, c) in &self.terms {
            let w = Real::from_i64((*j as i64).pow(power), self.prec);
            acc = acc + w * c * x.powi(*j as i64);
        }
        acc
    }

    /// G(x).
    pub fn value(&self, x: &Real) -> Real {
        self.sum_weighted(x, 0)
    }

    /// x G'(x).
    pub fn x_dg(&self, x: &Real) -> Real {
        self.sum_weighted(x, 1)
    }

    /// B(x) = x^2 G''(x) + x G'(x) = sum j^2 c_j x^j.
    pub fn b(&self, x: &Real) -> Real {
        self.sum_weighted(x, 2)
    }
}

#[derive(Clone, Debug)]
pub struct SaddleRoot {
    pub r: Real,
    pub residual: Real,
    pub iterations: usize,
}

/// Root of `x G'(x) = n`, by safeguarded Newton steps inside a shrinking
/// bisection bracket `[0, max(1, 2 (n / (d g_d))^(1/d))]`.
pub fn solve_saddle(poly: &Polynomial, n: u64, config: &SaddleConfig) -> Result<SaddleRoot> {
    if n < 1 {
        return Err(Error::invalid("saddle index must be >= 1"));
    }
    if config.tol.is_nan() || config.tol < 0.0 {
        return Err(Error::invalid(format!(
            "tolerance must be nonnegative, got {}",
            config.tol
        )));
    }
    let p = poly.prec;
    let target = Real::from_i64(n as i64, p);
    let tol = Real::from_f64(config.tol, p)?;
    let d = poly.degree();
    let scale = target.clone() / (Real::from_i64(d as i64, p) * poly.leading());
    let guess = (scale.ln() / Real::from_i64(d as i64, p)).exp();
    let two = Real::from_i64(2, p);
    let mut lo = Real::zero(p);
    let mut hi = Real::one(p).max(&two * &guess);
    let mut x = hi.clone();
    for iteration in 0..config.max_iter {
        let residual = poly.x_dg(&x) - &target;
        if residual.abs() <= tol {
            return Ok(SaddleRoot {
                r: x,
                residual,
                iterations: iteration,
            });
        }
        if residual.signum() == std::cmp::Ordering::Greater {
            hi = x.clone();
        } else {
            lo = x.clone();
        }
        // d/dx (x G'(x)) = B(x)/x
        let slope = poly.b(&x) / &x;
        let newton = &x - &(residual / slope);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            (&lo + &hi) / two.clone()
        };
        if next == x {
            break;
        }
        x = next;
    }
    Err(Error::NumericFailure {
        iterations: config.max_iter,
        lo: lo.to_sci(25),
        hi: hi.to_sci(25),
    })
}

fn ser_real<S: Serializer>(x: &Real, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_sci(REPORT_DIGITS))
}

/// Significant digits used when floats are written to reports.
pub const REPORT_DIGITS: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct SaddleReport {
    pub n: u64,
    #[serde(serialize_with = "ser_real")]
    pub r_n: Real,
    #[serde(rename = "B", serialize_with = "ser_real")]
    pub b: Real,
    #[serde(rename = "G_at_r", serialize_with = "ser_real")]
    pub g_at_r: Real,
    #[serde(serialize_with = "ser_real")]
    pub estimate: Real,
    #[serde(serialize_with = "ser_real")]
    pub exact: Real,
    pub rel_err: f64,
    pub iterations: usize,
}

impl SaddleReport {
    /// Row for the CSV export: n, r_n, B, G_at_r, estimate, exact, rel_err.
    pub fn csv_row(&self) -> [String; 7] {
        [
            self.n.to_string(),
            self.r_n.to_sci(REPORT_DIGITS),
            self.b.to_sci(REPORT_DIGITS),
            self.g_at_r.to_sci(REPORT_DIGITS),
            self.estimate.to_sci(REPORT_DIGITS),
            self.exact.to_sci(REPORT_DIGITS),
            format!("{:.6e}", self.rel_err),
        ]
    }
}

pub const CSV_HEADER: [&str; 7] = ["n", "r_n", "B", "G_at_r", "estimate", "exact", "rel_err"];

fn report_for(
    poly: &Polynomial,
    exact: Real,
    n: u64,
    config: &SaddleConfig,
) -> Result<SaddleReport> {
    let p = config.precision;
    let root = solve_saddle(poly, n, config)?;
    let r = root.r;
    let b = poly.b(&r);
    let g_at_r = poly.value(&r);
    let two_pi = Real::pi(p) * Real::from_i64(2, p);
    let estimate = g_at_r.exp() / (r.powi(n as i64) * (two_pi * &b).sqrt());
    let rel_err = if exact.is_zero() {
        f64::INFINITY
    } else {
        ((&estimate - &exact).abs() / &exact).to_f64()
    };
    Ok(SaddleReport {
        n,
        r_n: r,
        b,
        g_at_r,
        estimate,
        exact,
        rel_err,
        iterations: root.iterations,
    })
}

/// Full report at one `n`; the exact coefficient comes from [`exp`].
pub fn hayman_estimate<C: Coeff>(
    g: &Series<C>,
    n: u64,
    config: &SaddleConfig,
) -> Result<SaddleReport> {
    Ok(saddle_grid(g, &[n], config, ExecMode::Sequential)?.remove(0))
}

/// Reports for every `n` in `ns`. The exact series is computed once; the
/// root finding is spread over threads in parallel mode.
pub fn saddle_grid<C: Coeff>(
    g: &Series<C>,
    ns: &[u64],
    config: &SaddleConfig,
    mode: ExecMode,
) -> Result<Vec<SaddleReport>> {
    let top = ns.iter().copied().max().unwrap_or(0);
    let poly = Polynomial::from_series(g, config.precision)?;
    let f = exp(&g.resized(top.max(g.order())))?;
    let exact: Vec<Real> = ns
        .iter()
        .map(|&n| f.coeff(n).to_real(config.precision))
        .collect();
    let jobs: Vec<(u64, Real)> = ns.iter().copied().zip(exact).collect();
    exec::try_map(mode, &jobs, |(n, ex)| {
        report_for(&poly, ex.clone(), *n, config)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ExponentPoint {
    pub n: u64,
    pub s: f64,
}

/// `s(n) = -d log f(n) / (n log n)` over a sample; tends to 1.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ExponentFit {
    pub d: u64,
    pub points: Vec<ExponentPoint>,
    /// |s - 1| at the smallest and largest sampled n.
    pub drift_first: f64,
    pub drift_last: f64,
    pub converging: bool,
}

pub fn exponent_fit<C: Coeff>(g: &Series<C>, sample: &[u64]) -> Result<ExponentFit> {
    let mut sample: Vec<u64> = sample.to_vec();
    sample.sort_unstable();
    sample.dedup();
    if sample.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    if let Some(&n) = sample.iter().find(|&&n| n < 2) {
        return Err(Error::invalid(format!("sample point {n} must be >= 2")));
    }
    let d = g
        .degree()
        .ok_or_else(|| Error::invalid("G is identically zero"))?;
    let support_gcd = (1..=g.order())
        .filter(|&n| g.coeff(n).is_positive())
        .fold(0, gcd);
    if support_gcd != 1 {
        return Err(Error::PreconditionViolation(format!(
            "support of G has gcd {support_gcd}"
        )));
    }
    let top = *sample.last().expect("nonempty");
    let f = exp(&g.resized(top.max(g.order())))?;
    let mut points = Vec::with_capacity(sample.len());
    for &n in &sample {
        let c = f.coeff(n);
        if !c.is_positive() {
            return Err(Error::SamplePointUndefined(n));
        }
        let nf = n as f64;
        points.push(ExponentPoint {
            n,
            s: -(d as f64) * c.ln_f64() / (nf * nf.ln()),
        });
    }
    let drift_first = (points[0].s - 1.0).abs();
    let drift_last = (points.last().expect("nonempty").s - 1.0).abs();
    Ok(ExponentFit {
        d,
        converging: drift_last < drift_first,
        points,
        drift_first,
        drift_last,
    })
}
