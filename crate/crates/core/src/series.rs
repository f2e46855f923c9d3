//! Truncated power series: arithmetic, `exp`, `log`, Euler products,
//! evaluation and splitting.
//!
//! All operations are "equality up to order N": a series of order `N`
//! stores coefficients `c(0..=N)` and products are truncated there.

use std::cmp::Ordering;

use dashu::integer::{IBig, UBig};
use serde::{Deserialize, Serialize};

use crate::coeffbox::{Backend, Coeff, Precision, Rational, Real, SequenceRule};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Series<C: Coeff> {
    coeffs: Vec<C>,
    ctx: C::Ctx,
}

impl<C: Coeff> Series<C> {
    pub fn new(coeffs: Vec<C>, ctx: C::Ctx) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid(
                "a series needs at least the constant coefficient",
            ));
        }
        Ok(Series { coeffs, ctx })
    }

    pub fn zero(order: u64, ctx: C::Ctx) -> Self {
        Series {
            coeffs: vec![C::zero(&ctx); order as usize + 1],
            ctx,
        }
    }

    pub fn from_fn(order: u64, ctx: C::Ctx, mut f: impl FnMut(u64) -> C) -> Self {
        Series {
            coeffs: (0..=order).map(&mut f).collect(),
            ctx,
        }
    }

    /// Tabulates `rule(n)` for `0 <= n <= order`.
    pub fn from_rule(rule: &SequenceRule, order: u64, ctx: C::Ctx) -> Result<Self> {
        let coeffs = (0..=order)
            .map(|n| C::from_rule(&ctx, rule, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Series { coeffs, ctx })
    }

    /// `sum_{n>=1} rule(n) x^n`: the rule read as the coefficients of a
    /// series without constant term, ready for [`exp`].
    pub fn without_constant(rule: &SequenceRule, order: u64, ctx: C::Ctx) -> Result<Self> {
        let mut s = Self::from_rule(rule, order, ctx)?;
        s.coeffs[0] = C::zero(&s.ctx);
        Ok(s)
    }

    /// Polynomial with the given coefficients, padded with zeros to `order`.
    pub fn polynomial(coeffs: &[C], order: u64, ctx: C::Ctx) -> Self {
        Self::from_fn(order, ctx.clone(), |n| {
            coeffs
                .get(n as usize)
                .cloned()
                .unwrap_or_else(|| C::zero(&ctx))
        })
    }

    pub fn order(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn backend(&self) -> Backend {
        C::backend(&self.ctx)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `x^n`; panics beyond the truncation order.
    pub fn coeff(&self, n: u64) -> &C {
        &self.coeffs[n as usize]
    }

    /// Coefficient of `x^n`, or zero beyond the truncation order.
    pub fn get(&self, n: u64) -> C {
        self.coeffs
            .get(n as usize)
            .cloned()
            .unwrap_or_else(|| C::zero(&self.ctx))
    }

    /// Truncates or zero-pads to a new order.
    pub fn resized(&self, order: u64) -> Self {
        Self::from_fn(order, self.ctx.clone(), |n| self.get(n))
    }

    /// Highest index with a nonzero coefficient.
    pub fn degree(&self) -> Option<u64> {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map(|d| d as u64)
    }

    /// Indices `n >= 1` with a strictly positive coefficient.
    pub fn positive_support(&self) -> Vec<u64> {
        (1..=self.order())
            .filter(|&n| self.coeff(n).is_positive())
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| c.signum() != Ordering::Less)
    }

    pub fn map_coeffs(&self, f: impl Fn(u64, &C) -> C) -> Self {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| f(n as u64, c))
                .collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        check_compatible(self, rhs)?;
        Ok(self.map_coeffs(|n, c| c.add(rhs.coeff(n))))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        check_compatible(self, rhs)?;
        Ok(self.map_coeffs(|n, c| c.sub(rhs.coeff(n))))
    }

    pub fn scale(&self, k: &C) -> Self {
        self.map_coeffs(|_, c| c.mul(k))
    }

    pub fn to_real(&self, prec: Precision) -> Series<Real> {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.to_real(prec)).collect(),
            ctx: prec,
        }
    }

    pub fn render_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(Coeff::render).collect()
    }
}

impl Series<Rational> {
    pub fn from_ints(values: &[i64]) -> Self {
        Series {
            coeffs: values.iter().map(|&v| Rational::from(v)).collect(),
            ctx: (),
        }
    }

    /// The coefficients as nonnegative integers, or the first index where
    /// that fails.
    pub fn nonnegative_integers(&self) -> Result<Vec<UBig>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                rational_to_ubig(c).ok_or_else(|| Error::IntegralityFailure {
                    n: n as u64,
                    value: c.to_string(),
                })
            })
            .collect()
    }
}

pub(crate) fn rational_to_ubig(q: &Rational) -> Option<UBig> {
    if *q.denominator() != UBig::ONE {
        return None;
    }
    UBig::try_from(q.numerator().clone()).ok()
}

fn check_compatible<C: Coeff>(a: &Series<C>, b: &Series<C>) -> Result<()> {
    if a.ctx != b.ctx {
        return Err(Error::invalid(format!(
            "backend mismatch: {} vs {}",
            a.backend(),
            b.backend()
        )));
    }
    if a.order() != b.order() {
        return Err(Error::invalid(format!(
            "order mismatch: {} vs {}",
            a.order(),
            b.order()
        )));
    }
    Ok(())
}

/// Cauchy product truncated at the common order.
pub fn mul<C: Coeff>(a: &Series<C>, b: &Series<C>) -> Result<Series<C>> {
    check_compatible(a, b)?;
    let order = a.order() as usize;
    let mut out = vec![C::zero(&a.ctx); order + 1];
    for (i, ai) in a.coeffs.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs[..=order - i].iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] = out[i + j].add(&ai.mul(bj));
            }
        }
    }
    Series::new(out, a.ctx.clone())
}

/// `f = exp(g)` by the derivative recurrence
/// `n f(n) = sum_{j=1..n} j g(j) f(n-j)`, with `f(0) = 1`.
pub fn exp<C: Coeff>(g: &Series<C>) -> Result<Series<C>> {
    if !g.coeff(0).is_zero() {
        return Err(Error::invalid(format!(
            "exp needs g(0) = 0, got {}",
            g.coeff(0).render()
        )));
    }
    let order = g.order();
    // Only the nonzero terms of g contribute; sparse inputs (polynomials,
    // the counterexample stages) stay cheap at large orders.
    let weighted: Vec<(usize, C)> = (1..=order)
        .filter(|&j| !g.coeff(j).is_zero())
        .map(|j| (j as usize, g.coeff(j).mul_int(j as i64)))
        .collect();
    let mut f: Vec<C> = Vec::with_capacity(order as usize + 1);
    f.push(C::from_int(&g.ctx, 1));
    for n in 1..=order as usize {
        let mut acc = C::zero(&g.ctx);
        for (j, w) in weighted.iter().take_while(|(j, _)| *j <= n) {
            let prev = &f[n - j];
            if !prev.is_zero() {
                acc = acc.add(&w.mul(prev));
            }
        }
        f.push(acc.div_int(n as i64));
    }
    Series::new(f, g.ctx.clone())
}

/// Inverse of [`exp`]: the `g` with `g(0) = 0` and `exp(g) = f` up to order N.
pub fn log<C: Coeff>(f: &Series<C>) -> Result<Series<C>> {
    if *f.coeff(0) != C::from_int(&f.ctx, 1) {
        return Err(Error::invalid(format!(
            "log needs f(0) = 1, got {}",
            f.coeff(0).render()
        )));
    }
    let order = f.order() as usize;
    let mut g: Vec<C> = vec![C::zero(&f.ctx); order + 1];
    for n in 1..=order {
        let mut acc = f.coeffs[n].mul_int(n as i64);
        for (j, gj) in g.iter().enumerate().take(n).skip(1) {
            if !gj.is_zero() {
                acc = acc.sub(&gj.mul_int(j as i64).mul(&f.coeffs[n - j]));
            }
        }
        g[n] = acc.div_int(n as i64);
    }
    Series::new(g, f.ctx.clone())
}

/// Coefficients of `prod_{j>=1} (1 - x^j)^(-p(j))` up to `order`.
///
/// Computed as `exp(sum_j p(j) sum_{k>=1} x^{jk}/k)`; the result is checked
/// to consist of nonnegative integers.
pub fn euler_product(p: &SequenceRule, order: u64) -> Result<Series<Rational>> {
    let counts = (1..=order)
        .map(|j| {
            let v = p.eval_exact(j)?;
            rational_to_ubig(&v)
                .ok_or_else(|| Error::invalid(format!("p({j}) = {v} is not a nonnegative integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    euler_product_counts(&counts, order)
}

/// [`euler_product`] with `counts[j-1] = p(j)` given directly.
pub fn euler_product_counts(counts: &[UBig], order: u64) -> Result<Series<Rational>> {
    let mut log_coeffs = vec![Rational::ZERO; order as usize + 1];
    for (idx, c) in counts.iter().enumerate().take(order as usize) {
        if *c == UBig::ZERO {
            continue;
        }
        let j = idx + 1;
        let c = Rational::from(c.clone());
        for k in 1..=(order as usize / j) {
            log_coeffs[j * k] += &c / Rational::from(k);
        }
    }
    let a = exp(&Series::new(log_coeffs, ())?)?;
    a.nonnegative_integers()?;
    Ok(a)
}

/// Horner evaluation of the stored coefficients at a positive point.
pub fn eval_at<C: Coeff>(g: &Series<C>, x0: &C) -> Result<C> {
    if !x0.is_positive() {
        return Err(Error::invalid(format!(
            "evaluation point must be positive, got {}",
            x0.render()
        )));
    }
    Ok(g.coeffs
        .iter()
        .rev()
        .fold(C::zero(&g.ctx), |acc, c| acc.mul(x0).add(c)))
}

/// `G = G0 + G1` with `G0` holding degrees `<= ell` and `G1` the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPair<C: Coeff> {
    pub ell: u64,
    pub low: Series<C>,
    pub high: Series<C>,
}

pub fn split_at<C: Coeff>(g: &Series<C>, ell: u64) -> Result<SplitPair<C>> {
    if ell < 1 || ell > g.order() {
        return Err(Error::invalid(format!(
            "split degree {ell} outside [1, {}]",
            g.order()
        )));
    }
    if !g.coeff(ell).is_positive() {
        return Err(Error::PreconditionViolation(format!(
            "coefficient of x^{ell} must be positive to split there, got {}",
            g.coeff(ell).render()
        )));
    }
    let zero = C::zero(&g.ctx);
    let low = g.map_coeffs(|n, c| if n <= ell { c.clone() } else { zero.clone() });
    let high = g.map_coeffs(|n, c| if n > ell { c.clone() } else { zero.clone() });
    Ok(SplitPair { ell, low, high })
}

/// On-disk series format: `{"order": N, "backend": ..., "coeffs": [...]}`.
///
/// Exact coefficients are `"p/q"` strings; float coefficients are decimal
/// strings and the backend records the precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub order: u64,
    #[serde(flatten)]
    pub backend: Backend,
    pub coeffs: Vec<String>,
}

/// A series whose backend is only known at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySeries {
    Exact(Series<Rational>),
    Float(Series<Real>),
}

impl<C: Coeff> From<&Series<C>> for SeriesFile {
    fn from(s: &Series<C>) -> Self {
        SeriesFile {
            order: s.order(),
            backend: s.backend(),
            coeffs: s.render_coeffs(),
        }
    }
}

impl TryFrom<&SeriesFile> for AnySeries {
    type Error = Error;

    fn try_from(file: &SeriesFile) -> Result<Self> {
        if file.coeffs.len() as u64 != file.order + 1 {
            return Err(Error::Parse(format!(
                "order {} needs {} coefficients, found {}",
                file.order,
                file.order + 1,
                file.coeffs.len()
            )));
        }
        match file.backend {
            Backend::Exact => {
                let coeffs = file
                    .coeffs
                    .iter()
                    .map(|s| crate::coeffbox::parse_rational(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnySeries::Exact(Series::new(coeffs, ())?))
            }
            Backend::Float { precision } => {
                let coeffs = file
                    .coeffs
                    .iter()
                    .map(|s| Real::parse(s, precision))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnySeries::Float(Series::new(coeffs, precision)?))
            }
        }
    }
}

impl AnySeries {
    pub fn to_file(&self) -> SeriesFile {
        match self {
            AnySeries::Exact(s) => s.into(),
            AnySeries::Float(s) => s.into(),
        }
    }
}

/// Exact integer `n! * c` for an EGF coefficient `c`, if integral.
pub fn egf_count(c: &Rational, n: u64) -> Option<IBig> {
    let scaled = c * Rational::from(crate::coeffbox::factorial(n));
    if *scaled.denominator() == UBig::ONE {
        Some(scaled.numerator().clone())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffbox::{factorial, parse_rational};
    use dashu::integer::IBig;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn poly(cs: &[&str], order: u64) -> Series<Rational> {
        let v: Vec<Rational> = cs.iter().map(|s| q(s)).collect();
        Series::polynomial(&v, order, ())
    }

    fn inv_factorials(order: u64) -> Series<Rational> {
        Series::from_fn(order, (), |n| Rational::from_parts(IBig::ONE, factorial(n)))
    }

    /// Independent oracle: sum_k G^k / k! by repeated schoolbook products.
    fn exp_by_powers(g: &Series<Rational>) -> Vec<Rational> {
        let n = g.order() as usize;
        let mut total = vec![Rational::ZERO; n + 1];
        let mut power = vec![Rational::ZERO; n + 1];
        power[0] = Rational::ONE;
        let mut kfact = Rational::ONE;
        for k in 0..=n {
            if k > 0 {
                kfact *= Rational::from(k);
                let mut next = vec![Rational::ZERO; n + 1];
                for i in 0..=n {
                    for j in 0..=n - i {
                        next[i + j] += &power[i] * g.coeff(j as u64);
                    }
                }
                power = next;
            }
            for i in 0..=n {
                total[i] += &power[i] / &kfact;
            }
        }
        total
    }

    #[test]
    fn product_examples() {
        let a = poly(&["1", "1"], 5);
        let b = poly(&["1", "-1"], 5);
        assert_eq!(mul(&a, &b).unwrap(), poly(&["1", "0", "-1"], 5));

        let e = inv_factorials(12);
        let sq = mul(&e, &e).unwrap();
        for n in 0..=12u64 {
            let expected = Rational::from_parts(IBig::from(UBig::ONE << n as usize), factorial(n));
            assert_eq!(*sq.coeff(n), expected);
        }
    }

    #[test]
    fn product_rejects_mismatch() {
        let a = poly(&["1"], 3);
        let b = poly(&["1"], 4);
        assert!(matches!(mul(&a, &b), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn split_product_reproduces_exp() {
        let mut g = inv_factorials(40);
        g = g.map_coeffs(|n, c| if n == 0 { Rational::ZERO } else { c.clone() });
        let split = split_at(&g, 2).unwrap();
        let lhs = mul(&exp(&split.low).unwrap(), &exp(&split.high).unwrap()).unwrap();
        assert_eq!(lhs, exp(&g).unwrap());
    }

    #[test]
    fn exp_examples() {
        let f = exp(&poly(&["0", "1"], 6)).unwrap();
        assert_eq!(f, inv_factorials(6));

        let f = exp(&poly(&["0", "1", "1"], 3)).unwrap();
        assert_eq!(f.coeffs(), &[q("1"), q("1"), q("3/2"), q("7/6")]);
        assert_eq!(f.coeffs(), &exp_by_powers(&poly(&["0", "1", "1"], 3))[..]);

        let f = exp(&poly(&["0", "0", "1", "1"], 4)).unwrap();
        assert_eq!(f.coeffs(), &[q("1"), q("0"), q("1"), q("1"), q("1/2")]);
    }

    #[test]
    fn exp_rejects_constant_term() {
        assert!(matches!(
            exp(&poly(&["1", "1"], 3)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn log_examples() {
        let g = poly(&["0", "1", "1"], 10);
        assert_eq!(log(&exp(&g).unwrap()).unwrap(), g);

        let geometric = Series::from_fn(15, (), |_| Rational::ONE);
        let lg = log(&geometric).unwrap();
        for n in 1..=15u64 {
            assert_eq!(*lg.coeff(n), Rational::from_parts(IBig::ONE, UBig::from(n)));
        }
        assert_eq!(exp(&lg).unwrap(), geometric);

        assert!(matches!(
            log(&poly(&["2", "1"], 3)),
            Err(Error::InvalidArgument(_))
        ));
    }

    /// Brute-force count of multisets of parts, where part size j comes in
    /// `kinds(j)` distinguishable kinds.
    fn multiset_count(n: u64, max_part: u64, kinds: &dyn Fn(u64) -> u64) -> u64 {
        if n == 0 {
            return 1;
        }
        let mut total = 0;
        for part in (1..=max_part.min(n)).rev() {
            for kind in 0..kinds(part) {
                // parts are ordered by (size, kind) to count multisets once
                total += multiset_count_kinded(n - part, part, kind, kinds);
            }
        }
        total
    }

    fn multiset_count_kinded(n: u64, part: u64, kind: u64, kinds: &dyn Fn(u64) -> u64) -> u64 {
        if n == 0 {
            return 1;
        }
        let mut total = 0;
        for p in (1..=part.min(n)).rev() {
            let top = if p == part { kind + 1 } else { kinds(p) };
            for k in 0..top {
                total += multiset_count_kinded(n - p, p, k, kinds);
            }
        }
        total
    }

    #[test]
    fn euler_product_examples() {
        let a = euler_product(&SequenceRule::ConstantOne, 9).unwrap();
        assert_eq!(a, Series::from_ints(&[1, 1, 2, 3, 5, 7, 11, 15, 22, 30]));
        for n in 0..=9 {
            assert_eq!(
                a.coeff(n).clone(),
                Rational::from(multiset_count(n, n, &|_| 1))
            );
        }

        let a = euler_product(&SequenceRule::explicit_ints(&[0, 2]), 12).unwrap();
        for n in 0..=12u64 {
            assert_eq!(*a.coeff(n), Rational::from(n + 1));
        }

        let a = euler_product(&SequenceRule::explicit_ints(&[0, 1, 1]), 12).unwrap();
        for n in 0..=12u64 {
            assert_eq!(*a.coeff(n), Rational::from(n / 2 + 1));
            assert_eq!(
                *a.coeff(n),
                Rational::from(multiset_count(n, 2, &|j| u64::from(j <= 2)))
            );
        }
    }

    #[test]
    fn euler_product_rejects_bad_counts() {
        let neg = SequenceRule::explicit_ints(&[0, -1]);
        assert!(matches!(
            euler_product(&neg, 5),
            Err(Error::InvalidArgument(_))
        ));
        let frac = SequenceRule::Explicit {
            values: vec![q("0"), q("1/2")],
        };
        assert!(matches!(
            euler_product(&frac, 5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn evaluation() {
        let g = poly(&["0", "1", "1"], 2);
        assert_eq!(eval_at(&g, &q("2")).unwrap(), q("6"));
        assert_eq!(eval_at(&poly(&["0", "1"], 1), &q("10")).unwrap(), q("10"));
        assert!(eval_at(&g, &q("0")).is_err());
        assert!(eval_at(&g, &q("-1")).is_err());

        let p = Precision::DEFAULT;
        let gr = g.to_real(p);
        let big_f = eval_at(&gr, &Real::from_i64(2, p)).unwrap().exp();
        let e6 = Real::from_i64(6, p).exp();
        assert_eq!(
            crate::coeffbox::compare_with_tolerance(&big_f, &e6, 1e-60).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn split_examples() {
        let g = poly(&["0", "1", "1", "1"], 3);
        let s = split_at(&g, 2).unwrap();
        assert_eq!(s.low, poly(&["0", "1", "1"], 3));
        assert_eq!(s.high, poly(&["0", "0", "0", "1"], 3));
        assert_eq!(s.low.add(&s.high).unwrap(), g);

        let e =
            inv_factorials(6).map_coeffs(|n, c| if n == 0 { Rational::ZERO } else { c.clone() });
        let s = split_at(&e, 3).unwrap();
        assert_eq!(s.low, poly(&["0", "1", "1/2", "1/6"], 6));

        let gap = poly(&["0", "1", "0", "1"], 3);
        assert!(matches!(
            split_at(&gap, 2),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn series_file_round_trip() {
        let s = poly(&["0", "1", "-3/2"], 2);
        let file = SeriesFile::from(&s);
        let js = serde_json::to_string(&file).unwrap();
        assert_eq!(
            js,
            r#"{"order":2,"backend":"exact","coeffs":["0","1","-3/2"]}"#
        );
        let back: SeriesFile = serde_json::from_str(&js).unwrap();
        assert_eq!(AnySeries::try_from(&back).unwrap(), AnySeries::Exact(s));

        let r = poly(&["0", "1", "1/3"], 2).to_real(Precision(128));
        let file = SeriesFile::from(&r);
        let js = serde_json::to_string(&file).unwrap();
        assert!(js.contains(r#""backend":"float","precision":128"#));
        match AnySeries::try_from(&serde_json::from_str::<SeriesFile>(&js).unwrap()).unwrap() {
            AnySeries::Float(back) => {
                assert!((back.coeff(2).to_f64() - 1.0 / 3.0).abs() < 1e-16);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1u64..=12)
            .prop_map(|(a, b)| Rational::from_parts(IBig::from(a), UBig::from(b)))
    }

    fn random_g(nonneg: bool) -> impl Strategy<Value = Series<Rational>> {
        (1u64..=24, proptest::collection::vec(small_rational(), 24)).prop_map(move |(order, cs)| {
            Series::from_fn(order, (), |n| {
                if n == 0 {
                    Rational::ZERO
                } else {
                    let c = cs[n as usize - 1].clone();
                    if nonneg && c < Rational::ZERO {
                        -c
                    } else {
                        c
                    }
                }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn log_inverts_exp(g in random_g(false)) {
            prop_assert_eq!(log(&exp(&g).unwrap()).unwrap(), g);
        }

        #[test]
        fn exp_is_a_homomorphism(g0 in random_g(false), g1 in random_g(false)) {
            let order = g0.order().min(g1.order());
            let (g0, g1) = (g0.resized(order), g1.resized(order));
            let lhs = exp(&g0.add(&g1).unwrap()).unwrap();
            let rhs = mul(&exp(&g0).unwrap(), &exp(&g1).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn recurrence_residual_vanishes(g in random_g(false)) {
            let f = exp(&g).unwrap();
            for n in 1..=g.order() {
                let mut residual = f.coeff(n) * Rational::from(n);
                for j in 1..=n {
                    residual -= Rational::from(j) * g.coeff(j) * f.coeff(n - j);
                }
                prop_assert_eq!(residual, Rational::ZERO);
            }
        }

        #[test]
        fn nonnegative_input_gives_nonnegative_exp(g in random_g(true)) {
            let f = exp(&g).unwrap();
            prop_assert_eq!(f.coeff(0).clone(), Rational::ONE);
            prop_assert!(f.is_nonnegative());
        }
    }
}
