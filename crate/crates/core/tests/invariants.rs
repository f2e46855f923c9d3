use std::cmp::Ordering;

use expsmooth::coeffbox::compare_relative;
use expsmooth::counterexample::{
    build_counterexample, s_theta_member, stage_theta, CounterexampleConfig,
};
use expsmooth::diagnostics::{ratio_sequence, TrendConfig};
use expsmooth::saddle::{solve_saddle, Polynomial, SaddleConfig};
use expsmooth::series::{exp, log, mul, split_at};
use expsmooth::smoothing::{cr_bound, decompose, epsilon_envelope, lemma31_check};
use expsmooth::{Coeff, Precision, Rational, Real, SequenceRule, Series};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, q)| Rational::from(p) / Rational::from(q))
}

fn nonneg_rational() -> impl Strategy<Value = Rational> {
    (0i64..=6, 1i64..=4).prop_map(|(p, q)| Rational::from(p) / Rational::from(q))
}

fn series_from(coeffs: Vec<Rational>) -> Series<Rational> {
    let order = coeffs.len() as u64;
    Series::from_fn(order, (), |n| {
        if n == 0 {
            Rational::ZERO
        } else {
            coeffs[n as usize - 1].clone()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn log_inverts_exp(coeffs in prop::collection::vec(rational(), 1..25)) {
        let g = series_from(coeffs);
        prop_assert_eq!(log(&exp(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn exp_is_a_homomorphism(a in prop::collection::vec(rational(), 12), b in prop::collection::vec(rational(), 12)) {
        let (g0, g1) = (series_from(a), series_from(b));
        let lhs = exp(&g0.add(&g1).unwrap()).unwrap();
        let rhs = mul(&exp(&g0).unwrap(), &exp(&g1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn recurrence_residual_vanishes(coeffs in prop::collection::vec(rational(), 1..30)) {
        let g = series_from(coeffs);
        let f = exp(&g).unwrap();
        for n in 1..=g.order() {
            let mut sum = Rational::ZERO;
            for j in 1..=n {
                sum += g.coeff(j) * Rational::from(j) * f.coeff(n - j);
            }
            prop_assert_eq!(f.coeff(n) * Rational::from(n), sum);
        }
    }

    #[test]
    fn nonnegative_input_gives_nonnegative_output(coeffs in prop::collection::vec(nonneg_rational(), 1..30)) {
        let f = exp(&series_from(coeffs)).unwrap();
        prop_assert_eq!(f.coeff(0), &Rational::ONE);
        prop_assert!(f.is_nonnegative());
    }

    #[test]
    fn split_pieces_recombine(coeffs in prop::collection::vec(nonneg_rational(), 4..16)) {
        let g = series_from(coeffs);
        for ell in g.positive_support() {
            let pair = split_at(&g, ell).unwrap();
            prop_assert_eq!(pair.low.add(&pair.high).unwrap(), g.clone());
        }
    }

    #[test]
    fn lemma_inequality_holds_everywhere(tail in prop::collection::vec(nonneg_rational(), 10..30)) {
        // g(1) = 1 certifies positivity from the start; the split sits at 3.
        let mut coeffs = vec![Rational::ONE, Rational::ZERO, Rational::ONE];
        coeffs.extend(tail);
        let g = series_from(coeffs);
        let dec = decompose(&g, 0, 3).unwrap();
        prop_assert!(dec.convolution_holds().unwrap());
        for r in [-1i64, 0, 1, 2] {
            let cr = cr_bound(&dec, r).unwrap();
            let report = lemma31_check(&dec, &cr).unwrap();
            prop_assert_eq!(report.violations, 0);
        }
    }

    #[test]
    fn saddle_roots_increase_and_solve(c in 1i64..5, d in 1u64..4) {
        let mut coeffs = vec![0i64; d as usize + 1];
        coeffs[d as usize] = c;
        let g = Series::<Rational>::from_ints(&coeffs);
        let cfg = SaddleConfig::default();
        let poly = Polynomial::from_series(&g, cfg.precision).unwrap();
        let mut prev: Option<Real> = None;
        for n in [5u64, 10, 20, 40] {
            let root = solve_saddle(&poly, n, &cfg).unwrap();
            prop_assert!(root.residual.to_f64().abs() <= cfg.tol);
            let closed = (n as f64 / (d as f64 * c as f64)).powf(1.0 / d as f64);
            prop_assert!((root.r.to_f64() - closed).abs() <= 1e-12 * closed);
            if let Some(p) = &prev {
                prop_assert!(root.r.to_f64() > p.to_f64());
            }
            prev = Some(root.r);
        }
    }
}

#[test]
fn ratio_of_exp_x_is_n() {
    let g = Series::<Rational>::from_ints(&[0, 1]).resized(40);
    let report = ratio_sequence(&exp(&g).unwrap(), 1, &TrendConfig::default()).unwrap();
    for (n, r) in report.defined() {
        assert_eq!(r, n as f64);
    }
}

#[test]
fn envelope_is_monotone_and_above_ratios() {
    let g = Series::<Rational>::without_constant(
        &SequenceRule::from_shorthand("1/n!").unwrap(),
        40,
        (),
    )
    .unwrap();
    let f = exp(&g).unwrap();
    let env = epsilon_envelope(&f, 5, 40).unwrap();
    for w in env.rows.windows(2) {
        assert!(w[1].eps <= w[0].eps);
    }
    for row in &env.rows {
        assert!(row.eps > row.ratio);
    }
}

#[test]
fn counterexample_invariants() {
    let t = SequenceRule::from_shorthand("n^n/n!").unwrap();
    let cfg = CounterexampleConfig::default();
    let res = build_counterexample(&t, 1, 3, 20, &cfg).unwrap();
    assert!(res.degrees.windows(2).all(|w| w[0] < w[1]));
    for w in res.degrees.windows(2) {
        assert!(s_theta_member(&t, &stage_theta(w[0]), w[1], &cfg).unwrap());
    }
    let one = Real::one(cfg.precision);
    for &d in &res.degrees[1..] {
        let ratio = res.f.coeff(d).div(res.f.coeff(d - 1));
        assert_eq!(
            compare_relative(&ratio, &one, cfg.tol).unwrap(),
            Ordering::Greater
        );
    }
    for n in 1..=20 {
        let tn = t.eval_real(n, Precision::DEFAULT).unwrap();
        assert!(res.g.coeff(n).approx_le(&tn));
    }
}
