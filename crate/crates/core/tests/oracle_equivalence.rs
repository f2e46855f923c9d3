use dashu::integer::UBig;
use expsmooth::classes::{growth_exponents, labelled_totals, unlabelled_totals, ClassSpec, Side};
use expsmooth::coeffbox::factorial;
use expsmooth::oracles::{oracle_count, Scope, CAPS};
use expsmooth::series::euler_product;
use expsmooth::{ExecMode, Rational};

fn class_names() -> Vec<&'static str> {
    CAPS.iter()
        .map(|c| c.0)
        .filter(|&c| c != "integer-partitions")
        .collect()
}

fn oracle(class: &str, n: u64, side: Side, scope: Scope) -> UBig {
    oracle_count(class, n, side, scope).unwrap().count.into()
}

#[test]
fn labelled_totals_match_enumeration_up_to_cap() {
    for (class, cap, _) in CAPS {
        if cap == 0 {
            continue;
        }
        // Keep the debug-profile run short; the CLI selftests cover the rest.
        let top = cap.min(7);
        let totals = labelled_totals(&ClassSpec::builtin(class).unwrap(), top).unwrap();
        for n in 0..=top {
            assert_eq!(
                totals.counts[n as usize],
                oracle(class, n, Side::Labelled, Scope::Total),
                "{class} n={n}"
            );
        }
    }
}

#[test]
fn unlabelled_totals_match_enumeration_up_to_cap() {
    for (class, _, cap) in CAPS {
        let spec_name = if class == "integer-partitions" {
            "equivalence-relations"
        } else {
            class
        };
        let top = cap.min(15);
        let totals = unlabelled_totals(&ClassSpec::builtin(spec_name).unwrap(), top).unwrap();
        for n in 0..=top {
            assert_eq!(
                totals.counts[n as usize],
                oracle(class, n, Side::Unlabelled, Scope::Total),
                "{class} n={n}"
            );
        }
    }
}

#[test]
fn connected_enumeration_reproduces_component_counts() {
    for class in class_names() {
        let spec = ClassSpec::builtin(class).unwrap();
        for n in 1..=6 {
            let p_l = spec.p_l().unwrap().eval_exact(n).unwrap();
            assert_eq!(
                Rational::from(oracle(class, n, Side::Labelled, Scope::Connected)),
                p_l,
                "{class} p_L({n})"
            );
            let p_u = spec.p_u().unwrap().eval_exact(n).unwrap();
            assert_eq!(
                Rational::from(oracle(class, n, Side::Unlabelled, Scope::Connected)),
                p_u,
                "{class} p_U({n})"
            );
        }
    }
    assert_eq!(
        oracle("broom", 3, Side::Labelled, Scope::Connected),
        UBig::from(6u8)
    );
    assert_eq!(
        oracle("broom", 6, Side::Labelled, Scope::Connected),
        UBig::from(120u8)
    );
}

#[test]
fn euler_product_matches_multiset_counts() {
    for class in class_names() {
        let spec = ClassSpec::builtin(class).unwrap();
        let series = euler_product(spec.p_u().unwrap(), 25).unwrap();
        let top = CAPS.iter().find(|c| c.0 == class).unwrap().2.min(25);
        for n in 0..=top {
            let want = Rational::from(oracle(class, n, Side::Unlabelled, Scope::Total));
            assert_eq!(series.coeff(n), &want, "{class} n={n}");
        }
    }
}

#[test]
fn totals_are_integral_to_forty() {
    for class in class_names() {
        let spec = ClassSpec::builtin(class).unwrap();
        let lab = labelled_totals(&spec, 40).unwrap();
        for n in 0..=40u64 {
            let scaled = lab.series.coeff(n) * Rational::from(factorial(n));
            assert_eq!(
                scaled,
                Rational::from(lab.counts[n as usize].clone()),
                "{class} a_L({n})"
            );
        }
        let unl = unlabelled_totals(&spec, 40).unwrap();
        assert!(unl.series.nonnegative_integers().is_ok(), "{class}");
    }
}

#[test]
fn broom_upper_bound_chain_is_an_equality() {
    let p = ClassSpec::builtin("broom").unwrap().p_l().unwrap().clone();
    for k in 1..=15u64 {
        let lhs = p.eval_exact(3 * k).unwrap();
        let binom = factorial(3 * k) / (factorial(k) * factorial(2 * k));
        let bound = Rational::from(UBig::from(2u8).pow(k as usize) * binom * factorial(k));
        assert_eq!(lhs, bound, "k={k}");
        assert_eq!(p.eval_exact(3 * k + 1).unwrap(), Rational::ZERO);
    }
}

#[test]
fn broom_exponent_stays_below_three_quarters() {
    let p = ClassSpec::builtin("broom").unwrap().p_l().unwrap().clone();
    let counts: Vec<UBig> = (0..=150)
        .map(|n| {
            let v = p.eval_exact(n).unwrap();
            UBig::try_from(v.numerator().clone()).unwrap()
        })
        .collect();
    let exps = growth_exponents(&counts, 2, 150);
    assert!(exps.iter().all(|e| e.1 < 0.75));
    // p_L(3n) = 2^n (3n)!/(2n)! grows like n^n, so the exponent falls toward 1/3.
    assert!(exps.windows(2).all(|w| w[1].1 < w[0].1));
    let last = exps.last().unwrap().1;
    assert!(last > 1.0 / 3.0 && last < 0.37, "{last}");
}

#[test]
fn oracle_table_modes_agree() {
    use expsmooth::oracles::oracle_table;
    let par = oracle_table(
        "height1-forests",
        6,
        Side::Labelled,
        Scope::Total,
        ExecMode::Parallel,
    )
    .unwrap();
    let seq = oracle_table(
        "height1-forests",
        6,
        Side::Labelled,
        Scope::Total,
        ExecMode::Sequential,
    )
    .unwrap();
    assert_eq!(par, seq);
}
