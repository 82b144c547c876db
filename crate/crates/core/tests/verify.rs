use largecolor::statesum::fk_positive;
use largecolor::verify::{
    finite_color_consistency, random_positive_knots, run_suite, Suite, VerifyOptions,
};
use largecolor::BraidWord;

fn small() -> VerifyOptions {
    VerifyOptions { random_braids: 6, max_strands: 3, max_letters: 7, max_weight: 2, finite_x_order: 12, ..Default::default() }
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert!("nonsense".parse::<Suite>().is_err());
}

#[test]
fn random_braids_are_deterministic_knots() {
    let a = random_positive_knots(7, 20, 4, 12);
    let b = random_positive_knots(7, 20, 4, 12);
    assert_eq!(a.len(), 20);
    assert_eq!(a, b);
    for w in &a {
        assert!(w.is_positive());
        assert!(w.strands() <= 4 && w.len() <= 12);
        assert!(w.is_knot());
    }
    assert_ne!(a, random_positive_knots(8, 20, 4, 12));
}

#[test]
fn small_suites_pass() {
    let opts = small();
    for s in [Suite::YangBaxter, Suite::Markov, Suite::ClassicalLimit] {
        let r = run_suite(s, &opts);
        let bad: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
        assert!(r.passed(), "{s}: {bad:?}");
        assert_eq!(r.to_json()["suite"], s.name());
    }
}

#[test]
fn trefoil_finite_color_needs_the_balanced_form() {
    let b = BraidWord::parse("1,1,1", 2).unwrap();
    let f = fk_positive(&b, 20).unwrap();
    for n in [2, 3] {
        let r = finite_color_consistency(&f.series, &b, n).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.compared_terms, r.target_terms);
        assert!(r.minus_mismatches > 0);
    }
}
