use std::collections::BTreeMap;

use largecolor::algebra::{BiSeries, MultiSeries, Rational, Window};
use largecolor::braid::BraidWord;
use largecolor::closedform::{lovejoy_osburn_fk, DoubleTwistSpec};
use largecolor::knots::{
    whitehead_f1_displayed, whitehead_f1_listed, M52_INTEGRAL_SURGERIES, M52_INVERSE_SURGERIES, WHITEHEAD_ROWS,
};
use largecolor::statesum::{fk_multivariable, fk_positive, Exactness, Expansion, FkResult, StratifiedOptions};
use largecolor::surgery::*;
use largecolor::Error;
use num_traits::Zero;

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn twist(m: u32, p: u32, x_order: i32, q_order: i32) -> FkResult {
    let (series, _) = lovejoy_osburn_fk(DoubleTwistSpec::Full { m, p }, x_order, q_order).unwrap();
    FkResult { series, expansion: Expansion::Positive, exactness: Exactness::Stabilized { q_valid2: 2 * q_order + 1 }, strata_used: 0 }
}

#[test]
fn exceptional_surgeries_on_m52() {
    let f = twist(2, 1, 21, 100);
    for (p, rows) in M52_INTEGRAL_SURGERIES {
        let bundles = laplace_knot(&f, *p, 1).unwrap();
        let unit = relative_unit(&bundles, rows).unwrap();
        assert!(unit.is_some(), "p = {p}: {:?}", bundles.iter().map(|b| b.to_text()).collect::<Vec<_>>());
        for row in rows.iter() {
            let terms = q_terms(&BiSeries::parse_text(row.text).unwrap());
            let order = Rational::from_integer(row.q_order.into());
            let b = bundles.iter().find(|b| b.agrees_with(&terms, Some(&order))).expect("row matched");
            assert!(b.q_valid.as_ref().unwrap() >= &Rational::from_integer(row.q_order.into()), "p = {p}: {}", b.to_text());
        }
    }
}

#[test]
fn inverse_surgeries_on_m52_with_conventional_unit() {
    let f = twist(2, 1, 6, 40);
    for (r, row) in M52_INVERSE_SURGERIES {
        let bundles = laplace_knot(&f, -1, *r).unwrap();
        assert_eq!(bundles.len(), 1);
        let b = &bundles[0];
        let terms = q_terms(&BiSeries::parse_text(row.text).unwrap());
        assert!(b.agrees_with(&terms, Some(&Rational::from_integer(row.q_order.into()))), "r = {r}: {}", b.to_text());
        assert!(b.q_valid.as_ref().unwrap() >= &Rational::from_integer(row.q_order.into()));
        assert_eq!(b.sign, row.sign);
        assert_eq!(&b.offset + inverse_surgery_normalization(*r), frac(row.d.0, row.d.1), "r = {r}");
    }
}

#[test]
fn minus_one_surgery_on_k22_matches_minus_half_on_k21() {
    let k22 = twist(2, 2, 4, 30);
    let k21 = twist(2, 1, 4, 30);
    let a = &laplace_knot(&k22, -1, 1).unwrap()[0];
    let b = &laplace_knot(&k21, -1, 2).unwrap()[0];
    assert!(a.agrees_with(&b.terms, b.q_valid.as_ref()), "{}\n{}", a.to_text(), b.to_text());
    let (_, row) = M52_INVERSE_SURGERIES[0];
    let printed = q_terms(&BiSeries::parse_text(row.text).unwrap());
    assert!(a.agrees_with(&printed, Some(&Rational::from_integer(row.q_order.into()))));
}

#[test]
fn positive_surgery_on_f_plus_diverges() {
    let f = twist(2, 1, 3, 10);
    assert!(matches!(laplace_knot(&f, 1, 1), Err(Error::DivergentDirection(_))));
    assert!(matches!(laplace_knot(&f, 2, 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn certified_coefficients_survive_a_larger_window() {
    let small = laplace_knot(&twist(2, 1, 6, 40), -2, 1).unwrap();
    let large = laplace_knot(&twist(2, 1, 10, 70), -2, 1).unwrap();
    for (s, l) in small.iter().zip(&large) {
        assert_eq!(s.spinc_label, l.spinc_label);
        assert!(l.agrees_with(&s.terms, s.q_valid.as_ref()));
        assert!(l.q_valid >= s.q_valid);
    }
}

#[test]
fn one_component_link_is_knot_surgery() {
    let f = twist(2, 1, 8, 50);
    let m = MultiSeries::from_biseries(&f.series, "x");
    for p in [-1, -2, -3] {
        let knot = laplace_knot(&f, p, 1).unwrap();
        let link = laplace_link(&m, &[vec![p as i64]]).unwrap();
        assert_eq!(knot.len(), link.len());
        for (k, l) in knot.iter().zip(&link) {
            assert_eq!(k.spinc_label, l.spinc_label);
            assert_eq!((k.sign, &k.offset), (l.sign, &l.offset));
            assert!(k.agrees_with(&l.terms, l.q_valid.as_ref()));
        }
    }
}

#[test]
fn indefinite_linking_matrix_diverges() {
    let b = BraidWord::parse("1,1,1,1", 2).unwrap();
    let m = fk_multivariable(&b, &[0, 1], &["x", "y"], &[3, 3], &StratifiedOptions { q_order: 12, ..Default::default() })
        .unwrap();
    assert!(matches!(laplace_link(&m.series, &[vec![1, 2], vec![2, -1]]), Err(Error::DivergentDirection(_))));
    let ok = laplace_link(&m.series, &[vec![-3, 2], vec![2, -3]]).unwrap();
    assert_eq!(ok.len(), 5);
    assert!(ok.iter().any(|b| b.sign != 0));
}

#[test]
fn torus_link_surgery_gives_torus_knots() {
    let b = BraidWord::parse("1,1,1,1", 2).unwrap();
    let t42 = fk_multivariable(&b, &[0, 1], &["x", "y"], &[7, 7], &StratifiedOptions { q_order: 40, ..Default::default() })
        .unwrap();
    for r in 1..=2 {
        let ps = partial_surgery(&t42.series, 0, r, &[2]).unwrap();
        let knot = surgered_knot(&ps).unwrap();
        let word = vec!["1"; 2 * r as usize + 1].join(",");
        let direct = fk_positive(&BraidWord::parse(&word, 2).unwrap(), 7).unwrap();
        let unit = unit_between(&knot.series, &direct.series);
        assert!(unit.is_some(), "r = {r}: {} vs {}", knot.series, direct.series);
        assert!(knot.series.len() >= 3);
    }
}

fn twist_family(r: i32) -> largecolor::Result<FkResult> {
    Ok(twist(r as u32, 1, 3, 26 * r + 4))
}

#[test]
fn whitehead_from_twist_knots() {
    let opts = ReverseOptions { x_order: 4, y_order: 2, r_values: vec![3, 4] };
    let wh = reverse_engineer(twist_family, 0, &opts).unwrap();
    let one = BiSeries::parse_text("1").unwrap();
    for i in 0..=4 {
        assert_eq!(wh.coefficient(i, 0), Some(&one), "f_({i},0)");
    }
    for (j, row) in WHITEHEAD_ROWS {
        for (i, text) in row.iter().enumerate() {
            let printed = BiSeries::parse_text(text).unwrap();
            assert_eq!(wh.coefficient(i as i32, *j).unwrap(), &printed, "f_({i},{j})");
        }
    }
    // The two printed closed forms for f_{i,1} differ; the recovered values follow the
    // list form `(q^{i+1} + q^{-i} - 2)/(q - 1)` and not the displayed one.
    for i in 1..=4 {
        let got = wh.coefficient(i, 1).unwrap();
        assert_eq!(Some(got.clone()), whitehead_f1_listed(i));
        assert_ne!(Some(got.clone()), whitehead_f1_displayed(i));
    }
    // Symmetry of the link, and the classical limit 1/((x^{1/2}-x^{-1/2})(y^{1/2}-y^{-1/2})).
    for i in 0..=2 {
        for j in 0..=2 {
            assert_eq!(wh.coefficient(i, j), wh.coefficient(j, i));
            assert_eq!(wh.coefficient(i, j).unwrap().sum_coeffs(), Rational::from_integer(1.into()));
        }
    }
}

#[test]
fn whitehead_surgery_returns_the_twist_knot() {
    let opts = ReverseOptions { x_order: 4, y_order: 2, r_values: vec![3, 4] };
    let wh = reverse_engineer(twist_family, 0, &opts).unwrap().to_multiseries(["x", "y"]);
    let ps = partial_surgery(&wh, 0, 2, &[0]).unwrap();
    let k = surgered_knot(&ps).unwrap();
    let direct = twist(2, 1, 3, 30);
    assert!(unit_between(&k.series, &direct.series).is_some(), "{}\n{}", k.series, direct.series);
}

#[test]
fn reverse_engineering_round_trip() {
    let mut f = BTreeMap::new();
    f.insert((0, 0), "1");
    f.insert((1, 0), "2 - q");
    f.insert((0, 1), "q^(-1) + 3");
    f.insert((1, 1), "-q^2 + q^(-2)");
    let mut link = MultiSeries::zero(&["x", "y"]).with_windows(&[Window::at_most(6), Window::at_most(6)]);
    for (&(i, j), t) in &f {
        for (q2, _, c) in BiSeries::parse_text(t).unwrap().terms() {
            link.add_term(2 * q2, &[4 * i + 2, 4 * j + 2], c.clone());
        }
    }
    let family = |r: i32| surgered_knot(&partial_surgery(&link, 0, r, &[0])?);
    let got = reverse_engineer(family, 0, &ReverseOptions { x_order: 1, y_order: 1, r_values: vec![4, 6] }).unwrap();
    for (&(i, j), t) in &f {
        assert_eq!(got.coefficient(i, j).unwrap(), &BiSeries::parse_text(t).unwrap(), "f_({i},{j})");
    }
}

#[test]
fn r_independent_family_is_rejected() {
    let fixed = twist(2, 1, 3, 80);
    let family = |_: i32| Ok(fixed.clone());
    let err = reverse_engineer(family, 0, &ReverseOptions { x_order: 2, y_order: 0, r_values: vec![2, 3] }).unwrap_err();
    assert!(matches!(err, Error::InconsistentFamily(_) | Error::InsufficientRange(_)), "{err}");
    let single = reverse_engineer(twist_family, 0, &ReverseOptions { x_order: 1, y_order: 0, r_values: vec![3] });
    assert!(matches!(single, Err(Error::InsufficientRange(_))));
}

#[test]
fn inverse_normalization_values() {
    assert_eq!(inverse_surgery_normalization(2), frac(-5, 8));
    assert!(!inverse_surgery_normalization(1).is_zero());
}
