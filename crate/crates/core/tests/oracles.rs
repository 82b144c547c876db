use std::collections::BTreeMap;

use largecolor::braid::{alexander, BraidWord};
use largecolor::closedform::{lovejoy_osburn_fk, mseries_f0_f1, DoubleTwistSpec};
use largecolor::jones::{check_annihilator, colored_jones, kashaev, strange_series, YhatConvention};
use largecolor::knots::{self, Printed, M_SEVEN_3, SMALL_KNOTS};
use largecolor::statesum::{fk_multivariable, fk_positive, fk_stratified, Module, StratifiedOptions};
use largecolor::{BiSeries, Rational};
use num_complex::Complex64;
use num_traits::Zero;

// ---------------------------------------------------------------------------
// Kauffman bracket of a braid closure
// ---------------------------------------------------------------------------

fn find(p: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while p[r] != r {
        r = p[r];
    }
    let mut i = i;
    while p[i] != r {
        let n = p[i];
        p[i] = r;
        i = n;
    }
    r
}

/// Jones polynomial `V(t)` as `t`-exponent -> coefficient, from `(-A^3)^{-w} <D>`, `t = A^{-4}`.
fn jones_by_bracket(b: &BraidWord) -> BTreeMap<i32, i64> {
    let n = b.strands();
    let letters = b.letters();
    let l = letters.len();
    // node (p, level) for level 0..l; level l is glued to level 0
    let node = |p: usize, t: usize| p + n * (t % l.max(1));
    let mut bracket: BTreeMap<i32, i64> = BTreeMap::new();
    for state in 0..(1u32 << l) {
        let mut parent: Vec<usize> = (0..n * l.max(1)).collect();
        let mut a_exp = 0;
        for (t, &letter) in letters.iter().enumerate() {
            let i = letter.unsigned_abs() as usize - 1;
            for p in (0..n).filter(|&p| p != i && p != i + 1) {
                let (x, y) = (find(&mut parent, node(p, t)), find(&mut parent, node(p, t + 1)));
                parent[x] = y;
            }
            let a_smoothing = state & (1 << t) == 0;
            a_exp += if a_smoothing { 1 } else { -1 };
            // for a positive letter the A-smoothing joins the strands vertically
            let vertical = a_smoothing == (letter > 0);
            let pairs = if vertical {
                [(node(i, t), node(i, t + 1)), (node(i + 1, t), node(i + 1, t + 1))]
            } else {
                [(node(i, t), node(i + 1, t)), (node(i, t + 1), node(i + 1, t + 1))]
            };
            for (u, v) in pairs {
                let (x, y) = (find(&mut parent, u), find(&mut parent, v));
                parent[x] = y;
            }
        }
        let loops = (0..parent.len()).filter(|&i| find(&mut parent, i) == i).count();
        // A^{a_exp} (-A^2 - A^{-2})^{loops - 1}
        let mut term: BTreeMap<i32, i64> = BTreeMap::from([(a_exp, 1)]);
        for _ in 1..loops {
            let mut next = BTreeMap::new();
            for (e, c) in &term {
                *next.entry(e + 2).or_insert(0) -= c;
                *next.entry(e - 2).or_insert(0) -= c;
            }
            term = next;
        }
        for (e, c) in term {
            *bracket.entry(e).or_insert(0) += c;
        }
    }
    let w = b.writhe();
    let sign = if w % 2 == 0 { 1 } else { -1 };
    bracket
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(e, c)| {
            let e = e - 3 * w;
            assert_eq!(e % 4, 0, "bracket exponent not divisible by 4");
            (-e / 4, sign * c)
        })
        .collect()
}

fn q_poly(s: &BiSeries) -> BTreeMap<i32, i64> {
    s.terms()
        .map(|(q2, x2, c)| {
            assert_eq!(x2, 0);
            assert_eq!(q2 % 2, 0);
            (q2 / 2, c.to_integer().try_into().unwrap())
        })
        .collect()
}

fn invert_t(v: &BTreeMap<i32, i64>) -> BTreeMap<i32, i64> {
    v.iter().map(|(e, c)| (-e, *c)).collect()
}

#[test]
fn two_colored_jones_matches_kauffman_bracket() {
    let mut words: Vec<(String, BraidWord)> = SMALL_KNOTS
        .iter()
        .map(|&(name, s, w)| (name.to_string(), BraidWord::parse(w, s).unwrap()))
        .collect();
    for f in knots::braid_fixtures() {
        words.push((f.name.to_string(), f.braid().unwrap()));
    }
    // the trefoil pins the variable: colored_jones(q) = V(t = 1/q)
    let trefoil = &words[0].1;
    assert_eq!(invert_t(&jones_by_bracket(trefoil)), q_poly(&colored_jones(trefoil, 2, true).unwrap()));
    for (name, b) in &words {
        let j = q_poly(&colored_jones(b, 2, true).unwrap());
        assert_eq!(j, invert_t(&jones_by_bracket(b)), "{name}");
    }
}

#[test]
fn bracket_oracle_sees_chirality() {
    let right = BraidWord::parse("1,1,1", 2).unwrap();
    assert_eq!(jones_by_bracket(&right), BTreeMap::from([(1, 1), (3, 1), (4, -1)]));
    assert_eq!(jones_by_bracket(&right.mirror()), BTreeMap::from([(-1, 1), (-3, 1), (-4, -1)]));
}

#[test]
fn unreduced_is_reduced_times_quantum_integer() {
    let b = BraidWord::parse("1,1,1,2,-1,2", 3).unwrap();
    for n in 1..=4 {
        let red = colored_jones(&b, n, true).unwrap();
        let unred = colored_jones(&b, n, false).unwrap();
        let qint = BiSeries::from_terms(
            (0..n as i32).map(|k| (n as i32 - 1 - 2 * k, 0, Rational::from_integer(1.into()))),
        );
        assert_eq!(unred, &red * &qint, "n = {n}");
    }
}

// ---------------------------------------------------------------------------
// Alexander polynomials
// ---------------------------------------------------------------------------

#[test]
fn alexander_matches_knot_tables() {
    let table: &[(&str, &str)] = &[
        ("3_1", "x - 1 + x^(-1)"),
        ("4_1", "-x + 3 - x^(-1)"),
        ("5_1", "x^2 - x + 1 - x^(-1) + x^(-2)"),
        ("5_2", "2*x - 3 + 2*x^(-1)"),
        ("7_1", "x^3 - x^2 + x - 1 + x^(-1) - x^(-2) + x^(-3)"),
        ("8_19", "x^3 - x^2 + 1 - x^(-2) + x^(-3)"),
    ];
    for &(name, s, w) in SMALL_KNOTS {
        let b = BraidWord::parse(w, s).unwrap();
        let expected = table.iter().find(|t| t.0 == name).unwrap().1;
        assert_eq!(alexander(&b).unwrap(), BiSeries::parse_text(expected).unwrap(), "{name}");
        assert_eq!(alexander(&b.mirror()).unwrap(), alexander(&b).unwrap(), "{name} mirror");
    }
}

// ---------------------------------------------------------------------------
// Kashaev invariant
// ---------------------------------------------------------------------------

#[test]
fn trefoil_kashaev_is_q_times_a_truncated_pochhammer_sum() {
    let b = BraidWord::parse("1,1,1", 2).unwrap();
    for n in 2..=7u32 {
        let q = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        let mut poch = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..n {
            sum += poch;
            poch *= Complex64::new(1.0, 0.0) - q.powu(k + 1);
        }
        let v = kashaev(&b, n).unwrap();
        // same q prefactor as the strange series -(q/2) Σ m (12/m) q^{(m²-1)/24}
        let expected = q * sum;
        assert!((v.value - expected).norm() < 1e-9 + v.error_bound, "n = {n}: {} vs {expected}", v.value);
    }
}

// ---------------------------------------------------------------------------
// Strange identities
// ---------------------------------------------------------------------------

fn kronecker12(m: i32) -> i32 {
    match m.rem_euclid(12) {
        1 | 11 => 1,
        5 | 7 => -1,
        _ => 0,
    }
}

/// `-(q/2) Σ m (12/m) q^{(m²-1)/24}` through `q^{order}`.
fn eichler(order: i32) -> BTreeMap<i32, Rational> {
    let mut out = BTreeMap::new();
    let mut m = 1;
    while (m * m - 1) / 24 + 1 <= order {
        let k = kronecker12(m);
        if k != 0 {
            let e = (m * m - 1) / 24 + 1;
            *out.entry(e).or_insert_with(Rational::zero) += Rational::new((-m * k).into(), 2.into());
        }
        m += 1;
    }
    out
}

fn integer_terms(s: &BiSeries, below: i32) -> BTreeMap<i32, Rational> {
    s.terms()
        .filter(|t| t.0 < 2 * below)
        .map(|(q2, x2, c)| {
            assert_eq!((x2, q2 % 2), (0, 0));
            (q2 / 2, c.clone())
        })
        .collect()
}

#[test]
fn trefoil_strange_series_is_the_eichler_form() {
    let b = BraidWord::parse("1,1,1", 2).unwrap();
    let s = strange_series(&fk_positive(&b, 17).unwrap()).unwrap();
    assert!(s.q_valid2().unwrap() > 2 * 50, "certified only below q2 = {:?}", s.q_valid2());
    assert_eq!(integer_terms(&s, 51), eichler(50));
    let printed = BiSeries::parse_text("-1/2*q + 5/2*q^2 + 7/2*q^3 - 11/2*q^6").unwrap();
    assert_eq!(integer_terms(&s, 7), integer_terms(&printed, 7));
}

#[test]
fn ten_139_strange_series_leading_terms() {
    let b = BraidWord::parse("1,1,1,1,2,1,1,1,2,2", 3).unwrap();
    let s = strange_series(&fk_positive(&b, 9).unwrap()).unwrap();
    assert!(s.q_valid2().unwrap() > 2 * 8);
    let printed = BiSeries::parse_text("-7/2*q^4 + 13*q^6 - 15/2*q^7 + 17/2*q^8").unwrap();
    assert_eq!(integer_terms(&s, 9), integer_terms(&printed, 9));
}

// ---------------------------------------------------------------------------
// m(5_2) and double twist closed forms
// ---------------------------------------------------------------------------

fn m52() -> BraidWord {
    knots::M_FIVE_2.braid().unwrap()
}

fn stratified(b: &BraidWord, x: i32, q: i32) -> largecolor::FkResult {
    fk_stratified(b, Module::Lw, &StratifiedOptions { x_order: x, q_order: q, max_strata: 80, ..Default::default() })
        .unwrap()
}

#[test]
fn m52_closed_forms_match_the_state_sum_and_lovejoy_osburn() {
    let (f0, f1) = mseries_f0_f1(100);
    let (lo, _) = lovejoy_osburn_fk(DoubleTwistSpec::Full { m: 2, p: 1 }, 1, 100).unwrap();
    assert!(lo.x_coeff(1).diff_on_overlap(&f0).is_zero());
    assert!(lo.x_coeff(3).diff_on_overlap(&f1).is_zero());
    assert!(lo.x_coeff(1).q_valid2().unwrap() >= 2 * 100);
    let f = stratified(&m52(), 1, 40);
    assert!(f.f_coefficient(0).diff_on_overlap(&f0).is_zero());
    assert!(f.f_coefficient(1).diff_on_overlap(&f1).is_zero());
    assert!(!f.f_coefficient(1).is_zero());
}

#[test]
fn m52_printed_coefficients() {
    let f = stratified(&m52(), 3, 35);
    let Printed::Coeffs(cs) = knots::M_FIVE_2.printed else { unreachable!() };
    for c in cs {
        let printed = c.series().unwrap();
        let got = f.f_coefficient(c.m);
        assert!(got.diff_on_overlap(&printed).is_zero(), "f_{}", c.m);
        assert!(got.q_valid2() >= printed.q_valid2(), "f_{}", c.m);
    }
}

#[test]
fn m52_recursions_hold() {
    let f = stratified(&m52(), 3, 30);
    for (m, den, c0, c1) in knots::m52_recursions() {
        let lhs = &den * &f.f_coefficient(m);
        let rhs = &(&c0 * &f.f_coefficient(0)) + &(&c1 * &f.f_coefficient(1));
        assert!(lhs.diff_on_overlap(&rhs).is_zero(), "f_{m}");
        assert!(lhs.q_valid2().unwrap() > 20);
    }
}

#[test]
fn m52_operator_annihilates_under_one_convention() {
    let f = stratified(&m52(), 6, 14);
    let corrected = check_annihilator(&knots::m52_quantum_a_polynomial_corrected(YhatConvention::QShift), &f).unwrap();
    assert_eq!(corrected.annihilating(), vec![YhatConvention::QShift]);
    let printed = check_annihilator(&knots::m52_quantum_a_polynomial(YhatConvention::QShift), &f).unwrap();
    assert!(printed.annihilating().is_empty());
}

#[test]
fn lovejoy_osburn_k21_equals_the_state_sum() {
    let (lo, _) = lovejoy_osburn_fk(DoubleTwistSpec::Full { m: 2, p: 1 }, 3, 12).unwrap();
    let f = stratified(&m52(), 3, 12);
    let d = lo.diff_on_overlap(&f.series);
    assert!(d.is_zero(), "{d}");
    for m in 0..=3 {
        assert!(!f.f_coefficient(m).is_zero());
    }
}

#[test]
fn lovejoy_osburn_half_twist_gives_m73_rows() {
    let Printed::Coeffs(cs) = M_SEVEN_3.printed else { unreachable!() };
    let x_order = cs.iter().map(|c| c.m).max().unwrap();
    let q_order = cs.iter().filter_map(|c| c.q_order).max().unwrap();
    let (lo, _) = lovejoy_osburn_fk(DoubleTwistSpec::Half { m: 1, p: 2 }, x_order, q_order).unwrap();
    for c in cs {
        let printed = c.series().unwrap();
        let got = lo.x_coeff(2 * c.m + 1);
        assert!(got.diff_on_overlap(&printed).is_zero(), "f_{}", c.m);
        if let Some(v) = printed.q_valid2() {
            assert!(got.q_valid2().unwrap() >= v, "f_{} certified only to {:?}", c.m, got.q_valid2());
        }
    }
}

// ---------------------------------------------------------------------------
// T(4,2)
// ---------------------------------------------------------------------------

#[test]
fn t42_diagonal_up_to_unit() {
    let b = BraidWord::parse("1,1,1,1", 2).unwrap();
    let opts = StratifiedOptions { x_order: 6, q_order: 30, max_strata: 60, ..Default::default() };
    let f = fk_multivariable(&b, &[0, 1], &["x", "y"], &[6, 6], &opts).unwrap();
    let terms: Vec<(i32, Vec<i32>, Rational)> = f.series.terms().map(|(q4, x4, c)| (q4, x4.to_vec(), c.clone())).collect();
    assert!(terms.iter().all(|(_, x4, _)| x4[0] == x4[1]), "off-diagonal terms present");
    let diagonal = knots::t42_diagonal(7);
    // F^- carries x^{-(m+1/2)} y^{-(m+1/2)} where the closed form has x^{m+1/2} y^{m+1/2}
    let unit = {
        let (q4, _, c) = terms.iter().find(|t| t.1[0] == -2).unwrap();
        (q4 - 4 * diagonal[0].2, c.clone() * Rational::from_integer(diagonal[0].1.into()))
    };
    for &(m, sign, q) in &diagonal {
        let x4 = -(4 * m + 2);
        let got: Vec<_> = terms.iter().filter(|t| t.1[0] == x4).collect();
        assert_eq!(got.len(), 1, "m = {m}");
        assert_eq!(got[0].0, 4 * q + unit.0, "m = {m}");
        assert_eq!(got[0].2, unit.1.clone() * Rational::from_integer(sign.into()), "m = {m}");
    }
    assert_eq!(unit, (6, Rational::from_integer(1.into())));
}
