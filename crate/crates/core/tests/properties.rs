use largecolor::braid::{alexander, burau};
use largecolor::{BiSeries, BraidWord, Rational};
use proptest::prelude::*;

fn series() -> impl Strategy<Value = BiSeries> {
    prop::collection::vec((-8i32..8, -6i32..6, -5i64..6, 1i64..4), 0..8).prop_map(|ts| {
        BiSeries::from_terms(ts.into_iter().map(|(q2, x2, n, d)| (q2, x2, Rational::new(n.into(), d.into()))))
    })
}

fn knot_word(strands: usize) -> impl Strategy<Value = BraidWord> {
    let g = strands as i32 - 1;
    prop::collection::vec((1..=g, any::<bool>()), 1..9)
        .prop_map(move |ls| BraidWord::new(strands, ls.into_iter().map(|(l, s)| if s { l } else { -l }).collect()).unwrap())
        .prop_filter("knot closure", |b| b.is_knot())
}

proptest! {
    #[test]
    fn text_round_trip(s in series()) {
        prop_assert_eq!(BiSeries::parse_text(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn multiplication_is_associative_and_distributive(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn burau_braid_relations(i in 1i32..3, j in 1i32..4) {
        let w = |ls: Vec<i32>| burau(&BraidWord::new(4, ls).unwrap());
        prop_assert_eq!(w(vec![i, i + 1, i]), w(vec![i + 1, i, i + 1]));
        prop_assert_eq!(w(vec![i, -i]), w(vec![]));
        if (i - j).abs() > 1 {
            prop_assert_eq!(w(vec![i, j]), w(vec![j, i]));
        }
    }

    #[test]
    fn alexander_is_a_markov_invariant(b in knot_word(3), k in 0usize..8, positive in any::<bool>()) {
        let d = alexander(&b).unwrap();
        prop_assert_eq!(&alexander(&b.rotate(k % b.len())).unwrap(), &d);
        prop_assert_eq!(&alexander(&b.stabilize(positive)).unwrap(), &d);
    }
}
