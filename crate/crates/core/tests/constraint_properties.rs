mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use semicom::constraints::{pair_count, sample_size};
use semicom::{sample_constraints, seed, ConstraintKind, ConstraintSet, Error, GroundTruth};

/// A hidden labeling of `n` nodes and a set of pairs constrained according to it.
fn labeled_set(max_n: usize) -> impl Strategy<Value = (Vec<usize>, ConstraintSet)> {
    (2..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0..n, n),
                prop::collection::vec((0..n, 0..n), 0..=n * n / 2),
            )
        })
        .prop_map(|(label, pairs)| {
            let n = label.len();
            let mut s = ConstraintSet::new(n);
            for (u, v) in pairs {
                if u != v {
                    let kind = if label[u] == label[v] {
                        ConstraintKind::MustLink
                    } else {
                        ConstraintKind::CannotLink
                    };
                    s.insert(kind, u, v).unwrap();
                }
            }
            (label, s)
        })
}

proptest! {
    #[test]
    fn closure_matches_naive_fixpoint((_, s) in labeled_set(12)) {
        let (ml, cl) = common::naive_closure(s.universe(), s.ml(), s.cl());
        let closed = s.enhance().unwrap().0;
        prop_assert_eq!(closed.ml(), &ml);
        prop_assert_eq!(closed.cl(), &cl);
    }

    #[test]
    fn closure_is_idempotent_and_monotone((_, s) in labeled_set(15)) {
        let once = s.enhance().unwrap().0;
        let twice = once.enhance().unwrap().0;
        prop_assert_eq!(&once, &twice);
        prop_assert!(s.ml().is_subset(once.ml()));
        prop_assert!(s.cl().is_subset(once.cl()));
    }

    #[test]
    fn inferred_pairs_agree_with_hidden_labels((label, s) in labeled_set(15)) {
        let closed = s.enhance().unwrap().0;
        prop_assert!(closed.ml().iter().all(|&(u, v)| label[u] == label[v]));
        prop_assert!(closed.cl().iter().all(|&(u, v)| label[u] != label[v]));
    }

    #[test]
    fn counting_identity((_, s) in labeled_set(15)) {
        let (closed, report) = s.enhance().unwrap();
        let ml_pairs: usize = report.ml_classes.iter().map(|c| pair_count(c.len())).sum();
        prop_assert_eq!(closed.ml().len(), ml_pairs);
        let cl_pairs: usize = report
            .class_cl
            .iter()
            .map(|&(a, b)| report.ml_classes[a].len() * report.ml_classes[b].len())
            .sum();
        prop_assert_eq!(closed.cl().len(), cl_pairs);
        prop_assert_eq!(report.added_ml, closed.ml().len() - s.ml().len());
        prop_assert_eq!(report.added_cl, closed.cl().len() - s.cl().len());
    }

    #[test]
    fn insertion_order_does_not_matter((_, s) in labeled_set(12), shuffle_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rows: Vec<(ConstraintKind, (usize, usize))> = s
            .ml()
            .iter()
            .map(|&p| (ConstraintKind::MustLink, p))
            .chain(s.cl().iter().map(|&p| (ConstraintKind::CannotLink, p)))
            .collect();
        rows.shuffle(&mut seed::rng(shuffle_seed));
        let mut t = ConstraintSet::new(s.universe());
        for (kind, (u, v)) in rows {
            t.insert(kind, v, u).unwrap();
        }
        prop_assert_eq!(t.enhance().unwrap().0, s.enhance().unwrap().0);
    }

    #[test]
    fn sampled_sets_are_sized_and_sound(
        label in prop::collection::vec(0usize..4, 2..40),
        fraction in 0.0f64..=1.0,
        s in any::<u64>(),
    ) {
        let gt = GroundTruth::from_assignment(&label);
        let sample = sample_constraints(&gt, label.len(), fraction, &mut seed::rng(s)).unwrap();
        prop_assert_eq!(sample.len(), sample_size(fraction, pair_count(label.len())));
        prop_assert!(sample.is_consistent());
        prop_assert!(sample.ml().iter().all(|&(u, v)| label[u] == label[v]));
        prop_assert!(sample.cl().iter().all(|&(u, v)| label[u] != label[v]));
    }
}

#[test]
fn contradictions_are_reported() {
    // 0~1, 1~2 but 0 and 2 cannot link.
    let s = ConstraintSet::from_pairs(3, [(0, 1), (1, 2)], [(0, 2)]).unwrap();
    match s.enhance() {
        Err(Error::Contradiction(c)) => assert!(!c.is_empty()),
        other => panic!("expected a contradiction, got {other:?}"),
    }
}

#[test]
fn football_sample_sizes() {
    let m = 110;
    assert_eq!(pair_count(m), 5995);
    assert_eq!(sample_size(0.05, 5995), 300);
    assert_eq!(sample_size(0.20, 5995), 1199);
    assert_eq!(sample_size(1.0, 5995), 5995);
}

#[test]
fn full_sample_closes_to_every_labeled_pair() {
    // Two unlabeled nodes stay untouched.
    let mut rows: Vec<(usize, Option<&str>)> =
        (0..20).map(|i| (i, Some(["a", "b", "c"][i % 3]))).collect();
    rows.push((20, None));
    rows.push((21, None));
    let text: String = rows
        .iter()
        .map(|(i, l)| format!("{}\t{}\n", i + 1, l.unwrap_or("-")))
        .collect();
    let gt = GroundTruth::parse_labels(&text).unwrap();
    let sample = sample_constraints(&gt, 22, 1.0, &mut seed::rng(3)).unwrap();
    let closed = sample.enhance().unwrap().0;
    assert_eq!(closed.len(), pair_count(20));
    let touched: BTreeMap<usize, ()> = closed
        .ml()
        .iter()
        .chain(closed.cl())
        .flat_map(|&(u, v)| [(u, ()), (v, ())])
        .collect();
    assert!(!touched.contains_key(&20) && !touched.contains_key(&21));
}
