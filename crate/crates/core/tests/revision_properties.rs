use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;
use semicom::benchgen::{generate_gn, GnParams};
use semicom::{build_variant, revise, sample_constraints, seed, ConstraintSet, Graph, Variant};

type Pairs = BTreeSet<(usize, usize)>;

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// One application of the one-step rules to every pair at once:
/// `ML(i,k) ∧ ML(k,j) ⇒ ML(i,j)` and `ML(i,k) ∧ CL(k,j) ⇒ CL(i,j)`.
fn one_step(n: usize, ml: &Pairs, cl: &Pairs) -> (Pairs, Pairs) {
    let has = |s: &Pairs, a: usize, b: usize| a != b && s.contains(&key(a, b));
    let mut next_ml = ml.clone();
    let mut next_cl = cl.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if has(ml, i, k) && has(ml, k, j) {
                    next_ml.insert((i, j));
                }
                if (has(ml, i, k) && has(cl, k, j)) || (has(ml, j, k) && has(cl, k, i)) {
                    next_cl.insert((i, j));
                }
            }
        }
    }
    (next_ml, next_cl)
}

/// Builds the matrix by hand: `alpha` on ML, `0` on CL, the adjacency
/// (with unit diagonal) elsewhere.
fn matrix_by_hand(g: &Graph, ml: &Pairs, cl: &Pairs, alpha: f64) -> DMatrix<f64> {
    let n = g.node_count();
    DMatrix::from_fn(n, n, |i, j| {
        if i != j && ml.contains(&key(i, j)) {
            alpha
        } else if i != j && cl.contains(&key(i, j)) {
            0.0
        } else if i == j || g.has_edge(i, j) {
            1.0
        } else {
            0.0
        }
    })
}

fn instance(n_seed: u64, fraction: f64) -> (Graph, ConstraintSet) {
    let p = GnParams {
        z_in: 4.0,
        z_out: 2.0,
        groups: 3,
        group_size: 8,
    };
    let (g, gt) = generate_gn(&p, n_seed).unwrap();
    let s = sample_constraints(
        &gt,
        g.node_count(),
        fraction,
        &mut seed::rng(n_seed ^ 0xABCD),
    )
    .unwrap();
    (g, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterated_one_step_rules_give_b2(graph_seed in any::<u64>(), fraction in 0.0f64..0.3) {
        let (g, s) = instance(graph_seed, fraction);
        let n = g.node_count();
        let (mut ml, mut cl) = (s.ml().clone(), s.cl().clone());
        loop {
            let (next_ml, next_cl) = one_step(n, &ml, &cl);
            if next_ml == ml && next_cl == cl {
                break;
            }
            ml = next_ml;
            cl = next_cl;
        }
        let b2 = build_variant(&g.adjacency(), &s, Variant::B2, 2.0).unwrap();
        prop_assert_eq!(b2.matrix(), &matrix_by_hand(&g, &ml, &cl, 2.0));
        let b1 = build_variant(&g.adjacency(), &s, Variant::B1, 2.0).unwrap();
        prop_assert_eq!(b1.matrix(), &matrix_by_hand(&g, s.ml(), s.cl(), 2.0));
    }

    #[test]
    fn entries_symmetric_and_in_domain(graph_seed in any::<u64>(), fraction in 0.0f64..0.5, alpha in 1.5f64..4.0) {
        let (g, s) = instance(graph_seed, fraction);
        let a = g.adjacency();
        for v in Variant::ALL {
            let b = build_variant(&a, &s, v, alpha).unwrap();
            let m = b.matrix();
            prop_assert_eq!(m, &m.transpose());
            prop_assert!(m.iter().all(|&x| x == 0.0 || x == 1.0 || x == alpha));
            prop_assert!((0..m.nrows()).all(|i| m[(i, i)] == 1.0));
        }
        let changed = |v| build_variant(&a, &s, v, alpha).unwrap().changed_entries(&a);
        prop_assert!(changed(Variant::B1) <= changed(Variant::B2));
        prop_assert!(changed(Variant::B1Ml) <= changed(Variant::B2Ml));
        prop_assert_eq!(changed(Variant::A), 0);
    }

    #[test]
    fn one_sided_variants_keep_one_kind(graph_seed in any::<u64>(), fraction in 0.05f64..0.3) {
        let (g, s) = instance(graph_seed, fraction);
        let a = g.adjacency();
        let b1_ml = build_variant(&a, &s, Variant::B1Ml, 2.0).unwrap();
        let b1_cl = build_variant(&a, &s, Variant::B1Cl, 2.0).unwrap();
        let ml_only = ConstraintSet::from_pairs(s.universe(), s.ml().iter().copied(), []).unwrap();
        let cl_only = ConstraintSet::from_pairs(s.universe(), [], s.cl().iter().copied()).unwrap();
        prop_assert_eq!(&b1_ml, &revise(&a, &ml_only, 2.0).unwrap());
        prop_assert_eq!(&b1_cl, &revise(&a, &cl_only, 2.0).unwrap());
        let b2_ml = build_variant(&a, &s, Variant::B2Ml, 2.0).unwrap();
        prop_assert!(b2_ml.matrix().iter().zip(a.matrix().iter()).all(|(b, a)| *b >= *a));
    }
}

#[test]
fn revision_rejects_contradictions_and_bad_alpha() {
    let g = Graph::from_edges(3, [(0, 1)]).unwrap();
    let bad = ConstraintSet::from_pairs(3, [(0, 1)], [(0, 1)]).unwrap();
    assert!(revise(&g.adjacency(), &bad, 2.0).is_err());
    let ok = ConstraintSet::from_pairs(3, [(0, 2)], []).unwrap();
    assert!(revise(&g.adjacency(), &ok, 0.0).is_err());
    assert!(revise(&g.adjacency(), &ok, 2.0).is_ok());
}

#[test]
fn figure_four_example_matrix() {
    // Nodes 1..7 of the illustrative example, 0-based, on a complete graph so
    // every zero comes from a cannot-link.
    let g = Graph::from_edges(7, (0..7).flat_map(|u| ((u + 1)..7).map(move |v| (u, v)))).unwrap();
    let s = ConstraintSet::from_pairs(7, [(2, 4), (3, 4)], [(2, 6)]).unwrap();
    let b2 = build_variant(&g.adjacency(), &s, Variant::B2, 2.0).unwrap();
    let m = b2.matrix();
    assert_eq!(m[(2, 3)], 2.0);
    assert_eq!(m[(3, 6)], 0.0);
    assert_eq!(m[(4, 6)], 0.0);
    assert_eq!(m[(6, 4)], 0.0);
    assert_eq!(m[(2, 6)], 0.0);
    assert_eq!(m[(0, 6)], 1.0);
    assert_eq!(b2.changed_entries(&g.adjacency()), 2 * 6);
}
