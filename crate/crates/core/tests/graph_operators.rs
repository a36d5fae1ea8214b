mod common;

use common::{adjacency, gnp, mat_mul, max_abs_diff, operator, rng, to_dense, Dense};
use netprop::{Graph, Kernel, ScoreMatrix};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n)
            .prop_map(move |edges| Graph::from_edges(n, &edges).unwrap())
    })
}

fn arb_graph_and_x(max_n: usize, k: usize) -> impl Strategy<Value = (Graph, ScoreMatrix, ScoreMatrix)> {
    arb_graph(max_n).prop_flat_map(move |g| {
        let n = g.node_count();
        let cells = proptest::collection::vec(-1.0f64..1.0, n * k);
        (Just(g), cells.clone(), cells).prop_map(move |(g, a, b)| {
            (g, ScoreMatrix::from_vec(n, k, a), ScoreMatrix::from_vec(n, k, b))
        })
    })
}

fn inner(a: &ScoreMatrix, b: &ScoreMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

proptest! {
    #[test]
    fn column_operator_is_adjoint_of_row_operator((g, x, y) in arb_graph_and_x(30, 2)) {
        let lhs = inner(&g.apply_col_normalized(&x), &y);
        let rhs = inner(&x, &g.apply_row_normalized(&y));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn row_operator_is_stochastic(g in arb_graph(40)) {
        let n = g.node_count();
        let ones = ScoreMatrix::from_vec(n, 1, vec![1.0; n]);
        let out = g.apply_row_normalized(&ones);
        for i in 0..n {
            let expected = if g.degree(i) > 0 { 1.0 } else { 0.0 };
            prop_assert!((out.get(i, 0) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn operators_commute_with_relabeling(
        (g, x, _) in arb_graph_and_x(25, 2),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let n = g.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut common::rng(seed));
        let gp = g.permute(&perm);
        let xp = x.permute_rows(&perm);
        for (a, b) in [
            (g.apply_row_normalized(&x), gp.apply_row_normalized(&xp)),
            (g.apply_col_normalized(&x), gp.apply_col_normalized(&xp)),
            (g.apply_sym_normalized(&x), gp.apply_sym_normalized(&xp)),
        ] {
            prop_assert!(a.permute_rows(&perm).max_abs_diff(&b) < 1e-14);
        }
    }

    #[test]
    fn construction_invariants(g in arb_graph(40)) {
        let a = adjacency(&g);
        for i in 0..g.node_count() {
            prop_assert_eq!(a[i][i], 0.0);
            prop_assert_eq!(g.degree(i), a[i].iter().filter(|&&v| v > 0.0).count());
            for j in 0..g.node_count() {
                prop_assert_eq!(a[i][j], a[j][i]);
            }
        }
    }
}

#[test]
fn operators_match_dense_products() {
    let mut r = rng(11);
    for _ in 0..20 {
        let g = gnp(&mut r, 10, 0.5);
        let x: Dense = (0..10)
            .map(|_| (0..3).map(|_| rand::Rng::random::<f64>(&mut r)).collect())
            .collect();
        let xs = ScoreMatrix::from_rows(&x);
        for (kernel, got) in [
            (Kernel::RandomWalk, g.apply_row_normalized(&xs)),
            (Kernel::SourceNormalized, g.apply_col_normalized(&xs)),
            (Kernel::NormalizedLaplacian, g.apply_sym_normalized(&xs)),
        ] {
            let want = mat_mul(&operator(&g, kernel), &x);
            assert!(max_abs_diff(&to_dense(&got), &want) < 1e-14, "{kernel}");
        }
    }
}

#[test]
fn star_plus_edge_keeps_star() {
    let g = Graph::from_edges(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (5, 6)]).unwrap();
    let (lcc, map) = g.largest_component().unwrap();
    assert_eq!(map, vec![0, 1, 2, 3, 4]);
    assert_eq!(lcc.edge_count(), 4);
    assert_eq!(lcc.degree(0), 4);
}
