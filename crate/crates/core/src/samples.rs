//! Small graphs of groups used in documentation, tests and benchmarks.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::exactmat::IntMatrix;
use crate::gog::GbsGraph;

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64_rows(rows)
}

fn two() -> IntMatrix {
    IntMatrix::scalar(2, &BigInt::from(2))
}

/// Sites `pink`, `orange`; loop `e0 = (2I, I)` at pink and `e1 = (2I, B)`
/// from pink to orange with `B = [[1,1],[1,4]]`.
pub fn h0() -> Arc<GbsGraph> {
    Arc::new(
        GbsGraph::from_edges(
            2,
            &["pink", "orange"],
            vec![
                ("e0", "pink", "pink", two(), IntMatrix::identity(2)),
                ("e1", "pink", "orange", two(), m(&[&[1, 1], &[1, 4]])),
            ],
        )
        .expect("well-formed"),
    )
}

/// Two parallel edges `e`, `f` from `v` to `w`, with `{f}` as the recorded spanning tree.
pub fn exgbs() -> Arc<GbsGraph> {
    Arc::new(
        GbsGraph::from_edges(
            2,
            &["v", "w"],
            vec![
                ("e", "v", "w", m(&[&[1, 5], &[-2, 0]]), m(&[&[-1, 8], &[4, 5]])),
                ("f", "v", "w", m(&[&[7, -1], &[-3, -3]]), m(&[&[-4, 1], &[3, 9]])),
            ],
        )
        .expect("well-formed")
        .with_tree(vec!["f".into()])
        .expect("well-formed"),
    )
}

/// Single loop `(A, B)` with `A = [[2,2],[2,4]]`, `B = diag(1, 2)`.
pub fn cor_loop() -> Arc<GbsGraph> {
    Arc::new(
        GbsGraph::from_edges(2, &["v"], vec![("e", "v", "v", m(&[&[2, 2], &[2, 4]]), m(&[&[1, 0], &[0, 2]]))])
            .expect("well-formed"),
    )
}

/// Single loop `(2I, I)`: an amenable group.
pub fn loop_2i_i() -> Arc<GbsGraph> {
    Arc::new(GbsGraph::from_edges(2, &["v"], vec![("e", "v", "v", two(), IntMatrix::identity(2))]).expect("well-formed"))
}

/// Rose with loops `a1 = ([[1,2],[0,1]], I)` and `a2 = ([[1,0],[2,1]], I)`.
pub fn rose2() -> Arc<GbsGraph> {
    Arc::new(
        GbsGraph::from_edges(
            2,
            &["v"],
            vec![
                ("a1", "v", "v", m(&[&[1, 2], &[0, 1]]), IntMatrix::identity(2)),
                ("a2", "v", "v", m(&[&[1, 0], &[2, 1]]), IntMatrix::identity(2)),
            ],
        )
        .expect("well-formed"),
    )
}
