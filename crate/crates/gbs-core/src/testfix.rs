//! Fixture graphs used across the unit tests.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::graph::{GeometricEdgeSpec, LabeledGraph};

pub fn build(vertices: &[&str], edges: &[(&str, &str, &str, i64, i64)]) -> LabeledGraph {
    let vs = vertices.iter().map(|v| v.to_string()).collect();
    let es: Vec<GeometricEdgeSpec> = edges
        .iter()
        .map(|(id, from, to, lf, lt)| GeometricEdgeSpec {
            id: id.to_string(),
            from: from.to_string(),
            to: to.to_string(),
            label_from: (*lf).into(),
            label_to: (*lt).into(),
        })
        .collect();
    LabeledGraph::new(vs, es).expect("fixture must validate")
}

/// Single geometric edge between two vertices, labels `(a, b)`.
pub fn segment(a: i64, b: i64) -> LabeledGraph {
    build(&["u", "v"], &[("e", "u", "v", a, b)])
}

/// The Baumslag-Solitar group `BS(p, q)` as a one-vertex loop.
pub fn bs(p: i64, q: i64) -> LabeledGraph {
    build(&["v"], &[("e", "v", "v", p, q)])
}

/// Left-hand graph of the slide example: Betti number two, with a strict
/// monotone cycle `(e1, e2, ~e3, e)` of modulus 22.
pub fn f1l() -> LabeledGraph {
    build(
        &["v1", "v2", "v3"],
        &[
            ("e3", "v1", "v2", 22, 60),
            ("e", "v1", "v2", 6, 60),
            ("e1", "v2", "v3", 6, 12),
            ("e2", "v3", "v2", 5, 15),
        ],
    )
}

/// Right-hand graph of the slide example: `f1l` after sliding `~e3` over
/// `~e`, so `e3` is a loop at `v1` with labels `(22, 6)`.
pub fn f1r() -> LabeledGraph {
    build(
        &["v1", "v2", "v3"],
        &[
            ("e3", "v1", "v1", 22, 6),
            ("e", "v1", "v2", 6, 60),
            ("e1", "v2", "v3", 6, 12),
            ("e2", "v3", "v2", 5, 15),
        ],
    )
}

/// Ascending normal form with `s = 2`: loop `(1, 2)` at the center and two
/// pendant edges `(2, 2)`.
pub fn f3g() -> LabeledGraph {
    build(
        &["c", "a", "b"],
        &[
            ("l", "c", "c", 1, 2),
            ("ea", "a", "c", 2, 2),
            ("eb", "b", "c", 2, 2),
        ],
    )
}

/// Variant of `f3g` with pendant labels `(4, 2)` on one edge; same `xi`
/// invariant but different pointed labeled graph spaces.
pub fn f3gp() -> LabeledGraph {
    build(
        &["c", "a", "b"],
        &[
            ("l", "c", "c", 1, 2),
            ("ea", "a", "c", 2, 2),
            ("eb", "b", "c", 4, 2),
        ],
    )
}

/// Two-vertex cycle with integral modulus 4 and no mobile edges.
pub fn d1() -> LabeledGraph {
    build(
        &["v0", "v2"],
        &[("a", "v0", "v2", 2, 8), ("b", "v2", "v0", 3, 3)],
    )
}

/// `d1` plus a mobile pendant edge `f: w(5) - v0(6)`; non-ascending.
pub fn d2() -> LabeledGraph {
    build(
        &["v0", "v2", "w"],
        &[
            ("a", "v0", "v2", 2, 8),
            ("b", "v2", "v0", 3, 3),
            ("f", "w", "v0", 5, 6),
        ],
    )
}
