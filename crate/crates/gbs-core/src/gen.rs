//! Random generation of reduced labeled graphs and applicable moves, used
//! by the property and oracle test suites.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;

use crate::graph::{Edge, EdgePath, GeometricEdgeSpec, LabeledGraph};
use crate::moves::{
    a_inverse_move, a_move, induction_move, slide, InductionDirection, Move,
};

/// Parameters for [`random_reduced_graph`].
#[derive(Clone, Debug)]
pub struct GraphParams {
    pub max_vertices: usize,
    pub max_geometric_edges: usize,
    pub max_label: i64,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            max_vertices: 4,
            max_geometric_edges: 5,
            max_label: 24,
        }
    }
}

/// A random connected positive labeled graph with no unit labels on
/// non-loop edges (hence reduced). Loops are allowed.
pub fn random_reduced_graph<R: Rng>(rng: &mut R, p: &GraphParams) -> LabeledGraph {
    let nv = rng.gen_range(1..=p.max_vertices);
    let min_edges = nv.saturating_sub(1).max(1);
    let ne = rng.gen_range(min_edges..=p.max_geometric_edges.max(min_edges));
    let vertices: Vec<_> = (0..nv).map(|i| alloc::format!("v{i}")).collect();
    let mut edges = Vec::new();
    let label = |rng: &mut R| BigInt::from(rng.gen_range(2..=p.max_label));
    // spanning tree first, then arbitrary extra edges
    for i in 1..nv {
        let to = rng.gen_range(0..i);
        edges.push(GeometricEdgeSpec {
            id: alloc::format!("e{}", edges.len()),
            from: alloc::format!("v{i}"),
            to: alloc::format!("v{to}"),
            label_from: label(rng),
            label_to: label(rng),
        });
    }
    while edges.len() < ne {
        let from = rng.gen_range(0..nv);
        let to = rng.gen_range(0..nv);
        edges.push(GeometricEdgeSpec {
            id: alloc::format!("e{}", edges.len()),
            from: alloc::format!("v{from}"),
            to: alloc::format!("v{to}"),
            label_from: label(rng),
            label_to: label(rng),
        });
    }
    LabeledGraph::new(vertices.iter().map(|v| v.to_string()).collect(), edges)
        .expect("generated graph is valid")
}

/// All single-edge slides `(edge, over)` that are valid and keep the graph
/// reduced.
pub fn valid_single_slides(g: &LabeledGraph) -> Vec<(Edge, Edge)> {
    let mut out = Vec::new();
    for e in g.edges() {
        for over in g.edges_at(g.origin(e)) {
            if over.forward() == e.forward() {
                continue;
            }
            let path = EdgePath(vec![over]);
            if !crate::moves::is_valid_slide_path(g, e, &path) {
                continue;
            }
            let slid = slide(g, e, &path).expect("checked");
            if slid.is_reduced() {
                out.push((e, over));
            }
        }
    }
    out
}

/// Applies a uniformly random valid reduced-to-reduced single slide, if any.
pub fn random_slide<R: Rng>(rng: &mut R, g: &LabeledGraph) -> Option<(Move, LabeledGraph)> {
    let slides = valid_single_slides(g);
    if slides.is_empty() {
        return None;
    }
    let (e, over) = slides[rng.gen_range(0..slides.len())];
    let path = EdgePath(vec![over]);
    let out = slide(g, e, &path).expect("checked");
    Some((Move::Slide { edge: e, path }, out))
}

/// Every applicable slide, induction, or A-move that keeps the graph
/// reduced, paired with its result.
pub fn applicable_moves(g: &LabeledGraph) -> Vec<(Move, LabeledGraph)> {
    let mut out: Vec<(Move, LabeledGraph)> = valid_single_slides(g)
        .into_iter()
        .map(|(e, over)| {
            let path = EdgePath(vec![over]);
            let slid = slide(g, e, &path).expect("checked");
            (Move::Slide { edge: e, path }, slid)
        })
        .collect();
    for l in g.edges() {
        if !g.is_loop(l) || !g.label(l).abs().eq(&BigInt::from(1)) {
            continue;
        }
        // inductions by every nontrivial divisor of the far label
        let far: u64 = match u64::try_from(g.label(l.rev()).abs()) {
            Ok(v) => v,
            Err(_) => continue,
        };
        for d in 2..=far {
            if far % d != 0 {
                continue;
            }
            let factor = BigInt::from(d);
            for dir in [InductionDirection::Up, InductionDirection::Down] {
                if let Ok(h) = induction_move(g, l, &factor, dir) {
                    if h.is_reduced() {
                        out.push((
                            Move::Induction {
                                loop_edge: l,
                                factor: factor.clone(),
                                direction: dir,
                            },
                            h,
                        ));
                    }
                }
            }
        }
    }
    for l in g.geometric_edges() {
        for dir in [l, l.rev()] {
            if let Ok(o) = a_move(g, dir) {
                if o.graph.is_reduced() {
                    out.push((Move::AMove { loop_edge: dir }, o.graph));
                }
            }
        }
        for pendant in g.geometric_edges() {
            if pendant == l {
                continue;
            }
            for dir in [l, l.rev()] {
                if let Ok(o) = a_inverse_move(g, dir, pendant) {
                    if o.graph.is_reduced() {
                        out.push((
                            Move::AInverse {
                                loop_edge: dir,
                                pendant,
                            },
                            o.graph,
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Applies a uniformly random applicable move, if any.
pub fn random_move<R: Rng>(rng: &mut R, g: &LabeledGraph) -> Option<(Move, LabeledGraph)> {
    let moves = applicable_moves(g);
    if moves.is_empty() {
        return None;
    }
    Some(moves[rng.gen_range(0..moves.len())].clone())
}
