//! The move calculus on labeled graphs: collapse/expansion, slides,
//! inductions, and A-moves, together with path moduli and slide validity.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::graph::{Edge, EdgePath, LabeledGraph, Vertex};

/// Exact modulus of an edge path: the product of `label(rev e) / label(e)`
/// over its edges, in lowest terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathModulus(BigRational);

impl PathModulus {
    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integral(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_strict(&self) -> bool {
        !self.0.abs().is_one()
    }
}

impl fmt::Display for PathModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum MoveError {
    #[error("edge sequence is not a path")]
    NotAPath,
    #[error("invalid slide: {0}")]
    InvalidSlide(String),
    #[error("invalid induction: {0}")]
    InvalidInduction(String),
    #[error("loop is not a strict virtual ascending loop")]
    NotVirtualAscending,
    #[error("bad configuration for move: {0}")]
    BadConfiguration(String),
}

/// The moves of the calculus, with enough data to apply and invert each.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Move {
    /// Collapse a non-loop geometric edge whose label at `terminus(edge)`
    /// is a unit; `terminus(edge)` merges into `origin(edge)`.
    Collapse { edge: Edge },
    /// Inverse of a collapse: split `vertex`, moving the listed directed
    /// edges (divided by `factor`) onto a new vertex joined by a
    /// `(factor, 1)` edge.
    Expand {
        vertex: Vertex,
        moved: Vec<Edge>,
        factor: BigInt,
    },
    Slide { edge: Edge, path: EdgePath },
    Induction {
        loop_edge: Edge,
        factor: BigInt,
        direction: InductionDirection,
    },
    AMove { loop_edge: Edge },
    AInverse { loop_edge: Edge, pendant: Edge },
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum InductionDirection {
    /// Multiply the other labels at the loop vertex by the factor.
    Up,
    /// Divide them by the factor.
    Down,
}

pub fn apply_move(g: &LabeledGraph, mv: &Move) -> Result<LabeledGraph, MoveError> {
    match mv {
        Move::Collapse { edge } => collapse(g, *edge),
        Move::Expand {
            vertex,
            moved,
            factor,
        } => expand(g, *vertex, moved, factor),
        Move::Slide { edge, path } => slide(g, *edge, path),
        Move::Induction {
            loop_edge,
            factor,
            direction,
        } => induction_move(g, *loop_edge, factor, *direction),
        Move::AMove { loop_edge } => a_move(g, *loop_edge).map(|o| o.graph),
        Move::AInverse { loop_edge, pendant } => {
            a_inverse_move(g, *loop_edge, *pendant).map(|o| o.graph)
        }
    }
}

/// `prod label(rev e_i) / label(e_i)` over the path; the empty path has
/// modulus 1.
pub fn path_modulus(g: &LabeledGraph, path: &EdgePath) -> Result<PathModulus, MoveError> {
    if !path.is_path(g) {
        return Err(MoveError::NotAPath);
    }
    let mut q = BigRational::one();
    for &e in &path.0 {
        q *= BigRational::new(g.label(e.rev()).clone(), g.label(e).clone());
    }
    Ok(PathModulus(q))
}

/// Step-by-step slide arithmetic. Returns the label carried by `e` after
/// each prefix, or the index of the first violated condition.
fn slide_labels(g: &LabeledGraph, e: Edge, path: &EdgePath) -> Result<BigInt, (usize, String)> {
    let mut at = g.origin(e);
    let mut label = g.label(e).clone();
    for (i, &p) in path.0.iter().enumerate() {
        if p.forward() == e.forward() {
            return Err((i, String::from("path passes through the slid edge")));
        }
        if g.origin(p) != at {
            return Err((i, String::from("path is not consecutive from the edge origin")));
        }
        if !(&label % g.label(p)).is_zero() {
            return Err((
                i,
                alloc::format!("label {} does not divide {}", g.label(p), label),
            ));
        }
        label = &label / g.label(p) * g.label(p.rev());
        at = g.terminus(p);
    }
    Ok(label)
}

/// True iff `e` may slide along `path`: no path edge is `e` or its reverse,
/// the path starts at `origin(e)`, and the divisibility condition holds at
/// every step. The empty path is vacuously valid.
pub fn is_valid_slide_path(g: &LabeledGraph, e: Edge, path: &EdgePath) -> bool {
    slide_labels(g, e, path).is_ok()
}

/// Slides `e` along `path`: `origin(e)` moves to the path's end and the
/// label of `e` is multiplied by the path modulus. All other data,
/// including edge identities, is unchanged.
pub fn slide(g: &LabeledGraph, e: Edge, path: &EdgePath) -> Result<LabeledGraph, MoveError> {
    let label = slide_labels(g, e, path)
        .map_err(|(i, msg)| MoveError::InvalidSlide(alloc::format!("step {i}: {msg}")))?;
    let mut out = g.clone();
    if let Some(&last) = path.0.last() {
        out.set_origin(e, g.terminus(last));
        out.set_label(e, label);
    }
    Ok(out)
}

/// A directed edge is collapsible when it has distinct endpoints and the
/// label at its terminus is a unit.
pub fn is_collapsible(g: &LabeledGraph, e: Edge) -> bool {
    !g.is_loop(e) && g.label(e.rev()).abs().is_one()
}

/// Collapses `e`: `terminus(e)` merges into `origin(e)` and every other
/// edge end at the collapsed vertex is multiplied by the partner label
/// (sign-adjusted so the unit label is `+1`).
pub fn collapse(g: &LabeledGraph, e: Edge) -> Result<LabeledGraph, MoveError> {
    if !is_collapsible(g, e) {
        return Err(MoveError::BadConfiguration(String::from(
            "edge is not collapsible",
        )));
    }
    let gone = g.terminus(e);
    let kept = g.origin(e);
    let mut n = g.label(e).clone();
    if g.label(e.rev()).is_negative() {
        n = -n;
    }
    let mut out = g.clone();
    for x in g.edges() {
        if x.forward() != e.forward() && g.origin(x) == gone {
            out.set_label(x, g.label(x) * &n);
        }
    }
    out.remove_geometric_edge(e, None);
    out.merge_vertex(gone, kept);
    Ok(out)
}

/// Expansion, the inverse of [`collapse`]: the listed directed edges at
/// `vertex` move to a fresh vertex and are divided by `factor`; a new
/// `(factor, 1)` edge joins the old vertex to the new one.
pub fn expand(
    g: &LabeledGraph,
    vertex: Vertex,
    moved: &[Edge],
    factor: &BigInt,
) -> Result<LabeledGraph, MoveError> {
    if factor.is_zero() {
        return Err(MoveError::BadConfiguration(String::from("zero factor")));
    }
    for &x in moved {
        if g.origin(x) != vertex {
            return Err(MoveError::BadConfiguration(String::from(
                "moved edge does not originate at the vertex",
            )));
        }
        if !(g.label(x) % factor).is_zero() {
            return Err(MoveError::BadConfiguration(String::from(
                "moved label is not divisible by the factor",
            )));
        }
    }
    let mut out = g.clone();
    let w = out.push_vertex("w");
    for &x in moved {
        out.set_origin(x, w);
        out.set_label(x, g.label(x) / factor);
    }
    out.push_edge("x", vertex, w, factor.clone(), BigInt::one());
    Ok(out)
}

/// Repeatedly collapses the first collapsible edge (ordered by edge name,
/// forward direction first) until the graph is reduced.
pub fn reduce(g: &LabeledGraph) -> LabeledGraph {
    let mut out = g.clone();
    loop {
        let mut candidates: Vec<Edge> = out
            .edges()
            .filter(|&e| is_collapsible(&out, e))
            .collect();
        candidates.sort_by_key(|&e| (out.edge_name(e.forward()), !e.is_forward()));
        match candidates.first() {
            None => return out,
            Some(&e) => out = collapse(&out, e).expect("candidate is collapsible"),
        }
    }
}

/// Induction at an ascending loop `e` (so `|label(e)| = 1`): every other
/// edge end at the loop vertex is multiplied by `factor` (up) or divided by
/// it (down). The factor must be positive and divide `label(rev e)`.
pub fn induction_move(
    g: &LabeledGraph,
    loop_edge: Edge,
    factor: &BigInt,
    direction: InductionDirection,
) -> Result<LabeledGraph, MoveError> {
    if !g.is_loop(loop_edge) || !g.label(loop_edge).abs().is_one() {
        return Err(MoveError::InvalidInduction(String::from(
            "edge is not an ascending loop",
        )));
    }
    if !factor.is_positive() {
        return Err(MoveError::InvalidInduction(String::from(
            "factor must be positive",
        )));
    }
    if !(g.label(loop_edge.rev()) % factor).is_zero() {
        return Err(MoveError::InvalidInduction(alloc::format!(
            "factor {} does not divide the loop label {}",
            factor,
            g.label(loop_edge.rev())
        )));
    }
    let v = g.origin(loop_edge);
    let mut out = g.clone();
    for x in g.edges() {
        if x.forward() == loop_edge.forward() || g.origin(x) != v {
            continue;
        }
        match direction {
            InductionDirection::Up => out.set_label(x, g.label(x) * factor),
            InductionDirection::Down => {
                if !(g.label(x) % factor).is_zero() {
                    return Err(MoveError::InvalidInduction(alloc::format!(
                        "factor {} does not divide label {}",
                        factor,
                        g.label(x)
                    )));
                }
                out.set_label(x, g.label(x) / factor);
            }
        }
    }
    Ok(out)
}

/// Result of an A-move or its inverse, carrying the mapping between old and
/// new edges so that callers can keep tracking identities.
#[derive(Clone, Debug)]
pub struct AMoveOutcome {
    pub graph: LabeledGraph,
    /// The ascending loop in the new graph.
    pub loop_edge: Edge,
    /// The pendant edge joining the loop vertex to the rest (A-move only;
    /// for the inverse this is the merged loop's vertex edge, removed).
    pub pendant: Option<Edge>,
}

/// A-move: replaces a strict virtual ascending loop `(k, K)` (so `k | K`,
/// `K != +-k`, `k != +-1`) by a strict ascending loop `(1, K/k)` at a new
/// vertex joined to the old one by an edge labeled `(K/k, k)`.
pub fn a_move(g: &LabeledGraph, loop_edge: Edge) -> Result<AMoveOutcome, MoveError> {
    let e = loop_edge;
    if !g.is_loop(e) {
        return Err(MoveError::NotVirtualAscending);
    }
    let k = g.label(e).clone();
    let big_k = g.label(e.rev()).clone();
    if !(&big_k % &k).is_zero() || big_k.abs() == k.abs() || k.abs().is_one() {
        return Err(MoveError::NotVirtualAscending);
    }
    let ell = &big_k / &k;
    let v = g.origin(e);
    let mut out = g.clone();
    let w = out.push_vertex("w");
    out.set_origin(e, w);
    out.set_origin(e.rev(), w);
    out.set_label(e, BigInt::one());
    out.set_label(e.rev(), ell.clone());
    let pendant = out.push_edge("p", w, v, ell, k);
    Ok(AMoveOutcome {
        graph: out,
        loop_edge: e,
        pendant: Some(pendant),
    })
}

/// Inverse A-move: a strict ascending loop `(1, l*m)` whose vertex carries
/// exactly one other edge `(l, k)` (loop side first, `l, k != +-1`,
/// `l | l*m`) merges back into a strict virtual ascending loop `(k, k*l*m)`
/// at the far vertex. The pendant edge and its vertex are removed.
pub fn a_inverse_move(
    g: &LabeledGraph,
    loop_edge: Edge,
    pendant: Edge,
) -> Result<AMoveOutcome, MoveError> {
    let e = loop_edge;
    if !g.is_loop(e) || !g.label(e).abs().is_one() || g.label(e.rev()).abs().is_one() {
        return Err(MoveError::BadConfiguration(String::from(
            "not a strict ascending loop",
        )));
    }
    let w = g.origin(e);
    let f = if g.origin(pendant) == w { pendant } else { pendant.rev() };
    if g.origin(f) != w || g.is_loop(f) || f.forward() == e.forward() {
        return Err(MoveError::BadConfiguration(String::from(
            "pendant does not join the loop vertex",
        )));
    }
    // the loop vertex must have no other incident edges
    for x in g.edges_at(w) {
        if x.forward() != e.forward() && x.forward() != f.forward() {
            return Err(MoveError::BadConfiguration(String::from(
                "loop vertex has extra edges",
            )));
        }
    }
    let ell = g.label(f).clone();
    let k = g.label(f.rev()).clone();
    if ell.abs().is_one() || k.abs().is_one() {
        return Err(MoveError::BadConfiguration(String::from(
            "pendant labels must not be units",
        )));
    }
    if !(g.label(e.rev()) % &ell).is_zero() {
        return Err(MoveError::BadConfiguration(String::from(
            "pendant label does not divide the loop label",
        )));
    }
    let v = g.terminus(f);
    let mut out = g.clone();
    out.set_origin(e, v);
    out.set_origin(e.rev(), v);
    out.set_label(e, &k * g.label(e));
    out.set_label(e.rev(), &k * g.label(e.rev()));
    out.remove_geometric_edge(f, Some(w));
    let loop_after = if f.geometric_index() < e.geometric_index() {
        Edge(e.0 - 2)
    } else {
        e
    };
    Ok(AMoveOutcome {
        graph: out,
        loop_edge: loop_after,
        pendant: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::*;
    use num_rational::BigRational;

    fn path(g: &LabeledGraph, names: &[&str]) -> EdgePath {
        EdgePath(names.iter().map(|n| g.edge_by_name(n).unwrap()).collect())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn empty_path_has_modulus_one() {
        let g = bs(2, 3);
        assert_eq!(
            path_modulus(&g, &EdgePath::empty()).unwrap().value(),
            &rat(1, 1)
        );
    }

    #[test]
    fn loop_modulus() {
        let g = bs(2, 3);
        let p = path(&g, &["e"]);
        assert_eq!(path_modulus(&g, &p).unwrap().value(), &rat(3, 2));
    }

    #[test]
    fn figure_path_modulus() {
        let g = f1l();
        let p = path(&g, &["e1", "e2", "~e3"]);
        assert_eq!(path_modulus(&g, &p).unwrap().value(), &rat(11, 5));
    }

    #[test]
    fn non_consecutive_is_not_a_path() {
        let g = f1l();
        let p = path(&g, &["e1", "e1"]);
        assert_eq!(path_modulus(&g, &p), Err(MoveError::NotAPath));
    }

    #[test]
    fn figure_slide_validity() {
        let g = f1l();
        let ebar = g.edge_by_name("~e").unwrap();
        assert!(is_valid_slide_path(&g, ebar, &path(&g, &["e1", "e2", "~e3"])));
        // label 5 at v3 does not divide 12
        let e1bar = g.edge_by_name("~e1").unwrap();
        assert!(!is_valid_slide_path(&g, e1bar, &path(&g, &["e2"])));
        assert!(is_valid_slide_path(&g, ebar, &EdgePath::empty()));
    }

    #[test]
    fn figure_slide_arithmetic() {
        let g = f1l();
        let ebar = g.edge_by_name("~e").unwrap();
        let slid = slide(&g, ebar, &path(&g, &["e1", "e2", "~e3"])).unwrap();
        let e = slid.edge_by_name("e").unwrap();
        assert!(slid.is_loop(e));
        assert_eq!(slid.label(e), &6.into());
        assert_eq!(slid.label(e.rev()), &132.into());
    }

    #[test]
    fn sliding_e3_produces_the_right_hand_graph() {
        let g = f1l();
        let e3bar = g.edge_by_name("~e3").unwrap();
        let slid = slide(&g, e3bar, &path(&g, &["~e"])).unwrap();
        assert_eq!(slid, f1r());
    }

    #[test]
    fn empty_slide_is_identity() {
        let g = f1l();
        let e = g.edge_by_name("e").unwrap();
        assert_eq!(slide(&g, e, &EdgePath::empty()).unwrap(), g);
    }

    #[test]
    fn slide_then_reverse_slide_is_identity() {
        let g = f1l();
        let ebar = g.edge_by_name("~e").unwrap();
        let p = path(&g, &["e1", "e2", "~e3"]);
        let there = slide(&g, ebar, &p).unwrap();
        let back = slide(&there, ebar, &p.reversed()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn reduce_segment_to_point() {
        let r = reduce(&segment(1, 3));
        assert_eq!(r.vertex_count(), 1);
        assert_eq!(r.geometric_edge_count(), 0);
    }

    #[test]
    fn reduce_keeps_reduced_graphs() {
        assert_eq!(reduce(&f3g()), f3g());
    }

    #[test]
    fn reduce_multiplies_pendant_labels() {
        // segment (1,3) with a pendant (5,7) at the label-1 end: the
        // collapse multiplies the 5 by 3.
        let g = build(
            &["u", "v", "w"],
            &[("e", "u", "v", 1, 3), ("p", "u", "w", 5, 7)],
        );
        let r = reduce(&g);
        assert_eq!(r.vertex_count(), 2);
        let p = r.edge_by_name("p").unwrap();
        assert_eq!(r.label(p), &15.into());
        assert_eq!(r.label(p.rev()), &7.into());
        assert!(r.is_reduced());
    }

    #[test]
    fn collapse_negative_unit_adjusts_sign() {
        let g = build(
            &["u", "v", "w"],
            &[("e", "u", "v", 2, -1), ("p", "v", "w", 5, 7)],
        );
        let e = g.edge_by_name("e").unwrap();
        let c = collapse(&g, e).unwrap();
        let p = c.edge_by_name("p").unwrap();
        assert_eq!(c.label(p), &(-10).into());
    }

    #[test]
    fn expand_inverts_collapse() {
        let g = build(
            &["u", "v", "w"],
            &[("e", "u", "v", 3, 1), ("p", "v", "w", 6, 7)],
        );
        let e = g.edge_by_name("e").unwrap();
        let c = collapse(&g, e).unwrap();
        let p = c.edge_by_name("p").unwrap();
        assert_eq!(c.label(p), &18.into());
        let x = expand(&c, c.origin(p), &[p], &3.into()).unwrap();
        assert_eq!(x.vertex_count(), 3);
        let p2 = x.edge_by_name("p").unwrap();
        assert_eq!(x.label(p2), &6.into());
        assert!(crate::canon::canonical_code(&x) == crate::canon::canonical_code(&g));
    }

    #[test]
    fn induction_scales_other_ends() {
        // loop (1,4) with pendant end 2 at the loop vertex, factor 2
        let g = build(&["v", "u"], &[("l", "v", "v", 1, 4), ("p", "v", "u", 2, 7)]);
        let l = g.edge_by_name("l").unwrap();
        let up = induction_move(&g, l, &2.into(), InductionDirection::Up).unwrap();
        let p = up.edge_by_name("p").unwrap();
        assert_eq!(up.label(p), &4.into());
        assert_eq!(up.label(l), &1.into());
        assert_eq!(up.label(l.rev()), &4.into());
        let down = induction_move(&up, l, &2.into(), InductionDirection::Down).unwrap();
        assert_eq!(down, g);
    }

    #[test]
    fn induction_identity_and_errors() {
        let g = build(&["v", "u"], &[("l", "v", "v", 1, 4), ("p", "v", "u", 3, 7)]);
        let l = g.edge_by_name("l").unwrap();
        assert_eq!(
            induction_move(&g, l, &1.into(), InductionDirection::Up).unwrap(),
            g
        );
        // 2 does not divide the pendant end 3
        assert!(matches!(
            induction_move(&g, l, &2.into(), InductionDirection::Down),
            Err(MoveError::InvalidInduction(_))
        ));
    }

    #[test]
    fn a_move_on_bs_2_4() {
        let g = bs(2, 4);
        let e = g.edge_by_name("e").unwrap();
        let out = a_move(&g, e).unwrap();
        let h = out.graph;
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.geometric_edge_count(), 2);
        assert_eq!(h.label(out.loop_edge), &1.into());
        assert_eq!(h.label(out.loop_edge.rev()), &2.into());
        let p = out.pendant.unwrap();
        assert_eq!(h.label(p), &2.into());
        assert_eq!(h.label(p.rev()), &2.into());
        assert!(h.is_reduced());

        let back = a_inverse_move(&h, out.loop_edge, p).unwrap();
        assert_eq!(back.graph, g);
    }

    #[test]
    fn a_move_on_bs_2_6() {
        let g = bs(2, 6);
        let e = g.edge_by_name("e").unwrap();
        let out = a_move(&g, e).unwrap();
        let h = &out.graph;
        assert_eq!(h.label(out.loop_edge.rev()), &3.into());
        let p = out.pendant.unwrap();
        assert_eq!((h.label(p), h.label(p.rev())), (&3.into(), &2.into()));
    }

    #[test]
    fn a_move_rejects_non_virtual_loops() {
        let g = bs(2, 3);
        let e = g.edge_by_name("e").unwrap();
        assert!(matches!(a_move(&g, e), Err(MoveError::NotVirtualAscending)));
        // k = +-1 is excluded: that loop is already ascending
        let h = bs(1, 4);
        let e = h.edge_by_name("e").unwrap();
        assert!(matches!(a_move(&h, e), Err(MoveError::NotVirtualAscending)));
    }
}
