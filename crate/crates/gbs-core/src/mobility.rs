//! Slide spaces and edge mobility.
//!
//! The slide space of an edge is explored breadth-first over states
//! `(positions, labels)` of the edge pair; all other labels are fixed by
//! slides of this pair. Termination rests on the divisibility order: the
//! prime support of the reachable labels is fixed, so by Dickson's lemma an
//! infinite exploration must produce comparable states, which certify a
//! strict integer cycle. A state where the pair forms a strict (virtual)
//! ascending loop certifies a strict monotone cycle instead, and that
//! reason takes precedence in mobility reports.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::canon::{canonical_code, canonical_form, CanonicalCode};
use crate::graph::{classify_elementary, Edge, EdgePath, ElementaryClass, LabeledGraph, Vertex};

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum MobilityError {
    #[error("graph is not reduced")]
    NotReduced,
    #[error("group is elementary")]
    Elementary,
    #[error("graph has a mobile edge")]
    HasMobileEdge,
    #[error("preferred edges require Betti number one")]
    PreferredEdgesRequireBettiOne,
}

/// Position and label data of one edge pair reachable from the base graph
/// by slides of the pair, all intermediate graphs reduced. Labels are kept
/// unsigned; mobility is computed on the unsigned graph.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SlideState {
    pub origin_e: Vertex,
    pub origin_rev: Vertex,
    pub label_e: BigInt,
    pub label_rev: BigInt,
}

impl SlideState {
    /// The full labeled graph of this state over the unsigned base.
    pub fn realize(&self, base: &LabeledGraph, e: Edge) -> LabeledGraph {
        let mut g = base.unsigned();
        let e = e.forward();
        g.set_origin(e, self.origin_e);
        g.set_origin(e.rev(), self.origin_rev);
        g.set_label(e, self.label_e.clone());
        g.set_label(e.rev(), self.label_rev.clone());
        g
    }
}

/// A strict integer cycle witnessing an infinite slide space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegerCycleWitness {
    /// The direction of the pair that slides along the cycle.
    pub edge: Edge,
    /// Closed path over the other edges, valid at `state`.
    pub cycle: EdgePath,
    /// Integral path modulus, absolute value at least two.
    pub modulus: BigInt,
    /// The state from which sliding around `cycle` grows the label.
    pub state: SlideState,
}

/// A strict monotone cycle `(prefix..., final_edge)` in the base graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotoneWitness {
    pub final_edge: Edge,
    /// A `rev(final_edge)`-edge path from `terminus(final_edge)` back to
    /// `origin(final_edge)`.
    pub prefix: EdgePath,
    /// Integral cycle modulus, absolute value at least two.
    pub modulus: BigInt,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MobileReason {
    MonotoneCycle(MonotoneWitness),
    InfiniteSlideSpace(IntegerCycleWitness),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Mobility {
    Mobile(MobileReason),
    NonMobile,
}

impl Mobility {
    pub fn is_mobile(&self) -> bool {
        matches!(self, Mobility::Mobile(_))
    }
}

#[derive(Clone, Debug)]
pub enum SlideSpaceResult {
    Finite(Vec<SlideState>),
    Infinite(IntegerCycleWitness),
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
enum Side {
    E,
    Rev,
}

struct StateRec {
    state: SlideState,
    parent: Option<(usize, Side, Edge)>,
}

struct Exploration {
    states: Vec<StateRec>,
    /// First state index, in discovery order, where the pair is a strict
    /// (virtual) ascending loop.
    ascending: Option<usize>,
    /// First comparable pair `(lower, upper)` found, ordered by
    /// divisibility.
    first_fire: Option<(usize, usize)>,
}

impl Exploration {
    fn history(&self, mut idx: usize, side: Side) -> Vec<Edge> {
        let mut steps = Vec::new();
        while let Some((p, s, over)) = self.states[idx].parent {
            if s == side {
                steps.push(over);
            }
            idx = p;
        }
        steps.reverse();
        steps
    }
}

fn divides(a: &BigInt, b: &BigInt) -> bool {
    !a.is_zero() && (b % a).is_zero()
}

fn state_reduced(s: &SlideState) -> bool {
    let loop_now = s.origin_e == s.origin_rev;
    (loop_now || !s.label_e.abs().is_one()) && (loop_now || !s.label_rev.abs().is_one())
}

fn state_ascending(s: &SlideState) -> bool {
    s.origin_e == s.origin_rev
        && s.label_e != s.label_rev
        && (divides(&s.label_e, &s.label_rev) || divides(&s.label_rev, &s.label_e))
}

/// Breadth-first exploration of the slide space of `e` over the unsigned
/// base graph. A state is not expanded once `max_dividers` earlier states
/// with the same positions strictly divide it; by Dickson's lemma this
/// bounds the expansion while still reaching ascending-loop states hidden
/// just past the first comparable pair.
fn explore(base: &LabeledGraph, e: Edge, max_dividers: usize) -> Exploration {
    let e = e.forward();
    let root = SlideState {
        origin_e: base.origin(e),
        origin_rev: base.origin(e.rev()),
        label_e: base.label(e).abs(),
        label_rev: base.label(e.rev()).abs(),
    };
    let mut ex = Exploration {
        states: Vec::new(),
        ascending: None,
        first_fire: None,
    };
    let mut index: BTreeMap<(Vertex, Vertex, BigInt, BigInt), usize> = BTreeMap::new();
    let mut by_pos: BTreeMap<(Vertex, Vertex), Vec<usize>> = BTreeMap::new();
    let mut queue: Vec<(usize, bool)> = Vec::new(); // (state, expandable)

    let admit = |ex: &mut Exploration,
                     index: &mut BTreeMap<(Vertex, Vertex, BigInt, BigInt), usize>,
                     by_pos: &mut BTreeMap<(Vertex, Vertex), Vec<usize>>,
                     s: SlideState,
                     parent: Option<(usize, Side, Edge)>|
     -> Option<(usize, bool)> {
        let key = (
            s.origin_e,
            s.origin_rev,
            s.label_e.clone(),
            s.label_rev.clone(),
        );
        if index.contains_key(&key) {
            return None;
        }
        let idx = ex.states.len();
        let mut dividers = 0usize;
        // Only the growth direction fires: if the space is infinite, an
        // earlier state dividing a later one must eventually appear, since
        // otherwise nothing is ever pruned and the search would have to
        // enumerate an infinite antichain, contradicting Dickson's lemma.
        for &old in by_pos.get(&(s.origin_e, s.origin_rev)).unwrap_or(&vec![]) {
            let o = &ex.states[old].state;
            if divides(&o.label_e, &s.label_e) && divides(&o.label_rev, &s.label_rev) {
                dividers += 1;
                if ex.first_fire.is_none() {
                    ex.first_fire = Some((old, idx));
                }
            }
        }
        if ex.ascending.is_none() && state_ascending(&s) {
            ex.ascending = Some(idx);
        }
        index.insert(key, idx);
        by_pos
            .entry((s.origin_e, s.origin_rev))
            .or_default()
            .push(idx);
        ex.states.push(StateRec { state: s, parent });
        Some((idx, dividers < max_dividers))
    };

    if let Some(entry) = admit(&mut ex, &mut index, &mut by_pos, root, None) {
        queue.push(entry);
    }
    let mut head = 0usize;
    while head < queue.len() {
        let (cur, expandable) = queue[head];
        head += 1;
        if !expandable {
            continue;
        }
        let cur_state = ex.states[cur].state.clone();
        for side in [Side::E, Side::Rev] {
            let (pos, label, other_pos) = match side {
                Side::E => (cur_state.origin_e, &cur_state.label_e, cur_state.origin_rev),
                Side::Rev => (cur_state.origin_rev, &cur_state.label_rev, cur_state.origin_e),
            };
            let _ = other_pos;
            for over in base.edges_at(pos).collect::<Vec<_>>() {
                if over.forward() == e {
                    continue;
                }
                if !divides(base.label(over), label) {
                    continue;
                }
                let new_label = label / base.label(over) * base.label(over.rev());
                let mut next = cur_state.clone();
                match side {
                    Side::E => {
                        next.origin_e = base.terminus(over);
                        next.label_e = new_label;
                    }
                    Side::Rev => {
                        next.origin_rev = base.terminus(over);
                        next.label_rev = new_label;
                    }
                }
                if !state_reduced(&next) {
                    continue;
                }
                if let Some(entry) = admit(
                    &mut ex,
                    &mut index,
                    &mut by_pos,
                    next,
                    Some((cur, side, over)),
                ) {
                    queue.push(entry);
                }
            }
        }
    }
    ex
}

fn integer_cycle_witness(base: &LabeledGraph, e: Edge, ex: &Exploration) -> IntegerCycleWitness {
    let (lower, upper) = ex.first_fire.expect("witness requires a fire");
    let lo = &ex.states[lower].state;
    let up = &ex.states[upper].state;
    let (side, ratio) = if up.label_e != lo.label_e {
        (Side::E, &up.label_e / &lo.label_e)
    } else {
        (Side::Rev, &up.label_rev / &lo.label_rev)
    };
    let mut path: Vec<Edge> = ex
        .history(lower, side)
        .into_iter()
        .rev()
        .map(|x| x.rev())
        .collect();
    path.extend(ex.history(upper, side));
    let cycle = EdgePath(path).tightened();
    let edge = match side {
        Side::E => e.forward(),
        Side::Rev => e.forward().rev(),
    };
    debug_assert!(!cycle.is_empty());
    debug_assert!(ratio.abs() > BigInt::one());
    let _ = base;
    IntegerCycleWitness {
        edge,
        cycle,
        modulus: ratio,
        state: lo.clone(),
    }
}

fn monotone_witness(e: Edge, ex: &Exploration, idx: usize) -> MonotoneWitness {
    let s = &ex.states[idx].state;
    let e = e.forward();
    let (final_edge, side_kept, side_rev, modulus) = if divides(&s.label_e, &s.label_rev) {
        // rev(e) slid along the prefix; the cycle ends with e
        (e, Side::Rev, Side::E, &s.label_rev / &s.label_e)
    } else {
        (e.rev(), Side::E, Side::Rev, &s.label_e / &s.label_rev)
    };
    let mut path = ex.history(idx, side_kept);
    path.extend(ex.history(idx, side_rev).into_iter().rev().map(|x| x.rev()));
    MonotoneWitness {
        final_edge,
        prefix: EdgePath(path).tightened(),
        modulus,
    }
}

/// Explores the slide space of the geometric edge of `e`: either the full
/// finite set of states, or a strict integer cycle witnessing infiniteness.
pub fn slide_space(g: &LabeledGraph, e: Edge) -> Result<SlideSpaceResult, MobilityError> {
    if !g.is_reduced() {
        return Err(MobilityError::NotReduced);
    }
    let base = g.unsigned();
    let ex = explore(&base, e, 3);
    match ex.first_fire {
        Some(_) => Ok(SlideSpaceResult::Infinite(integer_cycle_witness(
            &base, e, &ex,
        ))),
        None => Ok(SlideSpaceResult::Finite(
            ex.states.into_iter().map(|r| r.state).collect(),
        )),
    }
}

/// Decides mobility of the geometric edge of `e`. A strict monotone cycle
/// (an ascending-loop state in the exploration) is reported in preference
/// to an infinite slide space when both certificates exist.
pub fn is_mobile(g: &LabeledGraph, e: Edge) -> Result<Mobility, MobilityError> {
    if !g.is_reduced() {
        return Err(MobilityError::NotReduced);
    }
    let base = g.unsigned();
    let ex = explore(&base, e, 3);
    if let Some(idx) = ex.ascending {
        return Ok(Mobility::Mobile(MobileReason::MonotoneCycle(
            monotone_witness(e, &ex, idx),
        )));
    }
    if ex.first_fire.is_some() {
        return Ok(Mobility::Mobile(MobileReason::InfiniteSlideSpace(
            integer_cycle_witness(&base, e, &ex),
        )));
    }
    Ok(Mobility::NonMobile)
}

/// Mobility of every geometric edge, in edge order.
pub fn mobility_report(g: &LabeledGraph) -> Result<Vec<(Edge, Mobility)>, MobilityError> {
    g.geometric_edges()
        .map(|e| is_mobile(g, e).map(|m| (e, m)))
        .collect()
}

/// A connected component of the non-mobile subgraph.
#[derive(Clone, Debug)]
pub struct Component {
    pub vertices: Vec<Vertex>,
    /// Geometric representatives of the non-mobile edges inside.
    pub edges: Vec<Edge>,
    pub simply_connected: bool,
    /// For Betti number one: the unique preferred mobile edge whose origin
    /// lies in this (simply connected) component.
    pub preferred_edge: Option<Edge>,
}

/// The non-mobile subgraph with its components, preferred edges, and the
/// count of geometric s-mobile edges.
#[derive(Clone, Debug)]
pub struct NonMobileDecomposition {
    pub mobility: Vec<(Edge, Mobility)>,
    pub components: Vec<Component>,
    /// Number of geometric mobile edges that are not ascending loops.
    pub s: usize,
}

fn is_ascending_loop_pair(g: &LabeledGraph, e: Edge) -> bool {
    g.is_loop(e) && (g.label(e).abs().is_one() || g.label(e.rev()).abs().is_one())
}

fn is_strict_ascending_loop_pair(g: &LabeledGraph, e: Edge) -> bool {
    g.is_loop(e)
        && (g.label(e).abs().is_one() != g.label(e.rev()).abs().is_one())
}

/// Computes the non-mobile subgraph (mobile edges discarded, vertices of
/// strict ascending loops discarded) and its components. Preferred mobile
/// edges are assigned when the Betti number is one.
pub fn non_mobile_decomposition(
    g: &LabeledGraph,
) -> Result<NonMobileDecomposition, MobilityError> {
    let mobility = mobility_report(g)?;
    let mobile: BTreeSet<usize> = mobility
        .iter()
        .filter(|(_, m)| m.is_mobile())
        .map(|(e, _)| e.geometric_index())
        .collect();
    let dropped_vertices: BTreeSet<Vertex> = g
        .geometric_edges()
        .filter(|&e| is_strict_ascending_loop_pair(g, e))
        .map(|e| g.origin(e))
        .collect();
    let s = mobility
        .iter()
        .filter(|(e, m)| m.is_mobile() && !is_ascending_loop_pair(g, *e))
        .count();

    // union-find over the surviving vertices
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for e in g.geometric_edges() {
        if mobile.contains(&e.geometric_index()) {
            continue;
        }
        let (u, v) = (g.origin(e), g.terminus(e));
        if dropped_vertices.contains(&u) || dropped_vertices.contains(&v) {
            continue;
        }
        let (ru, rv) = (find(&mut parent, u.index()), find(&mut parent, v.index()));
        parent[ru] = rv;
    }
    let mut roots: BTreeMap<usize, Component> = BTreeMap::new();
    for v in g.vertices() {
        if dropped_vertices.contains(&v) {
            continue;
        }
        let r = find(&mut parent, v.index());
        roots
            .entry(r)
            .or_insert_with(|| Component {
                vertices: Vec::new(),
                edges: Vec::new(),
                simply_connected: true,
                preferred_edge: None,
            })
            .vertices
            .push(v);
    }
    for e in g.geometric_edges() {
        if mobile.contains(&e.geometric_index())
            || dropped_vertices.contains(&g.origin(e))
            || dropped_vertices.contains(&g.terminus(e))
        {
            continue;
        }
        let r = find(&mut parent, g.origin(e).index());
        roots.get_mut(&r).expect("endpoint registered").edges.push(e);
    }
    let mut components: Vec<Component> = roots.into_values().collect();
    for c in &mut components {
        c.simply_connected = c.edges.len() + 1 == c.vertices.len();
    }

    if g.betti_number() == 1 {
        let cycle = match crate::modular::modulus_generator(g).expect("Betti one") {
            crate::modular::ModulusGenerator::Cycle { cycle, .. } => cycle,
            crate::modular::ModulusGenerator::Trivial => unreachable!("Betti one has a cycle"),
        };
        for (e, m) in &mobility {
            if !m.is_mobile() || is_ascending_loop_pair(g, *e) {
                continue;
            }
            let preferred = preferred_direction(g, *e, &cycle);
            let home = g.origin(preferred);
            if let Some(c) = components
                .iter_mut()
                .find(|c| c.simply_connected && c.vertices.contains(&home))
            {
                debug_assert!(
                    c.preferred_edge.is_none(),
                    "one preferred edge per component"
                );
                c.preferred_edge = Some(preferred);
            }
        }
        debug_assert_eq!(
            components.iter().filter(|c| c.simply_connected).count(),
            s,
            "simply connected components match the s-mobile count"
        );
    }

    Ok(NonMobileDecomposition {
        mobility,
        components,
        s,
    })
}

/// The preferred orientation of a mobile geometric edge: the one lying on
/// the oriented cycle, or (off the cycle) the one whose origin is separated
/// from the cycle by the edge.
fn preferred_direction(g: &LabeledGraph, e: Edge, cycle: &EdgePath) -> Edge {
    for d in [e.forward(), e.forward().rev()] {
        if cycle.0.contains(&d) {
            return d;
        }
    }
    // bridge: origin side must avoid the cycle
    let cycle_vertices: BTreeSet<Vertex> = cycle.0.iter().map(|&x| g.origin(x)).collect();
    for d in [e.forward(), e.forward().rev()] {
        let mut seen = BTreeSet::new();
        seen.insert(g.origin(d));
        let mut stack = vec![g.origin(d)];
        while let Some(v) = stack.pop() {
            for x in g.edges_at(v) {
                if x.forward() == e.forward() {
                    continue;
                }
                let t = g.terminus(x);
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        if seen.is_disjoint(&cycle_vertices) {
            return d;
        }
    }
    unreachable!("one side of a bridge avoids the cycle")
}

/// Finiteness criterion for the set of reduced labeled graphs: true for a
/// single ascending loop (the solvable Baumslag-Solitar case has a unique
/// reduced graph), otherwise true iff no edge is mobile.
pub fn has_finite_lg(g: &LabeledGraph) -> Result<bool, MobilityError> {
    if !g.is_reduced() {
        return Err(MobilityError::NotReduced);
    }
    if classify_elementary(g) != ElementaryClass::NonElementary {
        return Err(MobilityError::Elementary);
    }
    if g.geometric_edge_count() == 1 && is_ascending_loop_pair(g, Edge(0)) {
        return Ok(true);
    }
    Ok(mobility_report(g)?.iter().all(|(_, m)| !m.is_mobile()))
}

/// All states `(position, label)` reachable by one slide move of `e` over a
/// path of other edges, with no reducedness constraint along the way (the
/// move has no materialized intermediates). Finite whenever `e` admits no
/// strict integer cycle. Path edges whose geometric index is in `banned`
/// are never slid over.
pub(crate) fn single_move_states(
    g: &LabeledGraph,
    e: Edge,
    banned: Option<usize>,
) -> Vec<(Vertex, BigInt)> {
    let start = (g.origin(e), g.label(e).clone());
    let mut seen: BTreeSet<(Vertex, BigInt)> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = vec![start];
    let mut head = 0;
    while head < queue.len() {
        let (pos, label) = queue[head].clone();
        head += 1;
        for over in g.edges_at(pos).collect::<Vec<_>>() {
            if over.forward() == e.forward()
                || banned == Some(over.geometric_index())
                || !divides(g.label(over), &label)
            {
                continue;
            }
            let next = (
                g.terminus(over),
                &label / g.label(over) * g.label(over.rev()),
            );
            if seen.insert(next.clone()) {
                queue.push(next);
            }
        }
    }
    queue
}

pub(crate) fn single_move_results(
    g: &LabeledGraph,
    e: Edge,
    banned: Option<usize>,
) -> Vec<LabeledGraph> {
    let mut out = Vec::new();
    for (pos, label) in single_move_states(g, e, banned) {
        if pos == g.origin(e) && label == *g.label(e) {
            continue;
        }
        let mut h = g.clone();
        h.set_origin(e, pos);
        h.set_label(e, label);
        if h.is_reduced() {
            out.push(h);
        }
    }
    out
}

/// Enumerates the full set of reduced labeled graphs of a group with no
/// mobile edges: the closure of the graph under slide moves, deduplicated
/// by canonical code. Finite by the finiteness criterion.
pub fn enumerate_lg_no_mobile(
    g: &LabeledGraph,
) -> Result<BTreeMap<CanonicalCode, LabeledGraph>, MobilityError> {
    if !g.is_reduced() {
        return Err(MobilityError::NotReduced);
    }
    if classify_elementary(g) != ElementaryClass::NonElementary {
        return Err(MobilityError::Elementary);
    }
    if mobility_report(g)?.iter().any(|(_, m)| m.is_mobile()) {
        return Err(MobilityError::HasMobileEdge);
    }
    let start = canonical_form(g);
    let mut seen: BTreeMap<CanonicalCode, LabeledGraph> = BTreeMap::new();
    seen.insert(start.code.clone(), start.graph.clone());
    let mut queue = vec![start.graph];
    let mut head = 0;
    while head < queue.len() {
        let cur = queue[head].clone();
        head += 1;
        for e in cur.edges() {
            for h in single_move_results(&cur, e, None) {
                let cf = canonical_form(&h);
                if !seen.contains_key(&cf.code) {
                    seen.insert(cf.code, cf.graph.clone());
                    queue.push(cf.graph);
                }
            }
        }
    }
    Ok(seen)
}

/// Isomorphism when `g` has no mobile edges: the groups are isomorphic iff
/// the canonical code of `h` appears in the finite enumeration of `g`.
pub fn iso_no_mobile(g: &LabeledGraph, h: &LabeledGraph) -> Result<bool, MobilityError> {
    if !h.is_reduced() {
        return Err(MobilityError::NotReduced);
    }
    let lg = enumerate_lg_no_mobile(g)?;
    Ok(lg.contains_key(&canonical_code(h)))
}
