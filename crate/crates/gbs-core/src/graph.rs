//! The labeled-graph data model.
//!
//! A labeled graph is a finite connected graph with a fixed-point-free
//! involution on directed edges and a nonzero integer label attached to
//! every directed edge end. Directed edges are stored in partner pairs:
//! edge `2k` is the document (`from -> to`) direction of geometric edge `k`
//! and edge `2k + 1` is its reversal.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Handle for a vertex of one [`LabeledGraph`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Vertex(pub(crate) u32);

impl Vertex {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Handle for a directed edge of one [`LabeledGraph`].
///
/// The reversal of a directed edge is obtained with [`Edge::rev`]; the pair
/// `{e, e.rev()}` is a geometric edge.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge(pub(crate) u32);

impl Edge {
    /// The partner edge with orientation reversed.
    pub fn rev(self) -> Edge {
        Edge(self.0 ^ 1)
    }

    /// True for the representative direction of the geometric edge
    /// (the `from -> to` direction of the input document).
    pub fn is_forward(self) -> bool {
        self.0 & 1 == 0
    }

    /// The representative direction of this edge's geometric edge.
    pub fn forward(self) -> Edge {
        Edge(self.0 & !1)
    }

    /// Index of the underlying geometric edge.
    pub fn geometric_index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A nonzero integer edge-end label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Label(BigInt);

impl Label {
    pub fn new(value: BigInt) -> Result<Label, GraphError> {
        if value.is_zero() {
            Err(GraphError::ZeroLabel { edge: String::new() })
        } else {
            Ok(Label(value))
        }
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn abs(&self) -> BigInt {
        self.0.abs()
    }

    pub fn is_unit(&self) -> bool {
        self.0.abs().is_one()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Label {
        assert!(v != 0, "labels are nonzero");
        Label(BigInt::from(v))
    }
}

/// Structured validation errors for labeled-graph input.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum GraphError {
    #[error("edge {edge}: label is zero")]
    ZeroLabel { edge: String },
    #[error("vertex {vertex} is not connected to the rest of the graph")]
    Disconnected { vertex: String },
    #[error("edge {edge}: involution is not a fixed-point-free pairing")]
    BadInvolution { edge: String },
    #[error("edge {edge}: unknown vertex {vertex}")]
    UnknownVertex { edge: String, vertex: String },
    #[error("duplicate id {id}")]
    DuplicateId { id: String },
    #[error("graph has no vertices")]
    Empty,
}

/// Input record for one geometric edge.
#[derive(Clone, Debug)]
pub struct GeometricEdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub label_from: BigInt,
    pub label_to: BigInt,
}

/// Input record for one directed edge, with an explicit partner reference.
#[derive(Clone, Debug)]
pub struct DirectedEdgeSpec {
    pub id: String,
    pub origin: String,
    pub label: BigInt,
    pub partner: String,
}

/// A finite connected labeled graph with fixed-point-free edge involution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledGraph {
    vertex_names: Vec<String>,
    /// One name per geometric edge.
    edge_names: Vec<String>,
    /// Origin vertex per directed edge; `terminus(e) = origin(e.rev())`.
    origins: Vec<Vertex>,
    /// Label per directed edge, pictured at its origin.
    labels: Vec<Label>,
}

impl LabeledGraph {
    /// Validates raw vertex and geometric-edge lists into a labeled graph.
    ///
    /// The involution is correct by construction here; see
    /// [`LabeledGraph::from_directed`] for fully raw directed input.
    pub fn new(vertices: Vec<String>, edges: Vec<GeometricEdgeSpec>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(GraphError::DuplicateId { id: v.clone() });
            }
        }
        let vertex_ix = |name: &str, edge: &str| -> Result<Vertex, GraphError> {
            vertices
                .iter()
                .position(|v| v == name)
                .map(|i| Vertex(i as u32))
                .ok_or_else(|| GraphError::UnknownVertex {
                    edge: edge.to_string(),
                    vertex: name.to_string(),
                })
        };
        let mut edge_names = Vec::new();
        let mut origins = Vec::new();
        let mut labels = Vec::new();
        let mut seen_edges = BTreeSet::new();
        for e in &edges {
            if !seen_edges.insert(e.id.clone()) {
                return Err(GraphError::DuplicateId { id: e.id.clone() });
            }
            if e.label_from.is_zero() || e.label_to.is_zero() {
                return Err(GraphError::ZeroLabel { edge: e.id.clone() });
            }
            let from = vertex_ix(&e.from, &e.id)?;
            let to = vertex_ix(&e.to, &e.id)?;
            edge_names.push(e.id.clone());
            origins.push(from);
            origins.push(to);
            labels.push(Label(e.label_from.clone()));
            labels.push(Label(e.label_to.clone()));
        }
        let g = LabeledGraph {
            vertex_names: vertices,
            edge_names,
            origins,
            labels,
        };
        g.check_connected()?;
        Ok(g)
    }

    /// Validates a fully raw directed-edge list, checking that the declared
    /// partner map is a fixed-point-free involution with matching endpoints.
    pub fn from_directed(
        vertices: Vec<String>,
        edges: Vec<DirectedEdgeSpec>,
    ) -> Result<Self, GraphError> {
        let mut geo: Vec<GeometricEdgeSpec> = Vec::new();
        let mut used: BTreeSet<&str> = BTreeSet::new();
        let find = |id: &str| edges.iter().find(|d| d.id == id);
        for d in &edges {
            if d.partner == d.id {
                return Err(GraphError::BadInvolution { edge: d.id.clone() });
            }
            if used.contains(d.id.as_str()) {
                continue;
            }
            let p = find(&d.partner).ok_or_else(|| GraphError::BadInvolution {
                edge: d.id.clone(),
            })?;
            if p.partner != d.id {
                return Err(GraphError::BadInvolution { edge: d.id.clone() });
            }
            used.insert(&d.id);
            used.insert(&p.id);
            geo.push(GeometricEdgeSpec {
                id: d.id.clone(),
                from: d.origin.clone(),
                to: p.origin.clone(),
                label_from: d.label.clone(),
                label_to: p.label.clone(),
            });
        }
        LabeledGraph::new(vertices, geo)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let n = self.vertex_names.len();
        let mut reached = vec![false; n];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for e in self.edges() {
                if self.origin(e).index() == v {
                    let t = self.terminus(e).index();
                    if !reached[t] {
                        reached[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        match reached.iter().position(|r| !r) {
            None => Ok(()),
            Some(i) => Err(GraphError::Disconnected {
                vertex: self.vertex_names[i].clone(),
            }),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn geometric_edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (0..self.vertex_names.len() as u32).map(Vertex)
    }

    /// All directed edges.
    pub fn edges(&self) -> impl Iterator<Item = Edge> {
        (0..self.origins.len() as u32).map(Edge)
    }

    /// The representative direction of each geometric edge.
    pub fn geometric_edges(&self) -> impl Iterator<Item = Edge> {
        (0..self.edge_names.len() as u32).map(|k| Edge(2 * k))
    }

    /// Directed edges originating at `v`.
    pub fn edges_at(&self, v: Vertex) -> impl Iterator<Item = Edge> + '_ {
        self.edges().filter(move |&e| self.origin(e) == v)
    }

    pub fn origin(&self, e: Edge) -> Vertex {
        self.origins[e.index()]
    }

    pub fn terminus(&self, e: Edge) -> Vertex {
        self.origins[e.rev().index()]
    }

    pub fn label(&self, e: Edge) -> &BigInt {
        self.labels[e.index()].value()
    }

    pub fn is_loop(&self, e: Edge) -> bool {
        self.origin(e) == self.terminus(e)
    }

    pub fn vertex_name(&self, v: Vertex) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .map(|i| Vertex(i as u32))
    }

    /// The geometric edge name, prefixed with `~` for the reversed direction.
    pub fn edge_name(&self, e: Edge) -> String {
        let base = &self.edge_names[e.geometric_index()];
        if e.is_forward() {
            base.clone()
        } else {
            let mut s = String::from("~");
            s.push_str(base);
            s
        }
    }

    pub fn edge_by_name(&self, name: &str) -> Option<Edge> {
        let (rev, base) = match name.strip_prefix('~') {
            Some(b) => (true, b),
            None => (false, name),
        };
        self.edge_names
            .iter()
            .position(|n| n == base)
            .map(|k| Edge(2 * k as u32 + rev as u32))
    }

    /// First Betti number of the underlying graph: `|E| - |V| + 1`.
    pub fn betti_number(&self) -> usize {
        self.geometric_edge_count() + 1 - self.vertex_count()
    }

    /// True iff no edge with distinct endpoints carries label `+1` or `-1`.
    pub fn is_reduced(&self) -> bool {
        self.edges()
            .all(|e| self.is_loop(e) || !self.labels[e.index()].is_unit())
    }

    /// Admissible sign change on a geometric edge: negates both of its labels.
    pub fn negate_edge(&self, e: Edge) -> LabeledGraph {
        let mut g = self.clone();
        for d in [e.forward(), e.forward().rev()] {
            g.labels[d.index()] = Label(-self.label(d));
        }
        g
    }

    /// Admissible sign change at a vertex: negates the label of every
    /// directed edge originating there.
    pub fn negate_vertex(&self, v: Vertex) -> LabeledGraph {
        let mut g = self.clone();
        for e in self.edges() {
            if self.origin(e) == v {
                g.labels[e.index()] = Label(-self.label(e));
            }
        }
        g
    }

    /// The same graph with every label replaced by its absolute value.
    pub fn unsigned(&self) -> LabeledGraph {
        let mut g = self.clone();
        for l in &mut g.labels {
            *l = Label(l.0.abs());
        }
        g
    }

    pub(crate) fn set_label(&mut self, e: Edge, value: BigInt) {
        debug_assert!(!value.is_zero());
        self.labels[e.index()] = Label(value);
    }

    pub(crate) fn set_origin(&mut self, e: Edge, v: Vertex) {
        self.origins[e.index()] = v;
    }

    /// Appends a vertex with a unique name derived from `hint`.
    pub(crate) fn push_vertex(&mut self, hint: &str) -> Vertex {
        let mut name = String::from(hint);
        let mut n = 0usize;
        while self.vertex_names.iter().any(|v| *v == name) {
            name = alloc::format!("{hint}{n}");
            n += 1;
        }
        self.vertex_names.push(name);
        Vertex(self.vertex_names.len() as u32 - 1)
    }

    /// Appends a geometric edge with a unique name derived from `hint`.
    pub(crate) fn push_edge(
        &mut self,
        hint: &str,
        from: Vertex,
        to: Vertex,
        label_from: BigInt,
        label_to: BigInt,
    ) -> Edge {
        let mut name = String::from(hint);
        let mut n = 0usize;
        while self.edge_names.iter().any(|e| *e == name) {
            name = alloc::format!("{hint}{n}");
            n += 1;
        }
        self.edge_names.push(name);
        self.origins.push(from);
        self.origins.push(to);
        self.labels.push(Label(label_from));
        self.labels.push(Label(label_to));
        Edge(self.origins.len() as u32 - 2)
    }

    /// Removes a geometric edge and, optionally, a now-isolated vertex.
    /// Edge and vertex handles held by the caller are invalidated.
    pub(crate) fn remove_geometric_edge(&mut self, e: Edge, drop_vertex: Option<Vertex>) {
        let k = e.geometric_index();
        self.edge_names.remove(k);
        self.origins.drain(2 * k..2 * k + 2);
        self.labels.drain(2 * k..2 * k + 2);
        if let Some(v) = drop_vertex {
            debug_assert!(self.origins.iter().all(|&o| o != v));
            self.vertex_names.remove(v.index());
            for o in &mut self.origins {
                if o.index() > v.index() {
                    *o = Vertex(o.0 - 1);
                }
            }
        }
    }

    /// Merges vertex `gone` into `kept`, dropping `gone` from the table.
    pub(crate) fn merge_vertex(&mut self, gone: Vertex, kept: Vertex) {
        debug_assert_ne!(gone, kept);
        for o in &mut self.origins {
            if *o == gone {
                *o = kept;
            } else if o.index() > gone.index() {
                *o = Vertex(o.0 - 1);
            }
        }
        self.vertex_names.remove(gone.index());
    }
}

/// A directed edge sequence with consecutive endpoints.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct EdgePath(pub Vec<Edge>);

impl EdgePath {
    pub fn new(edges: Vec<Edge>) -> EdgePath {
        EdgePath(edges)
    }

    pub fn empty() -> EdgePath {
        EdgePath(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks `t(e_i) = iota(e_{i+1})` for all consecutive pairs.
    pub fn is_path(&self, g: &LabeledGraph) -> bool {
        self.0
            .windows(2)
            .all(|w| g.terminus(w[0]) == g.origin(w[1]))
    }

    /// The reverse path, with every edge reversed.
    pub fn reversed(&self) -> EdgePath {
        EdgePath(self.0.iter().rev().map(|e| e.rev()).collect())
    }

    /// Removes adjacent `(x, x.rev())` pairs until none remain.
    pub fn tightened(&self) -> EdgePath {
        let mut out: Vec<Edge> = Vec::with_capacity(self.0.len());
        for &e in &self.0 {
            if out.last() == Some(&e.rev()) {
                out.pop();
            } else {
                out.push(e);
            }
        }
        EdgePath(out)
    }

    pub fn display(&self, g: &LabeledGraph) -> String {
        let mut s = String::new();
        for (i, &e) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&g.edge_name(e));
        }
        s
    }
}

/// The elementary GBS groups, which fall outside the deformation-space
/// machinery and are decided by table.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ElementaryClass {
    NonElementary,
    InfiniteCyclic,
    FreeAbelianRank2,
    KleinBottle,
}

impl fmt::Display for ElementaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementaryClass::NonElementary => "non-elementary",
            ElementaryClass::InfiniteCyclic => "infinite-cyclic",
            ElementaryClass::FreeAbelianRank2 => "free-abelian-rank-2",
            ElementaryClass::KleinBottle => "klein-bottle",
        };
        f.write_str(s)
    }
}

/// Classifies the GBS group of `g` as elementary or not, after full
/// reduction: a single vertex gives the infinite cyclic group, a unit loop
/// gives the torus or Klein bottle group depending on the loop orientation,
/// and a `(2, 2)` segment gives the Klein bottle group again.
pub fn classify_elementary(g: &LabeledGraph) -> ElementaryClass {
    let r = crate::moves::reduce(g);
    if r.geometric_edge_count() == 0 {
        return ElementaryClass::InfiniteCyclic;
    }
    if r.geometric_edge_count() == 1 {
        let e = Edge(0);
        let (a, b) = (r.label(e).abs(), r.label(e.rev()).abs());
        if r.is_loop(e) && a.is_one() && b.is_one() {
            return if (r.label(e) * r.label(e.rev())).is_positive() {
                ElementaryClass::FreeAbelianRank2
            } else {
                ElementaryClass::KleinBottle
            };
        }
        if !r.is_loop(e) && a == BigInt::from(2) && b == BigInt::from(2) {
            return ElementaryClass::KleinBottle;
        }
    }
    ElementaryClass::NonElementary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::*;

    #[test]
    fn validate_smallest_graph() {
        let g = LabeledGraph::new(vec!["v".into()], vec![]).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.betti_number(), 0);
    }

    #[test]
    fn validate_rejects_zero_label() {
        let err = LabeledGraph::new(
            vec!["v".into()],
            vec![GeometricEdgeSpec {
                id: "e".into(),
                from: "v".into(),
                to: "v".into(),
                label_from: 0.into(),
                label_to: 3.into(),
            }],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::ZeroLabel { edge: "e".into() });
    }

    #[test]
    fn validate_rejects_disconnected() {
        let err = LabeledGraph::new(vec!["u".into(), "v".into()], vec![]).unwrap_err();
        assert_eq!(err, GraphError::Disconnected { vertex: "v".into() });
    }

    #[test]
    fn validate_rejects_bad_involution() {
        let err = LabeledGraph::from_directed(
            vec!["v".into()],
            vec![DirectedEdgeSpec {
                id: "e".into(),
                origin: "v".into(),
                label: 2.into(),
                partner: "e".into(),
            }],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::BadInvolution { edge: "e".into() });
    }

    #[test]
    fn from_directed_accepts_mutual_pairs() {
        let g = LabeledGraph::from_directed(
            vec!["u".into(), "v".into()],
            vec![
                DirectedEdgeSpec {
                    id: "e".into(),
                    origin: "u".into(),
                    label: 2.into(),
                    partner: "eb".into(),
                },
                DirectedEdgeSpec {
                    id: "eb".into(),
                    origin: "v".into(),
                    label: 3.into(),
                    partner: "e".into(),
                },
            ],
        )
        .unwrap();
        assert_eq!(g.geometric_edge_count(), 1);
        let e = g.edge_by_name("e").unwrap();
        assert_eq!(g.label(e), &BigInt::from(2));
        assert_eq!(g.label(e.rev()), &BigInt::from(3));
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(segment(2, 3).betti_number(), 0);
        assert_eq!(bs(2, 3).betti_number(), 1);
        assert_eq!(f1l().betti_number(), 2);
    }

    #[test]
    fn reducedness() {
        assert!(bs(1, 2).is_reduced(), "loops with unit labels are exempt");
        assert!(!segment(1, 3).is_reduced());
        assert!(f3g().is_reduced());
    }

    #[test]
    fn elementary_table() {
        assert_eq!(classify_elementary(&bs(1, 1)), ElementaryClass::FreeAbelianRank2);
        assert_eq!(classify_elementary(&bs(1, -1)), ElementaryClass::KleinBottle);
        assert_eq!(classify_elementary(&segment(2, 2)), ElementaryClass::KleinBottle);
        assert_eq!(classify_elementary(&f3g()), ElementaryClass::NonElementary);
        assert_eq!(
            classify_elementary(&segment(1, 3)),
            ElementaryClass::InfiniteCyclic,
            "segment (1,3) collapses to a point"
        );
    }

    #[test]
    fn edge_names_round_trip() {
        let g = f1l();
        let e = g.edge_by_name("~e3").unwrap();
        assert!(!e.is_forward());
        assert_eq!(g.edge_name(e), "~e3");
        assert_eq!(g.label(e), &BigInt::from(60));
    }
}
