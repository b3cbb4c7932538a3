//! Canonical codes for labeled graphs.
//!
//! Two labeled graphs get the same code exactly when they are related by a
//! label-preserving graph isomorphism composed with admissible sign changes.
//! The search is exhaustive over vertex placements, pruned by an iterated
//! neighborhood signature, with the sign ambiguity quotiented out by
//! enumerating vertex sign flips and displaying each geometric edge in a
//! fixed representative pattern.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::graph::{Edge, LabeledGraph, Vertex};

/// A totally ordered byte code identifying a labeled graph up to
/// isomorphism and admissible sign changes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(core::str::from_utf8(&self.0).unwrap_or("<code>"))
    }
}

/// A canonically relabeled representative together with its code.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub graph: LabeledGraph,
    pub code: CanonicalCode,
}

pub fn canonical_code(g: &LabeledGraph) -> CanonicalCode {
    canonicalize(g, None).code
}

pub fn canonical_form(g: &LabeledGraph) -> CanonicalForm {
    canonicalize(g, None)
}

/// Code of a graph with one distinguished geometric edge. Used for pointed
/// labeled graphs, where the attaching edge must not be conflated with
/// ordinary edges of the same shape.
pub fn canonical_code_tagged(g: &LabeledGraph, distinguished: Edge) -> CanonicalCode {
    canonicalize(g, Some(distinguished.geometric_index())).code
}

/// One geometric edge under a vertex placement, sign-normalized: the label
/// at the `a` side is displayed positive and the product sign rides on the
/// `b` side. Positive patterns order before negative ones, so canonical
/// representatives carry positive labels wherever the sign class allows.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Record {
    a: u32,
    b: u32,
    label_a: BigInt,
    label_b_abs: BigInt,
    label_b_neg: bool,
    tagged: bool,
}

impl Record {
    fn label_b(&self) -> BigInt {
        if self.label_b_neg {
            -self.label_b_abs.clone()
        } else {
            self.label_b_abs.clone()
        }
    }
}

fn canonicalize(g: &LabeledGraph, tag: Option<usize>) -> CanonicalForm {
    let n = g.vertex_count();
    let blocks = refinement_blocks(g);

    // Unsigned end data per geometric edge, plus the sign of the label
    // product, which is the only sign information not erasable by
    // admissible changes.
    let geo: Vec<(Vertex, Vertex, BigInt, BigInt, bool)> = g
        .geometric_edges()
        .map(|e| {
            let product_negative = (g.label(e) * g.label(e.rev())).is_negative();
            (
                g.origin(e),
                g.terminus(e),
                g.label(e).abs(),
                g.label(e.rev()).abs(),
                product_negative,
            )
        })
        .collect();

    let mut best: Option<(Vec<Record>, Vec<usize>)> = None;
    for_each_placement(&blocks, n, &mut |pos: &[u32]| {
        // pos[v] = position of vertex v
        let mut base: Vec<Record> = Vec::with_capacity(geo.len());
        for (k, (u, v, lu, lv, neg)) in geo.iter().enumerate() {
            let (pa, pb) = (pos[u.index()], pos[v.index()]);
            let (a, b, la, lb) = if pa < pb || (pa == pb && lu <= lv) {
                (pa, pb, lu.clone(), lv.clone())
            } else {
                (pb, pa, lv.clone(), lu.clone())
            };
            base.push(Record {
                a,
                b,
                label_a: la,
                label_b_abs: lb,
                label_b_neg: *neg,
                tagged: tag == Some(k),
            });
        }
        // Quotient by vertex sign flips: flipping a set S of vertices
        // toggles the product sign of every non-loop edge with exactly one
        // endpoint in S.
        for flips in 0u64..(1u64 << n) {
            let mut records = base.clone();
            for (k, rec) in records.iter_mut().enumerate() {
                let (u, v, ..) = &geo[k];
                if u != v {
                    let toggles =
                        ((flips >> u.index()) ^ (flips >> v.index())) & 1 == 1;
                    if toggles {
                        rec.label_b_neg = !rec.label_b_neg;
                    }
                }
            }
            records.sort();
            match &best {
                Some((b, _)) if *b <= records => {}
                _ => best = Some((records, pos.iter().map(|&p| p as usize).collect())),
            }
        }
    });

    let (records, _) = best.expect("graphs are nonempty");
    let code = serialize(n, &records);
    let graph = rebuild(n, &records);
    CanonicalForm {
        graph,
        code: CanonicalCode(code),
    }
}

fn serialize(n: usize, records: &[Record]) -> Vec<u8> {
    let mut s = String::new();
    s.push_str(&alloc::format!("{n}|"));
    for r in records {
        s.push_str(&alloc::format!(
            "{}-{}:{},{}{};",
            r.a,
            r.b,
            r.label_a,
            r.label_b(),
            if r.tagged { "*" } else { "" }
        ));
    }
    s.into_bytes()
}

fn rebuild(n: usize, records: &[Record]) -> LabeledGraph {
    let vertices = (0..n).map(|i| alloc::format!("v{i}")).collect();
    let edges = records
        .iter()
        .enumerate()
        .map(|(k, r)| crate::graph::GeometricEdgeSpec {
            id: alloc::format!("e{k}"),
            from: alloc::format!("v{}", r.a),
            to: alloc::format!("v{}", r.b),
            label_from: r.label_a.clone(),
            label_to: r.label_b(),
        })
        .collect();
    LabeledGraph::new(vertices, edges).expect("canonical rebuild is valid")
}

/// Vertex classes under an iterated, sign-blind neighborhood signature,
/// ordered canonically. Placements assign positions block by block.
fn refinement_blocks(g: &LabeledGraph) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let end_sig = |e: Edge| -> u64 {
        let mut h = Fnv::new();
        h.byte(g.is_loop(e) as u8);
        h.bigint(&g.label(e).abs());
        h.bigint(&g.label(e.rev()).abs());
        h.finish()
    };
    let mut sig: Vec<u64> = g
        .vertices()
        .map(|v| {
            let mut ends: Vec<u64> = g.edges_at(v).map(end_sig).collect();
            ends.sort_unstable();
            let mut h = Fnv::new();
            for x in ends {
                h.u64(x);
            }
            h.finish()
        })
        .collect();
    for _ in 0..n {
        let next: Vec<u64> = g
            .vertices()
            .map(|v| {
                let mut ends: Vec<(u64, u64)> = g
                    .edges_at(v)
                    .map(|e| (end_sig(e), sig[g.terminus(e).index()]))
                    .collect();
                ends.sort_unstable();
                let mut h = Fnv::new();
                h.u64(sig[v.index()]);
                for (a, b) in ends {
                    h.u64(a);
                    h.u64(b);
                }
                h.finish()
            })
            .collect();
        if partition_of(&next) == partition_of(&sig) {
            break;
        }
        sig = next;
    }
    let mut classes: Vec<(u64, Vec<Vertex>)> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| sig[i]);
    for i in order {
        let s = sig[i];
        match classes.last_mut() {
            Some((h, vs)) if *h == s => vs.push(Vertex(i as u32)),
            _ => classes.push((s, vec![Vertex(i as u32)])),
        }
    }
    classes.into_iter().map(|(_, vs)| vs).collect()
}

fn partition_of(sig: &[u64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..sig.len()).collect();
    order.sort_by_key(|&i| (sig[i], i));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match out.last_mut() {
            Some(c) if sig[c[0]] == sig[i] => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

/// Calls `f` with every placement consistent with the class blocks:
/// block `i` occupies a contiguous run of positions, in all orders.
fn for_each_placement(blocks: &[Vec<Vertex>], n: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(
        blocks: &[Vec<Vertex>],
        bi: usize,
        offset: usize,
        start: usize,
        used: &mut Vec<bool>,
        pos: &mut [u32],
        f: &mut dyn FnMut(&[u32]),
    ) {
        if bi == blocks.len() {
            f(pos);
            return;
        }
        let block = &blocks[bi];
        if offset == block.len() {
            let mut next_used = vec![false; blocks.get(bi + 1).map_or(0, |b| b.len())];
            rec(blocks, bi + 1, 0, start + block.len(), &mut next_used, pos, f);
            return;
        }
        for i in 0..block.len() {
            if !used[i] {
                used[i] = true;
                pos[block[i].index()] = (start + offset) as u32;
                rec(blocks, bi, offset + 1, start, used, pos, f);
                used[i] = false;
            }
        }
    }
    let mut pos = vec![0u32; n];
    if blocks.is_empty() {
        f(&pos);
        return;
    }
    let mut used = vec![false; blocks[0].len()];
    rec(blocks, 0, 0, 0, &mut used, &mut pos, f);
}

/// FNV-1a, used only to prune the placement search; collisions cost time,
/// not correctness.
struct Fnv(u64);

impl Fnv {
    fn new() -> Fnv {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    fn byte(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }
    fn u64(&mut self, x: u64) {
        for b in x.to_le_bytes() {
            self.byte(b);
        }
    }
    fn bigint(&mut self, x: &BigInt) {
        for b in x.to_signed_bytes_le() {
            self.byte(b);
        }
        self.byte(0xff);
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::*;

    /// Definitional oracle: is there a vertex bijection plus admissible sign
    /// changes carrying `g` onto `h`? Exhaustive over all permutations and
    /// all vertex flip sets, independent of the pruned search above.
    pub(crate) fn sign_iso_oracle(g: &LabeledGraph, h: &LabeledGraph) -> bool {
        if g.vertex_count() != h.vertex_count()
            || g.geometric_edge_count() != h.geometric_edge_count()
        {
            return false;
        }
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        // multiset of (a, b, la, +-lb) records for a graph under a placement
        let records = |g: &LabeledGraph, pos: &[usize], flips: u64| -> Vec<Record> {
            let mut rs: Vec<Record> = g
                .geometric_edges()
                .map(|e| {
                    let (u, v) = (g.origin(e), g.terminus(e));
                    let (lu, lv) = (g.label(e).abs(), g.label(e.rev()).abs());
                    let mut neg = (g.label(e) * g.label(e.rev())).is_negative();
                    if u != v && ((flips >> u.index()) ^ (flips >> v.index())) & 1 == 1 {
                        neg = !neg;
                    }
                    let (pa, pb) = (pos[u.index()] as u32, pos[v.index()] as u32);
                    let (a, b, la, lb) = if pa < pb || (pa == pb && lu <= lv) {
                        (pa, pb, lu, lv)
                    } else {
                        (pb, pa, lv, lu)
                    };
                    Record {
                        a,
                        b,
                        label_a: la,
                        label_b_abs: lb,
                        label_b_neg: neg,
                        tagged: false,
                    }
                })
                .collect();
            rs.sort();
            rs
        };
        let id: Vec<usize> = (0..n).collect();
        let target = records(h, &id, 0);
        permutohedron(&mut perm, &mut |pos: &[usize]| {
            (0u64..(1 << n)).any(|flips| records(g, pos, flips) == target)
        })
    }

    fn permutohedron(perm: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        fn rec(k: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
            if k == perm.len() {
                return f(perm);
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                if rec(k + 1, perm, f) {
                    perm.swap(k, i);
                    return true;
                }
                perm.swap(k, i);
            }
            false
        }
        rec(0, perm, f)
    }

    #[test]
    fn sign_change_preserves_code() {
        let g = f3g();
        for v in g.vertices() {
            assert_eq!(canonical_code(&g), canonical_code(&g.negate_vertex(v)));
        }
        for e in g.geometric_edges() {
            assert_eq!(canonical_code(&g), canonical_code(&g.negate_edge(e)));
        }
    }

    #[test]
    fn renaming_preserves_code() {
        let g = f3g();
        let renamed = build(
            &["x", "y", "z"],
            &[
                ("p", "y", "x", 2, 2),
                ("q", "x", "x", 1, 2),
                ("r", "z", "x", 2, 2),
            ],
        );
        assert_eq!(canonical_code(&g), canonical_code(&renamed));
        assert!(sign_iso_oracle(&g, &renamed));
    }

    #[test]
    fn f3g_variants_have_different_codes() {
        // The label multisets at the pendant vertices differ, so no
        // bijection works; cross-checked against the exhaustive oracle.
        assert!(!sign_iso_oracle(&f3g(), &f3gp()));
        assert_ne!(canonical_code(&f3g()), canonical_code(&f3gp()));
    }

    #[test]
    fn orientation_distinguishes_loops() {
        assert_ne!(canonical_code(&bs(1, -1)), canonical_code(&bs(1, 1)));
        assert_eq!(canonical_code(&bs(-1, 1)), canonical_code(&bs(1, -1)));
        assert_eq!(canonical_code(&bs(2, -3)), canonical_code(&bs(-2, 3)));
        assert_ne!(canonical_code(&bs(2, -3)), canonical_code(&bs(2, 3)));
    }

    #[test]
    fn tagged_code_distinguishes_the_marked_edge() {
        // Two parallel (2,3)/(2,5) edges: tagging one or the other differs.
        let g = build(
            &["u", "v"],
            &[("e0", "u", "v", 2, 3), ("e1", "u", "v", 2, 5)],
        );
        let e0 = g.edge_by_name("e0").unwrap();
        let e1 = g.edge_by_name("e1").unwrap();
        assert_ne!(canonical_code_tagged(&g, e0), canonical_code_tagged(&g, e1));
        let h = build(
            &["a", "b"],
            &[("f1", "b", "a", 5, 2), ("f0", "a", "b", 2, 3)],
        );
        let f0 = h.edge_by_name("f0").unwrap();
        assert_eq!(canonical_code_tagged(&g, e0), canonical_code_tagged(&h, f0));
    }

    #[test]
    fn canonical_form_round_trips() {
        for g in [f1l(), f1r(), f3g(), f3gp(), d1(), d2(), bs(2, -3)] {
            let cf = canonical_form(&g);
            assert_eq!(canonical_code(&cf.graph), cf.code);
        }
    }

    #[test]
    fn parallel_edges_with_mixed_signs() {
        // Three parallel edges with equal absolute labels and mixed sign
        // products; code equality must match the exhaustive oracle.
        let g = build(
            &["u", "v"],
            &[
                ("a", "u", "v", 2, 3),
                ("b", "u", "v", 2, -3),
                ("c", "u", "v", 2, -3),
            ],
        );
        let h = build(
            &["u", "v"],
            &[
                ("a", "u", "v", 2, -3),
                ("b", "u", "v", 2, 3),
                ("c", "u", "v", 2, 3),
            ],
        );
        assert_eq!(sign_iso_oracle(&g, &h), canonical_code(&g) == canonical_code(&h));
        let k = build(
            &["u", "v"],
            &[
                ("a", "u", "v", 2, -3),
                ("b", "u", "v", 2, -3),
                ("c", "u", "v", 2, -3),
            ],
        );
        assert_eq!(sign_iso_oracle(&g, &k), canonical_code(&g) == canonical_code(&k));
    }
}
