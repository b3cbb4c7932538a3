//! Analysis report for the `info` subcommand: one fact per line, plus a
//! machine-readable JSON form.

use gbs_core::betti1::{self, PlgiEntry, SubgroupClass};
use gbs_core::graph::{classify_elementary, ElementaryClass, LabeledGraph};
use gbs_core::mobility::{self, MobileReason, Mobility};
use gbs_core::modular::{modulus_generator, ModulusGenerator, Orientation};
use gbs_core::moves::reduce;
use serde_json::{json, Value};

pub struct Report {
    pub text: String,
    pub json: Value,
}

fn mobility_text(g: &LabeledGraph, m: &Mobility) -> String {
    match m {
        Mobility::NonMobile => "non-mobile".to_string(),
        Mobility::Mobile(MobileReason::MonotoneCycle(w)) => {
            let mut cycle = w.prefix.display(g);
            if !cycle.is_empty() {
                cycle.push(',');
            }
            cycle.push_str(&g.edge_name(w.final_edge));
            format!("mobile (monotone cycle: {cycle}; modulus {})", w.modulus)
        }
        Mobility::Mobile(MobileReason::InfiniteSlideSpace(w)) => format!(
            "mobile (infinite slide space: {} slides around {}; modulus {})",
            g.edge_name(w.edge),
            w.cycle.display(g),
            w.modulus
        ),
    }
}

fn plgi_entry_json(e: &PlgiEntry) -> Value {
    json!({
        "class": match &e.class {
            SubgroupClass::Elementary(c) => c.to_string(),
            SubgroupClass::Canonical(code) => code.to_string(),
        },
        "pointed_labels": e.space.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "space_size": e.space.codes.len(),
    })
}

/// Analyzes a graph. Move-theoretic facts are computed on the reduction.
pub fn info(g: &LabeledGraph) -> Report {
    let mut lines: Vec<String> = Vec::new();
    let r = reduce(g);
    let class = classify_elementary(&r);
    lines.push(format!("betti: {}", g.betti_number()));
    lines.push(format!("reduced: {}", g.is_reduced()));
    lines.push(format!("elementary: {class}"));
    let mut j = json!({
        "betti": g.betti_number(),
        "reduced": g.is_reduced(),
        "elementary": class.to_string(),
    });
    if class != ElementaryClass::NonElementary {
        return Report {
            text: lines.join("\n") + "\n",
            json: j,
        };
    }
    if !g.is_reduced() {
        lines.push("note: remaining facts refer to the reduced graph".to_string());
    }
    if r.betti_number() <= 1 {
        match modulus_generator(&r).expect("Betti at most one") {
            ModulusGenerator::Trivial => {
                lines.push("modulus: trivial".to_string());
                j["modulus"] = json!("trivial");
            }
            ModulusGenerator::Cycle { q, orientation, .. } => {
                let sign = match orientation {
                    Orientation::Plus => "+1",
                    Orientation::Minus => "-1",
                };
                lines.push(format!("modulus: {q} (orientation {sign})"));
                j["modulus"] = json!(q.to_string());
                j["orientation"] = json!(sign);
            }
        }
    }
    let report = mobility::mobility_report(&r).expect("reduced");
    let mut edges_json = Vec::new();
    for (e, m) in &report {
        lines.push(format!("edge {}: {}", r.edge_name(*e), mobility_text(&r, m)));
        edges_json.push(json!({
            "edge": r.edge_name(*e),
            "mobile": m.is_mobile(),
            "detail": mobility_text(&r, m),
        }));
    }
    j["edges"] = Value::Array(edges_json);
    let decomp = mobility::non_mobile_decomposition(&r).expect("reduced");
    lines.push(format!("s: {}", decomp.s));
    j["s"] = json!(decomp.s);
    if r.betti_number() == 1 {
        let ascending = betti1::is_ascending_b1(&r)
            .expect("reduced non-elementary Betti one")
            .is_some();
        lines.push(format!("ascending: {ascending}"));
        j["ascending"] = json!(ascending);
        let plgi = betti1::plgi_fingerprint(&r).expect("reduced non-elementary Betti one");
        for e in &plgi.0 {
            let labels: Vec<String> = e.space.labels.iter().map(|l| l.to_string()).collect();
            let class = match &e.class {
                SubgroupClass::Elementary(c) => c.to_string(),
                SubgroupClass::Canonical(code) => format!("class {code}"),
            };
            lines.push(format!(
                "plgi: {class}; pointed labels {{{}}}; space size {}",
                labels.join(","),
                e.space.codes.len()
            ));
        }
        j["plgi"] = Value::Array(plgi.0.iter().map(plgi_entry_json).collect());
    }
    Report {
        text: lines.join("\n") + "\n",
        json: j,
    }
}
