//! The JSON interchange format for labeled graphs.
//!
//! Labels are carried as decimal strings so that arbitrarily large
//! integers survive the round trip losslessly. Emitted documents are
//! sorted (vertices lexicographically, edges by id) and whitespace-stable.

use std::str::FromStr;

use gbs_core::graph::{GeometricEdgeSpec, GraphError, LabeledGraph};
use gbs_core::num::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub id: String,
    pub from: String,
    pub to: String,
    pub label_from: String,
    pub label_to: String,
}

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(#[from] GraphError),
}

fn parse_label(edge: &str, field: &str, text: &str) -> Result<BigInt, DocError> {
    BigInt::from_str(text.trim())
        .map_err(|_| DocError::Parse(format!("edge {edge}: {field} is not an integer: {text:?}")))
}

/// Parses and validates a JSON graph document.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, DocError> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| DocError::Parse(e.to_string()))?;
    from_document(&doc)
}

pub fn from_document(doc: &GraphDocument) -> Result<LabeledGraph, DocError> {
    let edges = doc
        .edges
        .iter()
        .map(|e| {
            Ok(GeometricEdgeSpec {
                id: e.id.clone(),
                from: e.from.clone(),
                to: e.to.clone(),
                label_from: parse_label(&e.id, "label_from", &e.label_from)?,
                label_to: parse_label(&e.id, "label_to", &e.label_to)?,
            })
        })
        .collect::<Result<Vec<_>, DocError>>()?;
    Ok(LabeledGraph::new(doc.vertices.clone(), edges)?)
}

/// The sorted document of a graph.
pub fn to_document(g: &LabeledGraph) -> GraphDocument {
    let mut vertices: Vec<String> = g.vertices().map(|v| g.vertex_name(v).to_string()).collect();
    vertices.sort();
    let mut edges: Vec<EdgeDocument> = g
        .geometric_edges()
        .map(|e| EdgeDocument {
            id: g.edge_name(e),
            from: g.vertex_name(g.origin(e)).to_string(),
            to: g.vertex_name(g.terminus(e)).to_string(),
            label_from: g.label(e).to_string(),
            label_to: g.label(e.rev()).to_string(),
        })
        .collect();
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    GraphDocument { vertices, edges }
}

/// Stable pretty-printed JSON for a graph, with a trailing newline.
pub fn emit(g: &LabeledGraph) -> String {
    let mut s = serde_json::to_string_pretty(&to_document(g)).expect("document serializes");
    s.push('\n');
    s
}
