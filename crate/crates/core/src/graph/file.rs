//! JSON graph description files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{from_embedding, Edge, EmbeddedEdge, EmbeddedPeriodicGraph, EmbeddedVertex};
use super::{FundamentalGraph, Vertex};
use crate::error::{Error, Result};
use crate::lattice::LatticeVec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub dimension: usize,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub label: String,
    #[serde(default)]
    pub potential: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub tail: String,
    pub head: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<LatticeVec>,
    #[serde(default)]
    pub alpha: f64,
}

/// Alternative to explicit indices: `positions` align with `vertices`,
/// `shifts` align with `edges`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingRecord {
    pub basis: Vec<Vec<f64>>,
    pub positions: Vec<Vec<f64>>,
    pub shifts: Vec<LatticeVec>,
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Description of an existing graph with explicit indices.
    pub fn from_graph(g: &FundamentalGraph) -> Self {
        let label = |x: usize| g.vertices()[x].label.clone();
        GraphFile {
            dimension: g.dimension(),
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexRecord {
                    label: v.label.clone(),
                    potential: v.potential,
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    tail: label(e.tail),
                    head: label(e.head),
                    index: Some(e.index.clone()),
                    alpha: e.alpha,
                })
                .collect(),
            embedding: None,
        }
    }
}

/// Validate a parsed description into a fundamental graph.
///
/// Vertex ids are assigned in declaration order.
pub fn validate_graph(file: &GraphFile) -> Result<FundamentalGraph> {
    let lookup = |label: &str, edge: usize| {
        file.vertices
            .iter()
            .position(|v| v.label == label)
            .ok_or_else(|| {
                Error::MalformedEdge(format!("edge {edge} references unknown vertex `{label}`"))
            })
    };
    let mut endpoints = Vec::with_capacity(file.edges.len());
    for (i, e) in file.edges.iter().enumerate() {
        endpoints.push((lookup(&e.tail, i)?, lookup(&e.head, i)?));
    }

    match &file.embedding {
        None => {
            let mut edges = Vec::with_capacity(file.edges.len());
            for (i, (e, &(tail, head))) in file.edges.iter().zip(&endpoints).enumerate() {
                let index = e.index.clone().ok_or_else(|| {
                    Error::MalformedEdge(format!("edge {i} has no index and there is no embedding"))
                })?;
                edges.push(Edge {
                    tail,
                    head,
                    index,
                    alpha: e.alpha,
                });
            }
            let vertices = file
                .vertices
                .iter()
                .map(|v| Vertex {
                    label: v.label.clone(),
                    potential: v.potential,
                })
                .collect();
            FundamentalGraph::new(file.dimension, vertices, edges)
        }
        Some(emb) => {
            if emb.basis.len() != file.dimension {
                return Err(Error::MalformedGraph(format!(
                    "embedding basis has {} vectors, dimension is {}",
                    emb.basis.len(),
                    file.dimension
                )));
            }
            if emb.positions.len() != file.vertices.len() {
                return Err(Error::MalformedGraph(
                    "embedding needs one position per vertex".into(),
                ));
            }
            if emb.shifts.len() != file.edges.len() {
                return Err(Error::MalformedGraph(
                    "embedding needs one shift per edge".into(),
                ));
            }
            if let Some(i) = file.edges.iter().position(|e| e.index.is_some()) {
                return Err(Error::MalformedEdge(format!(
                    "edge {i} gives an explicit index alongside an embedding"
                )));
            }
            let embedded = EmbeddedPeriodicGraph {
                basis: emb.basis.clone(),
                vertices: file
                    .vertices
                    .iter()
                    .zip(&emb.positions)
                    .map(|(v, p)| EmbeddedVertex {
                        label: v.label.clone(),
                        position: p.clone(),
                        potential: v.potential,
                    })
                    .collect(),
                edges: file
                    .edges
                    .iter()
                    .zip(&endpoints)
                    .zip(&emb.shifts)
                    .map(|((e, &(tail, head)), s)| EmbeddedEdge {
                        tail,
                        head,
                        shift: s.clone(),
                        alpha: e.alpha,
                    })
                    .collect(),
            };
            from_embedding(&embedded)
        }
    }
}
