//! Fundamental graphs of Z^d-periodic graphs.
//!
//! A periodic graph is stored through its finite quotient: vertices carry an
//! electric potential, and every unoriented edge is stored once with an
//! integer index `τ(e) ∈ Z^d` and a magnetic phase `α(e)`. The reverse
//! orientation is synthesized on demand with `τ(ē) = -τ(e)` and
//! `α(ē) = -α(e)`.

mod embedding;
mod file;

pub use embedding::{from_embedding, EmbeddedEdge, EmbeddedPeriodicGraph, EmbeddedVertex};
pub use file::{validate_graph, EdgeRecord, EmbeddingRecord, GraphFile, VertexRecord};

use std::collections::VecDeque;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeVec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vertex {
    pub label: String,
    pub potential: f64,
}

/// An unoriented edge in its stored (canonical) orientation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub index: LatticeVec,
    pub alpha: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// An oriented edge of the fundamental graph, or one of the weighted loops
/// added in the modified graph.
///
/// The derived ordering places `Edge` arcs first, by edge id and then
/// orientation, so arc sequences compare lexicographically by edge id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Arc {
    Edge { id: usize, reversed: bool },
    Loop(usize),
}

impl Arc {
    pub fn forward(id: usize) -> Self {
        Arc::Edge { id, reversed: false }
    }

    pub fn backward(id: usize) -> Self {
        Arc::Edge { id, reversed: true }
    }

    pub fn reverse(self) -> Self {
        match self {
            Arc::Edge { id, reversed } => Arc::Edge {
                id,
                reversed: !reversed,
            },
            Arc::Loop(x) => Arc::Loop(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FundamentalGraph {
    dimension: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl FundamentalGraph {
    /// Build and validate a fundamental graph.
    ///
    /// Checks edge endpoints and index lengths, connectivity of the
    /// underlying undirected graph, and that cycle indices generate all of
    /// Z^d.
    pub fn new(dimension: usize, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let g = Self::new_unchecked_periodicity(dimension, vertices, edges)?;
        crate::cycles::cycle_basis(&g)?;
        Ok(g)
    }

    /// Structural checks only; the d-periodicity test is skipped.
    pub(crate) fn new_unchecked_periodicity(
        dimension: usize,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::MalformedGraph("dimension must be positive".into()));
        }
        if vertices.is_empty() {
            return Err(Error::MalformedGraph("graph has no vertices".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.potential.is_finite() {
                return Err(Error::MalformedGraph(format!(
                    "vertex `{}` has non-finite potential",
                    v.label
                )));
            }
            if vertices[..i].iter().any(|w| w.label == v.label) {
                return Err(Error::MalformedGraph(format!(
                    "duplicate vertex label `{}`",
                    v.label
                )));
            }
        }
        for (id, e) in edges.iter().enumerate() {
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return Err(Error::MalformedEdge(format!(
                    "edge {id} references vertex id outside 0..{}",
                    vertices.len()
                )));
            }
            if e.index.len() != dimension {
                return Err(Error::MalformedEdge(format!(
                    "edge {id} has index of length {}, expected {dimension}",
                    e.index.len()
                )));
            }
            if !e.alpha.is_finite() {
                return Err(Error::MalformedEdge(format!("edge {id} has non-finite phase")));
            }
        }
        let g = FundamentalGraph {
            dimension,
            vertices,
            edges,
        };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let adjacency = self.undirected_neighbors();
        while let Some(x) = queue.pop_front() {
            for &y in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(x) => Err(Error::DisconnectedGraph(self.vertices[x].label.clone())),
            None => Ok(()),
        }
    }

    fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        adj
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.label == label)
    }

    pub fn potentials(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.potential).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.alpha).collect()
    }

    /// All oriented edges `A_*`: every stored edge in both orientations.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        (0..self.edges.len()).flat_map(|id| [Arc::forward(id), Arc::backward(id)])
    }

    pub fn num_arcs(&self) -> usize {
        2 * self.edges.len()
    }

    /// Tail vertex of an arc. Added loops sit at their vertex.
    pub fn tail(&self, arc: Arc) -> usize {
        match arc {
            Arc::Edge { id, reversed } => {
                let e = &self.edges[id];
                if reversed {
                    e.head
                } else {
                    e.tail
                }
            }
            Arc::Loop(x) => x,
        }
    }

    pub fn head(&self, arc: Arc) -> usize {
        match arc {
            Arc::Edge { id, reversed } => {
                let e = &self.edges[id];
                if reversed {
                    e.tail
                } else {
                    e.head
                }
            }
            Arc::Loop(x) => x,
        }
    }

    pub fn index(&self, arc: Arc) -> LatticeVec {
        match arc {
            Arc::Edge { id, reversed } => {
                let e = &self.edges[id];
                if reversed {
                    lattice::negate(&e.index)
                } else {
                    e.index.clone()
                }
            }
            Arc::Loop(_) => lattice::zero(self.dimension),
        }
    }

    pub fn alpha(&self, arc: Arc) -> f64 {
        match arc {
            Arc::Edge { id, reversed } => {
                let a = self.edges[id].alpha;
                if reversed {
                    -a
                } else {
                    a
                }
            }
            Arc::Loop(_) => 0.0,
        }
    }

    /// `τ_+ = max ‖τ(e)‖` over all edges.
    pub fn tau_plus(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| lattice::norm(&e.index))
            .fold(0.0, f64::max)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    /// No loops and no multiple edges.
    pub fn is_simple(&self) -> bool {
        if self.has_loops() {
            return false;
        }
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| (e.tail.min(e.head), e.tail.max(e.head)))
            .collect();
        pairs.sort_unstable();
        pairs.windows(2).all(|w| w[0] != w[1])
    }

    /// Same graph with a replacement phase table (one phase per stored edge).
    pub fn with_phases(&self, alpha: &[f64]) -> Result<Self> {
        if alpha.len() != self.edges.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} phases, got {}",
                self.edges.len(),
                alpha.len()
            )));
        }
        let mut g = self.clone();
        for (e, &a) in g.edges.iter_mut().zip(alpha) {
            e.alpha = a;
        }
        Ok(g)
    }

    pub fn with_potentials(&self, potential: &[f64]) -> Result<Self> {
        if potential.len() != self.vertices.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} potentials, got {}",
                self.vertices.len(),
                potential.len()
            )));
        }
        let mut g = self.clone();
        for (v, &p) in g.vertices.iter_mut().zip(potential) {
            v.potential = p;
        }
        Ok(g)
    }

    /// The coupling family `H_{tα}`: every phase multiplied by `t`.
    pub fn with_scaled_phases(&self, t: f64) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.alpha *= t;
        }
        g
    }

    /// Move the representative of vertex `x` by the lattice vector `shifts[x]`.
    ///
    /// Individual edge indices change as `τ'(e) = τ(e) + s_tail - s_head`;
    /// cycle indices are unchanged.
    pub fn with_shifted_representatives(&self, shifts: &[LatticeVec]) -> Result<Self> {
        if shifts.len() != self.vertices.len() || shifts.iter().any(|s| s.len() != self.dimension)
        {
            return Err(Error::InvalidArgument(
                "need one shift of length d per vertex".into(),
            ));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            lattice::add_into(&mut e.index, &shifts[e.tail]);
            lattice::sub_from(&mut e.index, &shifts[e.head]);
        }
        Ok(g)
    }

    /// Stable 64-bit fingerprint of the graph data.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.dimension.hash(&mut h);
        for v in &self.vertices {
            v.label.hash(&mut h);
            v.potential.to_bits().hash(&mut h);
        }
        for e in &self.edges {
            e.tail.hash(&mut h);
            e.head.hash(&mut h);
            e.index.hash(&mut h);
            e.alpha.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Degrees {
    pub per_vertex: Vec<usize>,
    pub max: usize,
}

/// Vertex degrees `κ_x` (loops count twice) and `κ_+ = max κ_x`.
pub fn degrees(g: &FundamentalGraph) -> Degrees {
    let mut per_vertex = vec![0; g.num_vertices()];
    for e in g.edges() {
        per_vertex[e.tail] += 1;
        per_vertex[e.head] += 1;
    }
    let max = per_vertex.iter().copied().max().unwrap_or(0);
    Degrees { per_vertex, max }
}

/// Betti number `β = #E_* - #V_* + 1`.
pub fn betti(g: &FundamentalGraph) -> usize {
    g.num_edges() + 1 - g.num_vertices()
}

/// Fundamental graph with one added loop per vertex of weight `v_x = V_x - κ_x`.
///
/// Loop weights are derived from the borrowed base graph at construction.
#[derive(Clone, Debug)]
pub struct ModifiedFundamentalGraph<'a> {
    base: &'a FundamentalGraph,
    loop_weights: Vec<f64>,
}

impl<'a> ModifiedFundamentalGraph<'a> {
    pub fn base(&self) -> &'a FundamentalGraph {
        self.base
    }

    /// `ω(e_x) = v_x` for each vertex.
    pub fn loop_weights(&self) -> &[f64] {
        &self.loop_weights
    }

    /// Weight of an arc: 1 on original edges, `v_x` on added loops.
    pub fn weight(&self, arc: Arc) -> f64 {
        match arc {
            Arc::Edge { .. } => 1.0,
            Arc::Loop(x) => self.loop_weights[x],
        }
    }

    /// All oriented edges of the modified graph: `A_*` plus one loop per vertex.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.base
            .arcs()
            .chain((0..self.base.num_vertices()).map(Arc::Loop))
    }
}

pub fn modify(g: &FundamentalGraph) -> ModifiedFundamentalGraph<'_> {
    let kappa = degrees(g);
    let loop_weights = g
        .vertices()
        .iter()
        .zip(&kappa.per_vertex)
        .map(|(v, &k)| v.potential - k as f64)
        .collect();
    ModifiedFundamentalGraph {
        base: g,
        loop_weights,
    }
}
