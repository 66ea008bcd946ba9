use nalgebra::DMatrix;

use super::{Edge, FundamentalGraph, Vertex};
use crate::error::{Error, Result};
use crate::lattice::LatticeVec;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedVertex {
    pub label: String,
    /// Coordinates with respect to the lattice basis, each in `[0, 1)`.
    pub position: Vec<f64>,
    pub potential: f64,
}

/// Edge from `tail` (in the fundamental cell) to `head + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedEdge {
    pub tail: usize,
    pub head: usize,
    pub shift: LatticeVec,
    pub alpha: f64,
}

/// A periodic graph given by a lattice basis, representative vertices in the
/// fundamental cell, and shift-annotated edges.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedPeriodicGraph {
    pub basis: Vec<Vec<f64>>,
    pub vertices: Vec<EmbeddedVertex>,
    pub edges: Vec<EmbeddedEdge>,
}

impl EmbeddedPeriodicGraph {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension();
        if d == 0 {
            return Err(Error::MalformedGraph("empty lattice basis".into()));
        }
        if self.basis.iter().any(|row| row.len() != d) {
            return Err(Error::MalformedGraph(format!("basis must be {d}x{d}")));
        }
        let m = DMatrix::from_fn(d, d, |i, j| self.basis[i][j]);
        let scale = self
            .basis
            .iter()
            .flatten()
            .fold(0.0f64, |a, &b| a.max(b.abs()))
            .max(f64::MIN_POSITIVE);
        if m.determinant().abs() <= 1e-12 * scale.powi(d as i32) {
            return Err(Error::MalformedGraph("lattice basis is degenerate".into()));
        }
        for v in &self.vertices {
            if v.position.len() != d {
                return Err(Error::MalformedGraph(format!(
                    "vertex `{}` position has length {}, expected {d}",
                    v.label,
                    v.position.len()
                )));
            }
            if v.position.iter().any(|&c| !(0.0..1.0).contains(&c)) {
                return Err(Error::MalformedGraph(format!(
                    "vertex `{}` lies outside the fundamental cell [0,1)^{d}",
                    v.label
                )));
            }
        }
        for (id, e) in self.edges.iter().enumerate() {
            if e.shift.len() != d {
                return Err(Error::MalformedEdge(format!(
                    "edge {id} has shift of length {}, expected {d}",
                    e.shift.len()
                )));
            }
        }
        Ok(())
    }
}

/// Edge indices from an embedding.
///
/// Representatives lie in the fundamental cell (`[x] = 0`), so the index of
/// an edge running to `head + γ` is `[head + γ] - [tail] = γ`.
pub fn from_embedding(g: &EmbeddedPeriodicGraph) -> Result<FundamentalGraph> {
    g.validate()?;
    let vertices = g
        .vertices
        .iter()
        .map(|v| Vertex {
            label: v.label.clone(),
            potential: v.potential,
        })
        .collect();
    let edges = g
        .edges
        .iter()
        .map(|e| Edge {
            tail: e.tail,
            head: e.head,
            index: e.shift.clone(),
            alpha: e.alpha,
        })
        .collect();
    FundamentalGraph::new(g.dimension(), vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertex(label: &str, position: Vec<f64>) -> EmbeddedVertex {
        EmbeddedVertex {
            label: label.into(),
            position,
            potential: 0.0,
        }
    }

    fn edge(tail: usize, head: usize, shift: Vec<i64>) -> EmbeddedEdge {
        EmbeddedEdge {
            tail,
            head,
            shift,
            alpha: 0.0,
        }
    }

    #[test]
    fn square_lattice_shifts_become_indices() {
        let g = EmbeddedPeriodicGraph {
            basis: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vertices: vec![vertex("x", vec![0.0, 0.0])],
            edges: vec![edge(0, 0, vec![1, 0]), edge(0, 0, vec![0, 1])],
        };
        let f = from_embedding(&g).unwrap();
        assert_eq!(f.edges()[0].index, vec![1, 0]);
        assert_eq!(f.edges()[1].index, vec![0, 1]);
    }

    #[test]
    fn kagome_edge_e5_index() {
        // e5 = (x3 + a2, x2 + a1) is entered as x3 -> x2 with shift (1,-1).
        let s = 3f64.sqrt();
        let g = EmbeddedPeriodicGraph {
            basis: vec![vec![2.0, 0.0], vec![1.0, s]],
            vertices: vec![
                vertex("x1", vec![0.0, 0.0]),
                vertex("x2", vec![0.5, 0.0]),
                vertex("x3", vec![0.0, 0.5]),
            ],
            edges: vec![
                edge(2, 0, vec![0, 0]),
                edge(0, 1, vec![0, 0]),
                edge(1, 2, vec![0, 0]),
                edge(0, 2, vec![-1, 0]),
                edge(2, 1, vec![1, -1]),
                edge(1, 0, vec![0, 1]),
            ],
        };
        let f = from_embedding(&g).unwrap();
        assert_eq!(f.edges()[4].index, vec![1, -1]);
        assert_eq!(f.edges()[0].index, vec![0, 0]);
    }

    #[test]
    fn degenerate_basis_and_out_of_cell_positions_are_rejected() {
        let mut g = EmbeddedPeriodicGraph {
            basis: vec![vec![1.0, 2.0], vec![2.0, 4.0]],
            vertices: vec![vertex("x", vec![0.0, 0.0])],
            edges: vec![edge(0, 0, vec![1, 0]), edge(0, 0, vec![0, 1])],
        };
        assert!(matches!(from_embedding(&g), Err(Error::MalformedGraph(_))));
        g.basis = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        g.vertices[0].position = vec![1.0, 0.0];
        assert!(matches!(from_embedding(&g), Err(Error::MalformedGraph(_))));
    }
}
