//! Operator kinds and their walk weights.
//!
//! Every operator is a weighted adjacency on the fundamental graph with
//! optional weighted loops:
//!
//! | operator    | edge weight | loop at x        |
//! |-------------|-------------|------------------|
//! | adjacency   | 1           | none             |
//! | Schrödinger | 1           | `V_x - κ_x`      |
//! | Laplacian   | -1          | `κ_x`            |
//!
//! so `H = A + (V - κ)` and `Δ = κ - A`. This is the only place the sign
//! conventions live.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cycles::{ArcTable, WalkSource};
use crate::error::Error;
use crate::graph::{degrees, Arc, FundamentalGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Adjacency,
    Laplacian,
    Schrodinger,
}

impl Operator {
    pub const ALL: [Operator; 3] = [
        Operator::Adjacency,
        Operator::Laplacian,
        Operator::Schrodinger,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Adjacency => "adjacency",
            Operator::Laplacian => "laplacian",
            Operator::Schrodinger => "schrodinger",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "adjacency" => Ok(Operator::Adjacency),
            "laplacian" => Ok(Operator::Laplacian),
            "schrodinger" | "schrödinger" => Ok(Operator::Schrodinger),
            other => Err(Error::InvalidArgument(format!("unknown operator `{other}`"))),
        }
    }
}

/// A fundamental graph viewed as the weighted walk graph of an operator.
#[derive(Clone, Debug)]
pub struct OperatorGraph<'a> {
    base: &'a FundamentalGraph,
    edge_weight: f64,
    loop_weights: Option<Vec<f64>>,
}

impl<'a> OperatorGraph<'a> {
    pub fn new(base: &'a FundamentalGraph, op: Operator) -> Self {
        let kappa = degrees(base).per_vertex;
        let (edge_weight, loop_weights) = match op {
            Operator::Adjacency => (1.0, None),
            Operator::Schrodinger => (
                1.0,
                Some(
                    base.potentials()
                        .iter()
                        .zip(&kappa)
                        .map(|(v, &k)| v - k as f64)
                        .collect(),
                ),
            ),
            Operator::Laplacian => (-1.0, Some(kappa.iter().map(|&k| k as f64).collect())),
        };
        OperatorGraph {
            base,
            edge_weight,
            loop_weights,
        }
    }

    pub fn base(&self) -> &'a FundamentalGraph {
        self.base
    }

    pub fn edge_weight(&self) -> f64 {
        self.edge_weight
    }

    /// Diagonal term at each vertex (zero for adjacency).
    pub fn diagonal(&self) -> Vec<f64> {
        self.loop_weights
            .clone()
            .unwrap_or_else(|| vec![0.0; self.base.num_vertices()])
    }

    pub fn weight(&self, arc: Arc) -> f64 {
        match arc {
            Arc::Edge { .. } => self.edge_weight,
            Arc::Loop(x) => self.loop_weights.as_ref().map_or(0.0, |w| w[x]),
        }
    }

    /// Arcs with their weights; added loops only when the operator has them.
    pub fn weighted_arcs(&self) -> Vec<(Arc, f64)> {
        let mut arcs: Vec<(Arc, f64)> = self.base.arcs().map(|a| (a, self.edge_weight)).collect();
        if let Some(w) = &self.loop_weights {
            arcs.extend(w.iter().enumerate().map(|(x, &w)| (Arc::Loop(x), w)));
        }
        arcs
    }
}

impl WalkSource for OperatorGraph<'_> {
    fn arc_table(&self) -> ArcTable {
        ArcTable::from_weighted_arcs(self.base, self.weighted_arcs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::graph::modify;

    #[test]
    fn schrodinger_loops_match_the_modified_graph() {
        let g = builtin::example41(0.5)
            .with_potentials(&[1.0, -0.5, 0.0, 2.0])
            .unwrap();
        let h = OperatorGraph::new(&g, Operator::Schrodinger);
        assert_eq!(h.diagonal(), modify(&g).loop_weights());
    }

    #[test]
    fn laplacian_is_kappa_minus_adjacency() {
        let g = builtin::hexagonal([0.0; 3]);
        let l = OperatorGraph::new(&g, Operator::Laplacian);
        assert_eq!(l.diagonal(), vec![3.0, 3.0]);
        assert_eq!(l.weight(Arc::forward(0)), -1.0);
        assert_eq!(OperatorGraph::new(&g, Operator::Adjacency).weighted_arcs().len(), 6);
    }

    #[test]
    fn parse_names() {
        for op in Operator::ALL {
            assert_eq!(op.name().parse::<Operator>().unwrap(), op);
        }
        assert!("hamiltonian".parse::<Operator>().is_err());
    }
}
