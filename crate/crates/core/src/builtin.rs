//! Constructors for the standard example graphs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, FundamentalGraph, Vertex};
use crate::lattice::gcd;

fn vertices(labels: &[&str]) -> Vec<Vertex> {
    labels
        .iter()
        .map(|l| Vertex {
            label: (*l).to_string(),
            potential: 0.0,
        })
        .collect()
}

fn edge(tail: usize, head: usize, index: &[i64], alpha: f64) -> Edge {
    Edge {
        tail,
        head,
        index: index.to_vec(),
        alpha,
    }
}

fn build(d: usize, v: Vec<Vertex>, e: Vec<Edge>) -> FundamentalGraph {
    FundamentalGraph::new(d, v, e).expect("builtin graph is valid")
}

/// Square lattice: one vertex with loops `e1`, `e2` of index (1,0), (0,1).
pub fn square_lattice(alpha1: f64, alpha2: f64) -> FundamentalGraph {
    build(
        2,
        vertices(&["x"]),
        vec![edge(0, 0, &[1, 0], alpha1), edge(0, 0, &[0, 1], alpha2)],
    )
}

/// Hexagonal lattice: `e1 = (x2, x1)`, `e2, e3 = (x1, x2)` with indices
/// 0, (1,0), (0,1).
pub fn hexagonal(alpha: [f64; 3]) -> FundamentalGraph {
    build(
        2,
        vertices(&["x1", "x2"]),
        vec![
            edge(1, 0, &[0, 0], alpha[0]),
            edge(0, 1, &[1, 0], alpha[1]),
            edge(0, 1, &[0, 1], alpha[2]),
        ],
    )
}

/// Kagome lattice with per-edge phases `α1..α6`.
///
/// Fluxes through the two triangles are `α1+α2+α3` and `α4+α5+α6`.
pub fn kagome(alpha: [f64; 6]) -> FundamentalGraph {
    build(
        2,
        vertices(&["x1", "x2", "x3"]),
        vec![
            edge(2, 0, &[0, 0], alpha[0]),
            edge(0, 1, &[0, 0], alpha[1]),
            edge(1, 2, &[0, 0], alpha[2]),
            edge(0, 2, &[-1, 0], alpha[3]),
            edge(2, 1, &[1, -1], alpha[4]),
            edge(1, 0, &[0, 1], alpha[5]),
        ],
    )
}

/// Kagome lattice with the triangle fluxes put on `e1` and `e4`.
pub fn kagome_fluxes(phi1: f64, phi2: f64) -> FundamentalGraph {
    kagome([phi1, 0.0, 0.0, phi2, 0.0, 0.0])
}

/// One-dimensional four-vertex graph with phase `φ` on `e5` only.
pub fn example41(phi: f64) -> FundamentalGraph {
    build(
        1,
        vertices(&["x1", "x2", "x3", "x4"]),
        vec![
            edge(3, 0, &[1], 0.0),
            edge(0, 2, &[0], 0.0),
            edge(2, 3, &[0], 0.0),
            edge(3, 1, &[0], 0.0),
            edge(1, 0, &[0], phi),
        ],
    )
}

/// Square lattice with uniform flux `2πp/q` per cell, on a `q × 1` supercell.
///
/// Horizontal edges `x_j -> x_{j+1}` carry phase 0 and the closing edge
/// `x_q -> x_1` has index (1,0). Vertex `x_j` carries a vertical loop of
/// index (0,1) and phase `φ(j-1)`.
pub fn harper_extended(p: i64, q: i64) -> Result<FundamentalGraph> {
    if q < 1 || gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    let q = q as usize;
    let phi = 2.0 * PI * p as f64 / q as f64;
    let labels: Vec<String> = (1..=q).map(|j| format!("x{j}")).collect();
    let verts = labels
        .iter()
        .map(|l| Vertex {
            label: l.clone(),
            potential: 0.0,
        })
        .collect();
    let mut edges: Vec<Edge> = (0..q)
        .map(|j| {
            let index: &[i64] = if j + 1 == q { &[1, 0] } else { &[0, 0] };
            edge(j, (j + 1) % q, index, 0.0)
        })
        .collect();
    edges.extend((0..q).map(|j| edge(j, j, &[0, 1], phi * j as f64)));
    FundamentalGraph::new(2, verts, edges)
}

/// Seeded random periodic graph: at most five vertices, dimension 1 or 2,
/// edge indices in {-1,0,1}^d, phases in (-π, π], potentials in [-2, 2].
pub fn random_graph(seed: u64) -> FundamentalGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let d = rng.random_range(1..=2usize);
        let nv = rng.random_range(1..=5usize);
        let extra = rng.random_range(d..=d + 2);
        let mut edges = Vec::new();
        let mut random_edge = |rng: &mut ChaCha8Rng, tail: usize, head: usize| {
            let index: Vec<i64> = (0..d).map(|_| rng.random_range(-1..=1)).collect();
            let alpha = PI - rng.random_range(0.0..2.0 * PI);
            edges.push(edge(tail, head, &index, alpha));
        };
        for x in 1..nv {
            let parent = rng.random_range(0..x);
            random_edge(&mut rng, parent, x);
        }
        for _ in 0..extra {
            let a = rng.random_range(0..nv);
            let b = rng.random_range(0..nv);
            random_edge(&mut rng, a, b);
        }
        let verts = (0..nv)
            .map(|x| Vertex {
                label: format!("v{x}"),
                potential: rng.random_range(-2.0..=2.0),
            })
            .collect();
        if let Ok(g) = FundamentalGraph::new(d, verts, edges) {
            return g;
        }
    }
}

/// One instance of every named builtin, with generic phases.
pub fn all_builtins() -> Vec<FundamentalGraph> {
    vec![
        square_lattice(0.3, -1.2),
        hexagonal([0.4, -0.9, 2.1]),
        kagome([0.5, -0.3, 1.1, 2.0, -0.4, 0.2]),
        example41(1.3),
        harper_extended(1, 3).expect("coprime"),
    ]
}
