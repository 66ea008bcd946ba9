//! Spectral analysis of magnetic Schrödinger operators on periodic graphs.
//!
//! Graphs are given by their finite fundamental graph with integer edge
//! indices and magnetic phases. The crate computes Bloch band structures,
//! exact Fourier expansions of fiber traces (both by symbolic matrix powers
//! and by summing over closed walks), and the cycle-based bandwidth bounds.

pub mod bounds;
pub mod builtin;
pub mod cli;
pub mod cycles;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod operator;
pub mod spectrum;
pub mod traces;
pub mod trigpoly;

pub use error::{Error, Result};
pub use graph::{Arc, Edge, FundamentalGraph, Vertex};
pub use operator::Operator;
