//! Load a periodic graph from JSON (explicit indices or an embedding) and
//! print its basic invariants.
//!
//! `cargo run --example graph_file -- crates/core/data/kagome_embedded.json`

use std::path::PathBuf;

use magtrace::graph::{betti, degrees, validate_graph, GraphFile};

fn main() -> magtrace::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/kagome_embedded.json")));
    let g = validate_graph(&GraphFile::load(&path)?)?;
    let deg = degrees(&g);
    println!(
        "{}: d={} vertices={} edges={} betti={} degrees {:?} tau_plus={:.4}",
        path.display(),
        g.dimension(),
        g.num_vertices(),
        g.num_edges(),
        betti(&g),
        deg.per_vertex,
        g.tau_plus()
    );
    for e in g.edges() {
        println!(
            "  {} -> {} index {:?} alpha {:.4}",
            g.vertices()[e.tail].label,
            g.vertices()[e.head].label,
            e.index,
            e.alpha
        );
    }
    println!("{}", GraphFile::from_graph(&g).to_json()?);
    Ok(())
}
