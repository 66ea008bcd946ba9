//! Closed-walk census, shortest indexed cycles and the normalized cycle basis.

use magtrace::builtin::{example41, hexagonal};
use magtrace::cycles::{cycle_basis, cycle_counts, shortest_cycle_length, WalkFilter};
use magtrace::lattice::format_index;

fn main() -> magtrace::Result<()> {
    let hex = hexagonal([0.0; 3]);
    for n in 1..=4 {
        let c = cycle_counts(&hex, n)?;
        let by: Vec<String> = c
            .by_index
            .iter()
            .map(|(m, k)| format!("({}):{k}", format_index(m)))
            .collect();
        println!("hexagonal n={n}: N={} {}", c.total, by.join(" "));
    }
    for m in [vec![1, 0], vec![0, 1], vec![1, -1]] {
        let s = shortest_cycle_length(&hex, &WalkFilter::WithIndex(m.clone()), 8)?;
        println!("shortest cycle with index ({}): length {}, p={}", format_index(&m), s.n, s.p);
    }

    let g = example41(1.1);
    let basis = cycle_basis(&g)?;
    println!("example41: betti {}, k_shift {:?}", basis.betti(), basis.k_shift());
    for ((c, m), f) in basis.cycles().iter().zip(basis.indices()).zip(basis.fluxes()) {
        println!("  edges [{}] index ({}) flux {f:.4}", format_index(c), format_index(m));
    }
    let s = shortest_cycle_length(&g, &WalkFilter::NonzeroIndex, 8)?;
    println!("shortest nonzero-index cycles: length {}, p={}", s.n, s.p);
    Ok(())
}
