//! Band structure and spectral set of the Kagome Laplacian for a few flux pairs.

use std::f64::consts::PI;

use magtrace::builtin::kagome_fluxes;
use magtrace::spectrum::{band_structure, spectral_set, DEFAULT_FLAT_TOL};
use magtrace::Operator;

fn main() -> magtrace::Result<()> {
    for (p1, p2) in [(0.0, 0.0), (PI, PI), (0.0, PI), (1.0, 0.5)] {
        let g = kagome_fluxes(p1, p2);
        let bs = band_structure(&g, Operator::Laplacian, 128)?;
        let set = spectral_set(&bs, DEFAULT_FLAT_TOL);
        println!("fluxes ({p1:.3}, {p2:.3})");
        for (j, b) in bs.bands.iter().enumerate() {
            println!("  band {}: [{:.6}, {:.6}]", j + 1, b.min.value, b.max.value);
        }
        let flats: Vec<String> = set.flat.iter().map(|f| format!("{:.6}", f.value)).collect();
        println!(
            "  union {:?}, flat {:?}, measure {:.6}, total bandwidth {:.6}",
            set.intervals,
            flats,
            set.measure(),
            bs.total_bandwidth()
        );
    }
    Ok(())
}
