//! Hofstadter butterfly data: Harper band intervals for every p/q with q up
//! to a limit, written as CSV rows `flux,lo,hi` to stdout.
//!
//! `cargo run --release --example butterfly -- 12 > butterfly.csv`

use magtrace::builtin::harper_extended;
use magtrace::lattice::gcd;
use magtrace::spectrum::{band_structure, spectral_set, DEFAULT_FLAT_TOL};
use magtrace::Operator;

fn main() -> magtrace::Result<()> {
    let q_max: i64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    println!("flux,lo,hi");
    for q in 1..=q_max {
        for p in (0..q).filter(|&p| gcd(p, q) == 1) {
            let g = harper_extended(p, q)?;
            let bs = band_structure(&g, Operator::Laplacian, 48)?;
            let set = spectral_set(&bs, DEFAULT_FLAT_TOL);
            for (lo, hi) in bs.intervals() {
                println!("{:.8},{lo:.8},{hi:.8}", p as f64 / q as f64);
            }
            eprintln!("p/q = {p}/{q}: measure {:.5}", set.measure());
        }
    }
    Ok(())
}
