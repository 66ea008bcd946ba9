//! Bandwidth lower and upper bounds against the measured total bandwidth
//! for the one-dimensional four-vertex example as the flux varies.

use std::f64::consts::PI;

use magtrace::bounds::{bounds_report, Witness};
use magtrace::builtin::example41;
use magtrace::spectrum::band_structure;
use magtrace::Operator;

fn main() -> magtrace::Result<()> {
    println!("{:>8} {:>10} {:>10} {:>6}  witness", "phi", "lower", "measured", "upper");
    for i in 0..=8 {
        let phi = PI * i as f64 / 4.0;
        let g = example41(phi);
        let mut r = bounds_report(&g, Operator::Laplacian, 6)?;
        let s = band_structure(&g, Operator::Laplacian, 1024)?.total_bandwidth();
        let holds = r.attach(s, 1e-6);
        let witness = match &r.witness {
            Witness::None => "none".to_string(),
            Witness::Cycles { n } => format!("cycle sums n={n}"),
            Witness::Fourier { n, m } => format!("coefficient n={n} m={m:?}"),
        };
        println!(
            "{phi:>8.4} {:>10.6} {s:>10.6} {:>6} {witness}{}{}",
            r.best_lower,
            r.upper.best(),
            if r.flat_certificate { ", flat" } else { "" },
            if holds { "" } else { "  VIOLATED" }
        );
    }
    Ok(())
}
