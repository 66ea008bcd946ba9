//! Fourier coefficients of Tr H^n(k) from the symbolic fiber power and from
//! closed-walk sums, checked against a dense matrix power.

use magtrace::builtin::hexagonal;
use magtrace::lattice::format_index;
use magtrace::spectrum::fiber_matrix;
use magtrace::traces::{evaluate_trace, trace_power_family, trace_via_cycles};
use magtrace::trigpoly::Budget;
use magtrace::Operator;

fn main() -> magtrace::Result<()> {
    let g = hexagonal([0.4, -0.9, 2.1]).with_potentials(&[0.5, -0.25])?;
    let op = Operator::Schrodinger;
    let family = trace_power_family(&g, op, 4, &Budget::new(Budget::DEFAULT))?;
    let k = [0.7, -1.9];
    let h = fiber_matrix(&g, op, &k);
    let mut power = h.clone();
    for s in &family {
        if s.n > 1 {
            power = &power * &h;
        }
        let walks = trace_via_cycles(&g, op, s.n)?;
        println!(
            "n={} terms={} engine diff {:.1e}, Tr H^n(k) = {:.9} (dense {:.9})",
            s.n,
            s.coefficients.len(),
            s.max_abs_diff(&walks),
            evaluate_trace(s, &k)?,
            power.trace().re
        );
        if s.n == 2 {
            for (m, c) in &s.coefficients {
                println!("    T_2,({}) = {:.6}{:+.6}i", format_index(m), c.re, c.im);
            }
        }
    }
    Ok(())
}
