//! Fourier expansions of fiber traces `Tr H^n(k)`.
//!
//! Two independent engines compute the same coefficients: symbolic powers of
//! the fiber matrix, and sums of `ω(c) e^{-iα(c)}` over closed walks bucketed
//! by index.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::cycles::{
    cycle_basis, fold_closed_walks, project_flux, CycleBasis, WalkFilter, WalkSource,
    DEFAULT_LENGTH_CAP,
};
use crate::error::{Error, Result};
use crate::graph::{Arc, FundamentalGraph};
use crate::lattice::{self, LatticeVec};
use crate::operator::{Operator, OperatorGraph};
use crate::trigpoly::{Budget, CompensatedSum, FourierTraceSeries, TrigPoly, TrigPolyMatrix, PRUNE_TOL};

/// Imaginary residue allowed when evaluating a trace, relative to the
/// coefficient mass.
pub const REALITY_TOL: f64 = 1e-10;

pub fn symbolic_fiber(g: &FundamentalGraph, op: Operator) -> TrigPolyMatrix {
    let h = OperatorGraph::new(g, op);
    let mut m = TrigPolyMatrix::zeros(g.num_vertices(), g.dimension());
    for (arc, w) in h.weighted_arcs() {
        let c = w * Complex64::from_polar(1.0, -g.alpha(arc));
        m.entry_mut(g.tail(arc), g.head(arc)).add_term(g.index(arc), c);
    }
    m
}

/// Series for `n = 1..=n_max` by iterated multiplication.
pub fn trace_power_family(
    g: &FundamentalGraph,
    op: Operator,
    n_max: usize,
    budget: &Budget,
) -> Result<Vec<FourierTraceSeries>> {
    let h = symbolic_fiber(g, op);
    let mut out = Vec::with_capacity(n_max);
    let mut power = h.clone();
    for n in 1..=n_max {
        if n > 1 {
            power = power.mul(&h, budget)?;
        }
        out.push(FourierTraceSeries::from_poly(n, &power.trace()));
    }
    Ok(out)
}

pub fn trace_power_series(
    g: &FundamentalGraph,
    op: Operator,
    n: usize,
) -> Result<FourierTraceSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be positive".into()));
    }
    let mut family = trace_power_family(g, op, n, &Budget::new(Budget::DEFAULT))?;
    Ok(family.pop().expect("n >= 1"))
}

fn walk_series<F>(g: &FundamentalGraph, op: Operator, n: usize, cap: usize, phase: F) -> Result<FourierTraceSeries>
where
    F: Fn(&[Arc], f64) -> Result<f64> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidArgument("power must be positive".into()));
    }
    if n > cap {
        return Err(Error::LengthCapExceeded { n, cap });
    }
    let table = OperatorGraph::new(g, op).arc_table();
    let parts = fold_closed_walks(
        &table,
        n,
        &WalkFilter::All,
        || Ok(BTreeMap::<LatticeVec, CompensatedSum>::new()),
        |acc: &mut Result<BTreeMap<LatticeVec, CompensatedSum>>, w| {
            if let Ok(map) = acc {
                match phase(w.arcs, w.alpha) {
                    Ok(a) => {
                        map.entry(w.index.to_vec())
                            .or_default()
                            .add(w.weight * Complex64::from_polar(1.0, -a));
                    }
                    Err(e) => *acc = Err(e),
                }
            }
        },
    );
    let mut total = BTreeMap::<LatticeVec, CompensatedSum>::new();
    for part in parts {
        for (m, c) in part? {
            total.entry(m).or_default().merge(&c);
        }
    }
    let mut poly = TrigPoly::zero(g.dimension());
    for (m, c) in total {
        poly.add_term(m, c.value());
    }
    poly.prune(PRUNE_TOL);
    Ok(FourierTraceSeries::from_poly(n, &poly))
}

/// `T_{n,m} = Σ_{c ∈ C̃_n^m} ω(c) e^{-iα(c)}` by walk enumeration.
pub fn trace_via_cycles(
    g: &FundamentalGraph,
    op: Operator,
    n: usize,
) -> Result<FourierTraceSeries> {
    trace_via_cycles_capped(g, op, n, DEFAULT_LENGTH_CAP)
}

pub fn trace_via_cycles_capped(
    g: &FundamentalGraph,
    op: Operator,
    n: usize,
    cap: usize,
) -> Result<FourierTraceSeries> {
    walk_series(g, op, n, cap, |_, alpha| Ok(alpha))
}

/// `Σ_m T_{n,m} e^{-i⟨m,k⟩}`, checked to be real.
pub fn evaluate_trace(series: &FourierTraceSeries, k: &[f64]) -> Result<f64> {
    if k.len() != series.dimension {
        return Err(Error::InvalidArgument(format!(
            "quasimomentum has {} components, expected {}",
            k.len(),
            series.dimension
        )));
    }
    let z: Complex64 = series
        .coefficients
        .iter()
        .map(|(m, c)| c * Complex64::from_polar(1.0, -lattice::dot(m, k)))
        .sum();
    let scale = series.l1_norm().max(1.0);
    if z.im.abs() > REALITY_TOL * scale {
        return Err(Error::NonRealTrace { residual: z.im.abs() });
    }
    Ok(z.re)
}

/// `(2π)^{-d} ∫ Tr H^n(k) dk = T_{n,0}`.
pub fn integrated_trace(series: &FourierTraceSeries) -> Result<f64> {
    let c = series.coefficient(&lattice::zero(series.dimension));
    if c.im.abs() > REALITY_TOL * c.norm().max(1.0) {
        return Err(Error::NonRealTrace { residual: c.im.abs() });
    }
    Ok(c.re)
}

/// `(Tr H(k), Tr H²(k))` for the Schrödinger operator from the closed forms
/// over one- and two-step walks of the fundamental graph.
pub fn explicit_low_order_traces(g: &FundamentalGraph, k: &[f64]) -> Result<(f64, f64)> {
    let v = crate::graph::modify(g).loop_weights().to_vec();
    let cos_phi = |index: &[i64], alpha: f64| (alpha + lattice::dot(index, k)).cos();
    let table = g.arc_table();
    let sum_over = |n: usize, f: &(dyn Fn(usize, &[i64], f64) -> f64 + Sync)| -> f64 {
        fold_closed_walks(&table, n, &WalkFilter::All, || 0.0, |acc, w| {
            *acc += f(w.root, w.index, w.alpha)
        })
        .into_iter()
        .sum()
    };
    let c1 = sum_over(1, &|_, m, a| cos_phi(m, a));
    let c1v = sum_over(1, &|x, m, a| v[x] * cos_phi(m, a));
    let c2 = sum_over(2, &|_, m, a| cos_phi(m, a));
    let t1 = v.iter().sum::<f64>() + c1;
    let t2 = v.iter().map(|x| x * x).sum::<f64>() + 2.0 * c1v + c2;
    Ok((t1, t2))
}

/// Trace series of `H^n(· + k_o)` in the minimal-flux representation.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedSeries {
    pub k_shift: Vec<f64>,
    pub series: FourierTraceSeries,
    /// Largest deviation between the walk form and `e^{-i⟨m,k_o⟩} T_{n,m}`.
    pub identity_residual: f64,
}

pub fn shifted_trace_series(
    g: &FundamentalGraph,
    op: Operator,
    n: usize,
    basis: &CycleBasis,
) -> Result<ShiftedSeries> {
    if basis.graph_fingerprint() != g.fingerprint() {
        return Err(Error::BasisMismatch(
            "basis was computed for a different graph".into(),
        ));
    }
    let fp = g.fingerprint();
    let projected = walk_series(g, op, n, DEFAULT_LENGTH_CAP, |arcs, _| {
        let c = crate::cycles::Cycle {
            root: 0,
            arcs: arcs.to_vec(),
            index: Vec::new(),
            flux: 0.0,
            weight: 1.0,
            graph: fp,
        };
        project_flux(basis, &c)
    })?;
    let plain = trace_via_cycles(g, op, n)?;
    let k_o = basis.k_shift();
    let mut rotated = TrigPoly::zero(g.dimension());
    for (m, c) in &plain.coefficients {
        rotated.add_term(m.clone(), c * Complex64::from_polar(1.0, -lattice::dot(m, &k_o)));
    }
    rotated.prune(PRUNE_TOL);
    let rotated = FourierTraceSeries::from_poly(n, &rotated);
    let residual = projected.max_abs_diff(&rotated);
    let scale = plain.l1_norm().max(1.0);
    if residual > 1e-9 * scale {
        return Err(Error::InequalityViolated(format!(
            "shifted series disagree by {residual:e}"
        )));
    }
    Ok(ShiftedSeries {
        k_shift: k_o,
        series: projected,
        identity_residual: residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceDifference {
    /// `Tr(H_0^n(k) - H_α^n(k + k_o))` from the two trace series.
    pub value: f64,
    /// Same quantity as `Σ ω(c) 𝒮(c,k)` over closed walks.
    pub via_cycles: f64,
    /// Integrated difference `T_{0,n,0} - T^o_{α,n,0}`.
    pub integrated: f64,
    /// `2 Σ_{c ∈ C̃_n^0} ω(c) sin²(α(c)/2)`.
    pub integrated_via_cycles: f64,
}

pub fn trace_difference(
    g: &FundamentalGraph,
    op: Operator,
    n: usize,
    k: &[f64],
) -> Result<TraceDifference> {
    let basis = cycle_basis(g)?;
    let k_o = basis.k_shift();
    let zero = g.with_scaled_phases(0.0);
    let s0 = trace_power_series(&zero, op, n)?;
    let sa = trace_power_series(g, op, n)?;
    let shifted_k: Vec<f64> = k.iter().zip(&k_o).map(|(a, b)| a + b).collect();
    let value = evaluate_trace(&s0, k)? - evaluate_trace(&sa, &shifted_k)?;
    let shifted = shifted_trace_series(g, op, n, &basis)?;
    let integrated = integrated_trace(&s0)? - integrated_trace(&shifted.series)?;

    let fp = g.fingerprint();
    let table = OperatorGraph::new(g, op).arc_table();
    let parts = fold_closed_walks(&table, n, &WalkFilter::All, || Ok((0.0, 0.0)), |acc: &mut Result<(f64, f64)>, w| {
        let Ok((s, s0)) = acc else { return };
        let c = crate::cycles::Cycle {
            root: w.root,
            arcs: w.arcs.to_vec(),
            index: w.index.to_vec(),
            flux: lattice::wrap_phase(w.alpha),
            weight: w.weight,
            graph: fp,
        };
        match project_flux(&basis, &c) {
            Ok(p) => {
                let half = p / 2.0;
                *s += w.weight * 2.0 * half.sin() * (half + lattice::dot(w.index, k)).sin();
                if lattice::is_zero(w.index) {
                    *s0 += 2.0 * w.weight * (w.alpha / 2.0).sin().powi(2);
                }
            }
            Err(e) => *acc = Err(e),
        }
    });
    let (mut via_cycles, mut integrated_via_cycles) = (0.0, 0.0);
    for part in parts {
        let (a, b) = part?;
        via_cycles += a;
        integrated_via_cycles += b;
    }
    Ok(TraceDifference {
        value,
        via_cycles,
        integrated,
        integrated_via_cycles,
    })
}
