//! Bloch band structure on uniform quasimomentum grids.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::FundamentalGraph;
use crate::lattice;
use crate::operator::{Operator, OperatorGraph};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const DEFAULT_FLAT_TOL: f64 = 1e-8;
/// Band intervals closer than this are merged.
pub const MERGE_TOL: f64 = 1e-10;

pub fn default_grid(dimension: usize) -> usize {
    match dimension {
        1 => 1024,
        2 => 256,
        _ => 32,
    }
}

/// Numeric fiber matrix `H(k)`.
pub fn fiber_matrix(g: &FundamentalGraph, op: Operator, k: &[f64]) -> DMatrix<Complex64> {
    let h = OperatorGraph::new(g, op);
    let nv = g.num_vertices();
    let mut m = DMatrix::<Complex64>::zeros(nv, nv);
    let w = h.edge_weight();
    for e in g.edges() {
        let z = w * Complex64::from_polar(1.0, -(e.alpha + lattice::dot(&e.index, k)));
        m[(e.tail, e.head)] += z;
        m[(e.head, e.tail)] += z.conj();
    }
    for (x, d) in h.diagonal().into_iter().enumerate() {
        m[(x, x)] += d;
    }
    m
}

pub fn hermitian_residual(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let residual = hermitian_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn band_values(g: &FundamentalGraph, op: Operator, k: &[f64]) -> Result<Vec<f64>> {
    eigenvalues(&fiber_matrix(g, op, k))
}

/// Uniform grid `k_i = -π + 2πi/N` on each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub points: usize,
    pub dimension: usize,
}

impl Grid {
    pub fn new(points: usize, dimension: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
        }
        Ok(Grid { points, dimension })
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of a flat point index, first axis slowest.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.dimension];
        for slot in out.iter_mut().rev() {
            *slot = i % self.points;
            i /= self.points;
        }
        out
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -PI + 2.0 * PI * i as f64 / self.points as f64
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.multi_index(i).into_iter().map(|j| self.coordinate(j)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub k: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Band {
    /// Extrema over the grid samples.
    pub grid_min: Extremum,
    pub grid_max: Extremum,
    /// Extrema after local refinement off the grid.
    pub min: Extremum,
    pub max: Extremum,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.max.value - self.min.value
    }

    pub fn grid_width(&self) -> f64 {
        self.grid_max.value - self.grid_min.value
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandStructure {
    pub grid: Grid,
    pub operator: Operator,
    pub graph: u64,
    pub num_bands: usize,
    /// `values[i * num_bands + j]`: band j at grid point i.
    pub values: Vec<f64>,
    pub bands: Vec<Band>,
    pub warnings: Vec<String>,
}

impl BandStructure {
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.num_bands..(i + 1) * self.num_bands]
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.bands.iter().map(|b| (b.min.value, b.max.value)).collect()
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.bands.iter().map(Band::width).sum()
    }

    pub fn grid_total_bandwidth(&self) -> f64 {
        self.bands.iter().map(Band::grid_width).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumOptions {
    pub grid: usize,
    /// Polish grid extrema with a local pattern search.
    pub refine: bool,
    /// Compare against doubled grids and warn when they disagree.
    pub adaptive: bool,
}

impl SpectrumOptions {
    pub fn new(grid: usize) -> Self {
        SpectrumOptions {
            grid,
            refine: true,
            adaptive: false,
        }
    }
}

fn sample(g: &FundamentalGraph, op: Operator, grid: Grid) -> Result<Vec<f64>> {
    let chunks: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| band_values(g, op, &grid.point(i)))
        .collect::<Result<_>>()?;
    Ok(chunks.concat())
}

fn grid_extrema(values: &[f64], nb: usize, grid: Grid, j: usize) -> (Extremum, Extremum) {
    let (mut lo, mut hi) = ((f64::INFINITY, 0), (f64::NEG_INFINITY, 0));
    for i in 0..grid.len() {
        let v = values[i * nb + j];
        if v < lo.0 {
            lo = (v, i);
        }
        if v > hi.0 {
            hi = (v, i);
        }
    }
    (
        Extremum { value: lo.0, k: grid.point(lo.1) },
        Extremum { value: hi.0, k: grid.point(hi.1) },
    )
}

fn search_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[i] = s;
            dirs.push(v);
        }
        for j in i + 1..d {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut v = vec![0.0; d];
                v[i] = a;
                v[j] = b;
                dirs.push(v);
            }
        }
    }
    dirs
}

/// Compass search for a local extremum of band `j` starting at a grid point.
/// Band functions are only Lipschitz at crossings, so no derivatives are used.
fn refine(
    g: &FundamentalGraph,
    op: Operator,
    j: usize,
    start: &Extremum,
    step: f64,
    maximize: bool,
) -> Result<Extremum> {
    let sign = if maximize { 1.0 } else { -1.0 };
    let dirs = search_directions(start.k.len());
    let mut best = start.clone();
    let mut h = step;
    let mut evals = 0usize;
    while h > 1e-13 && evals < 20_000 {
        let mut moved = false;
        for dir in &dirs {
            let k: Vec<f64> = best.k.iter().zip(dir).map(|(a, b)| a + h * b).collect();
            let v = band_values(g, op, &k)?[j];
            evals += 1;
            if sign * (v - best.value) > 0.0 {
                best = Extremum { value: v, k };
                moved = true;
                break;
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    Ok(best)
}

fn assemble(
    g: &FundamentalGraph,
    op: Operator,
    grid: Grid,
    values: Vec<f64>,
    do_refine: bool,
) -> Result<BandStructure> {
    let nb = g.num_vertices();
    let step = 2.0 * PI / grid.points as f64;
    let bands = (0..nb)
        .into_par_iter()
        .map(|j| {
            let (grid_min, grid_max) = grid_extrema(&values, nb, grid, j);
            let (min, max) = if do_refine && grid_max.value - grid_min.value > 0.0 {
                (
                    refine(g, op, j, &grid_min, step, false)?,
                    refine(g, op, j, &grid_max, step, true)?,
                )
            } else {
                (grid_min.clone(), grid_max.clone())
            };
            Ok(Band { grid_min, grid_max, min, max })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandStructure {
        grid,
        operator: op,
        graph: g.fingerprint(),
        num_bands: nb,
        values,
        bands,
        warnings: Vec::new(),
    })
}

pub fn band_structure(g: &FundamentalGraph, op: Operator, points: usize) -> Result<BandStructure> {
    band_structure_with(g, op, SpectrumOptions::new(points))
}

pub fn band_structure_with(
    g: &FundamentalGraph,
    op: Operator,
    opts: SpectrumOptions,
) -> Result<BandStructure> {
    let mut grid = Grid::new(opts.grid, g.dimension())?;
    let mut values = sample(g, op, grid)?;
    let mut warnings = Vec::new();
    if opts.adaptive {
        let nb = g.num_vertices();
        let widths = |v: &[f64], gr: Grid| -> Vec<(f64, f64)> {
            (0..nb)
                .map(|j| {
                    let (a, b) = grid_extrema(v, nb, gr, j);
                    (a.value, b.value)
                })
                .collect()
        };
        let mut doublings = 0;
        loop {
            let finer = Grid::new(grid.points * 2, grid.dimension)?;
            let finer_values = sample(g, op, finer)?;
            let (a, b) = (widths(&values, grid), widths(&finer_values, finer));
            let drift = a.iter().zip(&b).any(|(&(lo0, hi0), &(lo1, hi1))| {
                let scale = (hi1 - lo1).abs().max(1e-8);
                (lo0 - lo1).abs() > 0.1 * scale || (hi0 - hi1).abs() > 0.1 * scale
            });
            grid = finer;
            values = finer_values;
            doublings += 1;
            if !drift {
                break;
            }
            if doublings == 3 {
                warnings.push(format!(
                    "grid too coarse: band extrema still move by more than 10% at N={}",
                    grid.points
                ));
                break;
            }
        }
    }
    let mut bs = assemble(g, op, grid, values, opts.refine)?;
    bs.warnings = warnings;
    Ok(bs)
}

pub fn total_bandwidth(bs: &BandStructure) -> f64 {
    bs.total_bandwidth()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatBand {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSet {
    pub intervals: Vec<(f64, f64)>,
    pub flat: Vec<FlatBand>,
    pub flat_tol: f64,
}

impl SpectralSet {
    /// Lebesgue measure of the union.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn is_flat(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| x >= a - tol && x <= b + tol)
            || self.flat.iter().any(|f| (f.value - x).abs() <= tol)
    }
}

pub fn spectral_set(bs: &BandStructure, flat_tol: f64) -> SpectralSet {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut flat: Vec<FlatBand> = Vec::new();
    for b in &bs.bands {
        if b.width() < flat_tol {
            let value = 0.5 * (b.min.value + b.max.value);
            match flat.iter_mut().find(|f| (f.value - value).abs() < flat_tol) {
                Some(f) => f.multiplicity += 1,
                None => flat.push(FlatBand { value, multiplicity: 1 }),
            }
        } else {
            intervals.push((b.min.value, b.max.value));
        }
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 + MERGE_TOL => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    flat.sort_by(|a, b| a.value.total_cmp(&b.value));
    SpectralSet { intervals: merged, flat, flat_tol }
}

/// Parameter values `t_0 + (t_1 - t_0) i / S` for `i < S`, plus the end point
/// when `include_end` is set.
pub fn sweep_grid(t0: f64, t1: f64, steps: usize, include_end: bool) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument("a sweep needs at least 2 steps".into()));
    }
    let denom = if include_end { steps - 1 } else { steps } as f64;
    Ok((0..steps).map(|i| t0 + (t1 - t0) * i as f64 / denom).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t: f64,
    /// Band intervals, or the error that stopped this point.
    pub bands: std::result::Result<Vec<(f64, f64)>, String>,
    pub total_bandwidth: f64,
    pub all_flat: bool,
}

/// Band intervals along a one-parameter family; per-point failures are
/// recorded and the sweep continues.
pub fn flux_sweep<F>(
    family: F,
    ts: &[f64],
    op: Operator,
    opts: SpectrumOptions,
    flat_tol: f64,
) -> Vec<SweepPoint>
where
    F: Fn(f64) -> Result<FundamentalGraph> + Sync,
{
    ts.par_iter()
        .map(|&t| match family(t).and_then(|g| band_structure_with(&g, op, opts)) {
            Ok(bs) => SweepPoint {
                t,
                total_bandwidth: bs.total_bandwidth(),
                all_flat: bs.bands.iter().all(|b| b.width() < flat_tol),
                bands: Ok(bs.intervals()),
            },
            Err(e) => SweepPoint {
                t,
                bands: Err(e.to_string()),
                total_bandwidth: f64::NAN,
                all_flat: false,
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn example41_flat_at_pi() {
        let g = builtin::example41(PI);
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let mut expected = [2.0 - s2, 2.0 + s2, 3.0 - s3, 3.0 + s3];
        expected.sort_by(f64::total_cmp);
        for k in [-3.0, -1.0, 0.0, 0.4, 2.9] {
            let ev = band_values(&g, Operator::Laplacian, &[k]).unwrap();
            for (a, b) in ev.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kagome_adjacency_at_origin() {
        let ev = band_values(&builtin::kagome_fluxes(0.0, 0.0), Operator::Adjacency, &[0.0, 0.0]).unwrap();
        for (a, b) in ev.iter().zip(&[-2.0, -2.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn square_laplacian_dispersion() {
        let g = builtin::square_lattice(0.0, 0.0);
        for k in [[0.3, -1.0], [PI, 2.0]] {
            let ev = band_values(&g, Operator::Laplacian, &k).unwrap();
            assert!((ev[0] - (4.0 - 2.0 * k[0].cos() - 2.0 * k[1].cos())).abs() < 1e-12);
        }
        let bs = band_structure(&g, Operator::Laplacian, 32).unwrap();
        assert!((bs.total_bandwidth() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn grid_layout() {
        let grid = Grid::new(4, 2).unwrap();
        assert_eq!(grid.len(), 16);
        assert_eq!(grid.multi_index(6), vec![1, 2]);
        assert_eq!(grid.point(6), vec![-PI / 2.0, 0.0]);
        assert!(Grid::new(1, 1).is_err());
    }

    #[test]
    fn spectral_set_merges_touching_bands() {
        let bs = band_structure(&builtin::kagome_fluxes(0.0, 0.0), Operator::Laplacian, 64).unwrap();
        let s = spectral_set(&bs, DEFAULT_FLAT_TOL);
        assert_eq!(s.intervals.len(), 1);
        assert!((s.intervals[0].0).abs() < 1e-9 && (s.intervals[0].1 - 6.0).abs() < 1e-9);
        assert_eq!(s.flat, vec![FlatBand { value: s.flat[0].value, multiplicity: 1 }]);
        assert!((s.flat[0].value - 6.0).abs() < 1e-9);
        assert!((s.measure() - 6.0).abs() < 1e-8);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigenvalues(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sweep_grids() {
        let t = sweep_grid(0.0, 1.0, 101, true).unwrap();
        assert_eq!(t.len(), 101);
        assert_eq!(t[100], 1.0);
        let t = sweep_grid(0.0, 2.0 * PI, 64, false).unwrap();
        assert_eq!(t[32], PI);
        assert!(sweep_grid(0.0, 1.0, 1, false).is_err());
    }

    #[test]
    fn adaptive_doubling_on_smooth_bands_is_quiet() {
        let g = builtin::example41(0.0);
        let mut opts = SpectrumOptions::new(64);
        opts.adaptive = true;
        let bs = band_structure_with(&g, Operator::Laplacian, opts).unwrap();
        assert!(bs.warnings.is_empty());
        assert_eq!(bs.grid.points, 128);
    }

    #[test]
    fn sweep_records_failures_and_continues() {
        let pts = flux_sweep(
            |t| if t > 0.5 { Err(Error::InvalidArgument("boom".into())) } else { Ok(builtin::example41(t)) },
            &[0.0, 1.0],
            Operator::Laplacian,
            SpectrumOptions::new(32),
            DEFAULT_FLAT_TOL,
        );
        assert!(pts[0].bands.is_ok());
        assert!(pts[1].bands.is_err());
    }
}
