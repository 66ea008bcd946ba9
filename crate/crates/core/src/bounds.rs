//! Lower and upper bounds on the total bandwidth.
//!
//! All bounds are evaluated for the normalized operator: a Schrödinger
//! operator whose potential is shifted so that `min V = κ_+`. Shifting V by a
//! constant moves every band rigidly, so the total bandwidth is unchanged,
//! and after the shift every eigenvalue satisfies `|λ| ≤ v_*`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cycles::{fold_closed_walks, shortest_cycle_length, WalkFilter, WalkSource, DEFAULT_LENGTH_CAP};
use crate::error::{Error, Result};
use crate::graph::{betti, degrees, FundamentalGraph};
use crate::lattice::{self, LatticeVec};
use crate::operator::{Operator, OperatorGraph};
use crate::spectrum::{band_structure_with, BandStructure, Grid, SpectrumOptions};
use crate::traces::{evaluate_trace, trace_power_family, trace_power_series};
use crate::trigpoly::{Budget, FourierTraceSeries};

/// Coefficients below this modulus count as zero in the flatness certificate.
pub const FLAT_COEFF_TOL: f64 = 1e-10;

/// The operator the bounds are stated for, with its `v_*`.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub graph: FundamentalGraph,
    pub operator: Operator,
    pub v_star: f64,
    pub kappa_plus: f64,
    pub diam_v: f64,
}

/// Schrödinger: `V' = V - min V + κ_+`, `v_* = diam V + κ_+`.
/// Laplacian: `κ_+ - Δ`, i.e. Schrödinger with `V' = κ_+`, `v_* = κ_+`.
/// Adjacency: unchanged, `v_* = κ_+`.
pub fn normalize(g: &FundamentalGraph, op: Operator) -> Normalized {
    let kappa_plus = degrees(g).max as f64;
    match op {
        Operator::Adjacency => Normalized {
            graph: g.clone(),
            operator: op,
            v_star: kappa_plus,
            kappa_plus,
            diam_v: 0.0,
        },
        Operator::Laplacian => Normalized {
            graph: g
                .with_potentials(&vec![kappa_plus; g.num_vertices()])
                .expect("one potential per vertex"),
            operator: Operator::Schrodinger,
            v_star: kappa_plus,
            kappa_plus,
            diam_v: 0.0,
        },
        Operator::Schrodinger => {
            let v = g.potentials();
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let shifted: Vec<f64> = v.iter().map(|x| x - lo + kappa_plus).collect();
            Normalized {
                graph: g.with_potentials(&shifted).expect("one potential per vertex"),
                operator: op,
                v_star: hi - lo + kappa_plus,
                kappa_plus,
                diam_v: hi - lo,
            }
        }
    }
}

fn denominator(n: usize, v_star: f64) -> f64 {
    n as f64 * v_star.powi(n as i32 - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleBound {
    pub n: usize,
    pub b_plus: f64,
    pub b_odd: f64,
    pub bound: f64,
}

/// `max{B⁺, 2B^odd} / (n v_*^{n-1})`.
pub fn lower_bound_cycles(g: &FundamentalGraph, op: Operator, n: usize) -> Result<CycleBound> {
    if n == 0 || n > DEFAULT_LENGTH_CAP {
        return Err(Error::LengthCapExceeded { n, cap: DEFAULT_LENGTH_CAP });
    }
    let norm = normalize(g, op);
    let table = OperatorGraph::new(&norm.graph, norm.operator).arc_table();
    let parts = fold_closed_walks(&table, n, &WalkFilter::NonzeroIndex, || (0.0, 0.0), |acc, w| {
        let term = w.weight * w.alpha.cos();
        acc.0 += term;
        if lattice::component_sum(w.index).rem_euclid(2) == 1 {
            acc.1 += term;
        }
    });
    let (plus, odd) = parts.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let (b_plus, b_odd) = (plus.abs(), odd.abs());
    Ok(CycleBound {
        n,
        b_plus,
        b_odd,
        bound: b_plus.max(2.0 * b_odd) / denominator(n, norm.v_star),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortestCycleCase {
    pub n_m: usize,
    pub p: usize,
    /// `n(m) |1 + Σ_{j≥2} e^{-iα(c_j - c_1)}|`.
    pub predicted: f64,
    /// Guaranteed lower value from the applicable special case, if any.
    pub guaranteed: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierBound {
    pub n: usize,
    pub m: LatticeVec,
    pub modulus: f64,
    pub bound: f64,
    pub shortest: Option<ShortestCycleCase>,
}

fn shortest_case(g: &FundamentalGraph, m: &[i64], n: usize) -> Result<Option<ShortestCycleCase>> {
    if !lattice::is_primitive(m) {
        return Ok(None);
    }
    let s = match shortest_cycle_length(g, &WalkFilter::WithIndex(m.to_vec()), n) {
        Ok(s) => s,
        Err(Error::NotFoundWithinCap { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if s.n != n {
        return Ok(None);
    }
    let f1 = s.representatives[0].flux;
    let rel: Vec<f64> = s.representatives[1..]
        .iter()
        .map(|c| lattice::wrap_phase(c.flux - f1))
        .collect();
    let sum: Complex64 = Complex64::new(1.0, 0.0)
        + rel.iter().map(|&a| Complex64::from_polar(1.0, -a)).sum::<Complex64>();
    let n_m = n as f64;
    let guaranteed = match s.p {
        1 => Some(n_m),
        2 => Some(2.0 * n_m * (rel[0] / 2.0).cos().abs()),
        p => {
            let a_plus = rel.iter().map(|a| a.abs()).fold(0.0, f64::max);
            (a_plus < std::f64::consts::FRAC_PI_2)
                .then(|| n_m * (1.0 + (p - 1) as f64 * a_plus.cos()))
        }
    };
    Ok(Some(ShortestCycleCase {
        n_m: n,
        p: s.p,
        predicted: n_m * sum.norm(),
        guaranteed,
    }))
}

fn fourier_record(
    g: &FundamentalGraph,
    series: &FourierTraceSeries,
    m: &[i64],
    v_star: f64,
) -> Result<FourierBound> {
    let n = series.n;
    let modulus = series.coefficient(m).norm();
    Ok(FourierBound {
        n,
        m: m.to_vec(),
        modulus,
        bound: 2.0 * modulus / denominator(n, v_star),
        shortest: shortest_case(g, m, n)?,
    })
}

/// `2|T_{n,m}| / (n v_*^{n-1})` for `m ≠ 0`.
pub fn lower_bound_fourier(
    g: &FundamentalGraph,
    op: Operator,
    n: usize,
    m: &[i64],
) -> Result<FourierBound> {
    if lattice::is_zero(m) {
        return Err(Error::ZeroIndexRequested);
    }
    if n == 0 || n > DEFAULT_LENGTH_CAP {
        return Err(Error::LengthCapExceeded { n, cap: DEFAULT_LENGTH_CAP });
    }
    let norm = normalize(g, op);
    let series = trace_power_series(&norm.graph, norm.operator, n)?;
    fourier_record(g, &series, m, norm.v_star)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperBounds {
    pub betti: usize,
    /// `½ #{e ∈ A_* : τ(e) ≠ 0}` for the stored indices.
    pub embedding_invariant: usize,
    pub four_beta: f64,
    pub four_embedding: f64,
}

impl UpperBounds {
    pub fn best(&self) -> f64 {
        self.four_beta.min(self.four_embedding)
    }
}

pub fn upper_bounds(g: &FundamentalGraph) -> UpperBounds {
    let b = betti(g);
    let i = g.edges().iter().filter(|e| !lattice::is_zero(&e.index)).count();
    UpperBounds {
        betti: b,
        embedding_invariant: i,
        four_beta: 4.0 * b as f64,
        four_embedding: 4.0 * i as f64,
    }
}

/// All bands flat iff every `T_{n,m}` with `n ≤ ν`, `m ≠ 0` vanishes.
pub fn flatness_certificate(g: &FundamentalGraph, op: Operator) -> Result<bool> {
    let family = trace_power_family(g, op, g.num_vertices(), &Budget::new(Budget::DEFAULT))?;
    Ok(family.iter().all(|s| {
        s.coefficients
            .iter()
            .all(|(m, c)| lattice::is_zero(m) || c.norm() < FLAT_COEFF_TOL)
    }))
}

/// Coupling values `t` for which `H_{tα}` has only flat bands.
pub fn coupling_flatness_scan(g: &FundamentalGraph, op: Operator, ts: &[f64]) -> Result<Vec<f64>> {
    if ts.len() < 2 {
        return Err(Error::InvalidArgument("scan needs at least 2 points".into()));
    }
    let mut flagged = Vec::new();
    for &t in ts {
        if flatness_certificate(&g.with_scaled_phases(t), op)? {
            flagged.push(t);
        }
    }
    Ok(flagged)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerBandwidthCheck {
    pub n: usize,
    pub v_star: f64,
    /// `𝔖(H)` and `𝔖(H^n)` from the same grid samples.
    pub bandwidth: f64,
    pub power_bandwidth: f64,
    /// `n v_*^{n-1} 𝔖(H)`.
    pub upper: f64,
    /// Largest `|Tr H^n(k₁) - Tr H^n(k₂)|` over the sampled pairs.
    pub trace_gap: f64,
    pub pairs: usize,
}

impl PowerBandwidthCheck {
    pub fn slack_upper(&self) -> f64 {
        self.upper - self.power_bandwidth
    }

    pub fn slack_lower(&self) -> f64 {
        self.power_bandwidth - self.trace_gap
    }
}

/// Check `𝔖(H^n) ≤ n v_*^{n-1} 𝔖(H)` and `𝔖(H^n) ≥ |Tr H^n(k₁) - Tr H^n(k₂)|`
/// on the normalized operator. Bands of `H^n` are the sorted n-th powers of
/// the sampled eigenvalues.
pub fn power_bandwidth_check(
    g: &FundamentalGraph,
    op: Operator,
    n: usize,
    grid: usize,
    pairs: usize,
    seed: u64,
) -> Result<PowerBandwidthCheck> {
    let norm = normalize(g, op);
    let opts = SpectrumOptions { grid, refine: false, adaptive: false };
    let bs = band_structure_with(&norm.graph, norm.operator, opts)?;
    let check = power_check_from_bands(&norm.graph, norm.operator, &bs, n, norm.v_star, pairs, seed)?;
    if check.slack_upper() < -1e-8 || check.slack_lower() < -1e-8 {
        return Err(Error::InequalityViolated(format!(
            "power bandwidth lemma fails for n={n}: S(H^n)={}, upper={}, trace gap={}",
            check.power_bandwidth, check.upper, check.trace_gap
        )));
    }
    Ok(check)
}

fn power_check_from_bands(
    g: &FundamentalGraph,
    op: Operator,
    bs: &BandStructure,
    n: usize,
    v_star: f64,
    pairs: usize,
    seed: u64,
) -> Result<PowerBandwidthCheck> {
    let nb = bs.num_bands;
    let npts = bs.grid.len();
    let mut lo = vec![f64::INFINITY; nb];
    let mut hi = vec![f64::NEG_INFINITY; nb];
    let mut row = vec![0.0; nb];
    for i in 0..npts {
        for (r, &l) in row.iter_mut().zip(bs.at(i)) {
            *r = l.powi(n as i32);
        }
        row.sort_by(f64::total_cmp);
        for j in 0..nb {
            lo[j] = lo[j].min(row[j]);
            hi[j] = hi[j].max(row[j]);
        }
    }
    let power_bandwidth: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).sum();
    let bandwidth = bs.grid_total_bandwidth();
    let series = trace_power_series(g, op, n)?;
    let grid: Grid = bs.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace_gap = 0.0f64;
    for _ in 0..pairs {
        let k1 = grid.point(rng.random_range(0..npts));
        let k2 = grid.point(rng.random_range(0..npts));
        let gap = (evaluate_trace(&series, &k1)? - evaluate_trace(&series, &k2)?).abs();
        trace_gap = trace_gap.max(gap);
    }
    Ok(PowerBandwidthCheck {
        n,
        v_star,
        bandwidth,
        power_bandwidth,
        upper: denominator(n, v_star) * bandwidth,
        trace_gap,
        pairs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    None,
    Cycles { n: usize },
    Fourier { n: usize, m: LatticeVec },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub measured: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub operator: Operator,
    pub v_star: f64,
    pub kappa_plus: f64,
    pub diam_v: f64,
    pub cycle_bounds: Vec<CycleBound>,
    pub fourier_bounds: Vec<FourierBound>,
    pub best_lower: f64,
    pub witness: Witness,
    pub upper: UpperBounds,
    pub flat_certificate: bool,
    pub sandwich: Option<Sandwich>,
}

/// Scans `n ≤ min(ν + 2, n_cap)` and every `m ≠ 0` in the support of the
/// computed series.
pub fn bounds_report(g: &FundamentalGraph, op: Operator, n_cap: usize) -> Result<BoundsReport> {
    let norm = normalize(g, op);
    let n_max = (g.num_vertices() + 2).min(n_cap).clamp(1, DEFAULT_LENGTH_CAP);
    let cycle_bounds = (1..=n_max)
        .map(|n| lower_bound_cycles(g, op, n))
        .collect::<Result<Vec<_>>>()?;
    let family = trace_power_family(&norm.graph, norm.operator, n_max, &Budget::new(Budget::DEFAULT))?;
    let mut fourier_bounds = Vec::new();
    for s in &family {
        for m in s.coefficients.keys().filter(|m| !lattice::is_zero(m)) {
            fourier_bounds.push(fourier_record(g, s, m, norm.v_star)?);
        }
    }
    let mut best_lower = 0.0;
    let mut witness = Witness::None;
    for c in &cycle_bounds {
        if c.bound > best_lower {
            best_lower = c.bound;
            witness = Witness::Cycles { n: c.n };
        }
    }
    for f in &fourier_bounds {
        if f.bound > best_lower {
            best_lower = f.bound;
            witness = Witness::Fourier { n: f.n, m: f.m.clone() };
        }
    }
    let flat_certificate = flatness_certificate(g, op)?;
    Ok(BoundsReport {
        operator: op,
        v_star: norm.v_star,
        kappa_plus: norm.kappa_plus,
        diam_v: norm.diam_v,
        cycle_bounds,
        fourier_bounds,
        best_lower,
        witness,
        upper: upper_bounds(g),
        flat_certificate,
        sandwich: None,
    })
}

impl BoundsReport {
    /// Attach a measured bandwidth and check `best_lower ≤ 𝔖 ≤ min upper`.
    pub fn attach(&mut self, measured: f64, tol: f64) -> bool {
        let holds = self.best_lower <= measured + tol && measured <= self.upper.best() + tol;
        self.sandwich = Some(Sandwich { measured, holds });
        holds
    }

    /// Flat rows `(kind, n, m, value, bound)`.
    pub fn rows(&self) -> Vec<(String, usize, String, f64, f64)> {
        let mut rows = Vec::new();
        for c in &self.cycle_bounds {
            rows.push(("b_plus".into(), c.n, String::new(), c.b_plus, c.bound));
            rows.push(("b_odd".into(), c.n, String::new(), c.b_odd, c.bound));
        }
        for f in &self.fourier_bounds {
            rows.push(("fourier".into(), f.n, lattice::format_index(&f.m), f.modulus, f.bound));
        }
        rows.push(("upper_4beta".into(), 0, String::new(), self.upper.betti as f64, self.upper.four_beta));
        rows.push((
            "upper_4emb".into(),
            0,
            String::new(),
            self.upper.embedding_invariant as f64,
            self.upper.four_embedding,
        ));
        rows.push(("best_lower".into(), 0, String::new(), self.best_lower, self.best_lower));
        rows
    }
}

/// Per-index sums `Σ cos α(c)` used by tests of the zero-potential reduction.
pub fn census_cos(g: &FundamentalGraph, n: usize) -> BTreeMap<LatticeVec, f64> {
    let table = g.arc_table();
    let parts = fold_closed_walks(&table, n, &WalkFilter::All, BTreeMap::new, |acc, w| {
        *acc.entry(w.index.to_vec()).or_insert(0.0) += w.alpha.cos();
    });
    let mut out = BTreeMap::new();
    for p in parts {
        for (m, v) in p {
            *out.entry(m).or_insert(0.0) += v;
        }
    }
    out
}
