//! Rooted closed walks ("cycles"), census tables, and the normalized cycle
//! basis used for minimal-flux representations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Arc, FundamentalGraph, ModifiedFundamentalGraph};
use crate::lattice::{self, LatticeVec};

/// Default maximum walk length for enumeration.
pub const DEFAULT_LENGTH_CAP: usize = 12;

/// A rooted closed walk with its derived invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cycle {
    pub root: usize,
    pub arcs: Vec<Arc>,
    pub index: LatticeVec,
    /// Flux reduced to (-π, π].
    pub flux: f64,
    pub weight: f64,
    /// Fingerprint of the fundamental graph the walk lives on.
    pub graph: u64,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Integer coefficient of each stored edge: +1 per forward traversal,
    /// -1 per reverse traversal. Added loops are ignored.
    pub fn edge_coefficients(&self, num_edges: usize) -> Result<Vec<i64>> {
        let mut coef = vec![0; num_edges];
        for arc in &self.arcs {
            if let Arc::Edge { id, reversed } = *arc {
                let slot = coef.get_mut(id).ok_or_else(|| {
                    Error::BasisMismatch(format!("edge id {id} outside 0..{num_edges}"))
                })?;
                *slot += if reversed { -1 } else { 1 };
            }
        }
        Ok(coef)
    }

    /// The reversed walk `c̄`, rooted at the same vertex.
    pub fn reversed(&self) -> Cycle {
        Cycle {
            root: self.root,
            arcs: self.arcs.iter().rev().map(|a| a.reverse()).collect(),
            index: lattice::negate(&self.index),
            flux: lattice::wrap_phase(-self.flux),
            weight: self.weight,
            graph: self.graph,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WalkFilter {
    All,
    WithIndex(LatticeVec),
    NonzeroIndex,
    /// `⟨τ(c), 1⟩` odd.
    OddIndexSum,
}

impl WalkFilter {
    fn accepts(&self, index: &[i64]) -> bool {
        match self {
            WalkFilter::All => true,
            WalkFilter::WithIndex(m) => m.as_slice() == index,
            WalkFilter::NonzeroIndex => !lattice::is_zero(index),
            WalkFilter::OddIndexSum => lattice::component_sum(index).rem_euclid(2) == 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ArcEntry {
    pub arc: Arc,
    pub head: usize,
    pub index: LatticeVec,
    pub alpha: f64,
    pub weight: f64,
}

/// Outgoing arcs per vertex, with everything the walk search needs.
#[derive(Clone, Debug)]
pub struct ArcTable {
    dimension: usize,
    out: Vec<Vec<ArcEntry>>,
    /// `hops[x][y]`: fewest arcs from x to y.
    hops: Vec<Vec<usize>>,
    tau_plus: f64,
    graph: u64,
}

impl ArcTable {
    pub fn from_weighted_arcs(
        g: &FundamentalGraph,
        arcs: impl IntoIterator<Item = (Arc, f64)>,
    ) -> Self {
        let nv = g.num_vertices();
        let mut out: Vec<Vec<ArcEntry>> = vec![Vec::new(); nv];
        for (arc, weight) in arcs {
            out[g.tail(arc)].push(ArcEntry {
                arc,
                head: g.head(arc),
                index: g.index(arc),
                alpha: g.alpha(arc),
                weight,
            });
        }
        for list in &mut out {
            list.sort_by_key(|e| e.arc);
        }
        let hops = (0..nv)
            .map(|s| {
                let mut d = vec![usize::MAX; nv];
                d[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(x) = q.pop_front() {
                    for e in &out[x] {
                        if d[e.head] == usize::MAX {
                            d[e.head] = d[x] + 1;
                            q.push_back(e.head);
                        }
                    }
                }
                d
            })
            .collect();
        ArcTable {
            dimension: g.dimension(),
            out,
            hops,
            tau_plus: g.tau_plus(),
            graph: g.fingerprint(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.out.len()
    }

    pub fn outgoing(&self, x: usize) -> &[ArcEntry] {
        &self.out[x]
    }
}

/// Anything closed walks can be enumerated on.
pub trait WalkSource {
    fn arc_table(&self) -> ArcTable;
}

impl WalkSource for FundamentalGraph {
    fn arc_table(&self) -> ArcTable {
        ArcTable::from_weighted_arcs(self, self.arcs().map(|a| (a, 1.0)))
    }
}

impl WalkSource for ModifiedFundamentalGraph<'_> {
    fn arc_table(&self) -> ArcTable {
        ArcTable::from_weighted_arcs(self.base(), self.arcs().map(|a| (a, self.weight(a))))
    }
}

/// Borrowed view of a walk handed to visitors.
pub struct WalkView<'a> {
    pub root: usize,
    pub arcs: &'a [Arc],
    pub index: &'a [i64],
    /// Unreduced phase sum.
    pub alpha: f64,
    pub weight: f64,
}

impl WalkView<'_> {
    pub fn to_cycle(&self, graph: u64) -> Cycle {
        Cycle {
            root: self.root,
            arcs: self.arcs.to_vec(),
            index: self.index.to_vec(),
            flux: lattice::wrap_phase(self.alpha),
            weight: self.weight,
            graph,
        }
    }
}

struct Search<'t, F> {
    table: &'t ArcTable,
    root: usize,
    n: usize,
    filter: &'t WalkFilter,
    arcs: Vec<Arc>,
    index: LatticeVec,
    visit: F,
}

impl<F: FnMut(&WalkView)> Search<'_, F> {
    fn extend(&mut self, x: usize, alpha: f64, weight: f64) {
        let depth = self.arcs.len();
        if depth == self.n {
            if x == self.root && self.filter.accepts(&self.index) {
                (self.visit)(&WalkView {
                    root: self.root,
                    arcs: &self.arcs,
                    index: &self.index,
                    alpha,
                    weight,
                });
            }
            return;
        }
        let remaining = self.n - depth - 1;
        let table = self.table;
        for e in &table.out[x] {
            if table.hops[e.head][self.root] > remaining {
                continue;
            }
            lattice::add_into(&mut self.index, &e.index);
            if let WalkFilter::WithIndex(m) = self.filter {
                let gap: f64 = m
                    .iter()
                    .zip(&self.index)
                    .map(|(a, b)| ((a - b) * (a - b)) as f64)
                    .sum::<f64>()
                    .sqrt();
                if gap > remaining as f64 * table.tau_plus + 1e-9 {
                    lattice::sub_from(&mut self.index, &e.index);
                    continue;
                }
            }
            self.arcs.push(e.arc);
            self.extend(e.head, alpha + e.alpha, weight * e.weight);
            self.arcs.pop();
            lattice::sub_from(&mut self.index, &e.index);
        }
    }
}

/// Visit every rooted closed walk of length `n` from `root` passing `filter`,
/// in lexicographic arc order.
pub fn visit_closed_walks_from(
    table: &ArcTable,
    root: usize,
    n: usize,
    filter: &WalkFilter,
    visit: impl FnMut(&WalkView),
) {
    let mut s = Search {
        table,
        root,
        n,
        filter,
        arcs: Vec::with_capacity(n),
        index: lattice::zero(table.dimension),
        visit,
    };
    s.extend(root, 0.0, 1.0);
}

fn check_length(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("walk length must be positive".into()));
    }
    if n > cap {
        return Err(Error::LengthCapExceeded { n, cap });
    }
    Ok(())
}

/// Per-root fold over all closed walks, run in parallel and returned in root order.
pub fn fold_closed_walks<T, I, F>(
    table: &ArcTable,
    n: usize,
    filter: &WalkFilter,
    init: I,
    step: F,
) -> Vec<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, &WalkView) + Sync,
{
    (0..table.num_vertices())
        .into_par_iter()
        .map(|root| {
            let mut acc = init();
            visit_closed_walks_from(table, root, n, filter, |w| step(&mut acc, w));
            acc
        })
        .collect()
}

pub fn enumerate_closed_walks<G: WalkSource + ?Sized>(
    g: &G,
    n: usize,
    filter: &WalkFilter,
) -> Result<Vec<Cycle>> {
    enumerate_closed_walks_capped(g, n, filter, DEFAULT_LENGTH_CAP)
}

pub fn enumerate_closed_walks_capped<G: WalkSource + ?Sized>(
    g: &G,
    n: usize,
    filter: &WalkFilter,
    cap: usize,
) -> Result<Vec<Cycle>> {
    check_length(n, cap)?;
    let table = g.arc_table();
    let fp = table.graph;
    let per_root = fold_closed_walks(&table, n, filter, Vec::new, |acc, w| {
        acc.push(w.to_cycle(fp))
    });
    Ok(per_root.into_iter().flatten().collect())
}

/// `N_n` and `N_n^m` for every index that occurs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCensus {
    pub n: usize,
    pub total: u64,
    pub by_index: BTreeMap<LatticeVec, u64>,
}

impl CycleCensus {
    pub fn count(&self, m: &[i64]) -> u64 {
        self.by_index.get(m).copied().unwrap_or(0)
    }

    /// `N_n^+`: walks with nonzero index.
    pub fn nonzero(&self) -> u64 {
        self.by_index
            .iter()
            .filter(|(m, _)| !lattice::is_zero(m))
            .map(|(_, c)| c)
            .sum()
    }

    /// `N_n^odd`: walks with odd index component sum.
    pub fn odd(&self) -> u64 {
        self.by_index
            .iter()
            .filter(|(m, _)| lattice::component_sum(m).rem_euclid(2) == 1)
            .map(|(_, c)| c)
            .sum()
    }
}

pub fn cycle_counts<G: WalkSource + ?Sized>(g: &G, n: usize) -> Result<CycleCensus> {
    cycle_counts_capped(g, n, DEFAULT_LENGTH_CAP)
}

pub fn cycle_counts_capped<G: WalkSource + ?Sized>(
    g: &G,
    n: usize,
    cap: usize,
) -> Result<CycleCensus> {
    check_length(n, cap)?;
    let table = g.arc_table();
    let per_root = fold_closed_walks(&table, n, &WalkFilter::All, BTreeMap::new, |acc, w| {
        *acc.entry(w.index.to_vec()).or_insert(0u64) += 1;
    });
    let mut by_index = BTreeMap::new();
    for part in per_root {
        for (m, c) in part {
            *by_index.entry(m).or_insert(0) += c;
        }
    }
    Ok(CycleCensus {
        n,
        total: by_index.values().sum(),
        by_index,
    })
}

/// Shortest matching walks, deduplicated up to cyclic rotation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortestCycles {
    pub n: usize,
    pub representatives: Vec<Cycle>,
    pub p: usize,
}

fn least_rotation(arcs: &[Arc]) -> Vec<Arc> {
    (0..arcs.len())
        .map(|s| arcs[s..].iter().chain(&arcs[..s]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Length `n` of the shortest walk matching `target` on the original graph,
/// with representatives up to rotation.
///
/// For `NonzeroIndex` a walk and its reversal are also identified, since the
/// filter cannot tell them apart. `WithIndex(m)` identifies rotations only.
pub fn shortest_cycle_length(
    g: &FundamentalGraph,
    target: &WalkFilter,
    cap: usize,
) -> Result<ShortestCycles> {
    let identify_reversal = match target {
        WalkFilter::NonzeroIndex => true,
        WalkFilter::WithIndex(m) => {
            if lattice::is_zero(m) {
                return Err(Error::ZeroIndexRequested);
            }
            false
        }
        _ => {
            return Err(Error::InvalidArgument(
                "shortest cycle target must be NonzeroIndex or WithIndex".into(),
            ))
        }
    };
    for n in 1..=cap {
        let walks = enumerate_closed_walks_capped(g, n, target, cap)?;
        if walks.is_empty() {
            continue;
        }
        let mut seen = BTreeSet::new();
        let mut representatives = Vec::new();
        for c in walks {
            let mut key = least_rotation(&c.arcs);
            if identify_reversal {
                let rev = least_rotation(&c.reversed().arcs);
                key = key.min(rev);
            }
            if c.arcs == key && seen.insert(key) {
                representatives.push(c);
            }
        }
        let p = representatives.len();
        return Ok(ShortestCycles {
            n,
            representatives,
            p,
        });
    }
    Err(Error::NotFoundWithinCap { cap })
}

/// Normalized basis of the cycle space.
///
/// The first `d` classes have indices equal to the standard basis of Z^d and
/// the remaining `β - d` classes have index zero. Classes are integer edge
/// coefficient vectors and need not be single walks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleBasis {
    dimension: usize,
    graph: u64,
    tree: Vec<bool>,
    /// Non-tree edge ids; the t-th fundamental cycle contains the t-th one.
    non_tree: Vec<usize>,
    fundamental: Vec<Vec<i64>>,
    cycles: Vec<Vec<i64>>,
    indices: Vec<LatticeVec>,
    fluxes: Vec<f64>,
    unimodular: Vec<Vec<i64>>,
    unimodular_inv: Vec<Vec<i64>>,
}

impl CycleBasis {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn betti(&self) -> usize {
        self.cycles.len()
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.tree.len()).filter(|&e| self.tree[e]).collect()
    }

    pub fn non_tree_edges(&self) -> &[usize] {
        &self.non_tree
    }

    /// Spanning-tree fundamental cycles as edge coefficient vectors.
    pub fn fundamental_cycles(&self) -> &[Vec<i64>] {
        &self.fundamental
    }

    /// Normalized classes `c_1..c_β` as edge coefficient vectors.
    pub fn cycles(&self) -> &[Vec<i64>] {
        &self.cycles
    }

    pub fn indices(&self) -> &[LatticeVec] {
        &self.indices
    }

    /// Unreduced fluxes `α(c_s)` for the phases of the source graph.
    pub fn fluxes(&self) -> &[f64] {
        &self.fluxes
    }

    /// Rows express normalized classes in fundamental cycles: `c = U f`.
    pub fn change_of_basis(&self) -> &[Vec<i64>] {
        &self.unimodular
    }

    /// Quasimomentum shift `k_o = -(α(c_1), ..., α(c_d))`.
    pub fn k_shift(&self) -> Vec<f64> {
        self.fluxes[..self.dimension].iter().map(|a| -a).collect()
    }

    pub fn graph_fingerprint(&self) -> u64 {
        self.graph
    }

    /// Coordinates `n_s` of an edge coefficient vector of a closed walk.
    pub fn coordinates(&self, edge_coef: &[i64]) -> Result<Vec<i64>> {
        if edge_coef.len() != self.tree.len() {
            return Err(Error::BasisMismatch(format!(
                "coefficient vector has {} entries, graph has {} edges",
                edge_coef.len(),
                self.tree.len()
            )));
        }
        let b = self.betti();
        Ok((0..b)
            .map(|s| {
                (0..b)
                    .map(|t| self.unimodular_inv[t][s] * edge_coef[self.non_tree[t]])
                    .sum()
            })
            .collect())
    }
}

/// Signed tree path from the root to every vertex, as edge coefficients.
fn tree_paths(g: &FundamentalGraph) -> (Vec<bool>, Vec<Vec<i64>>) {
    let nv = g.num_vertices();
    let ne = g.num_edges();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (id, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        incident[e.tail].push(id);
        incident[e.head].push(id);
    }
    let mut tree = vec![false; ne];
    let mut path: Vec<Option<Vec<i64>>> = vec![None; nv];
    path[0] = Some(vec![0; ne]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &id in &incident[x] {
            let e = &g.edges()[id];
            let (y, sign) = if e.tail == x { (e.head, 1) } else { (e.tail, -1) };
            if path[y].is_some() {
                continue;
            }
            tree[id] = true;
            let mut p = path[x].clone().unwrap();
            p[id] += sign;
            path[y] = Some(p);
            queue.push_back(y);
        }
    }
    (tree, path.into_iter().map(Option::unwrap).collect())
}

fn add_row(rows: &mut [Vec<i64>], target: usize, src: usize, factor: i64) {
    if factor == 0 {
        return;
    }
    let (t, s) = if target < src {
        let (a, b) = rows.split_at_mut(src);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(target);
        (&mut b[0], &a[src])
    };
    for (x, y) in t.iter_mut().zip(s) {
        *x += factor * y;
    }
}

fn add_col(m: &mut [Vec<i64>], target: usize, src: usize, factor: i64) {
    for row in m.iter_mut() {
        row[target] += factor * row[src];
    }
}

/// Spanning-tree cycles normalized by unimodular integer row operations.
pub fn cycle_basis(g: &FundamentalGraph) -> Result<CycleBasis> {
    let d = g.dimension();
    let ne = g.num_edges();
    let (tree, paths) = tree_paths(g);
    let non_tree: Vec<usize> = (0..ne).filter(|&e| !tree[e]).collect();
    let fundamental: Vec<Vec<i64>> = non_tree
        .iter()
        .map(|&id| {
            let e = &g.edges()[id];
            let mut f = paths[e.tail].clone();
            lattice::sub_from(&mut f, &paths[e.head]);
            f[id] += 1;
            f
        })
        .collect();
    let index_of = |coef: &[i64]| {
        let mut t = lattice::zero(d);
        for (c, e) in coef.iter().zip(g.edges()) {
            for (ti, ei) in t.iter_mut().zip(&e.index) {
                *ti += c * ei;
            }
        }
        t
    };
    let beta = fundamental.len();
    let mut m: Vec<LatticeVec> = fundamental.iter().map(|f| index_of(f)).collect();
    let mut u: Vec<Vec<i64>> = (0..beta)
        .map(|i| (0..beta).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut u_inv = u.clone();

    let deficient = |rank: usize, divisor: i64| Error::IndexImageDeficient {
        dimension: d,
        rank,
        divisor,
    };
    for j in 0..d {
        loop {
            let pivot = (j..beta)
                .filter(|&r| m[r][j] != 0)
                .min_by_key(|&r| (m[r][j].abs(), r));
            let Some(p) = pivot else {
                return Err(deficient(j, 0));
            };
            if p != j {
                m.swap(p, j);
                u.swap(p, j);
                for row in u_inv.iter_mut() {
                    row.swap(p, j);
                }
            }
            let mut done = true;
            for r in j + 1..beta {
                let q = m[r][j] / m[j][j];
                if q != 0 {
                    add_row(&mut m, r, j, -q);
                    add_row(&mut u, r, j, -q);
                    add_col(&mut u_inv, j, r, q);
                }
                if m[r][j] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
    }
    let divisor: i64 = (0..d).map(|j| m[j][j].abs()).product();
    if divisor != 1 {
        return Err(deficient(d, divisor));
    }
    for j in 0..d {
        if m[j][j] < 0 {
            for row in [&mut m[j], &mut u[j]] {
                row.iter_mut().for_each(|x| *x = -*x);
            }
            for row in u_inv.iter_mut() {
                row[j] = -row[j];
            }
        }
    }
    for j in (0..d).rev() {
        for i in 0..j {
            let q = m[i][j];
            if q != 0 {
                add_row(&mut m, i, j, -q);
                add_row(&mut u, i, j, -q);
                add_col(&mut u_inv, j, i, q);
            }
        }
    }

    let cycles: Vec<Vec<i64>> = u
        .iter()
        .map(|row| {
            let mut c = vec![0; ne];
            for (t, &k) in row.iter().enumerate() {
                for (ci, fi) in c.iter_mut().zip(&fundamental[t]) {
                    *ci += k * fi;
                }
            }
            c
        })
        .collect();
    let fluxes = cycles
        .iter()
        .map(|c| c.iter().zip(g.edges()).map(|(&k, e)| k as f64 * e.alpha).sum())
        .collect();
    Ok(CycleBasis {
        dimension: d,
        graph: g.fingerprint(),
        tree,
        non_tree,
        fundamental,
        indices: m,
        cycles,
        fluxes,
        unimodular: u,
        unimodular_inv: u_inv,
    })
}

/// Flux of the zero-index projection `𝒫c`, reduced to (-π, π].
pub fn project_flux(basis: &CycleBasis, c: &Cycle) -> Result<f64> {
    if c.graph != basis.graph {
        return Err(Error::BasisMismatch(
            "walk and basis come from different graphs".into(),
        ));
    }
    let coords = basis.coordinates(&c.edge_coefficients(basis.tree.len())?)?;
    let d = basis.dimension;
    let flux: f64 = coords[d..]
        .iter()
        .zip(&basis.fluxes[d..])
        .map(|(&n, &a)| n as f64 * a)
        .sum();
    Ok(lattice::wrap_phase(flux))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::graph::modify;

    fn det(m: &[Vec<i64>]) -> i64 {
        // Bareiss fraction-free elimination
        let n = m.len();
        let mut a: Vec<Vec<i128>> = m
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                let Some(s) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                    return 0;
                };
                a.swap(k, s);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    #[test]
    fn square_lattice_one_step_walks() {
        let g = builtin::square_lattice(0.3, -0.2);
        let walks = enumerate_closed_walks(&g, 1, &WalkFilter::All).unwrap();
        let arcs: Vec<Arc> = walks.iter().map(|c| c.arcs[0]).collect();
        assert_eq!(
            arcs,
            vec![Arc::forward(0), Arc::backward(0), Arc::forward(1), Arc::backward(1)]
        );
        let census = cycle_counts(&g, 1).unwrap();
        assert_eq!(census.total, 4);
        for m in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            assert_eq!(census.count(&m), 1);
        }
    }

    #[test]
    fn hexagonal_two_step_census() {
        let g = builtin::hexagonal([0.0; 3]);
        let c10 = enumerate_closed_walks(&g, 2, &WalkFilter::WithIndex(vec![1, 0])).unwrap();
        assert_eq!(c10.len(), 2);
        let c00 = enumerate_closed_walks(&g, 2, &WalkFilter::WithIndex(vec![0, 0])).unwrap();
        assert_eq!(c00.len(), 6);
        // each zero-index walk backtracks along one oriented edge
        let mut firsts: Vec<Arc> = c00.iter().map(|c| c.arcs[0]).collect();
        firsts.sort();
        assert_eq!(firsts, g.arcs().collect::<Vec<_>>());
        for c in &c00 {
            assert_eq!(c.arcs[1], c.arcs[0].reverse());
        }
        let census = cycle_counts(&g, 2).unwrap();
        assert_eq!(census.total, 18);
        assert_eq!(census.count(&[0, 0]), 6);
    }

    #[test]
    fn walks_chain_and_carry_invariants() {
        let g = builtin::kagome([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        for c in enumerate_closed_walks(&g, 4, &WalkFilter::All).unwrap() {
            let mut x = c.root;
            let mut tau = lattice::zero(2);
            let mut a = 0.0;
            for &arc in &c.arcs {
                assert_eq!(g.tail(arc), x);
                x = g.head(arc);
                lattice::add_into(&mut tau, &g.index(arc));
                a += g.alpha(arc);
            }
            assert_eq!(x, c.root);
            assert_eq!(tau, c.index);
            assert!((lattice::wrap_phase(a) - c.flux).abs() < 1e-12);
            assert_eq!(c.weight, 1.0);
        }
    }

    #[test]
    fn length_cap_is_enforced() {
        let g = builtin::square_lattice(0.0, 0.0);
        assert!(matches!(
            enumerate_closed_walks(&g, 13, &WalkFilter::All),
            Err(Error::LengthCapExceeded { n: 13, cap: 12 })
        ));
        assert!(matches!(
            cycle_counts_capped(&g, 3, 2),
            Err(Error::LengthCapExceeded { n: 3, cap: 2 })
        ));
    }

    #[test]
    fn modified_walk_weights() {
        let g = builtin::example41(0.0);
        let m = modify(&g);
        let walks = enumerate_closed_walks(&m, 1, &WalkFilter::All).unwrap();
        let weights: Vec<f64> = walks.iter().map(|c| c.weight).collect();
        assert_eq!(weights, vec![-3.0, -2.0, -2.0, -3.0]);
        let two = enumerate_closed_walks(&m, 2, &WalkFilter::All).unwrap();
        let w: f64 = two.iter().map(|c| c.weight).sum();
        // Tr H(k)^2 at any k for a loop-free graph: #A_* + Σ v_x²
        assert_eq!(w, 10.0 + 9.0 + 4.0 + 4.0 + 9.0);
    }

    #[test]
    fn shortest_cycles_example41() {
        let g = builtin::example41(0.7);
        let s = shortest_cycle_length(&g, &WalkFilter::NonzeroIndex, 12).unwrap();
        assert_eq!(s.n, 3);
        assert_eq!(s.p, 2);
        let reps: Vec<Vec<Arc>> = s.representatives.iter().map(|c| c.arcs.clone()).collect();
        assert_eq!(
            reps,
            vec![
                vec![Arc::forward(0), Arc::forward(1), Arc::forward(2)],
                vec![Arc::forward(0), Arc::backward(4), Arc::backward(3)],
            ]
        );
    }

    #[test]
    fn shortest_cycles_with_index() {
        let sq = builtin::square_lattice(0.0, 0.0);
        let s = shortest_cycle_length(&sq, &WalkFilter::WithIndex(vec![1, 0]), 12).unwrap();
        assert_eq!((s.n, s.p), (1, 1));
        let hex = builtin::hexagonal([0.0; 3]);
        let s = shortest_cycle_length(&hex, &WalkFilter::WithIndex(vec![1, -1]), 12).unwrap();
        assert_eq!((s.n, s.p), (2, 1));
        assert!(matches!(
            shortest_cycle_length(&hex, &WalkFilter::WithIndex(vec![9, 0]), 3),
            Err(Error::NotFoundWithinCap { cap: 3 })
        ));
    }

    #[test]
    fn basis_is_normalized_and_unimodular() {
        for g in builtin::all_builtins() {
            let b = cycle_basis(&g).unwrap();
            let d = g.dimension();
            assert_eq!(b.betti(), crate::graph::betti(&g));
            for (s, idx) in b.indices().iter().enumerate() {
                let expected: Vec<i64> = (0..d).map(|j| i64::from(s == j)).collect();
                assert_eq!(idx, &expected);
            }
            assert_eq!(det(b.change_of_basis()).abs(), 1);
            // each class is a cycle: zero boundary at every vertex
            for c in b.cycles() {
                let mut boundary = vec![0i64; g.num_vertices()];
                for (k, e) in c.iter().zip(g.edges()) {
                    boundary[e.head] += k;
                    boundary[e.tail] -= k;
                }
                assert!(boundary.iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn square_basis_is_the_two_loops() {
        let b = cycle_basis(&builtin::square_lattice(0.0, 0.0)).unwrap();
        assert_eq!(b.cycles(), &[vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn example41_zero_index_class() {
        let phi = 0.9;
        let g = builtin::example41(phi);
        let b = cycle_basis(&g).unwrap();
        assert_eq!(b.betti(), 2);
        let c0 = &b.cycles()[1];
        assert_eq!(b.indices()[1], vec![0]);
        // the class of (e2, e3, e4, e5) up to sign
        let expected = vec![0, 1, 1, 1, 1];
        assert!(c0 == &expected || c0 == &lattice::negate(&expected));
    }

    #[test]
    fn kagome_basis_has_two_zero_index_classes() {
        let g = builtin::kagome([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let b = cycle_basis(&g).unwrap();
        assert_eq!(b.betti(), 4);
        assert!(b.indices()[2..].iter().all(|m| lattice::is_zero(m)));
    }

    #[test]
    fn projected_flux_of_example41_cycles() {
        let phi = 1.1;
        let g = builtin::example41(phi);
        let b = cycle_basis(&g).unwrap();
        let s = shortest_cycle_length(&g, &WalkFilter::NonzeroIndex, 12).unwrap();
        let c1 = &s.representatives[0];
        let c2 = &s.representatives[1];
        assert!(project_flux(&b, c1).unwrap().abs() < 1e-12);
        assert!((project_flux(&b, c2).unwrap() + phi).abs() < 1e-12);
    }

    #[test]
    fn projection_vanishes_when_betti_equals_dimension() {
        let g = builtin::square_lattice(0.4, 2.0);
        let b = cycle_basis(&g).unwrap();
        for c in enumerate_closed_walks(&g, 3, &WalkFilter::All).unwrap() {
            assert_eq!(project_flux(&b, &c).unwrap(), 0.0);
        }
    }

    #[test]
    fn projection_fixes_zero_index_walks() {
        let g = builtin::kagome([0.3, -0.2, 0.5, 1.0, 0.1, -0.7]);
        let b = cycle_basis(&g).unwrap();
        let m = modify(&g);
        for c in enumerate_closed_walks(&m, 4, &WalkFilter::WithIndex(vec![0, 0])).unwrap() {
            let p = project_flux(&b, &c).unwrap();
            assert!(lattice::wrap_phase(p - c.flux).abs() < 1e-12);
        }
    }

    #[test]
    fn foreign_walk_is_a_basis_mismatch() {
        let b = cycle_basis(&builtin::example41(0.0)).unwrap();
        let c = &enumerate_closed_walks(&builtin::kagome_fluxes(0.0, 0.0), 3, &WalkFilter::All)
            .unwrap()[0];
        assert!(matches!(project_flux(&b, c), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn degenerate_index_lattice_is_rejected() {
        use crate::graph::{Edge, Vertex};
        let v = vec![Vertex { label: "x".into(), potential: 0.0 }];
        let e = |index: Vec<i64>| Edge { tail: 0, head: 0, index, alpha: 0.0 };
        let err = FundamentalGraph::new(2, v.clone(), vec![e(vec![2, 0]), e(vec![0, 1])]);
        assert!(matches!(err, Err(Error::IndexImageDeficient { divisor: 2, .. })));
        let err = FundamentalGraph::new(2, v, vec![e(vec![1, 1]), e(vec![2, 2])]);
        assert!(matches!(err, Err(Error::IndexImageDeficient { rank: 1, .. })));
    }
}
