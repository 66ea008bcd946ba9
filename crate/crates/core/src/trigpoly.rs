//! Sparse trigonometric polynomials `f(k) = Σ_m c_m e^{-i⟨m,k⟩}` and
//! matrices of them.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeVec};

/// Magnitude below which coefficients produced by floating arithmetic are dropped.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigPoly {
    dimension: usize,
    terms: BTreeMap<LatticeVec, Complex64>,
}

impl TrigPoly {
    pub fn zero(dimension: usize) -> Self {
        TrigPoly {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dimension: usize, c: Complex64) -> Self {
        let mut p = Self::zero(dimension);
        p.add_term(lattice::zero(dimension), c);
        p
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &BTreeMap<LatticeVec, Complex64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[i64]) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Add `c e^{-i⟨m,k⟩}`; exact zeros are removed.
    pub fn add_term(&mut self, m: LatticeVec, c: Complex64) {
        debug_assert_eq!(m.len(), self.dimension);
        let slot = self.terms.entry(m).or_default();
        *slot += c;
        if *slot == Complex64::default() {
            self.terms.retain(|_, v| *v != Complex64::default());
        }
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, v| v.norm() > tol);
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            *out.terms.entry(m.clone()).or_default() += c;
        }
        out.terms.retain(|_, v| *v != Complex64::default());
        out
    }

    pub fn scale(&self, s: Complex64) -> TrigPoly {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|v| *v *= s);
        out.terms.retain(|_, v| *v != Complex64::default());
        out
    }

    /// Product; the number of monomial multiplications is `len·len`.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero(self.dimension);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let mut m = a.clone();
                lattice::add_into(&mut m, b);
                *out.terms.entry(m).or_default() += ca * cb;
            }
        }
        out
    }

    /// `g(k) = conj(f(k))`, i.e. `c'_m = conj(c_{-m})`.
    pub fn conj_reflect(&self) -> TrigPoly {
        TrigPoly {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (lattice::negate(m), c.conj()))
                .collect(),
        }
    }

    pub fn eval(&self, k: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| c * Complex64::from_polar(1.0, -lattice::dot(m, k)))
            .sum()
    }

    pub fn max_abs_diff(&self, other: &TrigPoly) -> f64 {
        let keys: std::collections::BTreeSet<&LatticeVec> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|m| (self.coefficient(m) - other.coefficient(m)).norm())
            .fold(0.0, f64::max)
    }
}

/// Neumaier-compensated complex sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn two_sum(s: f64, x: f64, comp: &mut f64) -> f64 {
    let t = s + x;
    *comp += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
    t
}

/// Counts monomial multiplications against a fixed budget.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub const DEFAULT: u64 = 10_000_000;

    pub fn new(limit: u64) -> Self {
        Budget {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    fn charge(&self, ops: u64) -> Result<()> {
        let total = self.used.fetch_add(ops, Ordering::Relaxed) + ops;
        if total > self.limit {
            return Err(Error::BudgetExceeded { budget: self.limit });
        }
        Ok(())
    }
}

/// Square matrix of trigonometric polynomials, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolyMatrix {
    size: usize,
    dimension: usize,
    entries: Vec<TrigPoly>,
}

impl TrigPolyMatrix {
    pub fn zeros(size: usize, dimension: usize) -> Self {
        TrigPolyMatrix {
            size,
            dimension,
            entries: vec![TrigPoly::zero(dimension); size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, x: usize, y: usize) -> &TrigPoly {
        &self.entries[x * self.size + y]
    }

    pub fn entry_mut(&mut self, x: usize, y: usize) -> &mut TrigPoly {
        &mut self.entries[x * self.size + y]
    }

    /// Largest deviation from `entry(y,x) = conj_reflect(entry(x,y))`.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.size {
            for y in x..self.size {
                let d = self.entry(y, x).max_abs_diff(&self.entry(x, y).conj_reflect());
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Product with each output entry summed in a fixed order, then pruned.
    pub fn mul(&self, other: &TrigPolyMatrix, budget: &Budget) -> Result<TrigPolyMatrix> {
        let n = self.size;
        let entries = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (x, y) = (idx / n, idx % n);
                let mut sums = BTreeMap::<LatticeVec, CompensatedSum>::new();
                for z in 0..n {
                    let (a, b) = (self.entry(x, z), other.entry(z, y));
                    if a.is_empty() || b.is_empty() {
                        continue;
                    }
                    budget.charge((a.len() * b.len()) as u64)?;
                    for (ma, &ca) in &a.terms {
                        for (mb, &cb) in &b.terms {
                            let mut m = ma.clone();
                            lattice::add_into(&mut m, mb);
                            sums.entry(m).or_default().add(ca * cb);
                        }
                    }
                }
                let mut acc = TrigPoly::zero(self.dimension);
                acc.terms = sums.into_iter().map(|(m, c)| (m, c.value())).collect();
                acc.prune(PRUNE_TOL);
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrigPolyMatrix {
            size: n,
            dimension: self.dimension,
            entries,
        })
    }

    pub fn trace(&self) -> TrigPoly {
        let mut t = TrigPoly::zero(self.dimension);
        for x in 0..self.size {
            t = t.add(self.entry(x, x));
        }
        t.prune(PRUNE_TOL);
        t
    }

    pub fn eval(&self, k: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.size, self.size, |x, y| self.entry(x, y).eval(k))
    }
}

/// Fourier coefficients `T_{n,m}` of `Tr H^n(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTraceSeries {
    pub n: usize,
    pub dimension: usize,
    pub coefficients: BTreeMap<LatticeVec, Complex64>,
}

impl FourierTraceSeries {
    pub fn from_poly(n: usize, p: &TrigPoly) -> Self {
        FourierTraceSeries {
            n,
            dimension: p.dimension(),
            coefficients: p.terms().clone(),
        }
    }

    pub fn coefficient(&self, m: &[i64]) -> Complex64 {
        self.coefficients.get(m).copied().unwrap_or_default()
    }

    pub fn max_abs_diff(&self, other: &FourierTraceSeries) -> f64 {
        let keys: std::collections::BTreeSet<&LatticeVec> = self
            .coefficients
            .keys()
            .chain(other.coefficients.keys())
            .collect();
        keys.into_iter()
            .map(|m| (self.coefficient(m) - other.coefficient(m)).norm())
            .fold(0.0, f64::max)
    }

    /// `max |T_{-m} - conj(T_m)|`.
    pub fn reality_residual(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|(m, c)| (self.coefficient(&lattice::negate(m)) - c.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes; bounds `|Tr H^n(k)|` for every k.
    pub fn l1_norm(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm()).sum()
    }

    /// Largest `‖m‖` in the support.
    pub fn support_radius(&self) -> f64 {
        self.coefficients
            .keys()
            .map(|m| lattice::norm(m))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_adds_exponents() {
        let mut a = TrigPoly::zero(1);
        a.add_term(vec![1], c(1.0, 0.0));
        a.add_term(vec![-1], c(1.0, 0.0));
        // (2 cos k)^2 = 2 + 2 cos 2k
        let sq = a.mul(&a);
        assert_eq!(sq.coefficient(&[0]), c(2.0, 0.0));
        assert_eq!(sq.coefficient(&[2]), c(1.0, 0.0));
        assert_eq!(sq.coefficient(&[-2]), c(1.0, 0.0));
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut a = TrigPoly::zero(2);
        a.add_term(vec![1, 0], c(1.0, 2.0));
        a.add_term(vec![1, 0], c(-1.0, -2.0));
        assert!(a.is_empty());
    }

    #[test]
    fn evaluation_convention() {
        let mut a = TrigPoly::zero(2);
        a.add_term(vec![1, 2], c(1.0, 0.0));
        let k = [0.3, -0.1];
        let expected = Complex64::from_polar(1.0, -(0.3 - 0.2));
        assert!((a.eval(&k) - expected).norm() < 1e-15);
        let r = a.conj_reflect();
        assert!((r.eval(&k) - a.eval(&k).conj()).norm() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let mut m = TrigPolyMatrix::zeros(2, 1);
        for x in 0..2 {
            for y in 0..2 {
                for j in -3..=3 {
                    m.entry_mut(x, y).add_term(vec![j], c(1.0, 0.0));
                }
            }
        }
        let budget = Budget::new(100);
        assert!(matches!(
            m.mul(&m, &budget),
            Err(Error::BudgetExceeded { budget: 100 })
        ));
        assert!(m.mul(&m, &Budget::new(1000)).is_ok());
    }
}
