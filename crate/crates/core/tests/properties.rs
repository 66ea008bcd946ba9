use std::f64::consts::PI;

use magtrace::bounds::{bounds_report, normalize, upper_bounds};
use magtrace::builtin::{self, random_graph};
use magtrace::cycles::{cycle_basis, cycle_counts, enumerate_closed_walks, WalkFilter};
use magtrace::graph::{degrees, validate_graph, GraphFile};
use magtrace::lattice;
use magtrace::spectrum::{band_structure, eigenvalues, fiber_matrix};
use magtrace::traces::{evaluate_trace, trace_power_series};
use magtrace::trigpoly::TrigPoly;
use magtrace::{FundamentalGraph, Operator};
use num_complex::Complex64;
use proptest::prelude::*;

fn any_k(d: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-PI..PI, d..=d)
}

fn graph_and_k() -> impl Strategy<Value = (FundamentalGraph, Vec<f64>)> {
    (0u64..10_000).prop_flat_map(|seed| {
        let g = random_graph(seed);
        let d = g.dimension();
        (Just(g), any_k(d))
    })
}

fn operator() -> impl Strategy<Value = Operator> {
    prop::sample::select(Operator::ALL.to_vec())
}

fn matrix_power_trace(g: &FundamentalGraph, op: Operator, k: &[f64], n: usize) -> f64 {
    let h = fiber_matrix(g, op, k);
    let mut p = h.clone();
    for _ in 1..n {
        p = &p * &h;
    }
    p.trace().re
}

fn poly() -> impl Strategy<Value = TrigPoly> {
    proptest::collection::vec(((-2i64..=2, -2i64..=2), -3.0..3.0f64, -3.0..3.0f64), 0..6).prop_map(|terms| {
        let mut p = TrigPoly::zero(2);
        for ((a, b), re, im) in terms {
            p.add_term(vec![a, b], Complex64::new(re, im));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalue_power_sums_match_trace_series((g, k) in graph_and_k(), op in operator()) {
        let ev = eigenvalues(&fiber_matrix(&g, op, &k)).unwrap();
        for n in 1..=g.num_vertices() {
            let s = trace_power_series(&g, op, n).unwrap();
            let direct: f64 = ev.iter().map(|l| l.powi(n as i32)).sum();
            let scale = s.l1_norm().max(1.0);
            prop_assert!((evaluate_trace(&s, &k).unwrap() - direct).abs() <= 1e-7 * scale);
        }
    }

    #[test]
    fn spectrum_stays_in_the_operator_range((g, k) in graph_and_k()) {
        let kp = degrees(&g).max as f64;
        for l in eigenvalues(&fiber_matrix(&g, Operator::Adjacency, &k)).unwrap() {
            prop_assert!(l.abs() <= kp + 1e-9);
        }
        for l in eigenvalues(&fiber_matrix(&g, Operator::Laplacian, &k)).unwrap() {
            prop_assert!((-1e-9..=2.0 * kp + 1e-9).contains(&l));
        }
    }

    #[test]
    fn vertex_gauge_leaves_eigenvalues_unchanged(
        (g, k) in graph_and_k(),
        theta in proptest::collection::vec(-PI..PI, 5),
        op in operator(),
    ) {
        let phases: Vec<f64> = g
            .edges()
            .iter()
            .map(|e| e.alpha + theta[e.head] - theta[e.tail])
            .collect();
        let h = g.with_phases(&phases).unwrap();
        let a = eigenvalues(&fiber_matrix(&g, op, &k)).unwrap();
        let b = eigenvalues(&fiber_matrix(&h, op, &k)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_potential_shift((g, k) in graph_and_k(), c in -3.0..3.0f64) {
        let shifted: Vec<f64> = g.potentials().iter().map(|v| v + c).collect();
        let h = g.with_potentials(&shifted).unwrap();
        let a = eigenvalues(&fiber_matrix(&g, Operator::Schrodinger, &k)).unwrap();
        let b = eigenvalues(&fiber_matrix(&h, Operator::Schrodinger, &k)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + c - y).abs() < 1e-9);
        }
        prop_assert!((normalize(&g, Operator::Schrodinger).v_star - normalize(&h, Operator::Schrodinger).v_star).abs() < 1e-9);
    }

    #[test]
    fn walk_count_is_the_trace_of_the_zero_flux_adjacency(seed in 0u64..10_000, n in 1usize..=4) {
        let g = random_graph(seed).with_scaled_phases(0.0);
        let census = cycle_counts(&g, n).unwrap();
        let d = g.dimension();
        let t = matrix_power_trace(&g, Operator::Adjacency, &vec![0.0; d], n);
        prop_assert!((census.total as f64 - t).abs() < 1e-6);
        for (m, &count) in &census.by_index {
            prop_assert_eq!(census.count(&lattice::negate(m)), count);
        }
    }

    #[test]
    fn walks_close_up_and_sum_their_data(seed in 0u64..10_000, n in 1usize..=3) {
        let g = random_graph(seed);
        for c in enumerate_closed_walks(&g, n, &WalkFilter::All).unwrap() {
            let mut x = c.root;
            let mut tau = lattice::zero(g.dimension());
            for &a in &c.arcs {
                prop_assert_eq!(g.tail(a), x);
                x = g.head(a);
                lattice::add_into(&mut tau, &g.index(a));
            }
            prop_assert_eq!(x, c.root);
            prop_assert_eq!(&tau, &c.index);
        }
    }

    #[test]
    fn cycle_basis_coordinates_reconstruct_indices(seed in 0u64..10_000) {
        let g = random_graph(seed);
        let basis = cycle_basis(&g).unwrap();
        let d = g.dimension();
        for (s, m) in basis.indices().iter().enumerate() {
            let mut e = lattice::zero(d);
            if s < d {
                e[s] = 1;
            }
            prop_assert_eq!(m, &e);
        }
        for c in enumerate_closed_walks(&g, 3, &WalkFilter::All).unwrap() {
            let coef = c.edge_coefficients(g.num_edges()).unwrap();
            let n = basis.coordinates(&coef).unwrap();
            prop_assert_eq!(&n[..d], &c.index[..]);
        }
    }

    #[test]
    fn graph_files_round_trip(seed in 0u64..10_000) {
        let g = random_graph(seed);
        let text = GraphFile::from_graph(&g).to_json().unwrap();
        let back = validate_graph(&GraphFile::from_json(&text).unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn trig_products_evaluate_pointwise(p in poly(), q in poly(), k in any_k(2)) {
        let lhs = p.mul(&q).eval(&k);
        let rhs = p.eval(&k) * q.eval(&k);
        prop_assert!((lhs - rhs).norm() < 1e-9);
        prop_assert!(p.mul(&q).max_abs_diff(&q.mul(&p)) < 1e-12);
        prop_assert!((p.conj_reflect().eval(&k) - p.eval(&k).conj()).norm() < 1e-12);
    }
}

#[test]
fn bands_and_bounds_ignore_constant_potentials() {
    let g = builtin::example41(0.8).with_potentials(&[0.3, -1.0, 2.0, 0.5]).unwrap();
    let h = g.with_potentials(&[2.3, 1.0, 4.0, 2.5]).unwrap();
    let a = band_structure(&g, Operator::Schrodinger, 256).unwrap();
    let b = band_structure(&h, Operator::Schrodinger, 256).unwrap();
    assert!((a.total_bandwidth() - b.total_bandwidth()).abs() < 1e-9);
    for (x, y) in a.intervals().iter().zip(b.intervals()) {
        assert!((x.0 + 2.0 - y.0).abs() < 1e-9 && (x.1 + 2.0 - y.1).abs() < 1e-9);
    }
    let (ra, rb) = (
        bounds_report(&g, Operator::Schrodinger, 6).unwrap(),
        bounds_report(&h, Operator::Schrodinger, 6).unwrap(),
    );
    assert!((ra.v_star - rb.v_star).abs() < 1e-12);
    assert!((ra.best_lower - rb.best_lower).abs() < 1e-9);
    assert_eq!(upper_bounds(&g), upper_bounds(&h));
}
