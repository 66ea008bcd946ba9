//! Small helpers for integer lattice vectors and phases.

use std::f64::consts::PI;

/// Integer vector in Z^d.
pub type LatticeVec = Vec<i64>;

pub fn zero(dim: usize) -> LatticeVec {
    vec![0; dim]
}

pub fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

pub fn negate(v: &[i64]) -> LatticeVec {
    v.iter().map(|x| -x).collect()
}

pub fn add_into(acc: &mut [i64], v: &[i64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

pub fn sub_from(acc: &mut [i64], v: &[i64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a -= b;
    }
}

pub fn norm(v: &[i64]) -> f64 {
    (v.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt()
}

pub fn dot(m: &[i64], k: &[f64]) -> f64 {
    m.iter().zip(k).map(|(&a, &b)| a as f64 * b).sum()
}

pub fn component_sum(v: &[i64]) -> i64 {
    v.iter().sum()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An index is primitive when it is not an integer multiple `q·m'` with `q >= 2`.
pub fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0, |g, &x| gcd(g, x)) == 1
}

/// Reduce an angle to (-π, π].
pub fn wrap_phase(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    // rem_euclid can land exactly on 2π for tiny negative inputs
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

/// Comma-joined rendering used in census and trace tables.
pub fn format_index(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
