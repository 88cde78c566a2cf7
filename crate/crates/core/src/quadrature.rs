//! Adaptive Gauss–Legendre quadrature for vector-valued complex integrands
//! along straight segments of the complex plane.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::C64;

const ORDER: usize = 20;
const MAX_INTERVALS: usize = 20_000;

/// Nodes and weights on `[-1, 1]`, found by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

static RULE: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(ORDER));

/// Counters reported alongside an integral.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct QuadStats {
    pub intervals: usize,
    pub evaluations: usize,
    pub error_estimate: f64,
}

impl QuadStats {
    pub fn merge(&mut self, other: &QuadStats) {
        self.intervals += other.intervals;
        self.evaluations += other.evaluations;
        self.error_estimate += other.error_estimate;
    }
}

/// Rule value and `∫|f|` estimate (largest component).
fn rule<F: Fn(C64) -> Vec<C64>>(f: &F, a: C64, b: C64, dim: usize) -> (Vec<C64>, f64) {
    let (nodes, weights) = &*RULE;
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    let mut mag = vec![0.0; dim];
    for (x, w) in nodes.iter().zip(weights) {
        let vals = f(mid + half * *x);
        for ((s, m), v) in acc.iter_mut().zip(mag.iter_mut()).zip(vals) {
            *s += v * *w;
            *m += v.norm() * *w;
        }
    }
    acc.iter_mut().for_each(|s| *s *= half);
    (acc, mag.into_iter().fold(0.0, f64::max) * half.norm())
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `∫_a^b f(x) dx` along the segment, each component to absolute accuracy `tol`.
pub fn integrate_segment<F: Fn(C64) -> Vec<C64>>(f: &F, a: C64, b: C64, dim: usize, tol: f64) -> Result<(Vec<C64>, QuadStats)> {
    let total = (b - a).norm();
    let mut stats = QuadStats::default();
    let mut result = vec![C64::new(0.0, 0.0); dim];
    if total == 0.0 {
        return Ok((result, stats));
    }
    let (whole, _) = rule(f, a, b, dim);
    stats.evaluations += ORDER;
    let mut stack = vec![(a, b, whole)];
    while let Some((lo, hi, est)) = stack.pop() {
        let mid = (lo + hi) * 0.5;
        let (left, ml) = rule(f, lo, mid, dim);
        let (right, mr) = rule(f, mid, hi, dim);
        stats.evaluations += 2 * ORDER;
        let refined: Vec<C64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        let err = max_diff(&est, &refined);
        let local_tol = tol * (hi - lo).norm() / total;
        if err <= local_tol.max(64.0 * f64::EPSILON * (ml + mr)) {
            for (s, v) in result.iter_mut().zip(refined) {
                *s += v;
            }
            stats.intervals += 1;
            stats.error_estimate += err;
            continue;
        }
        if stats.intervals + stack.len() > MAX_INTERVALS || (hi - lo).norm() < 1e-12 * total {
            return Err(Error::Quadrature { achieved: err, target: local_tol });
        }
        stack.push((lo, mid, left));
        stack.push((mid, hi, right));
    }
    if result.iter().any(|z| !z.is_finite()) {
        return Err(Error::Quadrature { achieved: f64::INFINITY, target: tol });
    }
    Ok((result, stats))
}

/// Scalar convenience wrapper over a real interval.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let g = |z: C64| vec![C64::new(f(z.re), 0.0)];
    let (v, _) = integrate_segment(&g, C64::new(a, 0.0), C64::new(b, 0.0), 1, tol)?;
    Ok(v[0].re)
}
