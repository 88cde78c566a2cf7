//! Periods of differentials on the cover, the normalized holomorphic basis,
//! the period matrix `Ω₋` and homological coordinates.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::curve::{CoverCurve, HyperellipticCurve};
use crate::cycles::CycleSystem;
use crate::error::{Error, Result};
use crate::C64;

pub const MAX_CONDITION: f64 = 1e12;

type Custom = Arc<dyn Fn(C64, C64) -> C64 + Send + Sync>;

/// A meromorphic differential `h(x, y) dx` on the cover.
#[derive(Clone)]
pub enum DifferentialSpec {
    /// `x^k dx / y`.
    Holomorphic(usize),
    /// `v = √c · y dx / Π(x − p_j)`.
    AbelianV,
    Custom(Custom),
}

impl std::fmt::Debug for DifferentialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Holomorphic(k) => write!(f, "Holomorphic({k})"),
            Self::AbelianV => write!(f, "AbelianV"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl DifferentialSpec {
    pub fn eval(&self, cover: &CoverCurve, x: C64, y: C64) -> C64 {
        match self {
            Self::Holomorphic(k) => x.powu(*k as u32) / y,
            Self::AbelianV => cover.sqrt_c() * y / cover.pole_poly(x),
            Self::Custom(h) => h(x, y),
        }
    }
}

/// Which cycle of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    Alpha(usize),
    Beta(usize),
}

/// Period of one differential over one basis cycle.
pub fn period(cover: &CoverCurve, cycles: &CycleSystem, diff: &DifferentialSpec, cycle: Cycle, tol: f64) -> Result<C64> {
    let (combo, g) = match cycle {
        Cycle::Alpha(i) => (cycles.alpha.get(i), i),
        Cycle::Beta(i) => (cycles.beta.get(i), i),
    };
    let combo = combo.ok_or(Error::DimensionMismatch { expected: cycles.genus, actual: g + 1 })?;
    let f = |x: C64, y: C64| vec![diff.eval(cover, x, y)];
    let mut total = C64::new(0.0, 0.0);
    for (coef, l) in combo.iter().zip(&cycles.loops) {
        if *coef != 0 {
            let (v, _) = l.integrate(&cover.curve, 1, &f, tol)?;
            total += v[0] * *coef as f64;
        }
    }
    Ok(total)
}

/// `(x^k / y)_{k<g}`.
pub fn holomorphic_values(g: usize, x: C64, y: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(g);
    let mut p = y.inv();
    for _ in 0..g {
        out.push(p);
        p *= x;
    }
    out
}

fn to_matrix(rows: &[Vec<C64>]) -> DMatrix<C64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

/// Normalized differentials `u_l = Σ_k G_{kl} x^k dx/y` with `∮_{α_j} u_l = δ_{jl}`.
#[derive(Debug, Clone)]
pub struct NormalizedBasis {
    /// `W_{kl} = ∮_{α_l} x^k dx/y`.
    pub raw_alpha: DMatrix<C64>,
    /// `V_{kl} = ∮_{β_l} x^k dx/y`.
    pub raw_beta: DMatrix<C64>,
    pub change: DMatrix<C64>,
    pub omega: DMatrix<C64>,
    pub condition: f64,
}

pub fn normalized_basis(curve: &HyperellipticCurve, cycles: &CycleSystem, tol: f64) -> Result<NormalizedBasis> {
    let g = curve.genus();
    let f = |x: C64, y: C64| holomorphic_values(g, x, y);
    let (alpha, beta) = cycles.periods(curve, g, &f, tol)?;
    // rows of `alpha` are cycles, columns differentials
    let raw_alpha = to_matrix(&alpha).transpose();
    let raw_beta = to_matrix(&beta).transpose();
    let sv = raw_alpha.clone().svd(false, false).singular_values;
    let condition = sv.max() / sv.min();
    if !(condition < MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let change = raw_alpha.transpose().try_inverse().ok_or_else(|| Error::Singular("alpha-period matrix".into()))?;
    let omega = raw_beta.transpose() * &change;
    Ok(NormalizedBasis { raw_alpha, raw_beta, change, omega, condition })
}

impl NormalizedBasis {
    pub fn genus(&self) -> usize {
        self.omega.nrows()
    }

    /// Coefficients `u_l(x)` in the `x` chart at the point `(x, y)`.
    pub fn u(&self, x: C64, y: C64) -> DVector<C64> {
        let raw = DVector::from_vec(holomorphic_values(self.genus(), x, y));
        self.change.transpose() * raw
    }

    /// `max |Ω − Ωᵗ|`.
    pub fn symmetry_defect(&self) -> f64 {
        (&self.omega - self.omega.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the symmetrized `Im Ω`.
    pub fn im_min_eigenvalue(&self) -> f64 {
        let im = self.omega.map(|z| z.im);
        let sym = (&im + im.transpose()) * 0.5;
        sym.symmetric_eigen().eigenvalues.min()
    }
}

/// `(∮_{α_i} v, ∮_{β_i} v)`, flattened as α then β.
pub fn homological_coordinates(cover: &CoverCurve, cycles: &CycleSystem, tol: f64) -> Result<Vec<C64>> {
    let f = |x: C64, y: C64| vec![cover.sqrt_c() * y / cover.pole_poly(x)];
    let (a, b) = cycles.periods(&cover.curve, 1, &f, tol)?;
    Ok(a.iter().chain(&b).map(|v| v[0]).collect())
}

/// Arithmetic–geometric mean of positive reals.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    while (a - b).abs() > 1e-16 * a {
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_cover, QdConfig};
    use crate::cycles::build_cycles;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn elliptic_alpha_period_against_agm() {
        let cur = HyperellipticCurve::new(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let cyc = build_cycles(&cur).unwrap();
        let (a, _) = cyc.periods(&cur, 1, &|x: C64, y: C64| holomorphic_values(1, x, y), 1e-13).unwrap();
        let expect = 2.0 * std::f64::consts::PI / agm(2f64.sqrt(), 1.0);
        assert!((a[0][0].norm() - expect).abs() < 1e-10, "{} vs {expect}", a[0][0]);
    }

    #[test]
    fn n5_riemann_relations() {
        let cfg = QdConfig::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let cov = build_cover(&cfg).unwrap();
        let cyc = build_cycles(&cov.curve).unwrap();
        let nb = normalized_basis(&cov.curve, &cyc, 1e-12).unwrap();
        assert!(nb.symmetry_defect() < 1e-8, "{}", nb.symmetry_defect());
        assert!(nb.im_min_eigenvalue() > 0.0, "{}", nb.omega);
        let p = period(&cov, &cyc, &DifferentialSpec::Custom(Arc::new({
            let nb = nb.clone();
            move |x, y| nb.u(x, y)[1]
        })), Cycle::Alpha(1), 1e-12)
        .unwrap();
        assert!((p - 1.0).norm() < 1e-9);
    }

    #[test]
    fn coordinates_scale_with_root_of_c() {
        let mut cfg = QdConfig::new(vec![c(0.1, 0.2)], vec![c(1.0, 0.3), c(-1.0, 0.0), c(2.0, -0.5), c(-2.0, 1.0), c(0.5, -1.0)], c(0.7, 0.2)).unwrap();
        let cov = build_cover(&cfg).unwrap();
        let cyc = build_cycles(&cov.curve).unwrap();
        let a = homological_coordinates(&cov, &cyc, 1e-13).unwrap();
        cfg.scale *= 4.0;
        let cov4 = build_cover(&cfg).unwrap();
        let b = homological_coordinates(&cov4, &cyc, 1e-13).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y / x - 2.0).norm() < 1e-12);
        }
    }
}
