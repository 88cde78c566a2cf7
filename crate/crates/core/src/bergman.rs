//! The Bergman bidifferential `B̂` of a hyperelliptic curve, its split into
//! `μ`-even and `μ`-odd parts, and the associated projective connections.
//!
//! `B̂ = B₀ + Σ c_{jk} ω_j(P) ω_k(Q)` with `ω_j = x^j dx / y` and the algebraic kernel
//! `B₀ = (2 y_x y_w + F(x, w)) / (4 (x − w)² y_x y_w) dx dw`, where `F` is the
//! symmetric polynomial with `F(x, x) = 2 f(x)` built from the even and odd
//! coefficients of `f`. The α-periods of `B₀` reduce exactly to periods of
//! holomorphic differentials, which fixes `c`.

use nalgebra::{DMatrix, DVector};

use crate::curve::{fmt_c, CoverPoint, HyperellipticCurve};
use crate::cycles::CycleSystem;
use crate::error::{Error, Result};
use crate::exact::RationalMatrix;
use crate::homology::{blocks, to_complex};
use crate::periods::{holomorphic_values, normalized_basis, NormalizedBasis};
use crate::C64;

/// Finite-difference step as a fraction of the distance to the nearest branch point.
const FD_STEP: f64 = 0.05;
const TWO_PI_I: C64 = C64::new(0.0, 2.0 * std::f64::consts::PI);

/// Coefficients `F_i(w)` of `F(x, w) = Σ_i F_i(w) x^i`.
pub fn kernel_coeffs(f: &[C64], w: C64) -> Vec<C64> {
    let m = (f.len() - 1).div_ceil(2);
    let a = |i: usize| f.get(i).copied().unwrap_or_default();
    let mut out = vec![C64::new(0.0, 0.0); m + 1];
    let mut wk = C64::new(1.0, 0.0);
    for k in 0..=m {
        out[k] += a(2 * k) * wk * 2.0;
        if k < m {
            out[k + 1] += a(2 * k + 1) * wk;
            out[k] += a(2 * k + 1) * wk * w;
        }
        wk *= w;
    }
    out
}

/// `F(x, w)`.
pub fn kernel_poly(f: &[C64], x: C64, w: C64) -> C64 {
    kernel_coeffs(f, w).iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// `∂²F/∂w²` on the diagonal.
pub fn kernel_ww_diagonal(f: &[C64], x: C64) -> C64 {
    let m = (f.len() - 1).div_ceil(2);
    let a = |i: usize| f.get(i).copied().unwrap_or_default();
    let mut s = C64::new(0.0, 0.0);
    for k in 1..=m {
        let kf = k as f64;
        s += a(2 * k) * (2.0 * kf * (kf - 1.0)) * x.powi(2 * k as i32 - 2);
        if k < m || 2 * k + 1 < f.len() {
            s += a(2 * k + 1) * (2.0 * kf * kf) * x.powi(2 * k as i32 - 1);
        }
    }
    s
}

/// Coefficients in `x` of `[F(x, w) − 2f(w) − f′(w)(x − w)] / (x − w)²`.
pub fn reduced_kernel(f: &[C64], w: C64, g: usize) -> Vec<C64> {
    let mut num = kernel_coeffs(f, w);
    let (fw, dfw, _) = crate::curve::poly_eval(f, w);
    num[0] -= fw * 2.0 - dfw * w;
    if num.len() > 1 {
        num[1] -= dfw;
    }
    for _ in 0..2 {
        // synthetic division by (x − w), dropping the vanishing remainder
        let d = num.len() - 1;
        let mut q = vec![C64::new(0.0, 0.0); d];
        let mut carry = C64::new(0.0, 0.0);
        for i in (1..=d).rev() {
            carry = num[i] + carry * w;
            q[i - 1] = carry;
        }
        num = q;
    }
    num.resize(g, C64::new(0.0, 0.0));
    num
}

/// Values of the projective connections at a point, in the `x` chart.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProjectiveConnections {
    /// `S_{B̂}` by Richardson-extrapolated finite differences of the diagonal expansion.
    pub s_hat: C64,
    pub s_plus: C64,
    pub s_minus: C64,
    /// `S_{B̂}` from the closed-form diagonal expansion.
    pub s_hat_analytic: C64,
}

/// `B̂` together with the normalized basis it was built from.
#[derive(Debug, Clone)]
pub struct BergmanEvaluator {
    pub curve: HyperellipticCurve,
    pub basis: NormalizedBasis,
    /// Correction over `ω_j = x^j dx / y`.
    pub correction: DMatrix<C64>,
    /// `max |c − cᵗ| / max |c|`.
    pub asymmetry: f64,
}

pub fn build_bergman(curve: &HyperellipticCurve, cycles: &CycleSystem, tol: f64) -> Result<BergmanEvaluator> {
    let basis = normalized_basis(curve, cycles, tol)?;
    let g = curve.genus();
    let f = curve.coeffs();
    let integrand = |w: C64, y: C64| {
        let yi = y.inv() * 0.25;
        reduced_kernel(f, w, g).into_iter().map(|r| r * yi).collect::<Vec<_>>()
    };
    let (alpha, _) = cycles.periods(curve, g, &integrand, tol)?;
    let e = DMatrix::from_fn(g, g, |j, l| alpha[l][j]);
    let w_inv = basis.raw_alpha.clone().try_inverse().ok_or_else(|| Error::Singular("alpha-period matrix".into()))?;
    let correction = -(e * w_inv);
    let scale = correction.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let asymmetry = if scale == 0.0 {
        0.0
    } else {
        (&correction - correction.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
    };
    Ok(BergmanEvaluator { curve: curve.clone(), basis, correction, asymmetry })
}

impl BergmanEvaluator {
    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    fn raw(&self, p: &CoverPoint) -> DVector<C64> {
        DVector::from_vec(holomorphic_values(self.genus(), p.x, p.y))
    }

    /// `B₀(P, Q)` in the `x` charts.
    pub fn b0(&self, p: &CoverPoint, q: &CoverPoint) -> C64 {
        let f = self.curve.coeffs();
        let h = p.x - q.x;
        (p.y * q.y * 2.0 + kernel_poly(f, p.x, q.x)) / (h * h * p.y * q.y * 4.0)
    }

    /// `B̂(P, Q)` in the `x` charts.
    pub fn evaluate(&self, p: &CoverPoint, q: &CoverPoint) -> Result<C64> {
        if p.x == q.x {
            return Err(Error::SingularPoint(format!("B̂ evaluated over a single x = {}", fmt_c(p.x))));
        }
        let corr = (self.raw(p).transpose() * &self.correction * self.raw(q))[(0, 0)];
        Ok(self.b0(p, q) + corr)
    }

    /// `(B₊, B₋) = (B̂(P, Q) + B̂(P, μQ), B̂(P, Q) − B̂(P, μQ))`.
    pub fn split(&self, p: &CoverPoint, q: &CoverPoint) -> Result<(C64, C64)> {
        let a = self.evaluate(p, q)?;
        let b = self.evaluate(p, &q.involution())?;
        Ok((a + b, a - b))
    }

    fn diagonal_correction(&self, x: C64) -> C64 {
        let g = self.genus();
        let mut s = C64::new(0.0, 0.0);
        for j in 0..g {
            for k in 0..g {
                s += self.correction[(j, k)] * x.powu((j + k) as u32);
            }
        }
        s
    }

    fn h2(&self, x: C64) -> (C64, C64) {
        let (f, df, ddf) = self.curve.f_derivs(x);
        (kernel_ww_diagonal(self.curve.coeffs(), x) - ddf + df * df / (f * 2.0), f)
    }

    /// Coefficient of `B̂(P, μP)`; the same on both sheets.
    pub fn at_involution(&self, x: C64) -> C64 {
        let (h2, f) = self.h2(x);
        -(h2 / (f * 8.0)) - self.diagonal_correction(x) / f
    }

    /// `S_{B̂}` from the closed-form diagonal expansion of `B₀` and the correction.
    pub fn s_hat_analytic(&self, x: C64) -> C64 {
        let (h2, f) = self.h2(x);
        h2 * 0.75 / f + self.diagonal_correction(x) * 6.0 / f
    }

    /// `S_{B̂}` at `P` by finite differences of `B̂(x + h, x − h) − 1/(4h²)`.
    pub fn s_hat_numeric(&self, p: &CoverPoint) -> Result<C64> {
        let d = self.curve.distance_to_branch(p.x);
        let scale = self.curve.branch_points().iter().map(|e| e.norm()).fold(1.0, f64::max);
        if d < 1e-6 * scale {
            return Err(Error::SingularPoint(format!("point {} is too close to a branch point; use a branch chart", fmt_c(p.x))));
        }
        let e = |h: f64| -> Result<C64> {
            let a = self.curve.continue_to(p, p.x + h);
            let b = self.curve.continue_to(p, p.x - h);
            Ok((self.evaluate(&a, &b)? - 0.25 / (h * h)) * 6.0)
        };
        let h = FD_STEP * d;
        let (e0, e1, e2) = (e(h)?, e(h / 2.0)?, e(h / 4.0)?);
        let r0 = (e1 * 4.0 - e0) / 3.0;
        let r1 = (e2 * 4.0 - e1) / 3.0;
        Ok((r1 * 16.0 - r0) / 15.0)
    }

    /// `S_{B̂}`, and `S_{B±} = S_{B̂} ± 6 B̂(P, μP)`.
    pub fn projective_connections(&self, p: &CoverPoint) -> Result<ProjectiveConnections> {
        let s_hat = self.s_hat_numeric(p)?;
        let mu = self.at_involution(p.x) * 6.0;
        Ok(ProjectiveConnections { s_hat, s_plus: s_hat + mu, s_minus: s_hat - mu, s_hat_analytic: self.s_hat_analytic(p.x) })
    }

    /// `(CΩ + D)⁻¹ C` for the cycle change `β' = Aβ + Bα`, `α' = Cβ + Dα`.
    pub fn sigma_kernel(&self, sigma: &RationalMatrix) -> Result<DMatrix<C64>> {
        let g = self.genus();
        if sigma.rows() != 2 * g {
            return Err(Error::DimensionMismatch { expected: 2 * g, actual: sigma.rows() });
        }
        let (_, _, c, d) = blocks(sigma);
        let c = to_complex(&c);
        let m = &c * &self.basis.omega + to_complex(&d);
        let inv = m.try_inverse().ok_or_else(|| Error::Singular("C·Omega + D".into()))?;
        Ok(inv * c)
    }

    /// `B̂^σ(P, Q) = B̂(P, Q) − 2πi u(P)ᵗ (CΩ + D)⁻¹ C u(Q)`.
    pub fn sigma_transform(&self, sigma: &RationalMatrix, p: &CoverPoint, q: &CoverPoint) -> Result<C64> {
        let k = self.sigma_kernel(sigma)?;
        let up = self.basis.u(p.x, p.y);
        let uq = self.basis.u(q.x, q.y);
        Ok(self.evaluate(p, q)? - TWO_PI_I * (up.transpose() * k * uq)[(0, 0)])
    }
}

/// Schwarzian chart change to the branch chart `x = b + s²`.
pub fn to_branch_chart(s_x: C64, s: C64) -> C64 {
    s_x * (s * 2.0) * (s * 2.0) - (s * s).inv() * 1.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::build_cycles;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> (HyperellipticCurve, CycleSystem) {
        let pts = [c(0.0, 0.0), c(1.0, 0.2), c(-1.0, 0.1), c(2.0, -0.3), c(-2.0, 0.4), c(0.5, 1.0)];
        let cur = HyperellipticCurve::new(&pts).unwrap();
        let cyc = build_cycles(&cur).unwrap();
        (cur, cyc)
    }

    #[test]
    fn kernel_diagonal_is_twice_f() {
        let (cur, _) = sample();
        for x in [c(0.3, 0.1), c(-2.0, 1.5)] {
            assert!((kernel_poly(cur.coeffs(), x, x) - cur.f(x) * 2.0).norm() < 1e-12);
            let h = 1e-4;
            let fd = (kernel_poly(cur.coeffs(), x, x + h) - kernel_poly(cur.coeffs(), x, x) * 2.0 + kernel_poly(cur.coeffs(), x, x - h)) / (h * h);
            assert!((fd - kernel_ww_diagonal(cur.coeffs(), x)).norm() < 1e-6 * fd.norm(), "{fd} {}", kernel_ww_diagonal(cur.coeffs(), x));
        }
        // odd degree
        let f = crate::curve::poly_from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let x = c(0.7, 0.2);
        assert!((kernel_poly(&f, x, x) - crate::curve::poly_eval(&f, x).0 * 2.0).norm() < 1e-12);
    }

    #[test]
    fn reduced_kernel_identity() {
        let (cur, _) = sample();
        let (x, w) = (c(0.3, -0.4), c(1.1, 0.6));
        let r = reduced_kernel(cur.coeffs(), w, cur.genus());
        let rx = r.iter().rev().fold(c(0.0, 0.0), |a, k| a * x + k);
        let (fw, dfw, _) = cur.f_derivs(w);
        let lhs = kernel_poly(cur.coeffs(), x, w) - fw * 2.0 - dfw * (x - w);
        assert!((lhs - rx * (x - w) * (x - w)).norm() < 1e-12);
    }

    #[test]
    fn alpha_periods_vanish_and_symmetry() {
        let (cur, cyc) = sample();
        let b = build_bergman(&cur, &cyc, 1e-12).unwrap();
        assert!(b.asymmetry < 1e-8, "{}", b.asymmetry);
        let p = cur.point(c(0.2, 2.0), 1.0);
        let f = |w: C64, y: C64| vec![b.evaluate(&p, &CoverPoint { x: w, y }).unwrap()];
        let (alpha, beta) = cyc.periods(&cur, 1, &f, 1e-12).unwrap();
        for a in &alpha {
            assert!(a[0].norm() < 1e-8, "{}", a[0]);
        }
        let u = b.basis.u(p.x, p.y);
        for (k, bk) in beta.iter().enumerate() {
            assert!((bk[0] - TWO_PI_I * u[k]).norm() < 1e-8, "{} vs {}", bk[0], TWO_PI_I * u[k]);
        }
        let q = cur.point(c(-1.3, -0.8), -1.0);
        let (pq, qp) = (b.evaluate(&p, &q).unwrap(), b.evaluate(&q, &p).unwrap());
        assert!((pq - qp).norm() < 1e-8 * pq.norm());
    }

    #[test]
    fn plus_part_is_sphere_kernel_and_involution_invariance() {
        let (cur, cyc) = sample();
        let b = build_bergman(&cur, &cyc, 1e-12).unwrap();
        let p = cur.point(c(0.7, -0.6), -1.0);
        let q = cur.point(c(-0.4, 1.3), 1.0);
        let (bp, bm) = b.split(&p, &q).unwrap();
        let h = p.x - q.x;
        assert!((bp * h * h - 1.0).norm() < 1e-12);
        let (bp2, bm2) = b.split(&p, &q.involution()).unwrap();
        assert!((bp2 - bp).norm() < 1e-12 && (bm2 + bm).norm() < 1e-12);
        let mu = b.evaluate(&p.involution(), &q.involution()).unwrap();
        assert!((mu - b.evaluate(&p, &q).unwrap()).norm() < 1e-12);
        assert!(b.split(&p, &p).is_err());
    }

    #[test]
    fn projective_connections_agree() {
        let (cur, cyc) = sample();
        let b = build_bergman(&cur, &cyc, 1e-12).unwrap();
        let p = cur.point(c(0.35, 0.55), 1.0);
        let s = b.projective_connections(&p).unwrap();
        assert!((s.s_hat - s.s_hat_analytic).norm() < 1e-6 * s.s_hat.norm().max(1.0), "{s:?}");
        assert!(s.s_plus.norm() < 1e-6 * s.s_hat.norm().max(1.0), "{s:?}");
        assert!((s.s_plus + s.s_minus - s.s_hat * 2.0).norm() < 1e-8);
    }

    #[test]
    fn branch_chart_cocycle() {
        let (cur, cyc) = sample();
        let bg = build_bergman(&cur, &cyc, 1e-12).unwrap();
        let e = cur.branch_points()[1];
        let s = c(0.2, 0.15);
        let p = cur.point(e + s * s, 1.0);
        let sx = bg.s_hat_analytic(p.x);
        // S in the s chart from finite differences of B̂ pulled back by x = e + s²
        let bs = |s1: C64, s2: C64| -> C64 {
            let a = cur.continue_to(&p, e + s1 * s1);
            let b = cur.continue_to(&p, e + s2 * s2);
            bg.evaluate(&a, &b).unwrap() * (s1 * 2.0) * (s2 * 2.0)
        };
        let ext = |h: f64| (bs(s + h, s - h) - 0.25 / (h * h)) * 6.0;
        let h = FD_STEP * s.norm();
        let (e0, e1, e2) = (ext(h), ext(h / 2.0), ext(h / 4.0));
        let r = (((e2 * 4.0 - e1) / 3.0) * 16.0 - (e1 * 4.0 - e0) / 3.0) / 15.0;
        let expect = to_branch_chart(sx, s);
        assert!((r - expect).norm() < 1e-6 * expect.norm(), "{r} vs {expect}");
    }
}
