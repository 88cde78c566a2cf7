//! The flat connections `ξ±` on strata of genus-0 quadratic differentials:
//! the differentials `φ±`, their periods, the Euler pairing, `dlog τ±` along
//! paths, degeneration exponents and the basis-change law.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bergman::{build_bergman, BergmanEvaluator};
use crate::curve::{build_cover_with_layout, CoverCurve, MarkedPoint, QdConfig};
use crate::cycles::{build_cycles_with, CycleOptions, CycleSystem};
use crate::error::{Error, Result};
use crate::exact::RationalMatrix;
use crate::homology::{blocks, to_complex};
use crate::quadrature::QuadStats;
use crate::strata::CollisionKind;
use crate::C64;

/// Which of the two connections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// Infinitesimal motion of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigTangent {
    pub zeros: Vec<C64>,
    pub poles: Vec<C64>,
    pub scale: C64,
}

impl ConfigTangent {
    pub fn zero(cfg: &QdConfig) -> Self {
        Self { zeros: vec![C64::default(); cfg.zeros.len()], poles: vec![C64::default(); cfg.poles.len()], scale: C64::default() }
    }

    pub fn moving(cfg: &QdConfig, point: MarkedPoint, velocity: C64) -> Self {
        let mut t = Self::zero(cfg);
        match point {
            MarkedPoint::Zero(i) => t.zeros[i] = velocity,
            MarkedPoint::Pole(i) => t.poles[i] = velocity,
        }
        t
    }

    pub fn scaling(cfg: &QdConfig) -> Self {
        Self { scale: cfg.scale, ..Self::zero(cfg) }
    }

    /// `cfg + h · self`.
    pub fn apply(&self, cfg: &QdConfig, h: f64) -> QdConfig {
        let mut out = cfg.clone();
        out.zeros.iter_mut().zip(&self.zeros).for_each(|(z, d)| *z += d * h);
        out.poles.iter_mut().zip(&self.poles).for_each(|(p, d)| *p += d * h);
        out.scale += self.scale * h;
        out
    }
}

/// `ξ± = Σ_i components_i · d(∫_{s_i} v)` over the coordinates `(∫_α v, ∫_β v)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionForm {
    pub sign: Sign,
    pub components: Vec<C64>,
}

impl ConnectionForm {
    /// Components `−∫_{s_i*} φ` with `{s_i*} = {β_i, −α_i}`.
    pub fn from_periods(sign: Sign, phi_alpha: &[C64], phi_beta: &[C64]) -> Self {
        let components = phi_beta.iter().map(|b| -b).chain(phi_alpha.iter().copied()).collect();
        Self { sign, components }
    }

    pub fn contract(&self, d_coords: &[C64]) -> C64 {
        self.components.iter().zip(d_coords).map(|(a, b)| a * b).sum()
    }
}

/// `ξ(E)` for the Euler field, which moves each coordinate by half its value.
pub fn euler_pairing(xi: &ConnectionForm, coords: &[C64]) -> C64 {
    xi.contract(coords) * 0.5
}

/// Everything computed on one configuration with one cycle basis.
#[derive(Debug, Clone)]
pub struct TauContext {
    pub cover: CoverCurve,
    pub cycles: CycleSystem,
    pub bergman: BergmanEvaluator,
    pub tol: f64,
}

/// Periods over the basis, `α` then `β`, of `v`, `φ₊`, `φ₋` and the tangent differentials.
#[derive(Debug, Clone)]
pub struct TauSample {
    pub coords: Vec<C64>,
    pub phi_plus: Vec<C64>,
    pub phi_minus: Vec<C64>,
    pub tangents: Vec<Vec<C64>>,
    pub stats: QuadStats,
}

impl TauSample {
    pub fn genus(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn phi(&self, sign: Sign) -> &[C64] {
        match sign {
            Sign::Plus => &self.phi_plus,
            Sign::Minus => &self.phi_minus,
        }
    }

    pub fn connection(&self, sign: Sign) -> ConnectionForm {
        let g = self.genus();
        let p = self.phi(sign);
        ConnectionForm::from_periods(sign, &p[..g], &p[g..])
    }

    pub fn euler(&self, sign: Sign) -> C64 {
        euler_pairing(&self.connection(sign), &self.coords)
    }

    /// `dlog τ±` along the `k`-th tangent.
    pub fn dlog_tau(&self, sign: Sign, k: usize) -> C64 {
        self.connection(sign).contract(&self.tangents[k])
    }
}

impl TauContext {
    pub fn new(cfg: &QdConfig, layout: &[MarkedPoint], opts: &CycleOptions) -> Result<Self> {
        let cover = build_cover_with_layout(cfg, layout)?;
        let cycles = build_cycles_with(&cover.curve, opts)?;
        Self::with_cycles(cover, cycles)
    }

    pub fn from_config(cfg: &QdConfig) -> Result<Self> {
        Self::new(cfg, &cfg.default_layout(), &CycleOptions::default())
    }

    pub fn with_cycles(cover: CoverCurve, cycles: CycleSystem) -> Result<Self> {
        let tol = cover.config.tolerance * 1e-2;
        let bergman = build_bergman(&cover.curve, &cycles, tol)?;
        Ok(Self { cover, cycles, bergman, tol })
    }

    /// The same configuration with the cycle basis changed by `σ`.
    pub fn transformed(&self, sigma: &RationalMatrix) -> Result<Self> {
        Self::with_cycles(self.cover.clone(), self.cycles.transform(sigma)?)
    }

    pub fn genus(&self) -> usize {
        self.cover.genus()
    }

    /// `S_{B±}` in the `x` chart; sheet independent.
    pub fn s_b(&self, sign: Sign, x: C64) -> C64 {
        let mu = self.bergman.at_involution(x) * 6.0;
        match sign {
            Sign::Plus => self.bergman.s_hat_analytic(x) + mu,
            Sign::Minus => self.bergman.s_hat_analytic(x) - mu,
        }
    }

    /// `φ± = −(2/(πi)) (S_{B±} − S_v) / v` at `(x, y)`.
    pub fn phi(&self, sign: Sign, x: C64, y: C64) -> Result<C64> {
        let sv = self.cover.schwarzian_v(x)?;
        let v = self.cover.sqrt_c() * y / self.cover.pole_poly(x);
        Ok(-(self.s_b(sign, x) - sv) / v / C64::new(0.0, PI / 2.0))
    }

    fn tangent_factor(&self, t: &ConfigTangent, x: C64) -> C64 {
        let cfg = &self.cover.config;
        let mut s = t.scale / cfg.scale * 0.5;
        for (z, dz) in cfg.zeros.iter().zip(&t.zeros) {
            s -= dz / (x - z) * 0.5;
        }
        for (p, dp) in cfg.poles.iter().zip(&t.poles) {
            s += dp / (x - p) * 0.5;
        }
        s
    }

    /// Periods of `v`, `φ±` and `∂v` along each tangent, in one quadrature pass.
    pub fn sample(&self, tangents: &[ConfigTangent]) -> Result<TauSample> {
        let cover = &self.cover;
        let dim = 3 + tangents.len();
        let f = |x: C64, y: C64| -> Vec<C64> {
            let v = cover.sqrt_c() * y / cover.pole_poly(x);
            let sv = cover.schwarzian_v(x).unwrap_or(C64::new(f64::NAN, 0.0));
            let k = -1.0 / C64::new(0.0, PI / 2.0) / v;
            let mut out = Vec::with_capacity(dim);
            out.push(v);
            out.push(k * (self.s_b(Sign::Plus, x) - sv));
            out.push(k * (self.s_b(Sign::Minus, x) - sv));
            out.extend(tangents.iter().map(|t| v * self.tangent_factor(t, x)));
            out
        };
        let (vals, stats) = self.cycles.loop_integrals(&cover.curve, dim, &f, self.tol)?;
        let (a, b) = self.cycles.cycle_periods(&vals);
        let col = |k: usize| -> Vec<C64> { a.iter().chain(&b).map(|r| r[k]).collect() };
        Ok(TauSample { coords: col(0), phi_plus: col(1), phi_minus: col(2), tangents: (0..tangents.len()).map(|k| col(3 + k)).collect(), stats })
    }

    /// `Ω` in this context's basis.
    pub fn omega(&self) -> &DMatrix<C64> {
        &self.bergman.basis.omega
    }
}

/// `(dlog τ₊, dlog τ₋)` per unit parameter at each sample of a path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub s: f64,
    pub dlog_tau_plus: C64,
    pub dlog_tau_minus: C64,
}

/// Samples `dlog τ±/ds` along `s ↦ path(s) = (config, velocity)`, keeping the
/// cut layout of the first sample so the cycle basis varies continuously.
pub fn dlog_tau_along<P>(path: P, params: &[f64], opts: &CycleOptions) -> Result<Vec<PathSample>>
where
    P: Fn(f64) -> (QdConfig, ConfigTangent) + Sync,
{
    use rayon::prelude::*;
    let first = path(*params.first().ok_or_else(|| Error::InvalidInput("empty path".into()))?).0;
    let layout = first.default_layout();
    params
        .par_iter()
        .map(|&s| {
            let (cfg, tangent) = path(s);
            let ctx = TauContext::new(&cfg, &layout, opts).map_err(|e| match e {
                Error::InvalidInput(m) | Error::Clearance(m) => Error::InvalidInput(format!("path leaves the stratum at s = {s}: {m}")),
                other => other,
            })?;
            let smp = ctx.sample(std::slice::from_ref(&tangent))?;
            Ok(PathSample { s, dlog_tau_plus: smp.dlog_tau(Sign::Plus, 0), dlog_tau_minus: smp.dlog_tau(Sign::Minus, 0) })
        })
        .collect()
}

/// `∮ dlog τ±` around `θ ↦ point + r·e^{iθ}` by the periodic trapezoid rule.
pub fn closed_loop_integral(cfg: &QdConfig, point: MarkedPoint, radius: f64, nodes: usize, opts: &CycleOptions) -> Result<(C64, C64)> {
    let centre = cfg.position(point);
    let path = |theta: f64| {
        let e = C64::from_polar(1.0, theta);
        let mut c = cfg.clone();
        match point {
            MarkedPoint::Zero(i) => c.zeros[i] = centre + e * radius,
            MarkedPoint::Pole(i) => c.poles[i] = centre + e * radius,
        }
        let t = ConfigTangent::moving(&c, point, C64::new(0.0, radius) * e);
        (c, t)
    };
    let params: Vec<f64> = (0..nodes).map(|k| 2.0 * PI * k as f64 / nodes as f64).collect();
    cfg.validate()?;
    let samples = dlog_tau_along(path, &params, opts)?;
    let w = 2.0 * PI / nodes as f64;
    Ok(samples.iter().fold((C64::default(), C64::default()), |(p, m), s| (p + s.dlog_tau_plus * w, m + s.dlog_tau_minus * w)))
}

/// A one-parameter collision of two marked points.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationFamily {
    pub kind: CollisionKind,
    pub base: QdConfig,
    /// For zero–pole: the zero that approaches the pole. For zero–zero: the first zero.
    pub moving: MarkedPoint,
    /// For zero–pole: the pole. For zero–zero: the second zero.
    pub anchor: MarkedPoint,
    /// Unit direction from the anchor (or from the second zero) to the moving point.
    pub direction: C64,
    pub schedule: Vec<f64>,
}

impl DegenerationFamily {
    /// Geometric schedule `d₁, d₁/2, …` down to `d₁·ratio`.
    pub fn geometric_schedule(d1: f64, ratio: f64) -> Vec<f64> {
        let mut out = vec![d1];
        while *out.last().expect("non-empty") > d1 * ratio * 1.0000001 {
            out.push(out.last().expect("non-empty") * 0.5);
        }
        out
    }

    /// Configuration at separation `d`, with the velocity `∂/∂d`.
    pub fn at(&self, d: f64) -> (QdConfig, ConfigTangent) {
        let mut cfg = self.base.clone();
        let dir = self.direction / self.direction.norm();
        let mut t = ConfigTangent::zero(&cfg);
        match self.kind {
            CollisionKind::ZeroPole => {
                let anchor = cfg.position(self.anchor);
                set(&mut cfg, self.moving, anchor + dir * d);
                t = ConfigTangent::moving(&cfg, self.moving, dir);
            }
            CollisionKind::ZeroZero => {
                let centre = (self.base.position(self.moving) + self.base.position(self.anchor)) * 0.5;
                set(&mut cfg, self.moving, centre + dir * (d / 2.0));
                set(&mut cfg, self.anchor, centre - dir * (d / 2.0));
                for (m, s) in [(self.moving, 0.5), (self.anchor, -0.5)] {
                    if let MarkedPoint::Zero(i) = m {
                        t.zeros[i] = dir * s;
                    }
                }
            }
        }
        (cfg, t)
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            CollisionKind::ZeroPole => matches!((self.moving, self.anchor), (MarkedPoint::Zero(_), MarkedPoint::Pole(_))),
            CollisionKind::ZeroZero => matches!((self.moving, self.anchor), (MarkedPoint::Zero(a), MarkedPoint::Zero(b)) if a != b),
        };
        if !ok {
            return Err(Error::InvalidInput(format!("marked points do not match a {:?} collision", self.kind)));
        }
        if self.schedule.len() < 4 {
            return Err(Error::InvalidInput("degeneration schedule needs at least four distances".into()));
        }
        Ok(())
    }
}

fn set(cfg: &mut QdConfig, m: MarkedPoint, x: C64) {
    match m {
        MarkedPoint::Zero(i) => cfg.zeros[i] = x,
        MarkedPoint::Pole(i) => cfg.poles[i] = x,
    }
}

/// One schedule point of a degeneration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerationSample {
    pub d: f64,
    /// `t = ∮ v` over the cycle around the colliding pair.
    pub t: C64,
    pub dlog_tau_plus: C64,
    pub dlog_tau_minus: C64,
    pub gamma_running_plus: C64,
    pub gamma_running_minus: C64,
}

/// Richardson extrapolation of a sequence sampled at `d, d/2, d/4, …`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolationFit {
    pub estimate: f64,
    pub order: f64,
    pub last_raw: f64,
    pub last_increment: f64,
}

pub fn richardson_tail(values: &[f64]) -> Result<ExtrapolationFit> {
    let n = values.len();
    if n < 3 {
        return Err(Error::Extrapolation("need at least three samples".into()));
    }
    let d1 = values[n - 2] - values[n - 3];
    let d2 = values[n - 1] - values[n - 2];
    let last_raw = values[n - 1];
    if d2 == 0.0 {
        return Ok(ExtrapolationFit { estimate: last_raw, order: f64::INFINITY, last_raw, last_increment: 0.0 });
    }
    let order = (d1 / d2).abs().log2();
    if !(order > 0.1) || !order.is_finite() {
        return Err(Error::Extrapolation(format!("samples do not converge geometrically: increments {d1:e}, {d2:e}")));
    }
    let estimate = last_raw + d2 / (2f64.powf(order) - 1.0);
    Ok(ExtrapolationFit { estimate, order, last_raw, last_increment: d2 })
}

/// Samples and the extrapolated exponents `γ± = lim d log τ± / d log t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerationResult {
    pub samples: Vec<DegenerationSample>,
    pub fit_plus: ExtrapolationFit,
    pub fit_minus: ExtrapolationFit,
}

impl DegenerationResult {
    pub fn gamma(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.fit_plus.estimate,
            Sign::Minus => self.fit_minus.estimate,
        }
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("t_abs,re_dlogtau_p,im_dlogtau_p,re_dlogtau_m,im_dlogtau_m,gamma_running_p,gamma_running_m\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                s.t.norm(),
                s.dlog_tau_plus.re,
                s.dlog_tau_plus.im,
                s.dlog_tau_minus.re,
                s.dlog_tau_minus.im,
                s.gamma_running_plus.re,
                s.gamma_running_minus.re
            ));
        }
        out
    }
}

/// Index of the α-cycle around the cut joining the colliding pair.
fn vanishing_alpha(layout: &[MarkedPoint], a: MarkedPoint, b: MarkedPoint, genus: usize) -> Result<usize> {
    let ia = layout.iter().position(|m| *m == a).expect("in layout");
    let ib = layout.iter().position(|m| *m == b).expect("in layout");
    let (lo, hi) = (ia.min(ib), ia.max(ib));
    if hi != lo + 1 || lo % 2 != 0 {
        return Err(Error::InvalidInput("the colliding pair does not share a branch cut in the sorted layout".into()));
    }
    let k = lo / 2;
    if k >= genus {
        return Err(Error::InvalidInput("the colliding pair sits on the last cut, which carries no α-cycle".into()));
    }
    Ok(k)
}

pub fn degeneration_exponent(family: &DegenerationFamily, opts: &CycleOptions) -> Result<DegenerationResult> {
    use rayon::prelude::*;
    family.validate()?;
    let layout = family.at(family.schedule[0]).0.default_layout();
    let samples: Result<Vec<DegenerationSample>> = family
        .schedule
        .par_iter()
        .map(|&d| {
            let (cfg, tangent) = family.at(d);
            if cfg.default_layout() != layout {
                return Err(Error::InvalidInput(format!("cut layout changes along the family at d = {d}")));
            }
            let ctx = TauContext::new(&cfg, &layout, opts)?;
            let k = vanishing_alpha(&layout, family.moving, family.anchor, ctx.genus())?;
            let smp = ctx.sample(std::slice::from_ref(&tangent))?;
            let t = smp.coords[k];
            let dt = smp.tangents[0][k];
            let (lp, lm) = (smp.dlog_tau(Sign::Plus, 0), smp.dlog_tau(Sign::Minus, 0));
            Ok(DegenerationSample { d, t, dlog_tau_plus: lp, dlog_tau_minus: lm, gamma_running_plus: t * lp / dt, gamma_running_minus: t * lm / dt })
        })
        .collect();
    let samples = samples?;
    let re = |f: fn(&DegenerationSample) -> C64| samples.iter().map(|s| f(s).re).collect::<Vec<_>>();
    let fit_plus = richardson_tail(&re(|s| s.gamma_running_plus))?;
    let fit_minus = richardson_tail(&re(|s| s.gamma_running_minus))?;
    Ok(DegenerationResult { samples, fit_plus, fit_minus })
}

/// Outcome of comparing `ξ₋^σ − ξ₋` with `48 · dlog det(C₋Ω₋ + D₋)` along a direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisChangeReport {
    pub lhs_minus: C64,
    pub rhs_minus: C64,
    pub plus_shift: C64,
    pub residual: f64,
}

/// `d/ds log det(CΩ(s) + D)` by a fourth-order central difference.
fn dlog_det(cfg: &QdConfig, layout: &[MarkedPoint], opts: &CycleOptions, dir: &ConfigTangent, sigma: &RationalMatrix, h: f64) -> Result<C64> {
    let (_, _, c, d) = blocks(sigma);
    let (c, d) = (to_complex(&c), to_complex(&d));
    let logdet = |s: f64| -> Result<C64> {
        let shifted = dir.apply(cfg, s);
        let cover = build_cover_with_layout(&shifted, layout)?;
        let cycles = build_cycles_with(&cover.curve, opts)?;
        let nb = crate::periods::normalized_basis(&cover.curve, &cycles, cfg.tolerance * 1e-2)?;
        Ok((&c * &nb.omega + &d).determinant())
    };
    let (m2, m1, p1, p2) = (logdet(-2.0 * h)?, logdet(-h)?, logdet(h)?, logdet(2.0 * h)?);
    let d0 = logdet(0.0)?;
    // ratios keep the logarithm on the principal branch near s = 0
    let l = |z: C64| (z / d0).ln();
    Ok((l(m2) - l(p2) + (l(p1) - l(m1)) * 8.0) / (12.0 * h))
}

pub fn basis_change_check(cfg: &QdConfig, sigma_minus: &RationalMatrix, dir: &ConfigTangent, opts: &CycleOptions) -> Result<BasisChangeReport> {
    let layout = cfg.default_layout();
    let ctx = TauContext::new(cfg, &layout, opts)?;
    let moved = ctx.transformed(sigma_minus)?;
    let base = ctx.sample(std::slice::from_ref(dir))?;
    let new = moved.sample(std::slice::from_ref(dir))?;
    let lhs_minus = new.dlog_tau(Sign::Minus, 0) - base.dlog_tau(Sign::Minus, 0);
    let plus_shift = new.dlog_tau(Sign::Plus, 0) - base.dlog_tau(Sign::Plus, 0);
    let scale = cfg.points().iter().map(|p| p.1.norm()).fold(1.0, f64::max);
    let rhs_minus = dlog_det(cfg, &layout, opts, dir, sigma_minus, 1e-3 * scale)? * 48.0;
    let residual = (lhs_minus - rhs_minus).norm().max(plus_shift.norm());
    Ok(BasisChangeReport { lhs_minus, rhs_minus, plus_shift, residual })
}

/// `|t| / d` for a zero at distance `d` from a pole, against `π |√c_eff|`.
pub fn transversality_ratio(family: &DegenerationFamily, d: f64, opts: &CycleOptions) -> Result<(f64, f64)> {
    let (cfg, _) = family.at(d);
    let layout = cfg.default_layout();
    let cover = build_cover_with_layout(&cfg, &layout)?;
    let cycles = build_cycles_with(&cover.curve, opts)?;
    let k = vanishing_alpha(&layout, family.moving, family.anchor, cover.genus())?;
    let coords = crate::periods::homological_coordinates(&cover, &cycles, cfg.tolerance * 1e-2)?;
    let pole = match family.anchor {
        MarkedPoint::Pole(j) => j,
        MarkedPoint::Zero(_) => return Err(Error::InvalidInput("transversality needs a zero–pole family".into())),
    };
    let skip = match family.moving {
        MarkedPoint::Zero(i) => Some(i),
        MarkedPoint::Pole(_) => None,
    };
    Ok((coords[k].norm() / d, PI * cfg.effective_scale(pole, skip).sqrt().norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn reference() -> QdConfig {
        let poles = vec![c(0.0, 0.0), C64::from_polar(1.0, 2.2), C64::from_polar(1.0, 3.5), C64::from_polar(1.0, 0.9), C64::from_polar(1.0, -0.8)];
        QdConfig::new(vec![c(0.45, 0.12)], poles, c(1.0, 0.5)).unwrap()
    }

    #[test]
    fn euler_pairing_gives_kappa() {
        let ctx = TauContext::from_config(&reference()).unwrap();
        let s = ctx.sample(&[]).unwrap();
        let (kp, km) = (s.euler(Sign::Plus), s.euler(Sign::Minus));
        assert!((kp - (-40.0 / 3.0)).norm() < 1e-4 * 40.0 / 3.0, "{kp}");
        assert!((km - (56.0 / 3.0)).norm() < 1e-4 * 56.0 / 3.0, "{km}");
    }

    #[test]
    fn euler_pairing_zero_zero_configuration() {
        let s = TauContext::from_config(&crate::suite::zero_zero_config()).unwrap().sample(&[]).unwrap();
        assert!((s.euler(Sign::Plus) + 44.0 / 3.0).norm() < 1e-8);
        assert!((s.euler(Sign::Minus) - 76.0 / 3.0).norm() < 1e-8);
    }

    #[test]
    fn scaling_path_derivative_is_kappa() {
        let cfg = reference();
        let path = |s: f64| {
            let mut moved = cfg.clone();
            moved.scale = cfg.scale * C64::from_polar(s.exp(), 0.4 * s);
            let mut t = ConfigTangent::zero(&moved);
            t.scale = moved.scale * c(1.0, 0.4);
            (moved, t)
        };
        // a complex rescaling e^{(1 + 0.4i)s} multiplies dlog τ by (1 + 0.4i)
        for smp in dlog_tau_along(path, &[0.0, 0.7], &CycleOptions::default()).unwrap() {
            assert!((smp.dlog_tau_plus / c(1.0, 0.4) + 40.0 / 3.0).norm() < 1e-8, "{smp:?}");
            assert!((smp.dlog_tau_minus / c(1.0, 0.4) - 56.0 / 3.0).norm() < 1e-8, "{smp:?}");
        }
    }

    #[test]
    fn closed_loop_vanishes() {
        let (p, m) = closed_loop_integral(&reference(), MarkedPoint::Pole(2), 0.05, 16, &CycleOptions::default()).unwrap();
        assert!(p.norm() < 1e-8 && m.norm() < 1e-8, "{p} {m}");
    }

    #[test]
    fn basis_change_by_standard_symplectic_form() {
        let j = crate::exact::symplectic_form(2);
        let cfg = reference();
        let dir = ConfigTangent::moving(&cfg, MarkedPoint::Pole(1), c(0.2, -0.1));
        let r = basis_change_check(&cfg, &j, &dir, &CycleOptions::default()).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        assert!(r.lhs_minus.norm() > 1e-3, "J should change ξ₋: {r:?}");
    }

    #[test]
    fn euler_pairing_is_basis_independent() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let ctx = TauContext::from_config(&reference()).unwrap();
        let sigma = crate::homology::random_integral_symplectic(2, 5, &mut rng);
        let s = ctx.transformed(&sigma).unwrap().sample(&[]).unwrap();
        assert!((s.euler(Sign::Plus) + 40.0 / 3.0).norm() < 1e-8);
        assert!((s.euler(Sign::Minus) - 56.0 / 3.0).norm() < 1e-8);
    }

    #[test]
    fn transversality_ratio_converges() {
        let fam = crate::suite::zero_pole_family();
        let (r, target) = transversality_ratio(&fam, 1e-4, &CycleOptions::default()).unwrap();
        assert!((r - target).abs() < 1e-3 * target, "{r} {target}");
    }

    #[test]
    fn richardson_recovers_limit() {
        let vals: Vec<f64> = (0..8).map(|k| 2.5 + 0.7 * 0.1f64.powi(k) + 0.2 * 0.01f64.powi(k)).collect();
        let fit = richardson_tail(&vals).unwrap();
        assert!((fit.estimate - 2.5).abs() < 1e-9, "{fit:?}");
    }
}
