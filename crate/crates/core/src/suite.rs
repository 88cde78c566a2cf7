//! Reference configurations and the acceptance checks, shared by the test
//! suite and the command-line driver.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bergman::build_bergman;
use crate::curve::{build_cover, CoverPoint, HyperellipticCurve, MarkedPoint, QdConfig};
use crate::cycles::{build_cycles, CycleOptions};
use crate::error::Result;
use crate::exact::{format_rational, int};
use crate::homology::random_integral_symplectic;
use crate::periods::{agm, holomorphic_values, normalized_basis};
use crate::picard::{
    class_dm, delta_inf_from_psi, lambda, phi, psi_sum, solve_principal, closed_form_classes, closed_form_expansions,
    verify_mumford_chain, DivisorClass, GeneratorBasis,
};
use crate::strata::{collision_exponents, kappa, principal_kappa, CollisionKind, StratumSignature};
use crate::tau::{
    basis_change_check, closed_loop_integral, degeneration_exponent, dlog_tau_along, transversality_ratio, ConfigTangent,
    DegenerationFamily, Sign, TauContext,
};
use crate::C64;

pub const SEED: u64 = 20_240_917;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `n = 5`: one zero near the pole at the origin, four poles on the unit circle.
pub fn reference_config() -> QdConfig {
    let poles = vec![c(0.0, 0.0), C64::from_polar(1.0, 2.2), C64::from_polar(1.0, 3.5), C64::from_polar(1.0, 0.9), C64::from_polar(1.0, -0.8)];
    QdConfig::new(vec![c(0.45, 0.12)], poles, c(1.0, 0.5)).expect("valid reference configuration")
}

/// `n = 6`: two zeros near the origin, two poles left and four right of them.
pub fn zero_zero_config() -> QdConfig {
    let poles = [2.0, 2.9, 0.3, 1.0, -0.4, -1.2].iter().map(|a| C64::from_polar(1.0, *a)).collect();
    QdConfig::new(vec![c(0.05, 0.02), c(-0.05, -0.02)], poles, c(0.8, -0.3)).expect("valid reference configuration")
}

pub fn zero_pole_family() -> DegenerationFamily {
    DegenerationFamily {
        kind: CollisionKind::ZeroPole,
        base: reference_config(),
        moving: MarkedPoint::Zero(0),
        anchor: MarkedPoint::Pole(0),
        direction: C64::from_polar(1.0, 0.3),
        schedule: DegenerationFamily::geometric_schedule(0.1, 1e-3),
    }
}

pub fn zero_zero_family() -> DegenerationFamily {
    DegenerationFamily {
        kind: CollisionKind::ZeroZero,
        base: zero_zero_config(),
        moving: MarkedPoint::Zero(0),
        anchor: MarkedPoint::Zero(1),
        direction: C64::from_polar(1.0, 0.3),
        schedule: DegenerationFamily::geometric_schedule(0.1, 1e-3),
    }
}

/// Random principal-stratum configuration whose default contours satisfy the
/// clearance rules; configurations that violate them are redrawn.
pub fn random_config<R: Rng>(rng: &mut R, n: usize) -> QdConfig {
    loop {
        let mut pts: Vec<C64> = Vec::new();
        while pts.len() < 2 * n - 4 {
            let z = C64::from_polar(2.0 * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
            if pts.iter().all(|p| (p - z).norm() > 0.3) {
                pts.push(z);
            }
        }
        let scale = C64::from_polar(0.5 + rng.gen::<f64>(), 2.0 * PI * rng.gen::<f64>());
        let poles = pts.split_off(n - 4);
        let Ok(cfg) = QdConfig::new(pts, poles, scale) else { continue };
        let Ok(cover) = build_cover(&cfg) else { continue };
        if build_cycles(&cover.curve).is_ok() {
            return cfg;
        }
    }
}

/// A random point of the curve at least `margin` away from the branch points.
pub fn random_point<R: Rng>(rng: &mut R, curve: &HyperellipticCurve, margin: f64) -> CoverPoint {
    loop {
        let x = c(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
        if curve.distance_to_branch(x) > margin {
            let sheet = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            return curve.point(x, sheet);
        }
    }
}

/// One acceptance check.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub metrics: Value,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!("[{}] criterion {} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.summary)
    }
}

fn finish(id: u8, name: &'static str, budget: f64, start: Instant, body: Result<(bool, String, Value)>) -> CriterionResult {
    let seconds = start.elapsed().as_secs_f64();
    let (passed, summary, metrics) = body.unwrap_or_else(|e| (false, format!("error: {e}"), Value::Null));
    let passed = passed && seconds <= budget;
    CriterionResult { id, name, passed, summary, seconds, budget_seconds: budget, metrics }
}

/// Exact Picard relations for every `g ≤ 5`, `n ≤ 5`, `2g + n > 3`.
pub fn criterion_exact_picard() -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let mut checked = 0;
        let mut failures = Vec::new();
        for g in 0..=5usize {
            for n in 0..=5usize {
                if 2 * g + n <= 3 {
                    continue;
                }
                let basis = GeneratorBasis::new(g, n)?;
                let sol = solve_principal(g, n)?;
                let (le, pe) = closed_form_expansions(g, n);
                let (lc, pc) = closed_form_classes(&basis, &sol.delta0, &sol.delta_inf)?;
                let (gi, ni) = (g as i64, n as i64);
                let delta0 = DivisorClass::combination(
                    &basis,
                    &[
                        (int(72), &lambda(&basis)),
                        (int(4), &psi_sum(&basis)),
                        (int(-(10 * (gi - 1) + 2 * ni)), &phi(&basis)),
                        (int(-6), &class_dm(&basis)),
                    ],
                )?;
                let ok = sol.lambda_expansion == le
                    && sol.prym_expansion == pe
                    && lc == sol.lambda
                    && pc == sol.prym
                    && verify_mumford_chain(&basis)?.all_zero()
                    && sol.delta_inf == delta_inf_from_psi(&basis)
                    && sol.delta0 == delta0;
                if !ok {
                    failures.push(format!("({g},{n})"));
                }
                checked += 1;
            }
        }
        Ok((failures.is_empty(), format!("{checked} (g, n) pairs exact, failures: {failures:?}"), json!({ "pairs": checked, "failures": failures })))
    })();
    finish(1, "exact-picard", 1.0, start, body)
}

/// `κ±` of principal signatures and the collision exponents.
pub fn criterion_kappa() -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let mut mismatches = Vec::new();
        let mut checked = 0;
        for g in 0..=10usize {
            for n in 0..=10usize {
                if 2 * g + n <= 3 {
                    continue;
                }
                let sig = StratumSignature::principal(g, n)?;
                if kappa(&sig) != principal_kappa(g, n)? {
                    mismatches.push(format!("({g},{n})"));
                }
                checked += 1;
            }
        }
        let zp = collision_exponents(CollisionKind::ZeroPole);
        let zz = collision_exponents(CollisionKind::ZeroZero);
        let exps = [&zp.gamma_plus, &zp.gamma_minus, &zz.gamma_plus, &zz.gamma_minus].map(format_rational);
        let ok = mismatches.is_empty() && exps == ["-8/3", "40/3", "2/3", "26/3"];
        Ok((ok, format!("{checked} signatures exact; zero-pole ({}, {}), zero-zero ({}, {})", exps[0], exps[1], exps[2], exps[3]), json!({ "pairs": checked, "mismatches": mismatches, "exponents": exps })))
    })();
    finish(2, "kappa-consistency", 1.0, start, body)
}

/// AGM cross-check and Riemann relations on random `n = 5` configurations.
pub fn criterion_periods(samples: usize) -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let cur = HyperellipticCurve::new(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)])?;
        let cyc = build_cycles(&cur)?;
        let (a, _) = cyc.periods(&cur, 1, &|x: C64, y: C64| holomorphic_values(1, x, y), 1e-13)?;
        let agm_defect = (a[0][0].norm() - 2.0 * PI / agm(2f64.sqrt(), 1.0)).abs();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst_sym: f64 = 0.0;
        let mut worst_eig = f64::INFINITY;
        for _ in 0..samples {
            let cfg = random_config(&mut rng, 5);
            let cover = build_cover(&cfg)?;
            let cyc = build_cycles(&cover.curve)?;
            let nb = normalized_basis(&cover.curve, &cyc, cfg.tolerance * 1e-2)?;
            worst_sym = worst_sym.max(nb.symmetry_defect());
            worst_eig = worst_eig.min(nb.im_min_eigenvalue());
        }
        let ok = agm_defect <= 1e-10 && worst_sym < 1e-8 && worst_eig > 0.0;
        Ok((
            ok,
            format!("AGM defect {agm_defect:.2e}; {samples} configs: max symmetry defect {worst_sym:.2e}, min eig Im Ω {worst_eig:.3e}"),
            json!({ "agm_defect": agm_defect, "configs": samples, "max_symmetry_defect": worst_sym, "min_im_eigenvalue": worst_eig }),
        ))
    })();
    finish(3, "period-engine", 60.0, start, body)
}

/// Pullback, normalization and projective-connection identities of `B̂`.
pub fn criterion_bergman(pairs: usize) -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let cfg = reference_config();
        let cover = build_cover(&cfg)?;
        let cyc = build_cycles(&cover.curve)?;
        let b = build_bergman(&cover.curve, &cyc, cfg.tolerance * 1e-2)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
        let (mut pull, mut sym) = (0.0f64, 0.0f64);
        for _ in 0..pairs {
            let p = random_point(&mut rng, &cover.curve, 0.05);
            let q = random_point(&mut rng, &cover.curve, 0.05);
            if (p.x - q.x).norm() < 1e-3 {
                continue;
            }
            let (bp, _) = b.split(&p, &q)?;
            let exact = (p.x - q.x).powi(-2);
            pull = pull.max((bp - exact).norm() / exact.norm());
            let (pq, qp) = (b.evaluate(&p, &q)?, b.evaluate(&q, &p)?);
            sym = sym.max((pq - qp).norm() / pq.norm());
        }
        let mut norm_defect = 0.0f64;
        for _ in 0..5 {
            let p = random_point(&mut rng, &cover.curve, 0.1);
            let f = |w: C64, y: C64| vec![b.evaluate(&p, &CoverPoint { x: w, y }).unwrap_or(C64::new(f64::NAN, 0.0))];
            let (alpha, _) = cyc.periods(&cover.curve, 1, &f, 1e-12)?;
            norm_defect = alpha.iter().fold(norm_defect, |m, a| m.max(a[0].norm()));
        }
        let (mut sum_defect, mut plus_defect) = (0.0f64, 0.0f64);
        for _ in 0..10 {
            let p = random_point(&mut rng, &cover.curve, 0.1);
            let s = b.projective_connections(&p)?;
            sum_defect = sum_defect.max((s.s_plus + s.s_minus - s.s_hat * 2.0).norm());
            plus_defect = plus_defect.max(s.s_plus.norm() / s.s_hat.norm().max(1.0));
        }
        let ok = pull < 1e-6 && norm_defect < 1e-6 && sum_defect < 1e-8;
        Ok((
            ok,
            format!(
                "pullback rel {pull:.2e}; α-normalization {norm_defect:.2e}; S₊+S₋−2Ŝ {sum_defect:.2e} (S₊ vs 0: {plus_defect:.2e}, symmetry {sym:.2e})"
            ),
            json!({ "pullback_relative": pull, "alpha_normalization": norm_defect, "connection_sum": sum_defect, "s_plus_closed_form": plus_defect, "symmetry": sym, "asymmetry_of_correction": b.asymmetry }),
        ))
    })();
    finish(4, "bergman-identities", 120.0, start, body)
}

/// Euler pairing and the pure-scaling path on the reference configuration.
pub fn criterion_homogeneity() -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let cfg = reference_config();
        let (kp, km) = (-40.0 / 3.0, 56.0 / 3.0);
        let smp = TauContext::from_config(&cfg)?.sample(&[])?;
        let (ep, em) = (smp.euler(Sign::Plus), smp.euler(Sign::Minus));
        let path = |s: f64| {
            let mut c = cfg.clone();
            c.scale = cfg.scale * s.exp();
            let t = ConfigTangent::scaling(&c);
            (c, t)
        };
        let along = dlog_tau_along(path, &[0.0, 0.5, 1.0], &CycleOptions::default())?;
        let rel = |z: C64, k: f64| (z - k).norm() / k.abs();
        let mut worst = rel(ep, kp).max(rel(em, km));
        for s in &along {
            worst = worst.max(rel(s.dlog_tau_plus, kp)).max(rel(s.dlog_tau_minus, km));
        }
        Ok((
            worst < 1e-4,
            format!("κ₊ = {:.10}, κ₋ = {:.10}; max relative defect incl. scaling path {worst:.2e}", ep.re, em.re),
            json!({ "kappa_plus": [ep.re, ep.im], "kappa_minus": [em.re, em.im], "max_relative_defect": worst }),
        ))
    })();
    finish(5, "homogeneity", 120.0, start, body)
}

/// Degeneration exponents of the zero–pole and zero–zero families.
pub fn criterion_degeneration() -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let opts = CycleOptions::default();
        let zp = degeneration_exponent(&zero_pole_family(), &opts)?;
        let zz = degeneration_exponent(&zero_zero_family(), &opts)?;
        let (a, b) = (zp.gamma(Sign::Plus), zp.gamma(Sign::Minus));
        let (x, y) = (zz.gamma(Sign::Plus), zz.gamma(Sign::Minus));
        let ok = (a + 8.0 / 3.0).abs() <= 0.05 && (b - 40.0 / 3.0).abs() <= 0.05 && (x - 2.0 / 3.0).abs() <= 0.1 && (y - 26.0 / 3.0).abs() <= 0.1;
        Ok((
            ok,
            format!("zero-pole ({a:.6}, {b:.6}); zero-zero ({x:.6}, {y:.6})"),
            json!({ "zero_pole": { "gamma_plus": a, "gamma_minus": b, "fit_plus": zp.fit_plus, "fit_minus": zp.fit_minus },
                    "zero_zero": { "gamma_plus": x, "gamma_minus": y, "fit_plus": zz.fit_plus, "fit_minus": zz.fit_minus } }),
        ))
    })();
    finish(6, "degeneration-exponents", 900.0, start, body)
}

/// Closed-loop integral of `ξ±` and the basis-change law for random `σ₋`.
pub fn criterion_flatness(sigmas: usize) -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let cfg = reference_config();
        let opts = CycleOptions::default();
        let (lp, lm) = closed_loop_integral(&cfg, MarkedPoint::Zero(0), 0.05, 24, &opts)?;
        let loop_defect = lp.norm().max(lm.norm());
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
        let dir = ConfigTangent::moving(&cfg, MarkedPoint::Zero(0), c(0.3, 0.2));
        let mut worst: f64 = 0.0;
        for _ in 0..sigmas {
            let sigma = random_integral_symplectic(2, 6, &mut rng);
            worst = worst.max(basis_change_check(&cfg, &sigma, &dir, &opts)?.residual);
        }
        Ok((
            loop_defect < 1e-4 && worst < 1e-4,
            format!("closed loop {loop_defect:.2e}; basis change max residual {worst:.2e} over {sigmas} σ₋"),
            json!({ "closed_loop": loop_defect, "basis_change_max_residual": worst, "sigmas": sigmas }),
        ))
    })();
    finish(7, "flatness-modularity", 300.0, start, body)
}

/// `|t| / |z₁ − p₁| → π |√c_eff|` along the zero–pole family.
pub fn criterion_transversality() -> CriterionResult {
    let start = Instant::now();
    let body = (|| {
        let fam = zero_pole_family();
        let opts = CycleOptions::default();
        let mut ratios = Vec::new();
        let mut target = 0.0;
        for d in [1e-2, 1e-3, 1e-4] {
            let (r, t) = transversality_ratio(&fam, d, &opts)?;
            ratios.push(r);
            target = t;
        }
        let rel = (ratios[ratios.len() - 1] - target).abs() / target;
        Ok((
            rel < 0.01,
            format!("|t|/d = {:.8} at d = 1e-4 vs π|√c_eff| = {target:.8} (relative {rel:.2e})", ratios[2]),
            json!({ "distances": [1e-2, 1e-3, 1e-4], "ratios": ratios, "target": target, "relative_defect": rel }),
        ))
    })();
    finish(8, "transversality", 60.0, start, body)
}

/// Which checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Exact Picard, κ and the `n = 5` scaling check.
    Quick,
    Full,
}

pub fn run(tier: Tier) -> Vec<CriterionResult> {
    match tier {
        Tier::Quick => vec![criterion_exact_picard(), criterion_kappa(), criterion_homogeneity()],
        Tier::Full => vec![
            criterion_exact_picard(),
            criterion_kappa(),
            criterion_periods(50),
            criterion_bergman(100),
            criterion_homogeneity(),
            criterion_degeneration(),
            criterion_flatness(5),
            criterion_transversality(),
        ],
    }
}
