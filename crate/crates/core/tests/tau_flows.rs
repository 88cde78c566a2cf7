//! Closedness and relabelling invariance of the connection forms `dlog τ±`.

use std::f64::consts::PI;

use qdtau::curve::MarkedPoint;
use qdtau::cycles::CycleOptions;
use qdtau::exact::RationalMatrix;
use qdtau::suite::{reference_config, zero_pole_family};
use qdtau::tau::{basis_change_check, degeneration_exponent, ConfigTangent, DegenerationFamily, Sign, TauContext};
use qdtau::C64;

#[test]
fn mixed_partials_commute() {
    let cfg = reference_config();
    let layout = cfg.default_layout();
    let opts = CycleOptions::default();
    let x = ConfigTangent::moving(&cfg, MarkedPoint::Zero(0), C64::new(0.3, 0.1));
    let y = ConfigTangent::moving(&cfg, MarkedPoint::Pole(3), C64::new(-0.1, 0.25));
    let h = 1e-3;
    // ∂_X ξ(Y) and ∂_Y ξ(X) by central differences
    let xi = |shift: &ConfigTangent, s: f64, along: &ConfigTangent, sign: Sign| {
        let moved = shift.apply(&cfg, s);
        let ctx = TauContext::new(&moved, &layout, &opts).unwrap();
        ctx.sample(std::slice::from_ref(along)).unwrap().dlog_tau(sign, 0)
    };
    for sign in [Sign::Plus, Sign::Minus] {
        let dxy = (xi(&x, h, &y, sign) - xi(&x, -h, &y, sign)) / (2.0 * h);
        let dyx = (xi(&y, h, &x, sign) - xi(&y, -h, &x, sign)) / (2.0 * h);
        assert!((dxy - dyx).norm() < 1e-5 * dxy.norm().max(1.0), "{sign:?}: {dxy} vs {dyx}");
    }
}

#[test]
fn pairing_ignores_pole_labels() {
    let cfg = reference_config();
    let base = TauContext::from_config(&cfg).unwrap().sample(&[]).unwrap();
    let mut shuffled = cfg.clone();
    shuffled.poles.rotate_left(2);
    shuffled.poles.swap(0, 3);
    let moved = TauContext::from_config(&shuffled).unwrap().sample(&[]).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        assert!((base.euler(sign) - moved.euler(sign)).norm() < 1e-9);
    }
    // moving the same pole under its new label
    let v = C64::new(0.2, -0.3);
    let a = TauContext::from_config(&cfg).unwrap().sample(&[ConfigTangent::moving(&cfg, MarkedPoint::Pole(1), v)]).unwrap();
    let i = shuffled.poles.iter().position(|p| *p == cfg.poles[1]).unwrap();
    let b = TauContext::from_config(&shuffled).unwrap().sample(&[ConfigTangent::moving(&shuffled, MarkedPoint::Pole(i), v)]).unwrap();
    // the cut layout is ordered by position, so both signs agree
    for sign in [Sign::Plus, Sign::Minus] {
        assert!((a.dlog_tau(sign, 0) - b.dlog_tau(sign, 0)).norm() < 1e-8);
    }
}

#[test]
fn phi_periods_are_contour_independent() {
    let cfg = reference_config();
    let layout = cfg.default_layout();
    let a = TauContext::new(&cfg, &layout, &CycleOptions::default()).unwrap().sample(&[]).unwrap();
    let opts = CycleOptions { alpha_radius: 0.18, gap_radius: 0.1, chords_per_half_turn: 37, ..CycleOptions::default() };
    let b = TauContext::new(&cfg, &layout, &opts).unwrap().sample(&[]).unwrap();
    for (x, y) in a.phi_plus.iter().chain(&a.phi_minus).zip(b.phi_plus.iter().chain(&b.phi_minus)) {
        assert!((x - y).norm() < 1e-6 * x.norm().max(1.0), "{x} vs {y}");
    }
}

#[test]
fn phi_plus_uses_the_sphere_connection() {
    // on a genus-zero base B₊ is the pulled-back sphere kernel, so S_{B₊} = 0 in x
    let ctx = TauContext::from_config(&reference_config()).unwrap();
    let smp = ctx.sample(&[]).unwrap();
    let cover = &ctx.cover;
    let f = |x: C64, y: C64| {
        let v = cover.sqrt_c() * y / cover.pole_poly(x);
        vec![cover.schwarzian_v(x).unwrap() / v / C64::new(0.0, PI / 2.0)]
    };
    let (a, b) = ctx.cycles.periods(&cover.curve, 1, &f, 1e-12).unwrap();
    for (x, y) in a.iter().chain(&b).zip(&smp.phi_plus) {
        assert!((x[0] - y).norm() < 1e-7 * y.norm().max(1.0), "{} vs {y}", x[0]);
    }
}

#[test]
fn phi_periods_scale_inversely_with_root_of_c() {
    let cfg = reference_config();
    let layout = cfg.default_layout();
    let mut big = cfg.clone();
    big.scale *= 9.0;
    let opts = CycleOptions::default();
    let a = TauContext::new(&cfg, &layout, &opts).unwrap().sample(&[]).unwrap();
    let b = TauContext::new(&big, &layout, &opts).unwrap().sample(&[]).unwrap();
    for (x, y) in a.phi_minus.iter().chain(&a.phi_plus).zip(b.phi_minus.iter().chain(&b.phi_plus)) {
        assert!((y * 3.0 - x).norm() < 1e-9 * x.norm().max(1.0));
    }
    for sign in [Sign::Plus, Sign::Minus] {
        let k = a.euler(sign);
        assert!(k.im.abs() < 1e-6 * k.norm());
    }
}

#[test]
fn reversed_tangent_negates_the_form() {
    let cfg = reference_config();
    let v = C64::new(0.1, 0.4);
    let smp = TauContext::from_config(&cfg)
        .unwrap()
        .sample(&[ConfigTangent::moving(&cfg, MarkedPoint::Pole(2), v), ConfigTangent::moving(&cfg, MarkedPoint::Pole(2), -v)])
        .unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        assert!((smp.dlog_tau(sign, 0) + smp.dlog_tau(sign, 1)).norm() < 1e-12);
    }
}

#[test]
fn identity_basis_change_is_trivial() {
    let cfg = reference_config();
    let dir = ConfigTangent::moving(&cfg, MarkedPoint::Zero(0), C64::new(0.3, 0.2));
    let r = basis_change_check(&cfg, &RationalMatrix::identity(4), &dir, &CycleOptions::default()).unwrap();
    assert!(r.residual < 1e-9, "{r:?}");
}

#[test]
fn degeneration_exponents_ignore_the_overall_scale() {
    let base = zero_pole_family();
    let mut scaled = base.base.clone();
    scaled.scale *= 10.0;
    let family = DegenerationFamily { base: scaled, ..zero_pole_family() };
    let opts = CycleOptions::default();
    let (a, b) = (degeneration_exponent(&base, &opts).unwrap(), degeneration_exponent(&family, &opts).unwrap());
    for sign in [Sign::Plus, Sign::Minus] {
        assert!((a.gamma(sign) - b.gamma(sign)).abs() < 0.05);
    }
}
