//! Property tests for the exact algebra, stratum bookkeeping, serialization
//! and the period-matrix assembly.

use nalgebra::DMatrix;
use proptest::prelude::*;
use qdtau::curve::QdConfig;
use qdtau::exact::{format_rational, parse_rational, ratio, Rational};
use qdtau::homology::{assemble_period_matrix, is_symplectic, is_unimodular_integral, random_integral_symplectic};
use qdtau::picard::{DivisorClass, GeneratorBasis};
use qdtau::strata::{collide, collision_exponents, kappa, kappa_term, principal_kappa, CollisionKind, StratumSignature};
use qdtau::C64;
use rand::SeedableRng;

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..500).prop_map(|(p, q)| ratio(p, q))
}

fn complex() -> impl Strategy<Value = C64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| C64::new(a, b))
}

/// A random point of the Siegel upper half space of size `k`.
fn siegel(k: usize, seed: u64) -> DMatrix<C64> {
    use rand::Rng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::<f64>::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
    let a = DMatrix::<f64>::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
    let re = (&x + x.transpose()) * 0.5;
    let im = &a * a.transpose() + DMatrix::<f64>::identity(k, k) * 0.1;
    DMatrix::from_fn(k, k, |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

proptest! {
    #[test]
    fn rational_addition_cancels(a in rational(), b in rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn rational_text_round_trip(a in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&a)).unwrap(), a);
    }

    #[test]
    fn kappa_is_additive_over_orders(g in 0usize..4, n in 0usize..6, extra in 0usize..3) {
        prop_assume!(2 * g + n > 3);
        let base = StratumSignature::principal(g, n).unwrap();
        // adding a pole together with a zero keeps the degree and adds one term each
        let mut orders = base.orders().to_vec();
        for _ in 0..extra {
            orders.push(1);
            orders.push(-1);
        }
        let grown = StratumSignature::new(g, orders).unwrap();
        let (bp, bm) = kappa(&base);
        let (gp, gm) = kappa(&grown);
        let k = ratio(extra as i64, 1);
        let ((zp, zm), (pp, pm)) = (kappa_term(1), kappa_term(-1));
        prop_assert_eq!(gp - bp, &k * &(zp + pp));
        prop_assert_eq!(gm - bm, &k * &(zm + pm));
    }

    #[test]
    fn collision_changes_kappa_by_exponent_data(g in 0usize..4, n in 1usize..6) {
        prop_assume!(2 * g + n > 3);
        let sig = StratumSignature::principal(g, n).unwrap();
        prop_assert_eq!(kappa(&sig), principal_kappa(g, n).unwrap());
        for kind in [CollisionKind::ZeroPole, CollisionKind::ZeroZero] {
            let Ok(after) = collide(&sig, kind) else { continue };
            let d = collision_exponents(kind);
            let (bp, bm) = kappa(&sig);
            let (ap, am) = kappa(&after);
            prop_assert_eq!(bp - ap, d.delta_kappa_plus.clone());
            prop_assert_eq!(bm - am, d.delta_kappa_minus.clone());
            prop_assert_eq!(&d.gamma_plus * &d.t_weight, d.delta_kappa_plus);
        }
    }

    #[test]
    fn config_json_round_trip(zs in proptest::collection::vec(complex(), 3), ps in proptest::collection::vec(complex(), 5), s in complex()) {
        prop_assume!(s.norm() > 1e-3);
        let Ok(cfg) = QdConfig::new(zs[..1].to_vec(), ps, s) else { return Ok(()) };
        let text = serde_json::to_string(&cfg.to_json()).unwrap();
        let back = QdConfig::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn divisor_class_json_round_trip(g in 0usize..3, n in 1usize..5, seed in any::<u64>()) {
        prop_assume!(2 * g + n > 3);
        let basis = GeneratorBasis::new(g, n).unwrap();
        let mut state = seed;
        let coeffs = (0..basis.len())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ratio((state >> 40) as i64 % 97 - 48, ((state >> 20) % 13 + 1) as i64)
            })
            .collect();
        let class = DivisorClass::from_coeffs(&basis, coeffs).unwrap();
        prop_assert_eq!(DivisorClass::from_json(&basis, &class.to_json()).unwrap(), class);
    }

    #[test]
    fn random_symplectic_matrices_are_integral_symplectic(k in 1usize..4, steps in 0usize..12, seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = random_integral_symplectic(k, steps, &mut rng);
        prop_assert!(is_symplectic(&s));
        prop_assert!(is_unimodular_integral(&s));
    }

    #[test]
    fn assembled_matrix_stays_in_siegel_space(g in 0usize..3, n in 1usize..4, seed in any::<u64>()) {
        prop_assume!(2 * g + n > 3);
        let plus = siegel(g, seed);
        let minus = siegel(3 * g + n - 3, seed.wrapping_add(1));
        let big = assemble_period_matrix(g, n, &plus, &minus).unwrap();
        let asym = (&big - big.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(asym < 1e-12);
        prop_assert!(min_eigenvalue(&big.map(|z| z.im)) > 0.0);
    }
}
