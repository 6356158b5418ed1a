use std::f64::consts::PI;

use mobius_core::band::{fold, perturb_to_generic, random_isometric_band, ridge_curve, FlatBand};
use mobius_core::exactnum::{interval_eval, ratio, QSqrt3, Sign};
use mobius_core::lambda::{phi_f64, phi_star};
use mobius_core::poly::{Bound, SturmChain};
use mobius_core::region::{omega_member, omega_member_f64, Membership, SlopePoint};
use mobius_core::QPoly;
use proptest::prelude::*;

const LAMBDA1: f64 = 1.694_973_171_224_941_6;

fn qs() -> impl Strategy<Value = QSqrt3> {
    (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(p, q, r, s)| QSqrt3::from_ratios(p, q, r, s))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn max_f_g_is_at_least_lambda1(b in -3.0f64..3.0, t in -3.0f64..3.0) {
        prop_assume!(b >= t);
        prop_assert!(phi_f64(b, t) >= LAMBDA1 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn phi_star_on_d_star_is_at_least_lambda1(num in -3000i64..577) {
        // t = num/1000 < 1/√3
        prop_assume!(num != -577);
        let t = QSqrt3::from_ratios(num, 1000, 0, 1);
        let v = interval_eval(&phi_star(&t).unwrap(), &ratio(1, 1_000_000)).unwrap();
        prop_assert!(v.midpoint_f64() >= LAMBDA1 - 1e-6, "t = {num}/1000: {v}");
    }

    #[test]
    fn qsqrt3_is_a_field(a in qs(), b in qs(), c in qs()) {
        prop_assert_eq!((a.clone() + b.clone()) * c.clone(), a.clone() * c.clone() + b.clone() * c.clone());
        if a.sign() != Sign::Zero {
            prop_assert_eq!(a.clone() * a.recip().unwrap(), QSqrt3::from_int(1));
        }
        let (fa, fb) = (a.to_f64(), b.to_f64());
        if (fa - fb).abs() > 1e-9 {
            prop_assert_eq!((a - b).sign() == Sign::Positive, fa > fb);
        }
    }

    #[test]
    fn sturm_counts_planted_roots(roots in prop::collection::btree_set(-20i64..20, 1..6), lo in -25i64..25, len in 1i64..30) {
        let mut p = QPoly::new(vec![QSqrt3::from_int(1)]);
        for r in &roots {
            p = &p * &QPoly::new(vec![QSqrt3::from_int(-r), QSqrt3::from_int(1)]);
        }
        let chain = SturmChain::new(&p).unwrap();
        prop_assert_eq!(chain.total_real_roots(), roots.len());
        // half-integer ends avoid roots on the boundary
        let a = QSqrt3::from_ratios(2 * lo + 1, 2, 0, 1);
        let b = QSqrt3::from_ratios(2 * (lo + len) + 1, 2, 0, 1);
        let expected = roots.iter().filter(|&&r| r > lo && r <= lo + len).count();
        prop_assert_eq!(chain.count_roots(&Bound::At(a), &Bound::At(b)), expected);
    }

    #[test]
    fn omega_membership_agrees_with_floats(bn in 0i64..500, tn in -650i64..-150) {
        let (b, t) = (bn as f64 / 1000.0, tn as f64 / 1000.0);
        let p = SlopePoint::rational(ratio(bn, 1000), ratio(tn, 1000));
        let exact = omega_member(&p).unwrap();
        let margin = (phi_f(b, t) - 3f64.sqrt()).abs().min((phi_g(b, t) - 3f64.sqrt()).abs());
        prop_assume!(margin > 1e-9);
        prop_assert_eq!(exact == Membership::Inside, omega_member_f64(b, t));
    }

    #[test]
    fn folding_is_isometric(y0 in -0.5f64..0.5, angles in prop::collection::vec(0.0f64..2.0 * PI, 3)) {
        let e = fold(&FlatBand::equilateral(y0 / 3f64.sqrt()).unwrap(), &angles).unwrap();
        prop_assert!(e.isometry_residual() < 1e-12);
        prop_assert!((e.max_distortion() - 1.0).abs() < 1e-9);
        prop_assert!(e.gluing_residual() < 1e-12);
    }

    #[test]
    fn ridge_invariants_on_closed_bands(seed in 0u64..10_000) {
        let e = random_isometric_band(seed).unwrap();
        let r = ridge_curve(&e, 1e-9).unwrap();
        prop_assert!((r.length() - 2.0 * e.lambda()).abs() < 1e-9);
        prop_assert!(r.min_vertex_norm() >= 1.0 - 1e-12);
        prop_assert!(r.spherical_length() >= PI - 1e-9);
        for k in 0..r.edges.len() {
            prop_assert!((r.edge_line_distance(k) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn generic_perturbation_is_bilipschitz(seed in 0u64..10_000, magnitude in 1e-4f64..1e-2) {
        let e = random_isometric_band(seed).unwrap();
        let g = perturb_to_generic(&e, magnitude, seed).unwrap();
        prop_assert!(g.max_distortion() <= 1.0 + magnitude + 1e-12);
        prop_assert!(g.closure_residual() < 1e-9);
    }
}

fn phi_f(b: f64, t: f64) -> f64 {
    b - t + (1.0 + t * t).sqrt()
}

fn phi_g(b: f64, t: f64) -> f64 {
    -b + t + (4.0 * (1.0 + b * b) + 1.0 + t * t).sqrt()
}
