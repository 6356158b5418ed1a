//! Machine-checkable certificates for the polynomial and angle inequalities.

mod report;
mod statements;

pub use report::*;
pub use statements::*;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::QSqrt3;
    use num_traits::Zero;

    #[test]
    fn expand_p_matches_reference() {
        let p = expand_p().unwrap();
        assert_eq!(p.coeff(6, 0), QSqrt3::from_int(4));
        assert_eq!(p.coeff(0, 2), QSqrt3::from_int(27));
        let t0 = QSqrt3::from_ratios(0, 1, -1, 3);
        assert!(p.eval(&QSqrt3::zero(), &t0).is_zero());
    }

    #[test]
    fn statements_verify() {
        for r in [statement1_certificate(), statement2_x_certificate(), statement2_y_certificate(), statement3_certificate()] {
            assert!(r.is_verified(), "{r}");
            assert!(r.replay().is_empty());
        }
    }

    #[test]
    fn const3_examples() {
        let m = |l: f64, r: f64| TPatternMeasurements { big_b: 1.0, big_t: 1.0, b: 0.0, t: 0.0, l: [l, l], r: [r, r], x: 0.0, y: 0.0, eps: 0.0 };
        assert!(const3_check(&m(2f64.sqrt(), 1.0), 1));
        assert!(!const3_check(&m(1.0, 0.0), 1));
        assert!(const3_check(&m(2f64.sqrt(), 0.0), 2));
    }

    #[test]
    fn s_bound_values() {
        assert!((s_lower_bound(0.0) - 3f64.sqrt()).abs() < 1e-15);
        assert!((s_lower_bound(0.25) - (3f64.sqrt() - 1.0 / 24.0)).abs() < 1e-15);
        for i in 0..=100 {
            let v = s_lower_bound(0.5 * i as f64 / 100.0);
            assert!(v <= 3f64.sqrt() + 1e-15 && v >= 3f64.sqrt() - 1.0 / 24.0 - 1e-15);
        }
    }

    #[test]
    fn hull_triangle_angles() {
        let h = HullTriangle::new(1.0f64, 1.0, 0.0);
        assert!(h.is_triangle());
        assert!((h.apex_angle() - 2.0 * 0.5f64.atan()).abs() < 1e-15);
        assert!(!HullTriangle::new(1.0f64, 1.0, 0.6).is_triangle());
        let worst = HullTriangle::new(1.25f64, 1.0, 0.125);
        assert!(worst.base_angles().1 > std::f64::consts::FRAC_PI_4);
    }
}
