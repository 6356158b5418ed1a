use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Rotation3, Unit};
use serde::{Deserialize, Serialize};

use super::{c, to_f64, BandError, EmbeddedBand, Real, Vec3};
use crate::certs::{CertReport, Check};

/// Polygonal curve starting at `start` with the given edge vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeCurve<S: Real> {
    pub start: Vec3<S>,
    pub edges: Vec<Vec3<S>>,
    pub vertices: Vec<Vec3<S>>,
}

impl<S: Real> RidgeCurve<S> {
    pub fn from_edges(start: Vec3<S>, edges: Vec<Vec3<S>>) -> Self {
        let mut vertices = vec![start];
        for e in &edges {
            let last = vertices[vertices.len() - 1];
            vertices.push(last + e);
        }
        RidgeCurve { start, edges, vertices }
    }

    pub fn from_vertices(vertices: Vec<Vec3<S>>) -> Self {
        let edges = vertices.windows(2).map(|w| w[1] - w[0]).collect();
        RidgeCurve { start: vertices[0], edges, vertices }
    }

    pub fn end(&self) -> Vec3<S> {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn length(&self) -> S {
        self.edges.iter().fold(S::zero(), |a, e| a + e.norm())
    }

    /// Length of the radial projection to the unit sphere.
    pub fn spherical_length(&self) -> S {
        self.vertices.windows(2).fold(S::zero(), |a, w| a + w[0].angle(&w[1]))
    }

    pub fn min_vertex_norm(&self) -> S {
        self.vertices.iter().map(|v| v.norm()).fold(c(f64::INFINITY), |a: S, b| a.min(b))
    }

    /// Distance from the origin to the line extending edge `i`.
    pub fn edge_line_distance(&self, i: usize) -> S {
        let (a, e) = (self.vertices[i], self.edges[i]);
        a.cross(&e).norm() / e.norm()
    }

    /// Rotate so the start lies on `+X` and the first crossing of `X = 0`
    /// lies on `+Y`.
    pub fn normalized(&self) -> Self {
        let x = Vec3::x();
        let r0 = Rotation3::rotation_between(&self.start, &x)
            .unwrap_or_else(|| Rotation3::from_axis_angle(&Vec3::z_axis(), S::pi()));
        let v: Vec<Vec3<S>> = self.vertices.iter().map(|p| r0 * p).collect();
        let crossing = v.windows(2).find_map(|w| {
            if w[0].x > S::zero() && w[1].x <= S::zero() {
                let s = w[0].x / (w[0].x - w[1].x);
                Some(w[0] + (w[1] - w[0]) * s)
            } else {
                None
            }
        });
        let v = match crossing {
            Some(p) if p.y.hypot(p.z) > S::zero() => {
                let ang = p.z.atan2(p.y);
                let r1 = Rotation3::from_axis_angle(&Unit::new_unchecked(x), -ang);
                v.iter().map(|q| r1 * q).collect()
            }
            _ => v,
        };
        RidgeCurve::from_vertices(v)
    }
}

/// The ridge curve: start `I(right) − I(left)` of the bottom bend, edges
/// `2μᵢEᵢ` with `Eᵢ` the core-curve edges.
pub fn ridge_curve<S: Real>(e: &EmbeddedBand<S>, closure_tol: f64) -> Result<RidgeCurve<S>, BandError> {
    let core = core_curve(e, closure_tol)?;
    let signs = e.flat().signs();
    let edges = core.windows(2).zip(&signs).map(|(w, &m)| (w[1] - w[0]) * c::<S>(2.0 * m as f64)).collect();
    Ok(RidgeCurve::from_edges(e.bend_vector(0), edges))
}

/// Core curve vertices; refuses bands that do not close.
pub fn core_curve<S: Real>(e: &EmbeddedBand<S>, closure_tol: f64) -> Result<Vec<Vec3<S>>, BandError> {
    let r = to_f64(e.closure_residual());
    if !(r <= closure_tol) {
        return Err(BandError::ToleranceExceeded { residual: r, tolerance: closure_tol });
    }
    Ok(e.core_curve())
}

/// Numeric invariants of a ridge curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeReport {
    pub lambda: f64,
    pub length: f64,
    pub end_error: f64,
    pub min_vertex_norm: f64,
    pub max_tangency_error: f64,
    pub spherical_length: f64,
    pub slab_applies: bool,
    pub max_abs_z: f64,
    pub max_elevation: f64,
}

pub const SEVEN_PI_TWELFTHS: f64 = 7.0 * PI / 12.0;

/// Evaluate the ridge invariants.
pub fn ridge_invariant_report<S: Real>(r: &RidgeCurve<S>, lambda: S) -> RidgeReport {
    let n = r.normalized();
    let tangency = (0..r.edges.len()).map(|i| (to_f64(r.edge_line_distance(i)) - 1.0).abs()).fold(0.0, f64::max);
    let lambda = to_f64(lambda);
    RidgeReport {
        lambda,
        length: to_f64(r.length()),
        end_error: to_f64((r.end() + r.start).norm()),
        min_vertex_norm: to_f64(r.min_vertex_norm()),
        max_tangency_error: tangency,
        spherical_length: to_f64(r.spherical_length()),
        slab_applies: lambda < SEVEN_PI_TWELFTHS,
        max_abs_z: n.vertices.iter().map(|v| to_f64(v.z).abs()).fold(0.0, f64::max),
        max_elevation: n.vertices.iter().map(|v| (to_f64(v.z).abs() / to_f64(v.norm())).asin()).fold(0.0, f64::max),
    }
}

impl RidgeReport {
    pub fn to_cert_report(&self, tol: f64) -> CertReport {
        let num = |q: &str, value: f64, lo: Option<f64>, hi: Option<f64>, tolerance: f64| Check::Numeric {
            quantity: q.into(),
            value,
            lo,
            hi,
            tolerance,
        };
        let two_l = 2.0 * self.lambda;
        let mut rep = CertReport::new("ridge-invariants");
        rep.step("Γ has length 2λ", "ridge length equals twice the aspect ratio", num("length", self.length, Some(two_l), Some(two_l), tol));
        rep.step("connects (B,0,0) to (-B,0,0)", "end point is the negated start", num("|end + start|", self.end_error, None, Some(0.0), tol));
        rep.step("disjoint from the open unit ball", "vertex norms at least 1", num("min |vertex|", self.min_vertex_norm, Some(1.0), None, 1e-12));
        rep.step("tangent to the unit sphere", "edge lines at distance 1 from the origin", num("max |dist − 1|", self.max_tangency_error, None, Some(0.0), tol));
        rep.step("|Γ*| ≥ π", "spherical projection joins antipodes", num("|Γ*|", self.spherical_length, Some(PI), None, 1e-12));
        rep.step("Hence λ>π/2", "aspect ratio exceeds π/2", num("λ", self.lambda, Some(FRAC_PI_2), None, 0.0));
        if self.slab_applies {
            rep.step("lies in the open slab bounded", "|Z| < 1/√2 after normalization", num("max |Z|", self.max_abs_z, None, Some(FRAC_1_SQRT_2), 0.0));
            rep.step(
                "make angles of less than π/4 with the XY-plane",
                "bend directions stay below π/4 elevation",
                num("max elevation", self.max_elevation, None, Some(FRAC_PI_4), 0.0),
            );
        }
        rep
    }
}

/// Signed sums of ridge edges between two bends, split by ridge side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeSplit {
    /// Sum of ridge-curve edges over left-ridge triangles.
    pub l_str: Vec3<f64>,
    /// Sum over right-ridge triangles.
    pub r_str: Vec3<f64>,
    /// `I(right end)` of the upper bend expressed as `start + R_str`.
    pub p: Vec3<f64>,
    /// Core-curve displacement between the two bends.
    pub theta: Vec3<f64>,
    /// Flat lengths of the left and right boundary arcs between the bends.
    pub left_arc: f64,
    pub right_arc: f64,
    pub start: Vec3<f64>,
    pub end: Vec3<f64>,
}

impl RidgeSplit {
    /// Split the portion of the ridge curve between bends `k1 < k2`.
    pub fn new(e: &EmbeddedBand<f64>, k1: usize, k2: usize) -> Self {
        let core = e.core_curve();
        let mut l_str = Vec3::zeros();
        let mut r_str = Vec3::zeros();
        for i in k1..k2 {
            let edge = (core[i + 1] - core[i]) * 2.0 * e.flat().side(i).sign() as f64;
            if e.flat().side(i).sign() < 0 {
                l_str += edge;
            } else {
                r_str += edge;
            }
        }
        let (start, end) = (e.bend_vector(k1), e.bend_vector(k2));
        let (l1, r1) = e.flat().bend(k1);
        let (l2, r2) = e.flat().bend(k2);
        RidgeSplit {
            l_str,
            r_str,
            p: start + r_str,
            theta: core[k2] - core[k1],
            left_arc: l2 - l1,
            right_arc: r2 - r1,
            start,
            end,
        }
    }

    /// `|R_str + L_str − (end − start)|`.
    pub fn sum_residual(&self) -> f64 {
        (self.r_str + self.l_str - (self.end - self.start)).norm()
    }

    /// `|R_str − L_str − 2Θ|`.
    pub fn difference_residual(&self) -> f64 {
        (self.r_str - self.l_str - self.theta * 2.0).norm()
    }

    /// `|(start + R_str) − (end − L_str)|`.
    pub fn point_residual(&self) -> f64 {
        (self.p - (self.end - self.l_str)).norm()
    }

    /// `‖L_str‖ ≤ L` and `‖R_str‖ ≤ R` up to `tol`.
    pub fn norms_bounded(&self, tol: f64) -> bool {
        self.l_str.norm() <= self.left_arc + tol && self.r_str.norm() <= self.right_arc + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{fold, FlatBand};

    fn triangle(y0: f64) -> EmbeddedBand<f64> {
        fold(&FlatBand::equilateral(y0).unwrap(), &[PI, PI, PI]).unwrap()
    }

    #[test]
    fn triangle_ridge_invariants() {
        let e = triangle(0.0);
        let r = ridge_curve(&e, 1e-9).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r.length() - 2.0 * s3).abs() < 1e-12);
        assert!((r.start - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((r.end() - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-12);
        for k in 0..=e.n_triangles() {
            assert!((r.vertices[k] - e.bend_vector(k)).norm() < 1e-12);
        }
        let rep = ridge_invariant_report(&r, e.lambda());
        assert!(rep.spherical_length >= PI);
        let cert = rep.to_cert_report(1e-9);
        assert!(cert.is_verified(), "{cert}");
    }

    #[test]
    fn clearance_violation_flagged() {
        let r = RidgeCurve::from_vertices(vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.5, 0.0), Vec3::new(-1.0, 0.0, 0.0)]);
        let rep = ridge_invariant_report(&r, 1.0);
        assert!(rep.min_vertex_norm < 1.0);
        assert!(!rep.to_cert_report(1e-9).is_verified());
    }

    #[test]
    fn open_band_has_no_ridge_curve() {
        let e = fold(&FlatBand::equilateral(0.0).unwrap(), &[2.0, 2.0, 2.0]).unwrap();
        assert!(matches!(ridge_curve(&e, 1e-9), Err(BandError::ToleranceExceeded { .. })));
    }

    #[test]
    fn split_identities() {
        let e = triangle(0.1);
        let n = e.n_triangles();
        for (k1, k2) in [(0, 2), (1, 3), (0, n)] {
            let s = RidgeSplit::new(&e, k1, k2);
            assert!(s.sum_residual() < 1e-12);
            assert!(s.difference_residual() < 1e-12);
            assert!(s.point_residual() < 1e-12);
            assert!(s.norms_bounded(1e-12));
        }
    }
}
