use nalgebra::{Rotation3, Unit};
use serde::{Deserialize, Serialize};

use super::{BandError, BendField, EmbeddedBand, PerpLocus, RidgeSplit, Side, Tolerances, Vec3, SEVEN_PI_TWELFTHS};
use crate::certs::{const3_check, s_bound, s_lower_bound, CertReport, Check, TPatternMeasurements, MEASURE_TOL};

/// Samples per locus arc when scanning for a sign change.
const ARC_SAMPLES: usize = 64;

/// A coplanar perpendicular pair of bend images.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TPattern {
    /// Core parameters of `β₁*` and `β₂*`, labeled so that the line
    /// extending `β₂*` misses `β₁*`.
    pub s: [f64; 2],
    /// `[left, right]` endpoint images of each bend.
    pub endpoints: [[Vec3<f64>; 2]; 2],
    /// Difference of the two planes' `Z`-intercepts at the pair.
    pub intercept_gap: f64,
    pub warnings: Vec<String>,
}

fn intercept_gap(p1: &Vec3<f64>, w1: &Vec3<f64>, p2: &Vec3<f64>, w2: &Vec3<f64>) -> Option<f64> {
    let n = w1.cross(w2);
    if n.z.abs() <= 1e-12 * n.norm() {
        None
    } else {
        Some(n.dot(&(p1 - p2)) / n.z)
    }
}

/// Parameter along `a` of the point closest to the line through `b`.
fn line_hit(a0: &Vec3<f64>, a1: &Vec3<f64>, b0: &Vec3<f64>, b1: &Vec3<f64>) -> f64 {
    let (da, db, r) = (a1 - a0, b1 - b0, a0 - b0);
    let (aa, ab, bb) = (da.dot(&da), da.dot(&db), db.dot(&db));
    let (ad, bd) = (da.dot(&r), db.dot(&r));
    let den = aa * bb - ab * ab;
    if den.abs() < 1e-300 {
        return f64::NAN;
    }
    (ab * bd - bb * ad) / den
}

/// `Some(false)` if the line through the second segment misses the first,
/// `Some(true)` if the labels must be exchanged, `None` if the segments cross.
pub fn labeling(first: &[Vec3<f64>; 2], second: &[Vec3<f64>; 2], tol: f64) -> Option<bool> {
    let inside = |t: f64| t.is_finite() && t > tol && t < 1.0 - tol;
    if !inside(line_hit(&first[0], &first[1], &second[0], &second[1])) {
        Some(false)
    } else if !inside(line_hit(&second[0], &second[1], &first[0], &first[1])) {
        Some(true)
    } else {
        None
    }
}

struct Probe {
    s: [f64; 2],
    ends: [[Vec3<f64>; 2]; 2],
    gap: Option<f64>,
}

fn probe(f: &BendField, i: usize, u: f64, j: usize, v: f64) -> Probe {
    let ends = [[f.left(i, u), f.right(i, u)], [f.left(j, v), f.right(j, v)]];
    let gap = intercept_gap(&ends[0][0], &(ends[0][1] - ends[0][0]), &ends[1][0], &(ends[1][1] - ends[1][0]));
    Probe { s: [f.wrap(f.s(i, u)), f.wrap(f.s(j, v))], ends, gap }
}

fn accept(p: &Probe, warnings: &[String]) -> Option<TPattern> {
    let swap = labeling(&p.ends[0], &p.ends[1], 1e-9)?;
    let (a, b) = if swap { (1, 0) } else { (0, 1) };
    Some(TPattern {
        s: [p.s[a], p.s[b]],
        endpoints: [p.ends[a], p.ends[b]],
        intercept_gap: p.gap.unwrap_or(f64::NAN),
        warnings: warnings.to_vec(),
    })
}

/// Walk each `ι`-invariant essential component and look for a pair whose
/// parallel planes have equal `Z`-intercepts, bisecting sign changes of the
/// intercept difference.
pub fn find_t_pattern(e: &EmbeddedBand<f64>, locus: &PerpLocus, tol: &Tolerances) -> Result<TPattern, BandError> {
    let mut warnings = Vec::new();
    if e.lambda() >= SEVEN_PI_TWELFTHS {
        warnings.push(format!("λ = {} ≥ 7π/12: planes may contain vertical lines", e.lambda()));
    }
    let f = BendField::new(e);
    let scale = e.bend_images().iter().flatten().map(|p| p.norm()).fold(1.0, f64::max);
    let zero = 1e-12 * scale;
    let mut sign_changes = 0;
    for comp in locus.components.iter().filter(|c| c.essential && c.iota_invariant) {
        for &(a, rev) in &comp.arcs {
            let arc = &locus.arcs[a];
            let at = |tau: f64| {
                let t = if rev { 1.0 - tau } else { tau };
                let (u, v) = arc.point(t);
                probe(&f, arc.i, u, arc.j, v)
            };
            let mut prev = at(0.0);
            for k in 0..=ARC_SAMPLES {
                let tau = k as f64 / ARC_SAMPLES as f64;
                let cur = at(tau);
                if let Some(g) = cur.gap {
                    if g.abs() <= zero {
                        if let Some(tp) = accept(&cur, &warnings) {
                            return Ok(tp);
                        }
                    }
                }
                if let (Some(g0), Some(g1)) = (prev.gap, cur.gap) {
                    if k > 0 && (g0 > 0.0) != (g1 > 0.0) && g0.abs() > zero && g1.abs() > zero {
                        sign_changes += 1;
                        let (mut lo, mut hi) = ((k - 1) as f64 / ARC_SAMPLES as f64, tau);
                        let mut glo = g0;
                        while hi - lo > tol.bisection {
                            let mid = 0.5 * (lo + hi);
                            match at(mid).gap {
                                Some(gm) if (gm > 0.0) == (glo > 0.0) => {
                                    lo = mid;
                                    glo = gm;
                                }
                                Some(_) => hi = mid,
                                None => break,
                            }
                        }
                        let best = at(0.5 * (lo + hi));
                        // a jump through a vertical plane is not a root
                        if best.gap.is_some_and(|g| g.abs() < 1e-6 * scale) {
                            if let Some(tp) = accept(&best, &warnings) {
                                return Ok(tp);
                            }
                        }
                    }
                }
                prev = cur;
            }
        }
    }
    Err(BandError::NotFound(format!(
        "{} essential invariant components, {sign_changes} intercept sign changes, none valid",
        locus.components.iter().filter(|c| c.essential && c.iota_invariant).count()
    )))
}

/// The band re-cut along `β₁*` and placed in the T-pattern frame, with the
/// measured quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TPatternReport {
    pub measurements: TPatternMeasurements,
    /// Whether the labeling satisfies `L₁ ≥ R₁`.
    pub l_ge_r: bool,
    /// Index of `β₂` in the re-cut band.
    pub top_index: usize,
    /// Distance of the midpoint of `β₂*` from the plane of the pattern.
    pub plane_residual: f64,
    /// `|cos|` of the angle between the bend images.
    pub perpendicularity: f64,
    pub max_distortion: f64,
    pub split: RidgeSplit,
    #[serde(skip)]
    pub band: Option<EmbeddedBand<f64>>,
}

fn insert_bend(e: &EmbeddedBand<f64>, s: f64) -> Result<EmbeddedBand<f64>, BandError> {
    let f = BendField::new(e);
    let (i, u, _) = f.locate(s);
    if u < 1e-12 || u > 1.0 - 1e-12 {
        return Ok(e.clone());
    }
    let flat = e.flat();
    let (l0, r0) = flat.bend(i);
    let (l1, r1) = flat.bend(i + 1);
    match flat.side(i) {
        Side::Left => e.refine(&[l0 + u * (l1 - l0)], &[]),
        Side::Right => e.refine(&[], &[r0 + u * (r1 - r0)]),
    }
}

fn bend_at(e: &EmbeddedBand<f64>, s: f64) -> usize {
    let f = BendField::new(e);
    let d = |k: usize| {
        let x = (f.wrap(e.flat().midpoint(k)) - f.wrap(s)).abs();
        x.min(f.lambda() - x)
    };
    (0..e.n_triangles()).min_by(|&a, &b| d(a).partial_cmp(&d(b)).unwrap()).unwrap()
}

/// Rigid motion taking bend 0 to the segment from the origin to `(B, 0, 0)`
/// with bend `k` parallel to the `XY`-plane on the `+Y` side.
fn to_frame(e: &EmbeddedBand<f64>, k: usize) -> EmbeddedBand<f64> {
    let origin = e.bend_image(0)[0];
    let r0 = Rotation3::rotation_between(&e.bend_vector(0), &Vec3::x())
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Vec3::z_axis(), std::f64::consts::PI));
    let wt = r0 * e.bend_vector(k);
    let r1 = Rotation3::from_axis_angle(&Unit::new_unchecked(Vec3::x()), -wt.z.atan2(wt.y));
    let r = r1 * r0;
    e.map_images(|_, im| [r * (im[0] - origin), r * (im[1] - origin)])
}

/// Cut the band open along `β₁`, normalize the frame, and measure.
pub fn measure_t_pattern(e: &EmbeddedBand<f64>, tp: &TPattern) -> Result<TPatternReport, BandError> {
    if labeling(&tp.endpoints[0], &tp.endpoints[1], 1e-9) != Some(false) {
        return Err(BandError::InvalidPattern("the line extending β₂* meets β₁*".into()));
    }
    let refined = insert_bend(&insert_bend(e, tp.s[0])?, tp.s[1])?;
    let k1 = bend_at(&refined, tp.s[0]);
    let k2 = bend_at(&refined, tp.s[1]);
    if k1 == k2 {
        return Err(BandError::InvalidPattern("both bends coincide".into()));
    }
    let n = refined.n_triangles();
    let cut = refined.recut(k1)?;
    let k = (k2 + n - k1) % n;
    let mut band = to_frame(&cut, k);
    let big_b = band.bend_vector(0).norm();
    let mid = |b: &EmbeddedBand<f64>| (b.bend_image(k)[0] + b.bend_image(k)[1]) / 2.0;
    if mid(&band).x < 0.0 {
        band = to_frame(&band.mirrored(), k);
    }
    let m = mid(&band);
    if m.x < big_b - 1e-9 && m.x > 1e-9 {
        return Err(BandError::InvalidPattern(format!("β₂* lies over β₁* (x = {})", m.x - big_b)));
    }
    let flat = band.flat();
    let (lb, rb) = flat.bend(0);
    let (lt, rt) = flat.bend(k);
    let (ltop, rtop) = flat.bend(n);
    let wt = band.bend_vector(k);
    let measurements = TPatternMeasurements {
        big_b,
        big_t: wt.norm(),
        b: flat.slope(0),
        t: flat.slope(k),
        l: [lt - lb, rtop - rt],
        r: [rt - rb, ltop - lt],
        x: m.x - big_b,
        y: m.y,
        eps: m.y,
    };
    Ok(TPatternReport {
        l_ge_r: measurements.l[0] >= measurements.r[0],
        top_index: k,
        plane_residual: m.z.abs(),
        perpendicularity: (band.bend_vector(0).normalize().dot(&wt.normalize())).abs(),
        max_distortion: band.max_distortion(),
        split: RidgeSplit::new(&band, 0, k),
        measurements,
        band: Some(band),
    })
}

/// Count bends of zero slope around the band, and report the slope signs of
/// the pattern.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroSlopeReport {
    pub count: usize,
    pub b_positive: bool,
    pub t_negative: bool,
}

/// Zero-slope bends of the measured band: slopes are affine along each
/// triangle, so each strict sign change between consecutive special bends is
/// one zero, and special bends of zero slope count once.
pub fn zero_slope_bends(report: &TPatternReport) -> ZeroSlopeReport {
    let m = &report.measurements;
    let count = report.band.as_ref().map_or(0, |band| {
        let flat = band.flat();
        let n = flat.n_triangles();
        let v: Vec<f64> = (0..=n).map(|k| flat.slope(k)).collect();
        let tiny = 1e-12;
        let crossings = v.windows(2).filter(|w| (w[0] > tiny && w[1] < -tiny) || (w[0] < -tiny && w[1] > tiny)).count();
        crossings + v[..n].iter().filter(|x| x.abs() <= tiny).count()
    });
    ZeroSlopeReport { count, b_positive: m.b > 0.0, t_negative: m.t < 0.0 }
}

impl TPatternReport {
    /// The constraint checks as a report.
    pub fn to_cert_report(&self) -> CertReport {
        let m = &self.measurements;
        let tol = MEASURE_TOL;
        let num = |q: &str, value: f64, lo: Option<f64>, hi: Option<f64>| Check::Numeric {
            quantity: q.into(),
            value,
            lo,
            hi,
            tolerance: tol * (1.0 + value.abs()),
        };
        let lambda = self.band.as_ref().map_or(m.lambda(), |b| b.lambda());
        let mut rep = CertReport::new("t-pattern-measurement");
        rep.step("λ=(S_1+S_2)/2", "aspect ratio from the two halves", num("(S₁+S₂)/2 − λ", m.lambda() - lambda, Some(0.0), Some(0.0)));
        rep.step("does not intersect β₁*", "the line extending β₂* misses β₁*", num("x", m.x, Some(0.0), None));
        rep.step("R_1+R_1 ≥ T", "read as R₁ + R₂ ≥ T", num("R₁ + R₂ − T", m.r[0] + m.r[1] - m.big_t, Some(0.0), None));
        let diag = 2.0 * (m.big_b.powi(2) + m.big_t.powi(2) / 4.0).sqrt();
        rep.step("2\\sqrt{B^2+T^2/4}", "L₁ + L₂ ≥ 2√(B² + T²/4)", num("L₁ + L₂ − 2√(B²+T²/4)", m.l[0] + m.l[1] - diag, Some(0.0), None));
        for j in 1..=2 {
            let v = m.big_b.powi(2) - m.l[j - 1].powi(2) + (m.big_t - m.r[j - 1]).powi(2);
            let ok = const3_check(m, j);
            rep.step(
                "B² − L_j² + (T−R_j)² ≤ 0",
                &format!("constraint for j = {j}"),
                Check::Numeric { quantity: format!("const3[{j}]"), value: if ok { v.min(0.0) } else { v }, lo: None, hi: Some(0.0), tolerance: 0.0 },
            );
        }
        if lambda < 3f64.sqrt() + tol {
            for j in 1..=2 {
                let ok = s_bound(m, j);
                let v = m.s(j) - s_lower_bound(m.b);
                rep.step(
                    "S_j ≥ √3 − (1/3)b(1−2b)",
                    &format!("half-sum bound for j = {j}"),
                    Check::Numeric { quantity: format!("S_{j} − bound"), value: if ok { v.max(0.0) } else { v }, lo: Some(0.0), hi: None, tolerance: 0.0 },
                );
            }
        }
        let s = &self.split;
        rep.step("R_str+L_str=(-B,T,0)", "ridge split sums to the end-point difference", num("residual", s.sum_residual(), None, Some(0.0)));
        rep.step("R_str−L_str=2Θ", "ridge split difference is twice the core displacement", num("residual", s.difference_residual(), None, Some(0.0)));
        if self.max_distortion <= 1.0 + 1e-9 {
            rep.step("‖L_str‖ ≤ L", "split vectors no longer than the flat arcs", num("slack", if s.norms_bounded(tol) { 0.0 } else { -1.0 }, Some(0.0), None));
            if m.r[0] < 1.0 && m.big_t >= 1.0 {
                let py = ((m.big_b).powi(2) + (m.r[0] - m.big_t).powi(2)).sqrt();
                rep.step("by the Pythagorean Theorem", "‖(B, R₁) − (0, T)‖ ≤ L₁", num("L₁ − ‖(B,R₁)−(0,T)‖", m.l[0] - py, Some(0.0), None));
            }
        }
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{fold, perp_pair_locus, FlatBand};
    use std::f64::consts::PI;

    #[test]
    fn planar_triangle_pattern() {
        let e = fold(&FlatBand::equilateral(0.1).unwrap(), &[PI, PI, PI]).unwrap();
        let locus = perp_pair_locus(&e).unwrap();
        let tp = find_t_pattern(&e, &locus, &Tolerances::default()).unwrap();
        assert!(tp.intercept_gap.abs() < 1e-12);
        let rep = measure_t_pattern(&e, &tp).unwrap();
        let m = &rep.measurements;
        let s3 = 3f64.sqrt();
        assert!((m.s(1) - s3).abs() < 1e-9 && (m.s(2) - s3).abs() < 1e-9, "{m:?}");
        assert!((m.big_b - 1.0).abs() < 1e-9 && (m.big_t - 2.0 / s3).abs() < 1e-9, "{m:?}");
        assert!(m.b.abs() < 1e-9 && (m.t + 1.0 / s3).abs() < 1e-9, "{m:?}");
        assert!(m.x.abs() < 1e-9 && m.y.abs() < 1e-9);
        let cert = rep.to_cert_report();
        assert!(cert.is_verified(), "{cert}");
        let z = zero_slope_bends(&rep);
        assert!(z.count >= 2, "{z:?}");
    }

    #[test]
    fn crossing_segments_are_invalid() {
        let a = [Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)];
        let b = [Vec3::new(0.0, -1.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        assert_eq!(labeling(&a, &b, 1e-9), None);
        let c = [Vec3::new(2.0, -1.0, 0.0), Vec3::new(2.0, 1.0, 0.0)];
        assert_eq!(labeling(&a, &c, 1e-9), Some(false));
        assert_eq!(labeling(&c, &a, 1e-9), Some(true));
    }

    #[test]
    fn isometric_bands_satisfy_constraints() {
        for seed in 0..12 {
            let e = crate::band::random_isometric_band(seed).unwrap();
            let locus = perp_pair_locus(&e).unwrap();
            let tp = find_t_pattern(&e, &locus, &Tolerances::default()).unwrap();
            let rep = measure_t_pattern(&e, &tp).unwrap();
            let cert = rep.to_cert_report();
            assert!(cert.is_verified(), "seed {seed}: {cert}");
        }
    }
}
