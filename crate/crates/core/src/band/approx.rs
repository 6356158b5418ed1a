use serde::{Deserialize, Serialize};

use super::{BandError, EmbeddedBand, FlatBand, Vec2, Vec3};

/// One sampled bend of a developable strip: flat heights on the left and
/// right edges and the images of its two ends.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BendSample {
    pub left: f64,
    pub right: f64,
    pub images: [Vec3<f64>; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothApproximation {
    pub band: EmbeddedBand<f64>,
    /// Largest singular-value distortion over all facets.
    pub k: f64,
    /// Largest distance between the surface and the mesh over the probe
    /// points, when a surface was supplied.
    pub proximity: Option<f64>,
    /// Largest angle between a facet and the surface's tangent plane at the
    /// facet's centroid, when a surface was supplied.
    pub tangent_angle: Option<f64>,
}

impl SmoothApproximation {
    pub fn flat(&self) -> &FlatBand<f64> {
        self.band.flat()
    }

    /// `‖I'(p) − Iₙ(p)‖ ≤ K − 1` at every probe point.
    pub fn proximity_ok(&self) -> Option<bool> {
        self.proximity.map(|d| d <= self.k - 1.0)
    }

    /// Smallest `K' ≥ K` for which the mesh is within `K' − 1` of the
    /// surface and tilted from it by less than `K' − 1`.
    pub fn lemma_constant(&self) -> f64 {
        let slack = self.proximity.unwrap_or(0.0).max(self.tangent_angle.unwrap_or(0.0));
        self.k.max(1.0 + slack)
    }
}

/// Triangulate the trapezoids between consecutive sampled bends (one
/// diagonal each, the shorter one) and map each triangle linearly onto the
/// sampled images. The samples must span one period of the strip, so that
/// `l₀ + lₙ = r₀ + rₙ`.
///
/// If `surface` is given it is compared with the mesh at each triangle's
/// centroid and edge midpoints.
pub fn approximate_smooth(
    samples: &[BendSample],
    surface: Option<&dyn Fn(&Vec2<f64>) -> Vec3<f64>>,
) -> Result<SmoothApproximation, BandError> {
    if samples.len() < 2 {
        return Err(BandError::DegenerateMesh("need at least two bends".into()));
    }
    for (k, w) in samples.windows(2).enumerate() {
        if w[1].left <= w[0].left || w[1].right <= w[0].right {
            return Err(BandError::DegenerateMesh(format!("bends {k} and {} cross or touch", k + 1)));
        }
    }
    let left: Vec<f64> = samples.iter().map(|s| s.left).collect();
    let right: Vec<f64> = samples.iter().map(|s| s.right).collect();
    let n = samples.len() - 1;
    let lambda = left[n] - right[0];
    let mut bends = vec![(0, 0)];
    for k in 0..n {
        // diagonal (k+1, k) has flat length² 1 + (r_k − l_{k+1})²
        if (right[k] - left[k + 1]).abs() <= (right[k + 1] - left[k]).abs() {
            bends.push((k + 1, k));
        } else {
            bends.push((k, k + 1));
        }
        bends.push((k + 1, k + 1));
    }
    let flat = FlatBand::new(lambda, left, right, bends)?;
    let images = flat.bend_indices().iter().map(|&(i, j)| [samples[i].images[0], samples[j].images[1]]).collect();
    let band = EmbeddedBand::from_bend_images(flat, images)?;
    let k = band.max_distortion();
    let proximity = surface.map(|map| {
        let flat = band.flat();
        (0..band.n_triangles())
            .flat_map(|i| {
                let p = flat.triangle(i);
                let q = band.facet(i);
                [[1.0, 1.0, 1.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]].map(|w: [f64; 3]| {
                    let total: f64 = w.iter().sum();
                    let fp = (p[0] * w[0] + p[1] * w[1] + p[2] * w[2]) / total;
                    let fq = (q[0] * w[0] + q[1] * w[1] + q[2] * w[2]) / total;
                    (map(&fp) - fq).norm()
                })
            })
            .fold(0.0, f64::max)
    });
    let tangent_angle = surface.map(|map| {
        let h = 1e-6;
        (0..band.n_triangles())
            .map(|i| {
                let p = band.flat().triangle(i);
                let c = (p[0] + p[1] + p[2]) / 3.0;
                let (dx, dy) = (Vec2::new(h, 0.0), Vec2::new(0.0, h));
                let normal = (map(&(c + dx)) - map(&(c - dx))).cross(&(map(&(c + dy)) - map(&(c - dy))));
                let cos = normal.normalize().dot(&band.facet_normal(i)).abs().min(1.0);
                cos.acos()
            })
            .fold(0.0, f64::max)
    });
    Ok(SmoothApproximation { band, k, proximity, tangent_angle })
}

/// A strip wrapped isometrically onto a circular cone. The development's
/// apex sits at `(−apex_offset, height/2)`, left of the strip, so every
/// ruling crosses the strip without meeting another.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConePatch {
    pub height: f64,
    pub apex_offset: f64,
    pub half_angle: f64,
}

impl Default for ConePatch {
    fn default() -> Self {
        ConePatch { height: 1.0, apex_offset: 1.0, half_angle: 0.3 }
    }
}

impl ConePatch {
    fn apex(&self) -> Vec2<f64> {
        Vec2::new(-self.apex_offset, self.height / 2.0)
    }

    /// The developing map onto the cone.
    pub fn map(&self, p: &Vec2<f64>) -> Vec3<f64> {
        let d = p - self.apex();
        let rho = d.norm();
        let (sa, ca) = self.half_angle.sin_cos();
        let theta = d.y.atan2(d.x) / sa;
        Vec3::new(rho * sa * theta.cos(), rho * sa * theta.sin(), rho * ca)
    }

    /// `n + 1` rulings evenly spaced along the left edge.
    pub fn samples(&self, n: usize) -> Vec<BendSample> {
        let a = self.apex();
        let scale = (1.0 + self.apex_offset) / self.apex_offset;
        (0..=n)
            .map(|k| {
                let left = self.height * k as f64 / n as f64;
                let right = a.y + (left - a.y) * scale;
                let images = [self.map(&Vec2::new(0.0, left)), self.map(&Vec2::new(1.0, right))];
                BendSample { left, right, images }
            })
            .collect()
    }

    pub fn approximate(&self, n: usize) -> Result<SmoothApproximation, BandError> {
        approximate_smooth(&self.samples(n), Some(&|p: &Vec2<f64>| self.map(p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_strip_is_exact() {
        let samples: Vec<BendSample> = (0..=6)
            .map(|k| {
                let (l, r) = (k as f64 * 0.3, k as f64 * 0.3 + 0.1 * (k as f64).sin());
                BendSample { left: l, right: r, images: [Vec3::new(0.0, l, 0.0), Vec3::new(1.0, r, 0.0)] }
            })
            .collect();
        // keep the period condition: l₀ + l₆ = r₀ + r₆ needs r₆ = 1.8
        let mut samples = samples;
        samples[6].right = 1.8;
        samples[6].images[1] = Vec3::new(1.0, 1.8, 0.0);
        let planar = |p: &Vec2<f64>| Vec3::new(p.x, p.y, 0.0);
        let a = approximate_smooth(&samples, Some(&planar)).unwrap();
        assert!((a.k - 1.0).abs() < 1e-12, "{}", a.k);
        assert!(a.proximity.unwrap() < 1e-12);
    }

    #[test]
    fn cone_distortion_decreases() {
        let cone = ConePatch::default();
        let ks: Vec<f64> = [8, 16, 32].iter().map(|&n| cone.approximate(n).unwrap().k).collect();
        assert!(ks[0] > ks[1] && ks[1] > ks[2] && ks[2] < 1.01, "{ks:?}");
        let lemma: Vec<f64> = [8, 32, 128].iter().map(|&n| cone.approximate(n).unwrap().lemma_constant()).collect();
        assert!(lemma[0] > lemma[1] && lemma[1] > lemma[2], "{lemma:?}");
    }

    #[test]
    fn cone_map_is_isometric_along_rulings() {
        let cone = ConePatch::default();
        for s in cone.samples(5) {
            let flat = (Vec2::new(1.0, s.right) - Vec2::new(0.0, s.left)).norm();
            assert!(((s.images[1] - s.images[0]).norm() - flat).abs() < 1e-12);
        }
    }

    #[test]
    fn crossing_bends_rejected() {
        let mut s = ConePatch::default().samples(4);
        s.swap(1, 2);
        assert!(matches!(approximate_smooth(&s, None), Err(BandError::DegenerateMesh(_))));
    }
}
