use nalgebra::{Matrix2, Matrix3, Matrix3x2, Rotation3, SymmetricEigen, Unit};
use serde::{Deserialize, Serialize};

use super::{c, to_f64, BandError, FlatBand, Real, Side, Vec2, Vec3};

/// A flat band mapped into space by one affine map per triangle.
///
/// The map is stored through the images of the bend endpoints: `images[k]`
/// holds the images of the left and right ends of bend `k`. Adjacent facets
/// share their bend images, so gluing holds by construction; the residual of
/// the sequential placement that produced the images is kept in
/// `gluing_residual`. Bend `n` should coincide with bend `0` with its ends
/// exchanged; the mismatch is the closure residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddedBand<S: Real> {
    flat: FlatBand<S>,
    images: Vec<[Vec3<S>; 2]>,
    distortion: Vec<S>,
    gluing_residual: S,
}

fn to3<S: Real>(p: &Vec2<S>) -> Vec3<S> {
    Vec3::new(p.x, p.y, S::zero())
}

/// Distortion factor of the linear part of the affine map taking the flat
/// triangle `p` to `q`: the larger of the top singular value and the
/// reciprocal of the bottom one.
pub fn distortion<S: Real>(p: &[Vec2<S>; 3], q: &[Vec3<S>; 3]) -> S {
    let flat = Matrix2::from_columns(&[p[1] - p[0], p[2] - p[0]]);
    let Some(inv) = flat.try_inverse() else {
        return c(f64::INFINITY);
    };
    let img = Matrix3x2::from_columns(&[q[1] - q[0], q[2] - q[0]]);
    let a = img * inv;
    let eig = SymmetricEigen::new(a.transpose() * a);
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    if lo <= S::zero() {
        return c(f64::INFINITY);
    }
    let (smin, smax) = (lo.sqrt(), hi.sqrt());
    smax.max(S::one() / smin)
}

impl<S: Real> EmbeddedBand<S> {
    /// Build from bend-endpoint images; one `[left, right]` pair per bend.
    pub fn from_bend_images(flat: FlatBand<S>, images: Vec<[Vec3<S>; 2]>) -> Result<Self, BandError> {
        if images.len() != flat.n_bends() {
            return Err(BandError::Schema(format!("expected {} bend images, got {}", flat.n_bends(), images.len())));
        }
        let mut band = EmbeddedBand { flat, images, distortion: Vec::new(), gluing_residual: S::zero() };
        band.distortion = (0..band.flat.n_triangles()).map(|i| distortion(&band.flat.triangle(i), &band.facet(i))).collect();
        Ok(band)
    }

    pub fn flat(&self) -> &FlatBand<S> {
        &self.flat
    }

    pub fn lambda(&self) -> S {
        self.flat.lambda()
    }

    pub fn n_triangles(&self) -> usize {
        self.flat.n_triangles()
    }

    /// Images of the left and right ends of bend `k`.
    pub fn bend_image(&self, k: usize) -> [Vec3<S>; 2] {
        self.images[k]
    }

    pub fn bend_images(&self) -> &[[Vec3<S>; 2]] {
        &self.images
    }

    /// `I(right end) − I(left end)` for bend `k`.
    pub fn bend_vector(&self, k: usize) -> Vec3<S> {
        self.images[k][1] - self.images[k][0]
    }

    /// Images of the apex and the lower and upper ridge ends of triangle `i`.
    pub fn facet(&self, i: usize) -> [Vec3<S>; 3] {
        let (a, b) = (self.images[i], self.images[i + 1]);
        match self.flat.side(i) {
            Side::Left => [a[1], a[0], b[0]],
            Side::Right => [a[0], a[1], b[1]],
        }
    }

    /// Unit normal of facet `i`, oriented by the flat orientation.
    pub fn facet_normal(&self, i: usize) -> Vec3<S> {
        let f = self.facet(i);
        let n = (f[1] - f[0]).cross(&(f[2] - f[0]));
        let n = if self.flat.side(i) == Side::Left { -n } else { n };
        n.normalize()
    }

    /// Per-triangle distortion factors `K ≥ 1`.
    pub fn distortion(&self) -> &[S] {
        &self.distortion
    }

    pub fn max_distortion(&self) -> S {
        self.distortion.iter().copied().fold(S::one(), |a, b| a.max(b))
    }

    pub fn gluing_residual(&self) -> S {
        self.gluing_residual
    }

    /// Distance between the images of the top bend and the exchanged bottom bend.
    pub fn closure_residual(&self) -> S {
        let n = self.images.len() - 1;
        let (b, t) = (self.images[0], self.images[n]);
        (t[0] - b[1]).norm().max((t[1] - b[0]).norm())
    }

    /// Largest deviation of a facet edge length from the flat edge length.
    pub fn isometry_residual(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.n_triangles() {
            let (p, q) = (self.flat.triangle(i), self.facet(i));
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                worst = worst.max(((q[a] - q[b]).norm() - (p[a] - p[b]).norm()).abs());
            }
        }
        worst
    }

    /// Images of the bend midpoints: the vertices of the core curve.
    pub fn core_curve(&self) -> Vec<Vec3<S>> {
        self.images.iter().map(|[l, r]| (l + r) / c::<S>(2.0)).collect()
    }

    /// Postcompose with a linear map.
    pub fn transformed(&self, m: &Matrix3<S>) -> Self {
        let images = self.images.iter().map(|[l, r]| [m * l, m * r]).collect();
        let mut out = Self::from_bend_images(self.flat.clone(), images).expect("same bend count");
        out.gluing_residual = self.gluing_residual;
        out
    }

    /// Move every bend image by `f`, recomputing distortion.
    pub fn map_images(&self, f: impl Fn(usize, &[Vec3<S>; 2]) -> [Vec3<S>; 2]) -> Self {
        let images = self.images.iter().enumerate().map(|(k, im)| f(k, im)).collect();
        Self::from_bend_images(self.flat.clone(), images).expect("same bend count")
    }

    /// Images of the left and right ridge vertices.
    pub fn vertex_images(&self) -> (Vec<Vec3<S>>, Vec<Vec3<S>>) {
        let (nl, nr) = (self.flat.left().len(), self.flat.right().len());
        let mut left = vec![Vec3::zeros(); nl];
        let mut right = vec![Vec3::zeros(); nr];
        for (k, &(i, j)) in self.flat.bend_indices().iter().enumerate() {
            left[i] = self.images[k][0];
            right[j] = self.images[k][1];
        }
        (left, right)
    }

    /// Subdivide ridges at the given heights; new bend images come from the
    /// affine map on the containing facet.
    pub fn refine(&self, extra_left: &[S], extra_right: &[S]) -> Result<Self, BandError> {
        let flat = self.flat.refine(extra_left, extra_right)?;
        let (li, ri) = self.vertex_images();
        let lerp = |heights: &[S], imgs: &[Vec3<S>], y: S| -> Vec3<S> {
            let k = heights.windows(2).position(|w| y >= w[0] && y <= w[1]).unwrap_or(0);
            let s = (y - heights[k]) / (heights[k + 1] - heights[k]);
            imgs[k] * (S::one() - s) + imgs[k + 1] * s
        };
        let images = (0..flat.n_bends())
            .map(|k| {
                let (l, r) = flat.bend(k);
                [lerp(self.flat.left(), &li, l), lerp(self.flat.right(), &ri, r)]
            })
            .collect();
        let mut out = Self::from_bend_images(flat, images)?;
        out.gluing_residual = self.gluing_residual;
        Ok(out)
    }

    /// Reflect the flat strip in its mid-line `x = 1/2`: left and right trade
    /// places, bend images keep their points.
    pub fn mirrored(&self) -> Self {
        let f = &self.flat;
        let flat = FlatBand::new(
            f.lambda(),
            f.right().to_vec(),
            f.left().to_vec(),
            f.bend_indices().iter().map(|&(i, j)| (j, i)).collect(),
        )
        .expect("mirror of a valid band is valid");
        let images = self.images.iter().map(|[l, r]| [*r, *l]).collect();
        let mut out = Self::from_bend_images(flat, images).expect("same bend count");
        out.gluing_residual = self.gluing_residual;
        out
    }

    /// Cut the band open along bend `k0` instead of bend `0`. Bends past the
    /// old top continue through the identification `(x, y) ∼ (1 − x, y + λ)`.
    pub fn recut(&self, k0: usize) -> Result<Self, BandError> {
        let f = &self.flat;
        let n = f.n_triangles();
        if k0 == 0 || k0 == n {
            return Ok(self.clone());
        }
        let lambda = f.lambda();
        let tol = c::<S>(1e-12) * (S::one() + lambda.abs());
        let mut hl: Vec<S> = Vec::new();
        let mut hr: Vec<S> = Vec::new();
        let mut bends = Vec::new();
        let mut images = Vec::new();
        for k in k0..=k0 + n {
            let ((l, r), im) = if k <= n {
                (f.bend(k), self.images[k])
            } else {
                let (l, r) = f.bend(k - n);
                let im = self.images[k - n];
                ((r + lambda, l + lambda), [im[1], im[0]])
            };
            if hl.last().is_none_or(|&x| (l - x).abs() > tol) {
                hl.push(l);
            }
            if hr.last().is_none_or(|&x| (r - x).abs() > tol) {
                hr.push(r);
            }
            bends.push((hl.len() - 1, hr.len() - 1));
            images.push(im);
        }
        let flat = FlatBand::new(lambda, hl, hr, bends)?;
        let mut out = Self::from_bend_images(flat, images)?;
        out.gluing_residual = self.gluing_residual;
        Ok(out)
    }

    pub fn to_f64(&self) -> EmbeddedBand<f64> {
        let v = |p: &Vec3<S>| Vec3::new(to_f64(p.x), to_f64(p.y), to_f64(p.z));
        let flat = FlatBand::new(
            to_f64(self.flat.lambda()),
            self.flat.left().iter().map(|&x| to_f64(x)).collect(),
            self.flat.right().iter().map(|&x| to_f64(x)).collect(),
            self.flat.bend_indices().to_vec(),
        )
        .expect("valid band stays valid");
        let images = self.images.iter().map(|[l, r]| [v(l), v(r)]).collect();
        let mut out = EmbeddedBand::from_bend_images(flat, images).expect("same bend count");
        out.gluing_residual = to_f64(self.gluing_residual);
        out
    }
}

/// Fold the strip: place the first triangle in the `XY`-plane with the bottom
/// bend from the origin to `(B, 0, 0)`, then rotate each next triangle about
/// the shared bend (axis from its left end to its right end, right-handed) by
/// the given angle. `0` continues in the plane; `π` folds flat.
pub fn fold<S: Real>(flat: &FlatBand<S>, dihedrals: &[S]) -> Result<EmbeddedBand<S>, BandError> {
    let n = flat.n_triangles();
    if dihedrals.len() + 1 != n {
        return Err(BandError::Schema(format!("expected {} dihedrals, got {}", n - 1, dihedrals.len())));
    }
    let two_pi = S::two_pi();
    for (k, &a) in dihedrals.iter().enumerate() {
        if !(a >= S::zero() && a < two_pi) {
            return Err(BandError::Dihedral { bend: k + 1, angle: to_f64(a) });
        }
    }
    let points: Vec<_> = (0..=n).map(|k| flat.bend_points(k)).collect();
    let (images, glue) = fold_bends(&points, dihedrals);
    let mut band = EmbeddedBand::from_bend_images(flat.clone(), images)?;
    band.gluing_residual = glue;
    Ok(band)
}

/// Place a chain of bends given by their flat end points, folding by
/// `dihedrals[k − 1]` across interior bend `k`. Returns the bend images and
/// the gluing residual.
pub(crate) fn fold_bends<S: Real>(points: &[(Vec2<S>, Vec2<S>)], dihedrals: &[S]) -> (Vec<[Vec3<S>; 2]>, S) {
    let n = points.len() - 1;
    let (l0, r0) = points[0];
    let d = (r0 - l0).normalize();
    let mut q = Matrix3::new(d.x, d.y, S::zero(), -d.y, d.x, S::zero(), S::zero(), S::zero(), S::one());
    let mut t = -(q * to3(&l0));
    let place = |q: &Matrix3<S>, t: &Vec3<S>, p: &Vec2<S>| q * to3(p) + t;

    let mut images = Vec::with_capacity(n + 1);
    images.push([place(&q, &t, &l0), place(&q, &t, &r0)]);
    let mut glue = S::zero();
    for k in 1..=n {
        let (lk, rk) = points[k];
        let (a, b) = (place(&q, &t, &lk), place(&q, &t, &rk));
        images.push([a, b]);
        if k < n {
            let rot = Rotation3::from_axis_angle(&Unit::new_normalize(b - a), dihedrals[k - 1]);
            let m = *rot.matrix();
            q = m * q;
            t = a + m * (t - a);
            glue = glue.max((place(&q, &t, &lk) - a).norm()).max((place(&q, &t, &rk) - b).norm());
        }
    }
    (images, glue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_folded_triangle_closes() {
        for y0 in [0.0, 0.1, -0.3] {
            let flat = FlatBand::<f64>::equilateral(y0).unwrap();
            let e = fold(&flat, &[PI, PI, PI]).unwrap();
            assert!(e.closure_residual() < 1e-12, "y0 = {y0}: {}", e.closure_residual());
            assert!(e.isometry_residual() < 1e-12);
            assert!(e.gluing_residual() < 1e-12);
            assert!((e.max_distortion() - 1.0).abs() < 1e-9);
            assert!(e.bend_images().iter().flatten().all(|p| p.z.abs() < 1e-12));
            let b = flat.bend_length(0);
            assert!((e.bend_vector(0) - Vec3::new(b, 0.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn refine_recut_mirror_preserve_the_map() {
        let e = fold(&FlatBand::<f64>::equilateral(0.1).unwrap(), &[PI, PI, PI]).unwrap();
        let r = e.refine(&[0.5], &[1.0]).unwrap();
        assert!(r.isometry_residual() < 1e-12);
        assert!(r.closure_residual() < 1e-12);
        for k0 in 1..r.n_triangles() {
            let c = r.recut(k0).unwrap();
            assert_eq!(c.n_triangles(), r.n_triangles());
            assert!(c.closure_residual() < 1e-12, "k0 = {k0}");
            assert!(c.isometry_residual() < 1e-12);
            assert!((c.bend_vector(0) - r.bend_vector(k0)).norm() < 1e-15);
        }
        let m = r.mirrored();
        assert_eq!(m.flat().signs(), r.flat().signs().iter().map(|s| -s).collect::<Vec<_>>());
        assert!(m.closure_residual() < 1e-12 && m.isometry_residual() < 1e-12);
    }

    #[test]
    fn f32_fold_matches_f64() {
        let flat = FlatBand::<f32>::equilateral(0.1).unwrap();
        let e = fold(&flat, &[std::f32::consts::PI; 3]).unwrap();
        assert!(e.closure_residual() < 1e-5);
    }

    #[test]
    fn refined_fold_with_flat_fans_closes() {
        let flat = FlatBand::<f64>::equilateral(0.1).unwrap().refine(&[0.5], &[1.0, 1.2]).unwrap();
        // creases sit at the original interior bends
        let angles = [PI, 0.0, PI, 0.0, 0.0, PI];
        let e = fold(&flat, &angles).unwrap();
        assert!(e.closure_residual() < 1e-12);
    }

    #[test]
    fn generic_angles_leave_a_gap() {
        let flat = FlatBand::<f64>::equilateral(0.0).unwrap();
        let e = fold(&flat, &[2.0, 2.5, 3.0]).unwrap();
        assert!(e.closure_residual() > 1e-3);
        assert!(e.isometry_residual() < 1e-12);
    }

    #[test]
    fn bad_angles_rejected() {
        let flat = FlatBand::<f64>::equilateral(0.0).unwrap();
        assert!(matches!(fold(&flat, &[PI, 7.0, PI]), Err(BandError::Dihedral { bend: 2, .. })));
        assert!(matches!(fold(&flat, &[PI]), Err(BandError::Schema(_))));
    }

    #[test]
    fn fold_then_unfold() {
        let flat = FlatBand::<f64>::new(2.0, vec![0.0, 1.0, 2.0], vec![0.0, 2.0], vec![(0, 0), (1, 0), (2, 0), (2, 1)]).unwrap();
        let plane = fold(&flat, &[0.0, 0.0]).unwrap();
        let e = fold(&flat, &[1.1, 0.0]).unwrap();
        let [a, b] = e.bend_image(1);
        let undo = *Rotation3::from_axis_angle(&Unit::new_normalize(b - a), -1.1).matrix();
        let back = e.map_images(|k, im| if k < 2 { *im } else { [a + undo * (im[0] - a), a + undo * (im[1] - a)] });
        let worst = (0..4).map(|k| (back.bend_image(k)[0] - plane.bend_image(k)[0]).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12);
        assert!(e.isometry_residual() < 1e-12);
    }
}
