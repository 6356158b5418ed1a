use std::collections::HashMap;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BandError, EmbeddedBand, Vec3};

/// Cosine below which two directions count as perpendicular.
pub const PERP_TOL: f64 = 1e-9;

/// The bend field of a band over its core circle.
///
/// Within triangle `i` the bends are parametrized by `u ∈ [0, 1]` from bend
/// `i` to bend `i + 1`; both endpoint images and the core parameter are affine
/// in `u`. The core parameter `s` runs over `[m₀, m₀ + λ]` where `mₖ` is the
/// height of the midpoint of bend `k`.
#[derive(Debug, Clone)]
pub struct BendField {
    lambda: f64,
    m: Vec<f64>,
    images: Vec<[Vec3<f64>; 2]>,
}

impl BendField {
    pub fn new(e: &EmbeddedBand<f64>) -> Self {
        let flat = e.flat();
        BendField {
            lambda: flat.lambda(),
            m: (0..flat.n_bends()).map(|k| flat.midpoint(k)).collect(),
            images: e.bend_images().to_vec(),
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.m.len() - 1
    }

    pub fn left(&self, i: usize, u: f64) -> Vec3<f64> {
        self.images[i][0] * (1.0 - u) + self.images[i + 1][0] * u
    }

    pub fn right(&self, i: usize, u: f64) -> Vec3<f64> {
        self.images[i][1] * (1.0 - u) + self.images[i + 1][1] * u
    }

    pub fn w(&self, i: usize, u: f64) -> Vec3<f64> {
        self.right(i, u) - self.left(i, u)
    }

    /// Core parameter of the bend at `(i, u)`.
    pub fn s(&self, i: usize, u: f64) -> f64 {
        self.m[i] + u * (self.m[i + 1] - self.m[i])
    }

    /// Reduce a core parameter into `[m₀, m₀ + λ)`.
    pub fn wrap(&self, s: f64) -> f64 {
        self.m[0] + (s - self.m[0]).rem_euclid(self.lambda)
    }

    /// Triangle and local parameter of the bend at core parameter `s`, plus
    /// the sign `±1` relating the returned bend vector to the one at `s`
    /// (each trip around the circle flips it).
    pub fn locate(&self, s: f64) -> (usize, f64, f64) {
        let turns = ((s - self.m[0]) / self.lambda).floor();
        let t = self.wrap(s);
        let i = match self.m.windows(2).position(|w| t >= w[0] && t < w[1]) {
            Some(i) => i,
            None => self.n() - 1,
        };
        let u = ((t - self.m[i]) / (self.m[i + 1] - self.m[i])).clamp(0.0, 1.0);
        let flip = if (turns as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        (i, u, flip)
    }

    /// Bend vector at core parameter `s`, continued across the seam.
    pub fn w_at(&self, s: f64) -> Vec3<f64> {
        let (i, u, flip) = self.locate(s);
        self.w(i, u) * flip
    }

    /// Bilinear coefficients `[a, b, c, d]` of `wᵢ(u) · wⱼ(v) = a + bu + cv + duv`.
    pub fn coefficients(&self, i: usize, j: usize) -> [f64; 4] {
        let (a0, a1) = (self.w(i, 0.0), self.w(i, 1.0) - self.w(i, 0.0));
        let (b0, b1) = (self.w(j, 0.0), self.w(j, 1.0) - self.w(j, 0.0));
        [a0.dot(&b0), a1.dot(&b0), a0.dot(&b1), a1.dot(&b1)]
    }
}

/// Check that no two facets lie in perpendicular planes and no two special
/// bend images are perpendicular.
pub fn check_genericity(e: &EmbeddedBand<f64>) -> Result<(), BandError> {
    let n = e.n_triangles();
    let normals: Vec<_> = (0..n).map(|i| e.facet_normal(i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if normals[i].dot(&normals[j]).abs() < PERP_TOL {
                return Err(BandError::GenericityViolation(format!("facets {i} and {j} lie in perpendicular planes")));
            }
        }
    }
    let dirs: Vec<_> = (0..n).map(|k| e.bend_vector(k).normalize()).collect();
    for a in 0..n {
        for b in a + 1..n {
            if dirs[a].dot(&dirs[b]).abs() < PERP_TOL {
                return Err(BandError::GenericityViolation(format!("special bends {a} and {b} are perpendicular")));
            }
        }
    }
    Ok(())
}

/// Postcompose with a random linear map `I + E`, `‖E‖ ≤ magnitude/2`, until
/// the result is generic.
pub fn perturb_to_generic(e: &EmbeddedBand<f64>, magnitude: f64, seed: u64) -> Result<EmbeddedBand<f64>, BandError> {
    const RETRIES: usize = 32;
    if !(magnitude > 0.0) {
        return Err(BandError::NonPositiveMagnitude(magnitude));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRIES {
        let mut m: Matrix3<f64> = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        // Frobenius norm bounds the operator norm
        m *= magnitude / (2.0 * m.norm().max(1e-300));
        let p = e.transformed(&(Matrix3::identity() + m));
        if check_genericity(&p).is_ok() {
            return Ok(p);
        }
    }
    Err(BandError::RetriesExhausted(RETRIES))
}

/// One arc of the locus: the perpendicular pairs with the first bend in
/// triangle `i` and the second in triangle `j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocusArc {
    pub i: usize,
    pub j: usize,
    /// Endpoints as `(u, v)` local parameters.
    pub ends: [[f64; 2]; 2],
    pub coeffs: [f64; 4],
}

impl LocusArc {
    /// Point at `τ ∈ [0, 1]` along the arc, as `(u, v)`.
    pub fn point(&self, tau: f64) -> (f64, f64) {
        let [a, b, c, d] = self.coeffs;
        let ([u0, v0], [u1, v1]) = (self.ends[0], self.ends[1]);
        if (u1 - u0).abs() >= (v1 - v0).abs() {
            let u = u0 + tau * (u1 - u0);
            (u, (-(a + b * u) / (c + d * u)).clamp(0.0, 1.0))
        } else {
            let v = v0 + tau * (v1 - v0);
            ((-(a + c * v) / (b + d * v)).clamp(0.0, 1.0), v)
        }
    }
}

/// A connected component of the locus, a closed chain of arcs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocusComponent {
    /// Arc indices in traversal order with the traversal direction
    /// (`false` runs from `ends[0]` to `ends[1]`).
    pub arcs: Vec<(usize, bool)>,
    /// Number of turns around the annulus in the first coordinate.
    pub winding: i64,
    pub essential: bool,
    pub iota_invariant: bool,
}

/// The perpendicular-pair locus in the annulus of ordered bend pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerpLocus {
    pub lambda: f64,
    pub arcs: Vec<LocusArc>,
    pub components: Vec<LocusComponent>,
}

impl PerpLocus {
    pub fn essential_count(&self) -> usize {
        self.components.iter().filter(|c| c.essential).count()
    }

    pub fn has_invariant_essential(&self) -> bool {
        self.components.iter().any(|c| c.essential && c.iota_invariant)
    }
}

fn boundary_zeros(coeffs: [f64; 4]) -> Vec<[f64; 2]> {
    let [a, b, c, d] = coeffs;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let mut push = |p: [f64; 2]| {
        if p.iter().all(|x| (-1e-12..=1.0 + 1e-12).contains(x))
            && !pts.iter().any(|q| (q[0] - p[0]).abs() < 1e-12 && (q[1] - p[1]).abs() < 1e-12)
        {
            pts.push([p[0].clamp(0.0, 1.0), p[1].clamp(0.0, 1.0)]);
        }
    };
    // u = 0, u = 1, v = 0, v = 1
    if c != 0.0 {
        push([0.0, -a / c]);
    }
    if c + d != 0.0 {
        push([1.0, -(a + b) / (c + d)]);
    }
    if b != 0.0 {
        push([-a / b, 0.0]);
    }
    if b + d != 0.0 {
        push([-(a + c) / (b + d), 1.0]);
    }
    pts
}

fn pair_arcs(i: usize, j: usize, coeffs: [f64; 4]) -> Result<Vec<LocusArc>, BandError> {
    let pts = boundary_zeros(coeffs);
    let [_, _, c, d] = coeffs;
    let arc = |p: [f64; 2], q: [f64; 2]| LocusArc { i, j, ends: [p, q], coeffs };
    match pts.len() {
        0 => Ok(vec![]),
        2 => Ok(vec![arc(pts[0], pts[1])]),
        4 => {
            let (mut neg, mut pos): (Vec<_>, Vec<_>) = (vec![], vec![]);
            for p in pts {
                if c + d * p[0] < 0.0 {
                    neg.push(p)
                } else {
                    pos.push(p)
                }
            }
            if neg.len() != 2 {
                return Err(BandError::GenericityViolation(format!("facet pair ({i}, {j}): unresolved branches")));
            }
            Ok(vec![arc(neg[0], neg[1]), arc(pos[0], pos[1])])
        }
        k => Err(BandError::GenericityViolation(format!("facet pair ({i}, {j}): {k} boundary crossings"))),
    }
}

/// Endpoint identity: which coordinate sits on a special bend, which bend,
/// and the wrapped core parameter of the other coordinate.
#[derive(Debug, Clone, Copy)]
struct Node {
    coord: u8,
    bend: usize,
    other: f64,
}

fn node_of(f: &BendField, arc: &LocusArc, end: usize) -> Node {
    let n = f.n();
    let [u, v] = arc.ends[end];
    let special = |x: f64| x == 0.0 || x == 1.0;
    if special(u) && !(special(v) && (u - 0.5).abs() < (v - 0.5).abs()) {
        Node { coord: 1, bend: (arc.i + u as usize) % n, other: f.wrap(f.s(arc.j, v)) }
    } else {
        Node { coord: 2, bend: (arc.j + v as usize) % n, other: f.wrap(f.s(arc.i, u)) }
    }
}

fn same_node(f: &BendField, a: &Node, b: &Node) -> bool {
    let d = (a.other - b.other).abs();
    a.coord == b.coord && a.bend == b.bend && d.min(f.lambda - d) < 1e-7
}

/// Compute the locus. Requires a generic band (see [`check_genericity`]).
pub fn perp_pair_locus(e: &EmbeddedBand<f64>) -> Result<PerpLocus, BandError> {
    check_genericity(e)?;
    let f = BendField::new(e);
    let n = f.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let per_pair: Vec<Result<Vec<LocusArc>, BandError>> =
        pairs.par_iter().map(|&(i, j)| pair_arcs(i, j, f.coefficients(i, j))).collect();
    let mut arcs = Vec::new();
    for r in per_pair {
        arcs.extend(r?);
    }

    // match endpoints: bucket by (coordinate, special bend)
    let mut buckets: HashMap<(u8, usize), Vec<(usize, usize, Node)>> = HashMap::new();
    for (a, arc) in arcs.iter().enumerate() {
        for end in 0..2 {
            let nd = node_of(&f, arc, end);
            buckets.entry((nd.coord, nd.bend)).or_default().push((a, end, nd));
        }
    }
    let mut partner: Vec<[Option<(usize, usize)>; 2]> = vec![[None, None]; arcs.len()];
    for list in buckets.values() {
        for (x, &(a, ea, na)) in list.iter().enumerate() {
            let matches: Vec<_> = list
                .iter()
                .enumerate()
                .filter(|&(y, (_, _, nb))| y != x && same_node(&f, &na, nb))
                .map(|(_, &(b, eb, _))| (b, eb))
                .collect();
            if matches.len() != 1 {
                return Err(BandError::GenericityViolation(format!(
                    "arc endpoint on special bend {} meets {} other arcs",
                    na.bend,
                    matches.len()
                )));
            }
            partner[a][ea] = Some(matches[0]);
        }
    }

    // walk cycles
    let mut seen = vec![false; arcs.len()];
    let mut comp_of = vec![usize::MAX; arcs.len()];
    let mut components = Vec::new();
    for start in 0..arcs.len() {
        if seen[start] {
            continue;
        }
        let mut chain = Vec::new();
        let (mut a, mut rev) = (start, false);
        let mut ds1 = 0.0;
        loop {
            seen[a] = true;
            comp_of[a] = components.len();
            chain.push((a, rev));
            let (from, to) = if rev { (1, 0) } else { (0, 1) };
            let arc = &arcs[a];
            ds1 += f.s(arc.i, arc.ends[to][0]) - f.s(arc.i, arc.ends[from][0]);
            let (b, eb) = partner[a][to].expect("matched");
            a = b;
            rev = eb == 1;
            if a == start {
                break;
            }
            if chain.len() > arcs.len() {
                return Err(BandError::GenericityViolation("locus arcs do not close up".into()));
            }
        }
        let winding = (ds1 / f.lambda).round() as i64;
        components.push(LocusComponent { arcs: chain, winding, essential: winding != 0, iota_invariant: false });
    }

    // ι swaps coordinates: the endpoint (coord, bend, other) maps to (3 − coord, bend, other)
    for (ci, comp) in components.iter_mut().enumerate() {
        let (a, _) = comp.arcs[0];
        let nd = node_of(&f, &arcs[a], 0);
        let image = Node { coord: 3 - nd.coord, ..nd };
        let hit = buckets
            .get(&(image.coord, image.bend))
            .and_then(|l| l.iter().find(|(_, _, m)| same_node(&f, &image, m)))
            .map(|&(b, _, _)| comp_of[b]);
        comp.iota_invariant = hit == Some(ci);
    }
    Ok(PerpLocus { lambda: f.lambda, arcs, components })
}

/// Number of `s₂ ∈ (s₁, s₁ + λ)` with `w(s₁) ⟂ w(s₂)`: the count of sign
/// changes of `w(s₁) · w(s)` along a transverse arc of the annulus.
pub fn transverse_count(e: &EmbeddedBand<f64>, s1: f64) -> usize {
    let f = BendField::new(e);
    let w1 = f.w_at(s1);
    let mut stops: Vec<f64> = (0..f.n())
        .map(|k| {
            let s = f.m[k] + f.lambda * ((s1 - f.m[k]) / f.lambda).ceil();
            if s <= s1 {
                s + f.lambda
            } else {
                s
            }
        })
        .filter(|&s| s < s1 + f.lambda)
        .collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut vals = vec![w1.dot(&w1)];
    vals.extend(stops.iter().map(|&s| w1.dot(&f.w_at(s))));
    vals.push(-w1.dot(&w1));
    vals.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{fold, FlatBand};
    use std::f64::consts::PI;

    #[test]
    fn horizontal_cut_is_not_generic() {
        let e = fold(&FlatBand::equilateral(0.0).unwrap(), &[PI, PI, PI]).unwrap();
        assert!(matches!(perp_pair_locus(&e), Err(BandError::GenericityViolation(_))));
    }

    #[test]
    fn perpendicular_facets_violate() {
        let e = fold(&FlatBand::equilateral(0.1).unwrap(), &[PI / 2.0, PI, PI]).unwrap();
        let err = check_genericity(&e).unwrap_err();
        assert!(err.to_string().contains("perpendicular planes"));
    }

    #[test]
    fn random_bands_have_odd_essential_count() {
        for seed in 0..20 {
            let e = crate::band::random_closed_band(seed, 0.03).unwrap();
            assert!(e.closure_residual() < 1e-12);
            let l = perp_pair_locus(&e).unwrap();
            assert_eq!(l.essential_count() % 2, 1, "seed {seed}: {:?}", l.components.iter().map(|c| c.winding).collect::<Vec<_>>());
            assert!(l.has_invariant_essential(), "seed {seed}");
            let f = BendField::new(&e);
            for s1 in [0.123, 0.777, 1.5] {
                assert_eq!(transverse_count(&e, f.wrap(s1)) % 2, 1);
            }
        }
    }

    #[test]
    fn arcs_match_direct_partner_count() {
        for seed in 100..110 {
            let e = crate::band::random_closed_band(seed, 0.25).unwrap();
            let l = perp_pair_locus(&e).unwrap();
            let f = BendField::new(&e);
            for k in 0..25 {
                let s1 = f.wrap(0.0137 + k as f64 * f.lambda() / 25.0);
                let (i, u, _) = f.locate(s1);
                let through = l
                    .arcs
                    .iter()
                    .filter(|a| a.i == i)
                    .filter(|a| {
                        let (u0, u1) = (a.ends[0][0].min(a.ends[1][0]), a.ends[0][0].max(a.ends[1][0]));
                        u > u0 && u < u1
                    })
                    .count();
                // brute force: sign changes of w(s1)·w(s) on a fine grid
                let w1 = f.w_at(s1);
                let m = 20000;
                let vals: Vec<f64> = (1..m).map(|t| w1.dot(&f.w_at(s1 + f.lambda() * t as f64 / m as f64))).collect();
                let brute = vals.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
                assert_eq!(through, brute, "seed {seed}, s1 = {s1}");
                assert_eq!(transverse_count(&e, s1), brute);
            }
        }
    }

    #[test]
    fn planar_triangle_locus() {
        let e = fold(&FlatBand::equilateral(0.1).unwrap(), &[PI, PI, PI]).unwrap();
        let l = perp_pair_locus(&e).unwrap();
        assert_eq!(l.essential_count() % 2, 1);
        assert!(l.has_invariant_essential());
    }

    #[test]
    fn zero_magnitude_rejected() {
        let e = fold(&FlatBand::equilateral(0.1).unwrap(), &[PI, PI, PI]).unwrap();
        assert!(matches!(perturb_to_generic(&e, 0.0, 1), Err(BandError::NonPositiveMagnitude(_))));
    }
}
