use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{c, BandError, Real, Vec2};

/// Which edge of the parallelogram carries a triangle's ridge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// The sign `μ`: `−1` for a left ridge, `+1` for a right ridge.
    pub fn sign(self) -> i8 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }
}

/// A triangulated flat strip `[0,1] × ℝ` modulo `(x, y) ∼ (1 − x, y + λ)`,
/// cut open along a bend.
///
/// The bottom bend runs from `(0, left[0])` to `(1, right[0])` and the top bend
/// from `(0, left.last)` to `(1, right.last)`; the top bend is the bottom bend
/// with its ends exchanged, so `left.last = right[0] + λ` and
/// `right.last = left[0] + λ`. Bend `k` joins `(0, left[bends[k].0])` and
/// `(1, right[bends[k].1])`; consecutive bends bound one triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatBand<S> {
    lambda: S,
    left: Vec<S>,
    right: Vec<S>,
    bends: Vec<(usize, usize)>,
}

fn ascending<S: Real>(v: &[S]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl<S: Real> FlatBand<S> {
    /// Validate an explicit triangulation.
    pub fn new(lambda: S, left: Vec<S>, right: Vec<S>, bends: Vec<(usize, usize)>) -> Result<Self, BandError> {
        if left.is_empty() || right.is_empty() {
            return Err(BandError::Schema("both ridges need at least one vertex".into()));
        }
        if bends.len() < 2 {
            return Err(BandError::Schema("empty triangle list".into()));
        }
        if !ascending(&left) || !ascending(&right) {
            return Err(BandError::Geometry("ridge parameters must be strictly ascending".into()));
        }
        if lambda <= S::zero() {
            return Err(BandError::Geometry("aspect ratio must be positive".into()));
        }
        let tol = c::<S>(1e-9) * (S::one() + lambda.abs());
        let (nl, nr) = (left.len() - 1, right.len() - 1);
        if (left[nl] - right[0] - lambda).abs() > tol || (right[nr] - left[0] - lambda).abs() > tol {
            return Err(BandError::Geometry("top bend is not the bottom bend shifted by λ".into()));
        }
        if bends[0] != (0, 0) || bends[bends.len() - 1] != (nl, nr) {
            return Err(BandError::Geometry("bends must start at the bottom edge and end at the top edge".into()));
        }
        for (k, w) in bends.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let step = (b.0.wrapping_sub(a.0), b.1.wrapping_sub(a.1));
            if step != (1, 0) && step != (0, 1) {
                return Err(BandError::Geometry(format!("triangles do not tile between bends {k} and {}", k + 1)));
            }
        }
        Ok(FlatBand { lambda, left, right, bends })
    }

    /// Triangulate by repeatedly inserting the shorter of the two candidate
    /// diagonals (ties advance the right ridge).
    pub fn from_ridges(left: Vec<S>, right: Vec<S>, lambda: Option<S>) -> Result<Self, BandError> {
        if left.is_empty() || right.is_empty() {
            return Err(BandError::Schema("both ridges need at least one vertex".into()));
        }
        let lambda = lambda.unwrap_or(left[left.len() - 1] - right[0]);
        let (mut i, mut j) = (0, 0);
        let mut bends = vec![(0, 0)];
        while i + 1 < left.len() || j + 1 < right.len() {
            let advance_left = if i + 1 == left.len() {
                false
            } else if j + 1 == right.len() {
                true
            } else {
                (right[j] - left[i + 1]).abs() < (right[j + 1] - left[i]).abs()
            };
            if advance_left {
                i += 1;
            } else {
                j += 1;
            }
            bends.push((i, j));
        }
        Self::new(lambda, left, right, bends)
    }

    /// The band that folds flat onto an equilateral triangle of
    /// semi-perimeter `√3`, cut along the bend from `(0, 0)` to `(1, y0)`.
    ///
    /// `y0 = 0` gives the horizontal cut, with sign sequence `+1, −1, +1, −1`.
    /// Requires `|y0| < 1/√3`.
    pub fn equilateral(y0: S) -> Result<Self, BandError> {
        let s3 = c::<S>(3.0).sqrt();
        if y0.abs() * s3 >= S::one() {
            return Err(BandError::Geometry("cut must stay inside the first triangle".into()));
        }
        let left = vec![S::zero(), c::<S>(2.0) / s3, y0 + s3];
        let right = vec![y0, S::one() / s3, s3];
        Self::new(s3, left, right, vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)])
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn left(&self) -> &[S] {
        &self.left
    }

    pub fn right(&self) -> &[S] {
        &self.right
    }

    pub fn bend_indices(&self) -> &[(usize, usize)] {
        &self.bends
    }

    pub fn n_triangles(&self) -> usize {
        self.bends.len() - 1
    }

    pub fn n_bends(&self) -> usize {
        self.bends.len()
    }

    /// Heights `(l, r)` of bend `k` on the left and right edges.
    pub fn bend(&self, k: usize) -> (S, S) {
        let (i, j) = self.bends[k];
        (self.left[i], self.right[j])
    }

    /// Flat endpoints of bend `k`.
    pub fn bend_points(&self, k: usize) -> (Vec2<S>, Vec2<S>) {
        let (l, r) = self.bend(k);
        (Vec2::new(S::zero(), l), Vec2::new(S::one(), r))
    }

    /// Slope `r − l` of bend `k`.
    pub fn slope(&self, k: usize) -> S {
        let (l, r) = self.bend(k);
        r - l
    }

    pub fn bend_length(&self, k: usize) -> S {
        let s = self.slope(k);
        (S::one() + s * s).sqrt()
    }

    /// Height of the core-curve point on bend `k`.
    pub fn midpoint(&self, k: usize) -> S {
        let (l, r) = self.bend(k);
        (l + r) / c(2.0)
    }

    /// Ridge side of triangle `i` (between bends `i` and `i + 1`).
    pub fn side(&self, i: usize) -> Side {
        if self.bends[i + 1].0 > self.bends[i].0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// The sign sequence `μ₁, …, μₙ`.
    pub fn signs(&self) -> Vec<i8> {
        (0..self.n_triangles()).map(|i| self.side(i).sign()).collect()
    }

    /// Apex and ridge endpoints (lower, upper) of triangle `i`.
    pub fn triangle(&self, i: usize) -> [Vec2<S>; 3] {
        let (l0, r0) = self.bend_points(i);
        let (l1, r1) = self.bend_points(i + 1);
        match self.side(i) {
            Side::Left => [r0, l0, l1],
            Side::Right => [l0, r0, r1],
        }
    }

    /// Total ridge length, which is `2λ`.
    pub fn boundary_length(&self) -> S {
        (self.left[self.left.len() - 1] - self.left[0]) + (self.right[self.right.len() - 1] - self.right[0])
    }

    /// Insert ridge vertices strictly inside existing ridges, subdividing
    /// each affected triangle into a fan from its apex.
    pub fn refine(&self, extra_left: &[S], extra_right: &[S]) -> Result<Self, BandError> {
        let mut left = self.left.clone();
        let mut right = self.right.clone();
        let mut bends = Vec::new();
        let mut li: Vec<S> = extra_left.to_vec();
        let mut ri: Vec<S> = extra_right.to_vec();
        li.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ri.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let inside = |v: &[S], x: S| v.windows(2).any(|w| x > w[0] && x < w[1]);
        if !li.iter().all(|&x| inside(&self.left, x)) || !ri.iter().all(|&x| inside(&self.right, x)) {
            return Err(BandError::Geometry("refinement vertex outside the ridges".into()));
        }
        left.extend(li.iter().copied());
        right.extend(ri.iter().copied());
        left.sort_by(|a, b| a.partial_cmp(b).unwrap());
        right.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = |v: &[S], x: S| v.iter().position(|&y| y == x).unwrap();
        bends.push((0, 0));
        for k in 1..self.bends.len() {
            let (pl, pr) = self.bend(k - 1);
            let (nl, nr) = self.bend(k);
            let (a, b) = (pos(&left, pl), pos(&right, pr));
            let (a1, b1) = (pos(&left, nl), pos(&right, nr));
            for i in a + 1..=a1 {
                bends.push((i, b));
            }
            for j in b + 1..=b1 {
                bends.push((a, j));
            }
        }
        FlatBand::new(self.lambda, left, right, bends)
    }
}

/// A parsed band specification: the flat strip plus optional fold angles.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpec {
    pub flat: FlatBand<f64>,
    /// One angle per interior bend, in radians.
    pub dihedrals: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    lambda: Option<Value>,
    left_ridge: Vec<Value>,
    right_ridge: Vec<Value>,
    #[serde(default)]
    diagonals: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    dihedrals: Option<Vec<f64>>,
}

fn ridge_param(v: &Value, x_edge: f64, name: &str) -> Result<f64, BandError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| BandError::Schema(format!("{name}: bad number"))),
        Value::Array(a) if a.len() == 2 => {
            let x = a[0].as_f64().ok_or_else(|| BandError::Schema(format!("{name}: bad x")))?;
            let y = a[1].as_f64().ok_or_else(|| BandError::Schema(format!("{name}: bad y")))?;
            if (x - x_edge).abs() > 1e-12 {
                return Err(BandError::Geometry(format!("{name}: vertex ({x}, {y}) is not on the edge x = {x_edge}")));
            }
            Ok(y)
        }
        _ => Err(BandError::Schema(format!("{name}: expected a number or an [x, y] pair"))),
    }
}

/// Parse a band specification from JSON text.
pub fn parse_band_spec_str(text: &str) -> Result<BandSpec, BandError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| BandError::Schema(e.to_string()))?;
    let left = raw.left_ridge.iter().map(|v| ridge_param(v, 0.0, "left_ridge")).collect::<Result<Vec<_>, _>>()?;
    let right = raw.right_ridge.iter().map(|v| ridge_param(v, 1.0, "right_ridge")).collect::<Result<Vec<_>, _>>()?;
    if left.is_empty() || right.is_empty() || left.len() + right.len() < 3 {
        return Err(BandError::Schema("empty triangle list".into()));
    }
    let lambda = match raw.lambda {
        None => None,
        Some(Value::String(s)) if s == "derive" => None,
        Some(Value::Number(n)) => n.as_f64(),
        Some(other) => return Err(BandError::Schema(format!("lambda: expected a number or \"derive\", got {other}"))),
    };
    let flat = match raw.diagonals {
        None => FlatBand::from_ridges(left, right, lambda)?,
        Some(d) => {
            let (nl, nr) = (left.len() - 1, right.len() - 1);
            let lambda = lambda.unwrap_or(left[nl] - right[0]);
            let mut bends = vec![(0, 0)];
            bends.extend(d.iter().map(|p| (p[0], p[1])));
            if bends.last() != Some(&(nl, nr)) {
                bends.push((nl, nr));
            }
            if bends.iter().any(|&(i, j)| i > nl || j > nr) {
                return Err(BandError::Schema("diagonal index out of range".into()));
            }
            FlatBand::new(lambda, left, right, bends)?
        }
    };
    if let Some(d) = &raw.dihedrals {
        if d.len() + 1 != flat.n_triangles() {
            return Err(BandError::Schema(format!(
                "expected {} dihedrals (one per interior bend), got {}",
                flat.n_triangles() - 1,
                d.len()
            )));
        }
    }
    Ok(BandSpec { flat, dihedrals: raw.dihedrals })
}

/// Parse a band specification file.
pub fn parse_band_spec(path: impl AsRef<Path>) -> Result<BandSpec, BandError> {
    parse_band_spec_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = r#"{
        "lambda": "derive",
        "left_ridge": [0, 1.1547005383792515, 1.7320508075688772],
        "right_ridge": [0, 0.5773502691896258, 1.7320508075688772],
        "dihedrals": [3.141592653589793, 3.141592653589793, 3.141592653589793]
    }"#;

    #[test]
    fn triangle_spec_signs() {
        let spec = parse_band_spec_str(TRIANGLE).unwrap();
        assert_eq!(spec.flat.signs(), vec![1, -1, 1, -1]);
        assert!((spec.flat.lambda() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(FlatBand::<f64>::equilateral(0.0).unwrap().signs(), vec![1, -1, 1, -1]);
        assert!((spec.flat.boundary_length() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn interior_vertex_rejected() {
        let s = r#"{"left_ridge": [[0.5, 0.0], 2], "right_ridge": [0, 2]}"#;
        assert!(matches!(parse_band_spec_str(s), Err(BandError::Geometry(_))));
    }

    #[test]
    fn empty_triangles_rejected() {
        let s = r#"{"left_ridge": [0], "right_ridge": [0]}"#;
        assert!(matches!(parse_band_spec_str(s), Err(BandError::Schema(_))));
        let s = r#"{"left_ridge": [], "right_ridge": [0, 1]}"#;
        assert!(matches!(parse_band_spec_str(s), Err(BandError::Schema(_))));
    }

    #[test]
    fn non_tiling_diagonals_rejected() {
        let s = r#"{"left_ridge": [0, 1, 2], "right_ridge": [0, 1, 2], "diagonals": [[1, 1]]}"#;
        assert!(matches!(parse_band_spec_str(s), Err(BandError::Geometry(_))));
    }

    #[test]
    fn refine_keeps_bends() {
        let f = FlatBand::<f64>::equilateral(0.1).unwrap();
        let g = f.refine(&[0.5], &[1.0, 1.2]).unwrap();
        assert_eq!(g.n_triangles(), f.n_triangles() + 3);
        assert_eq!(g.signs(), vec![1, -1, -1, 1, 1, 1, -1]);
        assert!((g.boundary_length() - f.boundary_length()).abs() < 1e-15);
    }
}
