//! Polygonal Moebius bands: flat triangulated strips, folding into space, the
//! core and ridge curves, the perpendicular-pair locus, T-patterns and
//! polygonal approximation.
//!
//! Geometry is generic over [`Real`] (any `nalgebra::RealField + Copy`, in
//! practice `f32`/`f64`); the locus and T-pattern machinery is `f64` only.

mod approx;
mod export;
mod flat;
mod fold;
mod locus;
mod ridge;
mod search;
mod tpattern;

pub use approx::*;
pub use export::*;
pub use flat::*;
pub use fold::*;
pub use locus::*;
pub use ridge::*;
pub use search::*;
pub use tpattern::*;

use nalgebra::RealField;
use thiserror::Error;

/// Scalar type for band geometry.
pub trait Real: RealField + Copy {}
impl<S: RealField + Copy> Real for S {}

pub type Vec2<S> = nalgebra::Vector2<S>;
pub type Vec3<S> = nalgebra::Vector3<S>;

pub(crate) fn c<S: Real>(x: f64) -> S {
    nalgebra::convert(x)
}

pub(crate) fn to_f64<S: Real>(x: S) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

#[derive(Debug, Error)]
pub enum BandError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("dihedral at bend {bend} is {angle}, expected an angle in [0, 2π)")]
    Dihedral { bend: usize, angle: f64 },
    #[error("closure residual {residual:e} exceeds tolerance {tolerance:e}")]
    ToleranceExceeded { residual: f64, tolerance: f64 },
    #[error("genericity violation: {0}")]
    GenericityViolation(String),
    #[error("perturbation magnitude must be positive, got {0}")]
    NonPositiveMagnitude(f64),
    #[error("no generic perturbation after {0} retries")]
    RetriesExhausted(usize),
    #[error("no T-pattern found: {0}")]
    NotFound(String),
    #[error("invalid T-pattern: {0}")]
    InvalidPattern(String),
    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Numeric tolerances for the floating-point kernel.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub gluing: f64,
    pub closure: f64,
    pub bisection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { gluing: 1e-9, closure: 1e-9, bisection: 1e-12 }
    }
}
