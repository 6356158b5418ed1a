pub mod band;
pub mod certs;
pub mod exactnum;
pub mod lambda;
pub mod poly;
pub mod region;

pub type Rational = num_rational::BigRational;
pub type QPoly = poly::Poly<exactnum::QSqrt3>;
pub type RatPoly = poly::Poly<Rational>;
pub type QBivarPoly = poly::BivarPoly<exactnum::QSqrt3>;
pub type QSturmChain = poly::SturmChain<exactnum::QSqrt3>;

pub use exactnum::{QSqrt3, RadicalExpr, Sign};

pub type Band = band::EmbeddedBand<f64>;
pub type Flat = band::FlatBand<f64>;
pub type Band32 = band::EmbeddedBand<f32>;
pub type Flat32 = band::FlatBand<f32>;
