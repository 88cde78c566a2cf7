//! Tau functions on moduli spaces of quadratic differentials with simple poles.
//!
//! The crate has an exact half ([`picard`], [`strata`], [`homology`]) that
//! manipulates divisor classes and homogeneity exponents over ℚ, and a numeric
//! half ([`curve`], [`cycles`], [`periods`], [`bergman`], [`tau`]) that builds
//! the canonical double cover of a genus-0 quadratic differential as a
//! hyperelliptic curve and evaluates periods, the Bergman bidifferential and
//! the tau-function connection on it.

pub mod bergman;
pub mod contour;
pub mod curve;
pub mod cycles;
pub mod error;
pub mod exact;
pub mod homology;
pub mod periods;
pub mod picard;
pub mod quadrature;
pub mod strata;
pub mod suite;
pub mod tau;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
