//! Parameter sets `Λ(x) = {λ ∈ (0, 1/2] : x ∈ K_λ}` of the self-similar sets
//! `K_λ` generated by `{λt, λt + 1 - λ}`.
//!
//! Numeric code is written against [`Scalar`], which is implemented for
//! exact rationals, certified dyadic enclosures, `f64` and `f32`.

pub mod cantor_metrics;
pub mod constructions;
pub mod error;
pub mod ifs;
pub mod intersect;
pub mod lambda_set;
pub mod numerics;
pub mod scalar;
pub mod seqcode;

pub use error::{Error, Result};
pub use numerics::{Dyadic, Enclosure, PrecisionConfig};
pub use scalar::Scalar;
pub use seqcode::{EpSequence, Word};

/// Exact arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;

/// Certified interval scalar.
pub type Interval = Enclosure;

/// Fast approximate scalar, for plotting.
pub type Float = f64;
