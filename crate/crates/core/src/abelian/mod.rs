//! Exact linear algebra over finitely generated abelian groups.
//!
//! Everything here is generic over the integer [`Scalar`]; the rest of the
//! crate works with the aliases exported at the crate root.

mod group;
mod hom;
mod matrix;
mod quotient;
pub mod scalar;
mod snf;

use thiserror::Error;

pub use group::{AbElement, Elements, FgAbGroup};
pub use hom::{AbHom, LinearSolver};
pub use matrix::IntMatrix;
pub use quotient::{quotient_group, Quotient, Subgroup};
pub use scalar::Scalar;
pub use snf::{snf, SnfResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid modulus {0} (must be 0 or at least 2)")]
    InvalidModulus(String),
    #[error("matrix does not define a homomorphism: column {column} is not killed by its source order")]
    IllDefined { column: usize },
    #[error("homomorphism is not invertible")]
    NotInvertible,
}
