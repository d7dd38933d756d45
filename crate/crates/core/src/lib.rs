//! Finite racks and quandles, modules over them, abelian extensions by factor
//! sets, and the classifying groups `Ext(X, A)` / `Ext_Q(X, A)`, all in exact
//! integer arithmetic.
//!
//! The linear-algebra engine in [`abelian`] is generic over the integer
//! scalar; the rack-level modules fix it to [`Int`] (arbitrary precision).

pub mod abelian;
pub mod catalog;
pub mod ext_group;
pub mod extension;
pub mod formats;
pub mod rack;
pub mod rack_module;

use num_bigint::BigInt;

/// Scalar used by every rack-level structure.
pub type Int = BigInt;
pub type AbGroup = abelian::FgAbGroup<Int>;
pub type Hom = abelian::AbHom<Int>;
pub type Matrix = abelian::IntMatrix<Int>;
pub type Element = abelian::AbElement<Int>;
pub type Snf = abelian::SnfResult<Int>;

/// Fixed-width variants, for callers that prefer overflow-checked machine integers.
pub type AbGroup64 = abelian::FgAbGroup<i64>;
pub type Hom64 = abelian::AbHom<i64>;
pub type Matrix64 = abelian::IntMatrix<i64>;

pub use ext_group::{brute_force_ext_order, ext_group, ExtResult};
pub use extension::{DynamicalCocycle, ExtensionRack, FactorSet};
pub use rack::{FinGroup, FinRack, SignedWord};
pub use rack_module::{Flavor, RackModule};

/// Default limits on enumerations and constructed tables.
pub mod caps {
    pub const OPERATOR_GROUP: usize = 1_000_000;
    pub const EXTENSION_SIZE: usize = 10_000;
    pub const BRUTE_FORCE: u64 = 10_000_000;
}
