//! Symmetric-group operator algebra for adversary matrices over permutation
//! inputs.
//!
//! Negative inputs are bijective strings `y: [N] → [N]`, indexed by
//! lexicographic rank. Every operator of the construction commutes with the
//! alphabet action and is stored as a kernel on `S_N`; see [`commutant`].

pub mod adversary;
pub mod commutant;
pub mod dense;
pub mod error;
pub mod export;
pub mod group_action;
pub mod lift;
pub mod linalg;
pub mod operators;
pub mod optimizer;
pub mod partitions;
pub mod perm;
pub mod scalar;
pub mod verifier;

pub use commutant::CommutantOperator;
pub use error::{Error, Result};
pub use group_action::InputSpace;
pub use partitions::Partition;
pub use perm::Permutation;
pub use scalar::{Coefficient, Real};

/// Double-precision commutant operator.
pub type Operator = CommutantOperator<f64>;
/// Single-precision commutant operator.
pub type Operator32 = CommutantOperator<f32>;
/// Exact rational commutant operator.
pub type ExactOperator = CommutantOperator<num_rational::BigRational>;
/// Dense double-precision matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
