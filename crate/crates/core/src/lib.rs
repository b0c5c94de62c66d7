//! Simulation of strongly continuous semigroups under Staffans-Weiss type perturbations.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`); the aliases at the
//! crate root fix the common choices.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

pub mod admissibility;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod maps;
pub mod measure;
pub mod neutral;
pub mod numerics;
pub mod scalar;
pub mod semigroups;
pub mod translation;
pub mod verdict;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use verdict::Verdict;

pub type Matrix64 = numerics::Matrix<f64>;
pub type Matrix32 = numerics::Matrix<f32>;
pub type StateVector64 = numerics::StateVector<f64>;
pub type StateVector32 = numerics::StateVector<f32>;
pub type Grid64 = numerics::Grid<f64>;
pub type Grid32 = numerics::Grid<f32>;
pub type Semigroup64 = semigroups::SemigroupSpec<f64>;
pub type Semigroup32 = semigroups::SemigroupSpec<f32>;
