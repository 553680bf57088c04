//! Eigenvalue statistics, level densities and ergodic capacity of MIMO
//! channels under Nakagami-q (Hoyt) fading, along the crossover between the
//! Laguerre orthogonal (q = 0) and unitary (q = 1) ensembles.

// Negated float comparisons (`!(x > 0.0)`) are used on purpose so that NaN
// inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod ensemble;
pub mod error;
pub mod fading;
pub mod linalg;
pub mod montecarlo;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
