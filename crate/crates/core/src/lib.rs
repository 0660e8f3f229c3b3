//! Spectral approximation with log orthogonal functions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod approx;
pub mod cli;
pub mod error;
pub mod fracops;
pub mod laguerre;
pub mod linalg;
pub mod logbasis;
pub mod solvers;
pub mod spacetime;
pub mod special;

pub use error::{Error, Result};
