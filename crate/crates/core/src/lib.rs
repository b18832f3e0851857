//! Sharp subharmonicity exponents for `|u|^q` where `u` is a harmonic
//! mapping with bounded distortion.
//!
//! The crate evaluates the closed-form Laplacian of `|u|^q`, computes the
//! critical exponents `q_plus = max(1 - (n-1)/K^2, 0)` and
//! `q_minus = 1 - (n-1) K^2`, builds the linear maps that show both bounds
//! are sharp, and checks all of it against finite-difference and
//! mean-value oracles that never touch the closed forms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod oracles;
pub mod polyharm;
pub mod spectral;
pub mod subharm;
pub mod explorer;
pub mod cli;

pub use error::{Error, Result};
