//! Exact polynomial calculus and harmonic mappings.
//!
//! Coefficients are exact rationals during construction and symbolic
//! differentiation, so `laplacian(u_j) == 0` is checked by exact
//! cancellation. Evaluation converts to floating point.

mod basis;
mod domain;
mod map;
mod poly;

pub use basis::{harmonic_basis, homogeneous_monomials};
pub use domain::{parse_vector, DomainSpec, Region, DEFAULT_EPS_DEGENERATE, DEFAULT_EPS_ZERO};
pub use map::{
    coefficient_mass, extremal_map, identity_map, linear_map, linear_map_exact, random_harmonic_map,
    verify_harmonicity, zsquared_map, Branch, HarmonicMap, MapFile, TermRecord, NEAR_SINGULAR_DET,
    RANDOM_COEFF_BOUND,
};
pub use poly::{Exponents, Polynomial};
