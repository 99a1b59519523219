//! Numerical laboratory for the dead-core problem
//! `|∇u|^γ Δ_p^N u = a(x) u_+^m` with the normalized p-Laplacian.
//!
//! [`params`] holds the structural exponents and closed-form constants,
//! [`operators`] the pointwise kernels, [`radial`] the exact profiles and
//! barriers, [`solver`] the grid solvers, [`game`] the tug-of-war simulator and
//! [`geometry`] the free-boundary diagnostics.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod game;
pub mod geometry;
pub mod operators;
pub mod params;
pub mod radial;
pub mod solver;

pub use error::{Error, Result};
pub use params::{
    compute_beta, compute_beta_henon, compute_cnd, compute_game_weights, compute_radial_constant, BoundaryData,
    DerivedExponents, GameWeights, ProblemSpec, StructuralParams, ThieleSpec,
};
pub use solver::grid::{DomainShape, GridDomain, SolutionField, SolveReport};
