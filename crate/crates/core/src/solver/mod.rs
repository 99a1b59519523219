//! Grid solvers: Perron-bracketed relaxation for the dead-core problem, the
//! homogeneous p-harmonic solve, the tug-of-war dynamic programming iteration,
//! and experiments built on top of them.

mod config;
mod dpp;
mod experiments;
pub mod grid;
mod relax;

pub use config::{Scheme, SolverConfig};
pub use dpp::{ball_offsets, dpp_iterate, BallStencil};
pub use experiments::{
    comparison_check, flatness_experiment, liouville_sweep, rescale, ComparisonReport, FlatnessReport, LiouvilleMode,
    LiouvilleRow,
};
pub use grid::{DomainShape, GridDomain, SolutionField, SolveReport};
pub use relax::{discrete_residual, solve_dirichlet, solve_p_harmonic, DirichletSolution};
