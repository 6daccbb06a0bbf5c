//! Two-dimensional vorticity / stream-function miniapp.
//!
//! Per timestep the stream function is recovered from the vorticity with
//! Jacobi iteration on `lap(psi) = -omega`, velocities are taken as central
//! differences of `psi`, and the vorticity transport equation is advanced
//! with forward Euler. The grid is split over a non-periodic 2-D rank grid
//! with one-cell halos.

pub mod boundary;
mod field;
pub mod kernels;
mod solver;

pub use boundary::apply_boundary_conditions;
pub use field::{block_range, GridField, RankSubdomain, Side};
pub use kernels::{advance_vorticity, compute_velocity, jacobi_sweep};
pub use solver::{
    assemble_global, run_vorticity, solve_poisson, PoissonReport, Scenario, VorticityConfig, VorticityRank,
    CATEGORIES, HALO_PSI, JACOBI_KERNEL, OTHER_OPS,
};
