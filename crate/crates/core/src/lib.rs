//! Reconstruction of stochastic wave fields from lateral Cauchy data.
//!
//! The crate manufactures synthetic boundary data for `dz_t - Δz dt = f dt + z dW`
//! with a forward solver, then recovers the interior field from the Dirichlet and
//! Neumann traces alone. The recovered field is an expansion in wave Green's
//! functions and space-time multiquadrics, fitted by Tikhonov-regularized least
//! squares with the parameter picked by GCV or the L-curve.
//!
//! Module map:
//! - [`geometry`] domains, boundary normals, collocation grids
//! - [`stochastic`] Brownian paths and measurement noise
//! - [`forward`] finite-difference and meshless forward solvers
//! - [`kernels`] basis functions and source layouts
//! - [`linsolve`] SVD, filter-factor Tikhonov solves, parameter choice
//! - [`inverse`] collocation assembly and reconstruction
//! - [`experiments`] benchmark examples, ensembles, metrics, sweeps

pub mod error;
pub mod experiments;
pub mod forward;
pub mod geometry;
pub mod inverse;
pub mod kernels;
pub mod linsolve;
pub mod par;
pub mod stochastic;

pub use error::{Error, Result};
pub use par::Exec;
