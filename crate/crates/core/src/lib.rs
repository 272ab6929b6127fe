//! # newton-forge-core
//!
//! Building blocks for Newton-type methods in which the Newton direction,
//! the step length, the stopping condition and the problem formulation are
//! independently swappable components.
//!
//! The crate is organised around the generic iteration
//!
//! ```text
//! while stopping condition not satisfied:
//!     s      <- compute Newton direction
//!     lambda <- compute step length
//!     x      <- x + lambda * s
//! ```
//!
//! implemented once in [`drivers::newton_iterate`]. Concrete methods
//! (damped Newton, trust-region Newton, BFGS, inexact Newton, Gauss-Newton)
//! are assemblies of hooks over that single loop.
//!
//! Modules:
//!
//! * [`problem`] — the three nonlinear problem kinds (equations,
//!   unconstrained optimisation, least squares), their evaluation interface
//!   and finite-difference fallbacks.
//! * [`corpus`] — built-in test problems addressable by name.
//! * [`linalg`] — dense vectors/matrices and the linear solver adapter
//!   boundary (LU, Cholesky with indefiniteness handling, CG).
//! * [`linesearch`] — step-length computation decoupled from the acceptance
//!   condition; any condition composes with any step generator.
//! * [`trustregion`] — quadratic model, Cauchy point, dogleg, 2D-subspace
//!   subproblem solvers and threshold radius updates.
//! * [`drivers`] — the template loop, the concrete drivers and stopping
//!   criteria.
//! * [`registry`] — the shared component registry mapping names to builders.
//! * [`config`] — `key = value` solver configuration, parsing and assembly.

pub mod config;
pub mod corpus;
pub mod drivers;
pub mod linalg;
pub mod linesearch;
pub mod problem;
pub mod registry;
pub mod trustregion;
