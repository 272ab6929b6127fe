//! Dense vectors and matrices plus the linear solver adapter boundary.
//!
//! Everything here is dense and double precision; the problems this crate
//! targets are small. External packages can be plugged in behind
//! [`LinearSolver`] without touching any caller.

mod adapter;
mod dense;
mod solve;

pub use adapter::{CgSolver, CholeskySolver, LinearSolver, LuSolver};
pub use dense::DenseMatrix;
pub use solve::{cholesky_factor, solve_cg, solve_cholesky, solve_lu, LinearSolveReport};

use thiserror::Error;

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULARITY_RTOL: f64 = 1e-14;

/// Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
pub const SYMMETRY_RTOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not symmetric: max asymmetry {0:e}")]
    NotSymmetric(f64),
    #[error("indefinite operator: non-positive curvature at CG iteration {0}")]
    IndefiniteOperator(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

// Small vector helpers shared across the crate. Vectors are plain `&[f64]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Max-magnitude (infinity) norm.
pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `v + t * w` as a fresh vector.
pub fn axpy(v: &[f64], t: f64, w: &[f64]) -> Vec<f64> {
    debug_assert_eq!(v.len(), w.len());
    v.iter().zip(w).map(|(a, b)| a + t * b).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(v: &[f64], t: f64) -> Vec<f64> {
    v.iter().map(|x| t * x).collect()
}

pub fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}
