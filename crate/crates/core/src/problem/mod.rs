//! Nonlinear problem kinds, their evaluation interface and the
//! transformations between them.
//!
//! Three kinds of problems are supported:
//!
//! * **NE** — nonlinear equations: find `x` with `F(x) = 0`, `F: R^n -> R^n`;
//! * **UO** — unconstrained optimisation: minimise `f: R^n -> R`;
//! * **NLS** — nonlinear least squares: minimise `1/2 ||F(x)||^2` with
//!   `F: R^n -> R^m`, `m >= n`.
//!
//! An equations or least-squares problem is handled through the merit
//! objective `f(x) = 1/2 ||F(x)||^2`, whose derivatives compose from the
//! residual data: `grad f = J^T F` and `Hess f = J^T J + sum_i F_i HF_i`
//! (the sum is dropped when residual Hessians are unavailable, which is the
//! Gauss-Newton approximation). Requested quantities are filled from
//! analytic callbacks first, then from these compositions, then from
//! central finite differences.

mod eval;
mod fd;

pub use eval::{evaluate, EvalCounts, EvalRecord, Evaluator, Wanted};
pub use fd::{fd_gradient, fd_hessian, fd_jacobian};

use crate::linalg::{DenseMatrix, LinAlgError};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type ResidualFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> DenseMatrix + Send + Sync>;

/// The three problem classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Nonlinear equations, `F(x) = 0` with square residual (`m = n`).
    NonlinearEquations,
    /// Unconstrained optimisation of a scalar objective.
    UnconstrainedOptimization,
    /// Nonlinear least squares, residual with `m >= n`.
    NonlinearLeastSquares,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProblemKind::NonlinearEquations => "NE",
            ProblemKind::UnconstrainedOptimization => "UO",
            ProblemKind::NonlinearLeastSquares => "NLS",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("kind error: {0}")]
    KindError(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value produced by {quantity} evaluation")]
    NonFiniteValue { quantity: &'static str },
    #[error("{quantity} is not available for problem '{problem}'")]
    Unavailable {
        problem: String,
        quantity: &'static str,
    },
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// An immutable problem description: dimensions, kind and callbacks.
///
/// Exactly the callback required by the kind must be present (objective for
/// UO, residual for NE/NLS); additional callbacks refine derivative
/// evaluation. Instances are cheap to clone and safe to share across
/// threads; callbacks must be pure.
#[derive(Clone)]
pub struct ProblemDefinition {
    name: String,
    kind: ProblemKind,
    n: usize,
    m: usize,
    objective: Option<ObjectiveFn>,
    residual: Option<ResidualFn>,
    gradient: Option<GradientFn>,
    jacobian: Option<MatrixFn>,
    hessian: Option<MatrixFn>,
}

impl fmt::Debug for ProblemDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("objective", &self.objective.is_some())
            .field("residual", &self.residual.is_some())
            .field("gradient", &self.gradient.is_some())
            .field("jacobian", &self.jacobian.is_some())
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

impl ProblemDefinition {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Residual dimension; equals `n` for UO problems without residual.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn has_residual(&self) -> bool {
        self.residual.is_some()
    }

    pub fn has_objective(&self) -> bool {
        self.objective.is_some()
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub(crate) fn objective_fn(&self) -> Option<&ObjectiveFn> {
        self.objective.as_ref()
    }

    pub(crate) fn residual_fn(&self) -> Option<&ResidualFn> {
        self.residual.as_ref()
    }

    pub(crate) fn gradient_fn(&self) -> Option<&GradientFn> {
        self.gradient.as_ref()
    }

    pub(crate) fn jacobian_fn(&self) -> Option<&MatrixFn> {
        self.jacobian.as_ref()
    }

    pub(crate) fn hessian_fn(&self) -> Option<&MatrixFn> {
        self.hessian.as_ref()
    }
}

/// Builder enforcing the kind/callback invariants at construction time.
pub struct ProblemBuilder {
    name: String,
    kind: ProblemKind,
    n: usize,
    m: usize,
    objective: Option<ObjectiveFn>,
    residual: Option<ResidualFn>,
    gradient: Option<GradientFn>,
    jacobian: Option<MatrixFn>,
    hessian: Option<MatrixFn>,
}

impl ProblemBuilder {
    /// Unconstrained optimisation problem over a scalar objective.
    pub fn unconstrained(
        name: impl Into<String>,
        n: usize,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ProblemKind::UnconstrainedOptimization,
            n,
            m: n,
            objective: Some(Arc::new(objective)),
            residual: None,
            gradient: None,
            jacobian: None,
            hessian: None,
        }
    }

    /// Nonlinear equations problem with a square residual.
    pub fn equations(
        name: impl Into<String>,
        n: usize,
        residual: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ProblemKind::NonlinearEquations,
            n,
            m: n,
            objective: None,
            residual: Some(Arc::new(residual)),
            gradient: None,
            jacobian: None,
            hessian: None,
        }
    }

    /// Nonlinear least-squares problem with `m` residual components.
    pub fn least_squares(
        name: impl Into<String>,
        n: usize,
        m: usize,
        residual: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ProblemKind::NonlinearLeastSquares,
            n,
            m,
            objective: None,
            residual: Some(Arc::new(residual)),
            gradient: None,
            jacobian: None,
            hessian: None,
        }
    }

    pub fn gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn jacobian(mut self, j: impl Fn(&[f64]) -> DenseMatrix + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn hessian(mut self, h: impl Fn(&[f64]) -> DenseMatrix + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn build(self) -> Result<ProblemDefinition, ProblemError> {
        if self.n == 0 {
            return Err(ProblemError::DimensionMismatch(
                "problem dimension n must be positive".into(),
            ));
        }
        match self.kind {
            ProblemKind::UnconstrainedOptimization => {
                if self.objective.is_none() {
                    return Err(ProblemError::KindError(
                        "UO problem requires an objective callback".into(),
                    ));
                }
            }
            ProblemKind::NonlinearEquations => {
                if self.m != self.n {
                    return Err(ProblemError::KindError(format!(
                        "NE problem requires m = n, got m={} n={}",
                        self.m, self.n
                    )));
                }
                if self.residual.is_none() {
                    return Err(ProblemError::KindError(
                        "NE problem requires a residual callback".into(),
                    ));
                }
            }
            ProblemKind::NonlinearLeastSquares => {
                if self.m < self.n {
                    return Err(ProblemError::KindError(format!(
                        "NLS problem requires m >= n, got m={} n={}",
                        self.m, self.n
                    )));
                }
                if self.residual.is_none() {
                    return Err(ProblemError::KindError(
                        "NLS problem requires a residual callback".into(),
                    ));
                }
            }
        }
        Ok(ProblemDefinition {
            name: self.name,
            kind: self.kind,
            n: self.n,
            m: self.m,
            objective: self.objective,
            residual: self.residual,
            gradient: self.gradient,
            jacobian: self.jacobian,
            hessian: self.hessian,
        })
    }
}

/// Turns an equations or least-squares problem into the equivalent
/// unconstrained problem over the merit objective `f(x) = 1/2 ||F(x)||^2`.
///
/// The residual (and its Jacobian, when given) is retained so derivative
/// evaluation keeps composing from residual data instead of falling back to
/// finite differences on the merit value.
pub fn transform_ne_to_uo(p: &ProblemDefinition) -> Result<ProblemDefinition, ProblemError> {
    if p.kind == ProblemKind::UnconstrainedOptimization {
        return Err(ProblemError::KindError(format!(
            "problem '{}' is already an objective (UO)",
            p.name
        )));
    }
    let residual = p
        .residual
        .clone()
        .ok_or_else(|| ProblemError::Unavailable {
            problem: p.name.clone(),
            quantity: "residual",
        })?;
    let merit_res = residual.clone();
    let objective: ObjectiveFn = Arc::new(move |x: &[f64]| {
        let r = merit_res(x);
        0.5 * r.iter().map(|v| v * v).sum::<f64>()
    });
    Ok(ProblemDefinition {
        name: format!("{}-merit", p.name),
        kind: ProblemKind::UnconstrainedOptimization,
        n: p.n,
        m: p.m,
        objective: Some(objective),
        residual: Some(residual),
        gradient: None,
        jacobian: p.jacobian.clone(),
        hessian: None,
    })
}

/// Gradient of the merit objective from residual data: `J^T F`.
pub fn nls_gradient(j: &DenseMatrix, f: &[f64]) -> Result<Vec<f64>, ProblemError> {
    if f.len() != j.rows() {
        return Err(ProblemError::DimensionMismatch(format!(
            "residual length {} does not match Jacobian rows {}",
            f.len(),
            j.rows()
        )));
    }
    Ok(j.tr_matvec(f)?)
}

/// Hessian of the merit objective from residual data:
/// `J^T J + sum_i F_i * HF_i` when residual Hessians are supplied, and the
/// Gauss-Newton approximation `J^T J` when they are not.
pub fn nls_hessian(
    j: &DenseMatrix,
    f: &[f64],
    residual_hessians: Option<&[DenseMatrix]>,
) -> Result<DenseMatrix, ProblemError> {
    if f.len() != j.rows() {
        return Err(ProblemError::DimensionMismatch(format!(
            "residual length {} does not match Jacobian rows {}",
            f.len(),
            j.rows()
        )));
    }
    let n = j.cols();
    let mut h = j.gram();
    if let Some(hs) = residual_hessians {
        if hs.len() != f.len() {
            return Err(ProblemError::DimensionMismatch(format!(
                "{} residual Hessians for {} residual components",
                hs.len(),
                f.len()
            )));
        }
        for (fi, hfi) in f.iter().zip(hs) {
            if hfi.rows() != n || hfi.cols() != n {
                return Err(ProblemError::DimensionMismatch(format!(
                    "residual Hessian is {}x{}, expected {n}x{n}",
                    hfi.rows(),
                    hfi.cols()
                )));
            }
            h.add_scaled(hfi, *fi)?;
        }
    }
    Ok(h)
}
