use super::dense::DenseMatrix;
use super::solve::{solve_cg, solve_cholesky, solve_lu, LinearSolveReport};
use super::LinAlgError;

/// Common contract for linear solvers.
///
/// This is the adapter boundary for external numerical packages: anything
/// that can satisfy `solve` can be registered and used wherever the
/// built-ins are. The built-ins below go through this same interface.
pub trait LinearSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, a: &DenseMatrix, b: &[f64]) -> Result<LinearSolveReport, LinAlgError>;
}

/// LU with partial pivoting.
#[derive(Debug, Clone, Copy, Default)]
pub struct LuSolver;

impl LinearSolver for LuSolver {
    fn name(&self) -> &'static str {
        "lu"
    }

    fn solve(&self, a: &DenseMatrix, b: &[f64]) -> Result<LinearSolveReport, LinAlgError> {
        solve_lu(a, b)
    }
}

/// Cholesky for symmetric systems, optionally perturbing indefinite input.
#[derive(Debug, Clone, Copy)]
pub struct CholeskySolver {
    pub modify: bool,
}

impl Default for CholeskySolver {
    fn default() -> Self {
        Self { modify: false }
    }
}

impl LinearSolver for CholeskySolver {
    fn name(&self) -> &'static str {
        "cholesky"
    }

    fn solve(&self, a: &DenseMatrix, b: &[f64]) -> Result<LinearSolveReport, LinAlgError> {
        solve_cholesky(a, b, self.modify)
    }
}

/// Conjugate gradients; `max_iter = None` means the system order.
#[derive(Debug, Clone, Copy)]
pub struct CgSolver {
    pub tol: f64,
    pub max_iter: Option<usize>,
}

impl Default for CgSolver {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

impl LinearSolver for CgSolver {
    fn name(&self) -> &'static str {
        "cg"
    }

    fn solve(&self, a: &DenseMatrix, b: &[f64]) -> Result<LinearSolveReport, LinAlgError> {
        let max_iter = self.max_iter.unwrap_or_else(|| a.rows());
        solve_cg(a, b, self.tol, max_iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adapters_match_free_functions() {
        let a = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let b = [1.0, 2.0];
        let via_trait = LuSolver.solve(&a, &b).unwrap();
        let direct = solve_lu(&a, &b).unwrap();
        assert_eq!(via_trait.solution, direct.solution);

        let via_chol = CholeskySolver { modify: false }.solve(&a, &b).unwrap();
        let direct_chol = solve_cholesky(&a, &b, false).unwrap();
        assert_eq!(via_chol.solution, direct_chol.solution);
    }
}
