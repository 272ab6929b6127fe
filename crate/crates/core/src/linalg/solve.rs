use super::dense::DenseMatrix;
use super::{dot, norm2, LinAlgError, SINGULARITY_RTOL};

/// Outcome of a linear solve.
#[derive(Debug, Clone)]
pub struct LinearSolveReport {
    /// Solution vector.
    pub solution: Vec<f64>,
    /// Iteration count; 0 for direct methods.
    pub iterations: usize,
    /// Euclidean residual of the system that was actually solved
    /// (the shifted system when `modified` is set).
    pub residual_norm: f64,
    /// True when the matrix had to be perturbed to obtain a factorization.
    pub modified: bool,
    /// Diagonal shift `tau` applied when `modified` is set, 0 otherwise.
    pub shift: f64,
}

fn residual_of(a: &DenseMatrix, x: &[f64], b: &[f64], shift: f64) -> f64 {
    let mut ax = a.matvec(x).expect("dimensions checked by caller");
    for (axi, xi) in ax.iter_mut().zip(x) {
        *axi += shift * xi;
    }
    norm2(&super::sub(&ax, b))
}

fn check_square_rhs(a: &DenseMatrix, b: &[f64]) -> Result<(), LinAlgError> {
    if !a.is_square() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "square matrix required, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.len() != a.rows() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "rhs length {} does not match order {}",
            b.len(),
            a.rows()
        )));
    }
    Ok(())
}

/// Solves `A x = b` by LU decomposition with partial pivoting.
///
/// A pivot of magnitude below `SINGULARITY_RTOL * ||A||_inf` aborts with
/// `SingularMatrix`.
pub fn solve_lu(a: &DenseMatrix, b: &[f64]) -> Result<LinearSolveReport, LinAlgError> {
    check_square_rhs(a, b)?;
    let n = a.rows();
    let threshold = SINGULARITY_RTOL * a.norm_inf();

    let mut lu = a.clone();
    let mut rhs = b.to_vec();

    for k in 0..n {
        // Partial pivoting: bring the largest remaining entry of column k up.
        let mut p = k;
        for i in (k + 1)..n {
            if lu.get(i, k).abs() > lu.get(p, k).abs() {
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                let t = lu.get(k, j);
                lu.set(k, j, lu.get(p, j));
                lu.set(p, j, t);
            }
            rhs.swap(k, p);
        }
        let pivot = lu.get(k, k);
        if pivot == 0.0 || pivot.abs() < threshold {
            return Err(LinAlgError::SingularMatrix {
                pivot: pivot.abs(),
                threshold,
            });
        }
        for i in (k + 1)..n {
            let m = lu.get(i, k) / pivot;
            lu.set(i, k, m);
            for j in (k + 1)..n {
                let v = lu.get(i, j) - m * lu.get(k, j);
                lu.set(i, j, v);
            }
            rhs[i] -= m * rhs[k];
        }
    }

    // Back substitution on the triangularized system.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= lu.get(i, j) * x[j];
        }
        x[i] = acc / lu.get(i, i);
    }

    let residual_norm = residual_of(a, &x, b, 0.0);
    Ok(LinearSolveReport {
        solution: x,
        iterations: 0,
        residual_norm,
        modified: false,
        shift: 0.0,
    })
}

/// Cholesky factor `L` (lower triangular, `A = L L^T`) or `None` when the
/// matrix is not positive definite at the pivot threshold.
pub fn cholesky_factor(a: &DenseMatrix) -> Option<DenseMatrix> {
    debug_assert!(a.is_square());
    let n = a.rows();
    let floor = SINGULARITY_RTOL * a.norm_inf();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= floor || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l.set(j, j, dj);
        for i in (j + 1)..n {
            let mut v = a.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / dj);
        }
    }
    Some(l)
}

fn cholesky_solve_with(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = b[i];
        for k in 0..i {
            acc -= l.get(i, k) * y[k];
        }
        y[i] = acc / l.get(i, i);
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in (i + 1)..n {
            acc -= l.get(k, i) * x[k];
        }
        x[i] = acc / l.get(i, i);
    }
    x
}

/// Solves `A x = b` for symmetric `A` by Cholesky decomposition.
///
/// When `A` is not positive definite and `modify` is set, a diagonal shift
/// `tau * I` is added, with `tau` starting at `1e-3 * ||A||_inf` and doubling
/// until the factorization succeeds. The report carries the shift so callers
/// can see which system was solved; for `b = -g` the returned direction is
/// then still a descent direction.
pub fn solve_cholesky(
    a: &DenseMatrix,
    b: &[f64],
    modify: bool,
) -> Result<LinearSolveReport, LinAlgError> {
    check_square_rhs(a, b)?;
    a.check_symmetric()?;

    if let Some(l) = cholesky_factor(a) {
        let x = cholesky_solve_with(&l, b);
        let residual_norm = residual_of(a, &x, b, 0.0);
        return Ok(LinearSolveReport {
            solution: x,
            iterations: 0,
            residual_norm,
            modified: false,
            shift: 0.0,
        });
    }
    if !modify {
        return Err(LinAlgError::NotPositiveDefinite);
    }

    let scale = a.norm_inf();
    let mut tau = if scale > 0.0 { 1e-3 * scale } else { 1e-3 };
    // tau > ||A||_inf always succeeds, so a few doublings are enough.
    for _ in 0..64 {
        let mut shifted = a.clone();
        shifted.add_diagonal(tau);
        if let Some(l) = cholesky_factor(&shifted) {
            let x = cholesky_solve_with(&l, b);
            let residual_norm = residual_of(a, &x, b, tau);
            return Ok(LinearSolveReport {
                solution: x,
                iterations: 0,
                residual_norm,
                modified: true,
                shift: tau,
            });
        }
        tau *= 2.0;
    }
    Err(LinAlgError::NotPositiveDefinite)
}

/// Solves `A x = b` for symmetric positive definite `A` by conjugate
/// gradients from `x0 = 0`, stopping at `||A x - b|| <= tol * ||b||` or
/// after `max_iter` iterations (whichever comes first).
///
/// Encountering non-positive curvature raises `IndefiniteOperator`, which
/// callers such as truncated-Newton drivers use as a signal.
pub fn solve_cg(
    a: &DenseMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<LinearSolveReport, LinAlgError> {
    check_square_rhs(a, b)?;
    a.check_symmetric()?;
    if !(tol > 0.0) {
        return Err(LinAlgError::InvalidArgument(format!(
            "cg tolerance must be positive, got {tol}"
        )));
    }

    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(LinearSolveReport {
            solution: x,
            iterations: 0,
            residual_norm: 0.0,
            modified: false,
            shift: 0.0,
        });
    }

    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 1..=max_iter {
        let ap = a.matvec(&p)?;
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(LinAlgError::IndefiniteOperator(it));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        if rr_next.sqrt() <= tol * bnorm {
            return Ok(LinearSolveReport {
                solution: x,
                iterations: it,
                residual_norm: rr_next.sqrt(),
                modified: false,
                shift: 0.0,
            });
        }
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    Ok(LinearSolveReport {
        solution: x,
        iterations: max_iter,
        residual_norm: rr.sqrt(),
        modified: false,
        shift: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sub;

    #[test]
    fn lu_identity() {
        let a = DenseMatrix::identity(2);
        let r = solve_lu(&a, &[1.0, 2.0]).unwrap();
        assert_eq!(r.solution, vec![1.0, 2.0]);
        assert_eq!(r.iterations, 0);
        assert!(!r.modified);
    }

    #[test]
    fn lu_diagonal() {
        let a = DenseMatrix::diagonal(&[2.0, 4.0]);
        let r = solve_lu(&a, &[2.0, 8.0]).unwrap();
        assert_eq!(r.solution, vec![1.0, 2.0]);
        assert!(r.residual_norm <= 1e-10 * (1.0 + norm2(&[2.0, 8.0])));
    }

    #[test]
    fn lu_rank_one_is_singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        match solve_lu(&a, &[1.0, 2.0]) {
            Err(LinAlgError::SingularMatrix { .. }) => {}
            other => panic!("expected SingularMatrix, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_identity() {
        let a = DenseMatrix::identity(2);
        let r = solve_cholesky(&a, &[3.0, 4.0], false).unwrap();
        assert_eq!(r.solution, vec![3.0, 4.0]);
        assert!(!r.modified);
        assert_eq!(r.shift, 0.0);
    }

    #[test]
    fn cholesky_indefinite_fails_without_modify() {
        let a = DenseMatrix::diagonal(&[-1.0, 1.0]);
        match solve_cholesky(&a, &[1.0, 1.0], false) {
            Err(LinAlgError::NotPositiveDefinite) => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_cholesky(&a, &[1.0, 1.0], true),
            Err(LinAlgError::NotSymmetric(_))
        ));
    }

    // Modified factorization must produce a descent direction: solving
    // (A + tau I) s = b with b = -g gives g^T s < 0, i.e. b^T s > 0.
    #[test]
    fn modified_cholesky_descent_direction() {
        let a = DenseMatrix::diagonal(&[-1.0, 1.0]);
        let b = [1.0, 1.0];
        let r = solve_cholesky(&a, &b, true).unwrap();
        assert!(r.modified);
        assert!(r.shift > 0.0);
        assert!(dot(&b, &r.solution) > 0.0, "not a descent direction");
        // The shifted matrix must pass an unmodified factorization.
        let mut shifted = a.clone();
        shifted.add_diagonal(r.shift);
        assert!(cholesky_factor(&shifted).is_some());
        // And the report's residual refers to the shifted system.
        let ax = shifted.matvec(&r.solution).unwrap();
        assert!(norm2(&sub(&ax, &b)) <= 1e-10);
    }

    #[test]
    fn cg_identity_one_iteration() {
        let a = DenseMatrix::identity(2);
        let r = solve_cg(&a, &[5.0, 6.0], 1e-10, 10).unwrap();
        assert_eq!(r.iterations, 1);
        assert!((r.solution[0] - 5.0).abs() < 1e-12);
        assert!((r.solution[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn cg_diagonal() {
        let a = DenseMatrix::diagonal(&[1.0, 2.0]);
        let r = solve_cg(&a, &[1.0, 1.0], 1e-12, 10).unwrap();
        assert!((r.solution[0] - 1.0).abs() < 1e-10);
        assert!((r.solution[1] - 0.5).abs() < 1e-10);
        assert!(r.iterations <= 2);
    }

    #[test]
    fn cg_indefinite_signals() {
        let a = DenseMatrix::diagonal(&[1.0, -1.0]);
        match solve_cg(&a, &[1.0, 1.0], 1e-10, 10) {
            Err(LinAlgError::IndefiniteOperator(_)) => {}
            other => panic!("expected IndefiniteOperator, got {other:?}"),
        }
    }

    #[test]
    fn cg_zero_rhs() {
        let a = DenseMatrix::identity(3);
        let r = solve_cg(&a, &[0.0, 0.0, 0.0], 1e-10, 10).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.solution, vec![0.0; 3]);
    }
}
