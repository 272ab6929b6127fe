//! Central finite differences, used both as derivative fallback and as an
//! independent oracle in tests.
//!
//! Step size per coordinate: `h_i = 1e-6 * max(1, |x_i|)`.

use super::{nls_gradient, ProblemDefinition, ProblemError};
use crate::linalg::DenseMatrix;

const FD_STEP: f64 = 1e-6;

fn step(xi: f64) -> f64 {
    FD_STEP * xi.abs().max(1.0)
}

pub(crate) fn central_gradient<F>(mut value: F, x: &[f64]) -> Result<Vec<f64>, ProblemError>
where
    F: FnMut(&[f64]) -> Result<f64, ProblemError>,
{
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = step(x[i]);
        probe[i] = x[i] + h;
        let fp = value(&probe)?;
        probe[i] = x[i] - h;
        let fm = value(&probe)?;
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
        if !g[i].is_finite() {
            return Err(ProblemError::NonFiniteValue {
                quantity: "finite-difference gradient",
            });
        }
    }
    Ok(g)
}

pub(crate) fn central_jacobian<F>(
    mut residual: F,
    x: &[f64],
    m: usize,
) -> Result<DenseMatrix, ProblemError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, ProblemError>,
{
    let n = x.len();
    let mut j = DenseMatrix::zeros(m, n);
    let mut probe = x.to_vec();
    for col in 0..n {
        let h = step(x[col]);
        probe[col] = x[col] + h;
        let rp = residual(&probe)?;
        probe[col] = x[col] - h;
        let rm = residual(&probe)?;
        probe[col] = x[col];
        for row in 0..m {
            let v = (rp[row] - rm[row]) / (2.0 * h);
            if !v.is_finite() {
                return Err(ProblemError::NonFiniteValue {
                    quantity: "finite-difference jacobian",
                });
            }
            j.set(row, col, v);
        }
    }
    Ok(j)
}

/// Hessian by differencing gradients, symmetrized as `(H + H^T) / 2`.
pub(crate) fn central_hessian<F>(mut gradient: F, x: &[f64]) -> Result<DenseMatrix, ProblemError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, ProblemError>,
{
    let n = x.len();
    let mut h = DenseMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    for col in 0..n {
        let hi = step(x[col]);
        probe[col] = x[col] + hi;
        let gp = gradient(&probe)?;
        probe[col] = x[col] - hi;
        let gm = gradient(&probe)?;
        probe[col] = x[col];
        for row in 0..n {
            let v = (gp[row] - gm[row]) / (2.0 * hi);
            if !v.is_finite() {
                return Err(ProblemError::NonFiniteValue {
                    quantity: "finite-difference hessian",
                });
            }
            h.set(row, col, v);
        }
    }
    h.symmetrize();
    Ok(h)
}

// Raw callback access with output validation, shared by the finite
// difference entry points and the evaluator.

pub(crate) fn raw_objective_value(p: &ProblemDefinition, x: &[f64]) -> Result<f64, ProblemError> {
    if let Some(obj) = p.objective_fn() {
        let f = obj(x);
        if !f.is_finite() {
            return Err(ProblemError::NonFiniteValue { quantity: "objective" });
        }
        return Ok(f);
    }
    let r = raw_residual(p, x)?;
    Ok(0.5 * r.iter().map(|v| v * v).sum::<f64>())
}

pub(crate) fn raw_residual(p: &ProblemDefinition, x: &[f64]) -> Result<Vec<f64>, ProblemError> {
    let res = p.residual_fn().ok_or_else(|| ProblemError::Unavailable {
        problem: p.name().to_string(),
        quantity: "residual",
    })?;
    let r = res(x);
    if r.len() != p.m() {
        return Err(ProblemError::DimensionMismatch(format!(
            "residual callback returned {} components, expected {}",
            r.len(),
            p.m()
        )));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::NonFiniteValue { quantity: "residual" });
    }
    Ok(r)
}

pub(crate) fn raw_analytic_gradient(
    p: &ProblemDefinition,
    x: &[f64],
) -> Result<Option<Vec<f64>>, ProblemError> {
    let Some(grad) = p.gradient_fn() else {
        return Ok(None);
    };
    let g = grad(x);
    if g.len() != p.n() {
        return Err(ProblemError::DimensionMismatch(format!(
            "gradient callback returned length {}, expected {}",
            g.len(),
            p.n()
        )));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::NonFiniteValue { quantity: "gradient" });
    }
    Ok(Some(g))
}

pub(crate) fn raw_analytic_jacobian(
    p: &ProblemDefinition,
    x: &[f64],
) -> Result<Option<DenseMatrix>, ProblemError> {
    let Some(jac) = p.jacobian_fn() else {
        return Ok(None);
    };
    let j = jac(x);
    if j.rows() != p.m() || j.cols() != p.n() {
        return Err(ProblemError::DimensionMismatch(format!(
            "jacobian callback returned {}x{}, expected {}x{}",
            j.rows(),
            j.cols(),
            p.m(),
            p.n()
        )));
    }
    if j.data().iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::NonFiniteValue { quantity: "jacobian" });
    }
    Ok(Some(j))
}

pub(crate) fn raw_analytic_hessian(
    p: &ProblemDefinition,
    x: &[f64],
) -> Result<Option<DenseMatrix>, ProblemError> {
    let Some(hess) = p.hessian_fn() else {
        return Ok(None);
    };
    let h = hess(x);
    if h.rows() != p.n() || h.cols() != p.n() {
        return Err(ProblemError::DimensionMismatch(format!(
            "hessian callback returned {}x{}, expected {}x{}",
            h.rows(),
            h.cols(),
            p.n(),
            p.n()
        )));
    }
    if h.data().iter().any(|v| !v.is_finite()) {
        return Err(ProblemError::NonFiniteValue { quantity: "hessian" });
    }
    Ok(Some(h))
}

/// Best available gradient: analytic callback, residual composition
/// `J^T F`, then a central difference of the scalar value.
pub(crate) fn best_gradient(p: &ProblemDefinition, x: &[f64]) -> Result<Vec<f64>, ProblemError> {
    if let Some(g) = raw_analytic_gradient(p, x)? {
        return Ok(g);
    }
    if p.has_residual() {
        let j = match raw_analytic_jacobian(p, x)? {
            Some(j) => j,
            None => central_jacobian(|y| raw_residual(p, y), x, p.m())?,
        };
        let f = raw_residual(p, x)?;
        return nls_gradient(&j, &f);
    }
    central_gradient(|y| raw_objective_value(p, y), x)
}

/// Central-difference gradient of the problem's scalar value.
pub fn fd_gradient(p: &ProblemDefinition, x: &[f64]) -> Result<Vec<f64>, ProblemError> {
    check_point(p, x)?;
    central_gradient(|y| raw_objective_value(p, y), x)
}

/// Central-difference Jacobian of the residual.
pub fn fd_jacobian(p: &ProblemDefinition, x: &[f64]) -> Result<DenseMatrix, ProblemError> {
    check_point(p, x)?;
    if !p.has_residual() {
        return Err(ProblemError::Unavailable {
            problem: p.name().to_string(),
            quantity: "residual",
        });
    }
    central_jacobian(|y| raw_residual(p, y), x, p.m())
}

/// Hessian by central-differencing the problem's best gradient, symmetrized.
pub fn fd_hessian(p: &ProblemDefinition, x: &[f64]) -> Result<DenseMatrix, ProblemError> {
    check_point(p, x)?;
    central_hessian(|y| best_gradient(p, y), x)
}

fn check_point(p: &ProblemDefinition, x: &[f64]) -> Result<(), ProblemError> {
    if x.len() != p.n() {
        return Err(ProblemError::DimensionMismatch(format!(
            "point has length {}, problem dimension is {}",
            x.len(),
            p.n()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemBuilder;

    #[test]
    fn gradient_of_square_is_exact_to_roundoff() {
        let p = ProblemBuilder::unconstrained("sq", 1, |x| x[0] * x[0]).build().unwrap();
        let g = fd_gradient(&p, &[3.0]).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-6);
    }

    #[test]
    fn jacobian_of_bilinear_residual() {
        // Rows of x1*x2 have Jacobian row (x2, x1) = (3, 2) at (2, 3).
        let p = ProblemBuilder::least_squares("bilinear", 2, 2, |x| {
            vec![x[0] * x[1], x[0] * x[1]]
        })
        .build()
        .unwrap();
        let j = fd_jacobian(&p, &[2.0, 3.0]).unwrap();
        for row in 0..2 {
            assert!((j.get(row, 0) - 3.0).abs() < 1e-6);
            assert!((j.get(row, 1) - 2.0).abs() < 1e-6);
        }
    }

    // Hand-checked second derivatives of f = x1^2 x2:
    // H = [[2 x2, 2 x1], [2 x1, 0]] = [[2, 2], [2, 0]] at (1, 1).
    #[test]
    fn hessian_without_analytic_gradient() {
        let p = ProblemBuilder::unconstrained("x1sq_x2", 2, |x| x[0] * x[0] * x[1])
            .build()
            .unwrap();
        let h = fd_hessian(&p, &[1.0, 1.0]).unwrap();
        let expect = [[2.0, 2.0], [2.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (h.get(i, j) - expect[i][j]).abs() < 1e-4,
                    "H[{i}][{j}] = {} vs {}",
                    h.get(i, j),
                    expect[i][j]
                );
            }
        }
        assert_eq!(h.max_asymmetry(), 0.0);
    }

    #[test]
    fn hessian_with_analytic_gradient_is_tighter() {
        let p = ProblemBuilder::unconstrained("x1sq_x2", 2, |x| x[0] * x[0] * x[1])
            .gradient(|x| vec![2.0 * x[0] * x[1], x[0] * x[0]])
            .build()
            .unwrap();
        let h = fd_hessian(&p, &[1.0, 1.0]).unwrap();
        let expect = [[2.0, 2.0], [2.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.get(i, j) - expect[i][j]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn non_finite_objective_is_reported() {
        let p = ProblemBuilder::unconstrained("log", 1, |x| x[0].ln()).build().unwrap();
        // Probes straddle zero, hitting ln of a negative number (NaN).
        let err = fd_gradient(&p, &[0.0]).unwrap_err();
        assert!(matches!(err, ProblemError::NonFiniteValue { .. }));
    }

    #[test]
    fn jacobian_requires_residual() {
        let p = ProblemBuilder::unconstrained("sq", 1, |x| x[0] * x[0]).build().unwrap();
        assert!(matches!(
            fd_jacobian(&p, &[1.0]),
            Err(ProblemError::Unavailable { .. })
        ));
    }
}
