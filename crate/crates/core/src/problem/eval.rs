use super::fd::{
    central_gradient, central_hessian, central_jacobian, raw_analytic_gradient,
    raw_analytic_hessian, raw_analytic_jacobian, raw_objective_value, raw_residual,
};
use super::{nls_gradient, ProblemDefinition, ProblemError};
use crate::linalg::DenseMatrix;

/// Which quantities an evaluation should fill.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Wanted {
    pub f: bool,
    pub residual: bool,
    pub gradient: bool,
    pub jacobian: bool,
    pub hessian: bool,
}

impl Wanted {
    pub const NONE: Wanted = Wanted {
        f: false,
        residual: false,
        gradient: false,
        jacobian: false,
        hessian: false,
    };

    pub const fn with_f(mut self) -> Self {
        self.f = true;
        self
    }

    pub const fn with_residual(mut self) -> Self {
        self.residual = true;
        self
    }

    pub const fn with_gradient(mut self) -> Self {
        self.gradient = true;
        self
    }

    pub const fn with_jacobian(mut self) -> Self {
        self.jacobian = true;
        self
    }

    pub const fn with_hessian(mut self) -> Self {
        self.hessian = true;
        self
    }
}

/// Cumulative per-quantity production counters.
///
/// Every computation of a quantity counts, including finite-difference
/// probe values, so the counters measure true work. They never decrease.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub f: u64,
    pub residual: u64,
    pub gradient: u64,
    pub jacobian: u64,
    pub hessian: u64,
}

/// Cached quantities at a single point.
///
/// A record is tied to its point: evaluators build a fresh record whenever
/// the point changes, so stored derivatives always correspond to the stored
/// `x`. Hessians are symmetrized before storage.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    x: Vec<f64>,
    f: Option<f64>,
    residual: Option<Vec<f64>>,
    gradient: Option<Vec<f64>>,
    jacobian: Option<DenseMatrix>,
    hessian: Option<DenseMatrix>,
    counts: EvalCounts,
}

impl EvalRecord {
    fn fresh(x: Vec<f64>, counts: EvalCounts) -> Self {
        Self {
            x,
            f: None,
            residual: None,
            gradient: None,
            jacobian: None,
            hessian: None,
            counts,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn f(&self) -> Option<f64> {
        self.f
    }

    pub fn residual(&self) -> Option<&[f64]> {
        self.residual.as_deref()
    }

    pub fn gradient(&self) -> Option<&[f64]> {
        self.gradient.as_deref()
    }

    pub fn jacobian(&self) -> Option<&DenseMatrix> {
        self.jacobian.as_ref()
    }

    pub fn hessian(&self) -> Option<&DenseMatrix> {
        self.hessian.as_ref()
    }

    /// Counter snapshot at the time this record was last filled.
    pub fn counts(&self) -> EvalCounts {
        self.counts
    }
}

/// Evaluates problem quantities with caching at the current point and
/// cumulative work counting.
///
/// Each quantity is filled from the first available source: analytic
/// callback, residual composition (`J^T F`, `J^T J`), central differences.
pub struct Evaluator<'p> {
    problem: &'p ProblemDefinition,
    counts: EvalCounts,
    record: Option<EvalRecord>,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p ProblemDefinition) -> Self {
        Self {
            problem,
            counts: EvalCounts::default(),
            record: None,
        }
    }

    pub fn problem(&self) -> &'p ProblemDefinition {
        self.problem
    }

    pub fn counts(&self) -> EvalCounts {
        self.counts
    }

    /// Fills the requested quantities at `x`, reusing anything already
    /// cached for the same point, and returns the record.
    pub fn ensure(&mut self, x: &[f64], wanted: Wanted) -> Result<&EvalRecord, ProblemError> {
        if x.len() != self.problem.n() {
            return Err(ProblemError::DimensionMismatch(format!(
                "point has length {}, problem dimension is {}",
                x.len(),
                self.problem.n()
            )));
        }
        let stale = self.record.as_ref().map_or(true, |r| r.x != x);
        if stale {
            self.record = Some(EvalRecord::fresh(x.to_vec(), self.counts));
        }
        let mut rec = self.record.take().expect("record present");

        let outcome = self.fill(&mut rec, wanted);
        rec.counts = self.counts;
        self.record = Some(rec);
        outcome?;
        Ok(self.record.as_ref().expect("record present"))
    }

    fn fill(&mut self, rec: &mut EvalRecord, wanted: Wanted) -> Result<(), ProblemError> {
        let need_residual = wanted.residual
            || (wanted.f && !self.problem.has_objective())
            || (wanted.gradient
                && !self.problem.has_analytic_gradient()
                && self.problem.has_residual());
        if need_residual && rec.residual.is_none() {
            rec.residual = Some(self.produce_residual(&rec.x)?);
        }

        if wanted.f && rec.f.is_none() {
            let f = if self.problem.has_objective() {
                self.counts.f += 1;
                raw_objective_value(self.problem, &rec.x)?
            } else {
                let r = rec.residual.as_ref().expect("residual filled above");
                self.counts.f += 1;
                0.5 * r.iter().map(|v| v * v).sum::<f64>()
            };
            rec.f = Some(f);
        }

        if wanted.jacobian && rec.jacobian.is_none() {
            rec.jacobian = Some(self.produce_jacobian(&rec.x)?);
        }

        if wanted.gradient && rec.gradient.is_none() {
            let g = if self.problem.has_analytic_gradient() {
                self.counts.gradient += 1;
                raw_analytic_gradient(self.problem, &rec.x)?.expect("callback present")
            } else if self.problem.has_residual() {
                if rec.jacobian.is_none() {
                    rec.jacobian = Some(self.produce_jacobian(&rec.x)?);
                }
                if rec.residual.is_none() {
                    rec.residual = Some(self.produce_residual(&rec.x)?);
                }
                self.counts.gradient += 1;
                nls_gradient(
                    rec.jacobian.as_ref().expect("jacobian filled"),
                    rec.residual.as_ref().expect("residual filled"),
                )?
            } else {
                let problem = self.problem;
                let counts = &mut self.counts;
                let g = central_gradient(
                    |y| {
                        counts.f += 1;
                        raw_objective_value(problem, y)
                    },
                    &rec.x,
                )?;
                self.counts.gradient += 1;
                g
            };
            rec.gradient = Some(g);
        }

        if wanted.hessian && rec.hessian.is_none() {
            let h = if self.problem.has_analytic_hessian() {
                let mut h = raw_analytic_hessian(self.problem, &rec.x)?.expect("callback present");
                h.check_symmetric()?;
                h.symmetrize();
                self.counts.hessian += 1;
                h
            } else if self.problem.has_residual() {
                // Gauss-Newton approximation J^T J.
                if rec.jacobian.is_none() {
                    rec.jacobian = Some(self.produce_jacobian(&rec.x)?);
                }
                self.counts.hessian += 1;
                rec.jacobian.as_ref().expect("jacobian filled").gram()
            } else {
                let h = self.fd_hessian_counted(&rec.x)?;
                self.counts.hessian += 1;
                h
            };
            rec.hessian = Some(h);
        }
        Ok(())
    }

    fn produce_residual(&mut self, x: &[f64]) -> Result<Vec<f64>, ProblemError> {
        self.counts.residual += 1;
        raw_residual(self.problem, x)
    }

    fn produce_jacobian(&mut self, x: &[f64]) -> Result<DenseMatrix, ProblemError> {
        if let Some(j) = raw_analytic_jacobian(self.problem, x)? {
            self.counts.jacobian += 1;
            return Ok(j);
        }
        if !self.problem.has_residual() {
            return Err(ProblemError::Unavailable {
                problem: self.problem.name().to_string(),
                quantity: "jacobian",
            });
        }
        let problem = self.problem;
        let counts = &mut self.counts;
        let j = central_jacobian(
            |y| {
                counts.residual += 1;
                raw_residual(problem, y)
            },
            x,
            problem.m(),
        )?;
        self.counts.jacobian += 1;
        Ok(j)
    }

    fn gradient_at(&mut self, x: &[f64]) -> Result<Vec<f64>, ProblemError> {
        if self.problem.has_analytic_gradient() {
            self.counts.gradient += 1;
            return Ok(raw_analytic_gradient(self.problem, x)?.expect("callback present"));
        }
        if self.problem.has_residual() {
            let j = self.produce_jacobian(x)?;
            let f = self.produce_residual(x)?;
            self.counts.gradient += 1;
            return nls_gradient(&j, &f);
        }
        let problem = self.problem;
        let counts = &mut self.counts;
        let g = central_gradient(
            |y| {
                counts.f += 1;
                raw_objective_value(problem, y)
            },
            x,
        )?;
        self.counts.gradient += 1;
        Ok(g)
    }

    fn fd_hessian_counted(&mut self, x: &[f64]) -> Result<DenseMatrix, ProblemError> {
        let this = self;
        central_hessian(move |y| this.gradient_at(y), x)
    }
}

/// One-shot evaluation at a point.
pub fn evaluate(
    p: &ProblemDefinition,
    x: &[f64],
    wanted: Wanted,
) -> Result<EvalRecord, ProblemError> {
    let mut ev = Evaluator::new(p);
    ev.ensure(x, wanted)?;
    Ok(ev.record.take().expect("record present"))
}
