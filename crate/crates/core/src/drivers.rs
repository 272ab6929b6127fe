//! The generic Newton loop and its concrete drivers.
//!
//! [`newton_iterate`] implements the template once:
//!
//! ```text
//! while stop(state) is Continue:
//!     s      <- direction(state)
//!     lambda <- step(state, s)
//!     x      <- x + lambda * s
//! ```
//!
//! Every named driver — `damped-newton`, `trust-region-newton`, `bfgs`,
//! `inexact-newton`, `gauss-newton` — is an assembly of hooks over this
//! single loop. [`driver_hooks`] exposes the assemblies, so a run through a
//! driver name and a manual run through `newton_iterate` with the same
//! hooks produce identical traces.

use crate::linalg::{
    axpy, dot, neg, norm2, norm_inf, solve_cg, solve_cholesky, DenseMatrix, LinAlgError,
};
use crate::linesearch::{
    line_search, Condition, Generator, LineFunction, LineSearchError, LineSearchParams,
};
use crate::problem::{
    transform_ne_to_uo, EvalCounts, EvalRecord, Evaluator, ProblemDefinition, ProblemError,
    ProblemKind, Wanted,
};
use crate::trustregion::{
    agreement_ratio, solve_subproblem, update_radius, QuadraticModel, Subproblem,
    TrustRegionError, TrustRegionState,
};
use std::borrow::Cow;
use std::cell::RefCell;
use std::fmt;
use thiserror::Error;

const W_F: Wanted = Wanted::NONE.with_f();
const W_G: Wanted = Wanted::NONE.with_gradient();
const W_FG: Wanted = Wanted::NONE.with_f().with_gradient();
const W_FGH: Wanted = Wanted::NONE.with_f().with_gradient().with_hessian();

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("solver setup: {0}")]
    Setup(String),
    #[error(transparent)]
    Evaluation(#[from] ProblemError),
    #[error(transparent)]
    Linear(#[from] LinAlgError),
    #[error(transparent)]
    LineSearch(#[from] LineSearchError),
    #[error(transparent)]
    TrustRegion(#[from] TrustRegionError),
    #[error("numerical breakdown: {0}")]
    Breakdown(String),
}

/// Stopping thresholds checked in priority order: gradient norm, step size,
/// objective change, iteration budget. `f_tol = 0` disables the objective
/// test (the default).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingCriteria {
    /// Threshold on the max-norm of the gradient.
    pub grad_tol: f64,
    /// Threshold on `||lambda s||_inf / max(1, ||x||_inf)`.
    pub step_tol: f64,
    /// Threshold on `|delta f| / max(1, |f|)`; 0 disables.
    pub f_tol: f64,
    pub max_iter: u32,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            step_tol: 1e-12,
            f_tol: 0.0,
            max_iter: 200,
        }
    }
}

impl StoppingCriteria {
    pub fn validate(&self) -> Result<(), DriverError> {
        let ok = self.grad_tol >= 0.0
            && self.step_tol >= 0.0
            && self.f_tol >= 0.0
            && self.grad_tol.is_finite()
            && self.step_tol.is_finite()
            && self.f_tol.is_finite();
        if !ok {
            return Err(DriverError::Setup(
                "stopping tolerances must be finite and non-negative".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(DriverError::Setup("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which stopping test fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientNorm,
    StepSize,
    ObjectiveChange,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    LineSearchFailed,
    NumericalBreakdown,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIterations => "MaxIterations",
            SolveStatus::LineSearchFailed => "LineSearchFailed",
            SolveStatus::NumericalBreakdown => "NumericalBreakdown",
        };
        f.write_str(s)
    }
}

/// Per-iteration annotation carried in the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterFlag {
    #[default]
    None,
    /// The Hessian (or its stand-in) was shifted to restore definiteness.
    ModifiedHessian,
    /// CG hit negative curvature; steepest descent was used instead.
    IndefiniteFallback,
    /// Predicted reduction degenerated; the ratio was forced to -inf.
    SentinelRho,
    /// A quasi-Newton update was skipped for lack of curvature.
    SkippedUpdate,
}

/// Loop state at iteration `k` (the record always belongs to `x`).
#[derive(Debug, Clone)]
pub struct IterateState {
    pub k: u32,
    pub x: Vec<f64>,
    pub eval: EvalRecord,
    /// Step length applied on the transition into this state.
    pub lambda: f64,
    /// Direction used on that transition.
    pub direction: Vec<f64>,
    /// Objective change on that transition.
    pub delta_f: f64,
    /// Whether that transition actually moved the iterate.
    pub last_accepted: bool,
}

/// Direction hook output.
#[derive(Debug, Clone)]
pub struct DirectionOutcome {
    pub s: Vec<f64>,
    pub flag: IterFlag,
}

/// Step hook output: the scalar applied to the direction plus bookkeeping.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub lambda: f64,
    /// Objective at the resulting iterate (the old value when rejected).
    pub f_new: f64,
    pub accepted: bool,
    /// Step-control quantity for the trace: the step length for
    /// line-search drivers, the radius used for trust-region drivers.
    pub control: f64,
    /// Trial evaluations spent by a line search (0 otherwise).
    pub trials: u32,
    /// Agreement ratio for trust-region steps.
    pub rho: Option<f64>,
    pub flag: IterFlag,
}

pub type DirectionHook<'a> = Box<
    dyn FnMut(&IterateState, &mut Evaluator<'_>) -> Result<DirectionOutcome, DriverError> + 'a,
>;
pub type StepHook<'a> = Box<
    dyn FnMut(
            &IterateState,
            &DirectionOutcome,
            &mut Evaluator<'_>,
        ) -> Result<StepOutcome, DriverError>
        + 'a,
>;
pub type StopHook<'a> = Box<dyn FnMut(&IterateState, &StoppingCriteria) -> Option<StopReason> + 'a>;

/// The three swappable parts of the generic loop.
pub struct NewtonHooks<'a> {
    pub direction: DirectionHook<'a>,
    pub step: StepHook<'a>,
    pub stop: StopHook<'a>,
}

impl<'a> NewtonHooks<'a> {
    /// Hooks with the standard stopping component ([`check_stop`]).
    pub fn standard(direction: DirectionHook<'a>, step: StepHook<'a>) -> Self {
        Self {
            direction,
            step,
            stop: Box::new(check_stop_hook),
        }
    }
}

fn check_stop_hook(state: &IterateState, criteria: &StoppingCriteria) -> Option<StopReason> {
    check_stop(state, criteria)
}

/// One row of a convergence trace. Row `k = 0` describes the starting
/// point; its step fields are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: u32,
    pub f: f64,
    pub grad_norm: f64,
    pub step_control: f64,
    pub dir_norm: f64,
    pub accepted: bool,
    pub flag: IterFlag,
}

/// Renders a trace as CSV (full precision, header included).
pub fn trace_to_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("k,f,grad_norm,step_control,dir_norm,accepted\n");
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.k,
            row.f,
            row.grad_norm,
            row.step_control,
            row.dir_norm,
            u8::from(row.accepted)
        ));
    }
    out
}

/// Final result of a solver run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Which stopping test fired (present when the loop exited normally).
    pub stop_reason: Option<StopReason>,
    pub x_final: Vec<f64>,
    pub f_final: f64,
    /// Max-norm of the final gradient.
    pub g_norm_final: f64,
    pub iterations: u32,
    /// One row per iterate, including the starting point.
    pub trace: Vec<TraceRow>,
    pub eval_counts: EvalCounts,
    /// Failure detail for non-converged statuses.
    pub failure: Option<String>,
}

impl SolveResult {
    pub fn trace_csv(&self) -> String {
        trace_to_csv(&self.trace)
    }

    /// How many iterations carried the given flag.
    pub fn count_flag(&self, flag: IterFlag) -> usize {
        self.trace.iter().filter(|r| r.flag == flag).count()
    }
}

/// The standard stopping component. Fires in priority order: gradient
/// norm, step size (accepted steps only, from k >= 1), objective change
/// (likewise), iteration budget.
pub fn check_stop(state: &IterateState, criteria: &StoppingCriteria) -> Option<StopReason> {
    if criteria.grad_tol > 0.0 {
        if let Some(g) = state.eval.gradient() {
            if norm_inf(g) <= criteria.grad_tol {
                return Some(StopReason::GradientNorm);
            }
        }
    }
    if state.k >= 1 && state.last_accepted {
        if criteria.step_tol > 0.0 {
            let step_inf = state.lambda.abs() * norm_inf(&state.direction);
            if step_inf / norm_inf(&state.x).max(1.0) <= criteria.step_tol {
                return Some(StopReason::StepSize);
            }
        }
        if criteria.f_tol > 0.0 {
            let fref = state.eval.f().map_or(1.0, |f| f.abs().max(1.0));
            if state.delta_f.abs() <= criteria.f_tol * fref {
                return Some(StopReason::ObjectiveChange);
            }
        }
    }
    if state.k >= criteria.max_iter {
        return Some(StopReason::MaxIterations);
    }
    None
}

fn status_for(reason: StopReason) -> SolveStatus {
    match reason {
        StopReason::MaxIterations => SolveStatus::MaxIterations,
        _ => SolveStatus::Converged,
    }
}

fn failure_status(e: &DriverError) -> SolveStatus {
    match e {
        DriverError::LineSearch(
            LineSearchError::Failed { .. }
            | LineSearchError::DegenerateInterpolant(_)
            | LineSearchError::NotDescent(_),
        ) => SolveStatus::LineSearchFailed,
        _ => SolveStatus::NumericalBreakdown,
    }
}

/// Runs the generic Newton loop with the given hooks.
///
/// Hook failures do not abort: they finalize the result with status
/// `LineSearchFailed` or `NumericalBreakdown` and the trace collected so
/// far. Only structural misuse (wrong `x0` length, bad criteria) returns
/// an error.
pub fn newton_iterate(
    p: &ProblemDefinition,
    x0: &[f64],
    criteria: &StoppingCriteria,
    mut hooks: NewtonHooks,
) -> Result<SolveResult, DriverError> {
    criteria.validate()?;
    if x0.len() != p.n() {
        return Err(DriverError::Setup(format!(
            "x0 has length {}, problem dimension is {}",
            x0.len(),
            p.n()
        )));
    }

    let mut evaluator = Evaluator::new(p);
    let mut trace: Vec<TraceRow> = Vec::new();

    let rec = match evaluator.ensure(x0, W_FG) {
        Ok(r) => r.clone(),
        Err(e) => {
            // The starting point itself is not evaluable.
            trace.push(TraceRow {
                k: 0,
                f: f64::NAN,
                grad_norm: f64::NAN,
                step_control: 0.0,
                dir_norm: 0.0,
                accepted: false,
                flag: IterFlag::None,
            });
            return Ok(SolveResult {
                status: SolveStatus::NumericalBreakdown,
                stop_reason: None,
                x_final: x0.to_vec(),
                f_final: f64::NAN,
                g_norm_final: f64::NAN,
                iterations: 0,
                trace,
                eval_counts: evaluator.counts(),
                failure: Some(e.to_string()),
            });
        }
    };

    let mut state = IterateState {
        k: 0,
        x: x0.to_vec(),
        eval: rec,
        lambda: 0.0,
        direction: vec![0.0; p.n()],
        delta_f: 0.0,
        last_accepted: true,
    };
    trace.push(TraceRow {
        k: 0,
        f: state.eval.f().expect("f requested"),
        grad_norm: norm_inf(state.eval.gradient().expect("gradient requested")),
        step_control: 0.0,
        dir_norm: 0.0,
        accepted: true,
        flag: IterFlag::None,
    });

    fn finish(
        status: SolveStatus,
        reason: Option<StopReason>,
        failure: Option<String>,
        state: &IterateState,
        trace: Vec<TraceRow>,
        counts: EvalCounts,
    ) -> SolveResult {
        SolveResult {
            status,
            stop_reason: reason,
            x_final: state.x.clone(),
            f_final: state.eval.f().unwrap_or(f64::NAN),
            g_norm_final: state.eval.gradient().map_or(f64::NAN, norm_inf),
            iterations: state.k,
            trace,
            eval_counts: counts,
            failure,
        }
    }

    loop {
        if let Some(reason) = (hooks.stop)(&state, criteria) {
            return Ok(finish(
                status_for(reason),
                Some(reason),
                None,
                &state,
                trace,
                evaluator.counts(),
            ));
        }

        let dir = match (hooks.direction)(&state, &mut evaluator) {
            Ok(d) => d,
            Err(e) => {
                return Ok(finish(
                    failure_status(&e),
                    None,
                    Some(e.to_string()),
                    &state,
                    trace,
                    evaluator.counts(),
                ))
            }
        };
        let step = match (hooks.step)(&state, &dir, &mut evaluator) {
            Ok(s) => s,
            Err(e) => {
                return Ok(finish(
                    failure_status(&e),
                    None,
                    Some(e.to_string()),
                    &state,
                    trace,
                    evaluator.counts(),
                ))
            }
        };

        let f_old = state.eval.f().expect("f available");
        let x_new = if step.accepted && step.lambda != 0.0 {
            axpy(&state.x, step.lambda, &dir.s)
        } else {
            state.x.clone()
        };
        let rec = match evaluator.ensure(&x_new, W_FG) {
            Ok(r) => r.clone(),
            Err(e) => {
                return Ok(finish(
                    SolveStatus::NumericalBreakdown,
                    None,
                    Some(e.to_string()),
                    &state,
                    trace,
                    evaluator.counts(),
                ))
            }
        };
        let f_new = rec.f().expect("f requested");
        state = IterateState {
            k: state.k + 1,
            x: x_new,
            eval: rec,
            lambda: step.lambda,
            direction: dir.s.clone(),
            delta_f: f_new - f_old,
            last_accepted: step.accepted,
        };
        let flag = if step.flag != IterFlag::None {
            step.flag
        } else {
            dir.flag
        };
        trace.push(TraceRow {
            k: state.k,
            f: f_new,
            grad_norm: norm_inf(state.eval.gradient().expect("gradient requested")),
            step_control: step.control,
            dir_norm: norm2(&dir.s),
            accepted: step.accepted,
            flag,
        });
    }
}

/// Rank-two BFGS update of the Hessian approximation `B`.
///
/// Returns the updated matrix and whether the update was applied; it is
/// skipped (second value `false`) when the curvature `y^T s` is at noise
/// level, which keeps `B` symmetric positive definite.
pub fn bfgs_update(b: &DenseMatrix, s: &[f64], y: &[f64]) -> (DenseMatrix, bool) {
    assert!(
        b.is_square() && b.rows() == s.len() && s.len() == y.len(),
        "bfgs_update: dimension mismatch"
    );
    let sy = dot(s, y);
    if sy <= 1e-10 * norm2(s) * norm2(y) {
        return (b.clone(), false);
    }
    let bs = b.matvec(s).expect("dimensions checked");
    let sbs = dot(s, &bs);
    if sbs <= 0.0 {
        return (b.clone(), false);
    }
    let n = s.len();
    let mut out = b.clone();
    for i in 0..n {
        for j in 0..n {
            let v = out.get(i, j) - bs[i] * bs[j] / sbs + y[i] * y[j] / sy;
            out.set(i, j, v);
        }
    }
    (out, true)
}

// ---------------------------------------------------------------------------
// Driver assemblies
// ---------------------------------------------------------------------------

/// Named drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriverKind {
    DampedNewton,
    TrustRegionNewton,
    Bfgs,
    InexactNewton,
    GaussNewton,
}

impl DriverKind {
    pub const NAMES: [&'static str; 5] = [
        "bfgs",
        "damped-newton",
        "gauss-newton",
        "inexact-newton",
        "trust-region-newton",
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "damped-newton" => Some(Self::DampedNewton),
            "trust-region-newton" => Some(Self::TrustRegionNewton),
            "bfgs" => Some(Self::Bfgs),
            "inexact-newton" => Some(Self::InexactNewton),
            "gauss-newton" => Some(Self::GaussNewton),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::DampedNewton => "damped-newton",
            Self::TrustRegionNewton => "trust-region-newton",
            Self::Bfgs => "bfgs",
            Self::InexactNewton => "inexact-newton",
            Self::GaussNewton => "gauss-newton",
        }
    }
}

/// Assembly-time options. Line-search fields apply to line-search drivers,
/// the radius fields to the trust-region driver, `forcing_eta` to the
/// inexact driver.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverOptions {
    pub ls_params: LineSearchParams,
    pub ls_condition: Condition,
    pub ls_generator: Generator,
    pub subproblem: Subproblem,
    pub delta0: f64,
    /// Radius cap; `None` means `1e3 * delta0`.
    pub delta_max: Option<f64>,
    /// Relative residual at which the inner CG solve is truncated.
    pub forcing_eta: f64,
}

impl DriverOptions {
    /// Documented defaults per driver: damped Newton, inexact Newton and
    /// Gauss-Newton backtrack on Armijo with quadratic interpolation; BFGS
    /// requires strong Wolfe (cubic interpolation); the trust-region driver
    /// uses dogleg with unit initial radius; inexact Newton truncates CG at
    /// a constant forcing term of 0.1.
    pub fn defaults_for(kind: DriverKind) -> Self {
        let base = Self {
            ls_params: LineSearchParams::default(),
            ls_condition: Condition::Armijo,
            ls_generator: Generator::BacktrackingQuadratic,
            subproblem: Subproblem::Dogleg,
            delta0: 1.0,
            delta_max: None,
            forcing_eta: 0.1,
        };
        match kind {
            DriverKind::Bfgs => Self {
                ls_condition: Condition::StrongWolfe,
                ls_generator: Generator::BacktrackingCubic,
                ..base
            },
            _ => base,
        }
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        self.ls_params.validate()?;
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(DriverError::Setup(format!(
                "delta0 must be positive and finite, got {}",
                self.delta0
            )));
        }
        if let Some(dm) = self.delta_max {
            if !(dm >= self.delta0) {
                return Err(DriverError::Setup(format!(
                    "delta_max {dm} must be at least delta0 {}",
                    self.delta0
                )));
            }
        }
        if !(self.forcing_eta > 0.0 && self.forcing_eta < 1.0) {
            return Err(DriverError::Setup(format!(
                "forcing eta must lie in (0, 1), got {}",
                self.forcing_eta
            )));
        }
        Ok(())
    }

    fn trust_region_state(&self) -> Result<TrustRegionState, DriverError> {
        let mut st = TrustRegionState::new(self.delta0)?;
        if let Some(dm) = self.delta_max {
            st.radius_max = dm;
        }
        st.validate()?;
        Ok(st)
    }
}

/// Line-search step hook shared by all line-search drivers.
fn line_search_step_hook(
    condition: Condition,
    generator: Generator,
    params: LineSearchParams,
) -> StepHook<'static> {
    Box::new(move |state, dir, eval| {
        let f0 = state.eval.f().expect("f available in state");
        let g = state.eval.gradient().expect("gradient available in state");
        let slope0 = dot(g, &dir.s);
        let x = &state.x;
        let s = &dir.s;
        let cell = RefCell::new(eval);
        let mut lf = LineFunction::with_slope(
            f0,
            slope0,
            |l| {
                let mut ev = cell.borrow_mut();
                ev.ensure(&axpy(x, l, s), W_F)
                    .map(|r| r.f().expect("f filled"))
                    .map_err(|e| LineSearchError::Eval(e.to_string()))
            },
            |l| {
                let mut ev = cell.borrow_mut();
                ev.ensure(&axpy(x, l, s), W_G)
                    .map(|r| dot(r.gradient().expect("gradient filled"), s))
                    .map_err(|e| LineSearchError::Eval(e.to_string()))
            },
        );
        let out = line_search(&mut lf, condition, generator, &params)?;
        Ok(StepOutcome {
            lambda: out.lambda,
            f_new: out.f_trial,
            accepted: true,
            control: out.lambda,
            trials: out.trials,
            rho: None,
            flag: IterFlag::None,
        })
    })
}

fn newton_direction_hook() -> DirectionHook<'static> {
    Box::new(|state, eval| {
        let rec = eval.ensure(&state.x, W_FGH)?;
        let g = rec.gradient().expect("gradient filled").to_vec();
        let h = rec.hessian().expect("hessian filled").clone();
        let report = solve_cholesky(&h, &neg(&g), true)?;
        let flag = if report.modified {
            IterFlag::ModifiedHessian
        } else {
            IterFlag::None
        };
        Ok(DirectionOutcome {
            s: report.solution,
            flag,
        })
    })
}

fn bfgs_direction_hook() -> DirectionHook<'static> {
    let mut b: Option<DenseMatrix> = None;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    Box::new(move |state, eval| {
        let rec = eval.ensure(&state.x, W_FG)?;
        let g = rec.gradient().expect("gradient filled").to_vec();
        let n = state.x.len();
        let mut matrix = b.take().unwrap_or_else(|| DenseMatrix::identity(n));
        let mut flag = IterFlag::None;
        if let Some((px, pg)) = prev.take() {
            let s = crate::linalg::sub(&state.x, &px);
            let y = crate::linalg::sub(&g, &pg);
            if norm2(&s) > 0.0 {
                let (updated, applied) = bfgs_update(&matrix, &s, &y);
                matrix = updated;
                if !applied {
                    flag = IterFlag::SkippedUpdate;
                }
            }
        }
        // B stays SPD through the skip rule, so the solve is unmodified.
        let report = solve_cholesky(&matrix, &neg(&g), false)?;
        prev = Some((state.x.clone(), g));
        b = Some(matrix);
        Ok(DirectionOutcome {
            s: report.solution,
            flag,
        })
    })
}

fn inexact_direction_hook(eta: f64) -> DirectionHook<'static> {
    Box::new(move |state, eval| {
        let rec = eval.ensure(&state.x, W_FGH)?;
        let g = rec.gradient().expect("gradient filled").to_vec();
        let h = rec.hessian().expect("hessian filled").clone();
        match solve_cg(&h, &neg(&g), eta, state.x.len()) {
            Ok(report) => Ok(DirectionOutcome {
                s: report.solution,
                flag: IterFlag::None,
            }),
            Err(LinAlgError::IndefiniteOperator(_)) => Ok(DirectionOutcome {
                s: neg(&g),
                flag: IterFlag::IndefiniteFallback,
            }),
            Err(e) => Err(e.into()),
        }
    })
}

fn trust_region_hooks(opts: &DriverOptions) -> Result<NewtonHooks<'static>, DriverError> {
    use std::rc::Rc;

    let subproblem = opts.subproblem;
    let shared = Rc::new(RefCell::new(opts.trust_region_state()?));

    let direction: DirectionHook<'static> = {
        let shared = Rc::clone(&shared);
        Box::new(move |state, eval| {
            let delta = shared.borrow().radius;
            if delta < 1e-14 {
                return Err(DriverError::Breakdown(format!(
                    "trust region collapsed (radius {delta:e})"
                )));
            }
            let rec = eval.ensure(&state.x, W_FGH)?;
            let qm = QuadraticModel::new(
                rec.f().expect("f filled"),
                rec.gradient().expect("gradient filled").to_vec(),
                rec.hessian().expect("hessian filled").clone(),
            )?;
            let newton = if subproblem.needs_newton_step() {
                let report = solve_cholesky(qm.hessian(), &neg(qm.gradient()), true)?;
                Some((report.solution, report.modified))
            } else {
                None
            };
            let flag = match &newton {
                Some((_, true)) => IterFlag::ModifiedHessian,
                _ => IterFlag::None,
            };
            let s = solve_subproblem(
                subproblem,
                &qm,
                delta,
                newton.as_ref().map(|(s, _)| s.as_slice()),
            )?;
            Ok(DirectionOutcome { s, flag })
        })
    };

    let step: StepHook<'static> = {
        let shared = Rc::clone(&shared);
        Box::new(move |state, dir, eval| {
            let delta_used = shared.borrow().radius;
            let rec = eval.ensure(&state.x, W_FGH)?;
            let qm = QuadraticModel::new(
                rec.f().expect("f filled"),
                rec.gradient().expect("gradient filled").to_vec(),
                rec.hessian().expect("hessian filled").clone(),
            )?;
            let f_old = qm.f0();
            let x_trial = axpy(&state.x, 1.0, &dir.s);
            let f_trial = eval.ensure(&x_trial, W_F)?.f().expect("f filled");
            let ratio = agreement_ratio(f_old, f_trial, &qm, &dir.s);
            let update = update_radius(&shared.borrow(), ratio.rho, norm2(&dir.s));
            *shared.borrow_mut() = update.state;
            Ok(StepOutcome {
                lambda: if update.accepted { 1.0 } else { 0.0 },
                f_new: if update.accepted { f_trial } else { f_old },
                accepted: update.accepted,
                control: delta_used,
                trials: 0,
                rho: Some(ratio.rho),
                flag: if ratio.degenerate {
                    IterFlag::SentinelRho
                } else {
                    IterFlag::None
                },
            })
        })
    };

    Ok(NewtonHooks::standard(direction, step))
}

/// Builds the hook assembly for a named driver.
///
/// For line-search drivers the direction hook solves the (possibly
/// modified) Newton system and the step hook runs the configured line
/// search; for the trust-region driver the step is the subproblem solution
/// taken at unit length or rejected, with the radius updated from the
/// agreement ratio.
pub fn driver_hooks(
    kind: DriverKind,
    opts: &DriverOptions,
) -> Result<NewtonHooks<'static>, DriverError> {
    opts.validate()?;
    let hooks = match kind {
        DriverKind::DampedNewton | DriverKind::GaussNewton => NewtonHooks::standard(
            newton_direction_hook(),
            line_search_step_hook(opts.ls_condition, opts.ls_generator, opts.ls_params),
        ),
        DriverKind::Bfgs => NewtonHooks::standard(
            bfgs_direction_hook(),
            line_search_step_hook(opts.ls_condition, opts.ls_generator, opts.ls_params),
        ),
        DriverKind::InexactNewton => NewtonHooks::standard(
            inexact_direction_hook(opts.forcing_eta),
            line_search_step_hook(opts.ls_condition, opts.ls_generator, opts.ls_params),
        ),
        DriverKind::TrustRegionNewton => trust_region_hooks(opts)?,
    };
    Ok(hooks)
}

/// Adapts the problem to what the driver consumes: equations and
/// least-squares problems are transformed to their merit objective for the
/// general-purpose drivers, while `gauss-newton` requires residual data
/// and uses it directly.
pub fn prepare_problem<'p>(
    kind: DriverKind,
    p: &'p ProblemDefinition,
) -> Result<Cow<'p, ProblemDefinition>, DriverError> {
    match kind {
        DriverKind::GaussNewton => {
            if !p.has_residual() {
                return Err(DriverError::Setup(format!(
                    "gauss-newton requires an equations or least-squares problem, \
                     got '{}' of kind {}",
                    p.name(),
                    p.kind()
                )));
            }
            Ok(Cow::Borrowed(p))
        }
        _ => match p.kind() {
            ProblemKind::UnconstrainedOptimization => Ok(Cow::Borrowed(p)),
            _ => Ok(Cow::Owned(transform_ne_to_uo(p)?)),
        },
    }
}

/// Runs a named driver end to end.
pub fn run_driver(
    kind: DriverKind,
    p: &ProblemDefinition,
    x0: &[f64],
    criteria: &StoppingCriteria,
    opts: &DriverOptions,
) -> Result<SolveResult, DriverError> {
    let prepared = prepare_problem(kind, p)?;
    let hooks = driver_hooks(kind, opts)?;
    newton_iterate(prepared.as_ref(), x0, criteria, hooks)
}

/// Damped Newton: modified-Cholesky direction plus a line search.
pub fn damped_newton_driver(
    p: &ProblemDefinition,
    x0: &[f64],
    criteria: &StoppingCriteria,
    ls_condition: Condition,
    ls_method: Generator,
) -> Result<SolveResult, DriverError> {
    let opts = DriverOptions {
        ls_condition,
        ls_generator: ls_method,
        ..DriverOptions::defaults_for(DriverKind::DampedNewton)
    };
    run_driver(DriverKind::DampedNewton, p, x0, criteria, &opts)
}

/// Trust-region Newton with the named subproblem solver.
pub fn trust_region_driver(
    p: &ProblemDefinition,
    x0: &[f64],
    criteria: &StoppingCriteria,
    subproblem: Subproblem,
) -> Result<SolveResult, DriverError> {
    let opts = DriverOptions {
        subproblem,
        ..DriverOptions::defaults_for(DriverKind::TrustRegionNewton)
    };
    run_driver(DriverKind::TrustRegionNewton, p, x0, criteria, &opts)
}

/// BFGS with a gradient-only model; never evaluates the true Hessian.
pub fn quasi_newton_driver(
    p: &ProblemDefinition,
    x0: &[f64],
    criteria: &StoppingCriteria,
    ls_condition: Condition,
    ls_method: Generator,
) -> Result<SolveResult, DriverError> {
    let opts = DriverOptions {
        ls_condition,
        ls_generator: ls_method,
        ..DriverOptions::defaults_for(DriverKind::Bfgs)
    };
    run_driver(DriverKind::Bfgs, p, x0, criteria, &opts)
}

/// Truncated Newton: CG on the Newton system stopped at relative residual
/// `eta`, Armijo backtracking, steepest descent on negative curvature.
pub fn inexact_newton_driver(
    p: &ProblemDefinition,
    x0: &[f64],
    criteria: &StoppingCriteria,
    forcing_eta: f64,
) -> Result<SolveResult, DriverError> {
    let opts = DriverOptions {
        forcing_eta,
        ..DriverOptions::defaults_for(DriverKind::InexactNewton)
    };
    run_driver(DriverKind::InexactNewton, p, x0, criteria, &opts)
}

/// Gauss-Newton over residual data: solves `(J^T J + nu I) s = -J^T F`
/// with `nu = 0` whenever `J^T J` admits a Cholesky factorization.
pub fn gauss_newton_driver(
    p: &ProblemDefinition,
    x0: &[f64],
    criteria: &StoppingCriteria,
    ls_condition: Condition,
    ls_method: Generator,
) -> Result<SolveResult, DriverError> {
    let opts = DriverOptions {
        ls_condition,
        ls_generator: ls_method,
        ..DriverOptions::defaults_for(DriverKind::GaussNewton)
    };
    run_driver(DriverKind::GaussNewton, p, x0, criteria, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::problem::ProblemBuilder;

    fn sphere(n: usize) -> ProblemDefinition {
        ProblemBuilder::unconstrained("sphere", n, |x| {
            0.5 * x.iter().map(|v| v * v).sum::<f64>()
        })
        .gradient(|x| x.to_vec())
        .hessian(move |x| DenseMatrix::identity(x.len()))
        .build()
        .unwrap()
    }

    #[test]
    fn newton_converges_in_one_step_on_sphere() {
        let p = sphere(2);
        let r = damped_newton_driver(
            &p,
            &[1.0, 1.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.trace.len(), 2);
        assert_eq!(r.x_final, vec![0.0, 0.0]);
    }

    #[test]
    fn always_stopping_hook_gives_zero_iterations() {
        let p = sphere(2);
        let hooks = NewtonHooks {
            direction: Box::new(|_, _| unreachable!("never called")),
            step: Box::new(|_, _, _| unreachable!("never called")),
            stop: Box::new(|_, _| Some(StopReason::GradientNorm)),
        };
        let r = newton_iterate(&p, &[5.0, -3.0], &StoppingCriteria::default(), hooks).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.x_final, vec![5.0, -3.0]);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.status, SolveStatus::Converged);
    }

    #[test]
    fn direction_error_becomes_breakdown_with_context() {
        let p = sphere(2);
        let hooks = NewtonHooks::standard(
            Box::new(|_, _| {
                Err(DriverError::Linear(LinAlgError::SingularMatrix {
                    pivot: 0.0,
                    threshold: 1.0,
                }))
            }),
            Box::new(|_, _, _| unreachable!("direction fails first")),
        );
        let r = newton_iterate(&p, &[5.0, -3.0], &StoppingCriteria::default(), hooks).unwrap();
        assert_eq!(r.status, SolveStatus::NumericalBreakdown);
        assert_eq!(r.iterations, 0);
        assert!(r.failure.unwrap().contains("singular"));
    }

    #[test]
    fn damped_newton_one_step_on_scaled_quadratic() {
        let p = ProblemBuilder::unconstrained("scaled", 2, |x| {
            0.5 * (x[0] * x[0] + 10.0 * x[1] * x[1])
        })
        .gradient(|x| vec![x[0], 10.0 * x[1]])
        .hessian(|_| DenseMatrix::diagonal(&[1.0, 10.0]))
        .build()
        .unwrap();
        let r = damped_newton_driver(
            &p,
            &[1.0, 1.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.trace[1].step_control, 1.0);
    }

    #[test]
    fn zero_gradient_start_converges_immediately() {
        // f = x^4 at the origin: gradient and Hessian both vanish, but the
        // gradient test already fires at k = 0.
        let p = ProblemBuilder::unconstrained("quartic", 1, |x| x[0].powi(4)).build().unwrap();
        let r = damped_newton_driver(
            &p,
            &[0.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn damped_newton_solves_rosenbrock() {
        let p = corpus::build("rosenbrock").unwrap();
        let r = damped_newton_driver(
            &p,
            &[-1.2, 1.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.iterations <= 50, "iterations = {}", r.iterations);
        assert!((r.x_final[0] - 1.0).abs() < 1e-6);
        assert!((r.x_final[1] - 1.0).abs() < 1e-6);
        // Line-search drivers descend on every accepted step.
        for w in r.trace.windows(2) {
            assert!(w[1].f < w[0].f, "f increased: {:?}", w);
        }
    }

    #[test]
    fn trust_region_one_interior_step() {
        let p = sphere(2);
        let opts = DriverOptions {
            delta0: 10.0,
            ..DriverOptions::defaults_for(DriverKind::TrustRegionNewton)
        };
        let r = run_driver(
            DriverKind::TrustRegionNewton,
            &p,
            &[3.0, 4.0],
            &StoppingCriteria::default(),
            &opts,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.x_final, vec![0.0, 0.0]);
    }

    // Hand-simulated radius schedule for the sphere from (3, 4) with
    // delta0 = 1: boundary steps of norms 1 and 2 (the radius doubles after
    // each full-length good step), then the interior Newton step.
    #[test]
    fn trust_region_boundary_schedule() {
        let p = sphere(2);
        let r = trust_region_driver(
            &p,
            &[3.0, 4.0],
            &StoppingCriteria::default(),
            Subproblem::Dogleg,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        let steps: Vec<&TraceRow> = r.trace.iter().skip(1).collect();
        assert!(steps.len() >= 3);
        assert!((steps[0].dir_norm - 1.0).abs() < 1e-12);
        assert_eq!(steps[0].step_control, 1.0);
        assert!((steps[1].dir_norm - 2.0).abs() < 1e-12);
        assert_eq!(steps[1].step_control, 2.0);
        let fs: Vec<f64> = r.trace.iter().map(|t| t.f).collect();
        assert_eq!(fs, vec![12.5, 8.0, 2.0, 0.0]);
    }

    #[test]
    fn trust_region_solves_rosenbrock() {
        let p = corpus::build("rosenbrock").unwrap();
        let r = trust_region_driver(
            &p,
            &[-1.2, 1.0],
            &StoppingCriteria::default(),
            Subproblem::Dogleg,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x_final[0] - 1.0).abs() < 1e-6);
        assert!((r.x_final[1] - 1.0).abs() < 1e-6);
        // f never increases across accepted steps; rejected rows hold f.
        let mut last_accepted_f = r.trace[0].f;
        for row in r.trace.iter().skip(1) {
            if row.accepted {
                assert!(row.f <= last_accepted_f);
                last_accepted_f = row.f;
            } else {
                assert_eq!(row.f, last_accepted_f);
            }
        }
    }

    #[test]
    fn bfgs_update_examples() {
        let b = DenseMatrix::identity(2);
        // s = y: the identity is a fixed point.
        let (b1, applied) = bfgs_update(&b, &[1.0, 0.0], &[1.0, 0.0]);
        assert!(applied);
        assert_eq!(b1, DenseMatrix::identity(2));
        // Hand-evaluated rank-one terms: B' = diag(2, 1), and B' s = y.
        let (b2, applied) = bfgs_update(&b, &[1.0, 0.0], &[2.0, 0.0]);
        assert!(applied);
        assert_eq!(b2, DenseMatrix::diagonal(&[2.0, 1.0]));
        assert_eq!(b2.matvec(&[1.0, 0.0]).unwrap(), vec![2.0, 0.0]);
        // Zero curvature: skipped.
        let (b3, applied) = bfgs_update(&b, &[1.0, 0.0], &[0.0, 1.0]);
        assert!(!applied);
        assert_eq!(b3, b);
    }

    #[test]
    fn bfgs_terminates_fast_on_quadratic() {
        // A tight curvature constant acts as the exact-line-search
        // surrogate under which BFGS terminates in at most n steps on a
        // quadratic; allow 2n for the inexact search.
        let p = ProblemBuilder::unconstrained("aniso", 2, |x| {
            0.5 * (x[0] * x[0] + 2.0 * x[1] * x[1])
        })
        .gradient(|x| vec![x[0], 2.0 * x[1]])
        .build()
        .unwrap();
        let opts = DriverOptions {
            ls_params: LineSearchParams {
                c2: 0.1,
                ..LineSearchParams::default()
            },
            ..DriverOptions::defaults_for(DriverKind::Bfgs)
        };
        let r = run_driver(
            DriverKind::Bfgs,
            &p,
            &[2.0, 1.0],
            &StoppingCriteria::default(),
            &opts,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.iterations <= 4, "iterations = {}", r.iterations);
        assert_eq!(r.eval_counts.hessian, 0);
    }

    #[test]
    fn bfgs_solves_rosenbrock_without_hessian_evaluations() {
        let p = corpus::build("rosenbrock").unwrap();
        let r = quasi_newton_driver(
            &p,
            &[-1.2, 1.0],
            &StoppingCriteria::default(),
            Condition::StrongWolfe,
            Generator::BacktrackingCubic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x_final[0] - 1.0).abs() < 1e-6);
        assert!((r.x_final[1] - 1.0).abs() < 1e-6);
        assert_eq!(r.eval_counts.hessian, 0);
    }

    #[test]
    fn bfgs_at_minimizer_converges_at_zero() {
        let p = corpus::build("rosenbrock").unwrap();
        let r = quasi_newton_driver(
            &p,
            &[1.0, 1.0],
            &StoppingCriteria::default(),
            Condition::StrongWolfe,
            Generator::BacktrackingCubic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn inexact_matches_damped_on_identity_hessian() {
        // CG is exact in one iteration on the identity, so the truncated
        // direction equals the damped-Newton direction bit for bit.
        let p = sphere(3);
        let criteria = StoppingCriteria::default();
        let inexact = inexact_newton_driver(&p, &[1.0, -2.0, 0.5], &criteria, 0.1).unwrap();
        let damped = damped_newton_driver(
            &p,
            &[1.0, -2.0, 0.5],
            &criteria,
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(inexact.trace_csv(), damped.trace_csv());
    }

    // Truncated directions save inner work: on a badly scaled quadratic
    // with a loose forcing term, the total number of CG iterations stays
    // below n per outer iteration.
    #[test]
    fn inexact_truncation_spends_fewer_inner_iterations() {
        let p = ProblemBuilder::unconstrained("scaled100", 2, |x| {
            0.5 * (x[0] * x[0] + 100.0 * x[1] * x[1])
        })
        .gradient(|x| vec![x[0], 100.0 * x[1]])
        .hessian(|_| DenseMatrix::diagonal(&[1.0, 100.0]))
        .build()
        .unwrap();
        let criteria = StoppingCriteria::default();
        let r = inexact_newton_driver(&p, &[1.0, 1.0], &criteria, 0.5).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);

        // Replay the direction solves and count the inner iterations.
        let mut x = vec![1.0, 1.0];
        let h = DenseMatrix::diagonal(&[1.0, 100.0]);
        let mut inner_total = 0usize;
        let mut outer = 0usize;
        for row in r.trace.iter().skip(1) {
            let g = vec![x[0], 100.0 * x[1]];
            let report = solve_cg(&h, &neg(&g), 0.5, 2).unwrap();
            inner_total += report.iterations;
            outer += 1;
            x = axpy(&x, row.step_control, &report.solution);
        }
        assert!(outer >= 1);
        assert!(
            inner_total < 2 * outer,
            "inner {inner_total} not below n * outer = {}",
            2 * outer
        );
    }

    #[test]
    fn inexact_flags_indefinite_fallback_on_concave_problem() {
        let p = ProblemBuilder::unconstrained("concave", 2, |x| {
            -0.5 * (x[0] * x[0] + x[1] * x[1])
        })
        .gradient(|x| vec![-x[0], -x[1]])
        .hessian(|_| DenseMatrix::diagonal(&[-1.0, -1.0]))
        .build()
        .unwrap();
        let criteria = StoppingCriteria {
            max_iter: 3,
            ..StoppingCriteria::default()
        };
        let r = inexact_newton_driver(&p, &[1.0, 0.0], &criteria, 0.1).unwrap();
        assert_eq!(r.trace[1].flag, IterFlag::IndefiniteFallback);
    }

    #[test]
    fn gauss_newton_exact_on_linear_residual() {
        let p = corpus::build("linear-system").unwrap();
        let r = gauss_newton_driver(
            &p,
            &[10.0, -7.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert!((r.x_final[0] - 2.0).abs() < 1e-9);
        assert!((r.x_final[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_newton_solves_rosenbrock_residual() {
        let p = corpus::build("rosenbrock-residual").unwrap();
        let r = gauss_newton_driver(
            &p,
            &[-1.2, 1.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x_final[0] - 1.0).abs() < 1e-6);
        assert!((r.x_final[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gauss_newton_rejects_plain_objectives() {
        let p = sphere(2);
        let err = gauss_newton_driver(
            &p,
            &[1.0, 1.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap_err();
        assert!(matches!(err, DriverError::Setup(_)));
    }

    #[test]
    fn check_stop_priority_and_boundaries() {
        let p = sphere(2);
        let rec = crate::problem::evaluate(&p, &[1e-9, 0.0], W_FG).unwrap();
        let state = IterateState {
            k: 0,
            x: vec![1e-9, 0.0],
            eval: rec,
            lambda: 0.0,
            direction: vec![0.0, 0.0],
            delta_f: 0.0,
            last_accepted: true,
        };
        let criteria = StoppingCriteria::default();
        assert_eq!(check_stop(&state, &criteria), Some(StopReason::GradientNorm));

        // Tiny objective change at k = 0 does not fire the f-test.
        let rec = crate::problem::evaluate(&p, &[1.0, 1.0], W_FG).unwrap();
        let state = IterateState {
            k: 0,
            x: vec![1.0, 1.0],
            eval: rec.clone(),
            lambda: 0.0,
            direction: vec![0.0, 0.0],
            delta_f: 1e-30,
            last_accepted: true,
        };
        let criteria = StoppingCriteria {
            f_tol: 1e-9,
            ..StoppingCriteria::default()
        };
        assert_eq!(check_stop(&state, &criteria), None);

        // The iteration budget fires when nothing else does.
        let state = IterateState {
            k: 200,
            x: vec![1.0, 1.0],
            eval: rec,
            lambda: 1.0,
            direction: vec![1.0, 0.0],
            delta_f: 10.0,
            last_accepted: true,
        };
        let criteria = StoppingCriteria::default();
        assert_eq!(check_stop(&state, &criteria), Some(StopReason::MaxIterations));
    }

    #[test]
    fn max_iterations_status() {
        let p = corpus::build("rosenbrock").unwrap();
        let criteria = StoppingCriteria {
            max_iter: 2,
            ..StoppingCriteria::default()
        };
        let r = damped_newton_driver(
            &p,
            &[-1.2, 1.0],
            &criteria,
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::MaxIterations);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.trace.len(), 3);
    }

    #[test]
    fn hooks_assembled_manually_match_the_named_driver() {
        let p = corpus::build("rosenbrock").unwrap();
        let criteria = StoppingCriteria::default();
        let via_name = damped_newton_driver(
            &p,
            &[-1.2, 1.0],
            &criteria,
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();

        let opts = DriverOptions::defaults_for(DriverKind::DampedNewton);
        let prepared = prepare_problem(DriverKind::DampedNewton, &p).unwrap();
        let hooks = driver_hooks(DriverKind::DampedNewton, &opts).unwrap();
        let manual = newton_iterate(prepared.as_ref(), &[-1.2, 1.0], &criteria, hooks).unwrap();

        assert_eq!(via_name.trace_csv(), manual.trace_csv());
        assert_eq!(via_name.eval_counts, manual.eval_counts);
    }

    #[test]
    fn equations_problem_is_transformed_for_general_drivers() {
        let p = corpus::build("linear-system").unwrap();
        let r = damped_newton_driver(
            &p,
            &[0.0, 0.0],
            &StoppingCriteria::default(),
            Condition::Armijo,
            Generator::BacktrackingQuadratic,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x_final[0] - 2.0).abs() < 1e-8);
        assert!((r.x_final[1] - 3.0).abs() < 1e-8);
    }
}
