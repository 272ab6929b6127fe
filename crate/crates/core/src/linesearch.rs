//! Step-length computation decoupled from the acceptance condition.
//!
//! A line search works on the one-dimensional restriction
//! `phi(lambda) = f(x + lambda s)` of the objective along a fixed descent
//! direction. Two independent strategy families compose freely:
//!
//! * **conditions** decide whether a trial step is acceptable
//!   (`armijo`, `wolfe`, `strong-wolfe`, `goldstein`);
//! * **generators** propose the next trial step
//!   (`bisection`, `backtracking-quadratic`, `backtracking-cubic`).
//!
//! [`line_search`] runs the loop: the generator proposes, the condition
//! disposes. Any condition works with any generator.
//!
//! Rejections carry a direction. A violated sufficient-decrease bound
//! means the step was too long and the backtracking generators contract
//! (interpolation safeguarded into `[0.1, 0.5]` of the previous trial). A
//! violated curvature or Goldstein lower bound means the step was too
//! short; the backtracking generators then grow the step and refine the
//! resulting bracket by midpoints, since contraction alone can never reach
//! a curvature window that sits above the safeguard. Plain bisection
//! always halves and simply fails on conditions that need longer steps.

use thiserror::Error;

/// Conditions requiring the slope `phi'(lambda)` get it from
/// [`LineFunction::slope`]; drivers wire that to analytic gradients or
/// directional finite differences as available.
pub struct LineFunction<'a> {
    f0: f64,
    slope0: f64,
    value: Box<dyn FnMut(f64) -> Result<f64, LineSearchError> + 'a>,
    slope: Option<Box<dyn FnMut(f64) -> Result<f64, LineSearchError> + 'a>>,
}

impl<'a> LineFunction<'a> {
    /// Restriction with value information only.
    pub fn new(
        f0: f64,
        slope0: f64,
        value: impl FnMut(f64) -> Result<f64, LineSearchError> + 'a,
    ) -> Self {
        Self {
            f0,
            slope0,
            value: Box::new(value),
            slope: None,
        }
    }

    /// Restriction with value and slope information.
    pub fn with_slope(
        f0: f64,
        slope0: f64,
        value: impl FnMut(f64) -> Result<f64, LineSearchError> + 'a,
        slope: impl FnMut(f64) -> Result<f64, LineSearchError> + 'a,
    ) -> Self {
        Self {
            f0,
            slope0,
            value: Box::new(value),
            slope: Some(Box::new(slope)),
        }
    }

    /// `phi(0)`.
    pub fn f0(&self) -> f64 {
        self.f0
    }

    /// `phi'(0)`, the directional derivative at the current iterate.
    pub fn slope0(&self) -> f64 {
        self.slope0
    }

    pub fn value(&mut self, lambda: f64) -> Result<f64, LineSearchError> {
        (self.value)(lambda)
    }

    pub fn slope(&mut self, lambda: f64) -> Result<f64, LineSearchError> {
        match &mut self.slope {
            Some(s) => s(lambda),
            None => Err(LineSearchError::SlopeUnavailable),
        }
    }
}

#[derive(Debug, Error)]
pub enum LineSearchError {
    #[error("line search failed after {trials} trials (last step {last_lambda:e})")]
    Failed { trials: u32, last_lambda: f64 },
    #[error("degenerate interpolant: {0}")]
    DegenerateInterpolant(&'static str),
    #[error("unknown {category} '{name}'")]
    UnknownStrategy {
        category: &'static str,
        name: String,
    },
    #[error("not a descent direction: slope at 0 is {0}")]
    NotDescent(f64),
    #[error("invalid line search parameters: {0}")]
    InvalidParams(String),
    #[error("slope information required by the condition but not provided")]
    SlopeUnavailable,
    #[error("evaluation failed during line search: {0}")]
    Eval(String),
}

/// Tuning constants. The defaults are the conventional choices:
/// `c1 = 1e-4`, `c2 = 0.9`, Goldstein constant `0.25`, unit initial trial,
/// and a safeguard bracket of `[0.1, 0.5]` relative to the previous trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant; must satisfy `c1 < c2 < 1`.
    pub c2: f64,
    /// Goldstein constant in `(0, 0.5)`.
    pub goldstein_c: f64,
    /// First trial step.
    pub lambda0: f64,
    /// Smallest step considered before giving up.
    pub lambda_min: f64,
    /// Trial budget.
    pub max_trials: u32,
    /// Lower safeguard for interpolated steps, relative to the last trial.
    pub backtrack_lo: f64,
    /// Upper safeguard for interpolated steps, relative to the last trial.
    pub backtrack_hi: f64,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            c2: 0.9,
            goldstein_c: 0.25,
            lambda0: 1.0,
            lambda_min: 1e-12,
            max_trials: 40,
            backtrack_lo: 0.1,
            backtrack_hi: 0.5,
        }
    }
}

impl LineSearchParams {
    pub fn validate(&self) -> Result<(), LineSearchError> {
        let bad = |msg: String| Err(LineSearchError::InvalidParams(msg));
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return bad(format!(
                "require 0 < c1 < c2 < 1, got c1={} c2={}",
                self.c1, self.c2
            ));
        }
        if !(0.0 < self.goldstein_c && self.goldstein_c < 0.5) {
            return bad(format!(
                "require 0 < goldstein_c < 0.5, got {}",
                self.goldstein_c
            ));
        }
        if !(self.lambda0 > self.lambda_min && self.lambda_min > 0.0) {
            return bad(format!(
                "require lambda0 > lambda_min > 0, got lambda0={} lambda_min={}",
                self.lambda0, self.lambda_min
            ));
        }
        if self.max_trials == 0 {
            return bad("max_trials must be at least 1".into());
        }
        if !(0.0 < self.backtrack_lo && self.backtrack_lo < self.backtrack_hi
            && self.backtrack_hi < 1.0)
        {
            return bad(format!(
                "require 0 < lo < hi < 1 for the safeguard bracket, got [{}, {}]",
                self.backtrack_lo, self.backtrack_hi
            ));
        }
        Ok(())
    }
}

/// Acceptance conditions (step-length test strategies).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Armijo,
    Wolfe,
    StrongWolfe,
    Goldstein,
}

impl Condition {
    pub const NAMES: [&'static str; 4] = ["armijo", "goldstein", "strong-wolfe", "wolfe"];

    pub fn from_name(name: &str) -> Result<Self, LineSearchError> {
        match name {
            "armijo" => Ok(Self::Armijo),
            "wolfe" => Ok(Self::Wolfe),
            "strong-wolfe" => Ok(Self::StrongWolfe),
            "goldstein" => Ok(Self::Goldstein),
            _ => Err(LineSearchError::UnknownStrategy {
                category: "line-search condition",
                name: name.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Armijo => "armijo",
            Self::Wolfe => "wolfe",
            Self::StrongWolfe => "strong-wolfe",
            Self::Goldstein => "goldstein",
        }
    }

    /// Whether the condition needs `phi'` at trial points.
    pub fn needs_slope(&self) -> bool {
        matches!(self, Self::Wolfe | Self::StrongWolfe)
    }
}

/// Step generators (step-length computation strategies).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Bisection,
    BacktrackingQuadratic,
    BacktrackingCubic,
}

impl Generator {
    pub const NAMES: [&'static str; 3] =
        ["backtracking-cubic", "backtracking-quadratic", "bisection"];

    pub fn from_name(name: &str) -> Result<Self, LineSearchError> {
        match name {
            "bisection" => Ok(Self::Bisection),
            "backtracking-quadratic" => Ok(Self::BacktrackingQuadratic),
            "backtracking-cubic" => Ok(Self::BacktrackingCubic),
            _ => Err(LineSearchError::UnknownStrategy {
                category: "line-search generator",
                name: name.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bisection => "bisection",
            Self::BacktrackingQuadratic => "backtracking-quadratic",
            Self::BacktrackingCubic => "backtracking-cubic",
        }
    }
}

/// Sufficient decrease: `f_trial <= f0 + c1 * lambda * phi'(0)` (inclusive).
pub fn armijo_holds(f0: f64, slope0: f64, lambda: f64, f_trial: f64, c1: f64) -> bool {
    f_trial <= f0 + c1 * lambda * slope0
}

/// Curvature: weak `phi'(l) >= c2 * phi'(0)`, strong `|phi'(l)| <= c2 |phi'(0)|`.
pub fn curvature_holds(slope0: f64, slope_trial: f64, c2: f64, strong: bool) -> bool {
    if strong {
        slope_trial.abs() <= c2 * slope0.abs()
    } else {
        slope_trial >= c2 * slope0
    }
}

/// Goldstein bracket:
/// `f0 + (1-c) * lambda * phi'(0) <= f_trial <= f0 + c * lambda * phi'(0)`.
pub fn goldstein_holds(f0: f64, slope0: f64, lambda: f64, f_trial: f64, c: f64) -> bool {
    let lower = f0 + (1.0 - c) * lambda * slope0;
    let upper = f0 + c * lambda * slope0;
    lower <= f_trial && f_trial <= upper
}

fn clamp_step(raw: f64, lambda_prev: f64, lo: f64, hi: f64) -> f64 {
    raw.clamp(lo * lambda_prev, hi * lambda_prev)
}

/// Minimizer of the quadratic through `(0, f0)` with slope `phi'(0)` and
/// `(lambda_prev, f_prev)`, safeguarded into `[0.1, 0.5] * lambda_prev`.
pub fn quadratic_step(
    f0: f64,
    slope0: f64,
    lambda_prev: f64,
    f_prev: f64,
) -> Result<f64, LineSearchError> {
    let denom = 2.0 * (f_prev - f0 - slope0 * lambda_prev);
    if !(denom > 1e-16) {
        return Err(LineSearchError::DegenerateInterpolant(
            "quadratic interpolant has no positive curvature",
        ));
    }
    let raw = -slope0 * lambda_prev * lambda_prev / denom;
    Ok(clamp_step(raw, lambda_prev, 0.1, 0.5))
}

/// Minimizer of the cubic matching `(0, f0)`, slope `phi'(0)` and the two
/// most recent trials `(l1, f1)`, `(l2, f2)` with `l1` the newer one;
/// safeguarded into `[0.1, 0.5] * l1`. Falls back to [`quadratic_step`]
/// when the cubic degenerates or has no interior minimizer.
pub fn cubic_step(
    f0: f64,
    slope0: f64,
    l1: f64,
    f1: f64,
    l2: f64,
    f2: f64,
) -> Result<f64, LineSearchError> {
    if l1 <= 0.0 || l2 <= 0.0 || l1 == l2 {
        return Err(LineSearchError::DegenerateInterpolant(
            "cubic interpolation needs two distinct positive trial steps",
        ));
    }
    let d1 = f1 - f0 - slope0 * l1;
    let d2 = f2 - f0 - slope0 * l2;
    let denom = l1 * l1 * l2 * l2 * (l1 - l2);
    let a = (l2 * l2 * d1 - l1 * l1 * d2) / denom;
    let b = (-l2 * l2 * l2 * d1 + l1 * l1 * l1 * d2) / denom;

    if a.abs() < 1e-16 {
        return Ok(quadratic_step(f0, slope0, l1, f1)?);
    }
    let disc = b * b - 3.0 * a * slope0;
    if disc < 0.0 {
        return Ok(quadratic_step(f0, slope0, l1, f1)?);
    }
    let raw = (-b + disc.sqrt()) / (3.0 * a);
    if !raw.is_finite() || raw <= 0.0 {
        return Ok(quadratic_step(f0, slope0, l1, f1)?);
    }
    Ok(clamp_step(raw, l1, 0.1, 0.5))
}

/// Halve the step from `lambda0` until the condition accepts.
pub fn bisection_search(
    lf: &mut LineFunction,
    condition: Condition,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome, LineSearchError> {
    line_search(lf, condition, Generator::Bisection, params)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchOutcome {
    /// Accepted step length.
    pub lambda: f64,
    /// `phi(lambda)` at the accepted step.
    pub f_trial: f64,
    /// Number of trial evaluations spent.
    pub trials: u32,
}

enum Verdict {
    Accept,
    /// Sufficient decrease (or the Goldstein upper bound) failed, or the
    /// trial overshot the minimizer: contract.
    TooLong,
    /// Curvature (or the Goldstein lower bound) failed with a still-steep
    /// negative slope: the step must grow.
    TooShort,
}

fn judge(
    lf: &mut LineFunction,
    condition: Condition,
    params: &LineSearchParams,
    lambda: f64,
    f_trial: f64,
) -> Result<Verdict, LineSearchError> {
    let (f0, slope0) = (lf.f0, lf.slope0);
    // Non-finite trial values reject toward zero, away from overflow.
    if !f_trial.is_finite() {
        return Ok(Verdict::TooLong);
    }
    let v = match condition {
        Condition::Armijo => {
            if armijo_holds(f0, slope0, lambda, f_trial, params.c1) {
                Verdict::Accept
            } else {
                Verdict::TooLong
            }
        }
        Condition::Wolfe | Condition::StrongWolfe => {
            if !armijo_holds(f0, slope0, lambda, f_trial, params.c1) {
                Verdict::TooLong
            } else {
                // Evaluate the slope only once sufficient decrease holds.
                let st = lf.slope(lambda)?;
                let strong = condition == Condition::StrongWolfe;
                if !st.is_finite() {
                    Verdict::TooLong
                } else if curvature_holds(slope0, st, params.c2, strong) {
                    Verdict::Accept
                } else if st > 0.0 {
                    Verdict::TooLong
                } else {
                    Verdict::TooShort
                }
            }
        }
        Condition::Goldstein => {
            let upper = f0 + params.goldstein_c * lambda * slope0;
            let lower = f0 + (1.0 - params.goldstein_c) * lambda * slope0;
            if f_trial > upper {
                Verdict::TooLong
            } else if f_trial < lower {
                Verdict::TooShort
            } else {
                Verdict::Accept
            }
        }
    };
    Ok(v)
}

/// Composes a condition with a step generator: the generator proposes trial
/// steps, the condition disposes, until acceptance or failure.
///
/// An accepted step always satisfies the named condition at return. Trial
/// values that come back non-finite are treated as too-long rejections,
/// which backtracks away from overflow regions rather than aborting.
pub fn line_search(
    lf: &mut LineFunction,
    condition: Condition,
    generator: Generator,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome, LineSearchError> {
    params.validate()?;
    if !(lf.slope0 < 0.0) {
        return Err(LineSearchError::NotDescent(lf.slope0));
    }

    let f0 = lf.f0;
    let slope0 = lf.slope0;
    let mut lambda = params.lambda0;
    // Most recent rejected trial, for two-point interpolation.
    let mut prev: Option<(f64, f64)> = None;
    // Bracket around an acceptable window: largest too-short trial and
    // smallest too-long trial seen so far.
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;

    for trial in 1..=params.max_trials {
        if lambda < params.lambda_min {
            return Err(LineSearchError::Failed {
                trials: trial - 1,
                last_lambda: lambda,
            });
        }
        let f_trial = lf.value(lambda)?;
        let verdict = judge(lf, condition, params, lambda, f_trial)?;

        let next = match verdict {
            Verdict::Accept => {
                return Ok(LineSearchOutcome {
                    lambda,
                    f_trial,
                    trials: trial,
                })
            }
            Verdict::TooLong => {
                hi = hi.min(lambda);
                let raw = match generator {
                    Generator::Bisection => 0.5 * lambda,
                    Generator::BacktrackingQuadratic => {
                        interpolated_or_halved(quadratic_step(f0, slope0, lambda, f_trial), lambda)
                    }
                    Generator::BacktrackingCubic => match prev {
                        None => interpolated_or_halved(
                            quadratic_step(f0, slope0, lambda, f_trial),
                            lambda,
                        ),
                        Some((l2, f2)) => interpolated_or_halved(
                            cubic_step(f0, slope0, lambda, f_trial, l2, f2),
                            lambda,
                        ),
                    },
                };
                // Never contract below a known too-short trial.
                if raw <= lo && generator != Generator::Bisection {
                    0.5 * (lo + lambda)
                } else {
                    raw
                }
            }
            Verdict::TooShort => {
                lo = lo.max(lambda);
                match generator {
                    // Bisection is contraction-only by definition.
                    Generator::Bisection => 0.5 * lambda,
                    _ => {
                        if hi.is_finite() {
                            0.5 * (lambda + hi)
                        } else {
                            2.0 * lambda
                        }
                    }
                }
            }
        };
        prev = Some((lambda, f_trial));
        lambda = next;
    }
    Err(LineSearchError::Failed {
        trials: params.max_trials,
        last_lambda: lambda,
    })
}

// A degenerate interpolant (flat or non-finite data) falls back to plain
// halving so the search keeps making progress toward lambda_min.
fn interpolated_or_halved(step: Result<f64, LineSearchError>, lambda: f64) -> f64 {
    match step {
        Ok(next) => next,
        Err(_) => 0.5 * lambda,
    }
}

/// Name-based entry point; unknown names report their category.
pub fn line_search_by_name(
    lf: &mut LineFunction,
    condition_name: &str,
    method_name: &str,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome, LineSearchError> {
    let condition = Condition::from_name(condition_name)?;
    let generator = Generator::from_name(method_name)?;
    line_search(lf, condition, generator, params)
}
