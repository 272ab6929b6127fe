//! Trust-region subproblem: quadratic model, Cauchy point, dogleg and
//! two-dimensional subspace solvers, agreement ratio and threshold radius
//! updates.
//!
//! The subproblem is `min m(s) = f0 + g^T s + 1/2 s^T H s` subject to
//! `||s|| <= Delta`. Solvers assume positive-definite-consistent inputs:
//! the Newton step is supplied by the caller (from a possibly modified
//! Cholesky solve) and verified against `H s = -g` before use.

use crate::linalg::{axpy, dot, norm2, scale, sub, DenseMatrix, LinAlgError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrustRegionError {
    #[error("gradient is zero; no steepest-descent direction")]
    ZeroGradient,
    #[error("newton step does not solve H s = -g: residual {residual:e} > {bound:e}")]
    BadNewtonStep { residual: f64, bound: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("trust-region radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("invalid trust-region thresholds: {0}")]
    BadThresholds(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Quadratic model of the objective around the current iterate.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    f0: f64,
    gradient: Vec<f64>,
    hessian: DenseMatrix,
}

impl QuadraticModel {
    pub fn new(f0: f64, gradient: Vec<f64>, hessian: DenseMatrix) -> Result<Self, TrustRegionError> {
        if hessian.rows() != gradient.len() || hessian.cols() != gradient.len() {
            return Err(TrustRegionError::DimensionMismatch(format!(
                "gradient length {} with {}x{} Hessian",
                gradient.len(),
                hessian.rows(),
                hessian.cols()
            )));
        }
        hessian.check_symmetric()?;
        Ok(Self {
            f0,
            gradient,
            hessian,
        })
    }

    pub fn n(&self) -> usize {
        self.gradient.len()
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn hessian(&self) -> &DenseMatrix {
        &self.hessian
    }

    /// `m(s) = f0 + g^T s + 1/2 s^T H s`.
    pub fn value(&self, s: &[f64]) -> f64 {
        debug_assert_eq!(s.len(), self.n());
        let hs = self.hessian.matvec(s).expect("dimension checked");
        self.f0 + dot(&self.gradient, s) + 0.5 * dot(s, &hs)
    }
}

/// Trust-region bookkeeping: radius, thresholds and the last agreement
/// ratio. Defaults: accept at 0.1, shrink below 0.25 (factor 0.25 of the
/// step norm), expand above 0.75 (factor 2), radius capped at 1e3 times the
/// initial radius.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionState {
    pub radius: f64,
    pub radius_max: f64,
    pub eta_accept: f64,
    pub eta_shrink: f64,
    pub eta_expand: f64,
    pub shrink_factor: f64,
    pub expand_factor: f64,
    pub last_rho: Option<f64>,
}

impl TrustRegionState {
    pub fn new(delta0: f64) -> Result<Self, TrustRegionError> {
        let s = Self {
            radius: delta0,
            radius_max: 1e3 * delta0,
            eta_accept: 0.1,
            eta_shrink: 0.25,
            eta_expand: 0.75,
            shrink_factor: 0.25,
            expand_factor: 2.0,
            last_rho: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), TrustRegionError> {
        if !(self.radius > 0.0 && self.radius <= self.radius_max) {
            return Err(TrustRegionError::BadRadius(self.radius));
        }
        if !(0.0 < self.eta_accept
            && self.eta_accept <= self.eta_shrink
            && self.eta_shrink < self.eta_expand
            && self.eta_expand < 1.0)
        {
            return Err(TrustRegionError::BadThresholds(format!(
                "require 0 < accept <= shrink < expand < 1, got {} {} {}",
                self.eta_accept, self.eta_shrink, self.eta_expand
            )));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0 && self.expand_factor > 1.0) {
            return Err(TrustRegionError::BadThresholds(format!(
                "require 0 < shrink < 1 < expand, got {} and {}",
                self.shrink_factor, self.expand_factor
            )));
        }
        Ok(())
    }
}

/// Subproblem solver strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subproblem {
    Cauchy,
    Dogleg,
    Subspace2d,
}

impl Subproblem {
    pub const NAMES: [&'static str; 3] = ["cauchy", "dogleg", "subspace-2d"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cauchy" => Some(Self::Cauchy),
            "dogleg" => Some(Self::Dogleg),
            "subspace-2d" => Some(Self::Subspace2d),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Cauchy => "cauchy",
            Self::Dogleg => "dogleg",
            Self::Subspace2d => "subspace-2d",
        }
    }

    /// Whether this solver consumes a caller-supplied Newton step.
    pub fn needs_newton_step(&self) -> bool {
        !matches!(self, Self::Cauchy)
    }
}

/// Minimizer of the model along the steepest-descent direction within the
/// region: `s = -tau * (Delta / ||g||) * g`, `tau = 1` on non-positive
/// curvature, `min(1, ||g||^3 / (Delta g^T H g))` otherwise.
pub fn cauchy_point(qm: &QuadraticModel, delta: f64) -> Result<Vec<f64>, TrustRegionError> {
    if !(delta > 0.0) {
        return Err(TrustRegionError::BadRadius(delta));
    }
    let g = qm.gradient();
    let gnorm = norm2(g);
    if gnorm == 0.0 {
        return Err(TrustRegionError::ZeroGradient);
    }
    let hg = qm.hessian().matvec(g)?;
    let ghg = dot(g, &hg);
    let tau = if ghg <= 0.0 {
        1.0
    } else {
        (gnorm.powi(3) / (delta * ghg)).min(1.0)
    };
    Ok(scale(g, -tau * delta / gnorm))
}

fn validate_newton_step(qm: &QuadraticModel, newton: &[f64]) -> Result<(), TrustRegionError> {
    if newton.len() != qm.n() {
        return Err(TrustRegionError::DimensionMismatch(format!(
            "newton step length {} for dimension {}",
            newton.len(),
            qm.n()
        )));
    }
    let hs = qm.hessian().matvec(newton)?;
    let residual = norm2(&axpy(&hs, 1.0, qm.gradient()));
    let bound = 1e-6 * norm2(qm.gradient());
    if residual > bound {
        return Err(TrustRegionError::BadNewtonStep { residual, bound });
    }
    Ok(())
}

/// Dogleg path: Newton step if interior, otherwise walk from the
/// steepest-descent minimizer toward the Newton step and stop on the
/// boundary.
pub fn dogleg_step(
    qm: &QuadraticModel,
    delta: f64,
    newton_step: &[f64],
) -> Result<Vec<f64>, TrustRegionError> {
    if !(delta > 0.0) {
        return Err(TrustRegionError::BadRadius(delta));
    }
    validate_newton_step(qm, newton_step)?;
    if norm2(newton_step) <= delta {
        return Ok(newton_step.to_vec());
    }

    let g = qm.gradient();
    let gnorm = norm2(g);
    if gnorm == 0.0 {
        // Degenerate: no first leg; clip the Newton step to the boundary.
        return Ok(scale(newton_step, delta / norm2(newton_step)));
    }
    let hg = qm.hessian().matvec(g)?;
    let ghg = dot(g, &hg);
    if ghg <= 0.0 {
        // Not pd-consistent along g; fall back to the clipped gradient leg.
        return Ok(scale(g, -delta / gnorm));
    }

    // Unconstrained steepest-descent minimizer s_U = -(g^T g / g^T H g) g.
    let su = scale(g, -dot(g, g) / ghg);
    let su_norm = norm2(&su);
    if su_norm >= delta {
        return Ok(scale(g, -delta / gnorm));
    }

    // Second leg: ||s_U + t (s_N - s_U)|| = Delta for t in (0, 1].
    let d = sub(newton_step, &su);
    let a = dot(&d, &d);
    let b = 2.0 * dot(&su, &d);
    let c = dot(&su, &su) - delta * delta;
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let t = (-b + disc.sqrt()) / (2.0 * a);
    Ok(axpy(&su, t, &d))
}

/// Minimizes the model over `span{g, newton_step}` intersected with the
/// region. Reduces to two variables in an orthonormal basis; the interior
/// stationary point is taken when feasible, otherwise the boundary minimum
/// is located on a 64-point angular grid and polished by Newton's method to
/// tolerance 1e-10. Collapses to [`dogleg_step`] when the subspace is
/// degenerate, and never returns a model value above the dogleg's.
pub fn subspace_2d_step(
    qm: &QuadraticModel,
    delta: f64,
    newton_step: &[f64],
) -> Result<Vec<f64>, TrustRegionError> {
    if !(delta > 0.0) {
        return Err(TrustRegionError::BadRadius(delta));
    }
    validate_newton_step(qm, newton_step)?;
    if norm2(newton_step) <= delta {
        return Ok(newton_step.to_vec());
    }

    let g = qm.gradient();
    let gnorm = norm2(g);
    if gnorm == 0.0 {
        return Ok(scale(newton_step, delta / norm2(newton_step)));
    }
    let q1 = scale(g, 1.0 / gnorm);
    let proj = dot(newton_step, &q1);
    let v = axpy(newton_step, -proj, &q1);
    let vnorm = norm2(&v);
    if vnorm <= 1e-12 * norm2(newton_step) {
        // g and the Newton step are parallel: degenerate subspace.
        return dogleg_step(qm, delta, newton_step);
    }
    let q2 = scale(&v, 1.0 / vnorm);

    // Reduced data: c = Q^T g, B = Q^T H Q (2x2, symmetric).
    let c = [dot(&q1, g), dot(&q2, g)];
    let hq1 = qm.hessian().matvec(&q1)?;
    let hq2 = qm.hessian().matvec(&q2)?;
    let b11 = dot(&q1, &hq1);
    let b12 = 0.5 * (dot(&q1, &hq2) + dot(&q2, &hq1));
    let b22 = dot(&q2, &hq2);

    let lift = |z: [f64; 2]| -> Vec<f64> {
        (0..qm.n()).map(|i| z[0] * q1[i] + z[1] * q2[i]).collect()
    };
    let reduced_value = |z: [f64; 2]| -> f64 {
        qm.f0()
            + c[0] * z[0]
            + c[1] * z[1]
            + 0.5 * (b11 * z[0] * z[0] + 2.0 * b12 * z[0] * z[1] + b22 * z[1] * z[1])
    };

    let mut candidates: Vec<[f64; 2]> = Vec::new();

    // Interior stationary point, when the reduced Hessian is pd.
    let det = b11 * b22 - b12 * b12;
    if b11 > 0.0 && det > 0.0 {
        let z = [
            (-c[0] * b22 + c[1] * b12) / det,
            (-c[1] * b11 + c[0] * b12) / det,
        ];
        if (z[0] * z[0] + z[1] * z[1]).sqrt() <= delta {
            candidates.push(z);
        }
    }

    // Boundary: psi(theta) = m(Delta * (cos, sin)); coarse grid then Newton.
    let psi = |t: f64| -> f64 {
        reduced_value([delta * t.cos(), delta * t.sin()])
    };
    let mut best_t = 0.0;
    let mut best_v = f64::INFINITY;
    const GRID: usize = 64;
    for i in 0..GRID {
        let t = 2.0 * std::f64::consts::PI * (i as f64) / (GRID as f64);
        let v = psi(t);
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    candidates.push([delta * best_t.cos(), delta * best_t.sin()]);

    let dpsi = |t: f64| -> f64 {
        let (s, co) = t.sin_cos();
        delta * (-c[0] * s + c[1] * co)
            + 0.5 * delta * delta * ((b22 - b11) * (2.0 * t).sin() + 2.0 * b12 * (2.0 * t).cos())
    };
    let d2psi = |t: f64| -> f64 {
        let (s, co) = t.sin_cos();
        delta * (-c[0] * co - c[1] * s)
            + delta * delta * ((b22 - b11) * (2.0 * t).cos() - 2.0 * b12 * (2.0 * t).sin())
    };
    let mut t = best_t;
    for _ in 0..50 {
        let d1 = dpsi(t);
        let d2 = d2psi(t);
        if d2 <= 0.0 {
            break;
        }
        let step = d1 / d2;
        t -= step;
        if step.abs() <= 1e-10 {
            break;
        }
    }
    if psi(t).is_finite() {
        candidates.push([delta * t.cos(), delta * t.sin()]);
    }

    // The dogleg point lies in the same subspace, so taking the best
    // candidate keeps the solver ordering m(2d) <= m(dogleg) exact.
    let dogleg = dogleg_step(qm, delta, newton_step)?;
    let mut best = dogleg.clone();
    let mut best_value = qm.value(&dogleg);
    for z in candidates {
        let s = lift(z);
        let v = qm.value(&s);
        if v < best_value {
            best_value = v;
            best = s;
        }
    }
    Ok(best)
}

/// Dispatches to the named subproblem solver.
pub fn solve_subproblem(
    kind: Subproblem,
    qm: &QuadraticModel,
    delta: f64,
    newton_step: Option<&[f64]>,
) -> Result<Vec<f64>, TrustRegionError> {
    match kind {
        Subproblem::Cauchy => cauchy_point(qm, delta),
        Subproblem::Dogleg => {
            let ns = newton_step.ok_or_else(|| {
                TrustRegionError::DimensionMismatch("dogleg requires a newton step".into())
            })?;
            dogleg_step(qm, delta, ns)
        }
        Subproblem::Subspace2d => {
            let ns = newton_step.ok_or_else(|| {
                TrustRegionError::DimensionMismatch("subspace-2d requires a newton step".into())
            })?;
            subspace_2d_step(qm, delta, ns)
        }
    }
}

/// Agreement between actual and model-predicted reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementRatio {
    /// `(f_old - f_new) / (f_old - m(s))`; negative infinity when the
    /// predicted reduction degenerates (forces a shrink).
    pub rho: f64,
    /// Set when the predicted reduction was at noise level.
    pub degenerate: bool,
}

pub fn agreement_ratio(f_old: f64, f_new: f64, qm: &QuadraticModel, s: &[f64]) -> AgreementRatio {
    let predicted = f_old - qm.value(s);
    if predicted <= 1e-16 * f_old.abs().max(1.0) {
        return AgreementRatio {
            rho: f64::NEG_INFINITY,
            degenerate: true,
        };
    }
    AgreementRatio {
        rho: (f_old - f_new) / predicted,
        degenerate: false,
    }
}

/// Result of a radius update.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusUpdate {
    pub state: TrustRegionState,
    /// Whether the step should be taken (`rho >= eta_accept`).
    pub accepted: bool,
}

/// Threshold policy: shrink to `0.25 * ||s||` on poor agreement, double
/// (capped) on good agreement at a full-length step, keep otherwise.
pub fn update_radius(state: &TrustRegionState, rho: f64, step_norm: f64) -> RadiusUpdate {
    debug_assert!(step_norm <= state.radius + 1e-12);
    let mut next = state.clone();
    next.last_rho = Some(rho);
    if rho < state.eta_shrink {
        next.radius = state.shrink_factor * step_norm;
    } else if rho > state.eta_expand && step_norm >= 0.99 * state.radius {
        next.radius = (state.expand_factor * state.radius).min(state.radius_max);
    }
    let accepted = rho >= state.eta_accept;
    RadiusUpdate {
        state: next,
        accepted,
    }
}
