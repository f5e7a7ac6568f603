//! Outer iterations: the inertial warped-resolvent loop and the frozen- and
//! moving-kernel Newton iterations.
//!
//! The main entry point is [`gippa_run`]:
//!
//! ```text
//! yₙ   = xₙ + αₙ(xₙ − xₙ₋₁)
//! xₙ₊₁ = (γₙF + v)⁻¹ v(yₙ)
//! ```
//!
//! starting from two user-supplied points. With `αₙ ≡ 0` this is the
//! zero-inertia generalized proximal iteration, and with the identity
//! kernel on top of that it reduces to the classical proximal point method.
//! The convergence theory asks for `αₙ` nondecreasing with a cap below 1/3
//! and `inf γₙ > 0`; [`validate_schedules`] reports whether a configuration
//! satisfies that, but the solver only warns on violations — running
//! out-of-theory schedules (say a 0.5 inertia cap) is a legitimate
//! experiment and visibly degrades convergence rather than breaking the
//! iteration.

use std::fmt;

use crate::diagnostics::{IterateRecord, IterateTrace, TerminationReason};
use crate::linalg::{lu_factor, svd, LinalgError, Vector};
use crate::operators::{
    estimate_lipschitz, KernelSpec, NonlinearOperator, OperatorError, OperatorSpec,
};
use crate::pairs::{estimate_local_strong_monotonicity, PairsError};
use crate::resolvent::{warped_resolvent, InnerSolverConfig, ResolventError};

/// Relative perturbation applied to γₙ when the resolvent system is
/// singular at the scheduled value; the singular set is finite, so one
/// nudge restores injectivity.
const GAMMA_RETRY_FACTOR: f64 = 1.0 + 1e-6;

const STEP_ESTIMATE_SAMPLES: usize = 200;
const STEP_ESTIMATE_SEED: u64 = 0x7374_6570;

#[derive(Debug)]
pub enum SolverError {
    /// The warped resolvent failed at iteration `n` (after the γ retry).
    ResolventFailure { n: usize, source: ResolventError },
    /// A schedule produced a non-finite or out-of-range value.
    ScheduleInvalid { detail: String },
    /// The Jacobian is singular at iterate `k` (Newton) or at the
    /// reference point (quasi-Newton).
    SingularJacobian { k: usize },
    /// An iterate left the trust region around the reference point.
    LeftNeighborhood { k: usize, distance: f64 },
    /// Automatic step estimation failed (non-positive sampled modulus).
    StepEstimationFailed { alpha_hat: f64 },
    DimensionMismatch { expected: usize, found: usize },
    Operator(OperatorError),
    Linalg(LinalgError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::ResolventFailure { n, source } => {
                write!(f, "resolvent failed at iteration {n}: {source}")
            }
            SolverError::ScheduleInvalid { detail } => write!(f, "invalid schedule: {detail}"),
            SolverError::SingularJacobian { k } => {
                write!(f, "singular Jacobian at iterate {k}")
            }
            SolverError::LeftNeighborhood { k, distance } => {
                write!(f, "iterate {k} left the trust region (distance {distance:e})")
            }
            SolverError::StepEstimationFailed { alpha_hat } => {
                write!(f, "step estimation failed: sampled modulus {alpha_hat:e} is not positive")
            }
            SolverError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            SolverError::Operator(e) => write!(f, "{e}"),
            SolverError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SolverError {}

impl From<OperatorError> for SolverError {
    fn from(e: OperatorError) -> Self {
        SolverError::Operator(e)
    }
}

impl From<LinalgError> for SolverError {
    fn from(e: LinalgError) -> Self {
        SolverError::Linalg(e)
    }
}

impl From<PairsError> for SolverError {
    fn from(e: PairsError) -> Self {
        match e {
            PairsError::SingularJacobian => SolverError::SingularJacobian { k: 0 },
            PairsError::Operator(op) => SolverError::Operator(op),
            PairsError::Linalg(l) => SolverError::Linalg(l),
            other => SolverError::ScheduleInvalid { detail: other.to_string() },
        }
    }
}

// ── Schedules ───────────────────────────────────────────────────────

/// Step-size or inertia schedule, evaluated at integer `n ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Constant(f64),
    /// `base + scale/(n + offset)`.
    OffsetInverse { base: f64, scale: f64, offset: f64 },
    /// `min(cap, n/(n + offset))`.
    CappedRamp { cap: f64, offset: f64 },
}

impl Schedule {
    pub fn eval(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            Schedule::Constant(c) => c,
            Schedule::OffsetInverse { base, scale, offset } => base + scale / (n + offset),
            Schedule::CappedRamp { cap, offset } => (n / (n + offset)).min(cap),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Schedule::Constant(c) => write!(f, "constant({c})"),
            Schedule::OffsetInverse { base, scale, offset } => {
                write!(f, "{base} + {scale}/(n + {offset})")
            }
            Schedule::CappedRamp { cap, offset } => write!(f, "min({cap}, n/(n + {offset}))"),
        }
    }
}

/// Configuration for the inertial outer iteration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub gamma: Schedule,
    pub alpha: Schedule,
    /// Stop when `‖xₙ₊₁ − yₙ‖∞` falls below this.
    pub tol_step: f64,
    /// Stop when `‖F(xₙ₊₁)‖∞` falls below this.
    pub tol_residual: f64,
    pub max_iter: usize,
    pub x0: Vector,
    pub x1: Vector,
}

impl SolverConfig {
    /// Defaults: identity-friendly schedules, tolerances of `1e-10`, a cap
    /// of 10000 iterations, and zero starting points of dimension `n`.
    pub fn default_for(n: usize) -> Self {
        SolverConfig {
            gamma: Schedule::Constant(1.0),
            alpha: Schedule::Constant(0.0),
            tol_step: 1e-10,
            tol_residual: 1e-10,
            max_iter: 10_000,
            x0: Vector::zeros(n),
            x1: Vector::zeros(n),
        }
    }
}

/// What schedule validation found over the run horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleValidation {
    pub alpha_nondecreasing: bool,
    /// Largest inertia value over the horizon.
    pub alpha_cap: f64,
    /// Smallest step size over the horizon.
    pub gamma_inf: f64,
    /// Inertia nondecreasing, capped below 1/3, and step sizes bounded
    /// away from zero — the hypotheses under which convergence is proved.
    pub theory_satisfied: bool,
}

/// Evaluate both schedules over `[0, max_iter]` and report whether the
/// convergence theory's hypotheses hold. The solver itself treats a
/// negative verdict as a warning, not an error.
pub fn validate_schedules(cfg: &SolverConfig) -> ScheduleValidation {
    let mut alpha_nondecreasing = true;
    let mut alpha_cap = f64::NEG_INFINITY;
    let mut gamma_inf = f64::INFINITY;
    let mut prev_alpha = None;
    for n in 0..=cfg.max_iter {
        let a = cfg.alpha.eval(n);
        let g = cfg.gamma.eval(n);
        alpha_cap = alpha_cap.max(a);
        gamma_inf = gamma_inf.min(g);
        if let Some(p) = prev_alpha {
            if a < p {
                alpha_nondecreasing = false;
            }
        }
        prev_alpha = Some(a);
    }
    let theory_satisfied =
        alpha_nondecreasing && alpha_cap < 1.0 / 3.0 && gamma_inf > 0.0;
    ScheduleValidation { alpha_nondecreasing, alpha_cap, gamma_inf, theory_satisfied }
}

fn check_schedules_admissible(cfg: &SolverConfig) -> Result<(), SolverError> {
    for n in 0..=cfg.max_iter {
        let g = cfg.gamma.eval(n);
        if !g.is_finite() || g <= 0.0 {
            return Err(SolverError::ScheduleInvalid {
                detail: format!("gamma({n}) = {g}, must be finite and positive"),
            });
        }
        let a = cfg.alpha.eval(n);
        if !a.is_finite() || !(0.0..=1.0).contains(&a) {
            return Err(SolverError::ScheduleInvalid {
                detail: format!("alpha({n}) = {a}, must lie in [0, 1]"),
            });
        }
    }
    Ok(())
}

// ── Inertial warped-resolvent iteration ─────────────────────────────

/// Run the inertial warped-resolvent iteration.
///
/// Starting from `(x₀, x₁)`, iterates `yₙ = xₙ + αₙ(xₙ − xₙ₋₁)` and
/// `xₙ₊₁ = (γₙF + v)⁻¹ v(yₙ)` for `n = 1, 2, …`, stopping when the step
/// gap or the residual falls below its tolerance, or at `max_iter`. When
/// the resolvent system is singular at a scheduled γₙ the step is retried
/// once with a `1e-6` relative nudge before failing.
///
/// The zero-inertia method is the `αₙ ≡ 0` instance; the classical
/// proximal point method additionally takes the identity kernel.
pub fn gippa_run(
    op: &OperatorSpec,
    kernel: &KernelSpec,
    cfg: &SolverConfig,
) -> Result<IterateTrace, SolverError> {
    let n_dim = op.dimension();
    if kernel.dimension() != n_dim {
        return Err(SolverError::DimensionMismatch {
            expected: n_dim,
            found: kernel.dimension(),
        });
    }
    if cfg.x0.len() != n_dim || cfg.x1.len() != n_dim {
        return Err(SolverError::DimensionMismatch { expected: n_dim, found: cfg.x0.len() });
    }
    check_schedules_admissible(cfg)?;
    let validation = validate_schedules(cfg);
    if !validation.theory_satisfied {
        eprintln!(
            "warning: schedules violate the convergence hypotheses \
             (alpha nondecreasing: {}, alpha cap: {}, inf gamma: {}); proceeding anyway",
            validation.alpha_nondecreasing, validation.alpha_cap, validation.gamma_inf
        );
    }

    let inner = InnerSolverConfig::default();
    let mut x_prev = cfg.x0.clone();
    let mut x_curr = cfg.x1.clone();
    let mut records = Vec::new();
    let mut termination = TerminationReason::MaxIterations;

    for n in 1..=cfg.max_iter {
        let alpha = cfg.alpha.eval(n);
        let gamma_scheduled = cfg.gamma.eval(n);
        let y = &x_curr + &(&(&x_curr - &x_prev) * alpha);

        let (x_next, gamma) =
            match warped_resolvent(op, kernel, gamma_scheduled, &y, &inner, Some(&x_curr)) {
                Ok(x) => (x, gamma_scheduled),
                Err(ResolventError::Singular) => {
                    let nudged = gamma_scheduled * GAMMA_RETRY_FACTOR;
                    match warped_resolvent(op, kernel, nudged, &y, &inner, Some(&x_curr)) {
                        Ok(x) => (x, nudged),
                        Err(source) => return Err(SolverError::ResolventFailure { n, source }),
                    }
                }
                Err(source) => return Err(SolverError::ResolventFailure { n, source }),
            };

        let step_gap = (&x_next - &y).norm_inf();
        let v_gap = (&kernel.apply(&y) - &kernel.apply(&x_next)).norm2();
        let residual = op.eval(&x_next)?.norm_inf();
        records.push(IterateRecord {
            n,
            y,
            x_next: x_next.clone(),
            gamma,
            alpha,
            step_gap,
            v_gap,
            residual,
        });

        if step_gap <= cfg.tol_step {
            termination = TerminationReason::StepTolerance;
            break;
        }
        if residual <= cfg.tol_residual {
            termination = TerminationReason::ResidualTolerance;
            break;
        }
        x_prev = x_curr;
        x_curr = x_next;
    }

    Ok(IterateTrace {
        initial: vec![cfg.x0.clone(), cfg.x1.clone()],
        records,
        termination,
        x_ref: None,
    })
}

// ── Frozen-kernel (quasi-Newton) iteration ──────────────────────────

/// Configuration for the frozen-kernel iteration
/// `xₖ₊₁ = xₖ − h·f'(x*)⁻¹ f(xₖ)`.
#[derive(Debug, Clone)]
pub struct QuasiNewtonConfig {
    /// Reference point `x*`; its Jacobian is factored once and reused.
    pub reference_point: Vector,
    /// Step `h`. When absent, `α̂/L̂²` is used with the modulus `α̂`
    /// sampled near the reference point and `L̂` an estimated Lipschitz
    /// bound of `f`.
    pub step: Option<f64>,
    /// Optional radius of the trusted neighborhood, measured as
    /// `‖v(xₖ) − v(x*)‖₂` with `v = f'(x*)`; leaving it errors the run.
    pub trust_radius: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl QuasiNewtonConfig {
    pub fn new(reference_point: Vector) -> Self {
        QuasiNewtonConfig {
            reference_point,
            step: None,
            trust_radius: None,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

/// Run the frozen-kernel iteration from `x0`.
///
/// The Jacobian is evaluated and factored at the reference point only, so
/// the iteration remains defined even when `f'` is singular at intermediate
/// iterates — the very situation that breaks plain Newton.
pub fn quasi_newton_run(
    f: &NonlinearOperator,
    cfg: &QuasiNewtonConfig,
    x0: &Vector,
) -> Result<IterateTrace, SolverError> {
    let n_dim = f.dimension();
    if cfg.reference_point.len() != n_dim || x0.len() != n_dim {
        return Err(SolverError::DimensionMismatch { expected: n_dim, found: x0.len() });
    }

    let jac_star = f.jacobian(&cfg.reference_point)?;
    let factors = match lu_factor(&jac_star) {
        Ok(fa) => fa,
        Err(LinalgError::SingularMatrix) => return Err(SolverError::SingularJacobian { k: 0 }),
        Err(e) => return Err(e.into()),
    };

    let h = match cfg.step {
        Some(h) => h,
        None => default_quasi_newton_step(f, cfg, &jac_star)?,
    };

    let v_star = jac_star.apply(&cfg.reference_point);
    let mut x = x0.clone();
    let mut records = Vec::new();
    let mut termination = TerminationReason::MaxIterations;

    for k in 0.. {
        let fx = f.eval(&x)?;
        if fx.norm_inf() <= cfg.tol {
            termination = TerminationReason::ResidualTolerance;
            break;
        }
        if k >= cfg.max_iter {
            break;
        }
        if let Some(radius) = cfg.trust_radius {
            let distance = (&jac_star.apply(&x) - &v_star).norm2();
            if distance > radius {
                return Err(SolverError::LeftNeighborhood { k, distance });
            }
        }
        let direction = factors.solve(&fx)?;
        let x_next = &x - &(&direction * h);
        let residual = f.eval(&x_next)?.norm_inf();
        records.push(IterateRecord {
            n: k + 1,
            y: x.clone(),
            x_next: x_next.clone(),
            gamma: h,
            alpha: 0.0,
            step_gap: (&x_next - &x).norm_inf(),
            v_gap: (&jac_star.apply(&x) - &jac_star.apply(&x_next)).norm2(),
            residual,
        });
        x = x_next;
    }

    Ok(IterateTrace { initial: vec![x0.clone()], records, termination, x_ref: None })
}

/// `h = α̂/L̂²` from sampled constants near the reference point.
fn default_quasi_newton_step(
    f: &NonlinearOperator,
    cfg: &QuasiNewtonConfig,
    jac_star: &crate::linalg::Mat,
) -> Result<f64, SolverError> {
    let sigma_min = *svd(jac_star)?.sigma.last().expect("non-empty spectrum");
    // Convert a v-image trust radius to an x-space ball radius.
    let radius = cfg.trust_radius.map(|tr| tr / sigma_min).unwrap_or(1.0);
    let est = estimate_local_strong_monotonicity(
        f,
        &cfg.reference_point,
        radius,
        STEP_ESTIMATE_SAMPLES,
        STEP_ESTIMATE_SEED,
    )?;
    if est.alpha_hat.is_nan() || est.alpha_hat <= 0.0 {
        return Err(SolverError::StepEstimationFailed { alpha_hat: est.alpha_hat });
    }
    let lipschitz = match f.lipschitz_hint() {
        Some(l) => l,
        None => {
            let lo = &cfg.reference_point - &(&unit_vector(f.dimension()) * radius);
            let hi = &cfg.reference_point + &(&unit_vector(f.dimension()) * radius);
            estimate_lipschitz(f, &lo, &hi, 50, STEP_ESTIMATE_SEED ^ 0xff)?
        }
    };
    if lipschitz.is_nan() || lipschitz <= 0.0 {
        return Err(SolverError::StepEstimationFailed { alpha_hat: est.alpha_hat });
    }
    Ok(est.alpha_hat / (lipschitz * lipschitz))
}

fn unit_vector(n: usize) -> Vector {
    Vector::new(vec![1.0; n])
}

// ── Classical Newton ────────────────────────────────────────────────

/// Damped classical Newton: `xₖ₊₁ = xₖ − h·f'(xₖ)⁻¹ f(xₖ)` with a fresh
/// factorization each step. Fails with `SingularJacobian { k }` as soon as
/// an iterate has a non-invertible Jacobian.
pub fn newton_run(
    f: &NonlinearOperator,
    x0: &Vector,
    h: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IterateTrace, SolverError> {
    let n_dim = f.dimension();
    if x0.len() != n_dim {
        return Err(SolverError::DimensionMismatch { expected: n_dim, found: x0.len() });
    }

    let mut x = x0.clone();
    let mut records = Vec::new();
    let mut termination = TerminationReason::MaxIterations;

    for k in 0.. {
        let fx = f.eval(&x)?;
        // The step is undefined wherever f' is singular, so that failure
        // takes precedence over the residual stop.
        let jac = f.jacobian(&x)?;
        let factors = match lu_factor(&jac) {
            Ok(fa) => fa,
            Err(LinalgError::SingularMatrix) => return Err(SolverError::SingularJacobian { k }),
            Err(e) => return Err(e.into()),
        };
        if fx.norm_inf() <= tol {
            termination = TerminationReason::ResidualTolerance;
            break;
        }
        if k >= max_iter {
            break;
        }
        let direction = factors.solve(&fx)?;
        let x_next = &x - &(&direction * h);
        let residual = f.eval(&x_next)?.norm_inf();
        records.push(IterateRecord {
            n: k + 1,
            y: x.clone(),
            x_next: x_next.clone(),
            gamma: h,
            alpha: 0.0,
            step_gap: (&x_next - &x).norm_inf(),
            v_gap: (&jac.apply(&x) - &jac.apply(&x_next)).norm2(),
            residual,
        });
        x = x_next;
    }

    Ok(IterateTrace { initial: vec![x0.clone()], records, termination, x_ref: None })
}
