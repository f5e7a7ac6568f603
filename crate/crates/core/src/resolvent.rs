//! Warped resolvent evaluation.
//!
//! The warped resolvent of `γF` with kernel `v(x) = Bx` maps `y` to the
//! solution `x` of `γF(x) + Bx = By`. For affine `F` this is one linear
//! solve; for nonlinear `F` a damped Newton iteration on the inner equation.
//! Fixed points of the map coincide with zeros of `F`.

use std::fmt;

use crate::linalg::{lu_factor, lu_solve, LinalgError, Mat, Vector};
use crate::operators::{KernelSpec, NonlinearOperator, OperatorError, OperatorSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum ResolventError {
    /// `γA + B` failed the pivot test: the resolvent is not defined at this
    /// step size. Callers may perturb γ and retry.
    Singular,
    /// The inner Newton solver hit a singular Jacobian or found no descent
    /// direction even with damping.
    InnerSingular,
    /// The inner Newton solver exhausted its iteration budget.
    InnerNoConvergence { residual: f64 },
    /// The step size must be strictly positive.
    InvalidGamma { gamma: f64 },
    DimensionMismatch { expected: usize, found: usize },
    Operator(OperatorError),
    Linalg(LinalgError),
}

impl fmt::Display for ResolventError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolventError::Singular => {
                write!(f, "resolvent system is singular at this step size")
            }
            ResolventError::InnerSingular => {
                write!(f, "inner Newton solver stalled (singular Jacobian or no descent)")
            }
            ResolventError::InnerNoConvergence { residual } => {
                write!(f, "inner Newton solver did not converge (residual {residual:e})")
            }
            ResolventError::InvalidGamma { gamma } => {
                write!(f, "step size must be positive, got {gamma}")
            }
            ResolventError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            ResolventError::Operator(e) => write!(f, "{e}"),
            ResolventError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ResolventError {}

impl From<OperatorError> for ResolventError {
    fn from(e: OperatorError) -> Self {
        ResolventError::Operator(e)
    }
}

impl From<LinalgError> for ResolventError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::SingularMatrix => ResolventError::Singular,
            other => ResolventError::Linalg(other),
        }
    }
}

/// Controls for the inner Newton solver used by nonlinear resolvents.
#[derive(Debug, Clone)]
pub struct InnerSolverConfig {
    /// Residual tolerance, relative to `max(1, ‖By‖∞)`.
    pub tol: f64,
    pub max_iters: usize,
    /// Smallest backtracking step; halving stops here.
    pub damping_floor: f64,
}

impl Default for InnerSolverConfig {
    fn default() -> Self {
        InnerSolverConfig { tol: 1e-12, max_iters: 100, damping_floor: 2f64.powi(-20) }
    }
}

/// A resolvent evaluation problem: operator, kernel, and step size.
#[derive(Debug, Clone)]
pub struct ResolventProblem {
    pub operator: OperatorSpec,
    pub kernel: KernelSpec,
    pub gamma: f64,
}

/// Warped resolvent of an affine operator: solves `(γA + B)x = By + γb`.
pub fn resolvent_affine(
    a: &Mat,
    b: &Vector,
    kernel: &Mat,
    gamma: f64,
    y: &Vector,
) -> Result<Vector, ResolventError> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(ResolventError::InvalidGamma { gamma });
    }
    let n = a.rows();
    if y.len() != n || b.len() != n || kernel.rows() != n {
        return Err(ResolventError::DimensionMismatch { expected: n, found: y.len() });
    }
    let system = a.scale(gamma).add(kernel)?;
    let rhs = &kernel.apply(y) + &(b * gamma);
    Ok(lu_solve(&system, &rhs)?)
}

/// Warped resolvent of a nonlinear operator: damped Newton on
/// `G(x) = γf(x) + Bx − By`, warm-started from the previous outer iterate.
pub fn resolvent_nonlinear(
    f: &NonlinearOperator,
    kernel: &Mat,
    gamma: f64,
    y: &Vector,
    cfg: &InnerSolverConfig,
    warm_start: &Vector,
) -> Result<Vector, ResolventError> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(ResolventError::InvalidGamma { gamma });
    }
    let n = f.dimension();
    if y.len() != n || kernel.rows() != n || warm_start.len() != n {
        return Err(ResolventError::DimensionMismatch { expected: n, found: y.len() });
    }

    let target = kernel.apply(y);
    let scale = target.norm_inf().max(1.0);
    let mut x = warm_start.clone();

    let residual = |x: &Vector| -> Result<Vector, ResolventError> {
        let fx = f.eval(x)?;
        Ok(&(&(&fx * gamma) + &kernel.apply(x)) - &target)
    };

    let mut g = residual(&x)?;
    for _ in 0..cfg.max_iters {
        if g.norm_inf() <= cfg.tol * scale {
            return Ok(x);
        }
        let jac = f.jacobian(&x)?.scale(gamma).add(kernel)?;
        let factors = match lu_factor(&jac) {
            Ok(f) => f,
            Err(LinalgError::SingularMatrix) => return Err(ResolventError::InnerSingular),
            Err(e) => return Err(e.into()),
        };
        let step = factors.solve(&(&g * -1.0))?;

        // Backtracking on the residual max-norm.
        let g_norm = g.norm_inf();
        let mut t = 1.0;
        loop {
            let candidate = &x + &(&step * t);
            match residual(&candidate) {
                Ok(g_new) if g_new.norm_inf() < g_norm => {
                    x = candidate;
                    g = g_new;
                    break;
                }
                Ok(_) | Err(ResolventError::Operator(OperatorError::NonFinite)) => {
                    t *= 0.5;
                    if t < cfg.damping_floor {
                        return Err(ResolventError::InnerSingular);
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    if g.norm_inf() <= cfg.tol * scale {
        Ok(x)
    } else {
        Err(ResolventError::InnerNoConvergence { residual: g.norm_inf() })
    }
}

/// Warped resolvent for either operator kind.
pub fn warped_resolvent(
    op: &OperatorSpec,
    kernel: &KernelSpec,
    gamma: f64,
    y: &Vector,
    cfg: &InnerSolverConfig,
    warm_start: Option<&Vector>,
) -> Result<Vector, ResolventError> {
    match op {
        OperatorSpec::Affine(f) => resolvent_affine(f.matrix(), f.rhs(), kernel.matrix(), gamma, y),
        OperatorSpec::Nonlinear(f) => {
            resolvent_nonlinear(f, kernel.matrix(), gamma, y, cfg, warm_start.unwrap_or(y))
        }
    }
}

/// `‖J(x) − x‖∞` for the warped resolvent `J`; zero exactly at fixed
/// points, which for well-posed problems are the zeros of `F`.
pub fn fixed_point_residual(
    op: &OperatorSpec,
    kernel: &KernelSpec,
    gamma: f64,
    x: &Vector,
) -> Result<f64, ResolventError> {
    let image = warped_resolvent(op, kernel, gamma, x, &InnerSolverConfig::default(), Some(x))?;
    Ok((&image - x).norm_inf())
}
