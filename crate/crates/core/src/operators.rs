//! Problem operators and linear kernels.
//!
//! An [`OperatorSpec`] is either affine (`F(x) = Ax − b`) or nonlinear (an
//! arbitrary evaluator with an optional analytic Jacobian). A [`KernelSpec`]
//! is the linear map `v(x) = Bx` paired with the operator by the solvers;
//! `B` may be singular.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{LinalgError, Mat, Vector};

/// Points checked when an analytic Jacobian is registered.
const JACOBIAN_CHECK_POINTS: usize = 20;
/// Relative agreement required between analytic and finite-difference
/// Jacobians at registration.
const JACOBIAN_CHECK_TOL: f64 = 1e-4;
const JACOBIAN_CHECK_SEED: u64 = 0x6a61_636f_6269;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorError {
    /// The evaluator produced NaN or infinity.
    NonFinite,
    /// Input or output dimension disagrees with the operator's.
    DimensionMismatch { expected: usize, found: usize },
    /// A registered analytic Jacobian disagrees with finite differences.
    JacobianMismatch { point: Vector, max_rel_err: f64 },
    Linalg(LinalgError),
}

impl fmt::Display for OperatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorError::NonFinite => write!(f, "operator evaluation produced a non-finite value"),
            OperatorError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            OperatorError::JacobianMismatch { max_rel_err, .. } => write!(
                f,
                "analytic Jacobian disagrees with finite differences (max relative error {max_rel_err:e})"
            ),
            OperatorError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for OperatorError {}

impl From<LinalgError> for OperatorError {
    fn from(e: LinalgError) -> Self {
        OperatorError::Linalg(e)
    }
}

// ── Affine operators ────────────────────────────────────────────────

/// `F(x) = A·x − b`.
#[derive(Debug, Clone)]
pub struct AffineOperator {
    a: Mat,
    b: Vector,
}

impl AffineOperator {
    pub fn new(a: Mat, b: Vector) -> Result<Self, OperatorError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() }.into());
        }
        if a.rows() != b.len() {
            return Err(OperatorError::DimensionMismatch { expected: a.rows(), found: b.len() });
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(OperatorError::NonFinite);
        }
        Ok(AffineOperator { a, b })
    }

    pub fn dimension(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    pub fn rhs(&self) -> &Vector {
        &self.b
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector, OperatorError> {
        if x.len() != self.dimension() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        Ok(&self.a.apply(x) - &self.b)
    }
}

// ── Nonlinear operators ─────────────────────────────────────────────

type EvalFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&Vector) -> Mat + Send + Sync>;

/// A nonlinear operator given by an evaluator closure, an optional analytic
/// Jacobian (validated against finite differences at registration), and an
/// optional Lipschitz bound supplied by the caller.
///
/// Evaluators must be pure: operators are immutable after construction and
/// may be evaluated concurrently.
#[derive(Clone)]
pub struct NonlinearOperator {
    dimension: usize,
    evaluator: EvalFn,
    jacobian: Option<JacobianFn>,
    lipschitz_hint: Option<f64>,
}

impl fmt::Debug for NonlinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearOperator")
            .field("dimension", &self.dimension)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("lipschitz_hint", &self.lipschitz_hint)
            .finish()
    }
}

impl NonlinearOperator {
    pub fn new<F>(dimension: usize, evaluator: F) -> Self
    where
        F: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        NonlinearOperator {
            dimension,
            evaluator: Arc::new(evaluator),
            jacobian: None,
            lipschitz_hint: None,
        }
    }

    /// Register an analytic Jacobian. It is compared against central finite
    /// differences at seeded sample points in the unit cube; registration
    /// fails if any point disagrees by more than `1e-4` relative.
    pub fn with_jacobian<J>(mut self, jacobian: J) -> Result<Self, OperatorError>
    where
        J: Fn(&Vector) -> Mat + Send + Sync + 'static,
    {
        let jac: JacobianFn = Arc::new(jacobian);
        let mut rng = ChaCha8Rng::seed_from_u64(JACOBIAN_CHECK_SEED);
        for _ in 0..JACOBIAN_CHECK_POINTS {
            let x = Vector::new(
                (0..self.dimension).map(|_| rng.random_range(-1.0..1.0)).collect(),
            );
            let analytic = jac(&x);
            if analytic.shape() != (self.dimension, self.dimension) {
                return Err(OperatorError::DimensionMismatch {
                    expected: self.dimension,
                    found: analytic.rows(),
                });
            }
            let fd = jacobian_fd(&self, &x)?;
            let scale = analytic.norm_max().max(1.0);
            let err = analytic.sub(&fd)?.norm_max() / scale;
            if err > JACOBIAN_CHECK_TOL {
                return Err(OperatorError::JacobianMismatch { point: x, max_rel_err: err });
            }
        }
        self.jacobian = Some(jac);
        Ok(self)
    }

    pub fn with_lipschitz_hint(mut self, bound: f64) -> Self {
        self.lipschitz_hint = Some(bound);
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector, OperatorError> {
        if x.len() != self.dimension {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        let out = (self.evaluator)(x);
        if out.len() != self.dimension {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dimension,
                found: out.len(),
            });
        }
        if !out.is_finite() {
            return Err(OperatorError::NonFinite);
        }
        Ok(out)
    }

    /// Jacobian at `x`: the registered analytic one when present, central
    /// finite differences otherwise.
    pub fn jacobian(&self, x: &Vector) -> Result<Mat, OperatorError> {
        match &self.jacobian {
            Some(jac) => {
                let j = jac(x);
                if !j.is_finite() {
                    return Err(OperatorError::NonFinite);
                }
                Ok(j)
            }
            None => jacobian_fd(self, x),
        }
    }
}

/// Central finite-difference Jacobian with per-coordinate step
/// `h_j = √ε · max(1, |x_j|)`.
pub fn jacobian_fd(f: &NonlinearOperator, x: &Vector) -> Result<Mat, OperatorError> {
    let n = f.dimension();
    if x.len() != n {
        return Err(OperatorError::DimensionMismatch { expected: n, found: x.len() });
    }
    let mut jac = Mat::zeros(n, n);
    for j in 0..n {
        let h = f64::EPSILON.sqrt() * x[j].abs().max(1.0);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let fp = f.eval(&xp)?;
        let fm = f.eval(&xm)?;
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Estimate a Lipschitz bound for `f` by sampling `‖J_fd(x)‖₂` at seeded
/// points of the box `[lo, hi]` and taking the maximum.
pub fn estimate_lipschitz(
    f: &NonlinearOperator,
    lo: &Vector,
    hi: &Vector,
    samples: usize,
    seed: u64,
) -> Result<f64, OperatorError> {
    let n = f.dimension();
    if lo.len() != n || hi.len() != n {
        return Err(OperatorError::DimensionMismatch { expected: n, found: lo.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = Vector::new(
            (0..n).map(|j| rng.random_range(lo[j]..=hi[j])).collect(),
        );
        let j = jacobian_fd(f, &x)?;
        worst = worst.max(j.norm2().map_err(OperatorError::Linalg)?);
    }
    Ok(worst)
}

// ── Operator dispatch ───────────────────────────────────────────────

/// The problem operator `F`, affine or nonlinear.
#[derive(Debug, Clone)]
pub enum OperatorSpec {
    Affine(AffineOperator),
    Nonlinear(NonlinearOperator),
}

impl OperatorSpec {
    pub fn dimension(&self) -> usize {
        match self {
            OperatorSpec::Affine(op) => op.dimension(),
            OperatorSpec::Nonlinear(op) => op.dimension(),
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector, OperatorError> {
        match self {
            OperatorSpec::Affine(op) => op.eval(x),
            OperatorSpec::Nonlinear(op) => op.eval(x),
        }
    }

    pub fn jacobian(&self, x: &Vector) -> Result<Mat, OperatorError> {
        match self {
            OperatorSpec::Affine(op) => {
                if x.len() != op.dimension() {
                    return Err(OperatorError::DimensionMismatch {
                        expected: op.dimension(),
                        found: x.len(),
                    });
                }
                Ok(op.matrix().clone())
            }
            OperatorSpec::Nonlinear(op) => op.jacobian(x),
        }
    }
}

// ── Kernels ─────────────────────────────────────────────────────────

/// Where a kernel matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelProvenance {
    User,
    Perturbation,
    Symmetric,
    Factored,
    Identity,
}

impl fmt::Display for KernelProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KernelProvenance::User => "user",
            KernelProvenance::Perturbation => "perturbation",
            KernelProvenance::Symmetric => "symmetric",
            KernelProvenance::Factored => "factored",
            KernelProvenance::Identity => "identity",
        };
        write!(f, "{s}")
    }
}

/// Linear kernel `v(x) = B·x`. `B` may be singular; only `γF + v` needs to
/// be injective for the warped resolvent to exist.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    b: Mat,
    provenance: KernelProvenance,
    /// Zero-replacement threshold used by the constructions, when one was.
    tau: Option<f64>,
}

impl KernelSpec {
    pub fn new(b: Mat, provenance: KernelProvenance) -> Result<Self, OperatorError> {
        if !b.is_square() {
            return Err(LinalgError::NotSquare { rows: b.rows(), cols: b.cols() }.into());
        }
        if !b.is_finite() {
            return Err(OperatorError::NonFinite);
        }
        Ok(KernelSpec { b, provenance, tau: None })
    }

    pub fn identity(n: usize) -> Self {
        KernelSpec { b: Mat::identity(n), provenance: KernelProvenance::Identity, tau: None }
    }

    pub fn from_user_matrix(b: Mat) -> Result<Self, OperatorError> {
        KernelSpec::new(b, KernelProvenance::User)
    }

    pub(crate) fn constructed(b: Mat, provenance: KernelProvenance, tau: Option<f64>) -> Self {
        KernelSpec { b, provenance, tau }
    }

    pub fn dimension(&self) -> usize {
        self.b.rows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.b
    }

    pub fn provenance(&self) -> KernelProvenance {
        self.provenance
    }

    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    /// `v(x) = B·x`. Panics on dimension mismatch; validate once upstream.
    pub fn apply(&self, x: &Vector) -> Vector {
        self.b.apply(x)
    }

    /// Lipschitz constant of `v`, i.e. `‖B‖₂`.
    pub fn lipschitz(&self) -> Result<f64, LinalgError> {
        self.b.norm2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;

    #[test]
    fn affine_eval_at_known_zero() {
        let f = problems::example1_operator();
        let out = f.eval(&Vector::from_slice(&[1.0, 2.0, 3.0])).unwrap();
        assert!(out.norm_inf() < 1e-14);
    }

    #[test]
    fn builtin_nonlinear_eval_at_origin() {
        // Direct evaluation oracle: at the origin the trig terms reduce to
        // (2·sin 0, cos 0, 2·cos 0 − 3·sin 0) = (0, 1, 2).
        let f = problems::example2_operator();
        let out = f.eval(&Vector::zeros(3)).unwrap();
        assert!((out[0] - 0.0).abs() < 1e-15);
        assert!((out[1] - 1.0).abs() < 1e-15);
        assert!((out[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_operator() {
        let f = NonlinearOperator::new(2, |x: &Vector| Vector::zeros(x.len()));
        let out = f.eval(&Vector::from_slice(&[3.0, -4.0])).unwrap();
        assert_eq!(out, Vector::zeros(2));
    }

    #[test]
    fn non_finite_evaluation_is_an_error() {
        let f = NonlinearOperator::new(1, |_: &Vector| Vector::from_slice(&[f64::NAN]));
        assert_eq!(f.eval(&Vector::zeros(1)).unwrap_err(), OperatorError::NonFinite);
    }

    #[test]
    fn finite_differences_recover_affine_matrix() {
        let a = Mat::from_rows(&[vec![2.0, -1.0], vec![0.5, 3.0]]);
        let a2 = a.clone();
        let f = NonlinearOperator::new(2, move |x: &Vector| {
            &a2.mul_vec(x).unwrap() - &Vector::from_slice(&[1.0, -1.0])
        });
        let jac = jacobian_fd(&f, &Vector::from_slice(&[0.3, -0.7])).unwrap();
        assert!(jac.sub(&a).unwrap().norm_max() < 1e-6);
    }

    #[test]
    fn finite_differences_match_analytic_derivative() {
        let f = NonlinearOperator::new(2, |x: &Vector| {
            Vector::from_slice(&[x[0] * x[0], x[1]])
        });
        let jac = jacobian_fd(&f, &Vector::from_slice(&[3.0, 1.0])).unwrap();
        let expected = Mat::from_rows(&[vec![6.0, 0.0], vec![0.0, 1.0]]);
        assert!(jac.sub(&expected).unwrap().norm_max() < 1e-6);
    }

    #[test]
    fn builtin_nonlinear_jacobian_matches_hand_differentiation() {
        // Hand-differentiated oracle at a point away from the |·| kinks.
        let f = problems::example2_operator();
        let x = Vector::from_slice(&[0.1, 0.1, 0.1]);
        let fd = jacobian_fd(&f, &x).unwrap();
        let u = 0.1f64.abs() + 0.1;
        let w = 0.1f64.abs() - 0.1;
        let oracle = Mat::from_rows(&[
            vec![-1.0, 2.0 * u.cos(), 2.0 * u.cos()],
            vec![-w.sin(), 5.0 + w.sin(), 0.0],
            vec![0.0, -2.0 * 0.1f64.sin(), 9.0 - 3.0 * 0.1f64.cos()],
        ]);
        let scale = oracle.norm_max();
        assert!(fd.sub(&oracle).unwrap().norm_max() <= 1e-4 * scale);
    }

    #[test]
    fn mismatched_jacobian_is_rejected_at_registration() {
        let res = NonlinearOperator::new(1, |x: &Vector| Vector::from_slice(&[x[0] * x[0]]))
            .with_jacobian(|_x: &Vector| Mat::diag(&[42.0]));
        assert!(matches!(res, Err(OperatorError::JacobianMismatch { .. })));
    }

    #[test]
    fn operators_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<OperatorSpec>();
        assert_send_sync::<NonlinearOperator>();
        assert_send_sync::<KernelSpec>();
        assert_send_sync::<Mat>();
        assert_send_sync::<Vector>();
    }

    #[test]
    fn affine_linearity_property() {
        let f = problems::example1_operator();
        let a = f.matrix().clone();
        let x = Vector::from_slice(&[0.2, -1.0, 0.4]);
        let y = Vector::from_slice(&[1.0, 0.5, -2.0]);
        let lhs = &f.eval(&(&x + &y)).unwrap() - &f.eval(&y).unwrap();
        let rhs = a.mul_vec(&x).unwrap();
        assert!((&lhs - &rhs).norm_inf() < 1e-12);
    }
}
