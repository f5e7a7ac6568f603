//! Built-in benchmark problems.
//!
//! Two small problems exercise every code path and double as regression
//! anchors:
//!
//! * `example1` — the affine operator `F(x) = Ax − b` with the 3×3
//!   sequential matrix `[[1,2,3],[4,5,6],[7,8,9]]`, which is rank two and
//!   indefinite, and `b = (14, 32, 50)` so that `x* = (1, 2, 3)` is a zero.
//!   Two reference kernels come with it: an invertible one obtained by
//!   bumping the top-left entry, and the rank-one projector onto the first
//!   coordinate.
//! * `example2` — a nonlinear operator `f(x) = Ax + g(x)` with
//!   `A = diag(−1, 5, 9)` and a trigonometric perturbation `g` built from
//!   `|x₁|` and `|x₃|`. Neither `A` nor `g` is monotone, but the pair
//!   `(f, A)` behaves monotonically, so `A` itself serves as the kernel.
//!   The zero is near `(−0.06, −0.195, −0.164)`.

use crate::linalg::{Mat, Vector};
use crate::operators::{
    AffineOperator, KernelProvenance, KernelSpec, NonlinearOperator, OperatorSpec,
};
use crate::solvers::Schedule;

/// `sign` with `sign(0) = 0`, the midpoint convention for the `|·|` kinks.
fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn example1_matrix() -> Mat {
    Mat::from_rows(&[
        vec![1.0, 2.0, 3.0],
        vec![4.0, 5.0, 6.0],
        vec![7.0, 8.0, 9.0],
    ])
}

pub fn example1_rhs() -> Vector {
    Vector::from_slice(&[14.0, 32.0, 50.0])
}

pub fn example1_operator() -> AffineOperator {
    AffineOperator::new(example1_matrix(), example1_rhs()).expect("static data is consistent")
}

/// A zero of the example1 operator (the solution set is a line; this is
/// the representative used for error reporting).
pub fn example1_solution() -> Vector {
    Vector::from_slice(&[1.0, 2.0, 3.0])
}

/// Invertible kernel for example1: the problem matrix with its top-left
/// entry bumped by one.
pub fn example1_kernel_v1() -> KernelSpec {
    let b = Mat::from_rows(&[
        vec![2.0, 2.0, 3.0],
        vec![4.0, 5.0, 6.0],
        vec![7.0, 8.0, 9.0],
    ]);
    KernelSpec::new(b, KernelProvenance::User).expect("static data is consistent")
}

/// Rank-one kernel for example1: the projector onto the first coordinate.
/// Cheap to apply and deliberately non-invertible; the resolvent system
/// `γA + B` stays nonsingular for every γ > 0 (its determinant is `−3γ²`).
pub fn example1_kernel_v2() -> KernelSpec {
    let mut b = Mat::zeros(3, 3);
    b[(0, 0)] = 1.0;
    KernelSpec::new(b, KernelProvenance::User).expect("static data is consistent")
}

pub fn example2_matrix() -> Mat {
    Mat::diag(&[-1.0, 5.0, 9.0])
}

/// The nonlinear benchmark operator, with its analytic Jacobian registered.
pub fn example2_operator() -> NonlinearOperator {
    let eval = |x: &Vector| -> Vector {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        Vector::from_slice(&[
            -x1 + 2.0 * (x3.abs() + x2).sin(),
            5.0 * x2 + (x1.abs() - x2).cos(),
            9.0 * x3 + 2.0 * x2.cos() - 3.0 * x3.abs().sin(),
        ])
    };
    let jacobian = |x: &Vector| -> Mat {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        let u = x3.abs() + x2;
        let w = x1.abs() - x2;
        Mat::from_rows(&[
            vec![-1.0, 2.0 * u.cos(), 2.0 * u.cos() * sgn(x3)],
            vec![-w.sin() * sgn(x1), 5.0 + w.sin(), 0.0],
            vec![0.0, -2.0 * x2.sin(), 9.0 - 3.0 * x3.abs().cos() * sgn(x3)],
        ])
    };
    NonlinearOperator::new(3, eval)
        .with_jacobian(jacobian)
        .expect("analytic Jacobian matches finite differences off the kink set")
}

/// The kernel paired with example2: the linear part `A` itself.
pub fn example2_kernel() -> KernelSpec {
    KernelSpec::new(example2_matrix(), KernelProvenance::User).expect("static data is consistent")
}

/// Coarse location of the example2 zero, for error reporting. Refine with a
/// Newton run when a tight reference is needed.
pub fn example2_approx_solution() -> Vector {
    Vector::from_slice(&[-0.06, -0.195, -0.164])
}

/// Reference starting points for the example runs.
pub fn example1_starting_points() -> (Vector, Vector) {
    (
        Vector::from_slice(&[-0.5, -0.5, -0.5]),
        Vector::from_slice(&[0.7, 0.7, 0.7]),
    )
}

pub fn example2_starting_points() -> (Vector, Vector) {
    (
        Vector::from_slice(&[2.0, -2.0, 1.0]),
        Vector::from_slice(&[1.5, -1.5, 0.5]),
    )
}

/// Step-size schedule used by the example1 runs: `0.1 + 0.3/(n + 10)`.
pub fn example1_gamma_schedule() -> Schedule {
    Schedule::OffsetInverse { base: 0.1, scale: 0.3, offset: 10.0 }
}

/// Inertia schedule used by the example runs: `min(0.3, n/(n + 10))`.
pub fn reference_alpha_schedule() -> Schedule {
    Schedule::CappedRamp { cap: 0.3, offset: 10.0 }
}

/// Step-size schedule used by the example2 runs: constant `0.5`.
pub fn example2_gamma_schedule() -> Schedule {
    Schedule::Constant(0.5)
}

/// Look up a built-in operator by name.
pub fn builtin_operator(name: &str) -> Option<OperatorSpec> {
    match name {
        "example1" => Some(OperatorSpec::Affine(example1_operator())),
        "example2" => Some(OperatorSpec::Nonlinear(example2_operator())),
        _ => None,
    }
}

/// Names accepted by [`builtin_operator`].
pub fn builtin_names() -> &'static [&'static str] {
    &["example1", "example2"]
}
