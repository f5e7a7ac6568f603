//! Monotonicity of operator pairs: certification and kernel construction.
//!
//! A pair `(F₁, F₂)` is monotone when `⟨F₁(x) − F₁(y), F₂(x) − F₂(y)⟩ ≥ 0`
//! for all `x, y`, and β-strongly monotone when the inner product dominates
//! `β‖x − y‖²`. For linear maps `A`, `B` the pair condition is exactly
//! positive semidefiniteness of `sym(AᵀB)`, which makes certification a
//! symmetric eigenvalue problem. For nonlinear operators the condition is
//! only sampled: a violation refutes monotonicity, a clean pass is reported
//! as inconclusive, never as a proof.
//!
//! Three constructions produce a kernel `B` making `(A, B)` monotone:
//!
//! * perturbation: `B = A + A₁` with `A₁ᵀA` monotone (checked, with a
//!   witness on failure);
//! * symmetric: eigendecompose `A = O D Oᵀ` and replace (near-)zero diagonal
//!   entries of `D` by a positive value, giving an invertible `B = O D' Oᵀ`;
//! * factored: same recipe on the SVD `A = U Σ Vᵀ`, giving `B = U Σ' Vᵀ`
//!   with `AᵀB = V (Σ Σ') Vᵀ` positive semidefinite by construction.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{lu_factor, svd, sym_eig, LinalgError, Mat, Vector, ABS_TOL_FLOOR};
use crate::operators::{KernelProvenance, KernelSpec, NonlinearOperator, OperatorError};

/// Relative threshold below which a diagonal entry counts as one of the
/// "zero entries" the constructions replace.
pub const ZERO_REPLACEMENT_REL_TOL: f64 = 1e-10;
/// Relative tolerance for the PSD decision on `sym(AᵀB)`.
pub const PSD_REL_TOL: f64 = 1e-8;
/// A sampled inner product below this refutes monotonicity.
pub const SAMPLED_VIOLATION_TOL: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum PairsError {
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    /// The perturbation construction's hypothesis `A₁ᵀA` monotone fails;
    /// carries a direction along which the quadratic form is negative.
    HypothesisViolated { witness: Vector, value: f64 },
    /// The Jacobian at the requested reference point is singular.
    SingularJacobian,
    /// Box or ball bounds are inverted or empty.
    InvalidRegion,
    Linalg(LinalgError),
    Operator(OperatorError),
}

impl fmt::Display for PairsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairsError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            PairsError::HypothesisViolated { value, .. } => {
                write!(f, "perturbation hypothesis fails: witness quadratic form = {value:e}")
            }
            PairsError::SingularJacobian => {
                write!(f, "Jacobian at the reference point is singular")
            }
            PairsError::InvalidRegion => write!(f, "sampling region is empty or inverted"),
            PairsError::Linalg(e) => write!(f, "{e}"),
            PairsError::Operator(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PairsError {}

impl From<LinalgError> for PairsError {
    fn from(e: LinalgError) -> Self {
        PairsError::Linalg(e)
    }
}

impl From<OperatorError> for PairsError {
    fn from(e: OperatorError) -> Self {
        PairsError::Operator(e)
    }
}

// ── Certificates ────────────────────────────────────────────────────

/// How a certificate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertMethod {
    /// Exact PSD test on `sym(AᵀB)` for linear pairs.
    PsdExact,
    /// Seeded sampling of the defining inner product.
    Sampled,
}

/// Outcome of a pair-monotonicity check.
///
/// A refutation stores the two points at which the defining inner product
/// is negative (for linear pairs the second point is the origin, so the
/// first is the usual quadratic-form witness direction).
#[derive(Debug, Clone, PartialEq)]
pub enum PairStatus {
    Monotone,
    StronglyMonotone { beta: f64 },
    NotMonotone { x: Vector, y: Vector },
    Inconclusive,
}

impl PairStatus {
    /// The direction `x − y` of a stored refutation, unit scaled.
    pub fn witness_direction(&self) -> Option<Vector> {
        match self {
            PairStatus::NotMonotone { x, y } => {
                let d = x - y;
                let n = d.norm2();
                Some(if n > 0.0 { &d * (1.0 / n) } else { d })
            }
            _ => None,
        }
    }
}

impl fmt::Display for PairStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairStatus::Monotone => write!(f, "monotone"),
            PairStatus::StronglyMonotone { beta } => write!(f, "strongly monotone (beta = {beta:e})"),
            PairStatus::NotMonotone { .. } => write!(f, "not monotone"),
            PairStatus::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCertificate {
    pub status: PairStatus,
    /// For linear pairs, `λ_min(sym(AᵀB))`; for sampled certificates the
    /// empirical minimum of the Rayleigh ratio
    /// `⟨F₁x − F₁y, F₂x − F₂y⟩ / ‖x − y‖²`.
    pub lambda_min: f64,
    pub method: CertMethod,
}

/// Certify or refute monotonicity of the linear pair `(A, B)` by the sign
/// of `λ_min(sym(AᵀB))`.
pub fn certify_linear_pair(a: &Mat, b: &Mat) -> Result<PairCertificate, PairsError> {
    check_same_square(a, b)?;
    let product = a.transpose().mul(b)?;
    let sym = product.sym_part()?;
    let decomp = sym_eig(&sym)?;
    let n = a.rows();
    let lambda_min = *decomp.eigenvalues.last().expect("non-empty spectrum");
    let tol = (PSD_REL_TOL * product.norm_max()).max(ABS_TOL_FLOOR);

    let status = if lambda_min > tol {
        PairStatus::StronglyMonotone { beta: lambda_min }
    } else if lambda_min >= -tol {
        PairStatus::Monotone
    } else {
        // Unit eigenvector for the smallest eigenvalue refutes the pair.
        let mut z = Vector::zeros(n);
        for i in 0..n {
            z[i] = decomp.eigenvectors[(i, n - 1)];
        }
        PairStatus::NotMonotone { x: z, y: Vector::zeros(n) }
    };
    Ok(PairCertificate { status, lambda_min, method: CertMethod::PsdExact })
}

/// The defining inner product of a linear pair between two points:
/// `⟨A(x − y), B(x − y)⟩`.
pub fn linear_pair_form(a: &Mat, b: &Mat, x: &Vector, y: &Vector) -> Result<f64, PairsError> {
    let d = x - y;
    Ok(a.mul_vec(&d)?.dot(&b.mul_vec(&d)?))
}

// ── Kernel constructions ────────────────────────────────────────────

/// Kernel by perturbation: `B = A + A₁`, valid when `A₁ᵀA` is monotone.
///
/// The hypothesis is verified via `λ_min(sym(A₁ᵀA))`; on failure the error
/// carries a witness direction. Use
/// [`construct_kernel_perturbation_unchecked`] to build the kernel anyway.
pub fn construct_kernel_perturbation(a: &Mat, a1: &Mat) -> Result<KernelSpec, PairsError> {
    check_same_square(a, a1)?;
    let product = a1.transpose().mul(a)?;
    let sym = product.sym_part()?;
    let decomp = sym_eig(&sym)?;
    let n = a.rows();
    let lambda_min = *decomp.eigenvalues.last().expect("non-empty spectrum");
    let tol = (PSD_REL_TOL * product.norm_max()).max(ABS_TOL_FLOOR);
    if lambda_min < -tol {
        let mut z = Vector::zeros(n);
        for i in 0..n {
            z[i] = decomp.eigenvectors[(i, n - 1)];
        }
        return Err(PairsError::HypothesisViolated { witness: z, value: lambda_min });
    }
    construct_kernel_perturbation_unchecked(a, a1)
}

/// `B = A + A₁` without verifying the monotonicity hypothesis.
pub fn construct_kernel_perturbation_unchecked(
    a: &Mat,
    a1: &Mat,
) -> Result<KernelSpec, PairsError> {
    check_same_square(a, a1)?;
    let b = a.add(a1)?;
    Ok(KernelSpec::constructed(b, KernelProvenance::Perturbation, None))
}

/// Kernel from the eigendecomposition of a symmetric matrix, replacing
/// near-zero eigenvalues by `1`.
pub fn construct_kernel_symmetric(a: &Mat) -> Result<KernelSpec, PairsError> {
    construct_kernel_symmetric_with(a, 1.0)
}

/// As [`construct_kernel_symmetric`] with a caller-chosen replacement value.
pub fn construct_kernel_symmetric_with(
    a: &Mat,
    replacement: f64,
) -> Result<KernelSpec, PairsError> {
    assert!(replacement > 0.0 && replacement.is_finite(), "replacement must be positive");
    let decomp = sym_eig(a)?;
    let dmax = decomp.eigenvalues.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let tau = ZERO_REPLACEMENT_REL_TOL * dmax.max(1.0);
    let replaced: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .map(|&d| if d.abs() <= tau { replacement } else { d })
        .collect();
    let o = &decomp.eigenvectors;
    let b = o.mul(&Mat::diag(&replaced))?.mul(&o.transpose())?;
    Ok(KernelSpec::constructed(b, KernelProvenance::Symmetric, Some(tau)))
}

/// Kernel from the SVD `A = U Σ Vᵀ`: near-zero singular values are replaced
/// by `1`, and `B = U Σ' Vᵀ`. `B` is invertible and `AᵀB = V (Σ Σ') Vᵀ` is
/// positive semidefinite, so `(A, B)` is monotone by construction.
pub fn construct_kernel_factored(a: &Mat) -> Result<KernelSpec, PairsError> {
    construct_kernel_factored_with(a, 1.0)
}

/// As [`construct_kernel_factored`] with a caller-chosen replacement value.
pub fn construct_kernel_factored_with(
    a: &Mat,
    replacement: f64,
) -> Result<KernelSpec, PairsError> {
    assert!(replacement > 0.0 && replacement.is_finite(), "replacement must be positive");
    a.require_square().map_err(PairsError::Linalg)?;
    let decomp = svd(a)?;
    let smax = decomp.sigma.first().copied().unwrap_or(0.0);
    let tau = ZERO_REPLACEMENT_REL_TOL * smax.max(1.0);
    let replaced: Vec<f64> = decomp
        .sigma
        .iter()
        .map(|&s| if s <= tau { replacement } else { s })
        .collect();
    let b = decomp.u.mul(&Mat::diag(&replaced))?.mul(&decomp.vt)?;
    Ok(KernelSpec::constructed(b, KernelProvenance::Factored, Some(tau)))
}

// ── Sampled certification for nonlinear pairs ───────────────────────

/// Sample the pair inner product of `(f, v)` over a box.
///
/// Draws `samples` point pairs uniformly from `[lo, hi]`, evaluating
/// `⟨f(x) − f(y), B(x − y)⟩`. The first violation below
/// [`SAMPLED_VIOLATION_TOL`] refutes monotonicity and is stored in the
/// certificate; otherwise the result is `Inconclusive` with the smallest
/// observed Rayleigh ratio in `lambda_min`. Sampling cannot certify
/// monotonicity, so `Monotone` is never returned.
pub fn certify_nonlinear_pair_sampled(
    f: &NonlinearOperator,
    v: &KernelSpec,
    lo: &Vector,
    hi: &Vector,
    samples: usize,
    seed: u64,
) -> Result<PairCertificate, PairsError> {
    let n = f.dimension();
    if v.dimension() != n || lo.len() != n || hi.len() != n {
        return Err(PairsError::DimensionMismatch {
            left: (n, n),
            right: (v.dimension(), lo.len()),
        });
    }
    if (0..n).any(|j| lo[j].is_nan() || hi[j].is_nan() || lo[j] >= hi[j]) {
        return Err(PairsError::InvalidRegion);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vector {
        Vector::new((0..n).map(|j| rng.random_range(lo[j]..=hi[j])).collect())
    };

    let mut min_ratio = f64::INFINITY;
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let d = &x - &y;
        let dist2 = d.dot(&d);
        if dist2 == 0.0 {
            continue;
        }
        let form = (&f.eval(&x)? - &f.eval(&y)?).dot(&v.apply(&d));
        if form < SAMPLED_VIOLATION_TOL {
            return Ok(PairCertificate {
                status: PairStatus::NotMonotone { x, y },
                lambda_min: form / dist2,
                method: CertMethod::Sampled,
            });
        }
        min_ratio = min_ratio.min(form / dist2);
    }
    Ok(PairCertificate {
        status: PairStatus::Inconclusive,
        lambda_min: min_ratio,
        method: CertMethod::Sampled,
    })
}

// ── Local strong monotonicity ───────────────────────────────────────

/// Sampled estimate of the local strong-monotonicity modulus of the pair
/// `(f, v)` with `v = f'(center)`, over a ball around `center`.
#[derive(Debug, Clone)]
pub struct LocalStrongMonotonicityEstimate {
    pub center: Vector,
    pub radius: f64,
    /// Smallest sampled Rayleigh ratio `⟨f(x) − f(y), v(x − y)⟩ / ‖x − y‖²`.
    pub alpha_hat: f64,
    pub samples: usize,
    /// Smallest singular value of `f'(center)`.
    pub sigma_min: f64,
    /// The modulus `c²/2` the local theory guarantees for a small enough
    /// radius, reported for comparison against `alpha_hat`.
    pub theoretical_floor: f64,
    /// The frozen kernel `f'(center)`.
    pub kernel: Mat,
}

/// Estimate the local strong-monotonicity modulus at `center`.
///
/// Fails with `SingularJacobian` when `f'(center)` does not pass the LU
/// pivot test — exactly the situation in which the frozen-kernel iteration
/// has no usable reference point.
pub fn estimate_local_strong_monotonicity(
    f: &NonlinearOperator,
    center: &Vector,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<LocalStrongMonotonicityEstimate, PairsError> {
    let n = f.dimension();
    if center.len() != n {
        return Err(PairsError::DimensionMismatch { left: (n, n), right: (center.len(), 1) });
    }
    assert!(radius > 0.0 && radius.is_finite(), "radius must be positive");

    let jac = f.jacobian(center)?;
    if lu_factor(&jac).is_err() {
        return Err(PairsError::SingularJacobian);
    }
    let sigma_min = *svd(&jac)?
        .sigma
        .last()
        .expect("non-empty spectrum");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_in_ball = |rng: &mut ChaCha8Rng| -> Vector {
        // Rejection sampling from the bounding cube; acceptance is ~0.52 in
        // three dimensions and worse but workable up to the sizes used here.
        loop {
            let offset: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..=radius)).collect();
            if offset.iter().map(|t| t * t).sum::<f64>() <= radius * radius {
                let mut x = center.clone();
                for (j, t) in offset.iter().enumerate() {
                    x[j] += t;
                }
                return x;
            }
        }
    };

    let mut alpha_hat = f64::INFINITY;
    for _ in 0..samples {
        let x = draw_in_ball(&mut rng);
        let y = draw_in_ball(&mut rng);
        let d = &x - &y;
        let dist2 = d.dot(&d);
        if dist2 == 0.0 {
            continue;
        }
        let ratio = (&f.eval(&x)? - &f.eval(&y)?).dot(&jac.apply(&d)) / dist2;
        alpha_hat = alpha_hat.min(ratio);
    }

    Ok(LocalStrongMonotonicityEstimate {
        center: center.clone(),
        radius,
        alpha_hat,
        samples,
        sigma_min,
        theoretical_floor: 0.5 * sigma_min * sigma_min,
        kernel: jac,
    })
}

fn check_same_square(a: &Mat, b: &Mat) -> Result<(), PairsError> {
    a.require_square().map_err(PairsError::Linalg)?;
    if a.shape() != b.shape() {
        return Err(PairsError::DimensionMismatch { left: a.shape(), right: b.shape() });
    }
    Ok(())
}
