//! Solvers for inclusion problems `0 ∈ F(x)` where `F` need not be monotone.
//!
//! The classical proximal point method requires `F` monotone. This crate
//! instead pairs `F` with an auxiliary *linear kernel* `v(x) = Bx` chosen so
//! that the pair `(F, v)` is monotone, i.e. `⟨F(x) − F(y), v(x) − v(y)⟩ ≥ 0`,
//! and iterates with the *warped resolvent* `(γF + v)⁻¹ ∘ v` in place of the
//! usual resolvent. Fixed points of the warped resolvent are exactly the
//! zeros of `F`, so the machinery of proximal iterations carries over even
//! when `F` itself is indefinite or its Jacobian is singular.
//!
//! The crate provides:
//!
//! * [`linalg`] — self-contained dense linear algebra (LU solves, Jacobi
//!   eigendecomposition, one-sided Jacobi SVD) sized for small problems.
//! * [`operators`] — affine and nonlinear operator representations with
//!   finite-difference Jacobians, and the [`operators::KernelSpec`] type.
//! * [`pairs`] — certify or refute pair monotonicity, and construct kernels
//!   that make a given matrix part of a monotone pair.
//! * [`resolvent`] — warped resolvent evaluation for affine and nonlinear
//!   operators (inner damped Newton solver for the latter).
//! * [`solvers`] — the inertial outer iteration ([`solvers::gippa_run`]),
//!   its zero-inertia and identity-kernel specializations, and the
//!   quasi-Newton / Newton iterations built on a frozen kernel.
//! * [`diagnostics`] — iterate traces, convergence-rate fits, and numeric
//!   verification of the per-iteration inequalities the convergence theory
//!   guarantees.
//! * [`problems`] — the built-in benchmark problems used by the CLI.
//!
//! # Example
//!
//! ```
//! use gippa_core::prelude::*;
//!
//! // A rank-deficient, non-monotone affine problem: the inertial iteration
//! // drives the residual to zero even though plain Newton has no chance.
//! let f = problems::example1_operator();
//! let kernel = problems::example1_kernel_v1();
//! let cfg = SolverConfig {
//!     gamma: Schedule::OffsetInverse { base: 0.1, scale: 0.3, offset: 10.0 },
//!     alpha: Schedule::CappedRamp { cap: 0.3, offset: 10.0 },
//!     x0: Vector::from_slice(&[-0.5, -0.5, -0.5]),
//!     x1: Vector::from_slice(&[0.7, 0.7, 0.7]),
//!     ..SolverConfig::default_for(3)
//! };
//! let trace = gippa_run(&OperatorSpec::Affine(f), &kernel, &cfg).unwrap();
//! assert!(trace.records.last().unwrap().residual < 1e-6);
//! ```

pub mod diagnostics;
pub mod linalg;
pub mod operators;
pub mod pairs;
pub mod problems;
pub mod resolvent;
pub mod solvers;

pub use diagnostics::{IterateRecord, IterateTrace, TerminationReason};
pub use linalg::{Mat, Vector};
pub use operators::{AffineOperator, KernelSpec, NonlinearOperator, OperatorSpec};
pub use pairs::{PairCertificate, PairStatus};
pub use solvers::{gippa_run, newton_run, quasi_newton_run, Schedule, SolverConfig};

/// Convenience re-exports for downstream code.
pub mod prelude {
    pub use crate::diagnostics::{
        check_contraction, check_lemma41, check_summability, estimate_linear_rate, IterateTrace,
        TerminationReason,
    };
    pub use crate::linalg::{Mat, Vector};
    pub use crate::operators::{AffineOperator, KernelSpec, NonlinearOperator, OperatorSpec};
    pub use crate::pairs::{
        certify_linear_pair, certify_nonlinear_pair_sampled, construct_kernel_factored,
        construct_kernel_perturbation, construct_kernel_symmetric,
        estimate_local_strong_monotonicity, PairCertificate, PairStatus,
    };
    pub use crate::problems;
    pub use crate::resolvent::{fixed_point_residual, warped_resolvent, InnerSolverConfig};
    pub use crate::solvers::{
        gippa_run, newton_run, quasi_newton_run, validate_schedules, QuasiNewtonConfig, Schedule,
        SolverConfig,
    };
}
