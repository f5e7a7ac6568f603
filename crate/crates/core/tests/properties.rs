//! Seeded randomized property suites for the factorizations, the PSD
//! certificates, and the kernel constructions.

mod common;

use common::{
    random_matrix, random_rank_deficient, random_symmetric_rank_deficient, random_vector,
    seeded_rng,
};
use gippa_core::linalg::{lu_solve, min_sym_eigenvalue, svd, sym_eig, Mat, Vector};
use gippa_core::pairs::{
    certify_linear_pair, construct_kernel_factored, construct_kernel_symmetric, PairStatus,
};
use gippa_core::prelude::*;
use gippa_core::resolvent::{resolvent_affine, resolvent_nonlinear, InnerSolverConfig};
use rand::Rng;

#[test]
fn svd_reconstructs_200_random_matrices() {
    let mut rng = seeded_rng(0x5f5d_0001);
    for trial in 0..200 {
        let rows = rng.random_range(1..=8);
        let cols = rng.random_range(1..=8);
        let a = random_matrix(&mut rng, rows, cols);
        let d = svd(&a).unwrap();
        let recon = d.u.mul(&Mat::rect_diag(rows, cols, &d.sigma)).unwrap().mul(&d.vt).unwrap();
        let err = recon.sub(&a).unwrap().norm_max();
        assert!(err <= 1e-8 * a.norm_max().max(1.0), "trial {trial}: error {err}");
        for w in d.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(d.sigma.iter().all(|s| *s >= 0.0));
    }
}

#[test]
fn sym_eig_reconstructs_200_random_symmetric_matrices() {
    let mut rng = seeded_rng(0x5f5d_0002);
    for trial in 0..200 {
        let n = rng.random_range(1..=8);
        let raw = random_matrix(&mut rng, n, n);
        let a = raw.sym_part().unwrap();
        let d = sym_eig(&a).unwrap();
        let recon = d
            .eigenvectors
            .mul(&Mat::diag(&d.eigenvalues))
            .unwrap()
            .mul(&d.eigenvectors.transpose())
            .unwrap();
        let err = recon.sub(&a).unwrap().norm_max();
        assert!(err <= 1e-8 * a.norm_max().max(1.0), "trial {trial}: error {err}");
        let gram = d.eigenvectors.transpose().mul(&d.eigenvectors).unwrap();
        assert!(gram.sub(&Mat::identity(n)).unwrap().norm_max() <= 1e-10);
    }
}

#[test]
fn lu_solve_residuals_on_200_well_conditioned_systems() {
    let mut rng = seeded_rng(0x5f5d_0003);
    for trial in 0..200 {
        let n = rng.random_range(1..=8);
        // Diagonally dominated perturbation keeps the system well away from
        // singularity.
        let a = random_matrix(&mut rng, n, n)
            .add(&Mat::identity(n).scale(3.0 + n as f64))
            .unwrap();
        let rhs = random_vector(&mut rng, n);
        let x = lu_solve(&a, &rhs).unwrap();
        let residual = (&a.mul_vec(&x).unwrap() - &rhs).norm_inf();
        let bound = 1e-10 * (a.norm_max() * x.norm_inf()).max(1.0);
        assert!(residual <= bound, "trial {trial}: residual {residual} > {bound}");
    }
}

#[test]
fn min_sym_eigenvalue_sign_agrees_with_quadratic_form_sampling() {
    let mut rng = seeded_rng(0x5f5d_0004);
    for trial in 0..20 {
        let n = rng.random_range(2..=6);
        // Half the trials PSD (Gram matrices), half indefinite.
        let a = if trial % 2 == 0 {
            let m = random_matrix(&mut rng, n, n);
            m.transpose().mul(&m).unwrap()
        } else {
            let mut m = random_matrix(&mut rng, n, n).sym_part().unwrap();
            m[(0, 0)] -= 2.0;
            m
        };
        let lambda_min = min_sym_eigenvalue(&a).unwrap();
        let mut sampled_min = f64::INFINITY;
        for _ in 0..1000 {
            let z = random_vector(&mut rng, n);
            let norm2 = z.dot(&z);
            if norm2 == 0.0 {
                continue;
            }
            sampled_min = sampled_min.min(a.mul_vec(&z).unwrap().dot(&z) / norm2);
        }
        if lambda_min >= 0.0 {
            assert!(
                sampled_min >= -1e-8,
                "trial {trial}: PSD matrix produced negative form {sampled_min}"
            );
        } else {
            // Sampling can only overshoot the true minimum.
            assert!(sampled_min >= lambda_min - 1e-8, "trial {trial}");
        }
        // The eigenvector realizes the minimum exactly.
        let d = sym_eig(&a.sym_part().unwrap()).unwrap();
        let mut z_min = Vector::zeros(n);
        for i in 0..n {
            z_min[i] = d.eigenvectors[(i, n - 1)];
        }
        let form = a.mul_vec(&z_min).unwrap().dot(&z_min);
        assert!((form - lambda_min).abs() <= 1e-8 * lambda_min.abs().max(1.0));
    }
}

#[test]
fn factored_construction_property_suite() {
    let mut rng = seeded_rng(0x5f5d_0005);
    for trial in 0..100 {
        let n = rng.random_range(2..=8);
        let r = rng.random_range(1..n);
        let a = random_rank_deficient(&mut rng, n, r);
        let kernel = construct_kernel_factored(&a).unwrap();
        let det = kernel.matrix().determinant().unwrap();
        assert!(det.abs() > 1e-10, "trial {trial}: kernel not invertible (det {det})");
        let cert = certify_linear_pair(&a, kernel.matrix()).unwrap();
        let scale = a.transpose().mul(kernel.matrix()).unwrap().norm_max();
        assert!(
            cert.lambda_min >= -1e-8 * scale.max(1.0),
            "trial {trial}: lambda_min {} below tolerance",
            cert.lambda_min
        );
        assert!(!matches!(cert.status, PairStatus::NotMonotone { .. }));

        // Structural identity: AᵀB = V (Σ Σ') Vᵀ.
        let d = svd(&a).unwrap();
        let smax = d.sigma[0];
        let tau = 1e-10 * smax.max(1.0);
        let prod_sigma: Vec<f64> =
            d.sigma.iter().map(|&s| if s <= tau { 0.0 } else { s * s }).collect();
        let expected = d.vt.transpose().mul(&Mat::diag(&prod_sigma)).unwrap().mul(&d.vt).unwrap();
        let actual = a.transpose().mul(kernel.matrix()).unwrap();
        let err = actual.sub(&expected).unwrap().norm_max();
        assert!(
            err <= 1e-8 * (a.norm_max() * a.norm_max()).max(1.0),
            "trial {trial}: factored identity error {err}"
        );
    }
}

#[test]
fn symmetric_construction_property_suite() {
    let mut rng = seeded_rng(0x5f5d_0006);
    for trial in 0..100 {
        let n = rng.random_range(2..=8);
        let r = rng.random_range(1..n);
        let a = random_symmetric_rank_deficient(&mut rng, n, r);
        let kernel = construct_kernel_symmetric(&a).unwrap();
        let det = kernel.matrix().determinant().unwrap();
        assert!(det.abs() > 1e-10, "trial {trial}: kernel not invertible (det {det})");
        let cert = certify_linear_pair(&a, kernel.matrix()).unwrap();
        let scale = a.transpose().mul(kernel.matrix()).unwrap().norm_max();
        assert!(
            cert.lambda_min >= -1e-8 * scale.max(1.0),
            "trial {trial}: lambda_min {}",
            cert.lambda_min
        );
        assert!(!matches!(cert.status, PairStatus::NotMonotone { .. }));
    }
}

#[test]
fn nonlinear_resolvent_agrees_with_affine_on_100_random_instances() {
    let mut rng = seeded_rng(0x5f5d_0007);
    let cfg = InnerSolverConfig::default();
    for trial in 0..100 {
        let n = rng.random_range(1..=5);
        let m = random_matrix(&mut rng, n, n);
        let c = random_vector(&mut rng, n);
        // Kernel chosen positive definite so γM + B stays comfortably
        // invertible for the sampled γ.
        let raw = random_matrix(&mut rng, n, n);
        let kernel = raw
            .transpose()
            .mul(&raw)
            .unwrap()
            .add(&Mat::identity(n).scale(1.0 + n as f64))
            .unwrap();
        let gamma = rng.random_range(0.05..0.5);
        let y = random_vector(&mut rng, n);

        let m2 = m.clone();
        let c2 = c.clone();
        let f = NonlinearOperator::new(n, move |x: &Vector| {
            &m2.mul_vec(x).unwrap() - &c2
        });
        let via_newton = resolvent_nonlinear(&f, &kernel, gamma, &y, &cfg, &y).unwrap();
        let direct = resolvent_affine(&m, &c, &kernel, gamma, &y).unwrap();
        assert!(
            (&via_newton - &direct).norm_inf() < 1e-10,
            "trial {trial}: disagreement {}",
            (&via_newton - &direct).norm_inf()
        );
    }
}

#[test]
fn certificate_soundness_for_refuted_linear_pairs() {
    let mut rng = seeded_rng(0x5f5d_0008);
    let mut refutations = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let a = random_matrix(&mut rng, n, n);
        let b = random_matrix(&mut rng, n, n);
        let cert = certify_linear_pair(&a, &b).unwrap();
        if let PairStatus::NotMonotone { x, y } = &cert.status {
            refutations += 1;
            let d = x - y;
            let form = a.mul_vec(&d).unwrap().dot(&b.mul_vec(&d).unwrap());
            assert!(form < 0.0, "stored witness fails to reproduce a negative form");
        }
    }
    // Random pairs are overwhelmingly not monotone; the loop must have
    // exercised the witness path.
    assert!(refutations > 100, "only {refutations} refutations in 200 draws");
}
