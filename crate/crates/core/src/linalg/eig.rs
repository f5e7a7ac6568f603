//! Symmetric eigendecomposition via cyclic Jacobi rotations.

use super::{
    LinalgError, Mat, ABS_TOL_FLOOR, JACOBI_OFF_DIAG_REL_TOL, JACOBI_SWEEP_CAP,
};

/// Eigendecomposition `A = O · diag(λ) · Oᵀ` of a symmetric matrix.
///
/// Eigenvalues are sorted descending, ties keeping their original order;
/// `eigenvectors` holds the paired orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

/// Decompose a symmetric matrix by cyclic Jacobi rotations.
///
/// The input may deviate from exact symmetry by up to
/// `1e-10 · ‖A‖_max`; it is symmetrized before iterating. Rotations run
/// until every off-diagonal is at most `JACOBI_OFF_DIAG_REL_TOL · ‖A‖_F`
/// or the sweep cap is hit.
pub fn sym_eig(a: &Mat) -> Result<EigDecomp, LinalgError> {
    a.require_square()?;
    a.require_finite()?;
    let asym = a.asymmetry()?;
    if asym > (1e-10 * a.norm_max()).max(ABS_TOL_FLOOR) {
        return Err(LinalgError::NotSymmetric { asym });
    }

    let n = a.rows();
    let mut m = a.sym_part()?;
    let mut o = Mat::identity(n);
    let threshold = JACOBI_OFF_DIAG_REL_TOL * m.norm_fro();

    let mut converged = n < 2;
    for _sweep in 0..JACOBI_SWEEP_CAP {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[(p, q)].abs() <= threshold {
                    continue;
                }
                let (c, s) = symmetric_rotation(m[(p, p)], m[(q, q)], m[(p, q)]);
                apply_two_sided(&mut m, p, q, c, s);
                apply_right(&mut o, p, q, c, s);
            }
        }
        converged = max_off_diagonal(&m) <= threshold;
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: JACOBI_SWEEP_CAP });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(m[(src, src)]);
        for r in 0..n {
            eigenvectors[(r, dst)] = o[(r, src)];
        }
    }
    Ok(EigDecomp { eigenvalues, eigenvectors })
}

/// Smallest eigenvalue of the symmetric part `(A + Aᵀ)/2`.
///
/// Nonnegative exactly when the quadratic form `zᵀAz` is nonnegative, which
/// is the computational test for monotonicity of a linear map.
pub fn min_sym_eigenvalue(a: &Mat) -> Result<f64, LinalgError> {
    let decomp = sym_eig(&a.sym_part()?)?;
    Ok(*decomp.eigenvalues.last().expect("non-empty spectrum"))
}

/// Jacobi rotation annihilating the (p,q) entry of a symmetric 2x2 block.
fn symmetric_rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

/// `M ← Jᵀ M J` for the rotation J acting on the (p,q) plane.
fn apply_two_sided(m: &mut Mat, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    // Clamp the annihilated pair to keep symmetry exact.
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
}

/// `O ← O J`, accumulating eigenvectors.
fn apply_right(o: &mut Mat, p: usize, q: usize, c: f64, s: f64) {
    let n = o.rows();
    for k in 0..n {
        let okp = o[(k, p)];
        let okq = o[(k, q)];
        o[(k, p)] = c * okp - s * okq;
        o[(k, q)] = s * okp + c * okq;
    }
}

fn max_off_diagonal(m: &Mat) -> f64 {
    let n = m.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max(m[(i, j)].abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::super::Vector;
    use super::*;

    fn reconstruct(d: &EigDecomp) -> Mat {
        let lam = Mat::diag(&d.eigenvalues);
        d.eigenvectors
            .mul(&lam)
            .unwrap()
            .mul(&d.eigenvectors.transpose())
            .unwrap()
    }

    #[test]
    fn already_diagonal() {
        let d = sym_eig(&Mat::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(d.eigenvectors, Mat::identity(2));
    }

    #[test]
    fn symmetry_forced_spectrum() {
        let a = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let d = sym_eig(&a).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((d.eigenvalues[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_matrix_eigenvalues_match_characteristic_polynomial_roots() {
        // Oracle: the roots of det(AᵀA − λI) computed from the cubic's
        // closed form. AᵀA is rank 2, so one root is zero and the others
        // solve λ² − tr·λ + m2 = 0 with m2 the sum of principal 2x2 minors.
        let a = Mat::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ]);
        let g = a.transpose().mul(&a).unwrap();
        let tr = g[(0, 0)] + g[(1, 1)] + g[(2, 2)];
        let m2 = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)])
            + (g[(0, 0)] * g[(2, 2)] - g[(0, 2)] * g[(2, 0)])
            + (g[(1, 1)] * g[(2, 2)] - g[(1, 2)] * g[(2, 1)]);
        let disc = (tr * tr - 4.0 * m2).sqrt();
        let mut oracle = [0.5 * (tr + disc), 0.5 * (tr - disc), 0.0];
        oracle.sort_by(|x, y| y.partial_cmp(x).unwrap());

        let d = sym_eig(&g).unwrap();
        for (got, want) in d.eigenvalues.iter().zip(oracle.iter()) {
            assert!((got - want).abs() <= 1e-8 * tr.max(1.0), "{got} vs {want}");
        }
        assert!(reconstruct(&d).sub(&g).unwrap().norm_max() <= 1e-8 * g.norm_max().max(1.0));
    }

    #[test]
    fn orthogonality_invariant() {
        let a = Mat::from_rows(&[
            vec![2.0, -1.0, 0.5],
            vec![-1.0, 3.0, 1.0],
            vec![0.5, 1.0, -2.0],
        ]);
        let d = sym_eig(&a).unwrap();
        let gram = d.eigenvectors.transpose().mul(&d.eigenvectors).unwrap();
        assert!(gram.sub(&Mat::identity(3)).unwrap().norm_max() <= 1e-10);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let a = Mat::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]);
        assert!(matches!(sym_eig(&a), Err(LinalgError::NotSymmetric { .. })));
    }

    #[test]
    fn min_sym_eigenvalue_examples() {
        assert!((min_sym_eigenvalue(&Mat::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        // Symmetric part of [[0,2],[0,0]] is [[0,1],[1,0]] with spectrum ±1.
        let a = Mat::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]);
        assert!((min_sym_eigenvalue(&a).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn indefinite_product_detected_by_witness() {
        // Direct arithmetic oracle: z = (99.99, -200, 100) makes
        // ⟨Az, (A + e11)z⟩ negative, so λ_min(sym(Aᵀ(A + e11))) must be too.
        let a = Mat::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ]);
        let mut b2 = a.clone();
        b2[(0, 0)] += 1.0;
        let z = Vector::from_slice(&[99.99, -200.0, 100.0]);
        let form = a.mul_vec(&z).unwrap().dot(&b2.mul_vec(&z).unwrap());
        assert!(form < 0.0, "oracle form = {form}");
        assert!((form + 0.9933).abs() < 1e-8);

        let product = a.transpose().mul(&b2).unwrap();
        assert!(min_sym_eigenvalue(&product).unwrap() < 0.0);
    }
}
