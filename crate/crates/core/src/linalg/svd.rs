//! Singular value decomposition via one-sided Jacobi rotations.

use super::{LinalgError, Mat, JACOBI_OFF_DIAG_REL_TOL, JACOBI_SWEEP_CAP};

/// Decomposition `A = U · diag(σ) · Vᵀ` with `U`, `Vᵀ` orthogonal and the
/// singular values sorted descending.
#[derive(Debug, Clone)]
pub struct SvdDecomp {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub vt: Mat,
}

/// One-sided Jacobi SVD.
///
/// Columns of a working copy of `A` are rotated pairwise until mutually
/// orthogonal; singular values are then the column norms and `U` is the
/// normalized column set, completed to a full orthogonal basis when the
/// matrix is rank deficient.
pub fn svd(a: &Mat) -> Result<SvdDecomp, LinalgError> {
    a.require_finite()?;
    if a.rows() < a.cols() {
        // Work on the transpose and swap the factors back.
        let d = svd(&a.transpose())?;
        return Ok(SvdDecomp {
            u: d.vt.transpose(),
            sigma: d.sigma,
            vt: d.u.transpose(),
        });
    }

    let m = a.rows();
    let n = a.cols();
    let mut w = a.clone();
    let mut v = Mat::identity(n);
    let scale = a.norm_fro();
    // Column pair (p,q) counts as orthogonal when |⟨w_p, w_q⟩| falls at or
    // below the relative threshold; the ‖A‖_F² floor covers zero columns.
    let pair_tol = JACOBI_OFF_DIAG_REL_TOL;

    let mut converged = n < 2;
    for _sweep in 0..JACOBI_SWEEP_CAP {
        if converged {
            break;
        }
        converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    app += w[(i, p)] * w[(i, p)];
                    aqq += w[(i, q)] * w[(i, q)];
                    apq += w[(i, p)] * w[(i, q)];
                }
                if apq.abs() <= pair_tol * (app * aqq).sqrt().max(scale * scale * 1e-300) {
                    continue;
                }
                converged = false;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let wip = w[(i, p)];
                    let wiq = w[(i, q)];
                    w[(i, p)] = c * wip - s * wiq;
                    w[(i, q)] = s * wip + c * wiq;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: JACOBI_SWEEP_CAP });
    }

    // Column norms are the singular values; sort descending, ties stable.
    let mut sigma: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)] * w[(i, j)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    sigma = order.iter().map(|&j| sigma[j]).collect();

    let mut vt = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vt[(dst, r)] = v[(r, src)];
        }
    }

    // Normalize the nonzero columns into U, then complete the basis.
    let mut u = Mat::zeros(m, m);
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let rank_tol = 1e-12 * sigma_max.max(1e-300);
    let mut filled = 0;
    for (dst, &src) in order.iter().enumerate() {
        if sigma[dst] > rank_tol {
            for i in 0..m {
                u[(i, dst)] = w[(i, src)] / sigma[dst];
            }
            filled = dst + 1;
        }
    }
    complete_orthonormal_basis(&mut u, filled);

    Ok(SvdDecomp { u, sigma, vt })
}

/// Fill columns `filled..` of `u` with unit vectors orthogonal to the ones
/// already present. For each slot the standard basis vector with the largest
/// residual after Gram-Schmidt is taken (ties broken by index), which is
/// deterministic and always succeeds while `filled < m`.
fn complete_orthonormal_basis(u: &mut Mat, filled: usize) {
    let m = u.rows();
    for have in filled..m {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for candidate in 0..m {
            let mut col = vec![0.0; m];
            col[candidate] = 1.0;
            // Two orthogonalization passes for numerical safety.
            for _ in 0..2 {
                for j in 0..have {
                    let dot: f64 = (0..m).map(|i| col[i] * u[(i, j)]).sum();
                    for (i, c) in col.iter_mut().enumerate() {
                        *c -= dot * u[(i, j)];
                    }
                }
            }
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, col));
            }
        }
        let (norm, col) = best.expect("m > 0");
        assert!(norm > 0.0, "basis completion found no independent direction");
        for (i, c) in col.iter().enumerate() {
            u[(i, have)] = c / norm;
        }
    }
}
