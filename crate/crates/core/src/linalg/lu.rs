//! LU factorization with partial pivoting.

use super::{LinalgError, Mat, Vector, ABS_TOL_FLOOR, PIVOT_REL_TOL};

/// Packed LU factors of a square matrix, `PA = LU`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Mat,
    perm: Vec<usize>,
    sign: f64,
}

/// Factor a square matrix. Fails with `SingularMatrix` when any pivot
/// magnitude falls at or below `max(PIVOT_REL_TOL · ‖A‖_max, ABS_TOL_FLOOR)`,
/// which operationalizes "not injective" for the solvers built on top.
pub fn lu_factor(a: &Mat) -> Result<LuFactors, LinalgError> {
    a.require_square()?;
    a.require_finite()?;
    let n = a.rows();
    let threshold = (PIVOT_REL_TOL * a.norm_max()).max(ABS_TOL_FLOOR);

    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= threshold {
            return Err(LinalgError::SingularMatrix);
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                lu[(i, j)] -= factor * lu[(k, j)];
            }
        }
    }

    Ok(LuFactors { lu, perm, sign })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solve `Ax = rhs` from the stored factors.
    pub fn solve(&self, rhs: &Vector) -> Result<Vector, LinalgError> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(LinalgError::DimensionMismatch {
                left: (n, n),
                right: (rhs.len(), 1),
            });
        }
        // Forward substitution on the permuted rhs.
        let mut x = Vector::zeros(n);
        for i in 0..n {
            let mut sum = rhs[self.perm[i]];
            for j in 0..i {
                sum -= self.lu[(i, j)] * x[j];
            }
            x[i] = sum;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut sum = x[i];
            for j in (i + 1)..n {
                sum -= self.lu[(i, j)] * x[j];
            }
            x[i] = sum / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        d
    }
}

/// Solve `Ax = rhs` with partial pivoting.
pub fn lu_solve(a: &Mat, rhs: &Vector) -> Result<Vector, LinalgError> {
    lu_factor(a)?.solve(rhs)
}

/// Determinant via elimination, tolerating tiny pivots so that singular
/// inputs produce a value that is zero up to rounding.
pub(crate) fn determinant_impl(a: &Mat) -> f64 {
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut best = m[(k, k)].abs();
        for i in (k + 1)..n {
            let v = m[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            det = -det;
        }
        let pivot = m[(k, k)];
        det *= pivot;
        for i in (k + 1)..n {
            let factor = m[(i, k)] / pivot;
            for j in (k + 1)..n {
                m[(i, j)] -= factor * m[(k, j)];
            }
        }
    }
    det
}
