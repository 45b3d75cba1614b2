//! Linear solves for the scheme systems.
//!
//! The projection form makes the matrices nonsymmetric, so the workhorse is
//! BiCGSTAB preconditioned with an ILU(0) factorization rebuilt per call
//! (the matrix changes every time step; the factorization cost stays
//! O(nnz)).  Small systems fall back to a dense LU when the iteration
//! fails.

use nalgebra::DVector;

use crate::{Error, Result};

use super::sparse::CsrMatrix;

/// Largest dimension for which the dense direct fallback is attempted.
const DIRECT_FALLBACK_MAX: usize = 30_000;

/// Solves `A x = b` to a relative residual of `tol` (true residual,
/// unpreconditioned).  Iteration is capped at `10 n`; on breakdown or
/// stagnation a dense LU fallback is used for dimensions up to 30000.
pub fn solve_linear(matrix: &CsrMatrix, rhs: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    let n = matrix.n_rows();
    assert_eq!(rhs.len(), n);
    let b_norm = rhs.norm();
    if b_norm == 0.0 {
        return Ok(DVector::zeros(n));
    }

    let ilu = Ilu0::factor(matrix);
    let iterative = match &ilu {
        Ok(precond) => bicgstab(matrix, rhs, precond, tol, 10 * n),
        Err(e) => Err(clone_solver_error(e)),
    };
    match iterative {
        Ok(x) => Ok(x),
        Err(err) => {
            if n <= DIRECT_FALLBACK_MAX {
                dense_solve(matrix, rhs).ok_or(err)
            } else {
                Err(err)
            }
        }
    }
}

fn clone_solver_error(e: &Error) -> Error {
    match e {
        Error::SolverDiverged {
            iterations,
            residual,
        } => Error::SolverDiverged {
            iterations: *iterations,
            residual: *residual,
        },
        _ => Error::SolverDiverged {
            iterations: 0,
            residual: f64::NAN,
        },
    }
}

fn dense_solve(matrix: &CsrMatrix, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let lu = matrix.to_dense().lu();
    let x = lu.solve(rhs)?;
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// ILU(0): incomplete LU on the matrix pattern, unit lower diagonal.
struct Ilu0 {
    values: Vec<f64>,
    /// Flat index of the diagonal entry of each row.
    diag: Vec<usize>,
}

impl Ilu0 {
    fn factor(matrix: &CsrMatrix) -> Result<Self> {
        let n = matrix.n_rows();
        let pattern = matrix.pattern();
        let mut values = matrix.values().to_vec();
        let mut diag = vec![usize::MAX; n];
        for row in 0..n {
            let range = pattern.row_range(row);
            match pattern.row_cols(row).binary_search(&(row as u32)) {
                Ok(k) => diag[row] = range.start + k,
                Err(_) => {
                    return Err(Error::SolverDiverged {
                        iterations: 0,
                        residual: f64::INFINITY,
                    })
                }
            }
        }

        for i in 0..n {
            let row_range = pattern.row_range(i);
            for kk in row_range.clone() {
                let k = pattern.row_cols(i)[kk - row_range.start] as usize;
                if k >= i {
                    break;
                }
                let pivot = values[diag[k]];
                if pivot.abs() < 1e-300 {
                    return Err(Error::SolverDiverged {
                        iterations: 0,
                        residual: f64::INFINITY,
                    });
                }
                let lik = values[kk] / pivot;
                values[kk] = lik;
                // Subtract lik * row k (upper part) from row i, on-pattern.
                let krange = pattern.row_range(k);
                let kcols = pattern.row_cols(k);
                let icols = pattern.row_cols(i);
                let mut ptr_i = kk - row_range.start + 1;
                for (offset, &col) in kcols.iter().enumerate() {
                    if (col as usize) <= k {
                        continue;
                    }
                    while ptr_i < icols.len() && icols[ptr_i] < col {
                        ptr_i += 1;
                    }
                    if ptr_i == icols.len() {
                        break;
                    }
                    if icols[ptr_i] == col {
                        values[row_range.start + ptr_i] -= lik * values[krange.start + offset];
                    }
                }
            }
            if values[diag[i]].abs() < 1e-300 {
                return Err(Error::SolverDiverged {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
        }
        Ok(Self { values, diag })
    }

    fn apply(&self, matrix: &CsrMatrix, r: &DVector<f64>, z: &mut DVector<f64>) {
        let n = matrix.n_rows();
        let pattern = matrix.pattern();
        // Forward solve L y = r (unit diagonal), stored into z.
        for i in 0..n {
            let range = pattern.row_range(i);
            let cols = pattern.row_cols(i);
            let mut acc = r[i];
            for (offset, &col) in cols.iter().enumerate() {
                let c = col as usize;
                if c >= i {
                    break;
                }
                acc -= self.values[range.start + offset] * z[c];
            }
            z[i] = acc;
        }
        // Backward solve U x = y.
        for i in (0..n).rev() {
            let range = pattern.row_range(i);
            let cols = pattern.row_cols(i);
            let mut acc = z[i];
            for (offset, &col) in cols.iter().enumerate().rev() {
                let c = col as usize;
                if c <= i {
                    break;
                }
                acc -= self.values[range.start + offset] * z[c];
            }
            z[i] = acc / self.values[self.diag[i]];
        }
    }
}

fn bicgstab(
    matrix: &CsrMatrix,
    b: &DVector<f64>,
    precond: &Ilu0,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let n = matrix.n_rows();
    let b_norm = b.norm();
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let r_hat = r.clone();
    let mut rho = r_hat.dot(&r);
    let mut p = r.clone();

    let mut p_hat = DVector::zeros(n);
    let mut s_hat = DVector::zeros(n);
    let mut v = DVector::zeros(n);
    let mut t = DVector::zeros(n);

    if r.norm() <= tol * b_norm {
        return Ok(x);
    }

    for iter in 0..max_iter {
        if rho.abs() < 1e-300 {
            return Err(Error::SolverDiverged {
                iterations: iter,
                residual: r.norm() / b_norm,
            });
        }
        precond.apply(matrix, &p, &mut p_hat);
        matrix.spmv(&p_hat, &mut v);
        let denom = r_hat.dot(&v);
        if denom.abs() < 1e-300 {
            return Err(Error::SolverDiverged {
                iterations: iter,
                residual: r.norm() / b_norm,
            });
        }
        let alpha = rho / denom;
        let s = &r - alpha * &v;
        if s.norm() <= tol * b_norm {
            x += alpha * &p_hat;
            return finish(matrix, b, x, tol);
        }
        precond.apply(matrix, &s, &mut s_hat);
        matrix.spmv(&s_hat, &mut t);
        let tt = t.dot(&t);
        if tt.abs() < 1e-300 {
            return Err(Error::SolverDiverged {
                iterations: iter,
                residual: s.norm() / b_norm,
            });
        }
        let omega = t.dot(&s) / tt;
        x += alpha * &p_hat + omega * &s_hat;
        r = &s - omega * &t;
        if r.norm() <= tol * b_norm {
            return finish(matrix, b, x, tol);
        }
        if omega.abs() < 1e-300 {
            return Err(Error::SolverDiverged {
                iterations: iter,
                residual: r.norm() / b_norm,
            });
        }
        let rho_next = r_hat.dot(&r);
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        p = &r + beta * (&p - omega * &v);
    }
    Err(Error::SolverDiverged {
        iterations: max_iter,
        residual: r.norm() / b_norm,
    })
}

/// Recomputes the true residual; guards against drift in the recurrence.
fn finish(
    matrix: &CsrMatrix,
    b: &DVector<f64>,
    x: DVector<f64>,
    tol: f64,
) -> Result<DVector<f64>> {
    let residual = (b - matrix.mul_vec(&x)).norm() / b.norm();
    if residual <= 10.0 * tol && x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::SolverDiverged {
            iterations: 0,
            residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::sparse::{block3_pattern, SparsityPattern};
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    #[test]
    fn identity_solve() {
        let pattern = Arc::new(block3_pattern(&[vec![0], vec![1]]));
        let mut m = CsrMatrix::zeros(pattern);
        for i in 0..6 {
            m.add_at(i, i, 1.0);
        }
        let b = DVector::from_fn(6, |i, _| i as f64 - 2.5);
        let x = solve_linear(&m, &b, 1e-12).unwrap();
        assert!((x - b).norm() < 1e-12);
    }

    #[test]
    fn random_spd_system_matches_dense_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 100;
        // Dense SPD matrix A = B B^T + n I stored sparsely (full pattern).
        let b_mat = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let a_dense = &b_mat * b_mat.transpose() + nalgebra::DMatrix::identity(n, n) * n as f64;
        let rows: Vec<Vec<usize>> = (0..n).map(|_| (0..n).collect()).collect();
        let pattern = Arc::new(SparsityPattern::from_rows(n, &rows));
        let mut a = CsrMatrix::zeros(pattern);
        for i in 0..n {
            for j in 0..n {
                a.add_at(i, j, a_dense[(i, j)]);
            }
        }
        let b = DVector::from_fn(n, |i, _| (i as f64 * 0.37).sin());
        let x = solve_linear(&a, &b, 1e-12).unwrap();
        // Independent dense factorization oracle.
        let x_oracle = a_dense.lu().solve(&b).unwrap();
        assert!((x - &x_oracle).norm() / x_oracle.norm() < 1e-8);
    }

    #[test]
    fn singular_matrix_fails_loudly() {
        // Zero row: no silent garbage allowed.
        let pattern = Arc::new(block3_pattern(&[vec![0]]));
        let mut m = CsrMatrix::zeros(pattern);
        m.add_at(0, 0, 1.0);
        m.add_at(1, 1, 1.0);
        // Row 2 stays zero.
        let b = DVector::from_element(3, 1.0);
        assert!(solve_linear(&m, &b, 1e-10).is_err());
    }

    #[test]
    fn nonsymmetric_system_converges() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 60;
        let rows: Vec<Vec<usize>> = (0..n).map(|_| (0..n).collect()).collect();
        let pattern = Arc::new(SparsityPattern::from_rows(n, &rows));
        let mut a = CsrMatrix::zeros(pattern);
        let mut dense = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j {
                    10.0 + rng.gen_range(0.0..1.0)
                } else {
                    rng.gen_range(-0.5..0.5)
                };
                a.add_at(i, j, v);
                dense[(i, j)] = v;
            }
        }
        let b = DVector::from_fn(n, |i, _| 1.0 + (i % 3) as f64);
        let x = solve_linear(&a, &b, 1e-11).unwrap();
        let res = (&b - dense * &x).norm() / b.norm();
        assert!(res < 1e-10, "residual {res}");
    }
}
