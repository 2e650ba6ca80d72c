//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Robust and simple: the per-head Gram matrices this crate needs are at
//! most 64x64, well inside the range where Jacobi is both fast enough and
//! accurate to machine precision.

use super::Matrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Result of `jacobi_eigh`: eigenvalues in descending order, eigenvectors as
/// the corresponding columns of an orthonormal matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    /// U * diag(eigenvalues) * U^T.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for i in 0..n {
            for j in 0..n {
                scaled.set(i, j, u.get(i, j) * self.eigenvalues[j]);
            }
        }
        scaled.matmul_transpose(u).unwrap()
    }
}

fn off_diagonal_norm(s: &Matrix) -> f64 {
    let n = s.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = s.get(i, j);
                acc += v * v;
            }
        }
    }
    acc.sqrt()
}

/// Eigendecompose a symmetric matrix. The input is symmetrized defensively
/// as (S + S^T)/2 before iteration; convergence threshold is
/// 1e-12 * ||S||_F over the off-diagonal norm, within 100 cyclic sweeps.
pub fn jacobi_eigh(s: &Matrix) -> Result<EigenDecomposition> {
    let (m, n) = s.shape();
    if m != n {
        return Err(Error::Dimension(format!(
            "eigendecomposition requires a square matrix, got {m}x{n}"
        )));
    }

    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (s.get(i, j) + s.get(j, i)));
    let mut v = Matrix::identity(n);
    let threshold = 1e-12 * a.frobenius_norm();

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // tangent of the rotation angle, smaller root for stability
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sn * akq);
                    a.set(k, q, sn * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - sn * aqk);
                    a.set(q, k, sn * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sn * vkq);
                    v.set(k, q, sn * vkp + c * vkq);
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::Convergence {
            residual: off_diagonal_norm(&a),
            sweeps: MAX_SWEEPS,
        });
    }

    // sort descending; ties keep first-occurrence order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors.set(i, new_j, v.get(i, old_j));
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::RngState;

    fn random_symmetric(n: usize, seed: u64) -> Matrix {
        let g = RngState::new(seed).gaussian_matrix(n, n);
        g.add(&g.transpose()).unwrap().scale(0.5)
    }

    #[test]
    fn identity_eigenvalues_are_ones() {
        let e = jacobi_eigh(&Matrix::identity(4)).unwrap();
        for v in &e.eigenvalues {
            assert!((v - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn diagonal_input() {
        let e = jacobi_eigh(&Matrix::diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        // eigenvectors: signed permutation of the identity
        for j in 0..2 {
            let col = e.eigenvectors.column(j);
            let big: Vec<f64> = col.iter().map(|v| v.abs()).collect();
            assert!((big[j] - 1.0).abs() <= 1e-14);
            assert!(big[1 - j] <= 1e-14);
        }
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let s = random_symmetric(6, 123);
        let e = jacobi_eigh(&s).unwrap();
        let recon = e.reconstruct();
        let err = recon.sub(&s).unwrap().frobenius_norm();
        assert!(err <= 1e-10 * (s.frobenius_norm() + 1.0), "err={err}");
        // orthonormality
        let u = &e.eigenvectors;
        let gram = u.transpose_matmul(u).unwrap();
        assert!(gram.sub(&Matrix::identity(6)).unwrap().max_abs() <= 1e-10);
        // descending order
        for w in e.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn psd_inputs_have_nonnegative_spectrum() {
        let g = RngState::new(55).gaussian_matrix(8, 4);
        let s = g.matmul_transpose(&g).unwrap(); // G G^T is PSD
        let e = jacobi_eigh(&s).unwrap();
        for v in &e.eigenvalues {
            assert!(*v >= -1e-10, "negative eigenvalue {v} on PSD input");
        }
    }

    #[test]
    fn zero_matrix_converges() {
        let e = jacobi_eigh(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn non_square_rejected() {
        assert!(jacobi_eigh(&Matrix::zeros(2, 3)).is_err());
    }
}
