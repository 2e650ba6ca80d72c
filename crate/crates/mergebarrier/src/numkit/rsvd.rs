//! Randomized SVD: random projection, one power iteration, QR, small
//! eigenproblem, lift back. Cuts the O(n^3) eigendecomposition down to
//! O(n^2 k + n k^2 + k^3) for the low-rank weight matrices it targets.

use super::{householder_qr, jacobi_eigh, Matrix, RngState};
use crate::error::{Error, Result};

/// Rank-k randomized SVD of `a`: returns (u, sigma, v) with k orthonormal
/// columns each and non-negative singular values in descending order.
///
/// The Gaussian test matrix is drawn column-by-column from per-column
/// substreams of `rng`, so enlarging k (or the oversample) extends the
/// sampled subspace instead of reshuffling it — approximation error is
/// monotone in k for a fixed seed.
pub fn rsvd(
    a: &Matrix,
    k: usize,
    oversample: usize,
    rng: &RngState,
) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let (m, n) = a.shape();
    let max_rank = m.min(n);
    if k == 0 || k > max_rank {
        return Err(Error::Parameter(format!(
            "rsvd rank {k} out of range 1..={max_rank} for a {m}x{n} matrix"
        )));
    }
    let l = (k + oversample).min(max_rank);

    // test matrix, one substream per column
    let mut omega = Matrix::zeros(n, l);
    for j in 0..l {
        let mut col_rng = rng.derive_index(j as u64);
        for i in 0..n {
            omega.set(i, j, col_rng.gaussian());
        }
    }

    // sample the range, sharpen with one power iteration: Y = A (A^T (A Omega))
    let y0 = a.matmul(&omega)?;
    let y = a.matmul(&a.transpose_matmul(&y0)?)?;
    let (q, _) = householder_qr(&y)?;

    // small problem: B = Q^T A (l x n); eigendecompose B B^T (l x l)
    let b = q.transpose_matmul(a)?;
    let bbt = b.matmul_transpose(&b)?;
    let eig = jacobi_eigh(&bbt)?;

    let mut u = Matrix::zeros(m, k);
    let mut sigma = Vec::with_capacity(k);
    let mut v = Matrix::zeros(n, k);

    let qw = q.matmul(&eig.eigenvectors)?; // m x l
    let btw = b.transpose_matmul(&eig.eigenvectors)?; // n x l

    let tol = 1e-12 * a.frobenius_norm().max(1.0);
    for j in 0..k {
        let s = eig.eigenvalues[j].max(0.0).sqrt();
        sigma.push(s);
        for i in 0..m {
            u.set(i, j, qw.get(i, j));
        }
        if s > tol {
            for i in 0..n {
                v.set(i, j, btw.get(i, j) / s);
            }
        } else {
            // null singular value: complete v with a deterministic unit
            // vector orthogonal to the columns already placed
            let col = orthonormal_completion(&v, j, n);
            for i in 0..n {
                v.set(i, j, col[i]);
            }
        }
    }

    Ok((u, sigma, v))
}

/// First canonical basis vector with a nonzero residual after projecting out
/// columns 0..filled of `basis`, normalized.
fn orthonormal_completion(basis: &Matrix, filled: usize, dim: usize) -> Vec<f64> {
    for e in 0..dim {
        let mut cand = vec![0.0; dim];
        cand[e] = 1.0;
        for j in 0..filled {
            let dot: f64 = (0..dim).map(|i| cand[i] * basis.get(i, j)).sum();
            for i in 0..dim {
                cand[i] -= dot * basis.get(i, j);
            }
        }
        let norm: f64 = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for c in &mut cand {
                *c /= norm;
            }
            return cand;
        }
    }
    // filled == dim can never reach here; fall back to e_0
    let mut cand = vec![0.0; dim];
    cand[0] = 1.0;
    cand
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruction_error(a: &Matrix, u: &Matrix, sigma: &[f64], v: &Matrix) -> f64 {
        let mut us = u.clone();
        for j in 0..sigma.len() {
            for i in 0..u.rows() {
                us.set(i, j, u.get(i, j) * sigma[j]);
            }
        }
        let recon = us.matmul_transpose(v).unwrap();
        a.sub(&recon).unwrap().frobenius_norm()
    }

    #[test]
    fn exact_on_rank_two_input() {
        // rank-2 matrix from two outer products
        let mut rng = RngState::new(17);
        let x1 = rng.gaussian_matrix(9, 1);
        let y1 = rng.gaussian_matrix(6, 1);
        let x2 = rng.gaussian_matrix(9, 1);
        let y2 = rng.gaussian_matrix(6, 1);
        let a = x1
            .matmul_transpose(&y1)
            .unwrap()
            .add(&x2.matmul_transpose(&y2).unwrap())
            .unwrap();

        let (u, sigma, v) = rsvd(&a, 2, 8, &RngState::new(3)).unwrap();
        let err = reconstruction_error(&a, &u, &sigma, &v);
        assert!(err <= 1e-8 * a.frobenius_norm(), "err={err}");
    }

    #[test]
    fn zero_matrix_gives_zero_spectrum() {
        let a = Matrix::zeros(5, 4);
        let (u, sigma, v) = rsvd(&a, 3, 2, &RngState::new(1)).unwrap();
        assert!(sigma.iter().all(|s| *s == 0.0));
        // factors stay orthonormal even with a null spectrum
        let uu = u.transpose_matmul(&u).unwrap();
        let vv = v.transpose_matmul(&v).unwrap();
        assert!(uu.sub(&Matrix::identity(3)).unwrap().max_abs() <= 1e-10);
        assert!(vv.sub(&Matrix::identity(3)).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn psd_spectrum_matches_jacobi() {
        // symmetric PSD 12x12 of rank 3
        let g = RngState::new(71).gaussian_matrix(12, 3);
        let s = g.matmul_transpose(&g).unwrap();
        let (_, sigma, _) = rsvd(&s, 3, 8, &RngState::new(4)).unwrap();
        let eig = jacobi_eigh(&s).unwrap();
        for j in 0..3 {
            assert!(
                (sigma[j] - eig.eigenvalues[j]).abs() <= 1e-6 * eig.eigenvalues[0].max(1.0),
                "singular value {j}: {} vs eigenvalue {}",
                sigma[j],
                eig.eigenvalues[j]
            );
        }
    }

    #[test]
    fn error_is_monotone_in_rank() {
        let a = RngState::new(99).gaussian_matrix(10, 8);
        let rng = RngState::new(5);
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let (u, sigma, v) = rsvd(&a, k, 4, &rng).unwrap();
            let err = reconstruction_error(&a, &u, &sigma, &v);
            assert!(
                err <= prev + 1e-12,
                "error increased at k={k}: {err} > {prev}"
            );
            prev = err;
        }
    }

    #[test]
    fn rank_out_of_range_rejected() {
        let a = Matrix::zeros(4, 3);
        assert!(rsvd(&a, 0, 2, &RngState::new(1)).is_err());
        assert!(rsvd(&a, 4, 2, &RngState::new(1)).is_err());
    }

    #[test]
    fn descending_singular_values() {
        let a = RngState::new(12).gaussian_matrix(7, 7);
        let (_, sigma, _) = rsvd(&a, 5, 2, &RngState::new(2)).unwrap();
        for w in sigma.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }
}
