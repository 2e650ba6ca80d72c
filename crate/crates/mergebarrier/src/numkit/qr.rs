//! Thin QR decomposition by Householder reflections.

use super::Matrix;
use crate::error::{Error, Result};

/// Decompose `a` (rows >= cols) into `q` (rows x cols, orthonormal columns)
/// and `r` (cols x cols, upper triangular) with `q * r = a`.
///
/// The diagonal of `r` is made non-negative by a final sign fix, so an
/// already-orthonormal input reproduces itself exactly (identity -> q = I,
/// r = I).
pub fn householder_qr(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Dimension(format!(
            "QR requires rows >= cols, got {m}x{n}"
        )));
    }

    // Accumulate reflections in-place on a working copy; reconstruct Q by
    // applying them to the first n columns of the identity.
    let mut r_work = a.clone();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n);

    for k in 0..n {
        // column k below the diagonal
        let mut norm_sq = 0.0;
        for i in k..m {
            let v = r_work.get(i, k);
            norm_sq += v * v;
        }
        let norm = norm_sq.sqrt();
        let x0 = r_work.get(k, k);
        let below_sq = norm_sq - x0 * x0;

        // already in triangular form for this column: no reflection needed
        if below_sq <= 0.0 && norm > 0.0 {
            vs.push(Vec::new());
            continue;
        }
        if norm == 0.0 {
            vs.push(Vec::new());
            continue;
        }

        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m - k];
        v[0] = x0 - alpha;
        for i in (k + 1)..m {
            v[i - k] = r_work.get(i, k);
        }
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_norm_sq == 0.0 {
            vs.push(Vec::new());
            continue;
        }

        // apply H = I - 2 v v^T / (v^T v) to the trailing block
        for j in k..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * r_work.get(i, j);
            }
            let f = 2.0 * dot / v_norm_sq;
            for i in k..m {
                let cur = r_work.get(i, j);
                r_work.set(i, j, cur - f * v[i - k]);
            }
        }
        vs.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the thin identity
    let mut q = Matrix::zeros(m, n);
    for j in 0..n {
        q.set(j, j, 1.0);
    }
    for k in (0..n).rev() {
        let v = &vs[k];
        if v.is_empty() {
            continue;
        }
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        for j in 0..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * q.get(i, j);
            }
            let f = 2.0 * dot / v_norm_sq;
            for i in k..m {
                let cur = q.get(i, j);
                q.set(i, j, cur - f * v[i - k]);
            }
        }
    }

    // zero below the diagonal and fix signs so diag(R) >= 0
    let mut r = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            r.set(i, j, r_work.get(i, j));
        }
    }
    for k in 0..n {
        if r.get(k, k) < 0.0 {
            for j in 0..n {
                r.set(k, j, -r.get(k, j));
            }
            for i in 0..m {
                q.set(i, k, -q.get(i, k));
            }
        }
    }

    Ok((q, r))
}
