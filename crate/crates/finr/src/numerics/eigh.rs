//! Symmetric eigendecomposition by the cyclic Jacobi method.
//!
//! Gram matrices here are at most a few hundred rows, where Jacobi's
//! simplicity and its orthogonality guarantees beat anything fancier.

use crate::error::{FinrError, Result};
use crate::numerics::mat::Mat;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (descending) and orthonormal eigenvector columns of a
/// symmetric matrix. Rejects non-square or asymmetric input
/// (|a_ij - a_ji| > 1e-10 * max(1, max|a|)).
pub fn eigh(sym: &Mat) -> Result<(Vec<f64>, Mat)> {
    let n = sym.rows();
    if sym.cols() != n {
        return Err(FinrError::invalid("eigh requires a square matrix"));
    }
    let scale = sym.max_abs().max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (sym.get(i, j) - sym.get(j, i)).abs() > 1e-10 * scale {
                return Err(FinrError::invalid(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }

    let mut a = sym.clone();
    // Symmetrize exactly so rotations cancel off-diagonals in one shot.
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, m);
            a.set(j, i, m);
        }
    }
    let mut v = Mat::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= 1e-14 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = Mat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, col, v.get(k, src));
        }
    }
    Ok((eigenvalues, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::Rng;

    fn random_symmetric(n: usize, seed: u64) -> Mat {
        let mut rng = Rng::from_seed(seed);
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.normal(0.0, 1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let (vals, _) = eigh(&Mat::identity(3)).unwrap();
        for v in vals {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_sorted_descending() {
        let m = Mat::from_vec(3, 3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        let (vals, _) = eigh(&m).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_is_rejected() {
        let m = Mat::from_vec(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(eigh(&m).is_err());
    }

    // Oracle: the decomposition must reconstruct A = V diag(l) V^T and V
    // must be orthonormal.
    fn check_reconstruction(a: &Mat, tol: f64) {
        let (vals, v) = eigh(a).unwrap();
        let n = a.rows();
        let mut lam = Mat::zeros(n, n);
        for i in 0..n {
            lam.set(i, i, vals[i]);
        }
        let recon = v.matmul(&lam).unwrap().matmul(&v.transpose()).unwrap();
        let mut err: f64 = 0.0;
        for (x, y) in recon.data().iter().zip(a.data()) {
            err = err.max((x - y).abs());
        }
        assert!(err < tol, "reconstruction error {err}");

        let vtv = v.matmul_transa(&v).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (vtv.get(i, j) - expect).abs() < 1e-8,
                    "orthonormality ({i},{j})"
                );
            }
        }
        // residual ||A v - lambda v||
        for k in 0..n {
            let col: Vec<f64> = (0..n).map(|i| v.get(i, k)).collect();
            let av = a.matvec(&col).unwrap();
            let mut r: f64 = 0.0;
            for i in 0..n {
                r = r.max((av[i] - vals[k] * col[i]).abs());
            }
            assert!(r <= 1e-8 * a.max_abs().max(1.0), "residual {r} for k={k}");
        }
    }

    #[test]
    fn random_8x8_reconstructs() {
        check_reconstruction(&random_symmetric(8, 17), 1e-9);
    }

    #[test]
    fn random_64x64_reconstructs() {
        check_reconstruction(&random_symmetric(64, 5), 1e-8);
    }

    #[test]
    fn random_256x256_reconstructs() {
        check_reconstruction(&random_symmetric(256, 23), 1e-7);
    }
}
