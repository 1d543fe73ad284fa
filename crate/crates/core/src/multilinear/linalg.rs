//! Small dense symmetric kernels: Jacobi eigensolver, inverse square roots
//! and a jittered Cholesky solve.

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::multilinear::matrix::Matrix;

const SYMMETRY_TOL: f64 = 1e-10;
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// (column `k` of `vectors` belongs to `values[k]`).
#[derive(Clone, Debug)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigendecomposition `S = Q diag(λ) Qᵀ`.
pub fn sym_eig(s: &Matrix) -> Result<SymEig> {
    if !s.is_square() {
        return Err(Error::arg(format!(
            "eigendecomposition of a {:?} matrix",
            s.shape()
        )));
    }
    if !s.is_finite() {
        return Err(Error::arg("eigendecomposition of a non-finite matrix"));
    }
    if !s.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::arg("eigendecomposition of a non-symmetric matrix"));
    }
    let n = s.rows();
    let mut a = s.clone();
    a.symmetrize();
    let mut q = Matrix::identity(n);
    let tol = JACOBI_TOL * s.frobenius();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        warn!("jacobi eigensolver hit {JACOBI_MAX_SWEEPS} sweeps on a {n}x{n} matrix");
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.col_mut(dst).copy_from_slice(q.col(src));
    }
    Ok(SymEig { values, vectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing `a[p][r]`.
fn rotate(a: &mut Matrix, q: &mut Matrix, p: usize, r: usize) {
    let apr = a[(p, r)];
    if apr == 0.0 {
        return;
    }
    let app = a[(p, p)];
    let arr = a[(r, r)];
    let theta = (arr - app) / (2.0 * apr);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akr = a[(k, r)];
        a[(k, p)] = c * akp - s * akr;
        a[(k, r)] = s * akp + c * akr;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let ark = a[(r, k)];
        a[(p, k)] = c * apk - s * ark;
        a[(r, k)] = s * apk + c * ark;
    }
    a[(p, r)] = 0.0;
    a[(r, p)] = 0.0;
    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = c * qkp - s * qkr;
        q[(k, r)] = s * qkp + c * qkr;
    }
}

/// `Q f(Λ) Qᵀ`.
fn spectral_map(eig: &SymEig, f: impl Fn(f64) -> f64) -> Matrix {
    let n = eig.values.len();
    let mut out = Matrix::zeros(n, n);
    for (k, &lam) in eig.values.iter().enumerate() {
        let w = f(lam);
        let qk = eig.vectors.col(k);
        for j in 0..n {
            let s = w * qk[j];
            if s == 0.0 {
                continue;
            }
            for i in 0..n {
                out[(i, j)] += qk[i] * s;
            }
        }
    }
    out.symmetrize();
    out
}

/// `S^{1/2}` and `S^{-1/2}` for a symmetric PSD matrix.
///
/// Eigenvalues below `floor_ratio · λ_max` are raised to that floor. An
/// all-zero (or negative semidefinite) input has no usable spectrum and maps
/// to a pair of identities.
pub fn sym_inv_sqrt(s: &Matrix, floor_ratio: f64) -> Result<(Matrix, Matrix)> {
    if !(floor_ratio > 0.0) {
        return Err(Error::arg("eigenvalue floor ratio must be positive"));
    }
    let eig = sym_eig(s)?;
    let lmax = eig.values.first().copied().unwrap_or(0.0);
    if !(lmax > 0.0) {
        warn!("inverse square root of a matrix with no positive eigenvalue; using identity");
        let n = s.rows();
        return Ok((Matrix::identity(n), Matrix::identity(n)));
    }
    let floor = floor_ratio * lmax;
    let half = spectral_map(&eig, |l| l.max(floor).sqrt());
    let inv_half = spectral_map(&eig, |l| 1.0 / l.max(floor).sqrt());
    Ok((half, inv_half))
}

pub const DEFAULT_EIG_FLOOR: f64 = 1e-12;

/// Lower Cholesky factor, or `None` when a pivot is not positive.
fn cholesky(s: &Matrix, shift: f64) -> Option<Matrix> {
    let n = s.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)] + shift;
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Some(l)
}

fn cholesky_solve_in_place(l: &Matrix, b: &mut [f64]) {
    let n = l.rows();
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[(i, k)] * b[k];
        }
        b[i] = v / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v -= l[(k, i)] * b[k];
        }
        b[i] = v / l[(i, i)];
    }
}

/// Solves `S X = B` for symmetric positive definite `S`.
///
/// Falls back to diagonal jitter `1e-12·tr(S)/n`, doubled up to
/// `1e-4·tr(S)/n`, when the plain factorization fails. A few rounds of
/// iterative refinement against the unshifted `S` follow.
pub fn spd_solve(s: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !s.is_square() || s.rows() != b.rows() {
        return Err(Error::dim(format!(
            "solve with a {:?} system and {:?} right-hand side",
            s.shape(),
            b.shape()
        )));
    }
    if !s.is_finite() || !b.is_finite() {
        return Err(Error::numeric("non-finite linear system"));
    }
    let n = s.rows();
    if n == 0 {
        return Ok(b.clone());
    }
    let scale = s.trace() / n as f64;
    let mut shift = 0.0;
    let l = loop {
        if let Some(l) = cholesky(s, shift) {
            break l;
        }
        if !(scale > 0.0) {
            return Err(Error::numeric(
                "cholesky failed on a matrix with non-positive trace",
            ));
        }
        shift = if shift == 0.0 {
            1e-12 * scale
        } else {
            shift * 2.0
        };
        if shift > 1e-4 * scale {
            return Err(Error::numeric(format!(
                "cholesky failed after jitter up to {:.3e}",
                1e-4 * scale
            )));
        }
    };
    if shift > 1e-8 * scale {
        warn!("spd_solve needed diagonal jitter {shift:.3e}");
    } else if shift > 0.0 {
        debug!("spd_solve needed diagonal jitter {shift:.3e}");
    }

    let mut x = b.clone();
    for k in 0..b.cols() {
        let rhs = b.col(k);
        let col = x.col_mut(k);
        cholesky_solve_in_place(&l, col);
        let mut res = residual(s, col, rhs);
        let mut res_norm = norm(&res);
        for _ in 0..3 {
            if res_norm == 0.0 {
                break;
            }
            cholesky_solve_in_place(&l, &mut res);
            let trial: Vec<f64> = col.iter().zip(&res).map(|(a, d)| a + d).collect();
            let trial_res = residual(s, &trial, rhs);
            let trial_norm = norm(&trial_res);
            if trial_norm >= res_norm {
                break;
            }
            col.copy_from_slice(&trial);
            res = trial_res;
            res_norm = trial_norm;
        }
    }
    Ok(x)
}

fn residual(s: &Matrix, x: &[f64], rhs: &[f64]) -> Vec<f64> {
    let sx = s.mul_vec(x).expect("square system");
    rhs.iter().zip(sx).map(|(r, v)| r - v).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
