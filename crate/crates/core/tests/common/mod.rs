//! Independent oracles shared by the integration suites. Nothing here calls
//! into the solver paths it is used to check.
#![allow(dead_code)]

use npstm::multilinear::{CpFactors, DenseTensor, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| normal(rng)).collect();
    Matrix::from_col_major(rows, cols, data).unwrap()
}

pub fn random_tensor(rng: &mut ChaCha8Rng, dims: &[usize]) -> DenseTensor {
    let n: usize = dims.iter().product();
    DenseTensor::new(dims.to_vec(), (0..n).map(|_| normal(rng)).collect()).unwrap()
}

pub fn random_cp(rng: &mut ChaCha8Rng, dims: &[usize], rank: usize) -> CpFactors {
    CpFactors::new(dims.iter().map(|&d| random_matrix(rng, d, rank)).collect()).unwrap()
}

/// `BᵀB / k` with `B` of shape `k × m`, `k ≥ m`, plus a small diagonal.
pub fn random_spd(rng: &mut ChaCha8Rng, m: usize) -> Matrix {
    let k = m + 2;
    let b = random_matrix(rng, k, m);
    let mut h = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let s: f64 = (0..k).map(|r| b[(r, i)] * b[(r, j)]).sum();
            h[(i, j)] = s / k as f64;
        }
        h[(i, i)] += 1e-3;
    }
    h
}

/// Dense Gaussian elimination with partial pivoting; `None` if singular.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-13 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            let (top, bottom) = m.split_at_mut(r);
            for (a, b) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *a -= factor * b;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

/// Exhaustive active-set search for `min ½αᵀHα − fᵀα, 0 ≤ α ≤ c`: every
/// coordinate is pinned at 0, pinned at c, or free (3^m patterns); the free
/// block is solved as an equality system and the best feasible point kept.
pub fn box_qp_brute_force(h: &Matrix, f: &[f64], c: f64) -> (Vec<f64>, f64) {
    let m = f.len();
    let objective = |a: &[f64]| {
        let mut v = 0.0;
        for i in 0..m {
            for j in 0..m {
                v += 0.5 * a[i] * h[(i, j)] * a[j];
            }
            v -= f[i] * a[i];
        }
        v
    };
    let mut best = (vec![0.0; m], objective(&vec![0.0; m]));
    let patterns = 3usize.pow(m as u32);
    for p in 0..patterns {
        let mut state = vec![0u8; m];
        let mut rem = p;
        for s in state.iter_mut() {
            *s = (rem % 3) as u8;
            rem /= 3;
        }
        let mut alpha = vec![0.0; m];
        for i in 0..m {
            if state[i] == 1 {
                alpha[i] = c;
            }
        }
        let free: Vec<usize> = (0..m).filter(|&i| state[i] == 2).collect();
        if !free.is_empty() {
            let a: Vec<Vec<f64>> = free
                .iter()
                .map(|&i| free.iter().map(|&j| h[(i, j)]).collect())
                .collect();
            let b: Vec<f64> = free
                .iter()
                .map(|&i| {
                    f[i] - (0..m)
                        .filter(|&j| state[j] == 1)
                        .map(|j| h[(i, j)] * c)
                        .sum::<f64>()
                })
                .collect();
            let Some(x) = gauss_solve(&a, &b) else {
                continue;
            };
            if x.iter().any(|&v| v < -1e-12 || v > c + 1e-12) {
                continue;
            }
            for (k, &i) in free.iter().enumerate() {
                alpha[i] = x[k].clamp(0.0, c);
            }
        }
        let v = objective(&alpha);
        if v < best.1 {
            best = (alpha, v);
        }
    }
    best
}

/// Linear position of a multi-index, first index fastest.
pub fn linear_index(dims: &[usize], idx: &[usize]) -> usize {
    let mut pos = 0;
    let mut stride = 1;
    for (i, d) in idx.iter().zip(dims) {
        pos += i * stride;
        stride *= d;
    }
    pos
}

/// All multi-indices of a shape in storage order.
pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut t| {
            dims.iter()
                .map(|&d| {
                    let i = t % d;
                    t /= d;
                    i
                })
                .collect()
        })
        .collect()
}

/// Mode-`n` unfolding straight from the definition: entry `(i_n, j)` with
/// `j = Σ_{k≠n} i_k Π_{l<k, l≠n} I_l`.
pub fn naive_unfold(dims: &[usize], values: &[f64], n: usize) -> Vec<Vec<f64>> {
    let cols: usize = dims
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != n)
        .map(|(_, d)| d)
        .product();
    let mut out = vec![vec![0.0; cols]; dims[n]];
    for idx in all_indices(dims) {
        let mut j = 0;
        let mut stride = 1;
        for (k, (&i, &d)) in idx.iter().zip(dims).enumerate() {
            if k != n {
                j += i * stride;
                stride *= d;
            }
        }
        out[idx[n]][j] = values[linear_index(dims, &idx)];
    }
    out
}

/// `Σ_r Π_k U^(k)[i_k, r]` at every index.
pub fn naive_reconstruct(f: &CpFactors) -> Vec<f64> {
    let dims = f.dims();
    all_indices(&dims)
        .iter()
        .map(|idx| {
            (0..f.rank())
                .map(|r| {
                    idx.iter()
                        .enumerate()
                        .map(|(k, &i)| f.factor(k)[(i, r)])
                        .product::<f64>()
                })
                .sum()
        })
        .collect()
}

pub fn naive_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues of a symmetric matrix, ascending, via nalgebra.
pub fn eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
