//! Box-constrained convex QP: `min ½αᵀHα − fᵀα` subject to `0 ≤ α ≤ c`.
//!
//! This is the minimization form of the mode-wise Wolfe duals. There is no
//! equality constraint (the model carries no bias), so plain cyclic
//! coordinate descent applies: each coordinate is minimized exactly and
//! clipped into the box. Every tenth sweep a projected Newton step on the
//! current free set is tried and kept only if it lowers the objective, which
//! removes the slow tail of coordinate descent on ill-conditioned `H`.

use log::warn;

use crate::error::{Error, Result};
use crate::multilinear::{dot, spd_solve, Matrix};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Coordinates whose `H_ii` falls below this fraction of the largest diagonal
/// are treated as linear.
const DEGENERATE_DIAG: f64 = 1e-12;
const POLISH_EVERY: usize = 10;
const REFRESH_EVERY: usize = 50;

#[derive(Clone, Debug)]
pub struct BoxQp {
    h: Matrix,
    f: Vec<f64>,
    c: f64,
}

impl BoxQp {
    pub fn new(h: Matrix, f: Vec<f64>, c: f64) -> Result<Self> {
        if !h.is_square() || h.rows() != f.len() {
            return Err(Error::dim(format!(
                "box QP with H {:?} and f of length {}",
                h.shape(),
                f.len()
            )));
        }
        if f.is_empty() {
            return Err(Error::arg("box QP with no variables"));
        }
        if !h.is_finite() || f.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("non-finite box QP data"));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::arg(format!("box bound must be positive, got {c}")));
        }
        if !h.is_symmetric(1e-10) {
            return Err(Error::arg("box QP matrix is not symmetric"));
        }
        Ok(BoxQp { h, f, c })
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn bound(&self) -> f64 {
        self.c
    }

    pub fn objective(&self, alpha: &[f64]) -> f64 {
        let ha = self.h.mul_vec(alpha).expect("dimension checked");
        0.5 * dot(alpha, &ha) - dot(&self.f, alpha)
    }

    /// `Hα − f`.
    pub fn gradient(&self, alpha: &[f64]) -> Vec<f64> {
        let mut g = self.h.mul_vec(alpha).expect("dimension checked");
        for (gi, fi) in g.iter_mut().zip(&self.f) {
            *gi -= fi;
        }
        g
    }

    pub fn default_max_sweeps(&self) -> usize {
        10 * self.dim() + 1000
    }
}

#[derive(Clone, Debug)]
pub struct QpSolution {
    pub alpha: Vec<f64>,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub objective: f64,
    pub converged: bool,
}

/// Largest violation of the box KKT conditions at `alpha` (clipped first).
pub fn kkt_residual(qp: &BoxQp, alpha: &[f64]) -> f64 {
    let a: Vec<f64> = alpha.iter().map(|&v| v.clamp(0.0, qp.c)).collect();
    let g = qp.gradient(&a);
    kkt_from_gradient(&a, &g, qp.c)
}

fn kkt_from_gradient(alpha: &[f64], g: &[f64], c: f64) -> f64 {
    alpha
        .iter()
        .zip(g)
        .map(|(&a, &gi)| {
            if a <= 0.0 {
                (-gi).max(0.0)
            } else if a >= c {
                gi.max(0.0)
            } else {
                gi.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Cyclic coordinate descent from `warm` (clipped into the box) or zero.
///
/// Returns the best iterate with `converged == false` if the KKT residual is
/// still above `tol` after `max_sweeps`.
pub fn solve(qp: &BoxQp, tol: f64, max_sweeps: usize, warm: Option<&[f64]>) -> Result<QpSolution> {
    if !(tol > 0.0) {
        return Err(Error::arg("QP tolerance must be positive"));
    }
    let m = qp.dim();
    let c = qp.c;
    let mut alpha = match warm {
        Some(w) if w.len() == m => w.iter().map(|&v| v.clamp(0.0, c)).collect(),
        Some(w) => {
            return Err(Error::dim(format!(
                "warm start of length {} for a {m}-variable QP",
                w.len()
            )))
        }
        None => vec![0.0; m],
    };
    let diag: Vec<f64> = (0..m).map(|i| qp.h[(i, i)]).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let degenerate = DEGENERATE_DIAG * dmax;

    let mut g = qp.gradient(&alpha);
    let mut kkt = kkt_from_gradient(&alpha, &g, c);
    let mut sweeps = 0;
    while kkt > tol && sweeps < max_sweeps {
        sweeps += 1;
        for i in 0..m {
            let gi = g[i];
            let old = alpha[i];
            let new = if diag[i] > degenerate && diag[i] > 0.0 {
                (old - gi / diag[i]).clamp(0.0, c)
            } else if gi > 0.0 {
                0.0
            } else if gi < 0.0 {
                c
            } else {
                old
            };
            let delta = new - old;
            if delta != 0.0 {
                alpha[i] = new;
                let hi = qp.h.col(i);
                for (gk, hk) in g.iter_mut().zip(hi) {
                    *gk += delta * hk;
                }
            }
        }
        if sweeps % REFRESH_EVERY == 0 {
            g = qp.gradient(&alpha);
        }
        kkt = kkt_from_gradient(&alpha, &g, c);
        if kkt > tol && sweeps % POLISH_EVERY == 0 {
            if let Some(better) = newton_polish(qp, &alpha, &g) {
                alpha = better;
                g = qp.gradient(&alpha);
                kkt = kkt_from_gradient(&alpha, &g, c);
            }
        }
        if kkt <= tol {
            // confirm against an exact gradient before stopping
            g = qp.gradient(&alpha);
            kkt = kkt_from_gradient(&alpha, &g, c);
        }
    }
    let converged = kkt <= tol;
    if !converged {
        warn!("box QP stopped after {sweeps} sweeps with KKT residual {kkt:.3e}");
    }
    Ok(QpSolution {
        objective: qp.objective(&alpha),
        alpha,
        iterations: sweeps,
        kkt_residual: kkt,
        converged,
    })
}

/// Newton step on the free coordinates, truncated at the box. Kept only if
/// it strictly lowers the objective.
fn newton_polish(qp: &BoxQp, alpha: &[f64], g: &[f64]) -> Option<Vec<f64>> {
    let c = qp.c;
    let free: Vec<usize> = (0..alpha.len())
        .filter(|&i| {
            let a = alpha[i];
            (a > 0.0 && a < c) || (a <= 0.0 && g[i] < 0.0) || (a >= c && g[i] > 0.0)
        })
        .collect();
    if free.is_empty() {
        return None;
    }
    let k = free.len();
    let mut hff = Matrix::zeros(k, k);
    for (b, &j) in free.iter().enumerate() {
        for (a, &i) in free.iter().enumerate() {
            hff[(a, b)] = qp.h[(i, j)];
        }
    }
    let gf: Vec<f64> = free.iter().map(|&i| -g[i]).collect();
    let step = spd_solve(&hff, &Matrix::column(&gf)).ok()?;
    let step = step.as_slice();

    // longest feasible fraction of the step
    let mut t: f64 = 1.0;
    for (a, &i) in free.iter().enumerate() {
        let d = step[a];
        if d > 0.0 {
            t = t.min((c - alpha[i]) / d);
        } else if d < 0.0 {
            t = t.min(-alpha[i] / d);
        }
    }
    if !(t > 0.0) {
        return None;
    }
    let mut trial = alpha.to_vec();
    for (a, &i) in free.iter().enumerate() {
        trial[i] = (alpha[i] + t * step[a]).clamp(0.0, c);
    }
    (qp.objective(&trial) < qp.objective(alpha)).then_some(trial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(h: &[&[f64]], f: &[f64], c: f64) -> BoxQp {
        BoxQp::new(Matrix::from_rows(h).unwrap(), f.to_vec(), c).unwrap()
    }

    fn run(q: &BoxQp) -> QpSolution {
        solve(q, DEFAULT_TOL, q.default_max_sweeps(), None).unwrap()
    }

    #[test]
    fn interior_optimum() {
        let s = run(&qp(&[&[2.0]], &[1.0], 3.0));
        assert!((s.alpha[0] - 0.5).abs() < 1e-12);
        assert!(s.converged);
    }

    #[test]
    fn clipped_at_lower_bound() {
        let s = run(&qp(&[&[2.0]], &[-1.0], 3.0));
        assert_eq!(s.alpha, vec![0.0]);
    }

    #[test]
    fn separable_with_upper_clip() {
        let s = run(&qp(&[&[2.0, 0.0], &[0.0, 2.0]], &[5.0, 1.0], 1.0));
        assert_eq!(s.alpha[0], 1.0);
        assert!((s.alpha[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kkt_at_zero_with_nonpositive_f() {
        let q = qp(&[&[1.0, 0.2], &[0.2, 1.0]], &[-1.0, 0.0], 1.0);
        assert_eq!(kkt_residual(&q, &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn kkt_interior_is_max_abs_gradient() {
        // H = I, f chosen so g = α − f = (0.3, −0.2) at α = (0.5, 0.5)
        let q = qp(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.2, 0.7], 1.0);
        assert!((kkt_residual(&q, &[0.5, 0.5]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn zero_diagonal_goes_to_bound() {
        let q = qp(&[&[0.0, 0.0], &[0.0, 1.0]], &[1.0, 0.5], 2.0);
        let s = run(&q);
        assert_eq!(s.alpha[0], 2.0);
        assert!((s.alpha[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn warm_start_is_clipped() {
        let q = qp(&[&[2.0]], &[1.0], 3.0);
        let s = solve(&q, DEFAULT_TOL, 100, Some(&[10.0])).unwrap();
        assert!((s.alpha[0] - 0.5).abs() < 1e-12);
        assert!(solve(&q, DEFAULT_TOL, 100, Some(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn rejects_bad_problems() {
        let h = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(BoxQp::new(h, vec![1.0, 1.0], 1.0).is_err());
        assert!(BoxQp::new(Matrix::identity(1), vec![f64::NAN], 1.0).is_err());
        assert!(BoxQp::new(Matrix::identity(1), vec![1.0], 0.0).is_err());
    }
}
