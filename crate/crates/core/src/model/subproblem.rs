//! One mode-`j` subproblem of one plane, in transformed coordinates.
//!
//! With `A = (U^(-j))ᵀU^(-j)` and `Ũ = U^(j) A^{1/2}`, the plane's objective
//! restricted to `U^(j)` becomes a linear SVM-like problem in `vec(Ũ)` over
//! transformed samples `S̃ = S_(j) U^(-j) A^{-1/2}`. Writing `vec(Ũ) = Vβ`
//! with `V` the stacked `vec(S̃)` gives a QP in `β` whose Wolfe dual is a box
//! QP in the hinge multipliers `α`.

use crate::boxqp::BoxQp;
use crate::error::{Error, Result};
use crate::model::{Hyperparams, Plane, TrainingSet};
use crate::multilinear::{
    gram_complement, khatri_rao_complement, norm2, spd_solve, sym_inv_sqrt, unfold, CpFactors,
    Matrix, DEFAULT_EIG_FLOOR,
};

#[derive(Clone, Debug)]
pub struct ModeCache {
    pub plane: Plane,
    pub mode: usize,
    /// `U^(-j)` of the plane's own current factors.
    pub ucomp: Matrix,
    pub a_half: Matrix,
    pub a_inv_half: Matrix,
    /// `(I_j R) × m`; positives occupy the first `m1` columns.
    pub v: Matrix,
    /// `VᵀV`.
    pub k: Matrix,
    /// Rows of `K` for the samples the plane fits (`K1` or `K2`).
    pub k_fit: Matrix,
    /// Rows of `K` for the samples the plane pushes away (`M1` or `M2`).
    pub m_push: Matrix,
    /// `K_fitᵀK_fit + c K + (2λ(m'−1)/m'²) M_pushᵀM_push + ridge·I`.
    pub g: Matrix,
    /// Absolute ridge added to the diagonal of `G`.
    pub ridge: f64,
    rows: usize,
    rank: usize,
}

impl ModeCache {
    pub fn m_fit(&self) -> usize {
        self.k_fit.rows()
    }

    pub fn m_push(&self) -> usize {
        self.m_push.rows()
    }
}

/// Mode-`j` unfoldings of every training sample, positives first.
pub(crate) fn unfold_all(ts: &TrainingSet, mode: usize) -> Result<Vec<Matrix>> {
    ts.all().map(|s| unfold(s, mode)).collect()
}

pub fn build_mode_cache(
    own: &CpFactors,
    ts: &TrainingSet,
    mode: usize,
    plane: Plane,
    hyper: &Hyperparams,
) -> Result<ModeCache> {
    let unfolded = unfold_all(ts, mode)?;
    build_from_unfolded(own, &unfolded, ts.positives().len(), mode, plane, hyper)
}

pub(crate) fn build_from_unfolded(
    own: &CpFactors,
    unfolded: &[Matrix],
    m1: usize,
    mode: usize,
    plane: Plane,
    hyper: &Hyperparams,
) -> Result<ModeCache> {
    let m = unfolded.len();
    let m2 = m - m1;
    let rank = own.rank();
    let rows = own.factor(mode).rows();
    let ucomp = khatri_rao_complement(own, mode)?;
    let a = gram_complement(own, mode)?;
    let (a_half, a_inv_half) = sym_inv_sqrt(&a, DEFAULT_EIG_FLOOR)?;
    let proj = ucomp.matmul(&a_inv_half)?;

    let mut vdata = Vec::with_capacity(rows * rank * m);
    for s in unfolded {
        if s.rows() != rows || s.cols() != proj.rows() {
            return Err(Error::dim(format!(
                "mode-{mode} unfolding {:?} against factors of shape {:?}",
                s.shape(),
                own.dims()
            )));
        }
        vdata.extend_from_slice(s.matmul(&proj)?.as_slice());
    }
    let v = Matrix::from_col_major(rows * rank, m, vdata)?;
    let mut k = v.t_matmul(&v)?;
    k.symmetrize();

    let pos: Vec<usize> = (0..m1).collect();
    let neg: Vec<usize> = (m1..m).collect();
    let (fit_idx, push_idx) = match plane {
        Plane::Positive => (pos, neg),
        Plane::Negative => (neg, pos),
    };
    let k_fit = k.select_rows(&fit_idx);
    let m_push = k.select_rows(&push_idx);
    let m_opp = match plane {
        Plane::Positive => m2,
        Plane::Negative => m1,
    } as f64;

    let (c_reg, _, l_var, _) = hyper.for_plane(plane);
    let mut g = k_fit.t_matmul(&k_fit)?;
    g.add_scaled(c_reg, &k)?;
    let var_coef = 2.0 * l_var * (m_opp - 1.0) / (m_opp * m_opp);
    if var_coef != 0.0 {
        g.add_scaled(var_coef, &m_push.t_matmul(&m_push)?)?;
    }
    g.symmetrize();
    let scale = g.trace() / m as f64;
    let ridge = if scale > 0.0 {
        hyper.ridge * scale
    } else {
        hyper.ridge
    };
    for i in 0..m {
        g[(i, i)] += ridge;
    }

    Ok(ModeCache {
        plane,
        mode,
        ucomp,
        a_half,
        a_inv_half,
        v,
        k,
        k_fit,
        m_push,
        g,
        ridge,
        rows,
        rank,
    })
}

/// `(λ_mean / m') · y'` for the pushed class.
fn mean_weight(cache: &ModeCache, hyper: &Hyperparams) -> f64 {
    let (_, _, _, l_mean) = hyper.for_plane(cache.plane);
    l_mean / cache.m_push() as f64 * cache.plane.push_label().sign()
}

/// Dual of the plane's mode subproblem in minimization form:
/// `H = M G⁻¹ Mᵀ`, `f = (λ/m') H y' + e`, bound `c3` (plane 1) or `c4`.
pub fn assemble_dual(cache: &ModeCache, hyper: &Hyperparams) -> Result<BoxQp> {
    let (_, c_slack, _, _) = hyper.for_plane(cache.plane);
    let mt = cache.m_push.transpose();
    let z = spd_solve(&cache.g, &mt)?;
    let mut h = cache.m_push.matmul(&z)?;
    h.symmetrize();
    let w = mean_weight(cache, hyper);
    let f = if w == 0.0 {
        vec![1.0; cache.m_push()]
    } else {
        // H y' with y' constant = w · (row sums of H)
        (0..h.rows())
            .map(|i| 1.0 + w * (0..h.cols()).map(|j| h[(i, j)]).sum::<f64>())
            .collect()
    };
    BoxQp::new(h, f, c_slack)
}

/// Right-hand side `(λ/m') Mᵀy' − Mᵀα` of the representer system.
fn beta_rhs(cache: &ModeCache, alpha: &[f64], hyper: &Hyperparams) -> Result<Vec<f64>> {
    if alpha.len() != cache.m_push() {
        return Err(Error::dim(format!(
            "{} multipliers for {} constraints",
            alpha.len(),
            cache.m_push()
        )));
    }
    let w = mean_weight(cache, hyper);
    let shifted: Vec<f64> = alpha.iter().map(|a| w - a).collect();
    cache.m_push.t_mul_vec(&shifted)
}

/// `β = G⁻¹((λ/m') Mᵀy' − Mᵀα)`.
pub fn recover_beta(cache: &ModeCache, alpha: &[f64], hyper: &Hyperparams) -> Result<Vec<f64>> {
    let rhs = beta_rhs(cache, alpha, hyper)?;
    Ok(spd_solve(&cache.g, &Matrix::column(&rhs))?.into_vec())
}

/// `‖Gβ − rhs‖ / (1 + ‖rhs‖)`.
pub fn representer_residual(
    cache: &ModeCache,
    alpha: &[f64],
    beta: &[f64],
    hyper: &Hyperparams,
) -> Result<f64> {
    let rhs = beta_rhs(cache, alpha, hyper)?;
    let gb = cache.g.mul_vec(beta)?;
    let diff: Vec<f64> = gb.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) / (1.0 + norm2(&rhs)))
}

/// `U^(j) = reshape(Vβ) A^{-1/2}`.
pub fn update_mode_factor(cache: &ModeCache, beta: &[f64]) -> Result<Matrix> {
    let ut = cache.v.mul_vec(beta)?;
    let ut = Matrix::from_col_major(cache.rows, cache.rank, ut)?;
    ut.matmul(&cache.a_inv_half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::{sym_eig, DenseTensor};

    fn sample(vals: &[f64]) -> DenseTensor {
        DenseTensor::new(vec![2, 2], vals.to_vec()).unwrap()
    }

    fn toy_set() -> TrainingSet {
        TrainingSet::new(
            vec![
                sample(&[1.0, 0.2, -0.3, 0.5]),
                sample(&[0.8, -0.1, 0.4, 0.2]),
            ],
            vec![
                sample(&[-0.5, 1.0, 0.7, -0.2]),
                sample(&[0.1, 0.9, -0.6, 1.1]),
                sample(&[0.0; 4]),
            ],
        )
        .unwrap()
    }

    fn orthonormal() -> CpFactors {
        CpFactors::new(vec![
            Matrix::from_rows(&[&[1.0], &[0.0]]).unwrap(),
            Matrix::from_rows(&[&[0.6], &[0.8]]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn identity_gram_leaves_samples_untransformed() {
        let ts = toy_set();
        let f = orthonormal();
        let h = Hyperparams::default();
        let cache = build_mode_cache(&f, &ts, 0, Plane::Positive, &h).unwrap();
        let x = unfold(&ts.positives()[0], 0).unwrap();
        let expect = x.matmul(&cache.ucomp).unwrap();
        for (a, b) in cache.v.col(0).iter().zip(expect.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_sample_gives_zero_rows() {
        let ts = toy_set();
        let cache = build_mode_cache(
            &orthonormal(),
            &ts,
            1,
            Plane::Positive,
            &Hyperparams::default(),
        )
        .unwrap();
        assert!(cache.v.col(4).iter().all(|&v| v == 0.0));
        assert!(cache.m_push.row(2).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn block_shapes() {
        let ts = toy_set();
        let h = Hyperparams::default();
        let c1 = build_mode_cache(&orthonormal(), &ts, 0, Plane::Positive, &h).unwrap();
        assert_eq!(c1.k_fit.shape(), (2, 5));
        assert_eq!(c1.m_push.shape(), (3, 5));
        let c2 = build_mode_cache(&orthonormal(), &ts, 0, Plane::Negative, &h).unwrap();
        assert_eq!(c2.k_fit.shape(), (3, 5));
        assert_eq!(c2.m_push.shape(), (2, 5));
        assert_eq!(assemble_dual(&c1, &h).unwrap().dim(), 3);
        assert_eq!(assemble_dual(&c2, &h).unwrap().dim(), 2);
    }

    #[test]
    fn g_is_ridged_and_symmetric() {
        let ts = toy_set();
        let h = Hyperparams::default();
        let cache = build_mode_cache(&orthonormal(), &ts, 1, Plane::Negative, &h).unwrap();
        assert!(cache.g.is_symmetric(1e-14));
        let lmin = *sym_eig(&cache.g).unwrap().values.last().unwrap();
        assert!(lmin >= cache.ridge - 1e-10);
    }

    #[test]
    fn zero_mean_weight_gives_unit_linear_term() {
        let ts = toy_set();
        let h = Hyperparams {
            lambda3: 0.0,
            ..Default::default()
        };
        let cache = build_mode_cache(&orthonormal(), &ts, 0, Plane::Positive, &h).unwrap();
        assert_eq!(assemble_dual(&cache, &h).unwrap().f(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn zero_multipliers_without_mean_term_give_zero_beta() {
        let ts = toy_set();
        let h = Hyperparams {
            lambda3: 0.0,
            ..Default::default()
        };
        let cache = build_mode_cache(&orthonormal(), &ts, 0, Plane::Positive, &h).unwrap();
        let beta = recover_beta(&cache, &[0.0; 3], &h).unwrap();
        assert!(beta.iter().all(|&b| b == 0.0));
        let u = update_mode_factor(&cache, &beta).unwrap();
        assert_eq!(u, Matrix::zeros(2, 1));
    }

    #[test]
    fn identity_g_makes_beta_the_rhs() {
        let ts = toy_set();
        let h = Hyperparams::default();
        let mut cache = build_mode_cache(&orthonormal(), &ts, 0, Plane::Positive, &h).unwrap();
        cache.g = Matrix::identity(5);
        let alpha = [0.2, 0.0, 0.7];
        let beta = recover_beta(&cache, &alpha, &h).unwrap();
        // λ3/m2 · M1ᵀy2 − M1ᵀα with y2 = −1
        let w = -1.0 / 3.0;
        for (i, b) in beta.iter().enumerate() {
            let expect: f64 = (0..3).map(|q| cache.m_push[(q, i)] * (w - alpha[q])).sum();
            assert!((b - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn wrong_multiplier_length() {
        let ts = toy_set();
        let h = Hyperparams::default();
        let cache = build_mode_cache(&orthonormal(), &ts, 0, Plane::Positive, &h).unwrap();
        assert!(recover_beta(&cache, &[0.0; 2], &h).is_err());
    }
}
