//! Weight tensors held as CP factors: `W = Σ_r u_r^(1) ∘ ... ∘ u_r^(M)`.
//!
//! Everything here works on the factors directly; [`cp_reconstruct`] is only
//! needed by tests and by callers that want to look at `W` itself.

use crate::error::{Error, Result};
use crate::multilinear::matrix::Matrix;
use crate::multilinear::products::khatri_rao;
use crate::multilinear::tensor::{check_mode, DenseTensor};

/// Factor matrices `U^(1), ..., U^(M)` with `U^(j)` of shape `I_j × R`.
#[derive(Clone, Debug, PartialEq)]
pub struct CpFactors {
    factors: Vec<Matrix>,
}

impl CpFactors {
    pub fn new(factors: Vec<Matrix>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::arg("CP factors need at least one mode"))?;
        let rank = first.cols();
        if rank == 0 {
            return Err(Error::arg("CP rank must be at least 1"));
        }
        if let Some(j) = factors.iter().position(|u| u.cols() != rank) {
            return Err(Error::dim(format!(
                "factor {j} has {} columns, expected rank {rank}",
                factors[j].cols()
            )));
        }
        if factors.iter().any(|u| u.rows() == 0) {
            return Err(Error::arg("empty factor matrix"));
        }
        if factors.iter().any(|u| !u.is_finite()) {
            return Err(Error::arg("non-finite factor entry"));
        }
        Ok(CpFactors { factors })
    }

    pub fn zeros(dims: &[usize], rank: usize) -> Result<Self> {
        CpFactors::new(dims.iter().map(|&d| Matrix::zeros(d, rank)).collect())
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn rank(&self) -> usize {
        self.factors[0].cols()
    }

    /// Shape of the represented tensor.
    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|u| u.rows()).collect()
    }

    pub fn factor(&self, mode: usize) -> &Matrix {
        &self.factors[mode]
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    /// Replaces `U^(mode)`; the new factor must keep its shape.
    pub fn set_factor(&mut self, mode: usize, u: Matrix) -> Result<()> {
        check_mode(mode, self.order())?;
        if u.shape() != self.factors[mode].shape() {
            return Err(Error::dim(format!(
                "replacement factor {:?} for mode {mode} of shape {:?}",
                u.shape(),
                self.factors[mode].shape()
            )));
        }
        self.factors[mode] = u;
        Ok(())
    }

    /// Multiplies one factor by `t`, scaling `W` by `t`.
    pub fn scaled(&self, t: f64) -> CpFactors {
        let mut out = self.clone();
        out.factors[0] = out.factors[0].scaled(t);
        out
    }

    /// CP factors of `self - other` (rank `2R`).
    pub fn difference(&self, other: &CpFactors) -> Result<CpFactors> {
        if self.dims() != other.dims() {
            return Err(Error::dim("difference of CP tensors of different shapes"));
        }
        let factors = self
            .factors
            .iter()
            .zip(&other.factors)
            .enumerate()
            .map(|(j, (a, b))| {
                let sign = if j == 0 { -1.0 } else { 1.0 };
                let mut data = a.as_slice().to_vec();
                data.extend(b.as_slice().iter().map(|v| sign * v));
                Matrix::from_col_major(a.rows(), a.cols() + b.cols(), data)
            })
            .collect::<Result<Vec<_>>>()?;
        CpFactors::new(factors)
    }
}

/// `U^(-j) = U^(M) ⊙ ... ⊙ U^(j+1) ⊙ U^(j-1) ⊙ ... ⊙ U^(1)`.
///
/// For an order-1 weight the product is empty and the `1 × R` ones row is
/// returned.
pub fn khatri_rao_complement(f: &CpFactors, mode: usize) -> Result<Matrix> {
    check_mode(mode, f.order())?;
    let mut acc: Option<Matrix> = None;
    for k in (0..f.order()).rev().filter(|&k| k != mode) {
        acc = Some(match acc {
            None => f.factors[k].clone(),
            Some(m) => khatri_rao(&m, &f.factors[k])?,
        });
    }
    Ok(acc.unwrap_or_else(|| {
        Matrix::from_col_major(1, f.rank(), vec![1.0; f.rank()]).expect("ones row")
    }))
}

/// `Σ_r u_r^(1) ∘ ... ∘ u_r^(M)` as a dense tensor.
pub fn cp_reconstruct(f: &CpFactors) -> Result<DenseTensor> {
    let dims = f.dims();
    let n: usize = dims.iter().product();
    let mut values = vec![0.0; n];
    for r in 0..f.rank() {
        let mut term = f.factors[0].col(r).to_vec();
        for u in &f.factors[1..] {
            let mut next = Vec::with_capacity(term.len() * u.rows());
            for &b in u.col(r) {
                next.extend(term.iter().map(|a| a * b));
            }
            term = next;
        }
        for (v, t) in values.iter_mut().zip(term) {
            *v += t;
        }
    }
    DenseTensor::new(dims, values)
}

/// Mode-`j` unfolding of the CP tensor, `U^(j) (U^(-j))ᵀ`.
pub fn cp_unfold(f: &CpFactors, mode: usize) -> Result<Matrix> {
    let comp = khatri_rao_complement(f, mode)?;
    let ct = comp.transpose();
    f.factors[mode].matmul(&ct)
}

/// `⟨W, X⟩` by contracting `X` one mode at a time against each rank-one term.
pub fn cp_inner(f: &CpFactors, x: &DenseTensor) -> Result<f64> {
    if f.dims() != x.dims() {
        return Err(Error::dim(format!(
            "weight shape {:?} against sample shape {:?}",
            f.dims(),
            x.dims()
        )));
    }
    let mut total = 0.0;
    let mut buf = Vec::with_capacity(x.len());
    let mut next = Vec::with_capacity(x.len());
    for r in 0..f.rank() {
        buf.clear();
        buf.extend_from_slice(x.values());
        for u in &f.factors {
            let col = u.col(r);
            let len = col.len();
            next.clear();
            next.extend(
                buf.chunks_exact(len)
                    .map(|chunk| chunk.iter().zip(col).map(|(a, b)| a * b).sum::<f64>()),
            );
            std::mem::swap(&mut buf, &mut next);
        }
        debug_assert_eq!(buf.len(), 1);
        total += buf[0];
    }
    Ok(total)
}

/// `‖W‖_F` from the factor Grams: `sqrt(Σ_{r,r'} ∏_j (U^(j)ᵀU^(j))_{rr'})`.
pub fn cp_frobenius(f: &CpFactors) -> f64 {
    let grams: Vec<Matrix> = f
        .factors
        .iter()
        .map(|u| u.t_matmul(u).expect("square gram"))
        .collect();
    let r = f.rank();
    let mut sq = 0.0;
    for a in 0..r {
        for b in 0..r {
            sq += grams.iter().map(|g| g[(a, b)]).product::<f64>();
        }
    }
    sq.max(0.0).sqrt()
}

/// `(U^(-j))ᵀ U^(-j)` as the Hadamard product of the other factors' Grams.
pub fn gram_complement(f: &CpFactors, mode: usize) -> Result<Matrix> {
    check_mode(mode, f.order())?;
    let r = f.rank();
    let mut acc = Matrix::from_col_major(r, r, vec![1.0; r * r])?;
    for (k, u) in f.factors.iter().enumerate() {
        if k != mode {
            acc = acc.hadamard(&u.t_matmul(u)?)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::tensor::{frobenius_norm, inner_product, outer_product, unfold};

    fn cp(factors: &[&[&[f64]]]) -> CpFactors {
        CpFactors::new(
            factors
                .iter()
                .map(|rows| Matrix::from_rows(rows).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn complement_of_two_modes() {
        let f = cp(&[&[&[1.0], &[2.0]], &[&[3.0], &[4.0], &[5.0]]]);
        assert_eq!(khatri_rao_complement(&f, 0).unwrap(), f.factor(1).clone());
        assert_eq!(khatri_rao_complement(&f, 1).unwrap(), f.factor(0).clone());
    }

    #[test]
    fn complement_ordering_three_modes() {
        let f = cp(&[
            &[&[1.0, 2.0], &[3.0, 4.0]],
            &[&[5.0, 6.0], &[7.0, 8.0], &[9.0, 1.0]],
            &[&[2.0, 3.0], &[4.0, 5.0]],
        ]);
        let expect = khatri_rao(f.factor(2), f.factor(0)).unwrap();
        assert_eq!(khatri_rao_complement(&f, 1).unwrap(), expect);
    }

    #[test]
    fn complement_of_order_one_is_ones_row() {
        let f = CpFactors::new(vec![Matrix::zeros(3, 2)]).unwrap();
        let c = khatri_rao_complement(&f, 0).unwrap();
        assert_eq!(c.shape(), (1, 2));
        assert_eq!(c.as_slice(), &[1.0, 1.0]);
        assert_eq!(gram_complement(&f, 0).unwrap().as_slice(), &[1.0; 4]);
    }

    #[test]
    fn rank_one_reconstruction() {
        let f = cp(&[&[&[1.0], &[2.0]], &[&[3.0], &[4.0]]]);
        let w = cp_reconstruct(&f).unwrap();
        assert_eq!(w, outer_product(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap());
        assert_eq!(cp_unfold(&f, 0).unwrap(), unfold(&w, 0).unwrap());
    }

    #[test]
    fn zero_factors() {
        let f = CpFactors::zeros(&[2, 3], 2).unwrap();
        let x = DenseTensor::from_fn(vec![2, 3], |i| (i[0] + i[1]) as f64).unwrap();
        assert_eq!(frobenius_norm(&cp_reconstruct(&f).unwrap()), 0.0);
        assert_eq!(cp_unfold(&f, 1).unwrap(), Matrix::zeros(3, 2));
        assert_eq!(cp_inner(&f, &x).unwrap(), 0.0);
        assert_eq!(cp_frobenius(&f), 0.0);
    }

    #[test]
    fn bilinear_form_identity() {
        let u = [1.0, -2.0];
        let v = [0.5, 3.0, 1.0];
        let f = cp(&[&[&[u[0]], &[u[1]]], &[&[v[0]], &[v[1]], &[v[2]]]]);
        let x = DenseTensor::from_fn(vec![2, 3], |i| (1 + i[0] * 3 + i[1]) as f64).unwrap();
        let mut expect = 0.0;
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                expect += ui * x.get(&[i, j]) * vj;
            }
        }
        assert!((cp_inner(&f, &x).unwrap() - expect).abs() < 1e-12);
        let w = cp_reconstruct(&f).unwrap();
        assert!((inner_product(&w, &x).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn frobenius_of_rank_one() {
        let f = cp(&[&[&[1.0], &[0.0]], &[&[0.0], &[2.0]]]);
        assert_eq!(cp_frobenius(&f), 2.0);
    }

    #[test]
    fn orthonormal_gram_complement_is_identity() {
        let f = cp(&[&[&[1.0, 0.0], &[0.0, 1.0]], &[&[0.6, 0.8], &[0.8, -0.6]]]);
        let g = gram_complement(&f, 0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn difference_norm() {
        let a = cp(&[&[&[1.0], &[2.0]], &[&[3.0], &[4.0]]]);
        let b = cp(&[&[&[0.0], &[1.0]], &[&[1.0], &[1.0]]]);
        let d = a.difference(&b).unwrap();
        assert_eq!(d.rank(), 2);
        let wa = cp_reconstruct(&a).unwrap();
        let wb = cp_reconstruct(&b).unwrap();
        let direct: f64 = wa
            .values()
            .iter()
            .zip(wb.values())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!((cp_frobenius(&d) - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_mixed_ranks() {
        assert!(CpFactors::new(vec![Matrix::zeros(2, 1), Matrix::zeros(2, 2)]).is_err());
        assert!(CpFactors::new(vec![]).is_err());
    }
}
