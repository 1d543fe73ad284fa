//! Linear soft-margin SVM without bias on flattened tensors.
//!
//! The dual `min ½αᵀQα − eᵀα`, `0 ≤ α ≤ C`, `Q_ij = y_i y_j x_iᵀx_j` has no
//! equality constraint and is handed to the box-QP solver unchanged. Append
//! a constant feature to emulate a bias.

use log::warn;

use crate::boxqp::{self, BoxQp, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::model::Label;
use crate::multilinear::{dot, DenseTensor, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSvmModel {
    pub w: Vec<f64>,
    pub c: f64,
    pub alphas: Vec<f64>,
}

pub fn train_svm(vectors: &[Vec<f64>], labels: &[Label], c: f64) -> Result<LinearSvmModel> {
    if vectors.len() != labels.len() {
        return Err(Error::dim(format!(
            "{} vectors with {} labels",
            vectors.len(),
            labels.len()
        )));
    }
    if !labels.contains(&Label::Positive) || !labels.contains(&Label::Negative) {
        return Err(Error::arg("SVM training needs samples of both classes"));
    }
    let d = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::dim(format!(
            "vector of length {} among length {d}",
            v.len()
        )));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::arg(format!("C must be positive, got {c}")));
    }
    let n = vectors.len();
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = y[i] * y[j] * dot(&vectors[i], &vectors[j]);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    let qp = BoxQp::new(q, vec![1.0; n], c)?;
    let sol = boxqp::solve(&qp, DEFAULT_TOL, qp.default_max_sweeps(), None)?;
    let mut w = vec![0.0; d];
    for ((x, a), yi) in vectors.iter().zip(&sol.alpha).zip(&y) {
        if *a != 0.0 {
            for (wk, xk) in w.iter_mut().zip(x) {
                *wk += a * yi * xk;
            }
        }
    }
    if w.iter().all(|&v| v == 0.0) {
        warn!("SVM training produced a zero weight vector (degenerate data)");
    }
    Ok(LinearSvmModel {
        w,
        c,
        alphas: sol.alpha,
    })
}

/// `sign(wᵀx)`, with 0 mapped to `+1`.
pub fn predict_svm(model: &LinearSvmModel, x: &[f64]) -> Result<Label> {
    if x.len() != model.w.len() {
        return Err(Error::dim(format!(
            "input of length {} for a model of length {}",
            x.len(),
            model.w.len()
        )));
    }
    Ok(if dot(&model.w, x) >= 0.0 {
        Label::Positive
    } else {
        Label::Negative
    })
}

/// Linear value array in storage order.
pub fn flatten(x: &DenseTensor) -> Vec<f64> {
    x.values().to_vec()
}

pub fn unflatten(values: Vec<f64>, dims: &[usize]) -> Result<DenseTensor> {
    DenseTensor::new(dims.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let xs = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let ls = [Label::Positive, Label::Negative];
        let m = train_svm(&xs, &ls, 10.0).unwrap();
        assert!((m.w[0] - 1.0).abs() < 1e-8 && m.w[1].abs() < 1e-12);
        assert_eq!(predict_svm(&m, &xs[0]).unwrap(), Label::Positive);
        assert_eq!(predict_svm(&m, &xs[1]).unwrap(), Label::Negative);
        assert_eq!(predict_svm(&m, &[2.0, -5.0]).unwrap(), Label::Positive);
    }

    #[test]
    fn tiny_c_shrinks_w() {
        let xs = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let m = train_svm(&xs, &[Label::Positive, Label::Negative], 1e-9).unwrap();
        assert!(m.w.iter().all(|v| v.abs() <= 2e-9));
    }

    #[test]
    fn zero_model_predicts_positive() {
        let m = LinearSvmModel {
            w: vec![0.0; 3],
            c: 1.0,
            alphas: vec![],
        };
        assert_eq!(predict_svm(&m, &[-1.0, 2.0, 3.0]).unwrap(), Label::Positive);
        assert!(predict_svm(&m, &[1.0]).is_err());
    }

    #[test]
    fn degenerate_data() {
        let xs = vec![vec![0.0; 2], vec![0.0; 2]];
        let m = train_svm(&xs, &[Label::Positive, Label::Negative], 1.0).unwrap();
        assert_eq!(m.w, vec![0.0, 0.0]);
    }

    #[test]
    fn flatten_layout() {
        let t = DenseTensor::from_fn(vec![2, 2], |i| [[1.0, 2.0], [3.0, 4.0]][i[0]][i[1]]).unwrap();
        assert_eq!(flatten(&t), vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(unflatten(flatten(&t), &[2, 2]).unwrap(), t);
    }

    #[test]
    fn rejects_single_class() {
        let xs = vec![vec![1.0], vec![2.0]];
        assert!(train_svm(&xs, &[Label::Positive; 2], 1.0).is_err());
    }
}
