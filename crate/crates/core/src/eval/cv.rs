//! Repeated stratified cross-validation of either classifier, with optional
//! nested grid search on each training split.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::dataset::{make_folds, TensorDataset};
use crate::error::{Error, Result};
use crate::eval::{accuracy, Cell};
use crate::model::{decide, train, Hyperparams};
use crate::svm::{flatten, predict_svm, train_svm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classifier {
    LdmNpstm,
    Svm,
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classifier::LdmNpstm => "ldm-npstm",
            Classifier::Svm => "svm",
        })
    }
}

impl FromStr for Classifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ldm-npstm" => Ok(Classifier::LdmNpstm),
            "svm" => Ok(Classifier::Svm),
            other => Err(Error::arg(format!(
                "unknown classifier {other:?} (expected ldm-npstm or svm)"
            ))),
        }
    }
}

/// Hyperparameter pairs that a grid search varies together.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridParam {
    /// `c1 = c2`
    C12,
    /// `c3 = c4`
    C34,
    /// `λ1 = λ2`
    L12,
    /// `λ3 = λ4`
    L34,
}

impl FromStr for GridParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c12" => Ok(GridParam::C12),
            "c34" => Ok(GridParam::C34),
            "l12" => Ok(GridParam::L12),
            "l34" => Ok(GridParam::L34),
            other => Err(Error::arg(format!(
                "unknown grid parameter {other:?} (expected c12, c34, l12 or l34)"
            ))),
        }
    }
}

impl GridParam {
    pub const ALL: [GridParam; 4] = [
        GridParam::C12,
        GridParam::C34,
        GridParam::L12,
        GridParam::L34,
    ];

    fn apply(self, h: &mut Hyperparams, v: f64) {
        match self {
            GridParam::C12 => (h.c1, h.c2) = (v, v),
            GridParam::C34 => (h.c3, h.c4) = (v, v),
            GridParam::L12 => (h.lambda1, h.lambda2) = (v, v),
            GridParam::L34 => (h.lambda3, h.lambda4) = (v, v),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub values: Vec<f64>,
    /// Ignored for the SVM, which searches its `C` over `values`.
    pub params: Vec<GridParam>,
    pub inner_folds: usize,
}

impl GridSpec {
    /// `{2^-5, 2^-3, …, 2^7}` over all four tied pairs with 3 inner folds.
    pub fn default_theta() -> Self {
        GridSpec {
            values: (-5..=7).step_by(2).map(|e| 2f64.powi(e)).collect(),
            params: GridParam::ALL.to_vec(),
            inner_folds: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvConfig {
    pub hyper: Hyperparams,
    pub svm_c: f64,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    /// Record wall time per fold; when off all times are zero and the
    /// outcome is bit-reproducible.
    pub timing: bool,
    pub grid: Option<GridSpec>,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            hyper: Hyperparams::default(),
            svm_c: 1.0,
            folds: 10,
            repeats: 10,
            seed: 0,
            timing: true,
            grid: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvOutcome {
    /// Test accuracy of every (repeat, fold), repeat-major.
    pub fold_accuracies: Vec<f64>,
    /// Wall seconds of train + predict per (repeat, fold).
    pub fold_times: Vec<f64>,
    /// Mean and sample standard deviation over all folds.
    pub cell: Cell,
}

/// Trains on `train_idx` and returns the number of correct test predictions.
pub fn fit_and_score(
    ds: &TensorDataset,
    classifier: Classifier,
    train_idx: &[usize],
    test_idx: &[usize],
    hyper: &Hyperparams,
    svm_c: f64,
) -> Result<usize> {
    let mut correct = 0;
    match classifier {
        Classifier::LdmNpstm => {
            let model = train(&ds.training_set(train_idx)?, hyper)?;
            for &i in test_idx {
                if decide(&model, &ds.samples()[i])? == ds.labels()[i] {
                    correct += 1;
                }
            }
        }
        Classifier::Svm => {
            let xs: Vec<Vec<f64>> = train_idx
                .iter()
                .map(|&i| flatten(&ds.samples()[i]))
                .collect();
            let ls: Vec<_> = train_idx.iter().map(|&i| ds.labels()[i]).collect();
            let model = train_svm(&xs, &ls, svm_c)?;
            for &i in test_idx {
                if predict_svm(&model, &flatten(&ds.samples()[i]))? == ds.labels()[i] {
                    correct += 1;
                }
            }
        }
    }
    Ok(correct)
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn subset(ds: &TensorDataset, idx: &[usize]) -> Result<TensorDataset> {
    TensorDataset::new(
        ds.dims().to_vec(),
        idx.iter().map(|&i| ds.labels()[i]).collect(),
        idx.iter().map(|&i| ds.samples()[i].clone()).collect(),
    )
}

/// Best `(hyper, svm_c)` by mean inner-CV accuracy; the first candidate in
/// enumeration order wins ties.
pub fn grid_search(
    ds: &TensorDataset,
    classifier: Classifier,
    base: &Hyperparams,
    base_c: f64,
    grid: &GridSpec,
    seed: u64,
) -> Result<(Hyperparams, f64, f64)> {
    if grid.values.is_empty() {
        return Err(Error::arg("grid search with no values"));
    }
    let plan = make_folds(ds, grid.inner_folds, 1, seed)?;
    let mut candidates: Vec<(Hyperparams, f64)> = Vec::new();
    match classifier {
        Classifier::Svm => {
            candidates.extend(grid.values.iter().map(|&c| (base.clone(), c)));
        }
        Classifier::LdmNpstm => {
            let p = grid.params.len();
            let nv = grid.values.len();
            let total = nv
                .checked_pow(p as u32)
                .ok_or_else(|| Error::arg("grid too large"))?;
            for mut code in 0..total {
                let mut h = base.clone();
                // first parameter varies slowest
                for &param in grid.params.iter().rev() {
                    param.apply(&mut h, grid.values[code % nv]);
                    code /= nv;
                }
                candidates.push((h, base_c));
            }
        }
    }
    let mut best: Option<(Hyperparams, f64, f64)> = None;
    for (h, c) in candidates {
        let mut correct = 0;
        for f in 0..plan.folds {
            let test = plan.test_indices(0, f);
            correct += fit_and_score(ds, classifier, &plan.train_indices(0, f), test, &h, c)?;
        }
        let acc = correct as f64 / ds.count() as f64;
        if best.as_ref().is_none_or(|b| acc > b.2) {
            best = Some((h, c, acc));
        }
    }
    Ok(best.expect("at least one candidate"))
}

pub fn crossval(ds: &TensorDataset, classifier: Classifier, cfg: &CvConfig) -> Result<CvOutcome> {
    cfg.hyper.validate()?;
    let plan = make_folds(ds, cfg.folds, cfg.repeats, cfg.seed)?;
    let mut accs = Vec::with_capacity(cfg.folds * cfg.repeats);
    let mut times = Vec::with_capacity(cfg.folds * cfg.repeats);
    for r in 0..cfg.repeats {
        for f in 0..cfg.folds {
            let train_idx = plan.train_indices(r, f);
            let test_idx = plan.test_indices(r, f);
            if test_idx.is_empty() {
                continue;
            }
            let (hyper, c) = match &cfg.grid {
                Some(g) => {
                    let inner = subset(ds, &train_idx)?;
                    let seed = cfg.seed.wrapping_add(1 + (r * cfg.folds + f) as u64);
                    let (h, c, _) =
                        grid_search(&inner, classifier, &cfg.hyper, cfg.svm_c, g, seed)?;
                    (h, c)
                }
                None => (cfg.hyper.clone(), cfg.svm_c),
            };
            let start = Instant::now();
            let correct = fit_and_score(ds, classifier, &train_idx, test_idx, &hyper, c)?;
            let elapsed = start.elapsed().as_secs_f64();
            accs.push(accuracy(correct, test_idx.len() - correct)?);
            times.push(if cfg.timing { elapsed } else { 0.0 });
        }
    }
    let (acc_mean, acc_std) = mean_std(&accs);
    let (time_mean, time_std) = mean_std(&times);
    Ok(CvOutcome {
        fold_accuracies: accs,
        fold_times: times,
        cell: Cell {
            acc_mean,
            acc_std,
            time_mean,
            time_std,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_synthetic;

    #[test]
    fn smallest_run() {
        let ds = generate_synthetic(&[2, 2], 2, 2, 3.0, 0.1, 1).unwrap();
        let cfg = CvConfig {
            folds: 2,
            repeats: 1,
            timing: false,
            ..Default::default()
        };
        let out = crossval(&ds, Classifier::Svm, &cfg).unwrap();
        assert_eq!(out.fold_accuracies.len(), 2);
        assert_eq!(out.cell.time_mean, 0.0);
        assert_eq!(out, crossval(&ds, Classifier::Svm, &cfg).unwrap());
    }

    #[test]
    fn grid_enumeration_picks_a_candidate() {
        let ds = generate_synthetic(&[2, 2], 6, 6, 3.0, 0.5, 2).unwrap();
        let grid = GridSpec {
            values: vec![0.25, 4.0],
            params: vec![GridParam::C34],
            inner_folds: 2,
        };
        let (h, _, acc) = grid_search(
            &ds,
            Classifier::LdmNpstm,
            &Hyperparams::default(),
            1.0,
            &grid,
            0,
        )
        .unwrap();
        assert!(h.c3 == h.c4 && [0.25, 4.0].contains(&h.c3));
        assert!((0.0..=1.0).contains(&acc));
    }

    #[test]
    fn names() {
        assert_eq!("svm".parse::<Classifier>().unwrap(), Classifier::Svm);
        assert_eq!(Classifier::LdmNpstm.to_string(), "ldm-npstm");
        assert!("x".parse::<Classifier>().is_err());
        assert_eq!(GridSpec::default_theta().values.len(), 7);
    }
}
