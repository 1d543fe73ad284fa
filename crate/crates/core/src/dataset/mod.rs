//! Labeled tensor datasets: binary and CSV I/O, synthetic generation and
//! stratified folds.

mod csv;
mod folds;
mod synth;
mod tds;

use crate::error::{Error, Result};
use crate::model::{Label, TrainingSet};
use crate::multilinear::DenseTensor;

pub use self::csv::{read_csv, read_csv_unlabeled, write_csv};
pub use folds::{make_folds, FoldPlan};
pub use synth::{generate_synthetic, synthetic_means};
pub use tds::{read_tds, write_tds, TDS_MAGIC, TDS_VERSION};

#[derive(Clone, Debug, PartialEq)]
pub struct TensorDataset {
    dims: Vec<usize>,
    labels: Vec<Label>,
    samples: Vec<DenseTensor>,
}

impl TensorDataset {
    pub fn new(dims: Vec<usize>, labels: Vec<Label>, samples: Vec<DenseTensor>) -> Result<Self> {
        if labels.len() != samples.len() {
            return Err(Error::data(format!(
                "{} labels for {} samples",
                labels.len(),
                samples.len()
            )));
        }
        if samples.is_empty() {
            return Err(Error::data("dataset has no samples"));
        }
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::data(format!("invalid sample shape {dims:?}")));
        }
        if let Some((i, s)) = samples.iter().enumerate().find(|(_, s)| s.dims() != dims) {
            return Err(Error::data(format!(
                "sample {i} has shape {:?}, expected {dims:?}",
                s.dims()
            )));
        }
        Ok(TensorDataset {
            dims,
            labels,
            samples,
        })
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn samples(&self) -> &[DenseTensor] {
        &self.samples
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self
            .labels
            .iter()
            .filter(|&&l| l == Label::Positive)
            .count();
        (pos, self.labels.len() - pos)
    }

    /// Training set over the given sample indices.
    pub fn training_set(&self, indices: &[usize]) -> Result<TrainingSet> {
        TrainingSet::from_labeled(indices.iter().map(|&i| (&self.samples[i], self.labels[i])))
    }
}
