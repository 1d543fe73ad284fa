//! The twin-tensorplane classifier.
//!
//! Plane 1 (`W1`) is fit to the positive class: positives enter through
//! `½Σ⟨W1,X⟩²`, negatives are pushed to `⟨W1,Y⟩ ≤ −1` with hinge slack, and
//! the negative-class margin mean and variance are traded off through λ3 and
//! λ1. Plane 2 mirrors this with the classes swapped (λ4, λ2). Both planes
//! pass through the origin; there is no bias.

mod decide;
mod io;
mod margin;
mod subproblem;
mod train;

use std::fmt;

use crate::error::{Error, Result};
use crate::multilinear::{cp_frobenius, CpFactors, DenseTensor};

pub use decide::{decide, distances};
pub use io::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use margin::{margin_mean, margin_variance, primal_objective};
pub use subproblem::{
    assemble_dual, build_mode_cache, recover_beta, representer_residual, update_mode_factor,
    ModeCache,
};
pub use train::{
    initial_factors, relative_change, train, train_with_report, TrainReport, TRAIN_QP_TOL,
};

/// Class label, `+1` or `−1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(Error::data(format!("label {other} is not ±1"))),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

/// Which of the two subproblems / tensorplanes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Plane {
    /// `W1`: near the positives, pushes negatives away.
    Positive,
    /// `W2`: near the negatives, pushes positives away.
    Negative,
}

impl Plane {
    pub const BOTH: [Plane; 2] = [Plane::Positive, Plane::Negative];

    pub fn index(self) -> usize {
        match self {
            Plane::Positive => 0,
            Plane::Negative => 1,
        }
    }

    /// Label of the samples this plane pushes past the margin.
    pub fn push_label(self) -> Label {
        match self {
            Plane::Positive => Label::Negative,
            Plane::Negative => Label::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperparams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub rank: usize,
    pub eps: f64,
    pub max_outer: usize,
    /// Ridge on the dual Gram `G`, relative to `tr(G)/m`.
    pub ridge: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            lambda1: 1.0,
            lambda2: 1.0,
            lambda3: 1.0,
            lambda4: 1.0,
            rank: 1,
            eps: 1e-4,
            max_outer: 5000,
            ridge: 1e-8,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be positive, got {v}")));
            }
        }
        let lambdas = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
            ("lambda4", self.lambda4),
        ];
        for (name, v) in lambdas {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if self.rank == 0 {
            return Err(Error::arg("rank must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::arg("eps must be positive"));
        }
        if self.max_outer == 0 {
            return Err(Error::arg("max_outer must be at least 1"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::arg("ridge must be nonnegative"));
        }
        Ok(())
    }

    /// `(c_reg, c_slack, λ_var, λ_mean)` for one plane.
    pub(crate) fn for_plane(&self, plane: Plane) -> (f64, f64, f64, f64) {
        match plane {
            Plane::Positive => (self.c1, self.c3, self.lambda1, self.lambda3),
            Plane::Negative => (self.c2, self.c4, self.lambda2, self.lambda4),
        }
    }
}

/// Positives `X_p` and negatives `Y_q` of one shared shape.
#[derive(Clone, Debug)]
pub struct TrainingSet {
    positives: Vec<DenseTensor>,
    negatives: Vec<DenseTensor>,
    dims: Vec<usize>,
}

impl TrainingSet {
    pub fn new(positives: Vec<DenseTensor>, negatives: Vec<DenseTensor>) -> Result<Self> {
        if positives.is_empty() || negatives.is_empty() {
            return Err(Error::arg(format!(
                "training needs both classes, got {} positives and {} negatives",
                positives.len(),
                negatives.len()
            )));
        }
        let dims = positives[0].dims().to_vec();
        if let Some(bad) = positives
            .iter()
            .chain(&negatives)
            .find(|s| s.dims() != dims)
        {
            return Err(Error::dim(format!(
                "sample of shape {:?} in a set of shape {:?}",
                bad.dims(),
                dims
            )));
        }
        Ok(TrainingSet {
            positives,
            negatives,
            dims,
        })
    }

    /// Splits labeled samples by class, keeping their relative order.
    pub fn from_labeled<'a>(
        samples: impl IntoIterator<Item = (&'a DenseTensor, Label)>,
    ) -> Result<Self> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (s, l) in samples {
            match l {
                Label::Positive => pos.push(s.clone()),
                Label::Negative => neg.push(s.clone()),
            }
        }
        TrainingSet::new(pos, neg)
    }

    pub fn positives(&self) -> &[DenseTensor] {
        &self.positives
    }

    pub fn negatives(&self) -> &[DenseTensor] {
        &self.negatives
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Samples a plane keeps close (`fit`) and pushes away (`push`).
    pub(crate) fn split_for(&self, plane: Plane) -> (&[DenseTensor], &[DenseTensor]) {
        match plane {
            Plane::Positive => (&self.positives, &self.negatives),
            Plane::Negative => (&self.negatives, &self.positives),
        }
    }

    /// All samples, positives first.
    pub fn all(&self) -> impl Iterator<Item = &DenseTensor> {
        self.positives.iter().chain(&self.negatives)
    }
}

/// A trained pair of tensorplanes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelPair {
    factors: [CpFactors; 2],
    hyper: Hyperparams,
    dims: Vec<usize>,
    norms: [f64; 2],
    converged: bool,
    outer_iters: usize,
}

impl ModelPair {
    pub fn new(
        factors1: CpFactors,
        factors2: CpFactors,
        hyper: Hyperparams,
        converged: bool,
        outer_iters: usize,
    ) -> Result<Self> {
        let dims = factors1.dims();
        if factors2.dims() != dims {
            return Err(Error::dim("the two weight tensors have different shapes"));
        }
        if factors1.rank() != factors2.rank() {
            return Err(Error::dim("the two weight tensors have different ranks"));
        }
        let norms = [cp_frobenius(&factors1), cp_frobenius(&factors2)];
        Ok(ModelPair {
            factors: [factors1, factors2],
            hyper,
            dims,
            norms,
            converged,
            outer_iters,
        })
    }

    pub fn factors(&self, plane: Plane) -> &CpFactors {
        &self.factors[plane.index()]
    }

    pub fn norm(&self, plane: Plane) -> f64 {
        self.norms[plane.index()]
    }

    pub fn hyper(&self) -> &Hyperparams {
        &self.hyper
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.factors[0].rank()
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn outer_iters(&self) -> usize {
        self.outer_iters
    }

    /// Same model with the factors of one plane scaled so that `W_i → t W_i`.
    pub fn with_scaled_plane(&self, plane: Plane, t: f64) -> Result<ModelPair> {
        let mut f = self.factors.clone();
        f[plane.index()] = f[plane.index()].scaled(t);
        let [f1, f2] = f;
        ModelPair::new(f1, f2, self.hyper.clone(), self.converged, self.outer_iters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_hyperparams_are_valid() {
        Hyperparams::default().validate().unwrap();
    }

    #[test]
    fn invalid_hyperparams() {
        let bad = [
            Hyperparams {
                c1: 0.0,
                ..Default::default()
            },
            Hyperparams {
                lambda3: -1.0,
                ..Default::default()
            },
            Hyperparams {
                rank: 0,
                ..Default::default()
            },
            Hyperparams {
                eps: 0.0,
                ..Default::default()
            },
            Hyperparams {
                max_outer: 0,
                ..Default::default()
            },
        ];
        for h in bad {
            assert!(h.validate().is_err(), "{h:?}");
        }
    }

    #[test]
    fn training_set_needs_both_classes() {
        let x = DenseTensor::zeros(vec![2, 2]).unwrap();
        assert!(TrainingSet::new(vec![x.clone()], vec![]).is_err());
        let y = DenseTensor::zeros(vec![4]).unwrap();
        assert!(TrainingSet::new(vec![x.clone()], vec![y]).is_err());
        assert_eq!(TrainingSet::new(vec![x.clone()], vec![x]).unwrap().len(), 2);
    }

    #[test]
    fn labels() {
        assert_eq!(Label::try_from(1).unwrap(), Label::Positive);
        assert_eq!(Label::try_from(-1).unwrap(), Label::Negative);
        assert!(Label::try_from(2).is_err());
        assert_eq!(Label::Negative.to_string(), "-1");
    }
}
