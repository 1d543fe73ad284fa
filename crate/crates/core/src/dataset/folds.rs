//! Repeated stratified k-fold splits.

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TensorDataset;
use crate::error::{Error, Result};
use crate::model::Label;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    /// `assignments[repeat][fold]`: sorted test indices.
    pub assignments: Vec<Vec<Vec<usize>>>,
}

impl FoldPlan {
    pub fn test_indices(&self, repeat: usize, fold: usize) -> &[usize] {
        &self.assignments[repeat][fold]
    }

    /// Every index not in the given test fold, ascending.
    pub fn train_indices(&self, repeat: usize, fold: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self.assignments[repeat]
            .iter()
            .enumerate()
            .filter(|&(f, _)| f != fold)
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    }
}

/// Seed of the shuffle stream for one repeat.
pub(crate) fn repeat_seed(seed: u64, repeat: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(repeat as u64)
}

/// For each repeat, shuffle each class separately and deal positives then
/// negatives round-robin into `k` folds, continuing the rotation across the
/// class boundary so fold sizes differ by at most one.
pub fn make_folds(ds: &TensorDataset, k: usize, repeats: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::arg(format!("need at least 2 folds, got {k}")));
    }
    if k > ds.count() {
        return Err(Error::arg(format!("{k} folds for {} samples", ds.count())));
    }
    if repeats == 0 {
        return Err(Error::arg("need at least one repeat"));
    }
    let (pos, neg) = ds.class_counts();
    if pos < k || neg < k {
        warn!("class sizes {pos}/{neg} are below {k} folds; some folds miss a class");
    }
    let mut assignments = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut rng = ChaCha8Rng::seed_from_u64(repeat_seed(seed, r));
        let mut folds = vec![Vec::new(); k];
        let mut slot = 0;
        for class in [Label::Positive, Label::Negative] {
            let mut idx: Vec<usize> = (0..ds.count())
                .filter(|&i| ds.labels()[i] == class)
                .collect();
            idx.shuffle(&mut rng);
            for i in idx {
                folds[slot % k].push(i);
                slot += 1;
            }
        }
        folds.iter_mut().for_each(|f| f.sort_unstable());
        assignments.push(folds);
    }
    Ok(FoldPlan {
        folds: k,
        repeats,
        seed,
        assignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_synthetic;

    #[test]
    fn two_folds_of_four() {
        let ds = generate_synthetic(&[2], 2, 2, 1.0, 1.0, 0).unwrap();
        let plan = make_folds(&ds, 2, 1, 3).unwrap();
        for f in 0..2 {
            let t = plan.test_indices(0, f);
            assert_eq!(t.len(), 2);
            assert_eq!(t.iter().filter(|&&i| i < 2).count(), 1);
        }
    }

    #[test]
    fn partition_and_train_complement() {
        let ds = generate_synthetic(&[2], 7, 5, 1.0, 1.0, 0).unwrap();
        let plan = make_folds(&ds, 3, 2, 11).unwrap();
        for r in 0..2 {
            let mut all: Vec<usize> = plan.assignments[r].concat();
            all.sort_unstable();
            assert_eq!(all, (0..12).collect::<Vec<_>>());
            let train = plan.train_indices(r, 1);
            assert_eq!(train.len() + plan.test_indices(r, 1).len(), 12);
        }
        assert_ne!(plan.assignments[0], plan.assignments[1]);
        assert_eq!(plan, make_folds(&ds, 3, 2, 11).unwrap());
    }

    #[test]
    fn too_many_folds() {
        let ds = generate_synthetic(&[2], 1, 1, 1.0, 1.0, 0).unwrap();
        assert!(make_folds(&ds, 3, 1, 0).is_err());
        assert!(make_folds(&ds, 1, 1, 0).is_err());
    }
}
