//! Seeded synthetic two-class tensor data.
//!
//! Each class mean is a rank-one tensor whose factor vectors are drawn from
//! a standard normal and rescaled to norm `sqrt(I_j)`, so the mean has unit
//! root-mean-square entries. The two directions are drawn independently:
//! `μ+ = +(sep/2) r+` and `μ− = −(sep/2) r−`. Mirror-image means would make
//! `|⟨W, X⟩|` identically distributed in both classes, which no classifier
//! through the origin can separate by distance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::TensorDataset;
use crate::error::{Error, Result};
use crate::model::Label;
use crate::multilinear::{outer_product, DenseTensor};

fn rank_one(dims: &[usize], rng: &mut ChaCha8Rng) -> Result<DenseTensor> {
    let mut vs = Vec::with_capacity(dims.len());
    for &d in dims {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let target = (d as f64).sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x *= target / n);
        } else {
            v[0] = target;
        }
        vs.push(v);
    }
    let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
    outer_product(&refs)
}

fn check(dims: &[usize], separation: f64) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::arg(format!("invalid sample shape {dims:?}")));
    }
    if !(separation >= 0.0) || !separation.is_finite() {
        return Err(Error::arg("separation must be nonnegative"));
    }
    Ok(())
}

fn draw_means(
    dims: &[usize],
    separation: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(DenseTensor, DenseTensor)> {
    let rp = rank_one(dims, rng)?;
    let rn = rank_one(dims, rng)?;
    Ok((rp.scaled(separation / 2.0), rn.scaled(-separation / 2.0)))
}

/// The class means `(μ+, μ−)` that [`generate_synthetic`] uses for `seed`.
pub fn synthetic_means(
    dims: &[usize],
    separation: f64,
    seed: u64,
) -> Result<(DenseTensor, DenseTensor)> {
    check(dims, separation)?;
    draw_means(dims, separation, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `m1` positives followed by `m2` negatives, each its class mean plus
/// `noise` times i.i.d. standard normal entries.
pub fn generate_synthetic(
    dims: &[usize],
    m1: usize,
    m2: usize,
    separation: f64,
    noise: f64,
    seed: u64,
) -> Result<TensorDataset> {
    check(dims, separation)?;
    if m1 == 0 || m2 == 0 {
        return Err(Error::arg("both classes need at least one sample"));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::arg("noise must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mp, mn) = draw_means(dims, separation, &mut rng)?;
    let mut labels = Vec::with_capacity(m1 + m2);
    let mut samples = Vec::with_capacity(m1 + m2);
    for (mean, label, count) in [(&mp, Label::Positive, m1), (&mn, Label::Negative, m2)] {
        for _ in 0..count {
            let vals = mean
                .values()
                .iter()
                .map(|&mu| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    mu + noise * z
                })
                .collect();
            samples.push(DenseTensor::new(dims.to_vec(), vals)?);
            labels.push(label);
        }
    }
    TensorDataset::new(dims.to_vec(), labels, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::frobenius_norm;

    #[test]
    fn zero_separation_and_noise() {
        let ds = generate_synthetic(&[3, 2], 2, 3, 0.0, 0.0, 1).unwrap();
        assert_eq!(ds.count(), 5);
        assert!(ds
            .samples()
            .iter()
            .all(|s| s.values().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn means_have_expected_scale() {
        let (p, n) = synthetic_means(&[4, 4], 3.0, 7).unwrap();
        assert!((frobenius_norm(&p) - 1.5 * 4.0).abs() < 1e-12);
        assert!((frobenius_norm(&n) - 1.5 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_samples_equal_means() {
        let ds = generate_synthetic(&[2, 3], 2, 1, 2.0, 0.0, 5).unwrap();
        let (p, n) = synthetic_means(&[2, 3], 2.0, 5).unwrap();
        assert_eq!(ds.samples()[0], p);
        assert_eq!(ds.samples()[1], p);
        assert_eq!(ds.samples()[2], n);
        assert_eq!(
            ds.labels(),
            &[Label::Positive, Label::Positive, Label::Negative]
        );
    }

    #[test]
    fn seeded() {
        let a = generate_synthetic(&[4, 4], 5, 5, 3.0, 1.0, 9).unwrap();
        assert_eq!(a, generate_synthetic(&[4, 4], 5, 5, 3.0, 1.0, 9).unwrap());
        assert_ne!(a, generate_synthetic(&[4, 4], 5, 5, 3.0, 1.0, 10).unwrap());
    }
}
