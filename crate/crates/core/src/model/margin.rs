use crate::error::{Error, Result};
use crate::model::{Hyperparams, Label, Plane, TrainingSet};
use crate::multilinear::{cp_frobenius, cp_inner, CpFactors, DenseTensor};

/// `(1/m) Σ y ⟨W, S⟩` over one class.
pub fn margin_mean(f: &CpFactors, samples: &[DenseTensor], label: Label) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::arg("margin mean of an empty sample list"));
    }
    let mut s = 0.0;
    for x in samples {
        s += cp_inner(f, x)?;
    }
    Ok(label.sign() * s / samples.len() as f64)
}

/// `((m−1)/m²) Σ ⟨W, S⟩²`.
///
/// This is the simplified variance expression the dual Gram matrices are
/// built from. It agrees with the textbook variance only when the
/// cross terms `Σ_{p≠p'} ⟨W,S_p⟩⟨W,S_p'⟩` vanish.
pub fn margin_variance(f: &CpFactors, samples: &[DenseTensor]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::arg("margin variance of an empty sample list"));
    }
    let m = samples.len() as f64;
    let mut s = 0.0;
    for x in samples {
        let v = cp_inner(f, x)?;
        s += v * v;
    }
    Ok((m - 1.0) / (m * m) * s)
}

/// Primal objective of one plane with slacks set to their optimal hinge
/// values `max(0, 1 + ⟨W, S⟩)`.
///
/// For plane 1: `½Σ_p⟨W,X_p⟩² + (c1/2)‖W‖² + λ1 γ̂₋ − λ3 γ̄₋ + c3 Σ_q ξ_q`.
pub fn primal_objective(
    f: &CpFactors,
    ts: &TrainingSet,
    hyper: &Hyperparams,
    plane: Plane,
) -> Result<f64> {
    let (c_reg, c_slack, l_var, l_mean) = hyper.for_plane(plane);
    let (fit, push) = ts.split_for(plane);
    let mut fit_sq = 0.0;
    for x in fit {
        let v = cp_inner(f, x)?;
        fit_sq += v * v;
    }
    let m = push.len() as f64;
    let mut push_sq = 0.0;
    let mut push_sum = 0.0;
    let mut hinge = 0.0;
    for y in push {
        let v = cp_inner(f, y)?;
        push_sq += v * v;
        push_sum += v;
        hinge += (1.0 + v).max(0.0);
    }
    let variance = (m - 1.0) / (m * m) * push_sq;
    let mean = plane.push_label().sign() * push_sum / m;
    let norm = cp_frobenius(f);
    Ok(
        0.5 * fit_sq + 0.5 * c_reg * norm * norm + l_var * variance - l_mean * mean
            + c_slack * hinge,
    )
}
