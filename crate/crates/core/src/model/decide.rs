use log::warn;

use crate::error::{Error, Result};
use crate::model::{Label, ModelPair, Plane};
use crate::multilinear::{cp_inner, DenseTensor};

/// Normalized distances `|⟨W_i, X⟩| / ‖W_i‖` to both planes. A plane with
/// zero norm is infinitely far.
pub fn distances(model: &ModelPair, x: &DenseTensor) -> Result<[f64; 2]> {
    if x.dims() != model.dims() {
        return Err(Error::dim(format!(
            "sample of shape {:?} for a model of shape {:?}",
            x.dims(),
            model.dims()
        )));
    }
    let mut d = [0.0; 2];
    for plane in Plane::BOTH {
        let n = model.norm(plane);
        d[plane.index()] = if n > 0.0 {
            cp_inner(model.factors(plane), x)?.abs() / n
        } else {
            f64::INFINITY
        };
    }
    Ok(d)
}

/// Class of the nearer plane; ties go to `+1`.
pub fn decide(model: &ModelPair, x: &DenseTensor) -> Result<Label> {
    let [d1, d2] = distances(model, x)?;
    if d1.is_infinite() && d2.is_infinite() {
        warn!("both weight tensors are zero; predicting +1");
    }
    Ok(if d1 <= d2 {
        Label::Positive
    } else {
        Label::Negative
    })
}
