//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string or throws a string error. The plain
//! Rust functions behind them are public so they can be tested natively.

use npstm::dataset::generate_synthetic;
use npstm::eval::{friedman_chi2, nemenyi_cd};
use npstm::model::{decide, train, Hyperparams, Plane, TrainingSet};
use npstm::multilinear::{cp_reconstruct, DenseTensor};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn text(e: npstm::Error) -> String {
    e.to_string()
}

fn hyper(rank: usize, c: f64, lambda: f64, seed: u64) -> Hyperparams {
    Hyperparams {
        c1: c,
        c2: c,
        c3: c,
        c4: c,
        lambda1: lambda,
        lambda2: lambda,
        lambda3: lambda,
        lambda4: lambda,
        rank,
        max_outer: 500,
        seed,
        ..Hyperparams::default()
    }
}

/// Trains on a synthetic `rows × cols` problem and scores a held-out half.
///
/// Output: `{rows, cols, w1, w2, train_accuracy, test_accuracy, outer_iters,
/// converged}`, with both weight matrices column-major.
#[allow(clippy::too_many_arguments)]
pub fn train_heatmap_json(
    rows: usize,
    cols: usize,
    per_class: usize,
    sep: f64,
    noise: f64,
    rank: usize,
    c: f64,
    lambda: f64,
    seed: u64,
) -> Result<String, String> {
    if per_class == 0 {
        return Err("need at least one sample per class".into());
    }
    let ds = generate_synthetic(
        &[rows, cols],
        2 * per_class,
        2 * per_class,
        sep,
        noise,
        seed,
    )
    .map_err(text)?;
    let m = 2 * per_class;
    let train_idx: Vec<usize> = (0..per_class).chain(m..m + per_class).collect();
    let test_idx: Vec<usize> = (per_class..m).chain(m + per_class..2 * m).collect();
    let h = hyper(rank, c, lambda, seed);
    h.validate().map_err(text)?;
    let model = train(&ds.training_set(&train_idx).map_err(text)?, &h).map_err(text)?;
    let score = |idx: &[usize]| -> Result<f64, String> {
        let mut hit = 0;
        for &i in idx {
            if decide(&model, &ds.samples()[i]).map_err(text)? == ds.labels()[i] {
                hit += 1;
            }
        }
        Ok(hit as f64 / idx.len() as f64)
    };
    let w = |p| {
        cp_reconstruct(model.factors(p))
            .map(DenseTensor::into_values)
            .map_err(text)
    };
    let out = json!({
        "rows": rows,
        "cols": cols,
        "w1": w(Plane::Positive)?,
        "w2": w(Plane::Negative)?,
        "train_accuracy": score(&train_idx)?,
        "test_accuracy": score(&test_idx)?,
        "outer_iters": model.outer_iters(),
        "converged": model.converged(),
    });
    Ok(out.to_string())
}

/// Fits order-1 tensors (plain 2-D points) and labels a `steps × steps` grid.
///
/// `points` is a JSON array of `[x, y, label]` with labels ±1. Output:
/// `{xmin, xmax, ymin, ymax, steps, labels, w1, w2}` where `labels` is
/// row-major from `ymin` upwards.
pub fn decision_regions_json(
    points: &str,
    c: f64,
    lambda: f64,
    steps: usize,
) -> Result<String, String> {
    let parsed: Vec<[f64; 3]> =
        serde_json::from_str(points).map_err(|e| format!("bad points: {e}"))?;
    if !(2..=400).contains(&steps) {
        return Err("steps must be between 2 and 400".into());
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for [x, y, l] in &parsed {
        if !x.is_finite() || !y.is_finite() {
            return Err("coordinates must be finite".into());
        }
        let t = DenseTensor::new(vec![2], vec![*x, *y]).map_err(text)?;
        match *l as i64 {
            1 => pos.push(t),
            -1 => neg.push(t),
            _ => return Err(format!("label {l} is not +1 or -1")),
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err("place at least one point of each class".into());
    }
    let h = hyper(1, c, lambda, 0);
    h.validate().map_err(text)?;
    let model = train(&TrainingSet::new(pos, neg).map_err(text)?, &h).map_err(text)?;

    let extent = |k: usize| {
        let (lo, hi) = parsed
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p[k]), b.max(p[k]))
            });
        let pad = ((hi - lo) * 0.15).max(1.0);
        (lo - pad, hi + pad)
    };
    let (xmin, xmax) = extent(0);
    let (ymin, ymax) = extent(1);
    let mut labels = Vec::with_capacity(steps * steps);
    for r in 0..steps {
        let y = ymin + (ymax - ymin) * (r as f64 + 0.5) / steps as f64;
        for q in 0..steps {
            let x = xmin + (xmax - xmin) * (q as f64 + 0.5) / steps as f64;
            let t = DenseTensor::new(vec![2], vec![x, y]).map_err(text)?;
            labels.push(decide(&model, &t).map_err(text)?.as_i8());
        }
    }
    let w = |p| {
        cp_reconstruct(model.factors(p))
            .map(DenseTensor::into_values)
            .map_err(text)
    };
    let out = json!({
        "xmin": xmin, "xmax": xmax, "ymin": ymin, "ymax": ymax,
        "steps": steps,
        "labels": labels,
        "w1": w(Plane::Positive)?,
        "w2": w(Plane::Negative)?,
    });
    Ok(out.to_string())
}

/// Friedman statistic and Nemenyi critical difference from average ranks.
///
/// `avg_ranks` is comma- or whitespace-separated. Output: `{k, n, chi2, dof,
/// p, cd}` with `cd` null when the q table has no entry.
pub fn friedman_json(avg_ranks: &str, n: usize, alpha: f64) -> Result<String, String> {
    let ranks = avg_ranks
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("not a number: {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (chi2, dof, p) = friedman_chi2(&ranks, n).map_err(text)?;
    let cd = nemenyi_cd(ranks.len(), n, alpha).ok();
    Ok(json!({ "k": ranks.len(), "n": n, "chi2": chi2, "dof": dof, "p": p, "cd": cd }).to_string())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn train_heatmap(
    rows: usize,
    cols: usize,
    per_class: usize,
    sep: f64,
    noise: f64,
    rank: usize,
    c: f64,
    lambda: f64,
    seed: u32,
) -> Result<String, JsValue> {
    train_heatmap_json(
        rows,
        cols,
        per_class,
        sep,
        noise,
        rank,
        c,
        lambda,
        seed as u64,
    )
    .map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn decision_regions(
    points: &str,
    c: f64,
    lambda: f64,
    steps: usize,
) -> Result<String, JsValue> {
    decision_regions_json(points, c, lambda, steps).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn friedman(avg_ranks: &str, n: usize, alpha: f64) -> Result<String, JsValue> {
    friedman_json(avg_ranks, n, alpha).map_err(JsValue::from)
}
