//! Alternating projection over modes for both planes.

use log::{debug, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::boxqp;
use crate::error::{Error, Result};
use crate::model::subproblem::{build_from_unfolded, unfold_all};
use crate::model::{
    assemble_dual, primal_objective, recover_beta, representer_residual, update_mode_factor,
    Hyperparams, ModelPair, Plane, TrainingSet,
};
use crate::multilinear::{cp_frobenius, CpFactors, Matrix};

/// KKT tolerance for the mode duals. Tighter than the solver default so the
/// primal objective stays monotone well inside `1e-8` relative slack.
pub const TRAIN_QP_TOL: f64 = 1e-11;

/// Diagnostics collected during one training run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Primal objective of each plane at the start and after each of its
    /// mode updates.
    pub objectives: [Vec<f64>; 2],
    /// Relative representer residual after every `recover_beta`.
    pub representer_residuals: Vec<f64>,
    /// Relative weight change of each plane per outer iteration.
    pub rel_changes: Vec<[f64; 2]>,
    pub qp_solves: usize,
    pub qp_sweeps: usize,
    pub qp_unconverged: usize,
    pub max_kkt: f64,
    pub outer_iters: usize,
    pub converged: bool,
}

/// Seeded standard-normal factors with unit-norm columns, plane 1 first.
pub fn initial_factors(dims: &[usize], rank: usize, seed: u64) -> Result<[CpFactors; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Result<CpFactors> {
        let mut mats = Vec::with_capacity(dims.len());
        for &d in dims {
            let mut u = Matrix::zeros(d, rank);
            for r in 0..rank {
                let col = u.col_mut(r);
                for v in col.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let n = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n > 0.0 {
                    col.iter_mut().for_each(|v| *v /= n);
                } else {
                    col[0] = 1.0;
                }
            }
            mats.push(u);
        }
        CpFactors::new(mats)
    };
    Ok([draw()?, draw()?])
}

/// `‖new − old‖ / ‖old‖`, computed from factors. A zero `old` gives 0 when
/// `new` is also zero and infinity otherwise.
pub fn relative_change(new: &CpFactors, old: &CpFactors) -> Result<f64> {
    let diff = cp_frobenius(&new.difference(old)?);
    let base = cp_frobenius(old);
    Ok(if base > 0.0 {
        diff / base
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    })
}

pub fn train(ts: &TrainingSet, hyper: &Hyperparams) -> Result<ModelPair> {
    train_with_report(ts, hyper).map(|(m, _)| m)
}

pub fn train_with_report(
    ts: &TrainingSet,
    hyper: &Hyperparams,
) -> Result<(ModelPair, TrainReport)> {
    hyper.validate()?;
    let dims = ts.dims().to_vec();
    let order = dims.len();
    let m1 = ts.positives().len();
    let unfolded = (0..order)
        .map(|j| unfold_all(ts, j))
        .collect::<Result<Vec<_>>>()?;

    let mut factors = initial_factors(&dims, hyper.rank, hyper.seed)?;
    let mut warm: [Vec<Option<Vec<f64>>>; 2] = [vec![None; order], vec![None; order]];
    let mut report = TrainReport::default();
    for plane in Plane::BOTH {
        report.objectives[plane.index()].push(primal_objective(
            &factors[plane.index()],
            ts,
            hyper,
            plane,
        )?);
    }

    let mut converged = false;
    let mut iters = 0;
    while !converged && iters < hyper.max_outer {
        iters += 1;
        let previous = factors.clone();
        for (j, unf) in unfolded.iter().enumerate() {
            for plane in Plane::BOTH {
                let p = plane.index();
                let tag = |e: Error| match e {
                    Error::Numeric(msg) => Error::numeric(format!(
                        "outer iteration {iters}, mode {j}, plane {}: {msg}",
                        p + 1
                    )),
                    other => other,
                };
                let cache =
                    build_from_unfolded(&factors[p], unf, m1, j, plane, hyper).map_err(tag)?;
                let qp = assemble_dual(&cache, hyper).map_err(tag)?;
                let sol = boxqp::solve(
                    &qp,
                    TRAIN_QP_TOL,
                    qp.default_max_sweeps(),
                    warm[p][j].as_deref(),
                )
                .map_err(tag)?;
                report.qp_solves += 1;
                report.qp_sweeps += sol.iterations;
                report.max_kkt = report.max_kkt.max(sol.kkt_residual);
                if !sol.converged {
                    report.qp_unconverged += 1;
                }
                let beta = recover_beta(&cache, &sol.alpha, hyper).map_err(tag)?;
                report
                    .representer_residuals
                    .push(representer_residual(&cache, &sol.alpha, &beta, hyper)?);
                let u = update_mode_factor(&cache, &beta)?;
                if !u.is_finite() {
                    return Err(tag(Error::numeric("non-finite factor update")));
                }
                factors[p].set_factor(j, u)?;
                warm[p][j] = Some(sol.alpha);
                report.objectives[p].push(primal_objective(&factors[p], ts, hyper, plane)?);
            }
        }
        let changes = [
            relative_change(&factors[0], &previous[0])?,
            relative_change(&factors[1], &previous[1])?,
        ];
        debug!(
            "outer iteration {iters}: relative changes {:.3e} {:.3e}",
            changes[0], changes[1]
        );
        report.rel_changes.push(changes);
        converged = changes.iter().all(|&c| c <= hyper.eps);
    }
    if !converged {
        warn!("training stopped after {iters} outer iterations without meeting eps");
    }
    report.outer_iters = iters;
    report.converged = converged;
    let [f1, f2] = factors;
    let model = ModelPair::new(f1, f2, hyper.clone(), converged, iters)?;
    Ok((model, report))
}
