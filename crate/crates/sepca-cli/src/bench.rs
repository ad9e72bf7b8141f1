//! Monte Carlo benchmark harness and detection boundary curves.
//!
//! One experiment sweeps a grid of (n, theta) cells at fixed p and sigma.
//! Every trial inside a cell draws one matrix from a per-trial seed derived
//! from the root seed, runs every configured algorithm on the same draw, and
//! scores the estimate against the ground truth. Trials run in parallel;
//! aggregation is order independent, so identical configurations reproduce
//! identical output tables within one build.

use crate::config::{BenchAlgorithm, ExperimentConfig, SigmaMode};
use crate::sigma::estimate_sigma;
use crate::{from_core, CliError};
use rayon::prelude::*;
use sepca::rng::derive_seed;
use sepca::{
    beta_crit, estimate_two_stage, fdr_penalty, fdr_select, generate_data, hc_select, l2_loss,
    make_u, make_v, pvalues, rank1_svd, select_fwer, support_metrics, Algorithm, BoundarySpec,
    DataMatrix, SignalModel, StatKind,
};
use serde::Serialize;

/// Scores for one algorithm on one trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialOutcome {
    pub loss: f64,
    pub tpr: f64,
    pub fdr: f64,
    pub hamming: usize,
    pub selected: usize,
}

/// One aggregated output row.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub algorithm: String,
    pub n: usize,
    pub theta: f64,
    pub trials: usize,
    pub mean_loss: f64,
    pub median_loss: f64,
    pub tpr: f64,
    pub fdr: f64,
    pub hamming: f64,
    pub selected_mean: f64,
}

/// Run the full grid; rows come back sorted by (algorithm, n, theta).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    cfg.validate()?;
    if let crate::config::VProfileConfig::Custom { .. } = &cfg.v_profile {
        let realized = make_v(&cfg.v_profile.realize(cfg.n_grid[0])?).map_err(from_core)?;
        if let Some(scale) = realized.applied_scale {
            if (scale - 1.0).abs() > 1e-12 {
                eprintln!("sepca: custom v normalized by factor {scale:.6e}");
            }
        }
    }
    let mut rows = Vec::new();
    let mut cell_idx = 0u64;
    for &n in &cfg.n_grid {
        for &theta in &cfg.theta_grid {
            let per_algorithm = run_cell(cfg, cell_idx, n, theta)?;
            for (alg, outcomes) in cfg.algorithms.iter().zip(per_algorithm) {
                rows.push(aggregate(alg.name(), n, theta, &outcomes));
            }
            cell_idx += 1;
        }
    }
    rows.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then(a.n.cmp(&b.n))
            .then(a.theta.total_cmp(&b.theta))
    });
    Ok(rows)
}

/// Run one (n, theta) cell; returns outcomes per algorithm, aligned with
/// `cfg.algorithms`, each of length `cfg.trials`.
pub fn run_cell(
    cfg: &ExperimentConfig,
    cell_idx: u64,
    n: usize,
    theta: f64,
) -> Result<Vec<Vec<TrialOutcome>>, CliError> {
    let u = make_u(cfg.p, &cfg.u_spec.to_uspec()).map_err(from_core)?;
    let v = make_v(&cfg.v_profile.realize(n)?)
        .map_err(from_core)?
        .vector;
    let model = SignalModel::new(theta, u, v, cfg.sigma).map_err(from_core)?;

    let per_trial: Result<Vec<Vec<TrialOutcome>>, CliError> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(cfg.seed, cell_idx, trial);
            run_trial(cfg, &model, seed)
        })
        .collect();
    let per_trial = per_trial?;

    // Transpose to per-algorithm vectors.
    let mut per_algorithm = vec![Vec::with_capacity(cfg.trials); cfg.algorithms.len()];
    for trial in per_trial {
        for (slot, outcome) in trial.into_iter().enumerate() {
            per_algorithm[slot].push(outcome);
        }
    }
    Ok(per_algorithm)
}

fn run_trial(
    cfg: &ExperimentConfig,
    model: &SignalModel,
    seed: u64,
) -> Result<Vec<TrialOutcome>, CliError> {
    let x = generate_data(model, seed);
    let sigma_used = match cfg.sigma_mode {
        SigmaMode::Known => cfg.sigma,
        SigmaMode::Estimated => {
            let est = estimate_sigma(&x)?;
            if est.degenerate || !(est.sigma > 0.0) {
                return Err(CliError::numeric(
                    "estimated sigma degenerated to zero; cannot threshold",
                ));
            }
            est.sigma
        }
    };
    cfg.algorithms
        .iter()
        .map(|alg| run_algorithm(cfg, model, &x, sigma_used, *alg))
        .collect()
}

fn run_algorithm(
    cfg: &ExperimentConfig,
    model: &SignalModel,
    x: &DataMatrix,
    sigma: f64,
    alg: BenchAlgorithm,
) -> Result<TrialOutcome, CliError> {
    let truth = model.support();
    let p = model.p();
    let (u_hat, selected): (Vec<f64>, Vec<usize>) = match alg {
        BenchAlgorithm::SvdBaseline => {
            let svd = rank1_svd(x);
            (svd.u_hat, (0..p).collect())
        }
        BenchAlgorithm::Sepca(which) => {
            let selection = match which {
                Algorithm::Sum => select_fwer(x, StatKind::Sum, sigma, cfg.sum_variant.into())
                    .map_err(from_core)?,
                Algorithm::Ell1 => select_fwer(x, StatKind::Ell1, sigma, cfg.sum_variant.into())
                    .map_err(from_core)?,
                Algorithm::Ell2 => select_fwer(x, StatKind::Ell2, sigma, cfg.sum_variant.into())
                    .map_err(from_core)?,
                Algorithm::HcSum => {
                    let pv = pvalues(x, StatKind::Sum, sigma).map_err(from_core)?;
                    hc_select(&pv, cfg.hc_rule.into())
                        .map_err(from_core)?
                        .to_selection(Algorithm::HcSum)
                }
                Algorithm::HcEll2 => {
                    let pv = pvalues(x, StatKind::Ell2, sigma).map_err(from_core)?;
                    hc_select(&pv, cfg.hc_rule.into())
                        .map_err(from_core)?
                        .to_selection(Algorithm::HcEll2)
                }
                Algorithm::Fdr => {
                    let pen = fdr_penalty(p, cfg.zeta, cfg.nu, 1.0).map_err(from_core)?;
                    fdr_select(x, sigma, &pen).map_err(from_core)?
                }
            };
            let est = estimate_two_stage(x, &selection).map_err(from_core)?;
            if est.empty && cfg.svd_fallback {
                (rank1_svd(x).u_hat, selection.selected)
            } else {
                (est.u_hat, selection.selected)
            }
        }
    };
    let metrics = support_metrics(truth, &selected, p).map_err(from_core)?;
    Ok(TrialOutcome {
        loss: l2_loss(model.u(), &u_hat),
        tpr: metrics.tpr,
        fdr: metrics.fdr,
        hamming: metrics.hamming,
        selected: selected.len(),
    })
}

fn aggregate(algorithm: String, n: usize, theta: f64, outcomes: &[TrialOutcome]) -> ResultRow {
    let t = outcomes.len() as f64;
    let mut losses: Vec<f64> = outcomes.iter().map(|o| o.loss).collect();
    losses.sort_unstable_by(|a, b| a.total_cmp(b));
    let m = losses.len() / 2;
    let median_loss = if losses.len() % 2 == 1 {
        losses[m]
    } else {
        0.5 * (losses[m - 1] + losses[m])
    };
    ResultRow {
        algorithm,
        n,
        theta,
        trials: outcomes.len(),
        mean_loss: outcomes.iter().map(|o| o.loss).sum::<f64>() / t,
        median_loss,
        tpr: outcomes.iter().map(|o| o.tpr).sum::<f64>() / t,
        fdr: outcomes.iter().map(|o| o.fdr).sum::<f64>() / t,
        hamming: outcomes.iter().map(|o| o.hamming as f64).sum::<f64>() / t,
        selected_mean: outcomes.iter().map(|o| o.selected as f64).sum::<f64>() / t,
    }
}

/// Detection boundary curve request.
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub p: usize,
    pub sigma: f64,
    pub n_grid: Vec<usize>,
    pub v_profile: crate::config::VProfileConfig,
    pub algorithms: Vec<Algorithm>,
    /// Sparsity level fed into the HC sparsity index.
    pub s: usize,
    /// Model size for the penalized FDR boundary.
    pub k_hat: usize,
    pub zeta: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub algorithm: String,
    pub n: usize,
    pub beta_crit: f64,
}

/// Evaluate `beta_crit` over the n grid, regenerating v at every n. Rows are
/// emitted sorted by (algorithm, n).
pub fn theory_curves(cfg: &CurveConfig) -> Result<Vec<CurveRow>, CliError> {
    if cfg.n_grid.is_empty() {
        return Err(CliError::config("n grid must be nonempty"));
    }
    let mut rows = Vec::new();
    for &alg in &cfg.algorithms {
        for &n in &cfg.n_grid {
            let v = make_v(&cfg.v_profile.realize(n)?)
                .map_err(from_core)?
                .vector;
            let spec = BoundarySpec::new(alg, n, cfg.p, cfg.sigma)
                .with_v(v)
                .with_sparsity(cfg.s)
                .with_k_hat(cfg.k_hat)
                .with_fdr_params(cfg.zeta, cfg.nu);
            let value = beta_crit(&spec).map_err(from_core)?;
            rows.push(CurveRow {
                algorithm: alg.name().to_string(),
                n,
                beta_crit: value,
            });
        }
    }
    rows.sort_by(|a, b| a.algorithm.cmp(&b.algorithm).then(a.n.cmp(&b.n)));
    Ok(rows)
}
