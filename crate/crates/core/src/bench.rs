//! Synthetic instances and the three-way comparison harness.
//!
//! Methods optimize different objectives, so each selected set is scored by
//! the set function `f(S)` from [`crate::submodular`], the one objective that
//! is defined on bare sets.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use crate::instance::{build_q, fmt_f64, FrameRecord, SelectionConfig, SelectionInstance};
use crate::matrix::Matrix;
use crate::mcoss::solve_mcoss;
use crate::submodular::{eval_f, greedy_select};
use crate::thresh::solve_threshmcoss;

pub const COMMON_METRIC: &str = "f_S";

/// Uniform `[0, 1)` dissimilarities and losses. The new block is symmetric
/// with a zero diagonal.
pub fn generate_synthetic(m: usize, r: usize, seed: u64) -> SelectionInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d_new = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let v: f64 = rng.gen();
            d_new.set(i, j, v);
            d_new.set(j, i, v);
        }
    }
    let d_old = Matrix::from_fn(m, r, |_, _| rng.gen());
    let loss_new = (0..m).map(|_| rng.gen()).collect();
    let loss_old = (0..r).map(|_| rng.gen()).collect();
    SelectionInstance { d_old, d_new, loss_old, loss_new }
}

/// Cardinality handed to the greedy method: `ceil(frac * m)`, clamped to `1..=m`.
pub fn greedy_k(frac: f64, m: usize) -> usize {
    ((frac * m as f64 - 1e-9).ceil() as usize).clamp(1, m.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub instance_id: u64,
    pub f_mcoss: Option<f64>,
    pub f_thresh: Option<f64>,
    pub f_submod_runs: Vec<f64>,
    pub common_metric: &'static str,
    pub errors: Vec<String>,
}

impl ComparisonRow {
    pub fn submod_median(&self) -> Option<f64> {
        median(&self.f_submod_runs)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Seed of greedy run `run` on instance `instance_id`.
pub fn run_seed(instance_id: u64, run: usize) -> u64 {
    (instance_id << 32) | run as u64
}

pub fn compare_methods(instances: &[(u64, SelectionInstance)], config: &SelectionConfig, submod_runs: usize) -> Vec<ComparisonRow> {
    compare_methods_with(instances, config, submod_runs, Execution::default())
}

pub fn compare_methods_with(
    instances: &[(u64, SelectionInstance)],
    config: &SelectionConfig,
    submod_runs: usize,
    exec: Execution,
) -> Vec<ComparisonRow> {
    exec.map(instances.len(), |n| {
        let (id, inst) = &instances[n];
        let q = build_q(inst, config.rho);
        let mut errors = Vec::new();
        let mut record = |label: &str, r: Result<f64>| match r {
            Ok(v) => Some(v),
            Err(e) => {
                errors.push(format!("{label}: {e}"));
                None
            }
        };
        let f_mcoss = record("mcoss", solve_mcoss(inst, config).and_then(|(_, rep)| eval_f(&rep.selected_new, &q)));
        let f_thresh = record("threshmcoss", solve_threshmcoss(inst, config).and_then(|(_, rep)| eval_f(&rep.selected_new, &q)));
        let k = greedy_k(config.frac, inst.m());
        let runs = exec.map(submod_runs, |run| greedy_select(&q, k, run_seed(*id, run)).map(|s| s.f_value));
        let mut f_submod_runs = Vec::with_capacity(submod_runs);
        for (run, r) in runs.into_iter().enumerate() {
            match r {
                Ok(v) => f_submod_runs.push(v),
                Err(e) => errors.push(format!("submcoss run {run}: {e}")),
            }
        }
        ComparisonRow { instance_id: *id, f_mcoss, f_thresh, f_submod_runs, common_metric: COMMON_METRIC, errors }
    })
}

/// `instance_id,method,run,f_value`, one line per method run. Failed solves
/// are written as `NaN`.
pub fn write_comparison_csv(rows: &[ComparisonRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "instance_id,method,run,f_value")?;
    let value = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), fmt_f64);
    for row in rows {
        writeln!(out, "{},mcoss,0,{}", row.instance_id, value(row.f_mcoss))?;
        writeln!(out, "{},threshmcoss,0,{}", row.instance_id, value(row.f_thresh))?;
        for (run, &v) in row.f_submod_runs.iter().enumerate() {
            writeln!(out, "{},submcoss,{run},{}", row.instance_id, fmt_f64(v))?;
        }
    }
    Ok(())
}

/// A clustered synthetic stream: `batches` batches of `batch_size` frames
/// with `dim` features drawn around a handful of fixed centers. Losses are
/// left empty for the scorer to fill.
pub fn generate_stream(batches: usize, batch_size: usize, dim: usize, seed: u64) -> Vec<FrameRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..4).map(|_| (0..dim).map(|_| rng.gen()).collect()).collect();
    let mut frames = Vec::with_capacity(batches * batch_size);
    for t in 1..=batches {
        for i in 0..batch_size {
            let c = &centers[rng.gen_range(0..centers.len())];
            let features = c.iter().map(|&x| x + rng.gen_range(-0.1..0.1)).collect();
            frames.push(FrameRecord::new(format!("b{t}f{i}"), t, features));
        }
    }
    frames
}
