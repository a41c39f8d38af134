//! Online selection over a sequence of batches.
//!
//! Each step scores the incoming batch and the current representatives,
//! builds dissimilarities of the batch against `R ∪ X`, solves the chosen
//! formulation and appends the selected incoming frames to `R`. Frames are
//! never removed from `R`.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::greedy_k;
use crate::error::{OssError, Result};
use crate::instance::{
    build_q, dissimilarity_from_features, euclidean, shift_nonnegative, to_json_17g, FrameRecord, SelectionConfig, SelectionInstance,
};
use crate::matrix::Matrix;
use crate::mcoss::solve_mcoss;
use crate::submodular::greedy_select;
use crate::thresh::solve_threshmcoss;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mcoss,
    #[default]
    Threshmcoss,
    Submcoss,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mcoss => "mcoss",
            Method::Threshmcoss => "threshmcoss",
            Method::Submcoss => "submcoss",
        })
    }
}

impl FromStr for Method {
    type Err = OssError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mcoss" => Ok(Method::Mcoss),
            "threshmcoss" | "thresh" => Ok(Method::Threshmcoss),
            "submcoss" | "submodular" => Ok(Method::Submcoss),
            _ => Err(OssError::Config(format!("unknown method {s:?} (mcoss, threshmcoss, submcoss)"))),
        }
    }
}

/// Per-frame nonnegative losses for `batch`, given the current representatives.
pub trait Scorer {
    fn score(&self, batch: &[FrameRecord], representatives: &[FrameRecord]) -> Result<Vec<f64>>;
}

/// Squared distance to the nearest representative (to the batch mean when
/// there are none), divided by the batch maximum.
#[derive(Debug, Clone, Copy, Default)]
pub struct ResidualScorer;

impl Scorer for ResidualScorer {
    fn score(&self, batch: &[FrameRecord], representatives: &[FrameRecord]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Ok(Vec::new());
        }
        let raw: Vec<f64> = if representatives.is_empty() {
            let dim = batch[0].features.len();
            let mut mean = vec![0.0; dim];
            for f in batch {
                for (m, v) in mean.iter_mut().zip(&f.features) {
                    *m += v / batch.len() as f64;
                }
            }
            batch.iter().map(|f| euclidean(&f.features, &mean).powi(2)).collect()
        } else {
            batch
                .iter()
                .map(|f| representatives.iter().map(|r| euclidean(&f.features, &r.features).powi(2)).fold(f64::INFINITY, f64::min))
                .collect()
        };
        let max = raw.iter().copied().fold(0.0, f64::max);
        Ok(if max > 0.0 { raw.iter().map(|v| v / max).collect() } else { vec![0.0; raw.len()] })
    }
}

/// Passes stored losses through, shifted up when any is negative.
#[derive(Debug, Clone, Copy, Default)]
pub struct PrecomputedScorer;

impl Scorer for PrecomputedScorer {
    fn score(&self, batch: &[FrameRecord], _representatives: &[FrameRecord]) -> Result<Vec<f64>> {
        let mut losses = batch.iter().map(|f| f.loss.ok_or_else(|| OssError::MissingLoss(f.id.clone()))).collect::<Result<Vec<_>>>()?;
        shift_nonnegative(&mut losses);
        Ok(losses)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub objective: f64,
    pub selected: Vec<String>,
    pub r_size: usize,
    pub ms: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamState {
    pub representatives: Vec<FrameRecord>,
    pub t: usize,
    pub history: Vec<StepRecord>,
}

impl StreamState {
    /// Starts from an existing representative set.
    pub fn with_representatives(representatives: Vec<FrameRecord>) -> Self {
        StreamState { representatives, ..Default::default() }
    }

    pub fn write_history(&self, mut out: impl Write) -> Result<()> {
        for rec in &self.history {
            writeln!(out, "{}", to_json_17g(rec)?)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StreamOptions {
    pub method: Method,
    /// Seed of the greedy method; step `t` uses `seed + t`.
    pub seed: u64,
    /// Record wall time per step. Off keeps the history byte-reproducible.
    pub timing: bool,
}

/// Builds the step instance: losses from the scorer, dissimilarities of the
/// batch against `R ∪ X` normalized together.
pub fn step_instance(batch: &[FrameRecord], representatives: &[FrameRecord], scorer: &dyn Scorer) -> Result<SelectionInstance> {
    let loss_new = scorer.score(batch, representatives)?;
    let loss_old = if representatives.is_empty() { Vec::new() } else { scorer.score(representatives, representatives)? };
    let (m, r) = (batch.len(), representatives.len());
    let mut columns = representatives.to_vec();
    columns.extend_from_slice(batch);
    let d = dissimilarity_from_features(batch, &columns)?;
    let d_old = Matrix::from_fn(m, r, |i, j| d.get(i, j));
    let d_new = Matrix::from_fn(m, m, |i, j| d.get(i, r + j));
    SelectionInstance::new(d_old, d_new, loss_old, loss_new)
}

pub fn run_stream(batches: &[Vec<FrameRecord>], scorer: &dyn Scorer, config: &SelectionConfig, options: StreamOptions) -> Result<StreamState> {
    run_stream_from(StreamState::default(), batches, scorer, config, options)
}

pub fn run_stream_from(
    mut state: StreamState,
    batches: &[Vec<FrameRecord>],
    scorer: &dyn Scorer,
    config: &SelectionConfig,
    options: StreamOptions,
) -> Result<StreamState> {
    config.validate()?;
    if batches.is_empty() {
        return Err(OssError::Empty("stream has no batches".into()));
    }
    let mut ids: HashSet<String> = state.representatives.iter().map(|f| f.id.clone()).collect();
    for batch in batches {
        let started = Instant::now();
        let t = state.t + 1;
        if batch.is_empty() {
            return Err(OssError::Empty(format!("batch {t} is empty")));
        }
        let inst = step_instance(batch, &state.representatives, scorer).map_err(|e| match e {
            e @ (OssError::MissingLoss(_) | OssError::Config(_)) => OssError::Scorer { step: t, source: Box::new(e) },
            e => e,
        })?;
        let (selected, objective) = match options.method {
            Method::Mcoss => {
                let (_, rep) = solve_mcoss(&inst, config)?;
                (rep.selected_new, rep.objective_value)
            }
            Method::Threshmcoss => {
                let (_, rep) = solve_threshmcoss(&inst, config)?;
                (rep.selected_new, rep.objective_value)
            }
            Method::Submcoss => {
                let q = build_q(&inst, config.rho);
                let sol = greedy_select(&q, greedy_k(config.frac, inst.m()), options.seed.wrapping_add(t as u64))?;
                (sol.selected, sol.f_value)
            }
        };
        for (rep, &loss) in state.representatives.iter_mut().zip(&inst.loss_old) {
            rep.loss = Some(loss);
        }
        let mut added = Vec::new();
        for &j in &selected {
            let frame = &batch[j];
            if ids.insert(frame.id.clone()) {
                added.push(frame.id.clone());
                state.representatives.push(FrameRecord { loss: Some(inst.loss_new[j]), ..frame.clone() });
            }
        }
        state.t = t;
        let ms = if options.timing { started.elapsed().as_millis() as u64 } else { 0 };
        state.history.push(StepRecord { t, objective, selected: added, r_size: state.representatives.len(), ms });
    }
    Ok(state)
}
