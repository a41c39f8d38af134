//! Exhaustive integral optima for small instances, and numerical checkers for
//! the necessary conditions a selected new column must satisfy.
//!
//! Every strict inequality is tested with a `1e-9` margin and yields one of
//! three verdicts; values within the margin are reported as inconclusive
//! rather than forced either way.

use serde::{Deserialize, Serialize};

use crate::error::{OssError, Result};
use crate::exec::Execution;
use crate::formulation::Assignment;
use crate::instance::{build_q, Norm, SelectionConfig, SelectionInstance};
use crate::mcoss::eval_mcoss_objective;
use crate::thresh::eval_thresh_objective;

pub const ENUMERATION_LIMIT: u128 = 1_000_000;
pub const TIE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    NotApplicable,
}

impl Verdict {
    /// `a < b` with a tie margin.
    pub fn less(a: f64, b: f64, margin: f64) -> Verdict {
        if a < b - margin {
            Verdict::Pass
        } else if (a - b).abs() <= margin {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }

    /// Existential combination: any pass wins, then any tie.
    pub fn any(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Fail;
        for v in verdicts {
            match v {
                Verdict::Pass => return Verdict::Pass,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                _ => {}
            }
        }
        out
    }

    /// Universal combination: any failure wins, then any tie.
    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Pass;
        for v in verdicts {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                _ => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Mcoss,
    Threshmcoss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_assignment: Assignment,
    /// Row `i` is represented by column `best_choice[i]`: `< r` is old, else new `- r`.
    pub best_choice: Vec<usize>,
    pub best_objective: f64,
    pub formulation: Formulation,
    /// `(r + m)^m`, including budget-infeasible assignments.
    pub enumerated_count: u128,
    pub feasible_count: u128,
}

impl OracleResult {
    pub fn selected_new(&self) -> Vec<usize> {
        let r = self.best_assignment.r();
        let mut s: Vec<usize> = self.best_choice.iter().filter(|&&c| c >= r).map(|&c| c - r).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

pub fn brute_force_optimum(instance: &SelectionInstance, config: &SelectionConfig, formulation: Formulation) -> Result<OracleResult> {
    brute_force_optimum_with(instance, config, formulation, Execution::default())
}

/// Enumerates every map from incoming frames to a single representative and
/// returns the lexicographically first minimizer. Under the thresholded
/// formulation `S_j` is the 0/1 indicator of column use and assignments that
/// break the budget are skipped.
pub fn brute_force_optimum_with(
    instance: &SelectionInstance,
    config: &SelectionConfig,
    formulation: Formulation,
    exec: Execution,
) -> Result<OracleResult> {
    config.validate()?;
    instance.ensure_valid()?;
    let (m, r) = (instance.m(), instance.r());
    let width = r + m;
    let count = (width as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_LIMIT {
        return Err(OssError::GuardExceeded { count, limit: ENUMERATION_LIMIT });
    }
    if m == 0 {
        return Err(OssError::Empty("instance has no incoming frames".into()));
    }

    // per-row cost of each choice, plus the per-column terms
    let q = build_q(instance, config.rho);
    let row_cost = |i: usize, c: usize| -> f64 {
        match formulation {
            Formulation::Mcoss => {
                if c < r {
                    q.q_old.get(i, c)
                } else {
                    q.q_new.get(i, c - r) + if config.p == Norm::L1 { config.lambda } else { 0.0 }
                }
            }
            Formulation::Threshmcoss => {
                config.rho * if c < r { instance.d_old.get(i, c) } else { instance.d_new.get(i, c - r) }
            }
        }
    };
    let costs: Vec<Vec<f64>> = (0..m).map(|i| (0..width).map(|c| row_cost(i, c)).collect()).collect();
    let column_term = |c: usize| -> f64 {
        match formulation {
            Formulation::Mcoss => {
                if c >= r && config.p == Norm::LInf {
                    config.lambda
                } else {
                    0.0
                }
            }
            Formulation::Threshmcoss => {
                -(1.0 - config.rho) * if c < r { instance.loss_old[c] } else { instance.loss_new[c - r] }
            }
        }
    };
    let col_terms: Vec<f64> = (0..width).map(column_term).collect();
    let budget = config.frac * m as f64 + 1e-9;

    let evaluate = |choice: &[usize], seen: &mut Vec<usize>| -> Option<f64> {
        seen.clear();
        seen.extend_from_slice(choice);
        seen.sort_unstable();
        seen.dedup();
        if formulation == Formulation::Threshmcoss {
            let usage = match config.p {
                Norm::L1 => choice.iter().filter(|&&c| c >= r).count(),
                Norm::LInf => seen.iter().filter(|&&c| c >= r).count(),
            };
            if usage as f64 > budget {
                return None;
            }
        }
        let rows: f64 = choice.iter().enumerate().map(|(i, &c)| costs[i][c]).sum();
        Some(rows + seen.iter().map(|&c| col_terms[c]).sum::<f64>())
    };

    // one block per choice of row 0, enumerated in lexicographic order
    let blocks = exec.map(width, |first| {
        let mut choice = vec![0usize; m];
        choice[0] = first;
        let mut seen = Vec::with_capacity(m);
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut feasible = 0u128;
        loop {
            if let Some(v) = evaluate(&choice, &mut seen) {
                feasible += 1;
                if best.as_ref().is_none_or(|(b, _)| v < *b - 1e-12) {
                    best = Some((v, choice.clone()));
                }
            }
            // odometer over rows 1..m, last row fastest
            let mut k = m;
            loop {
                if k == 1 {
                    return (best, feasible);
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < width {
                    break;
                }
                choice[k] = 0;
            }
        }
    });

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut feasible_count = 0;
    for (block_best, feasible) in blocks {
        feasible_count += feasible;
        if let Some((v, c)) = block_best {
            if best.as_ref().is_none_or(|(b, _)| v < *b - 1e-12) {
                best = Some((v, c));
            }
        }
    }
    let Some((_, best_choice)) = best else {
        return Err(OssError::Config(format!("no integral assignment satisfies the budget frac = {}", config.frac)));
    };
    let best_assignment = Assignment::from_choices(&best_choice, m, r);
    let best_objective = match formulation {
        Formulation::Mcoss => eval_mcoss_objective(&best_assignment, instance, config)?,
        Formulation::Threshmcoss => eval_thresh_objective(&best_assignment, instance, config)?,
    };
    Ok(OracleResult { best_assignment, best_choice, best_objective, formulation, enumerated_count: count, feasible_count })
}

/// Index of the old column with the smallest assigned cost
/// `sum_i z_old[i][j] * Q_old[i][j]`, lowest index on ties.
fn best_old_column(assignment: &Assignment, q_old: &crate::matrix::Matrix) -> Option<usize> {
    let (m, r) = (assignment.m(), assignment.r());
    (0..r)
        .map(|j| (j, (0..m).map(|i| assignment.z_old.get(i, j) * q_old.get(i, j)).sum::<f64>()))
        .fold(None, |best: Option<(usize, f64)>, (j, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((j, v)),
        })
        .map(|(j, _)| j)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Column {
    pub j: usize,
    /// Some incoming frame has `j` as its strictly cheapest new column.
    pub cond1: Verdict,
    /// Some `Q_new[i][j]` is below `(old cost of k + lambda * ||z_j||_p) / ||z_j||_1`.
    pub cond2: Verdict,
    /// The same ratio with the norm term subtracted instead of added.
    pub cond2_minus_lambda: Verdict,
    pub k: Option<usize>,
}

pub fn check_theorem1(assignment: &Assignment, instance: &SelectionInstance, config: &SelectionConfig) -> Result<Vec<Theorem1Column>> {
    let (m, r) = (instance.m(), instance.r());
    assignment.check_dims(m, r)?;
    let q = build_q(instance, config.rho);
    let k = best_old_column(assignment, &q.q_old);
    let mut out = Vec::new();
    for j in 0..m {
        let mass = assignment.new_mass(j);
        if !config.is_selected(mass) {
            continue;
        }
        let cond1 = Verdict::any((0..m).map(|i| {
            let rival = (0..m).filter(|&jp| jp != j).map(|jp| q.q_new.get(i, jp)).fold(f64::INFINITY, f64::min);
            if rival.is_infinite() {
                Verdict::Pass
            } else {
                Verdict::less(q.q_new.get(i, j), rival, TIE_MARGIN)
            }
        }));
        let (cond2, cond2_minus_lambda) = match k {
            None => (Verdict::NotApplicable, Verdict::NotApplicable),
            Some(k) => {
                let old_cost: f64 = (0..m).map(|i| assignment.z_old.get(i, k) * q.q_old.get(i, k)).sum();
                let norm_p = config.p.of(assignment.z_new.column(j));
                let plus = (old_cost + config.lambda * norm_p) / mass;
                let minus = (old_cost - config.lambda * norm_p) / mass;
                (
                    Verdict::any((0..m).map(|i| Verdict::less(q.q_new.get(i, j), plus, TIE_MARGIN))),
                    Verdict::any((0..m).map(|i| Verdict::less(q.q_new.get(i, j), minus, TIE_MARGIN))),
                )
            }
        };
        out.push(Theorem1Column { j, cond1, cond2, cond2_minus_lambda, k });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1Column {
    pub j: usize,
    /// `L_j` strictly above every other new loss.
    pub cond1: Verdict,
    /// `L_j > (sum_i z_old[i][k] L_k - lambda ||z_j||_p) / ||z_j||_1`.
    pub cond2: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1Report {
    pub columns: Vec<Corollary1Column>,
    pub selected_count: usize,
    /// At most one new column when new losses are pairwise distinct;
    /// not applicable when they tie.
    pub count_claim: Verdict,
}

/// Pointwise-only (`rho = 0`) specialization of the selection conditions.
pub fn check_corollary1(assignment: &Assignment, instance: &SelectionInstance, config: &SelectionConfig) -> Result<Corollary1Report> {
    if config.rho != 0.0 {
        return Err(OssError::Config(format!("corollary check needs rho = 0, got {}", config.rho)));
    }
    let (m, r) = (instance.m(), instance.r());
    assignment.check_dims(m, r)?;
    let q = build_q(instance, 0.0);
    let k = best_old_column(assignment, &q.q_old);
    let loss = &instance.loss_new;
    let mut columns = Vec::new();
    for j in 0..m {
        let mass = assignment.new_mass(j);
        if !config.is_selected(mass) {
            continue;
        }
        let cond1 = Verdict::all((0..m).filter(|&jp| jp != j).map(|jp| Verdict::less(loss[jp], loss[j], TIE_MARGIN)));
        let cond2 = match k {
            None => Verdict::NotApplicable,
            Some(k) => {
                let old: f64 = (0..m).map(|i| assignment.z_old.get(i, k)).sum::<f64>() * instance.loss_old[k];
                let rhs = (old - config.lambda * config.p.of(assignment.z_new.column(j))) / mass;
                Verdict::less(rhs, loss[j], TIE_MARGIN)
            }
        };
        columns.push(Corollary1Column { j, cond1, cond2 });
    }
    let distinct = (0..m).all(|a| (0..a).all(|b| (loss[a] - loss[b]).abs() > TIE_MARGIN));
    let selected_count = columns.len();
    let count_claim = if !distinct {
        Verdict::NotApplicable
    } else if selected_count <= 1 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Corollary1Report { columns, selected_count, count_claim })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPair {
    pub delta_d: f64,
    pub delta_l: f64,
    pub i: usize,
    pub j: usize,
}

impl DeltaPair {
    /// `delta_d < -delta_l`: column `j` stops being a representative as rho grows.
    pub fn predicate(&self) -> bool {
        self.delta_d < -self.delta_l
    }
}

/// Differences between new column `j` (weighted by its mass) and the best old
/// representative `k`, in the pairwise and pointwise criteria.
pub fn compute_corollary2_deltas(
    assignment: &Assignment,
    instance: &SelectionInstance,
    config: &SelectionConfig,
    i: usize,
    j: usize,
) -> Result<DeltaPair> {
    let (m, r) = (instance.m(), instance.r());
    assignment.check_dims(m, r)?;
    if i >= m || j >= m {
        return Err(OssError::Dimension(format!("pair ({i},{j}) outside {m} incoming frames")));
    }
    let q = build_q(instance, config.rho);
    let k = best_old_column(assignment, &q.q_old).ok_or_else(|| OssError::Config("no old representatives: k is undefined".into()))?;
    let mass = assignment.new_mass(j);
    let old_mass_d: f64 = (0..m).map(|ip| assignment.z_old.get(ip, k) * instance.d_old.get(ip, k)).sum();
    let old_mass_l: f64 = (0..m).map(|ip| assignment.z_old.get(ip, k)).sum::<f64>() * instance.loss_old[k];
    Ok(DeltaPair { delta_d: mass * instance.d_new.get(i, j) - old_mass_d, delta_l: mass * instance.loss_new[j] - old_mass_l, i, j })
}
