//! Thresholded multi-criteria selection.
//!
//! Each column earns pointwise credit through `S_j = min(eps, mass_j) / eps`,
//! a concave surrogate of "column j is used", so a representative contributes
//! its own loss at most once no matter how many frames it covers. The number
//! of new representatives is bounded explicitly by
//! `sum_j ||z_new[:, j]||_p <= frac * m`.
//!
//! The problem is solved as an exact LP: `S_j` becomes a variable with
//! `s_j <= 1` and `eps * s_j <= mass_j`. Its cost `-(1 - rho) * L_j` is never
//! positive, so at an optimum `s_j` sits on its upper envelope whenever that
//! matters to the objective.

use serde::Serialize;

use crate::error::{OssError, Result};
use crate::formulation::{solve_with_linking, Assignment, Layout};
use crate::instance::{Norm, SelectionConfig, SelectionInstance};
use crate::mcoss::RepresentativeReport;
use crate::oracle::Verdict;

const TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreshSolution {
    #[serde(skip)]
    pub assignment: Assignment,
    pub s_old: Vec<f64>,
    pub s_new: Vec<f64>,
    pub objective_value: f64,
    /// Objective of the LP itself, before `s` is snapped to its envelope.
    pub lp_objective: f64,
    pub budget_usage: f64,
    pub budget_limit: f64,
}

impl ThreshSolution {
    /// `ceil(frac * m)`, the budget in whole frames.
    pub fn budget_slots(&self) -> usize {
        (self.budget_limit - 1e-9).ceil().max(0.0) as usize
    }
}

/// Thresholded credit of a column.
pub fn compute_s(column_mass: f64, epsilon: f64) -> f64 {
    column_mass.max(0.0).min(epsilon) / epsilon
}

/// Smallest `frac` for which the budget row admits a row-stochastic point.
pub fn min_feasible_frac(m: usize, r: usize, p: Norm) -> f64 {
    match (r, p) {
        (0, Norm::LInf) => 1.0 / m as f64,
        (0, Norm::L1) => 1.0,
        _ => 0.0,
    }
}

pub fn solve_threshmcoss(instance: &SelectionInstance, config: &SelectionConfig) -> Result<(ThreshSolution, RepresentativeReport)> {
    config.validate()?;
    instance.ensure_valid()?;
    let (m, r) = (instance.m(), instance.r());
    if m == 0 {
        return Err(OssError::Empty("instance has no incoming frames".into()));
    }
    let budget = config.frac * m as f64;
    let min_frac = min_feasible_frac(m, r, config.p);
    if config.frac < min_frac - 1e-12 {
        return Err(OssError::BudgetInfeasible { frac: config.frac, min_frac });
    }

    let layout = Layout::new(m, r, config.p == Norm::LInf, true);
    let s_off = layout.s.expect("layout has an s block");
    let mut lp = layout.base_problem();
    let rho = config.rho;
    for i in 0..m {
        for j in 0..r {
            lp.set_cost(layout.z_old(i, j), rho * instance.d_old.get(i, j));
        }
        for j in 0..m {
            lp.set_cost(layout.z_new(i, j), rho * instance.d_new.get(i, j));
        }
    }
    for j in 0..r {
        let s = s_off + j;
        lp.set_cost(s, -(1.0 - rho) * instance.loss_old[j]);
        let mut row = vec![(s, config.epsilon)];
        row.extend((0..m).map(|i| (layout.z_old(i, j), -1.0)));
        lp.add_le(row, 0.0);
    }
    for j in 0..m {
        let s = s_off + r + j;
        lp.set_cost(s, -(1.0 - rho) * instance.loss_new[j]);
        let mut row = vec![(s, config.epsilon)];
        row.extend((0..m).map(|i| (layout.z_new(i, j), -1.0)));
        lp.add_le(row, 0.0);
    }
    match layout.t {
        Some(t) => lp.add_le((0..m).map(|j| (t + j, 1.0)).collect(), budget),
        None => lp.add_le((0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| (layout.z_new(i, j), 1.0)).collect(), budget),
    }

    let sol = solve_with_linking(lp, &layout, config.feasibility_tol)?;
    let assignment = layout.assignment(&sol.x);
    let s_old = assignment.old_masses().into_iter().map(|w| compute_s(w, config.epsilon)).collect();
    let s_new = assignment.new_masses().into_iter().map(|w| compute_s(w, config.epsilon)).collect();
    let objective_value = eval_thresh_objective(&assignment, instance, config)?;
    let budget_usage = (0..m).map(|j| config.p.of(assignment.z_new.column(j))).sum();
    let report = RepresentativeReport::from_assignment(&assignment, config, objective_value, sol.iterations);
    let solution =
        ThreshSolution { assignment, s_old, s_new, objective_value, lp_objective: sol.objective_value, budget_usage, budget_limit: budget };
    Ok((solution, report))
}

/// `rho * (sum z d) - (1 - rho) * (sum_j S_j L_j)` with `S` recomputed from
/// the column masses of `assignment`.
pub fn eval_thresh_objective(assignment: &Assignment, instance: &SelectionInstance, config: &SelectionConfig) -> Result<f64> {
    let (m, r) = (instance.m(), instance.r());
    assignment.check_dims(m, r)?;
    let eps = config.epsilon;
    let mut pairwise = 0.0;
    for i in 0..m {
        pairwise += (0..r).map(|j| assignment.z_old.get(i, j) * instance.d_old.get(i, j)).sum::<f64>();
        pairwise += (0..m).map(|j| assignment.z_new.get(i, j) * instance.d_new.get(i, j)).sum::<f64>();
    }
    let credit_old: f64 = (0..r).map(|j| compute_s(assignment.old_mass(j), eps) * instance.loss_old[j]).sum();
    let credit_new: f64 = (0..m).map(|j| compute_s(assignment.new_mass(j), eps) * instance.loss_new[j]).sum();
    Ok(config.rho * pairwise - (1.0 - config.rho) * (credit_old + credit_new))
}

/// Contribution of new column `j` to the objective: its pairwise cost minus
/// its pointwise credit.
pub fn column_contribution(assignment: &Assignment, instance: &SelectionInstance, config: &SelectionConfig, j: usize) -> f64 {
    let pairwise: f64 = (0..instance.m()).map(|i| assignment.z_new.get(i, j) * instance.d_new.get(i, j)).sum();
    config.rho * pairwise - (1.0 - config.rho) * compute_s(assignment.new_mass(j), config.epsilon) * instance.loss_new[j]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheck {
    pub i: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

/// Selection conditions for one selected new column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuppColumnReport {
    pub j: usize,
    pub mass: f64,
    /// Column mass at least epsilon.
    pub mass_condition: Verdict,
    /// Best old representative, `None` on a cold start.
    pub k: Option<usize>,
    /// Cost comparison against `k`, evaluated for every incoming frame `i`
    /// because the slack term depends on `i`. Empty when `k` is `None`.
    pub cost_condition: Vec<PairCheck>,
}

/// Evaluates both selection conditions for every selected new column of a
/// thresholded solution. The old-side sum `sum_i z_old[i][k] * d_old[i][k]`
/// carries no rho weight.
pub fn check_supp_theorem_conditions(
    solution: &ThreshSolution,
    instance: &SelectionInstance,
    config: &SelectionConfig,
) -> Result<Vec<SuppColumnReport>> {
    let a = &solution.assignment;
    let (m, r) = (instance.m(), instance.r());
    a.check_dims(m, r)?;
    let (rho, eps) = (config.rho, config.epsilon);
    let s_old: Vec<f64> = a.old_masses().into_iter().map(|w| compute_s(w, eps)).collect();
    let k = (0..r)
        .map(|j| {
            let pair: f64 = (0..m).map(|i| a.z_old.get(i, j) * instance.d_old.get(i, j)).sum();
            (j, rho * pair - (1.0 - rho) * s_old[j] * instance.loss_old[j])
        })
        .fold(None, |best: Option<(usize, f64)>, (j, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((j, v)),
        })
        .map(|(j, _)| j);

    let mut out = Vec::new();
    for j in 0..m {
        let mass = a.new_mass(j);
        if !config.is_selected(mass) {
            continue;
        }
        let mass_condition = if mass >= eps - TIE { Verdict::Pass } else { Verdict::Fail };
        let s_j = compute_s(mass, eps);
        let lhs = rho * (0..m).map(|i| a.z_new.get(i, j) * instance.d_new.get(i, j)).sum::<f64>() - (1.0 - rho) * s_j * instance.loss_new[j];
        let cost_condition = match k {
            None => Vec::new(),
            Some(k) => {
                let old_side: f64 = (0..m).map(|i| a.z_old.get(i, k) * instance.d_old.get(i, k)).sum::<f64>()
                    - (1.0 - rho) * s_old[k] * instance.loss_old[k];
                (0..m)
                    .map(|i| {
                        let slack = (instance.d_old.get(i, k) - instance.d_new.get(i, j))
                            .abs()
                            .max((instance.loss_old[k] - instance.loss_new[j]).abs());
                        let rhs = old_side + slack;
                        PairCheck { i, lhs, rhs, verdict: Verdict::less(lhs, rhs, TIE) }
                    })
                    .collect()
            }
        };
        out.push(SuppColumnReport { j, mass, mass_condition, k, cost_condition });
    }
    Ok(out)
}
