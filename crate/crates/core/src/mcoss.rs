//! Baseline multi-criteria selection: minimize the assignment cost under the
//! cumulative dissimilarity plus a group-norm penalty on the new columns.

use serde::Serialize;

use crate::error::Result;
use crate::formulation::{solve_with_linking, Layout};
use crate::instance::{build_q, Norm, SelectionConfig, SelectionInstance};
use crate::lp::LpStatus;

pub use crate::formulation::Assignment;

/// Which incoming frames were selected, and how much assignment mass each
/// new column received.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentativeReport {
    pub selected_new: Vec<usize>,
    pub column_mass: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
    pub iterations: usize,
}

impl RepresentativeReport {
    pub(crate) fn from_assignment(a: &Assignment, config: &SelectionConfig, objective_value: f64, iterations: usize) -> Self {
        let column_mass = a.new_masses();
        let selected_new = column_mass.iter().enumerate().filter(|(_, &w)| config.is_selected(w)).map(|(j, _)| j).collect();
        RepresentativeReport { selected_new, column_mass, objective_value, status: LpStatus::Optimal, iterations }
    }
}

pub fn solve_mcoss(instance: &SelectionInstance, config: &SelectionConfig) -> Result<(Assignment, RepresentativeReport)> {
    config.validate()?;
    instance.ensure_valid()?;
    let (m, r) = (instance.m(), instance.r());
    let q = build_q(instance, config.rho);
    let with_t = config.p == Norm::LInf && config.lambda > 0.0;
    let layout = Layout::new(m, r, with_t, false);
    let mut lp = layout.base_problem();
    for i in 0..m {
        for j in 0..r {
            lp.set_cost(layout.z_old(i, j), q.q_old.get(i, j));
        }
        for j in 0..m {
            let penalty = if config.p == Norm::L1 { config.lambda } else { 0.0 };
            lp.set_cost(layout.z_new(i, j), q.q_new.get(i, j) + penalty);
        }
    }
    if let Some(t) = layout.t {
        for j in 0..m {
            lp.set_cost(t + j, config.lambda);
        }
    }
    let sol = solve_with_linking(lp, &layout, config.feasibility_tol)?;
    let assignment = layout.assignment(&sol.x);
    let objective = eval_mcoss_objective(&assignment, instance, config)?;
    let report = RepresentativeReport::from_assignment(&assignment, config, objective, sol.iterations);
    Ok((assignment, report))
}

/// `sum z_old Q_old + sum z_new Q_new + lambda * sum_j ||z_new[:, j]||_p`.
pub fn eval_mcoss_objective(assignment: &Assignment, instance: &SelectionInstance, config: &SelectionConfig) -> Result<f64> {
    let (m, r) = (instance.m(), instance.r());
    assignment.check_dims(m, r)?;
    let q = build_q(instance, config.rho);
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..r {
            total += assignment.z_old.get(i, j) * q.q_old.get(i, j);
        }
        for j in 0..m {
            total += assignment.z_new.get(i, j) * q.q_new.get(i, j);
        }
    }
    let penalty: f64 = (0..m).map(|j| config.p.of(assignment.z_new.column(j))).sum();
    Ok(total + config.lambda * penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    pub(crate) fn two_by_one(d_old: f64, loss_old: f64, loss_new: [f64; 2]) -> SelectionInstance {
        SelectionInstance::new(
            Matrix::from_rows(vec![vec![d_old], vec![d_old]]).unwrap(),
            Matrix::from_rows(vec![vec![0.0, 0.9], vec![0.9, 0.0]]).unwrap(),
            vec![loss_old],
            loss_new.to_vec(),
        )
        .unwrap()
    }

    fn cfg(rho: f64, lambda: f64, p: Norm) -> SelectionConfig {
        SelectionConfig { rho, lambda, p, ..Default::default() }
    }

    // Expected values below come from enumerating all 3^2 integral assignments
    // (see the oracle module tests, which recompute them independently).

    #[test]
    fn cheap_old_representative_wins() {
        let inst = two_by_one(0.1, 0.0, [0.0, 0.0]);
        let (a, rep) = solve_mcoss(&inst, &cfg(1.0, 0.5, Norm::L1)).unwrap();
        assert!(rep.selected_new.is_empty());
        assert!((rep.objective_value - 0.2).abs() < 1e-9);
        assert!((a.old_mass(0) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn expensive_old_representative_loses() {
        let inst = two_by_one(0.9, 0.0, [0.0, 0.0]);
        let (_, rep) = solve_mcoss(&inst, &cfg(1.0, 0.1, Norm::L1)).unwrap();
        assert_eq!(rep.selected_new, vec![0, 1]);
        assert!((rep.objective_value - 0.2).abs() < 1e-9);
    }

    #[test]
    fn pointwise_only_collapses_to_one() {
        let inst = two_by_one(0.1, 0.2, [0.5, 0.9]);
        let (a, rep) = solve_mcoss(&inst, &cfg(0.0, 0.0, Norm::L1)).unwrap();
        assert_eq!(rep.selected_new, vec![1]);
        assert!((a.new_mass(1) - 2.0).abs() < 1e-9);
        assert!((rep.objective_value + 1.8).abs() < 1e-9);
    }

    #[test]
    fn objective_with_empty_new_block() {
        let inst = two_by_one(0.3, 0.1, [0.2, 0.4]);
        let a = Assignment::from_choices(&[0, 0], 2, 1);
        let c = cfg(0.5, 0.7, Norm::LInf);
        let expected = 2.0 * (0.5 * 0.3 - 0.5 * 0.1);
        assert!((eval_mcoss_objective(&a, &inst, &c).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn identity_assignment_pays_lambda_per_column() {
        let inst = two_by_one(0.3, 0.1, [0.2, 0.4]);
        let a = Assignment::from_choices(&[1, 2], 2, 1);
        let c = cfg(1.0, 0.7, Norm::LInf);
        assert!((eval_mcoss_objective(&a, &inst, &c).unwrap() - 1.4).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let inst = two_by_one(0.3, 0.1, [0.2, 0.4]);
        let a = Assignment::from_choices(&[0, 0, 0], 3, 1);
        assert!(eval_mcoss_objective(&a, &inst, &SelectionConfig::default()).is_err());
    }

    #[test]
    fn infinity_norm_matches_reported_objective() {
        let inst = two_by_one(0.6, 0.1, [0.3, 0.2]);
        for lambda in [0.0, 0.05, 0.3, 1.0] {
            let c = cfg(0.7, lambda, Norm::LInf);
            let (a, rep) = solve_mcoss(&inst, &c).unwrap();
            assert!(a.row_stochastic_error() < 1e-9);
            assert!((eval_mcoss_objective(&a, &inst, &c).unwrap() - rep.objective_value).abs() < 1e-12);
        }
    }
}
