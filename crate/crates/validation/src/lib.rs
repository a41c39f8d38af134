//! Shared bookkeeping for the acceptance run: constraint tallies over solver
//! outputs and the per-check summary lines.

use std::fmt;

use oss_core::thresh::{compute_s, ThreshSolution};
use oss_core::{Assignment, SelectionConfig};

pub const ROW_TOL: f64 = 1e-6;
pub const BOX_TOL: f64 = 1e-9;
pub const BUDGET_TOL: f64 = 1e-6;
pub const S_TOL: f64 = 1e-6;

/// Constraint checks accumulated over many solver outputs.
#[derive(Debug, Default)]
pub struct ConstraintTally {
    pub outputs: usize,
    pub thresh_outputs: usize,
    pub failures: Vec<String>,
}

impl ConstraintTally {
    /// Row sums and the unit box.
    pub fn assignment(&mut self, label: &str, z: &Assignment) {
        self.outputs += 1;
        let row = z.row_stochastic_error();
        if row > ROW_TOL {
            self.failures.push(format!("{label}: row sum off by {row:e}"));
        }
        if !z.in_unit_box(BOX_TOL) {
            self.failures.push(format!("{label}: entry outside [0, 1]"));
        }
    }

    /// Everything in [`Self::assignment`], plus the budget row and the
    /// recomputed thresholded credit.
    pub fn thresh(&mut self, label: &str, sol: &ThreshSolution, config: &SelectionConfig) {
        self.assignment(label, &sol.assignment);
        self.thresh_outputs += 1;
        let z = &sol.assignment;
        let usage: f64 = (0..z.m()).map(|j| config.p.of(z.z_new.column(j))).sum();
        let limit = config.frac * z.m() as f64;
        if usage > limit + BUDGET_TOL {
            self.failures.push(format!("{label}: budget {usage} > {limit}"));
        }
        let masses = z.new_masses().into_iter().zip(&sol.s_new).chain(z.old_masses().into_iter().zip(&sol.s_old));
        for (mass, &s) in masses {
            if (s - compute_s(mass, config.epsilon)).abs() > S_TOL {
                self.failures.push(format!("{label}: S = {s} for mass {mass}"));
            }
        }
        // the solver's own credit, seen through its objective
        if (sol.lp_objective - sol.objective_value).abs() > S_TOL {
            self.failures.push(format!("{label}: lp objective {} vs recomputed {}", sol.lp_objective, sol.objective_value));
        }
    }

    pub fn passed(&self) -> bool {
        self.outputs > 0 && self.failures.is_empty()
    }
}

/// One line of the acceptance summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} criterion {} ({}): {}", self.id, self.name, self.detail)
    }
}

/// Counts `a <= b + tol` over paired values; a missing side counts as a miss.
pub fn count_at_most(pairs: &[(Option<f64>, Option<f64>)], tol: f64) -> usize {
    pairs.iter().filter(|(a, b)| matches!((a, b), (Some(a), Some(b)) if *a <= *b + tol)).count()
}
