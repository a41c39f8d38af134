//! Variable layout and solve loop shared by the two convex formulations.
//!
//! The infinity-norm of a new column is linearized with an auxiliary `t_j`
//! and one row `z_ij - t_j <= 0` per entry. There are `m^2` such rows, most of
//! them slack at the optimum, so they are added lazily: solve, collect the
//! violated pairs, add their rows, solve again. The loop ends when no row is
//! violated, at which point the solution is optimal for the full problem.

use crate::error::{OssError, Result};
use crate::lp::{solve_lp, LpProblem, LpSolution, LpStatus};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub m: usize,
    pub r: usize,
    /// Offset of the `t_j` block, present for infinity-norm terms.
    pub t: Option<usize>,
    /// Offset of the `s` block (`r` old entries then `m` new ones).
    pub s: Option<usize>,
    pub n: usize,
}

impl Layout {
    pub fn new(m: usize, r: usize, with_t: bool, with_s: bool) -> Self {
        let mut n = m * r + m * m;
        let t = with_t.then(|| {
            n += m;
            n - m
        });
        let s = with_s.then(|| {
            n += r + m;
            n - r - m
        });
        Layout { m, r, t, s, n }
    }

    #[inline]
    pub fn z_old(&self, i: usize, j: usize) -> usize {
        i * self.r + j
    }

    #[inline]
    pub fn z_new(&self, i: usize, j: usize) -> usize {
        self.m * self.r + i * self.m + j
    }

    /// Base problem: zero cost, `z` in `[0, 1]`, one row-stochastic equality
    /// per incoming frame. Auxiliary blocks get `[0, 1]` bounds too.
    pub fn base_problem(&self) -> LpProblem {
        let mut lp = LpProblem::new(self.n);
        for v in 0..self.n {
            lp.set_bounds(v, 0.0, 1.0);
        }
        for i in 0..self.m {
            let mut row: Vec<(usize, f64)> = (0..self.r).map(|j| (self.z_old(i, j), 1.0)).collect();
            row.extend((0..self.m).map(|j| (self.z_new(i, j), 1.0)));
            lp.add_eq(row, 1.0);
        }
        lp
    }

    pub fn assignment(&self, x: &[f64]) -> Assignment {
        let clamp = |v: f64| v.clamp(0.0, 1.0);
        Assignment {
            z_old: Matrix::from_fn(self.m, self.r, |i, j| clamp(x[self.z_old(i, j)])),
            z_new: Matrix::from_fn(self.m, self.m, |i, j| clamp(x[self.z_new(i, j)])),
        }
    }
}

/// Solves `lp`, adding `z_ij - t_j <= 0` rows on demand when the layout has a
/// `t` block. Returns the final solution and the total simplex iterations.
pub(crate) fn solve_with_linking(mut lp: LpProblem, layout: &Layout, tol: f64) -> Result<LpSolution> {
    let Some(t_off) = layout.t else {
        let sol = solve_lp(&lp, tol);
        return match sol.status {
            LpStatus::Optimal => Ok(sol),
            status => Err(OssError::Solver { status, expected: "optimal" }),
        };
    };
    let m = layout.m;
    let mut linked = vec![false; m * m];
    let mut iterations = 0;
    loop {
        let mut sol = solve_lp(&lp, tol);
        iterations += sol.iterations;
        if sol.status != LpStatus::Optimal {
            return Err(OssError::Solver { status: sol.status, expected: "optimal" });
        }
        let mut added = 0;
        for i in 0..m {
            for j in 0..m {
                let k = i * m + j;
                if !linked[k] && sol.x[layout.z_new(i, j)] > sol.x[t_off + j] + tol {
                    linked[k] = true;
                    lp.add_le(vec![(layout.z_new(i, j), 1.0), (t_off + j, -1.0)], 0.0);
                    added += 1;
                }
            }
        }
        if added == 0 {
            sol.iterations = iterations;
            return Ok(sol);
        }
    }
}

/// Relaxed assignment of every incoming frame to old (`z_old`, `m x r`) and
/// new (`z_new`, `m x m`) representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub z_old: Matrix,
    pub z_new: Matrix,
}

impl Assignment {
    /// Integral assignment from a choice per row: `choice[i] < r` picks old
    /// representative `choice[i]`, otherwise new frame `choice[i] - r`.
    pub fn from_choices(choice: &[usize], m: usize, r: usize) -> Self {
        let mut z_old = Matrix::zeros(m, r);
        let mut z_new = Matrix::zeros(m, m);
        for (i, &c) in choice.iter().enumerate() {
            if c < r {
                z_old.set(i, c, 1.0);
            } else {
                z_new.set(i, c - r, 1.0);
            }
        }
        Assignment { z_old, z_new }
    }

    pub fn m(&self) -> usize {
        self.z_new.rows()
    }

    pub fn r(&self) -> usize {
        self.z_old.cols()
    }

    pub fn new_mass(&self, j: usize) -> f64 {
        self.z_new.column_sum(j)
    }

    pub fn old_mass(&self, j: usize) -> f64 {
        self.z_old.column_sum(j)
    }

    pub fn new_masses(&self) -> Vec<f64> {
        (0..self.m()).map(|j| self.new_mass(j)).collect()
    }

    pub fn old_masses(&self) -> Vec<f64> {
        (0..self.r()).map(|j| self.old_mass(j)).collect()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.z_old.row(i).iter().sum::<f64>() + self.z_new.row(i).iter().sum::<f64>()
    }

    /// Largest `|row sum - 1|`.
    pub fn row_stochastic_error(&self) -> f64 {
        (0..self.m()).map(|i| (self.row_sum(i) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn in_unit_box(&self, tol: f64) -> bool {
        self.z_old.as_slice().iter().chain(self.z_new.as_slice()).all(|&v| v >= -tol && v <= 1.0 + tol)
    }

    pub fn is_integral(&self, tol: f64) -> bool {
        self.z_old.as_slice().iter().chain(self.z_new.as_slice()).all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol)
    }

    pub(crate) fn check_dims(&self, m: usize, r: usize) -> Result<()> {
        if self.z_new.rows() != m || self.z_new.cols() != m || self.z_old.rows() != m || self.z_old.cols() != r {
            return Err(OssError::Dimension(format!(
                "assignment is {}x{} / {}x{}, instance needs {m}x{r} / {m}x{m}",
                self.z_old.rows(),
                self.z_old.cols(),
                self.z_new.rows(),
                self.z_new.cols()
            )));
        }
        Ok(())
    }
}
