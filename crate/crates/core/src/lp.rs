//! Dense bounded-variable revised simplex.
//!
//! Minimizes `c'x` subject to `A_eq x = b_eq`, `A_ub x <= b_ub` and per-variable
//! bounds `lo <= x <= hi` (either side may be infinite). Bounds are handled by
//! the ratio test, never as extra rows. The basis inverse is kept dense and
//! refactorized periodically; constraint columns are stored sparse.
//!
//! Pricing is Dantzig's rule with lowest-index tie-breaking; after a run of
//! degenerate pivots the solver switches to Bland's rule until the objective
//! moves again, which rules out cycling. Everything is deterministic.

use std::io::Write;

use serde::{Deserialize, Serialize};

pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-10;
const OPTIMALITY_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    num_vars: usize,
    objective: Vec<f64>,
    eq_rows: Vec<Vec<(usize, f64)>>,
    b_eq: Vec<f64>,
    ub_rows: Vec<Vec<(usize, f64)>>,
    b_ub: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    /// `num_vars` variables, zero cost, bounds `[0, +inf)`.
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            objective: vec![0.0; num_vars],
            eq_rows: Vec::new(),
            b_eq: Vec::new(),
            ub_rows: Vec::new(),
            b_ub: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
        }
    }

    /// Builds from dense matrices. Panics if column counts disagree.
    pub fn from_dense(
        c: Vec<f64>,
        a_eq: &[Vec<f64>],
        b_eq: &[f64],
        a_ub: &[Vec<f64>],
        b_ub: &[f64],
        bounds: Vec<(f64, f64)>,
    ) -> Self {
        let n = c.len();
        assert_eq!(bounds.len(), n, "bounds length must match cost length");
        assert_eq!(a_eq.len(), b_eq.len());
        assert_eq!(a_ub.len(), b_ub.len());
        let mut lp = LpProblem::new(n);
        lp.objective = c;
        lp.bounds = bounds;
        let sparse = |row: &Vec<f64>| -> Vec<(usize, f64)> {
            assert_eq!(row.len(), n, "constraint row length must match cost length");
            row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect()
        };
        for (row, &b) in a_eq.iter().zip(b_eq) {
            lp.add_eq(sparse(row), b);
        }
        for (row, &b) in a_ub.iter().zip(b_ub) {
            lp.add_le(sparse(row), b);
        }
        lp
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.eq_rows.len() + self.ub_rows.len()
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.objective[var] = cost;
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.num_vars));
        self.eq_rows.push(coeffs);
        self.b_eq.push(rhs);
    }

    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.num_vars));
        self.ub_rows.push(coeffs);
        self.b_ub.push(rhs);
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[(usize, f64)]| row.iter().map(|&(j, a)| a * x[j]).sum::<f64>();
        let eq = self.eq_rows.iter().zip(&self.b_eq).map(|(r, b)| (dot(r) - b).abs());
        let ub = self.ub_rows.iter().zip(&self.b_ub).map(|(r, b)| (dot(r) - b).max(0.0));
        let bnd = self.bounds.iter().zip(x).map(|(&(lo, hi), &v)| (lo - v).max(v - hi).max(0.0));
        eq.chain(ub).chain(bnd).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
    pub iterations: usize,
}

pub fn solve_lp(problem: &LpProblem, feasibility_tol: f64) -> LpSolution {
    solve_impl(problem, feasibility_tol, None)
}

/// Solves and writes the final tableau `B^-1 [A | b]` as CSV: one header row
/// of standard-form column names, then one row per basic variable.
pub fn solve_lp_with_dump(problem: &LpProblem, feasibility_tol: f64, out: &mut dyn Write) -> std::io::Result<LpSolution> {
    let mut buf = Vec::new();
    let sol = solve_impl(problem, feasibility_tol, Some(&mut buf));
    out.write_all(&buf)?;
    Ok(sol)
}

/// How an original variable maps onto nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = lo + y
    Shift { col: usize, lo: f64 },
    /// x = hi - y
    Mirror { col: usize, hi: f64 },
    /// x = y+ - y-
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
}

struct Standard {
    rows: usize,
    cols: Vec<Vec<(usize, f64)>>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    first_artificial: usize,
    initial_basis: Vec<usize>,
    maps: Vec<VarMap>,
    names: Vec<String>,
}

fn standardize(p: &LpProblem) -> Result<Standard, ()> {
    let rows = p.eq_rows.len() + p.ub_rows.len();
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut upper = Vec::new();
    let mut cost = Vec::new();
    let mut names = Vec::new();
    let mut maps = Vec::with_capacity(p.num_vars);
    for (k, &(lo, hi)) in p.bounds.iter().enumerate() {
        if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(());
        }
        let c = p.objective[k];
        let mut push = |cost_v: f64, up: f64, name: String| {
            cols.push(Vec::new());
            upper.push(up);
            cost.push(cost_v);
            names.push(name);
            cols.len() - 1
        };
        let map = if lo.is_finite() {
            VarMap::Shift { col: push(c, hi - lo, format!("x{k}")), lo }
        } else if hi.is_finite() {
            VarMap::Mirror { col: push(-c, f64::INFINITY, format!("x{k}_neg")), hi }
        } else {
            let pos = push(c, f64::INFINITY, format!("x{k}_pos"));
            let neg = push(-c, f64::INFINITY, format!("x{k}_neg"));
            VarMap::Split { pos, neg }
        };
        maps.push(map);
    }

    let mut rhs = Vec::with_capacity(rows);
    let all_rows = p.eq_rows.iter().zip(&p.b_eq).chain(p.ub_rows.iter().zip(&p.b_ub));
    for (r, (row, &b)) in all_rows.enumerate() {
        let mut b = b;
        for &(k, a) in row {
            match maps[k] {
                VarMap::Shift { col, lo } => {
                    b -= a * lo;
                    cols[col].push((r, a));
                }
                VarMap::Mirror { col, hi } => {
                    b -= a * hi;
                    cols[col].push((r, -a));
                }
                VarMap::Split { pos, neg } => {
                    cols[pos].push((r, a));
                    cols[neg].push((r, -a));
                }
            }
        }
        rhs.push(b);
    }

    // slacks for inequality rows
    let n_eq = p.eq_rows.len();
    let mut slack_of_row = vec![None; rows];
    for (u, slot) in slack_of_row.iter_mut().enumerate().skip(n_eq) {
        cols.push(vec![(u, 1.0)]);
        upper.push(f64::INFINITY);
        cost.push(0.0);
        names.push(format!("s{}", u - n_eq));
        *slot = Some(cols.len() - 1);
    }

    // flip rows with negative rhs
    for r in 0..rows {
        if rhs[r] < 0.0 {
            rhs[r] = -rhs[r];
            for col in cols.iter_mut() {
                for e in col.iter_mut().filter(|e| e.0 == r) {
                    e.1 = -e.1;
                }
            }
            slack_of_row[r] = None;
        }
    }

    let first_artificial = cols.len();
    let mut initial_basis = Vec::with_capacity(rows);
    for (r, slack) in slack_of_row.iter().enumerate() {
        match slack {
            Some(s) => initial_basis.push(*s),
            None => {
                cols.push(vec![(r, 1.0)]);
                upper.push(f64::INFINITY);
                cost.push(0.0);
                names.push(format!("a{r}"));
                initial_basis.push(cols.len() - 1);
            }
        }
    }
    Ok(Standard { rows, cols, upper, cost, rhs, first_artificial, initial_basis, maps, names })
}

struct Simplex<'a> {
    sf: &'a Standard,
    upper: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    pivots_since_refactor: usize,
    /// Nonbasic variables that may not enter (artificials in phase 2).
    frozen_from: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<'a> Simplex<'a> {
    fn new(sf: &'a Standard) -> Self {
        let n = sf.cols.len();
        let rows = sf.rows;
        let mut state = vec![State::Lower; n];
        for (r, &b) in sf.initial_basis.iter().enumerate() {
            state[b] = State::Basic(r);
        }
        let mut binv = vec![0.0; rows * rows];
        for r in 0..rows {
            binv[r * rows + r] = 1.0;
        }
        Simplex {
            sf,
            upper: sf.upper.clone(),
            basis: sf.initial_basis.clone(),
            state,
            binv,
            xb: sf.rhs.clone(),
            iterations: 0,
            pivots_since_refactor: 0,
            frozen_from: n,
        }
    }

    fn refactor(&mut self) -> bool {
        let rows = self.sf.rows;
        // Gauss-Jordan on [B | I] with partial pivoting
        let mut b = vec![0.0; rows * rows];
        for (r, &var) in self.basis.iter().enumerate() {
            for &(i, v) in &self.sf.cols[var] {
                b[i * rows + r] += v;
            }
        }
        let mut inv = vec![0.0; rows * rows];
        for r in 0..rows {
            inv[r * rows + r] = 1.0;
        }
        for c in 0..rows {
            let piv = (c..rows).max_by(|&a, &z| b[a * rows + c].abs().total_cmp(&b[z * rows + c].abs())).unwrap_or(c);
            if b[piv * rows + c].abs() < 1e-13 {
                return false;
            }
            if piv != c {
                for k in 0..rows {
                    b.swap(piv * rows + k, c * rows + k);
                    inv.swap(piv * rows + k, c * rows + k);
                }
            }
            let d = b[c * rows + c];
            for k in 0..rows {
                b[c * rows + k] /= d;
                inv[c * rows + k] /= d;
            }
            for i in 0..rows {
                if i == c {
                    continue;
                }
                let f = b[i * rows + c];
                if f != 0.0 {
                    for k in 0..rows {
                        b[i * rows + k] -= f * b[c * rows + k];
                        inv[i * rows + k] -= f * inv[c * rows + k];
                    }
                }
            }
        }
        self.binv = inv;
        self.recompute_xb();
        self.pivots_since_refactor = 0;
        true
    }

    fn recompute_xb(&mut self) {
        let rows = self.sf.rows;
        let mut r = self.sf.rhs.clone();
        for (j, st) in self.state.iter().enumerate() {
            if *st == State::Upper {
                let u = self.upper[j];
                for &(i, v) in &self.sf.cols[j] {
                    r[i] -= v * u;
                }
            }
        }
        for i in 0..rows {
            self.xb[i] = (0..rows).map(|k| self.binv[i * rows + k] * r[k]).sum();
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let rows = self.sf.rows;
        let mut y = vec![0.0; rows];
        for (i, &var) in self.basis.iter().enumerate() {
            let cb = cost[var];
            if cb != 0.0 {
                let row = &self.binv[i * rows..(i + 1) * rows];
                for (yk, b) in y.iter_mut().zip(row) {
                    *yk += cb * b;
                }
            }
        }
        y
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let rows = self.sf.rows;
        let mut alpha = vec![0.0; rows];
        for &(r, v) in &self.sf.cols[j] {
            for (i, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[i * rows + r] * v;
            }
        }
        alpha
    }

    fn run(&mut self, cost: &[f64], max_iter: usize) -> PhaseEnd {
        let rows = self.sf.rows;
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= max_iter {
                return PhaseEnd::IterationLimit;
            }
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let y = self.duals(cost);

            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.frozen_from {
                let st = self.state[j];
                if matches!(st, State::Basic(_)) || self.upper[j] <= 0.0 {
                    continue;
                }
                let d = cost[j] - self.sf.cols[j].iter().map(|&(r, v)| y[r] * v).sum::<f64>();
                let eligible = match st {
                    State::Lower => d < -OPTIMALITY_TOL,
                    State::Upper => d > OPTIMALITY_TOL,
                    State::Basic(_) => false,
                };
                if !eligible {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((j, _)) = entering else {
                return PhaseEnd::Optimal;
            };

            let alpha = self.column(j);
            let sigma = if self.state[j] == State::Lower { 1.0 } else { -1.0 };
            // two passes: the smallest step, then the lowest-index basic
            // variable among the rows that attain it
            let limits: Vec<Option<(f64, State)>> = (0..rows)
                .map(|i| {
                    let g = sigma * alpha[i];
                    if g > PIVOT_TOL {
                        Some((self.xb[i].max(0.0) / g, State::Lower))
                    } else if g < -PIVOT_TOL && self.upper[self.basis[i]].is_finite() {
                        Some(((self.upper[self.basis[i]] - self.xb[i]).max(0.0) / -g, State::Upper))
                    } else {
                        None
                    }
                })
                .collect();
            let min_limit = limits.iter().flatten().map(|l| l.0).fold(f64::INFINITY, f64::min);
            let mut theta = self.upper[j];
            let mut leave: Option<(usize, State)> = None;
            if min_limit < theta {
                theta = min_limit;
                for (i, l) in limits.iter().enumerate() {
                    if let Some((limit, to)) = *l {
                        if limit <= min_limit + 1e-12 && leave.is_none_or(|(li, _)| self.basis[i] < self.basis[li]) {
                            leave = Some((i, to));
                        }
                    }
                }
            }
            if !theta.is_finite() {
                return PhaseEnd::Unbounded;
            }
            self.iterations += 1;
            if theta <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }

            for i in 0..rows {
                self.xb[i] -= theta * sigma * alpha[i];
            }
            match leave {
                None => {
                    // bound flip
                    self.state[j] = if sigma > 0.0 { State::Upper } else { State::Lower };
                }
                Some((r, to)) => {
                    let entering_value = if sigma > 0.0 { theta } else { self.upper[j] - theta };
                    let out = self.basis[r];
                    self.state[out] = to;
                    self.state[j] = State::Basic(r);
                    self.basis[r] = j;
                    self.xb[r] = entering_value;
                    let piv = alpha[r];
                    let (head, rest) = self.binv.split_at_mut(r * rows);
                    let (prow, tail) = rest.split_at_mut(rows);
                    for v in prow.iter_mut() {
                        *v /= piv;
                    }
                    for (i, a) in alpha.iter().enumerate() {
                        if i == r || *a == 0.0 {
                            continue;
                        }
                        let target = if i < r { &mut head[i * rows..(i + 1) * rows] } else { &mut tail[(i - r - 1) * rows..(i - r) * rows] };
                        for (t, p) in target.iter_mut().zip(prow.iter()) {
                            *t -= a * p;
                        }
                    }
                    self.pivots_since_refactor += 1;
                }
            }
        }
    }

    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            State::Basic(r) => self.xb[r],
            State::Lower => 0.0,
            State::Upper => self.upper[j],
        }
    }
}

fn solve_impl(problem: &LpProblem, feasibility_tol: f64, dump: Option<&mut Vec<u8>>) -> LpSolution {
    let n = problem.num_vars;
    let fail = |status, iterations| LpSolution { x: vec![f64::NAN; n], objective_value: f64::NAN, status, iterations };
    let Ok(sf) = standardize(problem) else {
        return fail(LpStatus::Infeasible, 0);
    };
    let total = sf.cols.len();
    let max_iter = 50 * (total + sf.rows) + 10_000;
    let mut sx = Simplex::new(&sf);

    // phase 1
    if sf.first_artificial < total {
        let phase1: Vec<f64> = (0..total).map(|j| if j >= sf.first_artificial { 1.0 } else { 0.0 }).collect();
        match sx.run(&phase1, max_iter) {
            PhaseEnd::IterationLimit => return fail(LpStatus::IterationLimit, sx.iterations),
            PhaseEnd::Unbounded => unreachable!("phase 1 objective is bounded below"),
            PhaseEnd::Optimal => {}
        }
        sx.refactor();
        let infeas: f64 = (sf.first_artificial..total).map(|j| sx.value(j)).sum();
        let scale = 1.0 + sf.rhs.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        if infeas > feasibility_tol * scale {
            return fail(LpStatus::Infeasible, sx.iterations);
        }
        for j in sf.first_artificial..total {
            sx.upper[j] = 0.0;
        }
        sx.frozen_from = sf.first_artificial;
    }

    // phase 2
    let end = sx.run(&sf.cost, max_iter);
    let iterations = sx.iterations;
    match end {
        PhaseEnd::IterationLimit => return fail(LpStatus::IterationLimit, iterations),
        PhaseEnd::Unbounded => return fail(LpStatus::Unbounded, iterations),
        PhaseEnd::Optimal => {}
    }
    sx.refactor();

    if let Some(buf) = dump {
        write_tableau(&sx, buf);
    }

    let clamp = |v: f64, up: f64| v.max(0.0).min(up);
    let y: Vec<f64> = (0..total).map(|j| clamp(sx.value(j), sf.upper[j])).collect();
    let x: Vec<f64> = sf
        .maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, lo } => lo + y[col],
            VarMap::Mirror { col, hi } => hi - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective_value = problem.objective_at(&x);
    LpSolution { x, objective_value, status: LpStatus::Optimal, iterations }
}

fn write_tableau(sx: &Simplex<'_>, buf: &mut Vec<u8>) {
    let sf = sx.sf;
    let rows = sf.rows;
    let fmt = crate::instance::fmt_f64;
    let mut header = vec!["basic".to_string()];
    header.extend(sf.names.iter().cloned());
    header.push("rhs".into());
    let _ = writeln!(buf, "{}", header.join(","));
    for (i, &var) in sx.basis.iter().enumerate() {
        let mut line = vec![sf.names[var].clone()];
        for col in &sf.cols {
            let v: f64 = col.iter().map(|&(r, a)| sx.binv[i * rows + r] * a).sum();
            line.push(fmt(v));
        }
        line.push(fmt(sx.xb[i]));
        let _ = writeln!(buf, "{}", line.join(","));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximize_box() {
        // minimize -x, 0 <= x <= 1
        let mut lp = LpProblem::new(1);
        lp.set_cost(0, -1.0);
        lp.set_bounds(0, 0.0, 1.0);
        let s = solve_lp(&lp, DEFAULT_FEASIBILITY_TOL);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x, vec![1.0]);
        assert_eq!(s.objective_value, -1.0);
    }

    #[test]
    fn infeasible_bound_vs_row() {
        // minimize x, -x <= -2, x <= 1
        let mut lp = LpProblem::new(1);
        lp.set_cost(0, 1.0);
        lp.set_bounds(0, 0.0, 1.0);
        lp.add_le(vec![(0, -1.0)], -2.0);
        assert_eq!(solve_lp(&lp, DEFAULT_FEASIBILITY_TOL).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LpProblem::new(1);
        lp.set_cost(0, -1.0);
        assert_eq!(solve_lp(&lp, DEFAULT_FEASIBILITY_TOL).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_mirrored_variables() {
        // minimize x0 + x1 with x0 free, x1 <= 3 (no lower bound), x0 + x1 = 1, x0 >= -2 via row
        let mut lp = LpProblem::new(2);
        lp.set_cost(0, 1.0);
        lp.set_cost(1, 2.0);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, 3.0);
        lp.add_eq(vec![(0, 1.0), (1, 1.0)], 1.0);
        lp.add_le(vec![(0, -1.0)], 2.0);
        let s = solve_lp(&lp, DEFAULT_FEASIBILITY_TOL);
        // x1 as small as possible is blocked only through x0 = 1 - x1 <= ... x0 >= -2 -> x1 <= 3
        // cost = x0 + 2 x1 = 1 + x1 -> unbounded below as x1 -> -inf
        assert_eq!(s.status, LpStatus::Unbounded);

        lp.add_le(vec![(0, 1.0)], 5.0);
        let s = solve_lp(&lp, DEFAULT_FEASIBILITY_TOL);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 5.0).abs() < 1e-9 && (s.x[1] + 4.0).abs() < 1e-9, "{:?}", s.x);
        assert!((s.objective_value + 3.0).abs() < 1e-9);
    }

    #[test]
    fn equality_with_redundant_row() {
        let lp = LpProblem::from_dense(
            vec![1.0, 2.0, 3.0],
            &[vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0]],
            &[1.0, 2.0],
            &[],
            &[],
            vec![(0.0, 1.0); 3],
        );
        let s = solve_lp(&lp, DEFAULT_FEASIBILITY_TOL);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-9);
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn dump_has_header_and_rows() {
        let lp = LpProblem::from_dense(vec![-1.0, -1.0], &[], &[], &[vec![1.0, 2.0]], &[4.0], vec![(0.0, 3.0); 2]);
        let mut out = Vec::new();
        let s = solve_lp_with_dump(&lp, DEFAULT_FEASIBILITY_TOL, &mut out).unwrap();
        assert!((s.objective_value + 3.5).abs() < 1e-9);
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "basic,x0,x1,s0,rhs");
        assert_eq!(lines.count(), 1);
    }
}
