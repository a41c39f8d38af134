//! Set-function view of selection and its randomized greedy minimizer.
//!
//! `f(S) = sum_i min(min_{j in R} Q_old[i][j], min_{j in S} Q_new[i][j])`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{OssError, Result};
use crate::exec::Execution;
use crate::instance::QMatrices;

pub const SUBMODULARITY_TOL: f64 = 1e-9;

/// A selection together with the per-row minima it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetState {
    pub selected: Vec<usize>,
    pub cached_row_min: Vec<f64>,
}

impl SubsetState {
    /// Empty selection: rows see only the old block (`+inf` when `r = 0`).
    pub fn new(q: &QMatrices) -> Self {
        let cached_row_min = (0..q.m()).map(|i| q.q_old.row(i).iter().copied().fold(f64::INFINITY, f64::min)).collect();
        SubsetState { selected: Vec::new(), cached_row_min }
    }

    pub fn from_selection(q: &QMatrices, selected: &[usize]) -> Result<Self> {
        let mut s = SubsetState::new(q);
        for &x in selected {
            s.insert(q, x)?;
        }
        Ok(s)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.selected.contains(&x)
    }

    pub fn insert(&mut self, q: &QMatrices, x: usize) -> Result<()> {
        if x >= q.m() {
            return Err(OssError::Dimension(format!("candidate {x} outside {} new frames", q.m())));
        }
        if self.contains(x) {
            return Ok(());
        }
        self.selected.push(x);
        for (i, v) in self.cached_row_min.iter_mut().enumerate() {
            *v = v.min(q.q_new.get(i, x));
        }
        Ok(())
    }

    /// `f(S ∪ {x})` without modifying the state.
    pub fn value_with(&self, q: &QMatrices, x: usize) -> f64 {
        self.cached_row_min.iter().enumerate().map(|(i, &v)| v.min(q.q_new.get(i, x))).sum()
    }

    pub fn value(&self) -> Result<f64> {
        if self.cached_row_min.iter().any(|v| v.is_infinite()) {
            return Err(OssError::EmptyMinimum);
        }
        Ok(self.cached_row_min.iter().sum())
    }
}

pub fn eval_f(selected: &[usize], q: &QMatrices) -> Result<f64> {
    SubsetState::from_selection(q, selected)?.value()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmodularSolution {
    pub method: &'static str,
    /// Sorted ascending.
    pub selected: Vec<usize>,
    /// Insertion order of the greedy rounds.
    #[serde(skip)]
    pub order: Vec<usize>,
    pub f_value: f64,
    pub seed: u64,
    pub k: usize,
}

pub fn greedy_select(q: &QMatrices, k: usize, seed: u64) -> Result<SubmodularSolution> {
    greedy_select_with(q, k, seed, Execution::default())
}

/// Randomized greedy: `k` rounds, each adding a uniform draw from the
/// `min(k, remaining)` candidates with the lowest `f(S ∪ {x})`.
pub fn greedy_select_with(q: &QMatrices, k: usize, seed: u64, exec: Execution) -> Result<SubmodularSolution> {
    let m = q.m();
    if k == 0 || k > m {
        return Err(OssError::Config(format!("cardinality k must be in 1..={m}, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SubsetState::new(q);
    for _ in 0..k {
        let candidates: Vec<usize> = (0..m).filter(|&x| !state.contains(x)).collect();
        let values = exec.map(candidates.len(), |c| state.value_with(q, candidates[c]));
        let mut ranked: Vec<(f64, usize)> = values.into_iter().zip(candidates).collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let pool = k.min(ranked.len());
        let pick = ranked[rng.gen_range(0..pool)].1;
        state.insert(q, pick)?;
    }
    let f_value = state.value()?;
    let order = state.selected.clone();
    let mut selected = order.clone();
    selected.sort_unstable();
    Ok(SubmodularSolution { method: "submcoss", selected, order, f_value, seed, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubmodularityReport {
    pub trials: usize,
    /// Triples with `f(S) - f(S+x) < f(T) - f(T+x) - tol`.
    pub violations: usize,
    /// Sets with `f(S+x) > f(S) + tol`.
    pub monotonicity_violations: usize,
}

/// Samples `(S ⊆ T, x ∉ T)` triples and counts diminishing-returns failures
/// of `-f`. With `r = 0`, `S` is kept nonempty so every value is defined.
pub fn check_submodularity(q: &QMatrices, trials: usize, seed: u64) -> Result<SubmodularityReport> {
    if trials == 0 {
        return Err(OssError::Config("trials must be at least 1".into()));
    }
    let m = q.m();
    let mut report = SubmodularityReport { trials, violations: 0, monotonicity_violations: 0 };
    let need = if q.r() == 0 { 2 } else { 1 };
    if m < need {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x = rng.gen_range(0..m);
        let mut t: Vec<usize> = Vec::new();
        let mut s: Vec<usize> = Vec::new();
        for j in (0..m).filter(|&j| j != x) {
            if rng.gen_bool(0.5) {
                t.push(j);
                if rng.gen_bool(0.5) {
                    s.push(j);
                }
            }
        }
        if q.r() == 0 && s.is_empty() {
            let pick = loop {
                let j = rng.gen_range(0..m);
                if j != x {
                    break j;
                }
            };
            s.push(pick);
            if !t.contains(&pick) {
                t.push(pick);
            }
        }
        let fs = SubsetState::from_selection(q, &s)?;
        let ft = SubsetState::from_selection(q, &t)?;
        let (vs, vt) = (fs.value()?, ft.value()?);
        let (vsx, vtx) = (fs.value_with(q, x), ft.value_with(q, x));
        if vs - vsx < vt - vtx - SUBMODULARITY_TOL {
            report.violations += 1;
        }
        if vsx > vs + SUBMODULARITY_TOL || vtx > vt + SUBMODULARITY_TOL {
            report.monotonicity_violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn small_q() -> QMatrices {
        QMatrices {
            q_old: Matrix::from_rows(vec![vec![0.3], vec![0.4]]).unwrap(),
            q_new: Matrix::from_rows(vec![vec![0.1, 0.2], vec![0.5, 0.0]]).unwrap(),
        }
    }

    #[test]
    fn eval_examples() {
        let q = small_q();
        assert!((eval_f(&[], &q).unwrap() - 0.7).abs() < 1e-15);
        assert!((eval_f(&[0], &q).unwrap() - 0.5).abs() < 1e-15);
        assert!((eval_f(&[1], &q).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn empty_minimum_is_an_error() {
        let q = QMatrices { q_old: Matrix::zeros(2, 0), q_new: Matrix::zeros(2, 2) };
        assert!(matches!(eval_f(&[], &q), Err(OssError::EmptyMinimum)));
        assert_eq!(eval_f(&[1], &q).unwrap(), 0.0);
        assert!(eval_f(&[2], &q).is_err());
    }

    #[test]
    fn greedy_examples() {
        let q = small_q();
        assert_eq!(greedy_select(&q, 1, 0).unwrap().selected, vec![1]);
        assert!(greedy_select(&q, 0, 0).is_err());
        assert!(greedy_select(&q, 3, 0).is_err());
        let one = QMatrices { q_old: Matrix::zeros(1, 0), q_new: Matrix::zeros(1, 1) };
        for seed in 0..5 {
            assert_eq!(greedy_select(&one, 1, seed).unwrap().selected, vec![0]);
        }
    }

    #[test]
    fn greedy_is_deterministic_across_backends() {
        let q = QMatrices {
            q_old: Matrix::zeros(6, 0),
            q_new: Matrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 11) as f64 / 10.0 - 0.5),
        };
        let a = greedy_select_with(&q, 3, 42, Execution::Sequential).unwrap();
        let b = greedy_select(&q, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order.len(), 3);
    }

    #[test]
    fn submodularity_on_small_q() {
        let r = check_submodularity(&small_q(), 500, 3).unwrap();
        assert_eq!((r.violations, r.monotonicity_violations), (0, 0));
        assert!(check_submodularity(&small_q(), 0, 3).is_err());
    }
}
