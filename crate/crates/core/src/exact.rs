//! Exact solvers over quantized budgets: memoized recursion ("naive") and bottom-up
//! dynamic programming.
//!
//! Each job takes exactly one model, so both solvers walk one layer per job and pick one
//! of the `m + 1` models in that layer (a multiple-choice knapsack with two capacities).
//! Costs are rounded up onto the grid and budgets rounded down, so every grid-feasible
//! assignment is also feasible for the original budgets.
//!
//! Both solvers compute the same value function `best(j, t, e)`: the best
//! `(accuracy, time, energy)` achievable by jobs `j..n` with `t` time buckets and `e`
//! energy buckets left, ordered like [`crate::instance::rank_cmp`]. The assignment is
//! then rebuilt front to back taking the smallest model index that attains the optimum,
//! so ties resolve exactly as the ranking order does and the two solvers return the
//! same assignment.
//!
//! A remaining budget at least as large as the whole suffix could ever use is
//! equivalent to that suffix maximum, so the DP clamps its table extents per layer. The
//! memoized recursion keys states on the raw remaining budgets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Assignment, SlotInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("memo table needs {required_bytes} bytes, cap is {cap_bytes} bytes")]
    MemoryCapExceeded { required_bytes: u64, cap_bytes: u64 },
    #[error("invalid quantization: {0}")]
    InvalidQuantization(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizationSpec {
    pub time_quantum: f64,
    pub energy_quantum: f64,
    pub memory_cap_bytes: u64,
}

impl Default for QuantizationSpec {
    fn default() -> Self {
        QuantizationSpec { time_quantum: 1.0, energy_quantum: 0.1, memory_cap_bytes: 512 * 1024 * 1024 }
    }
}

impl QuantizationSpec {
    pub fn new(time_quantum: f64, energy_quantum: f64) -> Self {
        QuantizationSpec { time_quantum, energy_quantum, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        for (name, q) in [("time_quantum", self.time_quantum), ("energy_quantum", self.energy_quantum)] {
            if !q.is_finite() || q <= 0.0 {
                return Err(ExactError::InvalidQuantization(format!("{name} must be finite and positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub assignment: Assignment,
    /// Summed accuracy of the assignment.
    pub objective: f64,
    /// True when some cost or budget was not a whole number of quanta, so the result is
    /// optimal for the quantized problem but may be beaten on the original budgets.
    pub optimal_under_quantization: bool,
}

/// Ratio within which a cost is treated as lying exactly on the grid.
const GRID_SNAP: f64 = 1e-9;

fn snap(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= GRID_SNAP * r.abs().max(1.0)).then_some(r)
}

/// Number of quanta needed to cover `cost`, rounded up.
pub fn quantize_cost(cost: f64, quantum: f64) -> u64 {
    let x = cost / quantum;
    snap(x).unwrap_or_else(|| x.ceil()).max(0.0) as u64
}

/// Number of whole quanta inside `budget`, rounded down.
pub fn quantize_budget(budget: f64, quantum: f64) -> u64 {
    let x = budget / quantum;
    snap(x).unwrap_or_else(|| x.floor()).max(0.0) as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Score {
    acc: f64,
    time: f64,
    energy: f64,
}

impl Score {
    const EMPTY: Score = Score { acc: 0.0, time: 0.0, energy: 0.0 };
    const NONE: Score = Score { acc: f64::NEG_INFINITY, time: 0.0, energy: 0.0 };

    fn reachable(&self) -> bool {
        self.acc != f64::NEG_INFINITY
    }

    fn beats(&self, other: &Score) -> bool {
        if self.acc != other.acc {
            return self.acc > other.acc;
        }
        if self.time != other.time {
            return self.time < other.time;
        }
        self.energy < other.energy
    }
}

/// The instance projected onto the grid.
struct Grid {
    jobs: usize,
    models: usize,
    acc: Vec<f64>,
    /// Row-major `jobs x models`.
    qtime: Vec<u64>,
    qenergy: Vec<u64>,
    time: Vec<f64>,
    energy: Vec<f64>,
    time_budget: u64,
    energy_budget: u64,
    /// Clamped extents per layer `0..=jobs`.
    time_cap: Vec<u64>,
    energy_cap: Vec<u64>,
    lossy: bool,
}

impl Grid {
    fn build(instance: &SlotInstance, quant: &QuantizationSpec) -> Result<Grid, ExactError> {
        quant.validate()?;
        let (jobs, models) = (instance.job_count(), instance.model_count());
        let acc = (0..models).map(|i| instance.accuracy(i)).collect();
        let mut lossy = false;
        let mut on_grid = |x: f64, q: f64| {
            if snap(x / q).is_none() {
                lossy = true;
            }
        };
        on_grid(instance.time_budget(), quant.time_quantum);
        on_grid(instance.energy_budget(), quant.energy_quantum);
        let (mut qtime, mut qenergy, mut time, mut energy) = (vec![], vec![], vec![], vec![]);
        for j in 0..jobs {
            for i in 0..models {
                let (t, e) = instance.cost(j, i);
                on_grid(t, quant.time_quantum);
                on_grid(e, quant.energy_quantum);
                qtime.push(quantize_cost(t, quant.time_quantum));
                qenergy.push(quantize_cost(e, quant.energy_quantum));
                time.push(t);
                energy.push(e);
            }
        }
        let time_budget = quantize_budget(instance.time_budget(), quant.time_quantum);
        let energy_budget = quantize_budget(instance.energy_budget(), quant.energy_quantum);
        let suffix_caps = |q: &[u64], budget: u64| {
            let mut caps = vec![0u64; jobs + 1];
            for j in (0..jobs).rev() {
                let worst = q[j * models..(j + 1) * models].iter().copied().max().unwrap_or(0);
                caps[j] = caps[j + 1].saturating_add(worst).min(budget);
            }
            caps
        };
        let time_cap = suffix_caps(&qtime, time_budget);
        let energy_cap = suffix_caps(&qenergy, energy_budget);
        Ok(Grid {
            jobs,
            models,
            acc,
            qtime,
            qenergy,
            time,
            energy,
            time_budget,
            energy_budget,
            time_cap,
            energy_cap,
            lossy,
        })
    }

    fn layer_cells(&self, j: usize) -> u64 {
        (self.time_cap[j] + 1) * (self.energy_cap[j] + 1)
    }

    fn check_memory(&self, bytes_per_cell: u64, cap: u64) -> Result<(), ExactError> {
        let cells: u64 = (0..=self.jobs).map(|j| self.layer_cells(j)).fold(0u64, u64::saturating_add);
        let required_bytes = cells.saturating_mul(bytes_per_cell);
        if required_bytes > cap {
            return Err(ExactError::MemoryCapExceeded { required_bytes, cap_bytes: cap });
        }
        Ok(())
    }

    #[inline]
    fn extend(&self, j: usize, i: usize, sub: Score) -> Score {
        let k = j * self.models + i;
        Score { acc: self.acc[i] + sub.acc, time: self.time[k] + sub.time, energy: self.energy[k] + sub.energy }
    }

    /// Rebuilds the assignment from a value oracle over `(layer, time left, energy left)`.
    fn reconstruct(&self, mut value: impl FnMut(usize, u64, u64) -> Score) -> Option<Assignment> {
        let (mut t, mut e) = (self.time_budget, self.energy_budget);
        let target = value(0, t, e);
        if !target.reachable() {
            return None;
        }
        let mut target = target;
        let mut genes = Vec::with_capacity(self.jobs);
        for j in 0..self.jobs {
            let mut chosen = None;
            for i in 0..self.models {
                let k = j * self.models + i;
                let (qt, qe) = (self.qtime[k], self.qenergy[k]);
                if qt > t || qe > e {
                    continue;
                }
                let sub = value(j + 1, t - qt, e - qe);
                if sub.reachable() && self.extend(j, i, sub) == target {
                    chosen = Some((i, sub));
                    break;
                }
            }
            let (i, sub) = chosen.expect("value function is consistent along the optimal path");
            let k = j * self.models + i;
            t -= self.qtime[k];
            e -= self.qenergy[k];
            target = sub;
            genes.push(i);
        }
        Some(Assignment::new(genes))
    }

    fn solution(&self, instance: &SlotInstance, assignment: Assignment) -> ExactSolution {
        let objective = instance.accuracy_sum(assignment.genes());
        ExactSolution { assignment, objective, optimal_under_quantization: self.lossy }
    }
}

/// Memoized recursion over `(job, time left, energy left)`, visiting only reachable states.
///
/// Returns `Ok(None)` when no assignment fits the quantized budgets.
pub fn solve_naive_memo(
    instance: &SlotInstance,
    quant: &QuantizationSpec,
) -> Result<Option<ExactSolution>, ExactError> {
    let grid = Grid::build(instance, quant)?;
    // Key plus value plus hash-table overhead, per visited state (worst case every cell).
    let cells = (grid.jobs as u64 + 1).saturating_mul(grid.time_budget + 1).saturating_mul(grid.energy_budget + 1);
    let required_bytes = cells.saturating_mul(64);
    if required_bytes > quant.memory_cap_bytes {
        return Err(ExactError::MemoryCapExceeded { required_bytes, cap_bytes: quant.memory_cap_bytes });
    }
    let mut memo: HashMap<(usize, u64, u64), Score> = HashMap::new();
    let assignment = grid.reconstruct(|j, t, e| best_memo(&grid, &mut memo, j, t, e));
    Ok(assignment.map(|a| grid.solution(instance, a)))
}

fn best_memo(grid: &Grid, memo: &mut HashMap<(usize, u64, u64), Score>, j: usize, t: u64, e: u64) -> Score {
    if j == grid.jobs {
        return Score::EMPTY;
    }
    if let Some(&s) = memo.get(&(j, t, e)) {
        return s;
    }
    let mut best = Score::NONE;
    for i in 0..grid.models {
        let k = j * grid.models + i;
        let (qt, qe) = (grid.qtime[k], grid.qenergy[k]);
        if qt > t || qe > e {
            continue;
        }
        let sub = best_memo(grid, memo, j + 1, t - qt, e - qe);
        if sub.reachable() {
            let cand = grid.extend(j, i, sub);
            if cand.beats(&best) {
                best = cand;
            }
        }
    }
    memo.insert((j, t, e), best);
    best
}

/// Bottom-up table over every `(job suffix, time left, energy left)` cell.
///
/// Returns `Ok(None)` when no assignment fits the quantized budgets.
pub fn solve_dp(instance: &SlotInstance, quant: &QuantizationSpec) -> Result<Option<ExactSolution>, ExactError> {
    let grid = Grid::build(instance, quant)?;
    grid.check_memory(std::mem::size_of::<Score>() as u64, quant.memory_cap_bytes)?;

    let n = grid.jobs;
    let width = |j: usize| (grid.energy_cap[j] + 1) as usize;
    let mut layers: Vec<Vec<Score>> = vec![Vec::new(); n + 1];
    layers[n] = vec![Score::EMPTY];
    for j in (0..n).rev() {
        let (tc, ec) = (grid.time_cap[j], grid.energy_cap[j]);
        let (next_tc, next_ec, next_w) = (grid.time_cap[j + 1], grid.energy_cap[j + 1], width(j + 1));
        let next = &layers[j + 1];
        let mut layer = vec![Score::NONE; ((tc + 1) * (ec + 1)) as usize];
        for t in 0..=tc {
            let row = &mut layer[(t * (ec + 1)) as usize..((t + 1) * (ec + 1)) as usize];
            for i in 0..grid.models {
                let k = j * grid.models + i;
                let (qt, qe) = (grid.qtime[k], grid.qenergy[k]);
                if qt > t {
                    continue;
                }
                let nt = (t - qt).min(next_tc) as usize;
                let next_row = &next[nt * next_w..(nt + 1) * next_w];
                for e in qe..=ec {
                    let sub = next_row[(e - qe).min(next_ec) as usize];
                    if sub.reachable() {
                        let cand = grid.extend(j, i, sub);
                        let cell = &mut row[e as usize];
                        if cand.beats(cell) {
                            *cell = cand;
                        }
                    }
                }
            }
        }
        layers[j] = layer;
    }

    let assignment = grid.reconstruct(|j, t, e| {
        let (t, e) = (t.min(grid.time_cap[j]), e.min(grid.energy_cap[j]));
        layers[j][(t * (grid.energy_cap[j] + 1) + e) as usize]
    });
    Ok(assignment.map(|a| grid.solution(instance, a)))
}
