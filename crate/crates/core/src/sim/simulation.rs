//! The slot loop: schedule every slot with every scheme, realize execution, aggregate.

use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use super::noise::{AccuracyRealization, ExecutionNoise};
use super::stats::{mean, median, variance};
use super::workload::Slot;
use crate::instance::{Assignment, SlotInstance};
use crate::model::{Catalog, ChannelModel, ConstraintPair, ModelError};
use crate::rng::{derive_seed, SubtractiveRng};
use crate::scheduler::{schedule, Scheme, SchemeParams, SolveError};

/// Stream tags mixed into derived seeds.
const SOLVER_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot start worker pool: {0}")]
    ThreadPool(String),
    #[error("invalid setup: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone)]
pub struct SimulationSetup {
    pub catalog: Catalog,
    pub channel: ChannelModel,
    pub constraints: ConstraintPair,
    pub schemes: Vec<Scheme>,
    pub params: SchemeParams,
    pub noise: ExecutionNoise,
    pub seed: u64,
    /// Worker threads for (slot, scheme) cells.
    pub threads: usize,
    /// Run one solver at a time even with several workers, so wall clocks do not overlap.
    pub exclusive_timing: bool,
}

impl SimulationSetup {
    pub fn new(catalog: Catalog, schemes: Vec<Scheme>) -> Self {
        SimulationSetup {
            catalog,
            channel: ChannelModel::default(),
            constraints: ConstraintPair::default(),
            schemes,
            params: SchemeParams::default(),
            noise: ExecutionNoise::default(),
            seed: 0,
            threads: 1,
            exclusive_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotReport {
    pub slot_index: usize,
    pub scheme: Scheme,
    pub job_count: usize,
    pub partial: bool,
    pub assignment: Assignment,
    pub feasible: bool,
    /// Summed accuracy, `NEG_INF` when infeasible.
    pub objective: f64,
    pub est_time_ms: f64,
    pub est_energy: f64,
    /// Realized values are absent for infeasible slots, which are not executed.
    pub real_time_ms: Option<f64>,
    pub real_energy: Option<f64>,
    /// Mean accuracy of the assigned models, in percent.
    pub avg_accuracy: Option<f64>,
    /// Correct classifications under Bernoulli realization.
    pub realized_correct: Option<usize>,
    /// Realized totals exceed a budget although the estimate fits.
    pub over_budget: bool,
    pub iterations: usize,
    pub sched_time_ms: f64,
}

/// Per-scheme averages over all slots of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub slots: usize,
    pub infeasible_slots: usize,
    pub over_budget_slots: usize,
    /// Mean per-slot accuracy over feasible slots, in percent.
    pub average_accuracy: f64,
    /// Mean realized energy per feasible slot.
    pub average_power: f64,
    /// Mean realized time per feasible slot.
    pub average_inference_time_ms: f64,
    /// Mean over every slot, feasible or not.
    pub average_scheduling_time_ms: f64,
    pub total_time_ms: f64,
    pub median_scheduling_time_ms: f64,
    pub scheduling_time_variance: f64,
    /// Share of correctly classified jobs in percent (Bernoulli realization only).
    pub realized_accuracy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimulationRun {
    /// Ordered by slot, then by the setup's scheme order.
    pub reports: Vec<SlotReport>,
    /// In the setup's scheme order.
    pub summaries: Vec<SchemeSummary>,
}

impl SimulationRun {
    pub fn summary(&self, scheme: Scheme) -> Option<&SchemeSummary> {
        self.summaries.iter().find(|s| s.scheme == scheme)
    }

    pub fn reports_for(&self, scheme: Scheme) -> impl Iterator<Item = &SlotReport> {
        self.reports.iter().filter(move |r| r.scheme == scheme)
    }
}

fn scheme_stream(scheme: Scheme) -> u64 {
    Scheme::ALL.iter().position(|&s| s == scheme).expect("every scheme is listed") as u64
}

struct Realized {
    time: f64,
    energy: f64,
    correct: Option<usize>,
}

/// Samples real execution of `assignment`. Noise is drawn per job in order, so every
/// scheme sees the same multipliers for a given slot.
fn realize(instance: &SlotInstance, assignment: &Assignment, noise: &ExecutionNoise, seed: u64) -> Realized {
    let mut rng = SubtractiveRng::new(seed);
    let jitter = noise.jitter();
    let (mut time, mut energy, mut correct) = (0.0, 0.0, 0);
    for (j, &g) in assignment.genes().iter().enumerate() {
        let factor = jitter.sample(&mut rng);
        let (t, e) = instance.cost(j, g);
        let model = &instance.catalog()[g];
        time += t * factor;
        // Local energy follows busy time; transfer energy depends only on the bytes sent.
        energy +=
            if model.is_remote() { model.inference_energy * factor + (e - model.inference_energy) } else { e * factor };
        let hit = rng.bernoulli((model.avg_accuracy / 100.0).clamp(0.0, 1.0));
        if hit {
            correct += 1;
        }
    }
    let correct = (noise.accuracy_realization == AccuracyRealization::Bernoulli).then_some(correct);
    Realized { time, energy, correct }
}

fn run_cell(
    slot: &Slot,
    scheme: Scheme,
    setup: &SimulationSetup,
    timing_lock: &Mutex<()>,
) -> Result<SlotReport, SimError> {
    let instance = SlotInstance::with_jobs(slot.jobs.clone(), setup.catalog.clone(), setup.channel, setup.constraints)?;
    let seed = derive_seed(setup.seed, &[slot.index as u64, scheme_stream(scheme), SOLVER_STREAM]);
    let result = if setup.exclusive_timing && setup.threads > 1 {
        let _guard = timing_lock.lock().unwrap_or_else(|e| e.into_inner());
        schedule(scheme, &instance, &setup.params, seed)?
    } else {
        schedule(scheme, &instance, &setup.params, seed)?
    };
    let jobs = slot.jobs.len();
    log::debug!(
        "slot {} {scheme}: {} jobs, feasible {}, objective {}, {} iterations",
        slot.index,
        jobs,
        result.feasible,
        result.objective,
        result.iterations
    );
    let (real_time_ms, real_energy, avg_accuracy, realized_correct, over_budget) = if result.feasible {
        let r = realize(
            &instance,
            &result.assignment,
            &setup.noise,
            derive_seed(setup.seed, &[slot.index as u64, NOISE_STREAM]),
        );
        let over = r.time > setup.constraints.time_budget_ms || r.energy > setup.constraints.energy_budget;
        (Some(r.time), Some(r.energy), Some(result.objective / jobs as f64), r.correct, over)
    } else {
        (None, None, None, None, false)
    };
    Ok(SlotReport {
        slot_index: slot.index,
        scheme,
        job_count: jobs,
        partial: slot.partial,
        feasible: result.feasible,
        objective: result.objective,
        est_time_ms: result.est_time_ms,
        est_energy: result.est_energy,
        real_time_ms,
        real_energy,
        avg_accuracy,
        realized_correct,
        over_budget,
        iterations: result.iterations,
        sched_time_ms: result.scheduling_time_ms(),
        assignment: result.assignment,
    })
}

pub fn summarize(scheme: Scheme, reports: &[&SlotReport]) -> SchemeSummary {
    let feasible: Vec<&SlotReport> = reports.iter().copied().filter(|r| r.feasible).collect();
    let collect = |f: fn(&SlotReport) -> Option<f64>| feasible.iter().filter_map(|r| f(r)).collect::<Vec<f64>>();
    let sched: Vec<f64> = reports.iter().map(|r| r.sched_time_ms).collect();
    let average_inference_time_ms = mean(&collect(|r| r.real_time_ms)).unwrap_or(f64::NAN);
    let average_scheduling_time_ms = mean(&sched).unwrap_or(f64::NAN);
    let realized_accuracy = {
        let correct: Vec<usize> = feasible.iter().filter_map(|r| r.realized_correct).collect();
        let jobs: usize = feasible.iter().filter(|r| r.realized_correct.is_some()).map(|r| r.job_count).sum();
        (jobs > 0).then(|| 100.0 * correct.iter().sum::<usize>() as f64 / jobs as f64)
    };
    SchemeSummary {
        scheme,
        slots: reports.len(),
        infeasible_slots: reports.len() - feasible.len(),
        over_budget_slots: feasible.iter().filter(|r| r.over_budget).count(),
        average_accuracy: mean(&collect(|r| r.avg_accuracy)).unwrap_or(f64::NAN),
        average_power: mean(&collect(|r| r.real_energy)).unwrap_or(f64::NAN),
        average_inference_time_ms,
        average_scheduling_time_ms,
        total_time_ms: average_inference_time_ms + average_scheduling_time_ms,
        median_scheduling_time_ms: median(&sched).unwrap_or(f64::NAN),
        scheduling_time_variance: variance(&sched).unwrap_or(0.0),
        realized_accuracy,
    }
}

/// Schedules every slot with every scheme of the setup.
pub fn run_simulation(slots: &[Slot], setup: &SimulationSetup) -> Result<SimulationRun, SimError> {
    if setup.schemes.is_empty() {
        return Err(SimError::Invalid("no schemes selected".into()));
    }
    if setup.threads == 0 {
        return Err(SimError::Invalid("threads must be >= 1".into()));
    }
    setup.params.validate()?;
    setup.noise.validate().map_err(SimError::Invalid)?;
    setup.channel.validate()?;
    setup.constraints.validate()?;

    let cells: Vec<(&Slot, Scheme)> =
        slots.iter().flat_map(|slot| setup.schemes.iter().map(move |&scheme| (slot, scheme))).collect();
    let timing_lock = Mutex::new(());
    let reports: Vec<SlotReport> = if setup.threads == 1 {
        cells.iter().map(|&(slot, scheme)| run_cell(slot, scheme, setup, &timing_lock)).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(setup.threads)
            .build()
            .map_err(|e| SimError::ThreadPool(e.to_string()))?;
        pool.install(|| {
            cells
                .par_iter()
                .map(|&(slot, scheme)| run_cell(slot, scheme, setup, &timing_lock))
                .collect::<Result<_, _>>()
        })?
    };

    let summaries = setup
        .schemes
        .iter()
        .map(|&scheme| {
            let mine: Vec<&SlotReport> = reports.iter().filter(|r| r.scheme == scheme).collect();
            summarize(scheme, &mine)
        })
        .collect();
    Ok(SimulationRun { reports, summaries })
}

/// Per slot, `baseline objective - scheme objective` for every other scheme; `None` where
/// either side is infeasible.
pub fn accuracy_difference_series(reports: &[SlotReport], baseline: Scheme) -> Vec<(Scheme, Vec<Option<f64>>)> {
    let mut schemes: Vec<Scheme> = Vec::new();
    for r in reports {
        if r.scheme != baseline && !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
    }
    let mut slot_ids: Vec<usize> = reports.iter().map(|r| r.slot_index).collect();
    slot_ids.sort_unstable();
    slot_ids.dedup();
    let find = |slot: usize, scheme: Scheme| reports.iter().find(|r| r.slot_index == slot && r.scheme == scheme);
    schemes
        .into_iter()
        .map(|scheme| {
            let series = slot_ids
                .iter()
                .map(|&slot| match (find(slot, baseline), find(slot, scheme)) {
                    (Some(b), Some(s)) if b.feasible && s.feasible => Some(b.objective - s.objective),
                    _ => None,
                })
                .collect();
            (scheme, series)
        })
        .collect()
}
