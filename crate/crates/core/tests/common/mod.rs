//! Shared test helpers: an instance strategy and a brute-force oracle that shares no code
//! with the solvers.

#![allow(dead_code)]

use infersched::{Catalog, ChannelModel, ConstraintPair, JobSpec, Locality, ModelProfile, SlotInstance};
use proptest::prelude::*;

/// 1 Gbps and 8 units per MB: a size of `q / 8` MB costs `q` ms and `q` units on the wire.
pub const GRID_CHANNEL: ChannelModel =
    ChannelModel { bandwidth_mbps: 1000.0, energy_per_megabyte: 8.0, response_time_ms: 2.0 };

#[derive(Debug, Clone)]
pub struct RawModel {
    pub half_accuracy: u32,
    pub time: u32,
    pub energy: u32,
}

/// Whole-number costs and half-point accuracies, so every sum is exact in binary.
pub fn grid_instance() -> impl Strategy<Value = SlotInstance> {
    let model =
        (100u32..=190, 1u32..=60, 0u32..=10).prop_map(|(a, t, e)| RawModel { half_accuracy: a, time: t, energy: e });
    (
        prop::collection::vec(model, 2..=4),
        any::<bool>(),
        prop::collection::vec(1u32..=40, 1..=6),
        0.0f64..=1.0,
        0.0f64..=1.0,
    )
        .prop_map(|(models, with_remote, eighths, ft, fe)| {
            let n = models.len();
            let profiles: Vec<ModelProfile> = models
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let locality = if with_remote && i + 1 == n { Locality::Remote } else { Locality::Local };
                    ModelProfile::new(
                        i as u32 + 1,
                        m.half_accuracy as f64 / 2.0,
                        m.time as f64,
                        m.energy as f64,
                        locality,
                    )
                })
                .collect();
            let catalog = Catalog::new(profiles).unwrap();
            let jobs: Vec<JobSpec> =
                eighths.iter().enumerate().map(|(i, &q)| JobSpec::new(i as u64 + 1, q as f64 / 8.0).unwrap()).collect();
            let probe =
                SlotInstance::new(jobs.clone(), catalog.clone(), GRID_CHANNEL, ConstraintPair::new(1e9, 1e9).unwrap())
                    .unwrap();
            let (tmin, tmax) = dimension_range(&probe, |c| c.0);
            let (emin, emax) = dimension_range(&probe, |c| c.1);
            let t = (tmin + ft * (tmax - tmin)).round().max(1.0);
            let e = (emin + fe * (emax - emin)).round().max(1.0);
            probe.with_constraints(ConstraintPair::new(t, e).unwrap()).unwrap()
        })
}

fn dimension_range(inst: &SlotInstance, pick: impl Fn((f64, f64)) -> f64) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for j in 0..inst.job_count() {
        let costs: Vec<f64> = (0..inst.model_count()).map(|i| pick(inst.cost(j, i))).collect();
        lo += costs.iter().cloned().fold(f64::INFINITY, f64::min);
        hi += costs.iter().cloned().fold(0.0, f64::max);
    }
    (lo, hi)
}

/// Every assignment in lexicographic order.
pub fn all_assignments(jobs: usize, models: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..jobs {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..models).map(move |m| {
                    let mut next = prefix.clone();
                    next.push(m);
                    next
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Brute {
    pub genes: Vec<usize>,
    pub accuracy: f64,
    pub time: f64,
    pub energy: f64,
}

/// Full totals of `genes`, summed front to back.
pub fn totals(inst: &SlotInstance, genes: &[usize]) -> (f64, f64, f64) {
    let mut acc = 0.0;
    let mut time = 0.0;
    let mut energy = 0.0;
    for (j, &g) in genes.iter().enumerate() {
        let (t, e) = inst.cost(j, g);
        time += t;
        energy += e;
        acc += inst.catalog().models()[g].avg_accuracy;
    }
    (acc, time, energy)
}

pub fn fits(inst: &SlotInstance, genes: &[usize]) -> bool {
    let (_, t, e) = totals(inst, genes);
    t <= inst.constraints().time_budget_ms && e <= inst.constraints().energy_budget
}

/// The best feasible assignment: most accuracy, then least time, least energy, and
/// lexicographically smallest genes.
pub fn brute_force(inst: &SlotInstance) -> Option<Brute> {
    let mut best: Option<Brute> = None;
    for genes in all_assignments(inst.job_count(), inst.model_count()) {
        if !fits(inst, &genes) {
            continue;
        }
        let (accuracy, time, energy) = totals(inst, &genes);
        let better = match &best {
            None => true,
            Some(b) => (accuracy, -time, -energy) > (b.accuracy, -b.time, -b.energy),
        };
        if better {
            best = Some(Brute { genes, accuracy, time, energy });
        }
    }
    best
}
