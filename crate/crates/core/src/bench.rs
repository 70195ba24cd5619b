//! Small random instances whose costs all land on whole numbers, so exact solvers with unit
//! quanta solve the original problem and exhaustive enumeration stays cheap.

use crate::exact::QuantizationSpec;
use crate::instance::SlotInstance;
use crate::model::{Catalog, ChannelModel, ConstraintPair, JobSpec, Locality, ModelProfile};
use crate::rng::{derive_seed, SubtractiveRng};

/// Channel under which a size of `q / 8` MB costs exactly `q` ms and `q` energy units.
pub const BENCH_CHANNEL: ChannelModel =
    ChannelModel { bandwidth_mbps: 1000.0, energy_per_megabyte: 8.0, response_time_ms: 2.0 };

pub const BENCH_QUANTIZATION: QuantizationSpec =
    QuantizationSpec { time_quantum: 1.0, energy_quantum: 1.0, memory_cap_bytes: 512 * 1024 * 1024 };

/// One random instance with 1 to 6 jobs and 2 to 4 models.
///
/// Accuracies are multiples of 0.5; times and energies are whole numbers. Each budget is
/// drawn between the cheapest and the most expensive total of its own dimension, so an
/// instance can still be infeasible when no single choice is cheap in both.
pub fn random_instance(seed: u64) -> SlotInstance {
    let mut rng = SubtractiveRng::new(seed);
    let models = rng.uniform_int(2, 4);
    let jobs = rng.uniform_int(1, 6);
    let with_remote = rng.below(3) != 0;
    let profiles = (0..models)
        .map(|i| {
            let id = i as u32 + 1;
            let accuracy = rng.uniform_int(100, 190) as f64 * 0.5;
            if with_remote && i + 1 == models {
                let time = rng.uniform_int(1, 5) as f64;
                ModelProfile::new(id, accuracy, time, rng.uniform_int(0, 2) as f64, Locality::Remote)
            } else {
                let time = rng.uniform_int(5, 60) as f64;
                ModelProfile::new(id, accuracy, time, rng.uniform_int(1, 10) as f64, Locality::Local)
            }
        })
        .collect();
    let catalog = Catalog::new(profiles).expect("generated catalog is well formed");
    let specs = (0..jobs as u64)
        .map(|id| JobSpec::new(id + 1, rng.uniform_int(1, 40) as f64 / 8.0).expect("positive size"))
        .collect();
    let loose = ConstraintPair::new(1e9, 1e9).expect("positive budgets");
    let instance = SlotInstance::new(specs, catalog, BENCH_CHANNEL, loose).expect("valid instance");

    let (mut t_lo, mut t_hi, mut e_lo, mut e_hi) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..jobs {
        let costs: Vec<(f64, f64)> = (0..models).map(|i| instance.cost(j, i)).collect();
        t_lo += costs.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        t_hi += costs.iter().map(|c| c.0).fold(0.0, f64::max);
        e_lo += costs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        e_hi += costs.iter().map(|c| c.1).fold(0.0, f64::max);
    }
    let pick = |rng: &mut SubtractiveRng, lo: f64, hi: f64| {
        let lo = lo.max(1.0) as usize;
        rng.uniform_int(lo, (hi as usize).max(lo)) as f64
    };
    let time_budget = pick(&mut rng, t_lo, t_hi);
    let energy_budget = pick(&mut rng, e_lo, e_hi);
    instance
        .with_constraints(ConstraintPair::new(time_budget, energy_budget).expect("positive budgets"))
        .expect("valid budgets")
}

/// The `count` instances of a suite, each seeded from `(base_seed, index)`.
pub fn instance_suite(base_seed: u64, count: usize) -> Vec<SlotInstance> {
    (0..count as u64).map(|i| random_instance(derive_seed(base_seed, &[i]))).collect()
}
