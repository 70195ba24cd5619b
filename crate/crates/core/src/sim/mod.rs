//! Slot-by-slot simulation of a job stream under every scheme, plus budget sweeps.

pub mod noise;
pub mod output;
pub mod simulation;
pub mod stats;
pub mod sweep;
pub mod workload;

pub use noise::{AccuracyRealization, ExecutionNoise};
pub use simulation::{
    accuracy_difference_series, run_simulation, SchemeSummary, SimError, SimulationRun, SimulationSetup, SlotReport,
};
pub use sweep::{sweep_constraint, value_grid, SweepAxis, SweepPoint, SweepSetup};
pub use workload::{
    generate_workload, partition_slots, read_sizes_file, SizeDistribution, Slot, WorkloadError, WorkloadSpec,
    DEFAULT_MEDIAN_MB,
};
