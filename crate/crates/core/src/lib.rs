//! Selective offloading of inference jobs to a remote model under per-slot time and
//! energy budgets.
//!
//! Each job in a slot picks one model from a catalog; the goal is the largest summed
//! expected accuracy whose total time and energy fit the slot budgets.

pub mod bench;
pub mod exact;
pub mod heuristics;
pub mod instance;
pub mod lgsto;
pub mod model;
pub mod rng;
pub mod scheduler;
pub mod sim;

pub use exact::{solve_dp, solve_naive_memo, ExactError, ExactSolution, QuantizationSpec};
pub use instance::{Assignment, ContractViolation, EvaluatedAssignment, SlotInstance, NEG_INF};
pub use lgsto::{run_lgsto, GaOutcome, LgstoParams, NeighborhoodMode, ParamError};
pub use model::{
    reference_catalog, Catalog, ChannelModel, ConstraintPair, JobSpec, Locality, ModelError, ModelProfile,
    REFERENCE_DEVICE_POWER_W,
};
pub use rng::SubtractiveRng;
pub use scheduler::{schedule, ScheduleResult, Scheme, SchemeParams, SolveError};
