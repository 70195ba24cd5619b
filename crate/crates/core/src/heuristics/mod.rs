//! Comparator metaheuristics: GA with gene-pool reproduction, GA with one-point crossover,
//! NSGA-II, particle swarm and ant colony search.
//!
//! Every search returns its best assignment even when that assignment breaks a budget;
//! callers read feasibility off the evaluated result.

mod aco;
mod ga;
mod nsga2;
mod pso;

pub use aco::{run_aco, AcoParams};
pub use ga::{run_ga_cr, run_ga_gp};
pub use nsga2::{constraint_dominates, run_nsga2, Nsga2Params, Objectives};
pub use pso::{decode_position, run_pso, PsoParams};

use crate::instance::EvaluatedAssignment;

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: EvaluatedAssignment,
    /// Generations or iterations performed.
    pub iterations: usize,
}
