//! Per-scheme parameter flags.

use clap::Args;
use infersched::{LgstoParams, Scheme, SchemeParams};

/// Each flag applies to every selected scheme that has the matching parameter.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamOverrides {
    /// Population, swarm or colony size.
    #[arg(long)]
    pub pop: Option<usize>,
    /// Generation or iteration cap.
    #[arg(long)]
    pub gens: Option<usize>,
    /// Tournament size (lgsto, ga-gp, ga-cr).
    #[arg(long)]
    pub tournament: Option<usize>,
    /// Initial mutation probability (lgsto, ga-gp, ga-cr, nsga2).
    #[arg(long)]
    pub mutation: Option<f64>,
    /// Fading factor per generation (lgsto, ga-gp, ga-cr).
    #[arg(long)]
    pub fade: Option<f64>,
    /// Termination count (lgsto).
    #[arg(long)]
    pub tc: Option<usize>,
    /// Neighbourhood walk distance (lgsto).
    #[arg(long)]
    pub walk: Option<usize>,
    /// Velocity bound (pso).
    #[arg(long)]
    pub velocity_clamp: Option<f64>,
    /// Pheromone evaporation rate (aco).
    #[arg(long)]
    pub evaporation: Option<f64>,
    /// Time grid step in ms (naive, dp).
    #[arg(long)]
    pub time_quantum: Option<f64>,
    /// Energy grid step (naive, dp).
    #[arg(long)]
    pub energy_quantum: Option<f64>,
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ParamOverrides {
    fn apply_ga(&self, p: &mut LgstoParams) {
        set(&mut p.population_size, self.pop);
        set(&mut p.max_generations, self.gens);
        set(&mut p.tournament_size, self.tournament);
        set(&mut p.mutation_probability, self.mutation);
        set(&mut p.fading_factor, self.fade);
        set(&mut p.termination_count, self.tc);
        set(&mut p.walk_distance, self.walk);
    }

    pub fn apply(&self, params: &mut SchemeParams, schemes: &[Scheme]) {
        for &scheme in schemes {
            match scheme {
                Scheme::Naive | Scheme::Dp => {
                    set(&mut params.quantization.time_quantum, self.time_quantum);
                    set(&mut params.quantization.energy_quantum, self.energy_quantum);
                }
                Scheme::Lgsto => self.apply_ga(&mut params.lgsto),
                Scheme::GaGp => self.apply_ga(&mut params.ga_gp),
                Scheme::GaCr => self.apply_ga(&mut params.ga_cr),
                Scheme::Nsga2 => {
                    set(&mut params.nsga2.population_size, self.pop);
                    set(&mut params.nsga2.max_generations, self.gens);
                    set(&mut params.nsga2.mutation_probability, self.mutation);
                }
                Scheme::Pso => {
                    set(&mut params.pso.swarm_size, self.pop);
                    set(&mut params.pso.max_iterations, self.gens);
                    if self.velocity_clamp.is_some() {
                        params.pso.velocity_clamp = self.velocity_clamp;
                    }
                }
                Scheme::Aco => {
                    set(&mut params.aco.ant_count, self.pop);
                    set(&mut params.aco.max_iterations, self.gens);
                    set(&mut params.aco.evaporation, self.evaporation);
                }
            }
        }
    }
}
