//! Particle swarm search over real-valued positions decoded by rounding.

use serde::{Deserialize, Serialize};

use super::SearchOutcome;
use crate::instance::{rank_cmp, Assignment, EvaluatedAssignment, SlotInstance};
use crate::lgsto::ParamError;
use crate::rng::SubtractiveRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Optional bound on each velocity component; unbounded when absent.
    pub velocity_clamp: Option<f64>,
    pub seed: u64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            swarm_size: 2000,
            max_iterations: 30,
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            velocity_clamp: None,
            seed: 0,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.swarm_size < 1 {
            return Err(ParamError::new("swarm_size", "must be >= 1"));
        }
        for (name, v) in [("inertia", self.inertia), ("cognitive", self.cognitive), ("social", self.social)] {
            if !v.is_finite() || v < 0.0 {
                return Err(ParamError::new(name, "must be finite and >= 0"));
            }
        }
        if let Some(c) = self.velocity_clamp {
            if !c.is_finite() || c <= 0.0 {
                return Err(ParamError::new("velocity_clamp", "must be finite and positive"));
            }
        }
        Ok(())
    }
}

/// Catalog position encoded by a coordinate, for one-based coordinates in `1..=models`.
pub fn decode_position(x: f64, models: usize) -> usize {
    // Rounds half up; on the clamped, positive range truncation after adding 0.5 is exact
    // and avoids a libm call in the hottest loop.
    let id = (x.clamp(1.0, models as f64) + 0.5) as usize;
    id.min(models) - 1
}

struct Particle {
    position: Vec<f64>,
    velocity: Vec<f64>,
    best_position: Vec<f64>,
    best: EvaluatedAssignment,
}

fn decode(position: &[f64], models: usize) -> Assignment {
    Assignment::new(position.iter().map(|&x| decode_position(x, models)).collect())
}

pub fn run_pso(instance: &SlotInstance, params: &PsoParams) -> Result<SearchOutcome, ParamError> {
    params.validate()?;
    let (n, models) = (instance.job_count(), instance.model_count());
    let top = models as f64;
    let mut rng = SubtractiveRng::new(params.seed);

    let mut swarm: Vec<Particle> = (0..params.swarm_size)
        .map(|_| {
            let position: Vec<f64> = (0..n).map(|_| 1.0 + rng.uniform() * (top - 1.0)).collect();
            let velocity = (0..n).map(|_| rng.sign()).collect();
            let best = instance.evaluate_unchecked(decode(&position, models));
            Particle { best_position: position.clone(), position, velocity, best }
        })
        .collect();
    let mut global = best_particle(&swarm);
    let mut global_position = swarm[global].best_position.clone();
    let mut global_best = swarm[global].best.clone();

    // Scratch evaluation reused for every move; swapped with a particle's best when it wins.
    let mut trial = global_best.clone();
    for _ in 0..params.max_iterations {
        for p in swarm.iter_mut() {
            for d in 0..n {
                let (u1, u2) = (rng.uniform(), rng.uniform());
                let mut v = params.inertia * p.velocity[d]
                    + params.cognitive * u1 * (p.best_position[d] - p.position[d])
                    + params.social * u2 * (global_position[d] - p.position[d]);
                if let Some(c) = params.velocity_clamp {
                    v = v.clamp(-c, c);
                }
                p.velocity[d] = v;
                p.position[d] += v;
            }
            for (g, &x) in trial.assignment.genes_mut().iter_mut().zip(&p.position) {
                *g = decode_position(x, models);
            }
            instance.reevaluate(&mut trial);
            if rank_cmp(&trial, &p.best).is_lt() {
                std::mem::swap(&mut p.best, &mut trial);
                p.best_position.copy_from_slice(&p.position);
            }
        }
        global = best_particle(&swarm);
        if rank_cmp(&swarm[global].best, &global_best).is_lt() {
            global_best = swarm[global].best.clone();
            global_position.copy_from_slice(&swarm[global].best_position);
        }
    }

    Ok(SearchOutcome { best: global_best, iterations: params.max_iterations })
}

fn best_particle(swarm: &[Particle]) -> usize {
    (0..swarm.len()).min_by(|&a, &b| rank_cmp(&swarm[a].best, &swarm[b].best)).expect("swarm is never empty")
}
