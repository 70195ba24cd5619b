//! Ant colony search over a (job, model) pheromone matrix.
//!
//! The heuristic desirability of model `i` for job `j` is its accuracy divided by the
//! budget-normalised cost `t/T + e/E`.

use serde::{Deserialize, Serialize};

use super::SearchOutcome;
use crate::instance::{rank_cmp, Assignment, EvaluatedAssignment, SlotInstance};
use crate::lgsto::ParamError;
use crate::rng::SubtractiveRng;

const ETA_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcoParams {
    pub ant_count: usize,
    pub evaporation: f64,
    pub max_iterations: usize,
    pub alpha: f64,
    pub beta: f64,
    pub initial_pheromone: f64,
    pub seed: u64,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams {
            ant_count: 200,
            evaporation: 0.1,
            max_iterations: 50,
            alpha: 1.0,
            beta: 2.0,
            initial_pheromone: 1.0,
            seed: 0,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.ant_count < 1 {
            return Err(ParamError::new("ant_count", "must be >= 1"));
        }
        if !(self.evaporation > 0.0 && self.evaporation < 1.0) {
            return Err(ParamError::new("evaporation", "must lie in (0, 1)"));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !v.is_finite() || v < 0.0 {
                return Err(ParamError::new(name, "must be finite and >= 0"));
            }
        }
        if !self.initial_pheromone.is_finite() || self.initial_pheromone <= 0.0 {
            return Err(ParamError::new("initial_pheromone", "must be finite and positive"));
        }
        Ok(())
    }
}

/// Row-major `jobs x models` matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Pheromone {
    models: usize,
    values: Vec<f64>,
}

impl Pheromone {
    fn new(jobs: usize, models: usize, init: f64) -> Self {
        Pheromone { models, values: vec![init; jobs * models] }
    }

    fn evaporate(&mut self, rate: f64) {
        for v in &mut self.values {
            *v *= 1.0 - rate;
        }
    }

    fn deposit(&mut self, genes: &[usize], amount: f64) {
        for (j, &g) in genes.iter().enumerate() {
            self.values[j * self.models + g] += amount;
        }
    }
}

/// Selection weights `tau^alpha * eta^beta` for every (job, model) pair.
fn weights(tau: &Pheromone, eta_beta: &[f64], alpha: f64) -> Vec<f64> {
    tau.values.iter().zip(eta_beta).map(|(&t, &h)| t.powf(alpha) * h).collect()
}

fn construct(weights: &[f64], jobs: usize, models: usize, rng: &mut SubtractiveRng) -> Assignment {
    let genes = (0..jobs)
        .map(|j| {
            let row = &weights[j * models..(j + 1) * models];
            let total: f64 = row.iter().sum();
            let mut target = rng.uniform() * total;
            for (i, &w) in row.iter().enumerate() {
                if target < w {
                    return i;
                }
                target -= w;
            }
            // Rounding left the draw past the last positive weight.
            row.iter().rposition(|&w| w > 0.0).unwrap_or(models - 1)
        })
        .collect();
    Assignment::new(genes)
}

pub fn run_aco(instance: &SlotInstance, params: &AcoParams) -> Result<SearchOutcome, ParamError> {
    params.validate()?;
    let (jobs, models) = (instance.job_count(), instance.model_count());
    let (t_max, e_max) = (instance.time_budget(), instance.energy_budget());
    let eta_beta: Vec<f64> = (0..jobs)
        .flat_map(|j| (0..models).map(move |i| (j, i)))
        .map(|(j, i)| {
            let (t, e) = instance.cost(j, i);
            (instance.accuracy(i) / (t / t_max + e / e_max + ETA_EPSILON)).max(0.0).powf(params.beta)
        })
        .collect();
    let mut tau = Pheromone::new(jobs, models, params.initial_pheromone);
    let mut rng = SubtractiveRng::new(params.seed);
    let mut best: Option<EvaluatedAssignment> = None;
    let mut fallback: Option<EvaluatedAssignment> = None;

    for _ in 0..params.max_iterations {
        let w = weights(&tau, &eta_beta, params.alpha);
        let mut iteration_best: Option<EvaluatedAssignment> = None;
        for _ in 0..params.ant_count {
            let ev = instance.evaluate_unchecked(construct(&w, jobs, models, &mut rng));
            let slot = if ev.is_feasible() { &mut iteration_best } else { &mut fallback };
            if slot.as_ref().is_none_or(|b| rank_cmp(&ev, b).is_lt()) {
                *slot = Some(ev);
            }
        }
        tau.evaporate(params.evaporation);
        if let Some(it) = iteration_best {
            if best.as_ref().is_none_or(|b| rank_cmp(&it, b).is_lt()) {
                best = Some(it.clone());
            }
            let reference = best.as_ref().map_or(it.fitness, |b| b.fitness);
            let amount = if reference > 0.0 { it.fitness / reference } else { 1.0 };
            tau.deposit(it.genes(), amount);
        }
    }

    let best = match best.or(fallback) {
        Some(b) => b,
        // Zero iterations: a single ant from the initial trail.
        None => instance.evaluate_unchecked(construct(&weights(&tau, &eta_beta, params.alpha), jobs, models, &mut rng)),
    };
    Ok(SearchOutcome { best, iterations: params.max_iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Catalog, ChannelModel, ConstraintPair, JobSpec, Locality, ModelProfile};

    fn toy() -> SlotInstance {
        let catalog = Catalog::new(vec![
            ModelProfile::new(1, 0.9, 30.0, 1.0, Locality::Local),
            ModelProfile::new(2, 0.5, 10.0, 0.2, Locality::Local),
        ])
        .unwrap();
        let jobs = vec![JobSpec::new(1, 1.0).unwrap(), JobSpec::new(2, 1.0).unwrap()];
        SlotInstance::new(jobs, catalog, ChannelModel::default(), ConstraintPair::new(45.0, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn uniform_weights_sample_uniformly() {
        let tau = Pheromone::new(1, 4, 1.0);
        let w = weights(&tau, &[1.0; 4], 1.0);
        let mut rng = SubtractiveRng::new(12);
        let mut counts = [0usize; 4];
        let draws = 40_000;
        for _ in 0..draws {
            counts[construct(&w, 1, 4, &mut rng).genes()[0]] += 1;
        }
        for c in counts {
            let share = c as f64 / draws as f64;
            assert!((share - 0.25).abs() < 0.015, "{counts:?}");
        }
    }

    #[test]
    fn evaporation_scales_untouched_entries() {
        let mut tau = Pheromone::new(2, 2, 1.0);
        tau.evaporate(0.1);
        tau.deposit(&[0, 1], 0.5);
        assert_eq!(tau.values, vec![1.4, 0.9, 0.9, 1.4]);
    }

    #[test]
    fn zero_weight_never_chosen() {
        let w = [0.0, 2.0, 0.0];
        let mut rng = SubtractiveRng::new(1);
        for _ in 0..500 {
            assert_eq!(construct(&w, 1, 3, &mut rng).genes(), &[1]);
        }
    }

    #[test]
    fn toy_optimum_in_most_seeds() {
        let inst = toy();
        let hits = (0..100)
            .filter(|&seed| {
                let params = AcoParams { ant_count: 50, max_iterations: 20, seed, ..Default::default() };
                (run_aco(&inst, &params).unwrap().best.fitness - 1.4).abs() < 1e-12
            })
            .count();
        assert!(hits >= 95, "{hits}");
    }

    #[test]
    fn infeasible_reported() {
        let inst = toy().with_constraints(ConstraintPair::new(5.0, 2.0).unwrap()).unwrap();
        let out = run_aco(&inst, &AcoParams { ant_count: 10, max_iterations: 3, ..Default::default() }).unwrap();
        assert!(!out.best.is_feasible());
    }

    #[test]
    fn rejects_bad_evaporation() {
        for rate in [0.0, 1.0, -0.5] {
            assert!(AcoParams { evaporation: rate, ..Default::default() }.validate().is_err());
        }
    }
}
