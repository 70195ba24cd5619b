//! Lightweight hybrid genetic algorithm for selective task offloading (LGSTO).
//!
//! One run:
//!
//! 1. initialize a random population and rank it,
//! 2. record the rank-1 fitness and stop once the last `termination_count` recorded values
//!    are identical (checked every `termination_count` generations) or the generation cap
//!    is reached,
//! 3. probe single-gene `±k` (`k <= walk_distance`) neighbours of the rank-1 member and
//!    inject the strictly better ones into the next generation,
//! 4. fill the rest of the next generation with feasible offspring from two tournament
//!    selections, discrete uniform crossover and a linearly fading mutation probability,
//! 5. rank and go back to 2.
//!
//! The rank-1 member always survives into the next generation. The same engine drives
//! the GA-GP and GA-CR comparators with a different reproduction operator. They skip
//! both neighbourhood exploration and the convergence check, running the full generation cap.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{rank_cmp, Assignment, ContractViolation, EvaluatedAssignment, SlotInstance};
use crate::rng::SubtractiveRng;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid parameter {name}: {reason}")]
pub struct ParamError {
    pub name: &'static str,
    pub reason: String,
}

impl ParamError {
    pub(crate) fn new(name: &'static str, reason: impl Into<String>) -> Self {
        ParamError { name, reason: reason.into() }
    }
}

/// How neighbours of the rank-1 member are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborhoodMode {
    /// Every candidate differs from the rank-1 member in exactly one gene.
    #[default]
    Independent,
    /// Edits accumulate on one working copy, as a literal in-place reading of the
    /// exploration loop would do. Kept for comparison.
    Compounding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LgstoParams {
    pub population_size: usize,
    pub max_generations: usize,
    pub tournament_size: usize,
    pub mutation_probability: f64,
    pub fading_factor: f64,
    pub termination_count: usize,
    pub walk_distance: usize,
    pub neighborhood: NeighborhoodMode,
    pub seed: u64,
}

impl Default for LgstoParams {
    fn default() -> Self {
        LgstoParams {
            population_size: 100,
            max_generations: 200,
            tournament_size: 20,
            mutation_probability: 0.3,
            fading_factor: 0.01,
            termination_count: 3,
            walk_distance: 1,
            neighborhood: NeighborhoodMode::Independent,
            seed: 0,
        }
    }
}

impl LgstoParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.population_size < 2 {
            return Err(ParamError::new("population_size", "must be > 1"));
        }
        if self.max_generations < 1 {
            return Err(ParamError::new("max_generations", "must be >= 1"));
        }
        if self.tournament_size < 2 || self.tournament_size > self.population_size {
            return Err(ParamError::new("tournament_size", "must lie in [2, population_size]"));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(ParamError::new("mutation_probability", "must lie in [0, 1]"));
        }
        if !self.fading_factor.is_finite() || self.fading_factor < 0.0 {
            return Err(ParamError::new("fading_factor", "must be finite and >= 0"));
        }
        if self.termination_count < 2 {
            return Err(ParamError::new("termination_count", "must be >= 2"));
        }
        if self.walk_distance < 1 {
            return Err(ParamError::new("walk_distance", "must be >= 1"));
        }
        Ok(())
    }

    /// Mutation probability used when breeding from generation `generation`.
    pub fn mutation_probability_at(&self, generation: usize) -> f64 {
        (self.mutation_probability - self.fading_factor * generation as f64).max(0.0)
    }
}

/// A ranked population plus the rank-1 fitness of recent generations.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<EvaluatedAssignment>,
    pub generation_index: usize,
    pub best_history: VecDeque<f64>,
}

impl Population {
    /// Ranks `members`; the history starts empty.
    pub fn new(mut members: Vec<EvaluatedAssignment>, generation_index: usize) -> Self {
        members.sort_by(rank_cmp);
        Population { members, generation_index, best_history: VecDeque::new() }
    }

    pub fn best(&self) -> &EvaluatedAssignment {
        &self.members[0]
    }

    /// Pushes the rank-1 fitness, keeping at most `window` values.
    pub fn record_best(&mut self, window: usize) {
        let best = self.members[0].fitness;
        self.best_history.push_back(best);
        while self.best_history.len() > window {
            self.best_history.pop_front();
        }
    }
}

fn random_assignment(instance: &SlotInstance, rng: &mut SubtractiveRng) -> Assignment {
    let models = instance.model_count();
    Assignment::new((0..instance.job_count()).map(|_| rng.below(models)).collect())
}

/// `population_size` uniformly random assignments over the whole catalog, ranked.
pub fn initialize(instance: &SlotInstance, params: &LgstoParams, rng: &mut SubtractiveRng) -> Population {
    let members =
        (0..params.population_size).map(|_| instance.evaluate_unchecked(random_assignment(instance, rng))).collect();
    Population::new(members, 0)
}

/// Convergence is never declared while the best member is still infeasible.
pub fn check_termination(pop: &Population, params: &LgstoParams) -> bool {
    if pop.generation_index >= params.max_generations {
        return true;
    }
    let tc = params.termination_count;
    if !pop.best().is_feasible()
        || pop.generation_index == 0
        || pop.generation_index % tc != 0
        || pop.best_history.len() < tc
    {
        return false;
    }
    let mut recent = pop.best_history.iter().rev().take(tc);
    let first = recent.next().copied();
    recent.all(|&f| Some(f) == first)
}

/// Neighbours of `best` that are strictly fitter than it.
pub fn explore_neighborhood(
    best: &EvaluatedAssignment,
    instance: &SlotInstance,
    params: &LgstoParams,
) -> Vec<EvaluatedAssignment> {
    let models = instance.model_count() as isize;
    let mut found = Vec::new();
    let mut working = best.assignment.clone();
    for j in 0..best.assignment.len() {
        for k in 1..=params.walk_distance as isize {
            for d in [1isize, -1] {
                let base = match params.neighborhood {
                    NeighborhoodMode::Independent => best.genes()[j],
                    NeighborhoodMode::Compounding => working.genes()[j],
                } as isize;
                let moved = base + k * d;
                if moved < 0 || moved >= models {
                    continue;
                }
                let candidate = match params.neighborhood {
                    NeighborhoodMode::Independent => {
                        let mut c = best.assignment.clone();
                        c.genes_mut()[j] = moved as usize;
                        c
                    }
                    NeighborhoodMode::Compounding => {
                        working.genes_mut()[j] = moved as usize;
                        working.clone()
                    }
                };
                let ev = instance.evaluate_unchecked(candidate);
                if ev.fitness > best.fitness {
                    found.push(ev);
                }
            }
        }
    }
    found
}

/// Best of `tournament_size` members drawn uniformly with replacement.
///
/// Members are kept ranked, so the winner is the one with the smallest drawn position.
pub fn tournament_select<'a>(
    pop: &'a Population,
    tournament_size: usize,
    rng: &mut SubtractiveRng,
) -> &'a EvaluatedAssignment {
    let n = pop.members.len();
    let winner = (0..tournament_size).map(|_| rng.below(n)).min().expect("tournament_size > 0");
    &pop.members[winner]
}

/// Discrete uniform crossover: each position comes from either parent with probability
/// one half, the second child takes the other parent's gene.
pub fn crossover_duc(
    p1: &Assignment,
    p2: &Assignment,
    rng: &mut SubtractiveRng,
) -> Result<(Assignment, Assignment), ContractViolation> {
    if p1.len() != p2.len() {
        return Err(ContractViolation::LengthMismatch { expected: p1.len(), got: p2.len() });
    }
    let (mut o1, mut o2) = (Vec::with_capacity(p1.len()), Vec::with_capacity(p1.len()));
    for (&a, &b) in p1.genes().iter().zip(p2.genes()) {
        if rng.below(2) == 0 {
            o1.push(a);
            o2.push(b);
        } else {
            o1.push(b);
            o2.push(a);
        }
    }
    Ok((Assignment::new(o1), Assignment::new(o2)))
}

/// With probability `probability`, redraws one uniformly chosen gene over the whole catalog.
pub fn mutate(mut a: Assignment, probability: f64, instance: &SlotInstance, rng: &mut SubtractiveRng) -> Assignment {
    if probability > 0.0 && !a.is_empty() && rng.bernoulli(probability) {
        let pos = rng.below(a.len());
        a.genes_mut()[pos] = rng.below(instance.model_count());
    }
    a
}

/// Splices `p1[..cut]` with `p2[cut..]` and the complementary child.
pub fn crossover_one_point(p1: &Assignment, p2: &Assignment, cut: usize) -> (Assignment, Assignment) {
    let (a, b) = (p1.genes(), p2.genes());
    let o1 = a[..cut].iter().chain(&b[cut..]).copied().collect();
    let o2 = b[..cut].iter().chain(&a[cut..]).copied().collect();
    (Assignment::new(o1), Assignment::new(o2))
}

/// One child drawing gene `j` uniformly from position `j` of the given parents.
pub fn gene_pool_offspring(parents: &[EvaluatedAssignment], rng: &mut SubtractiveRng) -> Assignment {
    let n = parents[0].assignment.len();
    Assignment::new((0..n).map(|j| parents[rng.below(parents.len())].genes()[j]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reproduction {
    UniformCrossover,
    GenePool,
    OnePoint,
}

/// Result of one GA run.
#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: EvaluatedAssignment,
    /// Index of the last generation evaluated.
    pub generations: usize,
    /// Rank-1 fitness of every generation, starting with the initial population.
    pub best_per_generation: Vec<f64>,
    /// Mutation probability used to breed each successive generation.
    pub mutation_trace: Vec<f64>,
}

impl GaOutcome {
    pub fn is_feasible(&self) -> bool {
        self.best.is_feasible()
    }
}

pub fn run_lgsto(instance: &SlotInstance, params: &LgstoParams) -> Result<GaOutcome, ParamError> {
    run_ga(instance, params, Reproduction::UniformCrossover, true)
}

pub(crate) fn run_ga(
    instance: &SlotInstance,
    params: &LgstoParams,
    reproduction: Reproduction,
    hybrid: bool,
) -> Result<GaOutcome, ParamError> {
    params.validate()?;
    let p = params.population_size;
    let mut rng = SubtractiveRng::new(params.seed);
    let mut pop = initialize(instance, params, &mut rng);
    let mut best_per_generation = Vec::new();
    let mut mutation_trace = Vec::new();

    loop {
        pop.record_best(params.termination_count);
        best_per_generation.push(pop.best().fitness);
        let done =
            if hybrid { check_termination(&pop, params) } else { pop.generation_index >= params.max_generations };
        if done {
            break;
        }

        let mut next = Vec::with_capacity(p);
        next.push(pop.best().clone());
        if hybrid {
            for neighbour in explore_neighborhood(pop.best(), instance, params) {
                if next.len() == p {
                    break;
                }
                next.push(neighbour);
            }
        }

        let probability = params.mutation_probability_at(pop.generation_index);
        mutation_trace.push(probability);
        let parents_half = (p / 2).max(2).min(pop.members.len());
        let mut attempts = 0;
        while next.len() < p && attempts < p * 10 {
            attempts += 1;
            let (o1, o2) = match reproduction {
                Reproduction::UniformCrossover | Reproduction::OnePoint => {
                    let p1 = &tournament_select(&pop, params.tournament_size, &mut rng).assignment;
                    let p2 = &tournament_select(&pop, params.tournament_size, &mut rng).assignment;
                    if reproduction == Reproduction::UniformCrossover {
                        crossover_duc(p1, p2, &mut rng).expect("parents share the instance length")
                    } else if p1.len() >= 2 {
                        let cut = rng.uniform_int(1, p1.len() - 1);
                        crossover_one_point(p1, p2, cut)
                    } else {
                        (p1.clone(), p2.clone())
                    }
                }
                Reproduction::GenePool => {
                    let pool = &pop.members[..parents_half];
                    (gene_pool_offspring(pool, &mut rng), gene_pool_offspring(pool, &mut rng))
                }
            };
            for child in [o1, o2] {
                let child = mutate(child, probability, instance, &mut rng);
                let ev = instance.evaluate_unchecked(child);
                if ev.is_feasible() && next.len() < p {
                    next.push(ev);
                }
            }
        }
        // Pervasive infeasibility: pad with fresh random members.
        while next.len() < p {
            next.push(instance.evaluate_unchecked(random_assignment(instance, &mut rng)));
        }

        let history = std::mem::take(&mut pop.best_history);
        pop = Population::new(next, pop.generation_index + 1);
        pop.best_history = history;
    }

    Ok(GaOutcome {
        best: pop.members.swap_remove(0),
        generations: pop.generation_index,
        best_per_generation,
        mutation_trace,
    })
}
