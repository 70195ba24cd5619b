//! NSGA-II over (accuracy, time, energy) with constraint-domination.
//!
//! Any budget-respecting member dominates any violating one; two violators compare by
//! their summed relative budget overrun. Among the final population the feasible member
//! with the highest accuracy is reported.

use serde::{Deserialize, Serialize};

use super::SearchOutcome;
use crate::instance::{rank_cmp, Assignment, EvaluatedAssignment, SlotInstance};
use crate::lgsto::{crossover_duc, mutate, ParamError};
use crate::rng::SubtractiveRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Nsga2Params {
    pub population_size: usize,
    pub max_generations: usize,
    pub mutation_probability: f64,
    pub seed: u64,
}

impl Default for Nsga2Params {
    fn default() -> Self {
        Nsga2Params { population_size: 100, max_generations: 10, mutation_probability: 0.3, seed: 0 }
    }
}

impl Nsga2Params {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.population_size < 2 {
            return Err(ParamError::new("population_size", "must be > 1"));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(ParamError::new("mutation_probability", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Objective vector of one member plus its budget violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objectives {
    pub accuracy: f64,
    pub time: f64,
    pub energy: f64,
    /// Sum of relative overruns of both budgets; zero when feasible.
    pub violation: f64,
}

impl Objectives {
    pub fn of(ev: &EvaluatedAssignment, instance: &SlotInstance) -> Self {
        let (t_max, e_max) = (instance.time_budget(), instance.energy_budget());
        let violation = ((ev.total_time - t_max) / t_max).max(0.0) + ((ev.total_energy - e_max) / e_max).max(0.0);
        Objectives {
            accuracy: instance.accuracy_sum(ev.genes()),
            time: ev.total_time,
            energy: ev.total_energy,
            violation,
        }
    }

    fn feasible(&self) -> bool {
        self.violation == 0.0
    }
}

pub fn constraint_dominates(a: &Objectives, b: &Objectives) -> bool {
    match (a.feasible(), b.feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => {
            let no_worse = a.accuracy >= b.accuracy && a.time <= b.time && a.energy <= b.energy;
            let better = a.accuracy > b.accuracy || a.time < b.time || a.energy < b.energy;
            no_worse && better
        }
    }
}

struct Member {
    ev: EvaluatedAssignment,
    obj: Objectives,
    rank: usize,
    crowding: f64,
}

fn member(instance: &SlotInstance, a: Assignment) -> Member {
    let mut ev = instance.evaluate_unchecked(a);
    ev.complete_totals(instance);
    let obj = Objectives::of(&ev, instance);
    Member { ev, obj, rank: 0, crowding: 0.0 }
}

/// Fronts of member indices, best first; also writes each member's rank.
fn non_dominated_sort(pop: &mut [Member]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for p in 0..n {
        for q in p + 1..n {
            if constraint_dominates(&pop[p].obj, &pop[q].obj) {
                dominated_by_me[p].push(q);
                domination_count[q] += 1;
            } else if constraint_dominates(&pop[q].obj, &pop[p].obj) {
                dominated_by_me[q].push(p);
                domination_count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    let mut rank = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            pop[p].rank = rank;
            for &q in &dominated_by_me[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
        rank += 1;
    }
    fronts
}

fn assign_crowding(pop: &mut [Member], front: &[usize]) {
    for &i in front {
        pop[i].crowding = 0.0;
    }
    if front.len() <= 2 {
        for &i in front {
            pop[i].crowding = f64::INFINITY;
        }
        return;
    }
    let getters: [fn(&Objectives) -> f64; 3] = [|o| o.accuracy, |o| o.time, |o| o.energy];
    for get in getters {
        let mut order = front.to_vec();
        order.sort_by(|&a, &b| get(&pop[a].obj).total_cmp(&get(&pop[b].obj)).then(a.cmp(&b)));
        let (lo, hi) = (get(&pop[order[0]].obj), get(&pop[*order.last().unwrap()].obj));
        pop[order[0]].crowding = f64::INFINITY;
        pop[*order.last().unwrap()].crowding = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..order.len() - 1 {
            let gap = get(&pop[order[w + 1]].obj) - get(&pop[order[w - 1]].obj);
            pop[order[w]].crowding += gap / span;
        }
    }
}

fn crowded_better(a: &Member, b: &Member) -> bool {
    a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding)
}

fn binary_tournament<'a>(pop: &'a [Member], rng: &mut SubtractiveRng) -> &'a Member {
    let a = &pop[rng.below(pop.len())];
    let b = &pop[rng.below(pop.len())];
    if crowded_better(b, a) {
        b
    } else {
        a
    }
}

/// Keeps `size` members by front, breaking the last front by crowding distance.
fn environmental_selection(mut pool: Vec<Member>, size: usize) -> Vec<Member> {
    let fronts = non_dominated_sort(&mut pool);
    let mut keep = Vec::with_capacity(size);
    for front in fronts {
        assign_crowding(&mut pool, &front);
        if keep.len() + front.len() <= size {
            keep.extend(front);
        } else {
            let mut rest = front;
            rest.sort_by(|&a, &b| pool[b].crowding.total_cmp(&pool[a].crowding).then(a.cmp(&b)));
            keep.extend(rest.into_iter().take(size - keep.len()));
        }
        if keep.len() == size {
            break;
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Member>> = pool.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("each index kept once")).collect()
}

pub fn run_nsga2(instance: &SlotInstance, params: &Nsga2Params) -> Result<SearchOutcome, ParamError> {
    params.validate()?;
    let n = params.population_size;
    let models = instance.model_count();
    let mut rng = SubtractiveRng::new(params.seed);
    let initial = (0..n)
        .map(|_| {
            let genes = (0..instance.job_count()).map(|_| rng.below(models)).collect();
            member(instance, Assignment::new(genes))
        })
        .collect();
    let mut pop = environmental_selection(initial, n);

    for _ in 0..params.max_generations {
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n {
            let p1 = &binary_tournament(&pop, &mut rng).ev.assignment;
            let p2 = &binary_tournament(&pop, &mut rng).ev.assignment;
            let (c1, c2) = crossover_duc(p1, p2, &mut rng).expect("parents share the instance length");
            for child in [c1, c2] {
                if offspring.len() < n {
                    let child = mutate(child, params.mutation_probability, instance, &mut rng);
                    offspring.push(member(instance, child));
                }
            }
        }
        pop.extend(offspring);
        pop = environmental_selection(pop, n);
    }

    let best = pop.iter().map(|m| &m.ev).min_by(|a, b| rank_cmp(a, b)).cloned().expect("population is never empty");
    let best = if best.is_feasible() {
        best
    } else {
        // Nothing feasible: report the least violating member.
        pop.iter()
            .min_by(|a, b| a.obj.violation.total_cmp(&b.obj.violation).then_with(|| rank_cmp(&a.ev, &b.ev)))
            .map(|m| m.ev.clone())
            .expect("population is never empty")
    };
    Ok(SearchOutcome { best, iterations: params.max_generations })
}
