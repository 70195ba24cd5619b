//! Slot instances, assignments and fitness evaluation.

use std::cmp::Ordering;

use thiserror::Error;

use crate::model::{job_energy, job_time, Catalog, ChannelModel, ConstraintPair, JobSpec, ModelError};

/// Fitness of an assignment that breaks a budget: the most negative finite `f64`.
pub const NEG_INF: f64 = f64::MIN;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractViolation {
    #[error("assignment has {got} genes, instance has {expected} jobs")]
    LengthMismatch { expected: usize, got: usize },
    #[error("gene {position} selects model index {index}, catalog has {models} models")]
    GeneOutOfRange { position: usize, index: usize, models: usize },
}

/// Model choice per job. `genes[j]` is a zero-based position in the catalog, so the
/// selected model's id is `genes[j] + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Assignment {
    genes: Vec<usize>,
}

impl Assignment {
    pub fn new(genes: Vec<usize>) -> Self {
        Assignment { genes }
    }

    /// Builds an assignment from one-based model ids.
    pub fn from_model_ids(ids: &[u32]) -> Self {
        Assignment { genes: ids.iter().map(|&id| id.saturating_sub(1) as usize).collect() }
    }

    pub fn genes(&self) -> &[usize] {
        &self.genes
    }

    pub fn genes_mut(&mut self) -> &mut [usize] {
        &mut self.genes
    }

    pub fn into_genes(self) -> Vec<usize> {
        self.genes
    }

    pub fn model_ids(&self) -> Vec<u32> {
        self.genes.iter().map(|&g| g as u32 + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

impl From<Vec<usize>> for Assignment {
    fn from(genes: Vec<usize>) -> Self {
        Assignment { genes }
    }
}

/// An assignment with its fitness and cost totals.
///
/// When evaluation stopped early at a broken budget, `total_time`/`total_energy` hold the
/// running totals at that point and `totals_complete` is false; call
/// [`EvaluatedAssignment::complete_totals`] to finish them.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedAssignment {
    pub assignment: Assignment,
    pub fitness: f64,
    pub total_time: f64,
    pub total_energy: f64,
    pub totals_complete: bool,
}

impl EvaluatedAssignment {
    pub fn is_feasible(&self) -> bool {
        self.fitness != NEG_INF
    }

    pub fn genes(&self) -> &[usize] {
        self.assignment.genes()
    }

    pub fn complete_totals(&mut self, instance: &SlotInstance) {
        if !self.totals_complete {
            let (t, e) = instance.totals(self.assignment.genes());
            self.total_time = t;
            self.total_energy = e;
            self.totals_complete = true;
        }
    }
}

/// Ranking order: higher fitness first, then lower total time, lower total energy, and
/// lexicographically smaller genes. `Less` means `a` ranks ahead of `b`.
pub fn rank_cmp(a: &EvaluatedAssignment, b: &EvaluatedAssignment) -> Ordering {
    b.fitness
        .total_cmp(&a.fitness)
        .then_with(|| a.total_time.total_cmp(&b.total_time))
        .then_with(|| a.total_energy.total_cmp(&b.total_energy))
        .then_with(|| a.assignment.genes().cmp(b.assignment.genes()))
}

/// One scheduling problem: the jobs of a slot, the model catalog, the channel and budgets.
///
/// Per-job costs for every model are computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotInstance {
    jobs: Vec<JobSpec>,
    catalog: Catalog,
    channel: ChannelModel,
    constraints: ConstraintPair,
    /// Row-major `jobs x models` table of `(time, energy)`.
    costs: Vec<(f64, f64)>,
}

impl SlotInstance {
    /// Zero jobs are allowed here so the exact solvers can handle the degenerate case;
    /// use [`SlotInstance::new`] for scheduling slots.
    pub fn with_jobs(
        jobs: Vec<JobSpec>,
        catalog: Catalog,
        channel: ChannelModel,
        constraints: ConstraintPair,
    ) -> Result<Self, ModelError> {
        channel.validate()?;
        constraints.validate()?;
        for job in &jobs {
            job.validate()?;
        }
        let mut costs = Vec::with_capacity(jobs.len() * catalog.len());
        for job in &jobs {
            for model in catalog.iter() {
                costs.push((job_time(job, model, &channel), job_energy(job, model, &channel)));
            }
        }
        Ok(SlotInstance { jobs, catalog, channel, constraints, costs })
    }

    pub fn new(
        jobs: Vec<JobSpec>,
        catalog: Catalog,
        channel: ChannelModel,
        constraints: ConstraintPair,
    ) -> Result<Self, ModelError> {
        if jobs.is_empty() {
            return Err(ModelError::InvalidInstance("a slot needs at least one job".into()));
        }
        Self::with_jobs(jobs, catalog, channel, constraints)
    }

    /// Same jobs, catalog and channel under different budgets.
    pub fn with_constraints(&self, constraints: ConstraintPair) -> Result<Self, ModelError> {
        constraints.validate()?;
        Ok(SlotInstance { constraints, ..self.clone() })
    }

    pub fn jobs(&self) -> &[JobSpec] {
        &self.jobs
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn model_count(&self) -> usize {
        self.catalog.len()
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }

    pub fn constraints(&self) -> &ConstraintPair {
        &self.constraints
    }

    pub fn time_budget(&self) -> f64 {
        self.constraints.time_budget_ms
    }

    pub fn energy_budget(&self) -> f64 {
        self.constraints.energy_budget
    }

    /// `(time, energy)` of running job `job` on catalog position `model`.
    #[inline]
    pub fn cost(&self, job: usize, model: usize) -> (f64, f64) {
        self.costs[job * self.catalog.len() + model]
    }

    #[inline]
    pub fn accuracy(&self, model: usize) -> f64 {
        self.catalog[model].avg_accuracy
    }

    pub fn check(&self, assignment: &Assignment) -> Result<(), ContractViolation> {
        if assignment.len() != self.jobs.len() {
            return Err(ContractViolation::LengthMismatch { expected: self.jobs.len(), got: assignment.len() });
        }
        let models = self.catalog.len();
        if let Some((position, &index)) = assignment.genes().iter().enumerate().find(|(_, &g)| g >= models) {
            return Err(ContractViolation::GeneOutOfRange { position, index, models });
        }
        Ok(())
    }

    /// Fitness with early break: stops at the first job whose running totals exceed a budget.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<EvaluatedAssignment, ContractViolation> {
        self.check(assignment)?;
        Ok(self.evaluate_unchecked(assignment.clone()))
    }

    /// Like [`SlotInstance::evaluate`] but always returns complete totals.
    pub fn evaluate_full(&self, assignment: &Assignment) -> Result<EvaluatedAssignment, ContractViolation> {
        let mut ev = self.evaluate(assignment)?;
        ev.complete_totals(self);
        Ok(ev)
    }

    /// Callers guarantee the assignment is valid for this instance.
    pub(crate) fn evaluate_unchecked(&self, assignment: Assignment) -> EvaluatedAssignment {
        let mut ev = EvaluatedAssignment {
            assignment,
            fitness: NEG_INF,
            total_time: 0.0,
            total_energy: 0.0,
            totals_complete: false,
        };
        self.reevaluate(&mut ev);
        ev
    }

    /// Recomputes fitness and totals after the genes of `ev` were changed in place.
    pub(crate) fn reevaluate(&self, ev: &mut EvaluatedAssignment) {
        debug_assert!(self.check(&ev.assignment).is_ok());
        let (t_max, e_max) = (self.constraints.time_budget_ms, self.constraints.energy_budget);
        let (mut time, mut energy, mut acc) = (0.0, 0.0, 0.0);
        let genes = ev.assignment.genes();
        for (j, &g) in genes.iter().enumerate() {
            let (t, e) = self.cost(j, g);
            time += t;
            energy += e;
            if time > t_max || energy > e_max {
                ev.fitness = NEG_INF;
                ev.total_time = time;
                ev.total_energy = energy;
                ev.totals_complete = j + 1 == genes.len();
                return;
            }
            acc += self.accuracy(g);
        }
        ev.fitness = acc;
        ev.total_time = time;
        ev.total_energy = energy;
        ev.totals_complete = true;
    }

    /// Summed accuracy of an assignment regardless of the budgets.
    pub fn accuracy_sum(&self, genes: &[usize]) -> f64 {
        genes.iter().map(|&g| self.accuracy(g)).sum()
    }

    pub(crate) fn totals(&self, genes: &[usize]) -> (f64, f64) {
        genes.iter().enumerate().fold((0.0, 0.0), |(t, e), (j, &g)| {
            let (dt, de) = self.cost(j, g);
            (t + dt, e + de)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference_catalog, Locality, ModelProfile};

    pub(crate) fn toy() -> SlotInstance {
        let catalog = Catalog::new(vec![
            ModelProfile::new(1, 0.9, 30.0, 1.0, Locality::Local),
            ModelProfile::new(2, 0.5, 10.0, 0.2, Locality::Local),
        ])
        .unwrap();
        let jobs = vec![JobSpec::new(1, 1.0).unwrap(), JobSpec::new(2, 1.0).unwrap()];
        SlotInstance::new(jobs, catalog, ChannelModel::default(), ConstraintPair::new(45.0, 2.0).unwrap()).unwrap()
    }

    fn paper_slot(size: f64) -> SlotInstance {
        let jobs = (1..=10).map(|id| JobSpec::new(id, size).unwrap()).collect();
        SlotInstance::new(jobs, reference_catalog(0.0), ChannelModel::default(), ConstraintPair::default()).unwrap()
    }

    #[test]
    fn all_shufflenet_slot() {
        let inst = paper_slot(0.11);
        let ev = inst.evaluate(&Assignment::new(vec![2; 10])).unwrap();
        assert!((ev.fitness - 661.5977267).abs() < 1e-9);
        assert!((ev.total_time - 194.4331129).abs() < 1e-9);
        assert!(ev.is_feasible());
    }

    #[test]
    fn all_resnet34_breaks_time_budget() {
        let inst = paper_slot(0.11);
        let mut ev = inst.evaluate(&Assignment::new(vec![1; 10])).unwrap();
        assert_eq!(ev.fitness, NEG_INF);
        assert!(!ev.totals_complete);
        ev.complete_totals(&inst);
        assert!((ev.total_time - 424.5949233).abs() < 1e-9);
    }

    #[test]
    fn toy_evaluation() {
        let inst = toy();
        let ev = inst.evaluate(&Assignment::new(vec![0, 1])).unwrap();
        assert!((ev.fitness - 1.4).abs() < 1e-12);
        assert_eq!(ev.total_time, 40.0);
        assert!((ev.total_energy - 1.2).abs() < 1e-12);
        assert_eq!(inst.evaluate(&Assignment::new(vec![0, 0])).unwrap().fitness, NEG_INF);
    }

    #[test]
    fn contract_violations() {
        let inst = toy();
        assert_eq!(
            inst.evaluate(&Assignment::new(vec![0])).unwrap_err(),
            ContractViolation::LengthMismatch { expected: 2, got: 1 }
        );
        assert_eq!(
            inst.evaluate(&Assignment::new(vec![0, 2])).unwrap_err(),
            ContractViolation::GeneOutOfRange { position: 1, index: 2, models: 2 }
        );
    }

    #[test]
    fn rank_order_breaks_ties() {
        let inst = toy();
        let ab = inst.evaluate(&Assignment::new(vec![0, 1])).unwrap();
        let ba = inst.evaluate(&Assignment::new(vec![1, 0])).unwrap();
        let bb = inst.evaluate(&Assignment::new(vec![1, 1])).unwrap();
        assert_eq!(rank_cmp(&ab, &ba), Ordering::Less);
        assert_eq!(rank_cmp(&ab, &bb), Ordering::Less);
        let mut v = vec![bb.clone(), ba.clone(), ab.clone()];
        v.sort_by(rank_cmp);
        assert_eq!(v, vec![ab, ba, bb]);
    }

    #[test]
    fn model_id_conversion() {
        let a = Assignment::from_model_ids(&[1, 4, 2]);
        assert_eq!(a.genes(), &[0, 3, 1]);
        assert_eq!(a.model_ids(), vec![1, 4, 2]);
    }
}
