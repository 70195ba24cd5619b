//! One interface over every scheduling scheme.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{solve_dp, solve_naive_memo, ExactError, ExactSolution, QuantizationSpec};
use crate::heuristics::{run_aco, run_ga_cr, run_ga_gp, run_nsga2, run_pso, AcoParams, Nsga2Params, PsoParams};
use crate::instance::{Assignment, EvaluatedAssignment, SlotInstance};
use crate::lgsto::{run_lgsto, LgstoParams, ParamError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    Naive,
    Dp,
    Lgsto,
    GaGp,
    GaCr,
    Nsga2,
    Pso,
    Aco,
}

impl Scheme {
    pub const ALL: [Scheme; 8] =
        [Scheme::Naive, Scheme::Dp, Scheme::GaGp, Scheme::GaCr, Scheme::Nsga2, Scheme::Pso, Scheme::Aco, Scheme::Lgsto];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Naive => "naive",
            Scheme::Dp => "dp",
            Scheme::Lgsto => "lgsto",
            Scheme::GaGp => "ga-gp",
            Scheme::GaCr => "ga-cr",
            Scheme::Nsga2 => "nsga2",
            Scheme::Pso => "pso",
            Scheme::Aco => "aco",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scheme::Naive | Scheme::Dp)
    }

    pub fn valid_names() -> String {
        Scheme::ALL.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown scheme {0:?} (valid: {valid})", valid = Scheme::valid_names())]
pub struct UnknownScheme(pub String);

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

impl TryFrom<String> for Scheme {
    type Error = UnknownScheme;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> Self {
        s.name().to_string()
    }
}

/// Parameters of every scheme. Seeds inside are overridden per call.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeParams {
    pub quantization: QuantizationSpec,
    pub lgsto: LgstoParams,
    pub ga_gp: LgstoParams,
    pub ga_cr: LgstoParams,
    pub nsga2: Nsga2Params,
    pub pso: PsoParams,
    pub aco: AcoParams,
}

impl SchemeParams {
    pub fn validate(&self) -> Result<(), SolveError> {
        self.lgsto.validate()?;
        self.ga_gp.validate()?;
        self.ga_cr.validate()?;
        self.nsga2.validate()?;
        self.pso.validate()?;
        self.aco.validate()?;
        self.quantization.validate()?;
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Outcome of one scheduling call.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleResult {
    pub scheme: Scheme,
    pub assignment: Assignment,
    /// Summed accuracy, or `NEG_INF` when no feasible assignment was found.
    pub objective: f64,
    pub est_time_ms: f64,
    pub est_energy: f64,
    pub feasible: bool,
    /// Generations, iterations or layers the scheme ran for.
    pub iterations: usize,
    /// Wall clock of the solver call alone.
    pub scheduling_time: Duration,
}

impl ScheduleResult {
    pub fn scheduling_time_ms(&self) -> f64 {
        self.scheduling_time.as_secs_f64() * 1000.0
    }
}

/// Per-job choice minimising the budget-normalised cost; reported when a scheme finds
/// nothing feasible.
pub fn cheapest_assignment(instance: &SlotInstance) -> Assignment {
    let (t_max, e_max) = (instance.time_budget(), instance.energy_budget());
    let genes = (0..instance.job_count())
        .map(|j| {
            (0..instance.model_count())
                .min_by(|&a, &b| {
                    let (ta, ea) = instance.cost(j, a);
                    let (tb, eb) = instance.cost(j, b);
                    (ta / t_max + ea / e_max).total_cmp(&(tb / t_max + eb / e_max))
                })
                .expect("catalog is never empty")
        })
        .collect();
    Assignment::new(genes)
}

fn exact_outcome(instance: &SlotInstance, solution: Option<ExactSolution>) -> (Assignment, usize) {
    let assignment = solution.map_or_else(|| cheapest_assignment(instance), |s| s.assignment);
    (assignment, instance.job_count())
}

/// Runs `scheme` on `instance` untimed and returns the chosen assignment plus iterations.
pub fn run_scheme(
    scheme: Scheme,
    instance: &SlotInstance,
    params: &SchemeParams,
    seed: u64,
) -> Result<(Assignment, usize), SolveError> {
    let outcome = match scheme {
        Scheme::Naive => return Ok(exact_outcome(instance, solve_naive_memo(instance, &params.quantization)?)),
        Scheme::Dp => return Ok(exact_outcome(instance, solve_dp(instance, &params.quantization)?)),
        Scheme::Lgsto => {
            let out = run_lgsto(instance, &LgstoParams { seed, ..params.lgsto.clone() })?;
            return Ok((out.best.assignment, out.generations));
        }
        Scheme::GaGp => run_ga_gp(instance, &LgstoParams { seed, ..params.ga_gp.clone() })?,
        Scheme::GaCr => run_ga_cr(instance, &LgstoParams { seed, ..params.ga_cr.clone() })?,
        Scheme::Nsga2 => run_nsga2(instance, &Nsga2Params { seed, ..params.nsga2.clone() })?,
        Scheme::Pso => run_pso(instance, &PsoParams { seed, ..params.pso.clone() })?,
        Scheme::Aco => run_aco(instance, &AcoParams { seed, ..params.aco.clone() })?,
    };
    Ok((outcome.best.assignment, outcome.iterations))
}

/// Times [`run_scheme`] and evaluates the returned assignment against the instance.
pub fn schedule(
    scheme: Scheme,
    instance: &SlotInstance,
    params: &SchemeParams,
    seed: u64,
) -> Result<ScheduleResult, SolveError> {
    let start = Instant::now();
    let (assignment, iterations) = run_scheme(scheme, instance, params, seed)?;
    let scheduling_time = start.elapsed();
    let ev: EvaluatedAssignment =
        instance.evaluate_full(&assignment).expect("schemes return assignments shaped for their instance");
    Ok(ScheduleResult {
        scheme,
        feasible: ev.is_feasible(),
        objective: ev.fitness,
        est_time_ms: ev.total_time,
        est_energy: ev.total_energy,
        assignment,
        iterations,
        scheduling_time,
    })
}
