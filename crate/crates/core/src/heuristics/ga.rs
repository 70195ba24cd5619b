//! Genetic-algorithm comparators sharing the LGSTO engine without neighbourhood exploration.

use super::SearchOutcome;
use crate::instance::SlotInstance;
use crate::lgsto::{run_ga, LgstoParams, ParamError, Reproduction};

/// Offspring draw each gene from the same position of the top half of the population.
pub fn run_ga_gp(instance: &SlotInstance, params: &LgstoParams) -> Result<SearchOutcome, ParamError> {
    let out = run_ga(instance, params, Reproduction::GenePool, false)?;
    Ok(SearchOutcome { best: out.best, iterations: out.generations })
}

/// Two tournament winners are spliced at one uniformly chosen inner cut point.
pub fn run_ga_cr(instance: &SlotInstance, params: &LgstoParams) -> Result<SearchOutcome, ParamError> {
    let out = run_ga(instance, params, Reproduction::OnePoint, false)?;
    Ok(SearchOutcome { best: out.best, iterations: out.generations })
}
