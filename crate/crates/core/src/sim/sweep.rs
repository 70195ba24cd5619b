//! Model allocation as one budget varies and the other stays fixed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::simulation::SimError;
use super::workload::Slot;
use crate::instance::SlotInstance;
use crate::model::{Catalog, ChannelModel, ConstraintPair};
use crate::rng::derive_seed;
use crate::scheduler::{schedule, Scheme, SchemeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Time,
    Energy,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Time => "time",
            SweepAxis::Energy => "energy",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "time" => Ok(SweepAxis::Time),
            "energy" => Ok(SweepAxis::Energy),
            other => Err(format!("unknown axis {other:?} (valid: time, energy)")),
        }
    }
}

/// Allocation at one budget value, summed over the sweep's slots.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    /// Jobs assigned to each catalog position, over feasible slots only.
    pub counts: Vec<usize>,
    pub infeasible_slots: usize,
}

#[derive(Debug, Clone)]
pub struct SweepSetup {
    pub catalog: Catalog,
    pub channel: ChannelModel,
    pub axis: SweepAxis,
    /// The budget that stays fixed.
    pub fixed: f64,
    pub scheme: Scheme,
    pub params: SchemeParams,
    pub seed: u64,
}

/// `from, from + step, ...` up to `to` inclusive (with a small tolerance for float steps).
pub fn value_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err("range bounds and step must be finite".into());
    }
    if step <= 0.0 {
        return Err("step must be positive".into());
    }
    if to < from {
        return Err(format!("empty range: from {from} is above to {to}"));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + step * i as f64).collect())
}

pub fn sweep_constraint(slots: &[Slot], values: &[f64], setup: &SweepSetup) -> Result<Vec<SweepPoint>, SimError> {
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SimError::Invalid("sweep values must be strictly increasing".into()));
    }
    setup.params.validate()?;
    let models = setup.catalog.len();
    values
        .iter()
        .enumerate()
        .map(|(vi, &value)| {
            let constraints = match setup.axis {
                SweepAxis::Time => ConstraintPair::new(value, setup.fixed)?,
                SweepAxis::Energy => ConstraintPair::new(setup.fixed, value)?,
            };
            let mut point = SweepPoint { value, counts: vec![0; models], infeasible_slots: 0 };
            for slot in slots {
                let instance =
                    SlotInstance::with_jobs(slot.jobs.clone(), setup.catalog.clone(), setup.channel, constraints)?;
                let seed = derive_seed(setup.seed, &[vi as u64, slot.index as u64]);
                let result = schedule(setup.scheme, &instance, &setup.params, seed)?;
                if result.feasible {
                    for &g in result.assignment.genes() {
                        point.counts[g] += 1;
                    }
                } else {
                    point.infeasible_slots += 1;
                }
            }
            Ok(point)
        })
        .collect()
}
