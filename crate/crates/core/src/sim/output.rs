//! CSV and JSON writers for run results.
//!
//! Numbers are written with at most 10 significant digits, `.` as decimal separator and no
//! grouping; missing values are empty CSV fields and JSON nulls.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

use super::simulation::{SchemeSummary, SlotReport};
use super::sweep::SweepPoint;
use crate::model::Catalog;
use crate::scheduler::Scheme;

pub const SLOT_CSV_HEADER: &str =
    "slot,scheme,est_time_ms,est_energy,real_time_ms,real_energy,avg_accuracy,sched_time_ms,feasible";
pub const SWEEP_CSV_HEADER: &str = "constraint_value,model_id,count";
pub const ACCURACY_DIFF_CSV_HEADER: &str = "slot,scheme,difference";

const SIGNIFICANT_DIGITS: i32 = 10;

/// Formats `x` with at most 10 significant digits, trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let s = if magnitude >= SIGNIFICANT_DIGITS || magnitude < -6 {
        format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x)
    } else {
        let decimals = (SIGNIFICANT_DIGITS - 1 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    };
    trim_zeros(&s)
}

fn trim_zeros(s: &str) -> String {
    let (mantissa, exponent) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let mantissa = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
    let mantissa = if mantissa == "-0" { "0" } else { mantissa };
    format!("{mantissa}{exponent}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// JSON number rounded like the CSV output, or null.
pub fn json_number(x: f64) -> Value {
    let s = format_number(x);
    if s.is_empty() {
        return Value::Null;
    }
    s.parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
}

pub fn write_slot_csv<W: Write>(mut w: W, reports: &[SlotReport]) -> io::Result<()> {
    writeln!(w, "{SLOT_CSV_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.slot_index,
            r.scheme,
            format_number(r.est_time_ms),
            format_number(r.est_energy),
            opt(r.real_time_ms),
            opt(r.real_energy),
            opt(r.avg_accuracy),
            format_number(r.sched_time_ms),
            r.feasible
        )?;
    }
    Ok(())
}

pub fn summary_entry(s: &SchemeSummary) -> Value {
    json!({
        "average_accuracy": json_number(s.average_accuracy),
        "average_power": json_number(s.average_power),
        "average_inference_time_ms": json_number(s.average_inference_time_ms),
        "average_scheduling_time_ms": json_number(s.average_scheduling_time_ms),
        "total_time_ms": json_number(s.total_time_ms),
        "median_scheduling_time_ms": json_number(s.median_scheduling_time_ms),
        "scheduling_time_variance": json_number(s.scheduling_time_variance),
        "slots": s.slots,
        "infeasible_slots": s.infeasible_slots,
        "over_budget_slots": s.over_budget_slots,
        "realized_accuracy": s.realized_accuracy.map_or(Value::Null, json_number),
    })
}

/// `{"metadata": ..., "schemes": {name: {...}}}`.
pub fn summary_json(metadata: Value, summaries: &[SchemeSummary]) -> Value {
    let schemes: Map<String, Value> =
        summaries.iter().map(|s| (s.scheme.name().to_string(), summary_entry(s))).collect();
    json!({ "metadata": metadata, "schemes": schemes })
}

pub fn write_sweep_csv<W: Write>(mut w: W, points: &[SweepPoint], catalog: &Catalog) -> io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for p in points {
        for (model, &count) in catalog.iter().zip(&p.counts) {
            writeln!(w, "{},{},{}", format_number(p.value), model.id, count)?;
        }
    }
    Ok(())
}

pub fn write_accuracy_diff_csv<W: Write>(mut w: W, series: &[(Scheme, Vec<Option<f64>>)]) -> io::Result<()> {
    writeln!(w, "{ACCURACY_DIFF_CSV_HEADER}")?;
    for (scheme, values) in series {
        for (slot, v) in values.iter().enumerate() {
            writeln!(w, "{slot},{scheme},{}", opt(*v))?;
        }
    }
    Ok(())
}
