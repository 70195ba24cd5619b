//! The four subcommands. Each returns whether its result was feasible.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use infersched::sim::output::{
    format_number, json_number, summary_json, write_accuracy_diff_csv, write_slot_csv, write_sweep_csv,
};
use infersched::sim::{
    accuracy_difference_series, generate_workload, partition_slots, run_simulation, sweep_constraint, value_grid,
    SimulationSetup, Slot, SweepAxis, SweepSetup,
};
use infersched::{reference_catalog, schedule, Catalog, ChannelModel, ConstraintPair, JobSpec, Scheme, SlotInstance};
use log::{info, warn};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{read_json, RunConfig};

pub const SOLVE_JSON: &str = "solve.json";
pub const SLOTS_CSV: &str = "slots.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const ACCURACY_DIFF_CSV: &str = "accuracy_diff.csv";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SIZES_TXT: &str = "sizes.txt";
pub const CATALOG_JSON: &str = "catalog.json";

/// One slot to schedule; missing parts come from the run config.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub jobs: Vec<JobSpec>,
    pub catalog: Option<Catalog>,
    pub channel: Option<ChannelModel>,
    pub constraints: Option<ConstraintPair>,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_json<T: serde::Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn workload_slots(config: &RunConfig) -> Result<Vec<Slot>> {
    let jobs = generate_workload(&config.workload)?;
    Ok(partition_slots(&jobs, config.workload.jobs_per_slot))
}

fn first_slots(config: &RunConfig, count: usize) -> Result<Vec<Slot>> {
    let mut slots = workload_slots(config)?;
    if slots.len() < count {
        warn!("workload holds {} slots, fewer than the {count} requested", slots.len());
    }
    slots.truncate(count);
    Ok(slots)
}

pub fn solve(config: &RunConfig, scheme: Scheme, instance_path: Option<&Path>) -> Result<bool> {
    let (jobs, catalog, channel, constraints) = match instance_path {
        Some(p) => {
            let file: InstanceFile = read_json(p)?;
            (
                file.jobs,
                match file.catalog {
                    Some(c) => c,
                    None => config.catalog()?,
                },
                match file.channel {
                    Some(c) => c,
                    None => config.channel_model()?,
                },
                file.constraints.unwrap_or(config.constraints),
            )
        }
        None => {
            let slot = first_slots(config, 1)?.into_iter().next().context("workload is empty")?;
            (slot.jobs, config.catalog()?, config.channel_model()?, config.constraints)
        }
    };
    let instance = SlotInstance::with_jobs(jobs, catalog, channel, constraints)?;
    let result = schedule(scheme, &instance, &config.params, config.seed)?;

    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "scheme {scheme}  feasible {}  objective {}",
        result.feasible,
        objective_text(result.objective, result.feasible)
    )?;
    writeln!(out, "{:>6} {:>10} {:>6}  {:<14} {:>12} {:>10}", "job", "size_mb", "model", "name", "time_ms", "energy")?;
    for (j, &g) in result.assignment.genes().iter().enumerate() {
        let job = &instance.jobs()[j];
        let model = &instance.catalog().models()[g];
        let (t, e) = instance.cost(j, g);
        writeln!(
            out,
            "{:>6} {:>10} {:>6}  {:<14} {:>12} {:>10}",
            job.id,
            format_number(job.size_mb),
            model.id,
            model.name.as_deref().unwrap_or("-"),
            format_number(t),
            format_number(e)
        )?;
    }
    writeln!(
        out,
        "total time {} ms, energy {}, scheduled in {} ms",
        format_number(result.est_time_ms),
        format_number(result.est_energy),
        format_number(result.scheduling_time_ms())
    )?;

    ensure_dir(&config.out_dir)?;
    let body = json!({
        "scheme": scheme.name(),
        "genes": result.assignment.model_ids(),
        "objective": if result.feasible { json_number(result.objective) } else { Value::Null },
        "est_time_ms": json_number(result.est_time_ms),
        "est_energy": json_number(result.est_energy),
        "sched_time_ms": json_number(result.scheduling_time_ms()),
        "feasible": result.feasible,
    });
    write_json(&config.out_dir, SOLVE_JSON, &body)?;
    Ok(result.feasible)
}

fn objective_text(objective: f64, feasible: bool) -> String {
    if feasible {
        format_number(objective)
    } else {
        "none".into()
    }
}

fn metadata(config: &RunConfig, catalog: &Catalog, channel: &ChannelModel, slots: usize) -> Value {
    json!({
        "description": config.description,
        "seed": config.seed,
        "slots": slots,
        "constraints": config.constraints,
        "channel": channel,
        "catalog": catalog,
        "workload": config.workload,
        "noise": config.noise,
        "params": config.params,
    })
}

pub fn simulate(config: &RunConfig) -> Result<bool> {
    let catalog = config.catalog()?;
    let channel = config.channel_model()?;
    let slots = first_slots(config, config.slots)?;
    let mut setup = SimulationSetup::new(catalog.clone(), config.schemes.clone());
    setup.channel = channel;
    setup.constraints = config.constraints;
    setup.params = config.params.clone();
    setup.noise = config.noise;
    setup.seed = config.seed;
    setup.threads = config.threads;
    info!("simulating {} slots with {}", slots.len(), names(&config.schemes));
    let run = run_simulation(&slots, &setup)?;

    ensure_dir(&config.out_dir)?;
    let mut w = create(&config.out_dir, SLOTS_CSV)?;
    write_slot_csv(&mut w, &run.reports)?;
    w.flush()?;
    write_json(
        &config.out_dir,
        SUMMARY_JSON,
        &summary_json(metadata(config, &catalog, &channel, slots.len()), &run.summaries),
    )?;
    let baseline = if config.schemes.contains(&Scheme::Lgsto) { Scheme::Lgsto } else { config.schemes[0] };
    let mut w = create(&config.out_dir, ACCURACY_DIFF_CSV)?;
    write_accuracy_diff_csv(&mut w, &accuracy_difference_series(&run.reports, baseline))?;
    w.flush()?;

    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "{:<7} {:>9} {:>8} {:>10} {:>10} {:>10}",
        "scheme", "accuracy", "power", "infer_ms", "sched_ms", "infeasible"
    )?;
    for s in &run.summaries {
        writeln!(
            out,
            "{:<7} {:>9.3} {:>8.3} {:>10.2} {:>10.3} {:>10}",
            s.scheme.name(),
            s.average_accuracy,
            s.average_power,
            s.average_inference_time_ms,
            s.average_scheduling_time_ms,
            s.infeasible_slots
        )?;
    }
    writeln!(out, "wrote {}", config.out_dir.display())?;
    Ok(true)
}

fn names(schemes: &[Scheme]) -> String {
    schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")
}

pub struct SweepRequest {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub fixed: f64,
    pub scheme: Scheme,
}

pub fn sweep(config: &RunConfig, req: &SweepRequest) -> Result<bool> {
    let values = match value_grid(req.from, req.to, req.step) {
        Ok(v) => v,
        Err(e) => bail!("bad range: {e}"),
    };
    let catalog = config.catalog()?;
    let setup = SweepSetup {
        catalog: catalog.clone(),
        channel: config.channel_model()?,
        axis: req.axis,
        fixed: req.fixed,
        scheme: req.scheme,
        params: config.params.clone(),
        seed: config.seed,
    };
    let slots = first_slots(config, config.slots)?;
    info!("sweeping {} over {} values on {} slots", req.axis, values.len(), slots.len());
    let points = sweep_constraint(&slots, &values, &setup)?;
    ensure_dir(&config.out_dir)?;
    let mut w = create(&config.out_dir, SWEEP_CSV)?;
    write_sweep_csv(&mut w, &points, &catalog)?;
    w.flush()?;

    let mut out = std::io::stdout().lock();
    let ids: Vec<String> = catalog.iter().map(|m| format!("m{}", m.id)).collect();
    writeln!(
        out,
        "{:>10} {} {:>10}",
        req.axis,
        ids.iter().map(|s| format!("{s:>6}")).collect::<String>(),
        "infeasible"
    )?;
    for p in &points {
        let counts: String = p.counts.iter().map(|c| format!("{c:>6}")).collect();
        writeln!(out, "{:>10} {counts} {:>10}", format_number(p.value), p.infeasible_slots)?;
    }
    Ok(true)
}

pub fn gen(config: &RunConfig, count: Option<usize>) -> Result<bool> {
    let mut spec = config.workload.clone();
    if let Some(n) = count {
        spec.job_count = n;
    }
    let jobs = generate_workload(&spec)?;
    ensure_dir(&config.out_dir)?;
    let mut w = create(&config.out_dir, SIZES_TXT)?;
    for job in &jobs {
        writeln!(w, "{}", format_number(job.size_mb))?;
    }
    w.flush()?;
    let catalog = reference_catalog(config.device_power_w);
    write_json(&config.out_dir, CATALOG_JSON, &catalog)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "wrote {} sizes and a {}-model catalog to {}", jobs.len(), catalog.len(), config.out_dir.display())?;
    Ok(true)
}
