//! Job streams: lognormal synthetic sizes or explicit sizes read from a file.

use std::path::{Path, PathBuf};

use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::JobSpec;
use crate::rng::SubtractiveRng;

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("cannot read sizes file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("sizes file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid workload: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SizeDistribution {
    /// Sizes in megabytes with the given median and log-space standard deviation.
    Lognormal { median_mb: f64, sigma_log: f64 },
    /// One decimal megabyte value per line; blank lines and `#` comments are skipped.
    File(PathBuf),
}

/// Calibrated against the reference catalog: slot energy and accuracy under the default
/// budgets land near the published averages. Single JPEG files are far smaller; with
/// sizes that small the server model would win every job.
pub const DEFAULT_MEDIAN_MB: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadSpec {
    /// Ignored in file mode, where every listed size becomes a job.
    pub job_count: usize,
    pub jobs_per_slot: usize,
    pub size_distribution: SizeDistribution,
    pub seed: u64,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            job_count: 3923,
            jobs_per_slot: 10,
            size_distribution: SizeDistribution::Lognormal { median_mb: DEFAULT_MEDIAN_MB, sigma_log: 0.6 },
            seed: 0,
        }
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<(), WorkloadError> {
        if self.jobs_per_slot == 0 {
            return Err(WorkloadError::Invalid("jobs_per_slot must be >= 1".into()));
        }
        if let SizeDistribution::Lognormal { median_mb, sigma_log } = self.size_distribution {
            if self.job_count < self.jobs_per_slot {
                return Err(WorkloadError::Invalid("job_count must be >= jobs_per_slot".into()));
            }
            if !(median_mb.is_finite() && median_mb > 0.0) {
                return Err(WorkloadError::Invalid("median_mb must be finite and positive".into()));
            }
            if !(sigma_log.is_finite() && sigma_log >= 0.0) {
                return Err(WorkloadError::Invalid("sigma_log must be finite and >= 0".into()));
            }
        }
        Ok(())
    }
}

/// Parses one size per line. Line numbers in errors are one-based.
pub fn parse_sizes(text: &str) -> Result<Vec<f64>, WorkloadError> {
    let mut sizes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line
            .parse()
            .map_err(|_| WorkloadError::Parse { line: i + 1, reason: format!("not a number: {line:?}") })?;
        if !(value.is_finite() && value > 0.0) {
            return Err(WorkloadError::Parse { line: i + 1, reason: format!("size must be positive, got {value}") });
        }
        sizes.push(value);
    }
    Ok(sizes)
}

pub fn read_sizes_file(path: &Path) -> Result<Vec<f64>, WorkloadError> {
    let text = std::fs::read_to_string(path).map_err(|source| WorkloadError::Io { path: path.to_owned(), source })?;
    let sizes = parse_sizes(&text)?;
    if sizes.is_empty() {
        return Err(WorkloadError::Invalid(format!("{} lists no sizes", path.display())));
    }
    Ok(sizes)
}

/// Samples `count` lognormal sizes.
pub fn sample_sizes(median_mb: f64, sigma_log: f64, count: usize, seed: u64) -> Vec<f64> {
    let dist = LogNormal::new(median_mb.ln(), sigma_log).expect("validated lognormal parameters");
    let mut rng = SubtractiveRng::new(seed);
    (0..count).map(|_| dist.sample(&mut rng)).collect()
}

/// Jobs numbered from 1 in stream order.
pub fn generate_workload(spec: &WorkloadSpec) -> Result<Vec<JobSpec>, WorkloadError> {
    spec.validate()?;
    let sizes = match &spec.size_distribution {
        SizeDistribution::Lognormal { median_mb, sigma_log } => {
            sample_sizes(*median_mb, *sigma_log, spec.job_count, spec.seed)
        }
        SizeDistribution::File(path) => read_sizes_file(path)?,
    };
    sizes
        .into_iter()
        .enumerate()
        .map(|(i, s)| JobSpec::new(i as u64 + 1, s).map_err(|e| WorkloadError::Invalid(e.to_string())))
        .collect()
}

/// Consecutive jobs scheduled together.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub index: usize,
    pub jobs: Vec<JobSpec>,
    /// Holds fewer than `jobs_per_slot` jobs (the tail of the stream).
    pub partial: bool,
}

pub fn partition_slots(jobs: &[JobSpec], jobs_per_slot: usize) -> Vec<Slot> {
    jobs.chunks(jobs_per_slot.max(1))
        .enumerate()
        .map(|(index, chunk)| Slot { index, jobs: chunk.to_vec(), partial: chunk.len() < jobs_per_slot })
        .collect()
}
