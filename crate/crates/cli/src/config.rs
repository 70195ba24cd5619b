//! Run configuration: a JSON file, overlaid by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use infersched::sim::{ExecutionNoise, SizeDistribution, WorkloadSpec};
use infersched::{
    reference_catalog, Catalog, ChannelModel, ConstraintPair, Scheme, SchemeParams, REFERENCE_DEVICE_POWER_W,
};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SLOTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Free text kept in output metadata (calibration notes and the like).
    pub description: Option<String>,
    /// Catalog JSON; the reference catalog is used when absent.
    pub catalog_path: Option<PathBuf>,
    /// Only used for the reference catalog.
    pub device_power_w: f64,
    pub channel_path: Option<PathBuf>,
    pub channel: Option<ChannelModel>,
    pub constraints: ConstraintPair,
    pub schemes: Vec<Scheme>,
    pub params: SchemeParams,
    pub workload: WorkloadSpec,
    pub noise: ExecutionNoise,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub slots: usize,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            description: None,
            catalog_path: None,
            device_power_w: REFERENCE_DEVICE_POWER_W,
            channel_path: None,
            channel: None,
            constraints: ConstraintPair::default(),
            schemes: Scheme::ALL.to_vec(),
            params: SchemeParams::default(),
            workload: WorkloadSpec::default(),
            noise: ExecutionNoise::default(),
            out_dir: PathBuf::from("out"),
            seed: 0,
            slots: DEFAULT_SLOTS,
            threads: 1,
        }
    }
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config: RunConfig = serde_json::from_str(&text).map_err(|e| {
            anyhow::anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), strip_position(&e.to_string()))
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        config.catalog_path.as_mut().map(resolve);
        config.channel_path.as_mut().map(resolve);
        if let SizeDistribution::File(p) = &mut config.workload.size_distribution {
            resolve(p);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channel.is_some() && self.channel_path.is_some() {
            bail!("give either channel or channel_path, not both");
        }
        for p in self.catalog_path.iter().chain(&self.channel_path) {
            if !p.exists() {
                bail!("referenced file {} does not exist", p.display());
            }
        }
        if let SizeDistribution::File(p) = &self.workload.size_distribution {
            if !p.exists() {
                bail!("sizes file {} does not exist", p.display());
            }
        }
        if !(self.device_power_w.is_finite() && self.device_power_w >= 0.0) {
            bail!("device_power_w must be finite and >= 0");
        }
        if self.schemes.is_empty() {
            bail!("schemes must not be empty");
        }
        if self.slots == 0 {
            bail!("slots must be >= 1");
        }
        if self.threads == 0 {
            bail!("threads must be >= 1");
        }
        self.constraints.validate()?;
        self.params.validate()?;
        self.workload.validate()?;
        self.noise.validate().map_err(anyhow::Error::msg)?;
        Ok(())
    }

    pub fn catalog(&self) -> Result<Catalog> {
        match &self.catalog_path {
            None => Ok(reference_catalog(self.device_power_w)),
            Some(p) => read_json(p),
        }
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        let channel = match (&self.channel, &self.channel_path) {
            (Some(c), _) => *c,
            (None, Some(p)) => read_json(p)?,
            (None, None) => ChannelModel::default(),
        };
        channel.validate()?;
        Ok(channel)
    }
}

/// serde_json appends " at line X column Y"; the prefix already carries it.
fn strip_position(msg: &str) -> &str {
    msg.rfind(" at line ").map_or(msg, |i| &msg[..i])
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow::anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), strip_position(&e.to_string()))
    })
}

/// Comma-separated scheme names.
pub fn parse_scheme_list(s: &str) -> Result<Vec<Scheme>> {
    let schemes = s
        .split(',')
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .map(|n| n.parse::<Scheme>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    if schemes.is_empty() {
        bail!("no scheme given (valid: {})", Scheme::valid_names());
    }
    Ok(schemes)
}
