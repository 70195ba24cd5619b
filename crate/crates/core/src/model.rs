//! Inference model profiles, the offload channel, jobs, and the per-job cost model.
//!
//! A job processed by a local model costs that model's average inference time and its
//! inference energy. A job offloaded to the remote (edge-server) model additionally pays
//! the transfer: `size / bandwidth` of time plus a constant response time, and
//! `size * energy_per_megabyte` of energy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Megabits per megabyte (decimal units on both sides).
const MEGABITS_PER_MEGABYTE: f64 = 8.0;
const MS_PER_SECOND: f64 = 1000.0;

/// Device power that, with the default workload, puts mean per-slot energy near 13.4 units.
pub const REFERENCE_DEVICE_POWER_W: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model {id}: {reason}")]
    InvalidProfile { id: u32, reason: String },
    #[error("catalog: {0}")]
    InvalidCatalog(String),
    #[error("channel: {0}")]
    InvalidChannel(String),
    #[error("job {id}: size must be finite and positive, got {size_mb}")]
    InvalidJob { id: u64, size_mb: f64 },
    #[error("constraints: {0}")]
    InvalidConstraints(String),
    #[error("slot instance: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Locality {
    #[serde(alias = "local")]
    Local,
    #[serde(alias = "remote")]
    Remote,
}

/// Profiled averages standing in for one inference model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelProfile {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Average top-1 accuracy in percent (any non-negative scale works).
    pub avg_accuracy: f64,
    pub avg_inference_time_ms: f64,
    pub inference_energy: f64,
    pub locality: Locality,
}

impl ModelProfile {
    pub fn new(
        id: u32,
        avg_accuracy: f64,
        avg_inference_time_ms: f64,
        inference_energy: f64,
        locality: Locality,
    ) -> Self {
        ModelProfile { id, name: None, avg_accuracy, avg_inference_time_ms, inference_energy, locality }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn is_remote(&self) -> bool {
        self.locality == Locality::Remote
    }

    fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| Err(ModelError::InvalidProfile { id: self.id, reason: reason.into() });
        if !self.avg_accuracy.is_finite() || self.avg_accuracy < 0.0 {
            return bad("avg_accuracy must be finite and non-negative");
        }
        if !self.avg_inference_time_ms.is_finite() || self.avg_inference_time_ms <= 0.0 {
            return bad("avg_inference_time_ms must be finite and positive");
        }
        if !self.inference_energy.is_finite() || self.inference_energy < 0.0 {
            return bad("inference_energy must be finite and non-negative");
        }
        Ok(())
    }
}

/// Ordered list of model profiles. Position `i` holds the model with id `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ModelProfile>", into = "Vec<ModelProfile>")]
pub struct Catalog {
    models: Vec<ModelProfile>,
}

impl Catalog {
    /// Requires at least two profiles, ids `1..=len` in order and at most one remote profile.
    ///
    /// The stronger offloading shape (exactly one remote model that is both more accurate
    /// and faster than every local one) is checked separately by [`Catalog::check_offload_shape`],
    /// so that toy catalogs without an edge server can still be scheduled.
    pub fn new(models: Vec<ModelProfile>) -> Result<Self, ModelError> {
        if models.len() < 2 {
            return Err(ModelError::InvalidCatalog(format!("need at least 2 models, got {}", models.len())));
        }
        for (pos, m) in models.iter().enumerate() {
            m.validate()?;
            if m.id as usize != pos + 1 {
                return Err(ModelError::InvalidCatalog(format!(
                    "model ids must be 1..={} in order; position {} has id {}",
                    models.len(),
                    pos + 1,
                    m.id
                )));
            }
        }
        let remotes = models.iter().filter(|m| m.is_remote()).count();
        if remotes > 1 {
            return Err(ModelError::InvalidCatalog(format!("at most one remote model allowed, got {remotes}")));
        }
        Ok(Catalog { models })
    }

    /// Exactly one remote model, strictly more accurate and strictly faster than every local one.
    pub fn check_offload_shape(&self) -> Result<(), ModelError> {
        let remote = self
            .remote_index()
            .map(|i| &self.models[i])
            .ok_or_else(|| ModelError::InvalidCatalog("no remote model".into()))?;
        for local in self.models.iter().filter(|m| !m.is_remote()) {
            if remote.avg_accuracy <= local.avg_accuracy {
                return Err(ModelError::InvalidCatalog(format!(
                    "remote model {} is not more accurate than local model {}",
                    remote.id, local.id
                )));
            }
            if remote.avg_inference_time_ms >= local.avg_inference_time_ms {
                return Err(ModelError::InvalidCatalog(format!(
                    "remote model {} is not faster than local model {}",
                    remote.id, local.id
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[ModelProfile] {
        &self.models
    }

    pub fn get(&self, index: usize) -> Option<&ModelProfile> {
        self.models.get(index)
    }

    pub fn remote_index(&self) -> Option<usize> {
        self.models.iter().position(|m| m.is_remote())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ModelProfile> {
        self.models.iter()
    }
}

impl std::ops::Index<usize> for Catalog {
    type Output = ModelProfile;

    fn index(&self, index: usize) -> &ModelProfile {
        &self.models[index]
    }
}

impl TryFrom<Vec<ModelProfile>> for Catalog {
    type Error = ModelError;

    fn try_from(models: Vec<ModelProfile>) -> Result<Self, Self::Error> {
        Catalog::new(models)
    }
}

impl From<Catalog> for Vec<ModelProfile> {
    fn from(c: Catalog) -> Self {
        c.models
    }
}

/// Profiled averages measured on a Raspberry Pi 4 edge node (local models) and a GPU
/// edge server (resnext101), used as the default catalog.
///
/// Local inference energy is `inference_time_ms * device_power_w / 1000`; the remote
/// model's own inference energy is zero since the server is not battery powered.
pub fn reference_catalog(device_power_w: f64) -> Catalog {
    let local = |id, name, acc, time_ms: f64| {
        ModelProfile::new(id, acc, time_ms, time_ms * device_power_w / MS_PER_SECOND, Locality::Local).named(name)
    };
    Catalog::new(vec![
        local(1, "resnet18", 72.01986328, 28.07417981),
        local(2, "resnet34", 76.79044298, 42.45949233),
        local(3, "shufflenetv2", 66.15977267, 19.44331129),
        ModelProfile::new(4, 87.05788745, 5.1610317, 0.0, Locality::Remote).named("resnext101"),
    ])
    .expect("reference catalog is well formed")
}

/// Link between the edge node and the edge server.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelModel {
    pub bandwidth_mbps: f64,
    pub energy_per_megabyte: f64,
    pub response_time_ms: f64,
}

impl Default for ChannelModel {
    /// 100 Mbps Ethernet at 1.8 energy units per megabyte, 5 ms response time.
    fn default() -> Self {
        ChannelModel { bandwidth_mbps: 100.0, energy_per_megabyte: 1.8, response_time_ms: 5.0 }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.bandwidth_mbps.is_finite() || self.bandwidth_mbps <= 0.0 {
            return Err(ModelError::InvalidChannel("bandwidth_mbps must be finite and positive".into()));
        }
        if !self.energy_per_megabyte.is_finite() || self.energy_per_megabyte < 0.0 {
            return Err(ModelError::InvalidChannel("energy_per_megabyte must be finite and non-negative".into()));
        }
        if !self.response_time_ms.is_finite() || self.response_time_ms < 0.0 {
            return Err(ModelError::InvalidChannel("response_time_ms must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub id: u64,
    pub size_mb: f64,
}

impl JobSpec {
    pub fn new(id: u64, size_mb: f64) -> Result<Self, ModelError> {
        let job = JobSpec { id, size_mb };
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.size_mb.is_finite() || self.size_mb <= 0.0 {
            return Err(ModelError::InvalidJob { id: self.id, size_mb: self.size_mb });
        }
        Ok(())
    }
}

/// Slot-level budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintPair {
    pub time_budget_ms: f64,
    /// Watts-equivalent energy units.
    pub energy_budget: f64,
}

impl Default for ConstraintPair {
    fn default() -> Self {
        ConstraintPair { time_budget_ms: 350.0, energy_budget: 100.0 }
    }
}

impl ConstraintPair {
    pub fn new(time_budget_ms: f64, energy_budget: f64) -> Result<Self, ModelError> {
        let c = ConstraintPair { time_budget_ms, energy_budget };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.time_budget_ms.is_finite() || self.time_budget_ms <= 0.0 {
            return Err(ModelError::InvalidConstraints("time_budget_ms must be finite and positive".into()));
        }
        if !self.energy_budget.is_finite() || self.energy_budget <= 0.0 {
            return Err(ModelError::InvalidConstraints("energy_budget must be finite and positive".into()));
        }
        Ok(())
    }
}

/// Transfer time of a job over the channel, in milliseconds.
pub fn offload_time(job: &JobSpec, channel: &ChannelModel) -> f64 {
    job.size_mb * MEGABITS_PER_MEGABYTE * MS_PER_SECOND / channel.bandwidth_mbps
}

pub fn offload_energy(job: &JobSpec, channel: &ChannelModel) -> f64 {
    job.size_mb * channel.energy_per_megabyte
}

pub fn job_time(job: &JobSpec, model: &ModelProfile, channel: &ChannelModel) -> f64 {
    match model.locality {
        Locality::Local => model.avg_inference_time_ms,
        Locality::Remote => model.avg_inference_time_ms + offload_time(job, channel) + channel.response_time_ms,
    }
}

pub fn job_energy(job: &JobSpec, model: &ModelProfile, channel: &ChannelModel) -> f64 {
    match model.locality {
        Locality::Local => model.inference_energy,
        Locality::Remote => model.inference_energy + offload_energy(job, channel),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(size: f64) -> JobSpec {
        JobSpec::new(1, size).unwrap()
    }

    fn channel(bw: f64, c: f64) -> ChannelModel {
        ChannelModel { bandwidth_mbps: bw, energy_per_megabyte: c, response_time_ms: 5.0 }
    }

    #[test]
    fn offload_time_examples() {
        assert_eq!(offload_time(&job(1.0), &channel(100.0, 1.8)), 80.0);
        assert_eq!(offload_time(&job(0.5), &channel(100.0, 1.8)), 40.0);
        assert_eq!(offload_time(&job(1.0), &channel(200.0, 1.8)), 40.0);
    }

    #[test]
    fn offload_energy_examples() {
        assert!((offload_energy(&job(1.0), &channel(100.0, 1.8)) - 1.8).abs() < 1e-12);
        assert!((offload_energy(&job(0.5), &channel(100.0, 1.8)) - 0.9).abs() < 1e-12);
        assert_eq!(offload_energy(&job(2.0), &channel(100.0, 0.0)), 0.0);
    }

    #[test]
    fn job_time_uses_table_values() {
        let cat = reference_catalog(0.0);
        let ch = ChannelModel::default();
        let j = job(1.0);
        assert_eq!(job_time(&j, &cat[0], &ch), 28.07417981);
        assert_eq!(job_time(&j, &cat[2], &ch), 19.44331129);
        assert!((job_time(&j, &cat[3], &ch) - 90.1610317).abs() < 1e-9);
    }

    #[test]
    fn job_energy_paths() {
        let ch = channel(100.0, 1.8);
        let local = ModelProfile::new(1, 70.0, 20.0, 0.05, Locality::Local);
        assert_eq!(job_energy(&job(3.0), &local, &ch), 0.05);
        let remote = ModelProfile::new(2, 90.0, 5.0, 0.0, Locality::Remote);
        assert!((job_energy(&job(1.0), &remote, &ch) - 1.8).abs() < 1e-12);
        let remote = ModelProfile::new(2, 90.0, 5.0, 0.1, Locality::Remote);
        assert!((job_energy(&job(0.5), &remote, &ch) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn catalog_rejects_bad_shapes() {
        let m = |id, loc| ModelProfile::new(id, 50.0, 10.0, 0.0, loc);
        assert!(Catalog::new(vec![m(1, Locality::Local)]).is_err());
        assert!(Catalog::new(vec![m(1, Locality::Local), m(3, Locality::Local)]).is_err());
        assert!(Catalog::new(vec![m(1, Locality::Remote), m(2, Locality::Remote)]).is_err());
        let mut neg = m(2, Locality::Local);
        neg.avg_inference_time_ms = 0.0;
        assert!(Catalog::new(vec![m(1, Locality::Local), neg]).is_err());
        // A catalog without a remote model is allowed but does not have the offload shape.
        let toy = Catalog::new(vec![m(1, Locality::Local), m(2, Locality::Local)]).unwrap();
        assert!(toy.check_offload_shape().is_err());
    }

    #[test]
    fn reference_catalog_has_offload_shape() {
        let cat = reference_catalog(40.0);
        cat.check_offload_shape().unwrap();
        assert_eq!(cat.remote_index(), Some(3));
        assert_eq!(cat[3].name.as_deref(), Some("resnext101"));
        assert_eq!(cat[3].avg_accuracy, 87.05788745);
    }

    #[test]
    fn offload_shape_violations_are_reported() {
        let mut models = reference_catalog(0.0).models().to_vec();
        models[3].avg_accuracy = 70.0;
        let err = Catalog::new(models).unwrap().check_offload_shape().unwrap_err();
        assert!(err.to_string().contains("not more accurate"));
    }

    #[test]
    fn catalog_json_rejects_unknown_fields() {
        let text = r#"[{"id":1,"avg_accuracy":1,"avg_inference_time_ms":1,"inference_energy":0,"locality":"Local","extra":3},
                       {"id":2,"avg_accuracy":1,"avg_inference_time_ms":1,"inference_energy":0,"locality":"Remote"}]"#;
        let err = serde_json::from_str::<Catalog>(text).unwrap_err();
        assert!(err.to_string().contains("extra"));
    }

    #[test]
    fn channel_json_field_names() {
        let ch: ChannelModel =
            serde_json::from_str(r#"{"bandwidth_mbps":100,"energy_per_megabyte":1.8,"response_time_ms":5}"#).unwrap();
        assert_eq!(ch, ChannelModel::default());
        assert!(serde_json::from_str::<ChannelModel>(r#"{"bandwidth_mbps":100,"energy_per_megabyte":1.8}"#).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(JobSpec::new(1, 0.0).is_err());
        assert!(JobSpec::new(1, f64::NAN).is_err());
        assert!(ConstraintPair::new(0.0, 1.0).is_err());
        assert!(ConstraintPair::new(1.0, f64::INFINITY).is_err());
        assert!(channel(0.0, 1.0).validate().is_err());
    }
}
