//! Experiment configuration: JSON schema, validation, and the policy
//! registry that maps config entries to boxed policies.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use slowvary_core::baselines::{ExpS, FixedArm, Oracle, Rexp3, RoundRobin, SwUcbSharp};
use slowvary_core::instance::{Arm, BanditInstance, GeneratorSpec};
use slowvary_core::simulator::Policy;
use slowvary_core::snoozeit::{SnoozeIt, Variant};

use crate::files::InstanceDoc;

/// Where the experiment's instance comes from: an inline generator spec
/// (an object with a `family` key) or an instance file (`{"file": path}`).
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    Inline(GeneratorSpec),
    File(PathBuf),
}

impl Serialize for InstanceSource {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            InstanceSource::Inline(spec) => spec.serialize(serializer),
            InstanceSource::File(path) => {
                #[derive(Serialize)]
                struct FileRef<'a> {
                    file: &'a Path,
                }
                FileRef { file: path }.serialize(serializer)
            }
        }
    }
}

impl<'de> Deserialize<'de> for InstanceSource {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        if value.get("file").is_some() {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct FileRef {
                file: PathBuf,
            }
            let file_ref: FileRef = serde_json::from_value(value).map_err(D::Error::custom)?;
            Ok(InstanceSource::File(file_ref.file))
        } else {
            serde_json::from_value(value)
                .map(InstanceSource::Inline)
                .map_err(|e| D::Error::custom(format!("instance: {e}")))
        }
    }
}

/// One entry of the policy list. The `name` tag selects from the registry;
/// the remaining keys are that policy's parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Snoozeit,
    SnoozeitM,
    Rexp3,
    Exps,
    SwucbSharp {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    Oracle,
    Fixed {
        arm: u8,
    },
    RoundRobin,
}

impl PolicySpec {
    /// Canonical registry name, used for output file names.
    pub fn key(&self) -> &'static str {
        match self {
            PolicySpec::Snoozeit => "snoozeit",
            PolicySpec::SnoozeitM => "snoozeit_m",
            PolicySpec::Rexp3 => "rexp3",
            PolicySpec::Exps => "exps",
            PolicySpec::SwucbSharp { .. } => "swucb_sharp",
            PolicySpec::Oracle => "oracle",
            PolicySpec::Fixed { .. } => "fixed",
            PolicySpec::RoundRobin => "round_robin",
        }
    }

    /// Whether this policy produces an episode log worth exporting.
    pub fn has_episodes(&self) -> bool {
        matches!(self, PolicySpec::Snoozeit | PolicySpec::SnoozeitM)
    }

    /// Builds a fresh policy for one run on `instance`.
    pub fn build(&self, instance: &BanditInstance) -> Result<Box<dyn Policy + Send>> {
        let horizon = instance.horizon();
        let delta = instance.drift_limit();
        Ok(match self {
            PolicySpec::Snoozeit => Box::new(SnoozeIt::new(horizon, delta, Variant::Classic)?),
            PolicySpec::SnoozeitM => Box::new(SnoozeIt::new(horizon, delta, Variant::Modified)?),
            PolicySpec::Rexp3 => Box::new(Rexp3::new(horizon, delta)?),
            PolicySpec::Exps => Box::new(ExpS::new(horizon, delta)?),
            PolicySpec::SwucbSharp { alpha, lambda } => Box::new(SwUcbSharp::new(
                alpha.unwrap_or(SwUcbSharp::DEFAULT_ALPHA),
                lambda.unwrap_or(SwUcbSharp::DEFAULT_LAMBDA),
            )?),
            PolicySpec::Oracle => Box::new(Oracle::new(instance)),
            PolicySpec::Fixed { arm } => {
                Box::new(FixedArm(Arm::from_id(*arm).with_context(|| {
                    format!("fixed policy arm must be 1 or 2, got {arm}")
                })?))
            }
            PolicySpec::RoundRobin => Box::new(RoundRobin),
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub policies: Vec<PolicySpec>,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(default = "default_n_runs")]
    pub n_runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_decimation")]
    pub decimation: usize,
    #[serde(default)]
    pub bound_overlays: bool,
}

fn default_n_runs() -> usize {
    10
}

fn default_decimation() -> usize {
    1
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig =
            serde_json::from_str(text).context("invalid experiment config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        ExperimentConfig::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            bail!("T must be >= 1");
        }
        if self.n_runs == 0 {
            bail!("n_runs must be >= 1");
        }
        if self.decimation == 0 {
            bail!("decimation must be >= 1");
        }
        if self.policies.is_empty() {
            bail!("policies must list at least one policy");
        }
        Ok(())
    }

    /// Materializes the instance; file paths resolve relative to `base_dir`
    /// (normally the config file's directory).
    pub fn load_instance(&self, base_dir: &Path) -> Result<BanditInstance> {
        match &self.instance {
            InstanceSource::Inline(spec) => Ok(spec.generate(self.horizon)?),
            InstanceSource::File(path) => {
                let resolved = if path.is_absolute() {
                    path.clone()
                } else {
                    base_dir.join(path)
                };
                let doc = InstanceDoc::load(&resolved)?;
                if doc.horizon != self.horizon {
                    bail!(
                        "config T = {} but instance file {} has T = {}",
                        self.horizon,
                        resolved.display(),
                        doc.horizon
                    );
                }
                doc.into_instance()
            }
        }
    }
}

/// The same generator with its drift limit replaced, for δ-sweeps.
pub fn with_delta(spec: &GeneratorSpec, delta: f64) -> GeneratorSpec {
    let mut spec = spec.clone();
    match &mut spec {
        GeneratorSpec::Stationary { delta: d, .. }
        | GeneratorSpec::PiecewiseLinear { delta: d, .. }
        | GeneratorSpec::WellSeparated { delta: d, .. }
        | GeneratorSpec::Oscillating { delta: d, .. }
        | GeneratorSpec::MultiDeltaCommonPeriods { delta: d, .. }
        | GeneratorSpec::MultiDeltaEqualCumulative { delta: d, .. } => *d = delta,
        GeneratorSpec::LowerBoundNuPrime { delta: d, .. } => *d = Some(delta),
    }
    spec
}
