//! Experiment specifications and their TOML config-file form.
//!
//! ```toml
//! trials = 20
//!
//! [process]
//! n = 100
//! m = 1000000
//! d = 2
//! policy = "unfair"
//! seed = 42
//!
//! [outputs]
//! dir = "out"
//! artifacts = ["aggregate", "figure"]
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{Policy, ProcessConfig};
use crate::verify::VerifySettings;

/// How per-trial tie-label seeds are obtained. Only derivation from the
/// master seed is supported; it is recorded so output headers are explicit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieSeedPolicy {
    #[default]
    DerivedFromMaster,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    /// Every trial's ranked profile.
    Profiles,
    /// Per-rank statistics against the prediction.
    Aggregate,
    /// Per-rank means ordered most- to least-loaded, with the prediction.
    Figure,
    /// Prediction curve beside the power-law form.
    Prediction,
    /// Load gap of one bin pair over trial 0.
    GapSeries,
}

impl Artifact {
    pub const ALL: [Artifact; 5] = [
        Artifact::Profiles,
        Artifact::Aggregate,
        Artifact::Figure,
        Artifact::Prediction,
        Artifact::GapSeries,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Artifact::Profiles => "profiles.csv",
            Artifact::Aggregate => "aggregate.csv",
            Artifact::Figure => "figure.csv",
            Artifact::Prediction => "prediction.csv",
            Artifact::GapSeries => "gap_series.csv",
        }
    }

    pub fn parse(name: &str) -> Result<Artifact> {
        Artifact::ALL
            .into_iter()
            .find(|a| a.file_name().trim_end_matches(".csv") == name.trim().replace('-', "_"))
            .ok_or_else(|| Error::arg(format!("unknown artifact `{name}`")))
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

fn default_artifacts() -> Vec<Artifact> {
    vec![Artifact::Aggregate, Artifact::Figure]
}

fn default_gap_pair() -> [usize; 2] {
    [1, 2]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_artifacts")]
    pub artifacts: Vec<Artifact>,
    /// 1-based labels of the bin pair traced in the gap series.
    #[serde(default = "default_gap_pair")]
    pub gap_pair: [usize; 2],
    /// Gap whose first hitting time is reported; defaults to `n²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_threshold: Option<u64>,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            dir: default_dir(),
            artifacts: default_artifacts(),
            gap_pair: default_gap_pair(),
            gap_threshold: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub trials: u64,
    #[serde(default)]
    pub tie_seed_policy: TieSeedPolicy,
    /// The process template; its seed is the master seed.
    pub process: ProcessConfig,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub verify: VerifySettings,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            trials: 20,
            tie_seed_policy: TieSeedPolicy::DerivedFromMaster,
            process: ProcessConfig {
                n: 100,
                m: 1_000_000,
                d: 2,
                policy: Policy::Unfair,
                seed: 42,
                snapshot_every: None,
            },
            outputs: Outputs::default(),
            verify: VerifySettings::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<String> = self
            .process
            .problems()
            .into_iter()
            .map(|p| format!("process.{p}"))
            .collect();
        if self.trials == 0 {
            problems.push("trials: must be at least 1".to_string());
        }
        let [a, b] = self.outputs.gap_pair;
        if a == b || a == 0 || b == 0 || a > self.process.n || b > self.process.n {
            problems.push(format!(
                "outputs.gap_pair: need two distinct labels in 1..={}",
                self.process.n
            ));
        }
        problems.extend(self.verify.tolerances.problems());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }
}

/// Seeds are full `u64`; TOML integers are signed 64-bit. Seeds above
/// `i64::MAX` are written as decimal strings, and both forms are accepted.
pub mod seed_repr {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        struct SeedVisitor;

        impl Visitor<'_> for SeedVisitor {
            type Value = u64;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer seed or its decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<u64, E> {
                u64::try_from(v).map_err(|_| E::custom("seed must be non-negative"))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<u64, E> {
                Ok(v)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<u64, E> {
                v.trim().parse().map_err(E::custom)
            }
        }

        d.deserialize_any(SeedVisitor)
    }
}
