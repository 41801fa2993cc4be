//! Campaign configuration (TOML).

use crate::error::{FadeError, Result};
use crate::faults::{enumerate_cofaults, fault_catalog};
use crate::fuzzer::{FaultTarget, FuzzConfig};
use crate::scenario::{generate_scenarios, obstacle_ahead, GenConfig, Scenario};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CONFIG_VERSION: u32 = 1;
pub const SEED_ENV: &str = "FADE_SEED";

/// Where the scenarios of a campaign come from. Exactly one source is set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSource {
    /// Number of scenarios to sample.
    pub generate: Option<usize>,
    /// Generator seed; defaults to the campaign seed.
    pub generate_seed: Option<u64>,
    pub generator: GenConfig,
    /// Directory of scenario JSON files.
    pub dir: Option<PathBuf>,
    /// Variants of the built-in obstacle-ahead scenario.
    pub obstacle_ahead: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaultSelection {
    pub ids: Vec<String>,
    /// Every single-sensor model in the catalog.
    pub all: bool,
    /// Every valid camera+LiDAR pair.
    pub cofaults: bool,
}

impl FaultSelection {
    /// Selected targets in catalog order, then co-faults, then explicit ids.
    pub fn targets(&self) -> Result<Vec<FaultTarget>> {
        let mut out: Vec<FaultTarget> = Vec::new();
        let mut push = |t: FaultTarget| {
            if !out.contains(&t) {
                out.push(t);
            }
        };
        if self.all {
            for m in fault_catalog() {
                push(FaultTarget::single(&m.id)?);
            }
        }
        if self.cofaults {
            for c in enumerate_cofaults(fault_catalog()) {
                push(FaultTarget::co(&c));
            }
        }
        for id in &self.ids {
            push(FaultTarget::parse(id)?);
        }
        if out.is_empty() {
            return Err(FadeError::Config("no faults selected".into()));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "config_version")]
    pub schema_version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub parallelism: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub scenarios: ScenarioSource,
    pub faults: FaultSelection,
    /// Search settings, including `mode` and the `[fuzz.spec]` thresholds.
    #[serde(default)]
    pub fuzz: FuzzConfig,
}

fn config_version() -> u32 {
    CONFIG_VERSION
}

fn default_name() -> String {
    "campaign".into()
}

fn one() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// TOML integers are signed 64-bit.
pub const MAX_SEED: u64 = i64::MAX as u64;

fn check_seed(seed: u64) -> Result<()> {
    if seed > MAX_SEED {
        return Err(FadeError::Config(format!("seed {seed} exceeds {MAX_SEED}")));
    }
    Ok(())
}

impl CampaignConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| FadeError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| FadeError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| FadeError::io(path, e))?;
        Self::from_toml(&s).map_err(|e| match e {
            FadeError::Config(m) => FadeError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Applies `FADE_SEED` when set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| FadeError::Config(format!("{SEED_ENV} must be an unsigned integer, got `{v}`")))?;
        }
        check_seed(self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        check_seed(self.seed)?;
        if self.schema_version != CONFIG_VERSION {
            return Err(FadeError::Config(format!("unsupported schema_version {}", self.schema_version)));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name == "." || self.name == ".." {
            return Err(FadeError::Config(format!("campaign name `{}` is not a valid directory name", self.name)));
        }
        if self.parallelism == 0 {
            return Err(FadeError::Config("parallelism must be positive".into()));
        }
        let s = &self.scenarios;
        let sources = [s.generate.is_some(), s.dir.is_some(), s.obstacle_ahead.is_some()];
        if sources.iter().filter(|&&b| b).count() != 1 {
            return Err(FadeError::Config("[scenarios] needs exactly one of generate, dir, obstacle_ahead".into()));
        }
        if s.generate == Some(0) || s.obstacle_ahead == Some(0) {
            return Err(FadeError::Config("scenario count must be positive".into()));
        }
        self.fuzz.validate()?;
        self.faults.targets().map(|_| ())
    }

    /// Resolves the scenario source. Directory sources are read from disk.
    pub fn load_scenarios(&self) -> Result<Vec<Scenario>> {
        let s = &self.scenarios;
        if let Some(n) = s.generate {
            generate_scenarios(n, &s.generator, s.generate_seed.unwrap_or(self.seed))
        } else if let Some(dir) = &s.dir {
            super::io::load_scenarios(dir)
        } else {
            Ok((0..s.obstacle_ahead.unwrap_or(0)).map(obstacle_ahead).collect())
        }
    }
}
