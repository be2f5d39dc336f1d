//! JSON run configuration.

use std::fs;
use std::path::Path;

use idsig::experiments::{Param, SweepAxis, SweepSpec};
use idsig::{IdentityProfile, Population};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct PopulationConfig {
    pub lambda_a_A: f64,
    pub lambda_s_A: f64,
    pub delta_I_A: f64,
    pub delta_O_A: f64,
    pub lambda_a_B: f64,
    pub lambda_s_B: f64,
    pub delta_I_B: f64,
    pub delta_O_B: f64,
}

impl PopulationConfig {
    pub fn to_population(&self) -> idsig::Result<Population> {
        Ok(Population::new(
            IdentityProfile::new(self.lambda_a_A, self.lambda_s_A, self.delta_I_A, self.delta_O_A)?,
            IdentityProfile::new(self.lambda_a_B, self.lambda_s_B, self.delta_I_B, self.delta_O_B)?,
        ))
    }
}

impl From<&Population> for PopulationConfig {
    fn from(p: &Population) -> Self {
        let (a, b) = (&p.profile_a, &p.profile_b);
        Self {
            lambda_a_A: a.accuracy_weight(),
            lambda_s_A: a.identity_weight(),
            delta_I_A: a.in_group_penalty(),
            delta_O_A: a.out_group_penalty(),
            lambda_a_B: b.accuracy_weight(),
            lambda_s_B: b.identity_weight(),
            delta_I_B: b.in_group_penalty(),
            delta_O_B: b.out_group_penalty(),
        }
    }
}

fn default_max() -> f64 {
    1e4
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub delta: f64,
    #[serde(rename = "M", default = "default_max")]
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<SweepAxisConfig>,
    #[serde(default)]
    pub simplex_constrained: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxisConfig {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub population: PopulationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
}

/// A parsed config whose population passed the profile checks.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub raw: RunConfig,
    pub population: Population,
}

impl LoadedConfig {
    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let sweep = self.raw.sweep.as_ref().ok_or_else(|| CliError::Usage("config has no sweep block".into()))?;
        if let Some(axis) = sweep.axes.iter().find(|a| a.resolution < 2) {
            return Err(CliError::Usage(format!(
                "sweep axis {} needs resolution >= 2, got {}",
                axis.param, axis.resolution
            )));
        }
        let spec = SweepSpec {
            base: self.population,
            axes: sweep.axes.iter().map(|a| SweepAxis::new(a.param, a.lo, a.hi, a.resolution)).collect(),
            simplex_constrained: sweep.simplex_constrained,
        };
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, CliError> {
    let raw: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
    let population = raw.population.to_population().map_err(CliError::from)?;
    Ok(LoadedConfig { raw, population })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}
