//! Experiment configuration (TOML).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use rpd_core::alns::AlnsParams;
use rpd_core::brkga::BrkgaParams;
use rpd_core::instance::VariantKind;
use rpd_core::pipeline::PipelineParams;
use serde::{Deserialize, Serialize};

/// Solution method of a result row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Best member of the heuristic portfolio.
    Heuristics,
    Alns,
    /// ALNS followed by the warm-started genetic algorithm.
    Pipeline,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Heuristics, Method::Alns, Method::Pipeline];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Heuristics => "heuristics",
            Method::Alns => "alns",
            Method::Pipeline => "pipeline",
        })
    }
}

impl FromStr for Method {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heuristics" => Ok(Method::Heuristics),
            "alns" => Ok(Method::Alns),
            "pipeline" | "alns+brkga" => Ok(Method::Pipeline),
            other => bail!("unknown method {other:?}"),
        }
    }
}

fn default_kinds() -> Vec<String> {
    VariantKind::ALL.iter().map(|k| k.to_string()).collect()
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_replicates() -> u32 {
    10
}

fn default_instance_seed() -> u64 {
    2024
}

/// Experiment grid and solver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// TSPLIB files, or instance JSON files used as they are. Relative paths
    /// resolve against the config file's directory.
    pub instances: Vec<PathBuf>,
    /// Variant kinds: base, 2x, 5x, 1R10, 1R20.
    #[serde(default = "default_kinds")]
    pub kinds: Vec<String>,
    /// Replicates of the stochastic kinds; the others always use one.
    #[serde(default = "default_replicates")]
    pub replicates: u32,
    /// Seed of the processing-time draws.
    #[serde(default = "default_instance_seed")]
    pub instance_seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Solver seeds; every cell runs once per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub alns: AlnsParams,
    #[serde(default)]
    pub brkga: BrkgaParams,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config and resolves relative instance paths against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_toml(&text)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in &mut cfg.instances {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.variant_kinds()?;
        if self.seeds.is_empty() {
            bail!("at least one seed is required");
        }
        if self.replicates == 0 {
            bail!("replicates must be at least 1");
        }
        self.alns.validate()?;
        self.brkga.validate()?;
        Ok(())
    }

    pub fn variant_kinds(&self) -> Result<Vec<VariantKind>> {
        self.kinds
            .iter()
            .map(|k| k.parse::<VariantKind>().map_err(anyhow::Error::from))
            .collect()
    }

    /// Replicate count for a kind.
    pub fn replicates_for(&self, kind: VariantKind) -> u32 {
        if kind.is_stochastic() {
            self.replicates
        } else {
            1
        }
    }

    pub fn pipeline_params(&self) -> PipelineParams {
        PipelineParams {
            alns: self.alns.clone(),
            brkga: self.brkga.clone(),
        }
    }
}

/// Solver parameter file for the `solve` command: optional `[alns]` and
/// `[brkga]` tables.
pub fn load_params(path: Option<&Path>) -> Result<PipelineParams> {
    let Some(path) = path else {
        return Ok(PipelineParams::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let params: PipelineParams = toml::from_str(&text).context("parsing parameter file")?;
    params.alns.validate()?;
    params.brkga.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::from_toml("instances = [\"a.tsp\"]\n").unwrap();
        assert_eq!(cfg.methods, Method::ALL.to_vec());
        assert_eq!(cfg.variant_kinds().unwrap().len(), 5);
        assert_eq!(cfg.replicates_for(VariantKind::Random10), 10);
        assert_eq!(cfg.replicates_for(VariantKind::Quintuple), 1);
        assert_eq!(cfg.alns, AlnsParams::default());
        assert_eq!(cfg.brkga, BrkgaParams::default());
    }

    #[test]
    fn overrides_and_errors() {
        let text = r#"
instances = ["x.tsp"]
kinds = ["base", "5x"]
methods = ["heuristics"]
seeds = [3, 4]
[alns]
max_iter = 10
[brkga]
population = 50
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.alns.max_iter, 10);
        assert_eq!(cfg.alns.t0, AlnsParams::default().t0);
        assert_eq!(cfg.brkga.population, 50);
        assert_eq!(cfg.methods, vec![Method::Heuristics]);
        assert!(ExperimentConfig::from_toml("instances = []\nkinds = [\"7x\"]\n").is_err());
        assert!(ExperimentConfig::from_toml("instances = []\n[brkga]\nelite_bias = 0.2\n").is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
    }
}
