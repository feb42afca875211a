use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cfrepair_core::judge::{CompilerConfig, COMPILER_ENV};
use cfrepair_core::repair::{DEFAULT_BUDGET, DEFAULT_COMBINATION_CAP, MAX_ARITY, MAX_ASSIGNMENTS};
use cfrepair_core::ted::CostModel;
use serde::{Deserialize, Serialize};

/// Environment variable naming a config file.
pub const CONFIG_ENV: &str = "CLEF_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub compiler: CompilerConfig,
    pub cf_weight: f64,
    pub budget: usize,
    pub alignment_cap: usize,
    pub max_arity: usize,
    pub combination_cap: usize,
    pub seed: u64,
    pub ratio: f64,
    pub parallelism: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            compiler: CompilerConfig::default(),
            cf_weight: CostModel::DEFAULT_CF_WEIGHT,
            budget: DEFAULT_BUDGET,
            alignment_cap: MAX_ASSIGNMENTS,
            max_arity: MAX_ARITY,
            combination_cap: DEFAULT_COMBINATION_CAP,
            seed: 0,
            ratio: 0.8,
            parallelism: 1,
        }
    }
}

impl Config {
    /// Read `path`, or the file named by `CLEF_CONFIG`, or use defaults.
    /// `CLEF_CC` then replaces the compiler command.
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let path: Option<PathBuf> = path.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Config::default(),
        };
        if let Ok(cc) = std::env::var(COMPILER_ENV) {
            if !cc.trim().is_empty() {
                cfg.compiler.command = cc.trim().to_string();
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cf_weight >= 1.0 && self.cf_weight.is_finite()) {
            bail!("cf_weight must be a finite number >= 1, got {}", self.cf_weight);
        }
        if self.budget == 0 {
            bail!("budget must be positive");
        }
        if self.alignment_cap == 0 {
            bail!("alignment_cap must be positive");
        }
        if !(1..=MAX_ARITY).contains(&self.max_arity) {
            bail!("max_arity must lie in 1..={MAX_ARITY}, got {}", self.max_arity);
        }
        if self.combination_cap == 0 {
            bail!("combination_cap must be positive");
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            bail!("ratio must lie strictly between 0 and 1, got {}", self.ratio);
        }
        if self.parallelism == 0 {
            bail!("parallelism must be positive");
        }
        if self.compiler.command.trim().is_empty() {
            bail!("compiler command is empty");
        }
        Ok(())
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel::learning(self.cf_weight).expect("validated weight")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: Config = serde_json::from_str(r#"{"budget": 10, "compiler": {"command": "cc", "flags": [], "libs": []}}"#).unwrap();
        assert_eq!(cfg.budget, 10);
        assert_eq!(cfg.compiler.command, "cc");
        assert_eq!(cfg.ratio, 0.8);
        cfg.validate().unwrap();
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        for bad in [
            Config { cf_weight: 0.5, ..Config::default() },
            Config { max_arity: 4, ..Config::default() },
            Config { ratio: 1.0, ..Config::default() },
            Config { budget: 0, ..Config::default() },
        ] {
            assert!(bad.validate().is_err());
        }
        assert!(serde_json::from_str::<Config>(r#"{"budgett": 1}"#).is_err());
    }
}
