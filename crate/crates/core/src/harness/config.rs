use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::blockmodel::{BlockmodelKind, BlockmodelSpec};
use crate::ergm::DEFAULT_STEPS;
use crate::error::{Error, Result};
use crate::fit::DEFAULT_RESTARTS;
use crate::rl::DEFAULT_ITERATIONS;
use crate::terms::TermSetName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    Rl,
    McmcFixed,
    McmcFree,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Rl, Algorithm::McmcFixed, Algorithm::McmcFree];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rl => "rl",
            Algorithm::McmcFixed => "mcmc_fixed",
            Algorithm::McmcFree => "mcmc_free",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| Error::Unknown {
                what: "algorithm",
                name: s.to_string(),
            })
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlConfig {
    pub iterations: usize,
}

impl Default for RlConfig {
    fn default() -> Self {
        RlConfig {
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcConfig {
    pub steps: usize,
    /// Networks per edge-weight evaluation during calibration.
    pub calibration_batch: usize,
    pub calibration_tolerance: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            steps: DEFAULT_STEPS,
            calibration_batch: 30,
            calibration_tolerance: 0.05,
        }
    }
}

/// Experiment grid and budgets, loadable from TOML.
///
/// ```toml
/// kinds = ["cohesive", "transitivity_nodiag"]
/// term_sets = ["all", "allowed"]
/// algorithms = ["rl"]
/// replicates = 10
/// master_seed = 42
/// output_dir = "out"
///
/// [rl]
/// iterations = 200000
///
/// [cluster_sizes]
/// cohesive = [8, 8, 8]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kinds: Vec<BlockmodelKind>,
    pub term_sets: Vec<TermSetName>,
    pub algorithms: Vec<Algorithm>,
    pub replicates: usize,
    /// Network size used for kinds without explicit cluster sizes.
    pub n: usize,
    pub cluster_sizes: BTreeMap<BlockmodelKind, Vec<usize>>,
    pub restarts: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub rl: RlConfig,
    pub mcmc: McmcConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kinds: BlockmodelKind::ALL.to_vec(),
            term_sets: vec![TermSetName::All],
            algorithms: vec![Algorithm::Rl],
            replicates: 50,
            n: 24,
            cluster_sizes: BTreeMap::new(),
            restarts: DEFAULT_RESTARTS,
            master_seed: 1,
            output_dir: PathBuf::from("out"),
            rl: RlConfig::default(),
            mcmc: McmcConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.replicates == 0 {
            return bad("replicates must be at least 1");
        }
        if self.kinds.is_empty() || self.term_sets.is_empty() || self.algorithms.is_empty() {
            return bad("kinds, term_sets and algorithms must be non-empty");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.rl.iterations == 0 || self.mcmc.steps == 0 || self.mcmc.calibration_batch == 0 {
            return bad("iterations, steps and calibration_batch must be at least 1");
        }
        for &kind in &self.kinds {
            self.spec(kind)?;
        }
        Ok(())
    }

    /// Blockmodel for `kind`: explicit sizes if configured, the default sizes
    /// when they add up to `n`, otherwise `n` split as evenly as possible.
    pub fn spec(&self, kind: BlockmodelKind) -> Result<BlockmodelSpec> {
        if let Some(sizes) = self.cluster_sizes.get(&kind) {
            return BlockmodelSpec::new(kind, sizes.clone());
        }
        let default = kind.default_sizes();
        if default.iter().sum::<usize>() == self.n {
            return BlockmodelSpec::new(kind, default);
        }
        let k = default.len();
        let sizes = (0..k).map(|c| self.n / k + usize::from(c < self.n % k)).collect();
        BlockmodelSpec::new(kind, sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_with_defaults() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            kinds = ["cohesive"]
            algorithms = ["rl", "mcmc_free"]
            replicates = 5
            [rl]
            iterations = 1000
            [cluster_sizes]
            cohesive = [8, 8, 8]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.kinds, vec![BlockmodelKind::Cohesive]);
        assert_eq!(cfg.term_sets, vec![TermSetName::All]);
        assert_eq!(cfg.rl.iterations, 1000);
        assert_eq!(cfg.mcmc.steps, DEFAULT_STEPS);
        assert_eq!(cfg.spec(BlockmodelKind::Cohesive).unwrap().cluster_sizes(), &[8, 8, 8]);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(ExperimentConfig::from_toml_str(r#"algorithms = ["gibbs"]"#).is_err());
        assert!(ExperimentConfig::from_toml_str(r#"term_sets = ["most"]"#).is_err());
        assert!(ExperimentConfig::from_toml_str("replicatez = 3").is_err());
    }

    #[test]
    fn validation() {
        let cfg = ExperimentConfig {
            replicates: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            n: 30,
            ..Default::default()
        };
        assert_eq!(cfg.spec(BlockmodelKind::Cohesive).unwrap().cluster_sizes(), &[10, 10, 10]);
        assert_eq!(cfg.spec(BlockmodelKind::CorePeripherySymmetric).unwrap().n(), 30);
    }
}
