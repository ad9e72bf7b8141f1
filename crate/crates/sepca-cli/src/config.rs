//! Declarative experiment configuration.
//!
//! A single TOML file describes a benchmark run; command line flags override
//! individual fields. Unknown keys are rejected so typos fail loudly.

use crate::CliError;
use sepca::{Algorithm, HcRule, SumVariant, USpec, VProfile};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

/// An algorithm under benchmark: one of the six selectors or the plain SVD
/// reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BenchAlgorithm {
    Sepca(Algorithm),
    SvdBaseline,
}

impl BenchAlgorithm {
    pub fn name(self) -> String {
        match self {
            BenchAlgorithm::Sepca(a) => a.name().to_string(),
            BenchAlgorithm::SvdBaseline => "svd-baseline".to_string(),
        }
    }

    pub const ALL: [BenchAlgorithm; 7] = [
        BenchAlgorithm::Sepca(Algorithm::Sum),
        BenchAlgorithm::Sepca(Algorithm::Ell1),
        BenchAlgorithm::Sepca(Algorithm::Ell2),
        BenchAlgorithm::Sepca(Algorithm::HcSum),
        BenchAlgorithm::Sepca(Algorithm::HcEll2),
        BenchAlgorithm::Sepca(Algorithm::Fdr),
        BenchAlgorithm::SvdBaseline,
    ];
}

impl FromStr for BenchAlgorithm {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "svd-baseline" || s == "svd" {
            return Ok(BenchAlgorithm::SvdBaseline);
        }
        Algorithm::from_str(s)
            .map(BenchAlgorithm::Sepca)
            .map_err(|_| {
                CliError::config(format!(
                    "unknown algorithm {s:?} (expected sum, ell1, ell2, hc-sum, hc-ell2, fdr or svd-baseline)"
                ))
            })
    }
}

impl TryFrom<String> for BenchAlgorithm {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        BenchAlgorithm::from_str(&s).map_err(|e| e.to_string())
    }
}

impl From<BenchAlgorithm> for String {
    fn from(a: BenchAlgorithm) -> String {
        a.name()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VProfileConfig {
    RiseFall,
    PowerDecay,
    Uniform,
    Custom { values: Vec<f64> },
}

impl VProfileConfig {
    pub fn realize(&self, n: usize) -> Result<VProfile, CliError> {
        Ok(match self {
            VProfileConfig::RiseFall => VProfile::RiseFall { n },
            VProfileConfig::PowerDecay => VProfile::PowerDecay { n },
            VProfileConfig::Uniform => VProfile::Uniform { n },
            VProfileConfig::Custom { values } => {
                if values.len() != n {
                    return Err(CliError::config(format!(
                        "custom v has length {}, grid asks for n = {n}",
                        values.len()
                    )));
                }
                VProfile::Custom(values.clone())
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum USpecConfig {
    Explicit {
        support: Vec<usize>,
        values: Vec<f64>,
    },
    WorstCase {
        m: usize,
        r: f64,
    },
}

impl USpecConfig {
    pub fn to_uspec(&self) -> USpec {
        match self {
            USpecConfig::Explicit { support, values } => USpec::Explicit {
                support: support.clone(),
                values: values.clone(),
            },
            USpecConfig::WorstCase { m, r } => USpec::WorstCase { m: *m, r: *r },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMode {
    /// Pass the configured sigma through to every selector.
    #[default]
    Known,
    /// Re-estimate sigma from each generated matrix.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SumVariantConfig {
    #[default]
    Exact,
    TableBound,
}

impl From<SumVariantConfig> for SumVariant {
    fn from(v: SumVariantConfig) -> SumVariant {
        match v {
            SumVariantConfig::Exact => SumVariant::Exact,
            SumVariantConfig::TableBound => SumVariant::TableBound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HcRuleConfig {
    #[default]
    DownwardClosed,
    PerRank,
}

impl From<HcRuleConfig> for HcRule {
    fn from(v: HcRuleConfig) -> HcRule {
        match v {
            HcRuleConfig::DownwardClosed => HcRule::DownwardClosed,
            HcRuleConfig::PerRank => HcRule::PerRank,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: usize,
    pub sigma: f64,
    pub n_grid: Vec<usize>,
    pub theta_grid: Vec<f64>,
    pub v_profile: VProfileConfig,
    pub u_spec: USpecConfig,
    pub algorithms: Vec<BenchAlgorithm>,
    pub trials: usize,
    pub seed: u64,
    pub sigma_mode: SigmaMode,
    pub sum_variant: SumVariantConfig,
    pub hc_rule: HcRuleConfig,
    pub zeta: f64,
    pub nu: f64,
    /// When a selector keeps nothing, fall back to the plain SVD estimate
    /// instead of the flagged zero vector.
    pub svd_fallback: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            p: 200,
            sigma: 1.0,
            n_grid: vec![200],
            theta_grid: vec![1.0],
            v_profile: VProfileConfig::RiseFall,
            u_spec: USpecConfig::Explicit {
                support: vec![0],
                values: vec![1.0],
            },
            algorithms: BenchAlgorithm::ALL.to_vec(),
            trials: 200,
            seed: 0,
            sigma_mode: SigmaMode::Known,
            sum_variant: SumVariantConfig::Exact,
            hc_rule: HcRuleConfig::DownwardClosed,
            zeta: 1.02,
            nu: std::f64::consts::E * std::f64::consts::E,
            svd_fallback: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::config(format!("parsing {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.p < 2 {
            return Err(CliError::config("p must be at least 2"));
        }
        if self.trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        if self.n_grid.is_empty() || self.theta_grid.is_empty() {
            return Err(CliError::config("n and theta grids must be nonempty"));
        }
        if self.n_grid.iter().any(|&n| n == 0) {
            return Err(CliError::config("every n must be positive"));
        }
        if self
            .theta_grid
            .iter()
            .any(|t| !(*t >= 0.0) || !t.is_finite())
        {
            return Err(CliError::config(
                "every theta must be a finite nonnegative real",
            ));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(CliError::config("sigma must be a positive finite real"));
        }
        if self.algorithms.is_empty() {
            return Err(CliError::config("at least one algorithm is required"));
        }
        let uses_hc = self.algorithms.iter().any(|a| {
            matches!(
                a,
                BenchAlgorithm::Sepca(Algorithm::HcSum) | BenchAlgorithm::Sepca(Algorithm::HcEll2)
            )
        });
        if uses_hc && self.p < 16 {
            return Err(CliError::config("Higher Criticism selectors need p >= 16"));
        }
        if !(self.zeta > 1.0) {
            return Err(CliError::config("zeta must exceed 1"));
        }
        if !(self.nu >= std::f64::consts::E) {
            return Err(CliError::config("nu must be at least e"));
        }
        Ok(())
    }
}
