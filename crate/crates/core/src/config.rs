//! Experiment configuration: one JSON document drives every CLI command.
//! Unknown keys are rejected and every referenced parameter is validated
//! against the module preconditions before any computation starts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::ShiftDensity;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::mcmc::{ChainConfig, PriorSpec};
use crate::prior::SievePriorConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub prior: PriorConfig,
    #[serde(default)]
    pub mcmc: McmcConfig,
    #[serde(default)]
    pub distances: DistanceConfig,
    #[serde(default)]
    pub smallball: SmallBallConfig,
    #[serde(default)]
    pub fano: FanoConfig,
    #[serde(default)]
    pub seeds: SeedConfig,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            model: ModelConfig::default(),
            prior: PriorConfig::default(),
            mcmc: McmcConfig::default(),
            distances: DistanceConfig::default(),
            smallball: SmallBallConfig::default(),
            fano: FanoConfig::default(),
            seeds: SeedConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Shape smoothness used in reports and reference radii.
    pub s: f64,
    /// Density smoothness (known to the prior).
    pub nu: f64,
    /// Sobolev ball radius A.
    pub ball_radius: f64,
    /// Observed frequency cutoff K.
    pub cutoff: usize,
    /// Curve counts for the contraction sweep.
    pub n_grid: Vec<usize>,
    /// Explicit truth; the built-in scenario is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0: Option<serde_json::Value>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            s: 1.0,
            nu: 1.6,
            ball_radius: 2.0,
            cutoff: 4,
            n_grid: vec![25, 100, 400],
            f0: None,
            g0: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub c_lambda: f64,
    pub rho: f64,
    pub k_max: usize,
    pub grid_len: usize,
    pub n_kl: usize,
    pub max_attempts: usize,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            c_lambda: 1.0,
            rho: 1.5,
            k_max: 32,
            grid_len: 256,
            n_kl: 512,
            max_attempts: 1000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcConfig {
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub proposal_scale: f64,
    pub beta_pcn: f64,
    pub chains: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            sweeps: 20_000,
            burn_in: 5_000,
            thin: 5,
            proposal_scale: 1.0,
            beta_pcn: 0.3,
            chains: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceConfig {
    pub mc_budget: usize,
    pub suite_cases: usize,
    pub quad_radial: usize,
    pub quad_angular: usize,
    pub quad_mixture: usize,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            mc_budget: 50_000,
            suite_cases: 50,
            quad_radial: 512,
            quad_angular: 512,
            quad_mixture: 256,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallBallConfig {
    pub reps: usize,
    pub grid_len: usize,
    pub n_kl: usize,
    pub epsilons_k0: Vec<f64>,
    pub epsilons_k1: Vec<f64>,
}

impl Default for SmallBallConfig {
    fn default() -> Self {
        SmallBallConfig {
            reps: 100_000,
            grid_len: 1024,
            n_kl: 512,
            epsilons_k0: vec![0.25, 0.30, 0.35, 0.40, 0.45],
            epsilons_k1: vec![0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanoConfig {
    pub p: usize,
    pub beta: f64,
    pub tv_budget: usize,
}

impl Default for FanoConfig {
    fn default() -> Self {
        FanoConfig {
            p: 8,
            beta: 2.4,
            tv_budget: 100_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    pub master: u64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig { master: 20_240_817 }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(1.0 < self.prior.rho && self.prior.rho < 2.0) {
            return Err(Error::Config("prior.rho must lie in (1, 2)".into()));
        }
        if self.model.nu < 0.5 {
            return Err(Error::Config("model.nu must be at least 1/2".into()));
        }
        if self.model.ball_radius <= 0.0 {
            return Err(Error::Config("model.ball_radius must be positive".into()));
        }
        if self.prior.k_max == 0 {
            return Err(Error::Config("prior.k_max must be at least 1".into()));
        }
        if self.prior.grid_len < 64 {
            return Err(Error::Config("prior.grid_len must be at least 64".into()));
        }
        if self.prior.n_kl < 16 {
            return Err(Error::Config("prior.n_kl must be at least 16".into()));
        }
        if self.mcmc.sweeps <= self.mcmc.burn_in {
            return Err(Error::Config("mcmc.sweeps must exceed mcmc.burn_in".into()));
        }
        if !(0.0 < self.mcmc.beta_pcn && self.mcmc.beta_pcn <= 1.0) {
            return Err(Error::Config("mcmc.beta_pcn must lie in (0, 1]".into()));
        }
        if self.fano.p < 4 || self.fano.p % 4 != 0 {
            return Err(Error::Config("fano.p must be a positive multiple of 4".into()));
        }
        if self.fano.beta <= self.model.nu + 0.5 {
            return Err(Error::Config("fano.beta must exceed nu + 1/2".into()));
        }
        if self.model.n_grid.is_empty() {
            return Err(Error::Config("model.n_grid must not be empty".into()));
        }
        Ok(())
    }

    /// Prior bundle for a chain at the dataset's sample size.
    pub fn prior_spec(&self, n: usize) -> Result<PriorSpec> {
        Ok(PriorSpec {
            sieve: SievePriorConfig::new(
                n.max(2) as f64,
                self.prior.rho,
                self.prior.c_lambda,
                self.prior.k_max,
            )?,
            nu: self.model.nu,
            ball_radius: self.model.ball_radius,
            grid_len: self.prior.grid_len,
            n_kl: self.prior.n_kl,
            max_attempts: self.prior.max_attempts,
        })
    }

    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            sweeps: self.mcmc.sweeps,
            burn_in: self.mcmc.burn_in,
            thin: self.mcmc.thin,
            proposal_scale: self.mcmc.proposal_scale,
            beta_pcn: self.mcmc.beta_pcn,
            constant_likelihood: false,
            debug_coherence: false,
        }
    }

    /// The generating truth: explicit tables when given, otherwise the
    /// built-in scenario at the configured smoothness.
    pub fn truth(&self) -> Result<(FourierSeries, ShiftDensity)> {
        let f0 = match &self.model.f0 {
            Some(v) => FourierSeries::from_json(v)?,
            None => scenario_shape(self.model.s, self.model.cutoff),
        };
        let g0 = match &self.model.g0 {
            Some(v) => ShiftDensity::from_json(v)?,
            None => scenario_density(self.prior.grid_len),
        };
        if !f0.is_identifiable() {
            return Err(Error::Config(
                "truth shape must have a positive real first coefficient".into(),
            ));
        }
        Ok((f0, g0))
    }
}

/// Built-in truth shape: first coefficient 0.9, higher frequencies decaying
/// like `|l|^{-(s + 1/2)}` with fixed phases.
pub fn scenario_shape(s: f64, cutoff: usize) -> FourierSeries {
    let mut f = FourierSeries::zeros(cutoff);
    *f.coeff_mut(0) = Complex64::new(0.2, 0.0);
    *f.coeff_mut(1) = Complex64::new(0.9, 0.0);
    for l in 2..=cutoff as i64 {
        let amp = 0.55 * (l as f64).powf(-(s + 0.5));
        *f.coeff_mut(l) = Complex64::from_polar(amp, 0.9 * l as f64);
        *f.coeff_mut(-l) = Complex64::from_polar(0.8 * amp, -1.3 * l as f64);
    }
    if cutoff >= 1 {
        *f.coeff_mut(-1) = Complex64::from_polar(0.3, 0.7);
    }
    f.refresh_identifiable();
    f
}

/// Built-in truth density: three smooth harmonics, comfortably inside the
/// nu = 1.6 ball of radius 2.
pub fn scenario_density(grid_len: usize) -> ShiftDensity {
    let vals: Vec<f64> = (0..grid_len)
        .map(|i| {
            let t = i as f64 / grid_len as f64;
            let tau = 2.0 * std::f64::consts::PI * t;
            1.0 + 0.45 * tau.cos() + 0.18 * (2.0 * tau + 1.1).cos() + 0.07 * (3.0 * tau - 0.4).cos()
        })
        .collect();
    ShiftDensity::from_values(vals).expect("scenario density is positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"schema_version": 1, "nonsense": 3}"#;
        assert!(ExperimentConfig::from_json_str(text).is_err());
    }

    #[test]
    fn bad_parameters_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.prior.rho = 2.5;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.fano.p = 6;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.mcmc.burn_in = cfg.mcmc.sweeps;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn scenario_truth_is_valid() {
        let cfg = ExperimentConfig::default();
        let (f0, g0) = cfg.truth().unwrap();
        assert!(f0.is_identifiable());
        assert!((g0.integral() - 1.0).abs() < 1e-12);
        assert!(g0.sobolev_seminorm(1.6) <= 2.0 * 2.0);
        assert!(g0.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_json_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
