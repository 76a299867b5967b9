//! Experiment configuration: one TOML file selects a model, its
//! discretization, orbit families, tolerances, and output targets. The
//! shipped configs under configs/ pin the reference parameter sets.

use crate::action::OrbitFamily;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::quantizer::QuantizerSettings;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// Model selection. Mirrors the analytic model enum but keeps lattice
/// parameters in their natural integer form (flux q per l sites) so the
/// config stays exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ModelConfig {
    HarmonicOscillator { omega: f64 },
    H1 { gamma: f64, v0: f64, l: f64 },
    H2 { t0: f64, delta: f64, q: i64, l: usize, #[serde(default)] p_y: f64 },
    H3 { g: f64, a: f64, gam: f64 },
    Spin { t1: f64 },
}

impl ModelConfig {
    /// The classical Hamiltonian, if this is a phase-space model.
    pub fn to_spec(&self) -> Option<ModelSpec> {
        match *self {
            ModelConfig::HarmonicOscillator { omega } => {
                Some(ModelSpec::HarmonicOscillator { omega })
            }
            ModelConfig::H1 { gamma, v0, l } => Some(ModelSpec::H1 { gamma, v0, l }),
            ModelConfig::H2 { t0, delta, q, l, p_y } => Some(ModelSpec::H2 {
                t0,
                delta,
                b: 2.0 * PI * q as f64 / l as f64,
                p_y,
                l: l as f64,
            }),
            ModelConfig::H3 { g, a, gam } => Some(ModelSpec::H3 { g, a, gam }),
            ModelConfig::Spin { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscretizationConfig {
    /// Matrix dimension parameter (basis size; lattice models use their
    /// own site count).
    pub n: usize,
    /// Half-width of the real-space box for the grid models.
    pub x_half: f64,
    /// Quadrature nodes for W(E), T(E).
    pub nodes: usize,
    /// RK4 steps per orbit.
    pub steps: usize,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        DiscretizationConfig { n: 512, x_half: 8.0, nodes: 512, steps: 2048 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub dedup: f64,
    pub classification: f64,
    pub newton: f64,
    pub closure: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { dedup: 1e-6, classification: 1e-4, newton: 1e-10, closure: 1e-6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SpinSweepConfig {
    pub delta1_start: f64,
    pub delta1_stop: f64,
    pub delta1_step: f64,
    pub steps: usize,
}

impl Default for SpinSweepConfig {
    fn default() -> Self {
        SpinSweepConfig { delta1_start: 0.0, delta1_stop: 4.0, delta1_step: 0.1, steps: 2048 }
    }
}

impl SpinSweepConfig {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.delta1_stop - self.delta1_start) / self.delta1_step).round() as i64;
        (0..=count.max(0))
            .map(|k| self.delta1_start + k as f64 * self.delta1_step)
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: String,
    /// "csv" or "json".
    pub format: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), format: "csv".into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default, rename = "family")]
    pub families: Vec<OrbitFamily>,
    /// Real/complex transition energies of the spectrum; levels within 2%
    /// are flagged as crossover and excluded from the dichotomy check.
    #[serde(default)]
    pub transition_energies: Vec<f64>,
    #[serde(default)]
    pub spin: SpinSweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.dedup", t.dedup),
            ("tolerances.classification", t.classification),
            ("tolerances.newton", t.newton),
            ("tolerances.closure", t.closure),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.discretization.nodes < 16 {
            return Err(Error::Config("discretization.nodes must be >= 16".into()));
        }
        if self.discretization.steps < 16 {
            return Err(Error::Config("discretization.steps must be >= 16".into()));
        }
        for f in &self.families {
            if f.n_max < f.n_min {
                return Err(Error::Config(format!(
                    "family.{}: empty n-range [{}, {}]",
                    f.label, f.n_min, f.n_max
                )));
            }
            if f.window.re[1] <= f.window.re[0] || f.window.im[1] <= f.window.im[0] {
                return Err(Error::Config(format!(
                    "family.{}: degenerate validity window",
                    f.label
                )));
            }
            if f.expected_accuracy <= 0.0 {
                return Err(Error::Config(format!(
                    "family.{}: expected_accuracy must be > 0",
                    f.label
                )));
            }
        }
        if matches!(self.model, ModelConfig::Spin { .. }) && self.spin.values().is_empty() {
            return Err(Error::Config("spin: empty delta1 sweep".into()));
        }
        if self.output.format != "csv" && self.output.format != "json" {
            return Err(Error::Config(format!(
                "output.format must be csv or json, got {}",
                self.output.format
            )));
        }
        Ok(())
    }

    /// Quantizer knobs assembled from the discretization and tolerance
    /// sections plus the transition-energy list.
    pub fn quantizer_settings(&self) -> QuantizerSettings {
        QuantizerSettings {
            nodes: self.discretization.nodes,
            steps: self.discretization.steps,
            dedup_tol: self.tolerances.dedup,
            classification_tol: self.tolerances.classification,
            transition_energies: self.transition_energies.clone(),
        }
    }
}
