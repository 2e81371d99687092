//! Experiment configuration.
//!
//! Files are TOML with top-level `seed`, `ensemble`, `out`, `format` and the
//! sections `[noise]`, `[operator]`, `[grid]`, `[verify]`, `[simulate]` and
//! optionally `[layered]`. Missing keys take the defaults below. A run
//! manifest (JSON) is also accepted and reproduces that run.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lvyscale::exponent::{IndexEnd, LevyExponent};
use lvyscale::sampler::{LayeredSamplerConfig, NoiseSpec};
use lvyscale::synth::{GridSpec, Operator};
use lvyscale::verify::{DegenerationRequest, Direction, Observable, ScalingRequest, KS_THRESHOLD};
use serde::{Deserialize, Serialize};

pub const MANIFEST_SCHEMA: &str = "lvyscale-manifest/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Bin,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Bin => "bin",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub step: f64,
    pub n: usize,
    /// Second axis for sheets; defaults to `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            step: 1e-3,
            n: 1001,
            m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub direction: Direction,
    /// Defaults to `1, 0.1, 0.01, 0.001` (coarse) or `1, 10, 100, 1000` (fine).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    pub observable: Observable,
    pub threshold: f64,
    /// Renormalization exponent; computed from the limit index when unset,
    /// and required (default 0) for degeneration checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_end: Option<IndexEnd>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

impl VerifyConfig {
    pub fn ladder(&self) -> Vec<f64> {
        match (&self.ladder, self.direction) {
            (Some(l), _) => l.clone(),
            (None, Direction::Coarse) => vec![1.0, 0.1, 0.01, 0.001],
            (None, Direction::Fine) => vec![1.0, 10.0, 100.0, 1000.0],
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            direction: Direction::Coarse,
            ladder: None,
            observable: Observable::Point { t: 1.0 },
            threshold: KS_THRESHOLD,
            h: None,
            delta: 0.1,
            limit_end: None,
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Number of ensemble members written, streams `0..paths`.
    pub paths: usize,
    /// When set, write this many raw increments instead of paths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increments: Option<usize>,
    /// Cell volume of raw increments.
    pub vol: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            paths: 1,
            increments: None,
            vol: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(with = "seed_repr")]
    pub seed: u64,
    pub ensemble: usize,
    pub out: PathBuf,
    pub format: Format,
    pub noise: LevyExponent,
    pub operator: Operator,
    pub grid: GridConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layered: Option<LayeredSamplerConfig>,
    pub verify: VerifyConfig,
    pub simulate: SimulateConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            ensemble: 10_000,
            out: PathBuf::from("out"),
            format: Format::Csv,
            noise: LevyExponent::gaussian(1.0).expect("valid default"),
            operator: Operator::Levy,
            grid: GridConfig::default(),
            layered: None,
            verify: VerifyConfig::default(),
            simulate: SimulateConfig::default(),
        }
    }
}

/// TOML integers are signed 64-bit, so seeds above `i64::MAX` are written
/// as strings.
mod seed_repr {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(u64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(v),
            Repr::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| de::Error::custom(format!("seed `{s}` is not a u64"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub outputs: Vec<String>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Loads a TOML config or the `config` of a JSON manifest.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let config = value.get("config").cloned().unwrap_or(value);
            serde_json::from_value(config).map_err(anyhow::Error::from)
        } else {
            Self::from_toml(&text)
        };
        parsed.with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn grid_spec(&self) -> anyhow::Result<GridSpec> {
        let g = self.grid;
        let spec = match self.operator.dim() {
            1 => {
                if g.m.is_some_and(|m| m != 1) {
                    bail!(
                        "grid.m: one-dimensional operator {:?} takes no second axis",
                        self.operator
                    );
                }
                GridSpec::line(g.step, g.n)
            }
            _ => GridSpec::plane(g.step, g.n, g.m.unwrap_or(g.n)),
        };
        spec.map_err(|e| anyhow::anyhow!("grid: {e}"))
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec::new(self.noise.clone(), self.seed)
    }

    /// True when a fine-scale check must fall back to the degeneration test.
    pub fn routes_to_degeneration(&self) -> bool {
        let end = self.verify.limit_end.unwrap_or(self.verify.direction.index_end());
        self.verify.direction == Direction::Fine
            && end == IndexEnd::Infinity
            && self.noise.theoretical_indices().beta_inf == 0.0
    }

    pub fn scaling_request(&self) -> ScalingRequest {
        let v = &self.verify;
        let mut req = ScalingRequest::new(self.noise_spec(), self.operator, v.direction, v.ladder());
        req.observable = v.observable;
        req.ensemble = self.ensemble;
        req.h_override = v.h;
        req.limit_end = v.limit_end;
        req.threshold = v.threshold;
        if let Some(r) = v.resolution {
            req.resolution = r;
        }
        req.layered = self.layered;
        req
    }

    pub fn degeneration_request(&self) -> DegenerationRequest {
        let v = &self.verify;
        let mut req = DegenerationRequest::new(self.noise_spec(), self.operator, v.h.unwrap_or(0.0), v.ladder());
        req.delta = v.delta;
        req.ensemble = self.ensemble;
        req.observable = v.observable;
        if let Some(r) = v.resolution {
            req.resolution = r;
        }
        req.layered = self.layered;
        req
    }

    /// Checks what every command needs before any computation starts.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.operator.validate().map_err(|e| anyhow::anyhow!("operator: {e}"))?;
        self.grid_spec()?;
        if self.ensemble == 0 {
            bail!("ensemble: must be at least 1");
        }
        if let Some(cfg) = &self.layered {
            cfg.validate().map_err(|e| anyhow::anyhow!("layered: {e}"))?;
        }
        if !(self.simulate.vol.is_finite() && self.simulate.vol > 0.0) {
            bail!("simulate.vol: must be finite and > 0, got {}", self.simulate.vol);
        }
        if self.simulate.increments == Some(0) {
            bail!("simulate.increments: must be at least 1");
        }
        Ok(())
    }

    pub fn validate_verify(&self) -> anyhow::Result<()> {
        self.validate()?;
        let checked = if self.routes_to_degeneration() {
            self.degeneration_request().validate()
        } else {
            self.scaling_request().validate()
        };
        checked.map_err(|e| anyhow::anyhow!("verify: {e}"))
    }
}
