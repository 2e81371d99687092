use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lvyscale::exponent::{IndexEnd, JumpLaw, LevyExponent};
use lvyscale::sampler::LayeredSamplerConfig;
use lvyscale::synth::Operator;
use lvyscale::verify::{Direction, Observable};

use crate::config::{ExperimentConfig, Format};

#[derive(Debug, Parser)]
#[command(name = "lvyscale", version, about = "Scaling limits of Lévy-driven random processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize paths (or raw increments) and write them with a manifest.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Ensemble members to write.
        #[arg(long)]
        paths: Option<usize>,
        /// Write this many raw increments instead of paths.
        #[arg(long)]
        increments: Option<usize>,
        /// Cell volume of raw increments.
        #[arg(long)]
        vol: Option<f64>,
    },
    /// Print theoretical and fitted Blumenthal-Getoor indices.
    Indices {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Check a coarse- or fine-scale limit along a scale ladder.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Summarize report JSON files.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "LVYSCALE_SEED")]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub ensemble: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    Gaussian,
    Sas,
    Cauchy,
    Laplace,
    Poisson,
    Layered,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JumpKind {
    Gaussian,
    Cauchy,
    Sas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorKind {
    Levy,
    Sheet,
    Fractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EndArg {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Coarse,
    Fine,
}

#[derive(Debug, Default, Clone, PartialEq, Args)]
pub struct NoiseParams {
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Jump law of compound Poisson noise.
    #[arg(long, value_enum)]
    pub jump: Option<JumpKind>,
    #[arg(long)]
    pub jump_variance: Option<f64>,
    #[arg(long)]
    pub jump_scale: Option<f64>,
    #[arg(long)]
    pub jump_alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long, value_enum)]
    pub noise: Option<NoiseKind>,
    #[command(flatten)]
    pub params: NoiseParams,
    /// Components of `--noise sum`, e.g. `gaussian,sas:alpha=1.2:scale=2`.
    #[arg(long)]
    pub components: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub operator: Option<OperatorKind>,
    /// Order of the fractional operator.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Grid step Δ.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Small-jump cutoff for layered stable noise.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<f64>>,
    /// Renormalization exponent H.
    #[arg(long = "H", visible_alias = "hurst")]
    pub h: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Observe the marginal at this point.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_enum)]
    pub limit_end: Option<EndArg>,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Level of the degeneration check.
    #[arg(long)]
    pub delta: Option<f64>,
}

fn family(kind: NoiseKind, p: &NoiseParams) -> anyhow::Result<LevyExponent> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| {
            anyhow!(
                "--noise {} needs --{name}",
                kind.to_possible_value().expect("no skipped variants").get_name()
            )
        })
    };
    let e = match kind {
        NoiseKind::Gaussian => LevyExponent::gaussian(p.variance.unwrap_or(1.0)),
        NoiseKind::Sas => LevyExponent::sas(need(p.alpha, "alpha")?, p.scale.unwrap_or(1.0)),
        NoiseKind::Cauchy => LevyExponent::cauchy(p.scale.unwrap_or(1.0)),
        NoiseKind::Laplace => LevyExponent::generalized_laplace(p.c.unwrap_or(1.0)),
        NoiseKind::Poisson => {
            let jump = match p.jump.unwrap_or(JumpKind::Cauchy) {
                JumpKind::Gaussian => JumpLaw::Gaussian {
                    variance: p.jump_variance.unwrap_or(1.0),
                },
                JumpKind::Cauchy => JumpLaw::Cauchy {
                    scale: p.jump_scale.unwrap_or(1.0),
                },
                JumpKind::Sas => JumpLaw::Sas {
                    alpha: need(p.jump_alpha, "jump-alpha")?,
                    scale: p.jump_scale.unwrap_or(1.0),
                },
            };
            LevyExponent::compound_poisson(p.rate.unwrap_or(1.0), jump)
        }
        NoiseKind::Layered => LevyExponent::layered_stable(need(p.alpha, "alpha")?, need(p.beta, "beta")?),
        NoiseKind::Sum => bail!("sum components must be simple families"),
    };
    Ok(e?)
}

/// Parses one `name[:key=value]...` component.
fn component(spec: &str) -> anyhow::Result<LevyExponent> {
    let mut parts = spec.trim().split(':');
    let name = parts.next().unwrap_or_default();
    let kind = NoiseKind::from_str(name, true).map_err(|_| anyhow!("unknown noise component `{name}`"))?;
    let mut p = NoiseParams::default();
    for kv in parts {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("component `{spec}`: expected key=value, got `{kv}`"))?;
        if k == "jump" {
            p.jump = Some(JumpKind::from_str(v, true).map_err(|_| anyhow!("unknown jump law `{v}`"))?);
            continue;
        }
        let x: f64 = v
            .parse()
            .with_context(|| format!("component `{spec}`: `{v}` is not a number"))?;
        let slot = match k {
            "variance" => &mut p.variance,
            "alpha" => &mut p.alpha,
            "beta" => &mut p.beta,
            "scale" => &mut p.scale,
            "c" => &mut p.c,
            "rate" => &mut p.rate,
            "jump-variance" => &mut p.jump_variance,
            "jump-scale" => &mut p.jump_scale,
            "jump-alpha" => &mut p.jump_alpha,
            _ => bail!("component `{spec}`: unknown key `{k}`"),
        };
        *slot = Some(x);
    }
    family(kind, &p).with_context(|| format!("component `{spec}`"))
}

impl NoiseArgs {
    pub fn exponent(&self) -> anyhow::Result<Option<LevyExponent>> {
        let Some(kind) = self.noise else {
            if self.components.is_some() || self.params != NoiseParams::default() {
                bail!("noise parameters given without --noise");
            }
            return Ok(None);
        };
        if kind == NoiseKind::Sum {
            let list = self
                .components
                .as_deref()
                .ok_or_else(|| anyhow!("--noise sum needs --components"))?;
            let parts = list.split(',').map(component).collect::<anyhow::Result<Vec<_>>>()?;
            return Ok(Some(LevyExponent::sum(parts)?));
        }
        if self.components.is_some() {
            bail!("--components only applies to --noise sum");
        }
        family(kind, &self.params).map(Some)
    }
}

impl Common {
    pub fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(format) = self.format {
            cfg.format = format;
        }
        if let Some(e) = self.ensemble {
            cfg.ensemble = e;
        }
        Ok(cfg)
    }
}

impl ModelArgs {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> anyhow::Result<()> {
        match self.operator {
            Some(OperatorKind::Levy) => cfg.operator = Operator::Levy,
            Some(OperatorKind::Sheet) => cfg.operator = Operator::Sheet,
            Some(OperatorKind::Fractional) => {
                let gamma = self
                    .gamma
                    .ok_or_else(|| anyhow!("--operator fractional needs --gamma"))?;
                cfg.operator = Operator::Fractional { gamma };
            }
            None => match (&mut cfg.operator, self.gamma) {
                (Operator::Fractional { gamma }, Some(g)) => *gamma = g,
                (_, Some(_)) => bail!("--gamma only applies to the fractional operator"),
                _ => {}
            },
        }
        if let Some(step) = self.step {
            cfg.grid.step = step;
        }
        if let Some(n) = self.n {
            cfg.grid.n = n;
        }
        if self.m.is_some() {
            cfg.grid.m = self.m;
        }
        if let Some(epsilon) = self.epsilon {
            let base = cfg.layered.unwrap_or_default();
            cfg.layered = Some(LayeredSamplerConfig { epsilon, ..base });
        }
        Ok(())
    }
}

impl VerifyArgs {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        let v = &mut cfg.verify;
        if let Some(d) = self.direction {
            v.direction = match d {
                DirectionArg::Coarse => Direction::Coarse,
                DirectionArg::Fine => Direction::Fine,
            };
        }
        if self.ladder.is_some() {
            v.ladder = self.ladder.clone();
        }
        if self.h.is_some() {
            v.h = self.h;
        }
        if let Some(t) = self.threshold {
            v.threshold = t;
        }
        if let Some(t) = self.t {
            v.observable = Observable::Point { t };
        }
        if let Some(end) = self.limit_end {
            v.limit_end = Some(match end {
                EndArg::Zero => IndexEnd::Zero,
                EndArg::Infinity => IndexEnd::Infinity,
            });
        }
        if self.resolution.is_some() {
            v.resolution = self.resolution;
        }
        if let Some(d) = self.delta {
            v.delta = d;
        }
    }
}
