//! Samplers for the infinitely divisible cell increment `⟨w, 1_A⟩`, whose
//! characteristic function is `exp(vol(A)·Ψ(ξ))`.
//!
//! Gaussian, SαS, generalized Laplace and compound Poisson increments are
//! exact. Layered stable increments use a jump decomposition with the jumps
//! below `epsilon` either dropped or replaced by a matching Gaussian.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{Family, JumpLaw, LevyExponent};
use crate::rng::{stream_rng, StreamRng};
use crate::stats::{ks_critical_value, ks_statistic};

/// A noise together with the random stream that realizes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub exponent: LevyExponent,
    pub seed: u64,
    pub stream: u64,
}

impl NoiseSpec {
    pub fn new(exponent: LevyExponent, seed: u64) -> Self {
        NoiseSpec {
            exponent,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(&self, stream: u64) -> Self {
        NoiseSpec { stream, ..self.clone() }
    }

    pub fn rng(&self) -> StreamRng {
        stream_rng(self.seed, self.stream)
    }
}

/// Truncation of the layered stable Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredSamplerConfig {
    /// Jumps with `|t| ≤ epsilon` are not simulated individually.
    pub epsilon: f64,
    /// Replace the dropped small jumps by a Gaussian of equal variance.
    pub gaussian_compensation: bool,
}

impl Default for LayeredSamplerConfig {
    fn default() -> Self {
        LayeredSamplerConfig {
            epsilon: 1e-3,
            gaussian_compensation: true,
        }
    }
}

impl LayeredSamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_finite() && self.epsilon > 0.0 && self.epsilon <= 1.0 {
            Ok(())
        } else {
            Err(Error::param(
                "epsilon",
                format!("must lie in (0, 1], got {}", self.epsilon),
            ))
        }
    }
}

/// Standard symmetric α-stable variate (`E e^{iξX} = e^{-|ξ|^α}`) by
/// Chambers-Mallows-Stuck.
pub fn standard_sas<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let w: f64 = Exp1.sample(rng);
    let a = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
    a * b
}

fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // (0, 1]
    1.0 - rng.random::<f64>()
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Normal(Normal<f64>),
    Stable {
        alpha: f64,
        scale: f64,
    },
    Laplace(Gamma<f64>),
    CompoundPoisson {
        count: Option<Poisson<f64>>,
        jump: JumpLaw,
    },
    Layered {
        alpha: f64,
        beta: f64,
        outer: Option<Poisson<f64>>,
        mid: Option<Poisson<f64>>,
        // ε^{-α} and ε^{-α} - 1 for the inverse CDF of mid-size jumps.
        eps_pow: f64,
        eps_span: f64,
        inner: Option<Normal<f64>>,
    },
    Sum(Vec<Kernel>),
}

fn poisson(mean: f64) -> Result<Option<Poisson<f64>>> {
    if mean <= 0.0 {
        return Ok(None);
    }
    Poisson::new(mean)
        .map(Some)
        .map_err(|e| Error::param("rate", format!("Poisson mean {mean}: {e}")))
}

impl Kernel {
    fn build(exp: &LevyExponent, vol: f64, layered: &LayeredSamplerConfig) -> Result<Kernel> {
        let k = match exp.family() {
            Family::Gaussian { variance } => Kernel::Normal(
                Normal::new(0.0, (variance * vol).sqrt()).map_err(|e| Error::param("variance", e.to_string()))?,
            ),
            Family::Sas { alpha, scale } => Kernel::Stable {
                alpha: *alpha,
                scale: (scale * vol).powf(1.0 / alpha),
            },
            // Cauchy is SαS with α = 1 and C = scale.
            Family::Cauchy { scale } => Kernel::Stable {
                alpha: 1.0,
                scale: scale * vol,
            },
            Family::GeneralizedLaplace { c } => {
                Kernel::Laplace(Gamma::new(c * vol, 1.0).map_err(|e| Error::param("c", e.to_string()))?)
            }
            Family::CompoundPoisson { rate, jump } => Kernel::CompoundPoisson {
                count: poisson(rate * vol)?,
                jump: jump.clone(),
            },
            Family::LayeredStable { alpha, beta } => {
                layered.validate()?;
                let eps = layered.epsilon;
                let eps_pow = eps.powf(-alpha);
                let eps_span = eps_pow - 1.0;
                let inner = if layered.gaussian_compensation {
                    let var = vol * 2.0 * eps.powf(2.0 - alpha) / (2.0 - alpha);
                    Some(Normal::new(0.0, var.sqrt()).map_err(|e| Error::param("epsilon", e.to_string()))?)
                } else {
                    None
                };
                Kernel::Layered {
                    alpha: *alpha,
                    beta: *beta,
                    outer: poisson(vol * 2.0 / beta)?,
                    mid: poisson(vol * (2.0 / alpha) * eps_span)?,
                    eps_pow,
                    eps_span,
                    inner,
                }
            }
            Family::Sum { components } => Kernel::Sum(
                components
                    .iter()
                    .map(|c| Kernel::build(c, vol, layered))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(k)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Kernel::Normal(n) => n.sample(rng),
            Kernel::Stable { alpha, scale } => scale * standard_sas(*alpha, rng),
            Kernel::Laplace(gamma) => {
                let g: f64 = gamma.sample(rng);
                let z: f64 = StandardNormal.sample(rng);
                (2.0 * g).sqrt() * z
            }
            Kernel::CompoundPoisson { count, jump } => {
                let k = match count {
                    Some(p) => p.sample(rng),
                    None => 0.0,
                };
                if k == 0.0 {
                    return 0.0;
                }
                // Sums of k i.i.d. jumps, collapsed by stability of each law.
                match *jump {
                    JumpLaw::Gaussian { variance } => {
                        let z: f64 = StandardNormal.sample(rng);
                        (k * variance).sqrt() * z
                    }
                    JumpLaw::Cauchy { scale } => k * scale * standard_sas(1.0, rng),
                    JumpLaw::Sas { alpha, scale } => (k * scale).powf(1.0 / alpha) * standard_sas(alpha, rng),
                }
            }
            Kernel::Layered {
                alpha,
                beta,
                outer,
                mid,
                eps_pow,
                eps_span,
                inner,
            } => {
                let mut acc = 0.0;
                if let Some(p) = outer {
                    let k = p.sample(rng) as u64;
                    for _ in 0..k {
                        acc += random_sign(rng) * unit_open(rng).powf(-1.0 / beta);
                    }
                }
                if let Some(p) = mid {
                    let k = p.sample(rng) as u64;
                    for _ in 0..k {
                        let u: f64 = rng.random();
                        let mag = (eps_pow - u * eps_span).powf(-1.0 / alpha);
                        acc += random_sign(rng) * mag;
                    }
                }
                if let Some(n) = inner {
                    acc += n.sample(rng);
                }
                acc
            }
            Kernel::Sum(parts) => parts.iter().map(|p| p.sample(rng)).sum(),
        }
    }
}

/// Compiled sampler for increments of one cell volume.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    kernel: Kernel,
    vol: f64,
}

impl IncrementSampler {
    pub fn new(exponent: &LevyExponent, vol: f64) -> Result<Self> {
        Self::with_config(exponent, vol, &LayeredSamplerConfig::default())
    }

    pub fn with_config(exponent: &LevyExponent, vol: f64, layered: &LayeredSamplerConfig) -> Result<Self> {
        if !(vol.is_finite() && vol > 0.0) {
            return Err(Error::param("vol", format!("must be finite and > 0, got {vol}")));
        }
        layered.validate()?;
        Ok(IncrementSampler {
            kernel: Kernel::build(exponent, vol, layered)?,
            vol,
        })
    }

    pub fn vol(&self) -> f64 {
        self.vol
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.kernel.sample(rng)
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for v in out {
            *v = self.kernel.sample(rng);
        }
    }
}

/// `n` independent increments of volume `vol` from the stream of `spec`.
pub fn sample_increment(spec: &NoiseSpec, vol: f64, n: usize) -> Result<Vec<f64>> {
    sample_increment_with(spec, vol, n, &LayeredSamplerConfig::default())
}

pub fn sample_increment_with(spec: &NoiseSpec, vol: f64, n: usize, layered: &LayeredSamplerConfig) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let sampler = IncrementSampler::with_config(&spec.exponent, vol, layered)?;
    let mut rng = spec.rng();
    let mut out = vec![0.0; n];
    sampler.fill(&mut rng, &mut out);
    Ok(out)
}

/// Two-sample comparison of direct draws against sums of `k` finer draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisibilityReport {
    pub k: usize,
    pub n: usize,
    pub ks_statistic: f64,
    /// Asymptotic 95% two-sample critical value, about `1.36·√(2/n)`.
    pub critical_95: f64,
}

/// Compares `n` draws at volume `vol` with `n` sums of `k` independent draws
/// at volume `vol/k`.
pub fn divisibility_check(spec: &NoiseSpec, vol: f64, k: usize, n: usize) -> Result<DivisibilityReport> {
    divisibility_check_with(spec, vol, k, n, &LayeredSamplerConfig::default())
}

pub fn divisibility_check_with(
    spec: &NoiseSpec,
    vol: f64,
    k: usize,
    n: usize,
    layered: &LayeredSamplerConfig,
) -> Result<DivisibilityReport> {
    if k < 2 {
        return Err(Error::param("k", format!("must be at least 2, got {k}")));
    }
    if n < 10_000 {
        return Err(Error::param("n", format!("must be at least 1e4, got {n}")));
    }
    let whole = IncrementSampler::with_config(&spec.exponent, vol, layered)?;
    let part = IncrementSampler::with_config(&spec.exponent, vol / k as f64, layered)?;
    let mut rng = spec.rng();
    let mut direct = vec![0.0; n];
    whole.fill(&mut rng, &mut direct);
    let summed: Vec<f64> = (0..n).map(|_| (0..k).map(|_| part.sample(&mut rng)).sum()).collect();
    Ok(DivisibilityReport {
        k,
        n,
        ks_statistic: ks_statistic(&direct, &summed),
        critical_95: ks_critical_value(0.05, n, n),
    })
}
