//! Statistical checks of the coarse- and fine-scale limits.
//!
//! A scaling check simulates an ensemble of observables of the rescaled
//! process `a^H s(·/a)` along a ladder of scale factors and measures, at each
//! rung, how far their law is from the predicted SαS limit. Two oracles are
//! recorded side by side:
//!
//! * two-sample KS against a directly simulated SαS-driven reference;
//! * sup-distance between the empirical CF and the closed form
//!   `exp(-C‖Tφ‖_β^β |ξ|^β)`, with `‖Tφ‖_β` taken from the discrete inverse.
//!
//! The verdict uses the KS distance.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{IndexEnd, LevyExponent};
use crate::sampler::{LayeredSamplerConfig, NoiseSpec};
use crate::stats::{interquartile_range, ks_critical_value, ks_p_value, ks_statistic, linear_fit};
use crate::synth::{
    fractional_weights, pair_test_function, rescale_window, GridSpec, Operator, PathGrid, RescaleSpec, ScaleRatio,
    Synthesizer,
};

pub const REPORT_SCHEMA: &str = "scaling-report/1";

/// Default KS threshold for a converged rung.
pub const KS_THRESHOLD: f64 = 0.03;
/// Default ECF sup-distance threshold.
pub const ECF_THRESHOLD: f64 = 0.02;
/// Exceedance probability below which a rung counts as degenerate.
pub const DEGENERATE_THRESHOLD: f64 = 0.01;

// Streams of the reference ensemble start here so they never overlap with
// the tested ensemble.
const REFERENCE_STREAM_OFFSET: u64 = 1 << 40;

/// 101 equispaced frequencies on `[-5, 5]`.
pub fn default_xi_grid() -> Vec<f64> {
    (0..=100).map(|i| -5.0 + 0.1 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcfTarget {
    pub exponent: LevyExponent,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EcfReport {
    pub xi_grid: Vec<f64>,
    pub ecf: Vec<Complex64>,
    pub sample_count: usize,
    pub sup_distance_to_target: Option<f64>,
    pub target: Option<EcfTarget>,
}

/// `ecf(ξ) = (1/n) Σ exp(iξx_k)` on the given grid, which must contain 0.
pub fn empirical_cf(samples: &[f64], xi_grid: &[f64]) -> Result<EcfReport> {
    if samples.is_empty() {
        return Err(Error::param("samples", "must be nonempty"));
    }
    if !xi_grid.contains(&0.0) {
        return Err(Error::param("xiGrid", "must include 0"));
    }
    let n = samples.len() as f64;
    let ecf = xi_grid
        .par_iter()
        .map(|&xi| {
            if xi == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let (mut re, mut im) = (0.0, 0.0);
            for &x in samples {
                let (s, c) = (xi * x).sin_cos();
                re += c;
                im += s;
            }
            let z = Complex64::new(re / n, im / n);
            let r = z.norm();
            if r > 1.0 {
                z / r
            } else {
                z
            }
        })
        .collect();
    Ok(EcfReport {
        xi_grid: xi_grid.to_vec(),
        ecf,
        sample_count: samples.len(),
        sup_distance_to_target: None,
        target: None,
    })
}

impl EcfReport {
    /// Sup-distance to a real characteristic function.
    pub fn distance_to<F: Fn(f64) -> f64>(&self, cf: F) -> f64 {
        self.xi_grid
            .iter()
            .zip(&self.ecf)
            .map(|(&xi, z)| (z - Complex64::new(cf(xi), 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Records the sup-distance to `exp(vol·Ψ(ξ))` and returns it.
    pub fn compare(&mut self, exponent: &LevyExponent, volume: f64) -> Result<f64> {
        let mut target = Vec::with_capacity(self.xi_grid.len());
        for &xi in &self.xi_grid {
            target.push((volume * exponent.psi(xi)?).exp());
        }
        let d = self
            .ecf
            .iter()
            .zip(&target)
            .map(|(z, &t)| (z - Complex64::new(t, 0.0)).norm())
            .fold(0.0, f64::max);
        self.sup_distance_to_target = Some(d);
        self.target = Some(EcfTarget {
            exponent: exponent.clone(),
            volume,
        });
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `a → 0`.
    Coarse,
    /// `a → ∞`.
    Fine,
}

impl Direction {
    /// End of the frequency axis that governs the limit.
    pub fn index_end(&self) -> IndexEnd {
        match self {
            Direction::Coarse => IndexEnd::Zero,
            Direction::Fine => IndexEnd::Infinity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `1_{[lo, hi]}`.
    Indicator { lo: f64, hi: f64 },
    /// `exp(-(t - center)²/(2 width²))`.
    GaussianBump { center: f64, width: f64 },
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Indicator { lo, hi } => {
                if t >= lo && t <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::GaussianBump { center, width } => {
                let z = (t - center) / width;
                (-0.5 * z * z).exp()
            }
        }
    }

    /// Right end of the window the pairing is evaluated on.
    pub fn support_end(&self) -> f64 {
        match *self {
            TestFunction::Indicator { hi, .. } => hi,
            TestFunction::GaussianBump { center, width } => center + 8.0 * width,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TestFunction::Indicator { lo, hi } => lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo,
            TestFunction::GaussianBump { center, width } => {
                center.is_finite() && width.is_finite() && width > 0.0 && center - 8.0 * width >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(
                "testFunction",
                format!("{self:?} must be supported in [0, ∞)"),
            ))
        }
    }
}

/// What is measured on each rescaled path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Observable {
    /// Marginal at `t` (at `(t, t)` for sheets).
    Point { t: f64 },
    /// `⟨s, φ⟩` by Riemann sum; dimension 1 only.
    Function { phi: TestFunction },
}

impl Observable {
    fn extent(&self) -> f64 {
        match self {
            Observable::Point { t } => *t,
            Observable::Function { phi } => phi.support_end(),
        }
    }

    fn validate(&self, operator: &Operator) -> Result<()> {
        match self {
            Observable::Point { t } => {
                if !(t.is_finite() && *t > 0.0) {
                    return Err(Error::param("testPoint", format!("must be > 0, got {t}")));
                }
            }
            Observable::Function { phi } => {
                if operator.dim() != 1 {
                    return Err(Error::Misuse(
                        "test-function observables are only supported in dimension 1".into(),
                    ));
                }
                phi.validate()?;
            }
        }
        Ok(())
    }

    /// Evaluates the observable on a path whose grid reaches `extent()` at
    /// index `k_end` (per axis).
    fn measure(&self, path: &PathGrid, k_end: usize) -> Result<f64> {
        match self {
            Observable::Point { .. } => Ok(if path.grid.dim == 2 {
                path.get(k_end, k_end)
            } else {
                path.values[k_end]
            }),
            Observable::Function { phi } => {
                let samples: Vec<f64> = (0..path.grid.n).map(|k| phi.eval(path.grid.coord(k))).collect();
                pair_test_function(path, &samples)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converging,
    NonConverging,
    DegenerateToZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LadderPoint {
    pub a: f64,
    /// KS distance to the reference (scaling checks) or exceedance
    /// probability (degeneration checks).
    pub distance: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ks_p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ecf_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingReport {
    pub schema: String,
    pub noise: LevyExponent,
    pub operator: Operator,
    pub direction: Direction,
    #[serde(rename = "H")]
    pub h: f64,
    pub ladder: Vec<LadderPoint>,
    pub verdict: Verdict,
    pub seed: u64,
    pub observable: Observable,
    /// Stability index and constant of the limit, when there is one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit_index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit_constant: Option<f64>,
    pub threshold: f64,
    /// Least-squares slope of log distance against log a.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slope_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl ScalingReport {
    pub fn final_distance(&self) -> f64 {
        self.ladder.last().map_or(f64::NAN, |p| p.distance)
    }

    pub fn distances(&self) -> Vec<f64> {
        self.ladder.iter().map(|p| p.distance).collect()
    }
}

/// Parameters of a scaling-limit check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRequest {
    pub noise: NoiseSpec,
    pub operator: Operator,
    pub direction: Direction,
    pub ladder: Vec<f64>,
    pub observable: Observable,
    pub ensemble: usize,
    /// Overrides `γ + d(1/β - 1)`; for control runs.
    #[serde(default)]
    pub h_override: Option<f64>,
    /// Which index defines the limit; defaults to the one matching the
    /// direction. Setting the other end gives the swapped control.
    #[serde(default)]
    pub limit_end: Option<IndexEnd>,
    pub threshold: f64,
    /// Grid points per unit observable extent; 1 is exact for Lévy processes
    /// and sheets observed at a point.
    pub resolution: usize,
    /// Truncation for layered stable noise; chosen from the final rung
    /// when unset.
    #[serde(default)]
    pub layered: Option<LayeredSamplerConfig>,
}

impl ScalingRequest {
    /// Checks every precondition without simulating anything.
    pub fn validate(&self) -> Result<()> {
        self.limit().map(|_| ())
    }

    /// Index and constant of the targeted stable limit.
    fn limit(&self) -> Result<(f64, f64)> {
        self.operator.validate()?;
        self.observable.validate(&self.operator)?;
        check_ladder(&self.ladder, self.direction)?;
        if self.ensemble < 2 {
            return Err(Error::param("ensembleSize", "must be at least 2"));
        }
        if let Some(h) = self.h_override {
            if !h.is_finite() {
                return Err(Error::param("H", "must be finite"));
            }
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::param(
                "threshold",
                format!("must lie in (0, 1], got {}", self.threshold),
            ));
        }
        if let Some(cfg) = &self.layered {
            cfg.validate()?;
        }
        let end = self.limit_end.unwrap_or(self.direction.index_end());
        let beta = self.noise.exponent.theoretical_indices().at(end);
        if beta == 0.0 {
            return Err(Error::Misuse(
                "the limit index is 0 (β∞ = 0): there is no stable limit; use verify_degeneration".into(),
            ));
        }
        let constant = self
            .noise
            .exponent
            .asymptotic_constant(end)?
            .ok_or_else(|| Error::Misuse("no power-law asymptotics at the requested end".into()))?;
        Ok((beta, constant))
    }

    pub fn new(noise: NoiseSpec, operator: Operator, direction: Direction, ladder: Vec<f64>) -> Self {
        let resolution = match operator {
            Operator::Fractional { .. } => 64,
            _ => 1,
        };
        ScalingRequest {
            noise,
            operator,
            direction,
            ladder,
            observable: Observable::Point { t: 1.0 },
            ensemble: 10_000,
            h_override: None,
            limit_end: None,
            threshold: KS_THRESHOLD,
            resolution,
            layered: None,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Base grid able to represent every rung of the ladder for the observable.
struct LadderPlan {
    grid: GridSpec,
    rungs: Vec<(RescaleSpec, usize)>, // spec and output index of the observable extent
}

fn plan_ladder(
    operator: &Operator,
    observable: &Observable,
    ladder: &[f64],
    h: f64,
    resolution: usize,
) -> Result<LadderPlan> {
    let ratios = ladder
        .iter()
        .map(|&a| ScaleRatio::from_factor(a))
        .collect::<Result<Vec<_>>>()?;
    let mut m_in = 1usize;
    let mut m_out = 1usize;
    for r in &ratios {
        match *r {
            ScaleRatio::ZoomIn(m) => m_in = m_in / gcd(m_in, m) * m,
            ScaleRatio::ZoomOut(m) => m_out = m_out.max(m),
        }
    }
    let base = resolution.max(1) * m_in;
    let step = observable.extent() / base as f64;
    // Only as much path as the outermost rung reads.
    let n = ratios
        .iter()
        .map(|r| match *r {
            ScaleRatio::ZoomIn(m) => base / m,
            ScaleRatio::ZoomOut(m) => base * m,
        })
        .max()
        .unwrap_or(base)
        .max(1)
        + 1;
    let grid = match operator.dim() {
        1 => GridSpec::line(step, n)?,
        _ => GridSpec::plane(step, n, n)?,
    };
    let rungs = ratios
        .iter()
        .map(|r| {
            let k_end = match *r {
                ScaleRatio::ZoomIn(m) => base / m,
                ScaleRatio::ZoomOut(_) => base,
            };
            (RescaleSpec { ratio: *r, h }, k_end)
        })
        .collect();
    Ok(LadderPlan { grid, rungs })
}

/// Small-jump cutoff such that dropped jumps stay below 0.01 after the
/// final rescale; the dropped part is replaced by a matched Gaussian.
pub fn auto_layered_config(ladder: &[f64], h: f64) -> LayeredSamplerConfig {
    let a = ladder.last().copied().unwrap_or(1.0);
    let epsilon = (0.01 / a.powf(h)).clamp(1e-9, 1.0);
    LayeredSamplerConfig {
        epsilon,
        gaussian_compensation: true,
    }
}

fn check_ladder(ladder: &[f64], direction: Direction) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::param("aLadder", "must be nonempty"));
    }
    let monotone = ladder.windows(2).all(|w| match direction {
        Direction::Coarse => w[1] < w[0],
        Direction::Fine => w[1] > w[0],
    });
    if !monotone {
        let want = match direction {
            Direction::Coarse => "strictly decreasing toward 0",
            Direction::Fine => "strictly increasing toward ∞",
        };
        return Err(Error::param("aLadder", format!("must be {want}")));
    }
    for &a in ladder {
        ScaleRatio::from_factor(a)?;
    }
    Ok(())
}

/// Observables of the rescaled paths, one vector per rung.
fn rescaled_observables(
    noise: &NoiseSpec,
    operator: Operator,
    observable: &Observable,
    plan: &LadderPlan,
    layered: &LayeredSamplerConfig,
    first_stream: u64,
    ensemble: usize,
) -> Result<Vec<Vec<f64>>> {
    let synth = Synthesizer::with_config(noise, operator, plan.grid, layered)?;
    let per_path: Vec<Result<Vec<f64>>> = synth.map_ensemble(first_stream, ensemble, |path| {
        plan.rungs
            .iter()
            .map(|(spec, k_end)| {
                let window = rescale_window(path, spec, k_end + 1, k_end + 1)?;
                observable.measure(&window, *k_end)
            })
            .collect()
    });
    let mut by_rung = vec![Vec::with_capacity(ensemble); plan.rungs.len()];
    for row in per_path {
        for (r, v) in row?.into_iter().enumerate() {
            by_rung[r].push(v);
        }
    }
    Ok(by_rung)
}

/// SαS noise whose exponent is `-C|ξ|^β`; Gaussian when β = 2.
pub fn stable_limit_noise(beta: f64, constant: f64) -> Result<LevyExponent> {
    if beta == 2.0 {
        LevyExponent::gaussian(2.0 * constant)
    } else {
        LevyExponent::sas(beta, constant)
    }
}

/// `‖Tφ‖_β^β` for the observable, with `T` the discrete zero-boundary
/// inverse of the operator on a grid of `resolution` cells per unit extent.
pub fn discrete_inverse_norm(
    operator: &Operator,
    observable: &Observable,
    beta: f64,
    resolution: usize,
) -> Result<f64> {
    let extent = observable.extent();
    let k = resolution.max(1);
    let step = extent / k as f64;
    let kernel: Vec<f64> = match *operator {
        Operator::Fractional { gamma } if gamma != 1.0 => fractional_weights(gamma, step, k),
        _ => vec![1.0; k],
    };
    match observable {
        Observable::Point { .. } => {
            let one_d: f64 = kernel.iter().map(|h| step * h.abs().powf(beta)).sum();
            Ok(match operator {
                Operator::Sheet => one_d * one_d,
                _ => one_d,
            })
        }
        Observable::Function { phi } => {
            let phi_k: Vec<f64> = (0..=k).map(|i| phi.eval(i as f64 * step)).collect();
            // Tφ_j = Δ Σ_{i>j} h_{i-1-j} φ_i
            let mut norm = 0.0;
            for j in 0..k {
                let t: f64 = ((j + 1)..=k).map(|i| kernel[i - 1 - j] * phi_k[i]).sum::<f64>() * step;
                norm += step * t.abs().powf(beta);
            }
            Ok(norm)
        }
    }
}

/// Checks the coarse- (`a → 0`) or fine-scale (`a → ∞`) limit.
pub fn verify_scaling_limit(req: &ScalingRequest) -> Result<ScalingReport> {
    let (beta, constant) = req.limit()?;
    let exponent = &req.noise.exponent;
    let h = req.h_override.unwrap_or_else(|| req.operator.hurst(beta));
    let resolution = req.resolution.max(1);

    let layered = req.layered.unwrap_or_else(|| auto_layered_config(&req.ladder, h));
    let plan = plan_ladder(&req.operator, &req.observable, &req.ladder, h, resolution)?;
    let tested = rescaled_observables(
        &req.noise,
        req.operator,
        &req.observable,
        &plan,
        &layered,
        req.noise.stream,
        req.ensemble,
    )?;

    // Reference: the SαS-driven limit process observed without rescaling.
    let ref_noise = NoiseSpec {
        exponent: stable_limit_noise(beta, constant)?,
        seed: req.noise.seed,
        stream: req.noise.stream + REFERENCE_STREAM_OFFSET,
    };
    let ref_resolution = match (req.operator, req.observable) {
        (Operator::Fractional { gamma }, _) if gamma != 1.0 => resolution.max(256),
        (_, Observable::Function { .. }) => resolution.max(256),
        _ => resolution,
    };
    let ref_plan = plan_ladder(&req.operator, &req.observable, &[1.0], 0.0, ref_resolution)?;
    let reference = rescaled_observables(
        &ref_noise,
        req.operator,
        &req.observable,
        &ref_plan,
        &layered,
        ref_noise.stream,
        req.ensemble,
    )?
    .pop()
    .expect("one rung");

    let norm = discrete_inverse_norm(&req.operator, &req.observable, beta, 4096)?;
    let target_cf = |xi: f64| (-constant * norm * xi.abs().powf(beta)).exp();
    let xi_grid = default_xi_grid();

    let mut ladder = Vec::with_capacity(req.ladder.len());
    for (a, values) in req.ladder.iter().zip(&tested) {
        let d = ks_statistic(values, &reference);
        let ecf = empirical_cf(values, &xi_grid)?;
        ladder.push(LadderPoint {
            a: *a,
            distance: d,
            n: values.len(),
            ks_p_value: Some(ks_p_value(d, values.len(), reference.len())),
            ecf_distance: Some(ecf.distance_to(target_cf)),
        });
    }

    let slack = ks_critical_value(0.01, req.ensemble, req.ensemble);
    let distances: Vec<f64> = ladder.iter().map(|p| p.distance).collect();
    let non_increasing = distances.windows(2).all(|w| w[1] <= w[0] + slack);
    let verdict = if non_increasing && *distances.last().unwrap() < req.threshold {
        Verdict::Converging
    } else {
        Verdict::NonConverging
    };

    Ok(ScalingReport {
        schema: REPORT_SCHEMA.into(),
        noise: exponent.clone(),
        operator: req.operator,
        direction: req.direction,
        h,
        slope_estimate: log_slope(&req.ladder, &distances),
        ladder,
        verdict,
        seed: req.noise.seed,
        observable: req.observable,
        limit_index: Some(beta),
        limit_constant: Some(constant),
        threshold: req.threshold,
        note: None,
    })
}

fn log_slope(a: &[f64], d: &[f64]) -> Option<f64> {
    if a.len() < 2 || d.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = a.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = d.iter().map(|x| x.ln()).collect();
    linear_fit(&xs, &ys).map(|f| f.slope)
}

/// Parameters of a degeneration check for noises with β∞ = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationRequest {
    pub noise: NoiseSpec,
    pub operator: Operator,
    pub h: f64,
    pub ladder: Vec<f64>,
    pub delta: f64,
    pub ensemble: usize,
    pub observable: Observable,
    pub resolution: usize,
    #[serde(default)]
    pub layered: Option<LayeredSamplerConfig>,
}

impl DegenerationRequest {
    /// Checks every precondition without simulating anything.
    pub fn validate(&self) -> Result<()> {
        let beta_inf = self.noise.exponent.theoretical_indices().beta_inf;
        if beta_inf > 0.0 {
            return Err(Error::Misuse(format!(
                "degeneration applies to β∞ = 0 only; this noise has β∞ = {beta_inf}"
            )));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::param("delta", format!("must be > 0, got {}", self.delta)));
        }
        if !self.h.is_finite() {
            return Err(Error::param("H", "must be finite"));
        }
        self.operator.validate()?;
        self.observable.validate(&self.operator)?;
        check_ladder(&self.ladder, Direction::Fine)?;
        if self.ensemble < 2 {
            return Err(Error::param("ensembleSize", "must be at least 2"));
        }
        if let Some(cfg) = &self.layered {
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn new(noise: NoiseSpec, operator: Operator, h: f64, ladder: Vec<f64>) -> Self {
        let resolution = match operator {
            Operator::Fractional { .. } => 64,
            _ => 1,
        };
        DegenerationRequest {
            noise,
            operator,
            h,
            ladder,
            delta: 0.1,
            ensemble: 10_000,
            observable: Observable::Point { t: 1.0 },
            resolution,
            layered: None,
        }
    }
}

/// Estimates `P(|obs(a^H s(·/a))| > δ)` along an increasing ladder.
pub fn verify_degeneration(req: &DegenerationRequest) -> Result<ScalingReport> {
    req.validate()?;
    let exponent = &req.noise.exponent;
    let layered = req.layered.unwrap_or_else(|| auto_layered_config(&req.ladder, req.h));
    let plan = plan_ladder(&req.operator, &req.observable, &req.ladder, req.h, req.resolution)?;
    let values = rescaled_observables(
        &req.noise,
        req.operator,
        &req.observable,
        &plan,
        &layered,
        req.noise.stream,
        req.ensemble,
    )?;
    let n = req.ensemble as f64;
    let ladder: Vec<LadderPoint> = req
        .ladder
        .iter()
        .zip(&values)
        .map(|(a, v)| LadderPoint {
            a: *a,
            distance: v.iter().filter(|x| x.abs() > req.delta).count() as f64 / n,
            n: v.len(),
            ks_p_value: None,
            ecf_distance: None,
        })
        .collect();
    let probs: Vec<f64> = ladder.iter().map(|p| p.distance).collect();
    let non_increasing = probs.windows(2).all(|w| {
        let slack = 3.0 * (w[0] * (1.0 - w[0]) / n).sqrt() + 1.0 / n;
        w[1] <= w[0] + slack
    });
    let verdict = if non_increasing && *probs.last().unwrap() < DEGENERATE_THRESHOLD {
        Verdict::DegenerateToZero
    } else {
        Verdict::NonConverging
    };
    Ok(ScalingReport {
        schema: REPORT_SCHEMA.into(),
        noise: exponent.clone(),
        operator: req.operator,
        direction: Direction::Fine,
        h: req.h,
        slope_estimate: None,
        ladder,
        verdict,
        seed: req.noise.seed,
        observable: req.observable,
        limit_index: None,
        limit_constant: None,
        threshold: DEGENERATE_THRESHOLD,
        note: Some(format!("exceedance probability P(|obs| > {})", req.delta)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub h: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub t_grid: Vec<f64>,
    pub iqr: Vec<f64>,
}

/// Slope of log interquartile range of `s(t)` against log `t`.
pub fn estimate_hurst(ensemble: &[PathGrid], t_grid: &[f64]) -> Result<HurstEstimate> {
    if ensemble.len() < 1000 {
        return Err(Error::param(
            "ensemble",
            format!("need at least 1000 paths, got {}", ensemble.len()),
        ));
    }
    if t_grid.len() < 8 {
        return Err(Error::param(
            "tGrid",
            format!("need at least 8 points, got {}", t_grid.len()),
        ));
    }
    if t_grid.iter().any(|&t| t.is_nan() || t <= 0.0) {
        return Err(Error::param("tGrid", "times must be positive"));
    }
    if ensemble.iter().any(|p| p.grid.dim != 1) {
        return Err(Error::Shape("Hurst estimation needs 1-D paths".into()));
    }
    let mut iqr = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let values = ensemble
            .iter()
            .map(|p| {
                p.value_at(t)
                    .ok_or_else(|| Error::param("tGrid", format!("t = {t} is not on the path grid")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let spread = interquartile_range(&values);
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(Error::Estimation(format!("degenerate spread {spread} at t = {t}")));
        }
        iqr.push(spread);
    }
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = iqr.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::Estimation("tGrid has no spread".into()))?;
    Ok(HurstEstimate {
        h: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        t_grid: t_grid.to_vec(),
        iqr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::sample_increment;

    #[test]
    fn ecf_of_zeros_is_one() {
        let r = empirical_cf(&[0.0; 17], &default_xi_grid()).unwrap();
        assert!(r.ecf.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
        assert!(empirical_cf(&[], &[0.0]).is_err());
        assert!(empirical_cf(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ecf_standard_normal() {
        let noise = NoiseSpec::new(LevyExponent::gaussian(1.0).unwrap(), 11);
        let xs = sample_increment(&noise, 1.0, 100_000).unwrap();
        let r = empirical_cf(&xs, &[0.0, 1.0]).unwrap();
        assert!((r.ecf[1].re - (-0.5f64).exp()).abs() < 0.01);
    }

    #[test]
    fn ecf_cauchy() {
        let noise = NoiseSpec::new(LevyExponent::sas(1.0, 1.0).unwrap(), 12);
        let xs = sample_increment(&noise, 1.0, 100_000).unwrap();
        let mut r = empirical_cf(&xs, &[0.0, 2.0]).unwrap();
        assert!((r.ecf[1].re - (-2.0f64).exp()).abs() < 0.01);
        let d = r.compare(&noise.exponent, 1.0).unwrap();
        assert!(d < 0.01 && r.sup_distance_to_target == Some(d));
    }

    #[test]
    fn ladder_must_be_monotone() {
        assert!(check_ladder(&[1.0, 0.1, 0.01], Direction::Coarse).is_ok());
        assert!(check_ladder(&[0.1, 1.0], Direction::Coarse).is_err());
        assert!(check_ladder(&[10.0, 10.0], Direction::Fine).is_err());
        assert!(check_ladder(&[], Direction::Fine).is_err());
    }

    #[test]
    fn ladder_plan_reaches_observable() {
        let plan = plan_ladder(
            &Operator::Levy,
            &Observable::Point { t: 1.0 },
            &[1.0, 0.1, 0.01],
            0.5,
            1,
        )
        .unwrap();
        assert_eq!(plan.grid.n, 101);
        assert_eq!(plan.grid.step, 1.0);
        assert_eq!(plan.rungs[2].1, 1);
        let fine = plan_ladder(&Operator::Levy, &Observable::Point { t: 2.0 }, &[4.0, 6.0], 0.5, 1).unwrap();
        assert_eq!(fine.grid.n, 4);
        assert!((fine.grid.step - 2.0 / 12.0).abs() < 1e-15);
        assert_eq!(fine.rungs.iter().map(|r| r.1).collect::<Vec<_>>(), vec![3, 2]);
    }

    #[test]
    fn levy_point_norm_is_time() {
        let n = discrete_inverse_norm(&Operator::Levy, &Observable::Point { t: 3.0 }, 1.3, 100).unwrap();
        assert!((n - 3.0).abs() < 1e-12);
        let s = discrete_inverse_norm(&Operator::Sheet, &Observable::Point { t: 2.0 }, 2.0, 10).unwrap();
        assert!((s - 4.0).abs() < 1e-12);
    }

    #[test]
    fn misuse_errors() {
        let gauss = NoiseSpec::new(LevyExponent::gaussian(1.0).unwrap(), 1);
        let req = DegenerationRequest::new(gauss, Operator::Levy, 0.0, vec![10.0, 100.0]);
        assert!(matches!(verify_degeneration(&req), Err(Error::Misuse(_))));

        let laplace = NoiseSpec::new(LevyExponent::generalized_laplace(1.0).unwrap(), 1);
        let req = ScalingRequest::new(laplace, Operator::Levy, Direction::Fine, vec![10.0, 100.0]);
        assert!(matches!(verify_scaling_limit(&req), Err(Error::Misuse(_))));
    }

    #[test]
    fn hurst_preconditions() {
        let noise = NoiseSpec::new(LevyExponent::gaussian(1.0).unwrap(), 1);
        let synth = Synthesizer::new(&noise, Operator::Levy, GridSpec::line(0.01, 101).unwrap()).unwrap();
        let few = synth.ensemble(0, 10);
        let t: Vec<f64> = (1..=8).map(|k| k as f64 * 0.1).collect();
        assert!(estimate_hurst(&few, &t).is_err());
        let many = synth.ensemble(0, 1000);
        assert!(estimate_hurst(&many, &t[..5]).is_err());
        assert!(estimate_hurst(&many, &[0.005, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]).is_err());
    }
}
