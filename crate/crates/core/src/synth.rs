//! Discrete sample paths of Lévy processes, Lévy sheets and fractional
//! Lévy processes, and the grid-native scaling operator `a^H s(·/a)`.
//!
//! Each path is the image of i.i.d. cell increments under a discrete
//! zero-boundary inverse of the whitening operator:
//!
//! * `D`: cumulative sum, `s[k] = Σ_{j<k} w_j`;
//! * `D₁D₂`: double cumulative sum over cells of area `Δ²`;
//! * `D^γ`: Riemann-Liouville moving average with left-endpoint kernel
//!   weights `h_i = ((i+1)Δ)^{γ-1} / Γ(γ)`, `s[k] = Σ_{j<k} h_{k-1-j} w_j`.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::sampler::{IncrementSampler, LayeredSamplerConfig, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub step: f64,
    /// Points along the first axis.
    pub n: usize,
    /// Points along the second axis; 1 for `dim == 1`.
    pub m: usize,
}

impl GridSpec {
    pub fn line(step: f64, n: usize) -> Result<Self> {
        let g = GridSpec { dim: 1, step, n, m: 1 };
        g.validate()?;
        Ok(g)
    }

    pub fn plane(step: f64, n: usize, m: usize) -> Result<Self> {
        let g = GridSpec { dim: 2, step, n, m };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::param(
                "step",
                format!("must be finite and > 0, got {}", self.step),
            ));
        }
        match self.dim {
            1 if self.n >= 2 && self.m == 1 => Ok(()),
            2 if self.n >= 2 && self.m >= 2 => Ok(()),
            1 | 2 => Err(Error::param(
                "extent",
                format!("need at least 2 points per axis, got {}x{}", self.n, self.m),
            )),
            d => Err(Error::param("dim", format!("must be 1 or 2, got {d}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.n * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of index `k` along an axis.
    pub fn coord(&self, k: usize) -> f64 {
        k as f64 * self.step
    }
}

/// Whitening operator `L` in `L s = w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Operator {
    /// `D` in dimension 1.
    Levy,
    /// `D₁D₂` in dimension 2.
    Sheet,
    /// `D^γ` in dimension 1.
    Fractional { gamma: f64 },
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Levy | Operator::Fractional { .. } => 1,
            Operator::Sheet => 2,
        }
    }

    /// Homogeneity order γ of the operator.
    pub fn order(&self) -> f64 {
        match *self {
            Operator::Levy => 1.0,
            Operator::Sheet => 2.0,
            Operator::Fractional { gamma } => gamma,
        }
    }

    /// Self-similarity order `γ + d(1/β - 1)` of the SαS-driven solution.
    pub fn hurst(&self, beta: f64) -> f64 {
        self.order() + self.dim() as f64 * (1.0 / beta - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if let Operator::Fractional { gamma } = *self {
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Error::Domain(format!("fractional order must be > 0, got {gamma}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub noise: NoiseSpec,
    pub operator: Operator,
}

/// A sampled realization on a regular grid. Values are row-major with the
/// first axis outermost: `values[i * m + j]` sits at `(iΔ, jΔ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub meta: PathMeta,
}

impl PathGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.m + j]
    }

    /// Value at time `t` (dimension 1), if `t` lies on the grid.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let k = t / self.grid.step;
        let idx = k.round();
        if (k - idx).abs() > 1e-9 * k.abs().max(1.0) || idx < 0.0 || idx as usize >= self.grid.n {
            return None;
        }
        Some(self.values[idx as usize * self.grid.m])
    }

    /// True when the zero-boundary condition holds exactly.
    pub fn boundary_is_zero(&self) -> bool {
        match self.grid.dim {
            1 => self.values[0] == 0.0,
            _ => (0..self.grid.m).all(|j| self.get(0, j) == 0.0) && (0..self.grid.n).all(|i| self.get(i, 0) == 0.0),
        }
    }
}

/// Reusable path builder: one compiled increment sampler plus the discrete
/// inverse of the operator.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    noise: NoiseSpec,
    operator: Operator,
    grid: GridSpec,
    sampler: IncrementSampler,
    weights: Option<Arc<Vec<f64>>>,
}

// Beyond this many points the fractional moving average switches to FFT
// convolution.
const DIRECT_CONVOLUTION_LIMIT: usize = 2048;

impl Synthesizer {
    pub fn new(noise: &NoiseSpec, operator: Operator, grid: GridSpec) -> Result<Self> {
        Self::with_config(noise, operator, grid, &LayeredSamplerConfig::default())
    }

    pub fn with_config(
        noise: &NoiseSpec,
        operator: Operator,
        grid: GridSpec,
        layered: &LayeredSamplerConfig,
    ) -> Result<Self> {
        operator.validate()?;
        grid.validate()?;
        if grid.dim != operator.dim() {
            return Err(Error::Shape(format!(
                "operator {:?} needs a {}-D grid, got {}-D",
                operator,
                operator.dim(),
                grid.dim
            )));
        }
        let vol = grid.step.powi(grid.dim as i32);
        let sampler = IncrementSampler::with_config(&noise.exponent, vol, layered)?;
        let weights = match operator {
            Operator::Fractional { gamma } if gamma != 1.0 => {
                Some(Arc::new(fractional_weights(gamma, grid.step, grid.n - 1)))
            }
            _ => None,
        };
        Ok(Synthesizer {
            noise: noise.clone(),
            operator,
            grid,
            sampler,
            weights,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    /// Path driven by stream `stream` of the noise seed.
    pub fn path(&self, stream: u64) -> PathGrid {
        let mut rng = stream_rng(self.noise.seed, stream);
        PathGrid {
            grid: self.grid,
            values: self.values(&mut rng),
            meta: PathMeta {
                noise: self.noise.with_stream(stream),
                operator: self.operator,
            },
        }
    }

    fn values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self.grid.dim {
            1 => {
                let mut w = vec![0.0; self.grid.n - 1];
                self.sampler.fill(rng, &mut w);
                match &self.weights {
                    None => cumulative(&w),
                    Some(h) => moving_average(h, &w),
                }
            }
            _ => {
                let (n, m) = (self.grid.n, self.grid.m);
                let mut out = vec![0.0; n * m];
                for i in 1..n {
                    let mut row_sum = 0.0;
                    for j in 1..m {
                        row_sum += self.sampler.sample(rng);
                        out[i * m + j] = out[(i - 1) * m + j] + row_sum;
                    }
                }
                out
            }
        }
    }

    /// Applies `f` to the paths of streams `first..first + count` in
    /// parallel; results come back in stream order.
    pub fn map_ensemble<T, F>(&self, first: u64, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&PathGrid) -> T + Sync + Send,
    {
        (0..count as u64)
            .into_par_iter()
            .map(|i| f(&self.path(first + i)))
            .collect()
    }

    pub fn ensemble(&self, first: u64, count: usize) -> Vec<PathGrid> {
        self.map_ensemble(first, count, |p| p.clone())
    }
}

fn cumulative(w: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(w.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for &x in w {
        acc += x;
        out.push(acc);
    }
    out
}

/// Kernel weights `h_i = Δ^{γ-1}(i+1)^{γ-1}/Γ(γ)`, `i = 0..len`.
pub fn fractional_weights(gamma: f64, step: f64, len: usize) -> Vec<f64> {
    let c = step.powf(gamma - 1.0) / libm::tgamma(gamma);
    (0..len).map(|i| c * ((i + 1) as f64).powf(gamma - 1.0)).collect()
}

fn moving_average(h: &[f64], w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut out = vec![0.0; n + 1];
    if n <= DIRECT_CONVOLUTION_LIMIT {
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 0..k {
                acc += h[k - 1 - j] * w[j];
            }
            out[k] = acc;
        }
    } else {
        let conv = fft_convolve(&h[..n], w);
        out[1..].copy_from_slice(&conv[..n]);
    }
    out
}

fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = (a.len() + b.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fa.resize(len, Complex::new(0.0, 0.0));
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fb.resize(len, Complex::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / len as f64;
    fa.iter().map(|c| c.re * scale).collect()
}

fn check_operator(grid: &GridSpec, dim: usize, what: &str) -> Result<()> {
    if grid.dim != dim {
        return Err(Error::Shape(format!("{what} needs a {dim}-D grid, got {}-D", grid.dim)));
    }
    Ok(())
}

/// `s[k] = Σ_{j<k} w_j` with increments of volume Δ; `s[0] = 0`.
pub fn synth_levy_process(noise: &NoiseSpec, grid: &GridSpec) -> Result<PathGrid> {
    check_operator(grid, 1, "a Lévy process")?;
    Ok(Synthesizer::new(noise, Operator::Levy, *grid)?.path(noise.stream))
}

/// `s[i][j] = Σ_{p<i, q<j} w_{p,q}` with cells of area Δ²; zero on both axes.
pub fn synth_levy_sheet(noise: &NoiseSpec, grid: &GridSpec) -> Result<PathGrid> {
    check_operator(grid, 2, "a Lévy sheet")?;
    Ok(Synthesizer::new(noise, Operator::Sheet, *grid)?.path(noise.stream))
}

/// Riemann-Liouville moving average of order γ; γ = 1 is the Lévy process.
pub fn synth_fractional_process(noise: &NoiseSpec, gamma: f64, grid: &GridSpec) -> Result<PathGrid> {
    check_operator(grid, 1, "a fractional process")?;
    Ok(Synthesizer::new(noise, Operator::Fractional { gamma }, *grid)?.path(noise.stream))
}

/// Integer scale ratio representable on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleRatio {
    /// `a = m ≥ 1`: zoom in.
    ZoomIn(usize),
    /// `a = 1/m ≤ 1`: zoom out.
    ZoomOut(usize),
}

impl ScaleRatio {
    /// Parses `a` as `m` or `1/m`, tolerating rounding in the reciprocal.
    pub fn from_factor(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::param("a", format!("must be finite and > 0, got {a}")));
        }
        let (m, zoom_in) = if a >= 1.0 { (a, true) } else { (1.0 / a, false) };
        let r = m.round();
        if (m - r).abs() > 1e-9 * r {
            return Err(Error::param("a", format!("{a} is neither an integer m nor 1/m")));
        }
        let m = r as usize;
        Ok(if zoom_in {
            ScaleRatio::ZoomIn(m)
        } else {
            ScaleRatio::ZoomOut(m)
        })
    }

    pub fn factor(&self) -> f64 {
        match *self {
            ScaleRatio::ZoomIn(m) => m as f64,
            ScaleRatio::ZoomOut(m) => 1.0 / m as f64,
        }
    }

    pub fn m(&self) -> usize {
        match *self {
            ScaleRatio::ZoomIn(m) | ScaleRatio::ZoomOut(m) => m,
        }
    }
}

/// `a^H s(·/a)` with `a` an integer or the reciprocal of one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleSpec {
    pub ratio: ScaleRatio,
    pub h: f64,
}

impl RescaleSpec {
    pub fn new(a: f64, h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::param("H", format!("must be finite, got {h}")));
        }
        Ok(RescaleSpec {
            ratio: ScaleRatio::from_factor(a)?,
            h,
        })
    }

    pub fn a(&self) -> f64 {
        self.ratio.factor()
    }
}

/// Rescales with the default window: `⌊(n-1)/m⌋ + 1` points per axis.
///
/// Zooming in (`a = m`) views the first points of the source and relabels
/// the step as `Δ·m`; zooming out (`a = 1/m`) keeps every m-th point at
/// step Δ. In both cases output time `t` reads the source at `t/a`.
pub fn rescale(path: &PathGrid, spec: &RescaleSpec) -> Result<PathGrid> {
    let m = spec.ratio.m().max(1);
    let len = (path.grid.n - 1) / m + 1;
    let len2 = if path.grid.dim == 2 {
        (path.grid.m - 1) / m + 1
    } else {
        1
    };
    rescale_window(path, spec, len, len2)
}

/// Rescales to an explicit output extent `n_out × m_out`.
pub fn rescale_window(path: &PathGrid, spec: &RescaleSpec, n_out: usize, m_out: usize) -> Result<PathGrid> {
    let g = path.grid;
    let m = spec.ratio.m();
    if m == 0 {
        return Err(Error::param("a", "scale ratio must be positive"));
    }
    let m_out = if g.dim == 1 { 1 } else { m_out };
    if n_out < 2 || (g.dim == 2 && m_out < 2) {
        return Err(Error::Extent {
            required: match spec.ratio {
                ScaleRatio::ZoomIn(_) => 2,
                ScaleRatio::ZoomOut(m) => m + 1,
            },
            available: g.n.min(if g.dim == 2 { g.m } else { g.n }),
        });
    }
    let (stride, step) = match spec.ratio {
        ScaleRatio::ZoomIn(m) => (1, g.step * m as f64),
        ScaleRatio::ZoomOut(m) => (m, g.step),
    };
    let need = |len: usize| (len - 1) * stride + 1;
    if need(n_out) > g.n {
        return Err(Error::Extent {
            required: need(n_out),
            available: g.n,
        });
    }
    if g.dim == 2 && need(m_out) > g.m {
        return Err(Error::Extent {
            required: need(m_out),
            available: g.m,
        });
    }
    let factor = spec.a().powf(spec.h);
    let mut values = Vec::with_capacity(n_out * m_out);
    for i in 0..n_out {
        for j in 0..m_out {
            values.push(factor * path.values[i * stride * g.m + j * stride]);
        }
    }
    Ok(PathGrid {
        grid: GridSpec {
            dim: g.dim,
            step,
            n: n_out,
            m: m_out,
        },
        values,
        meta: path.meta.clone(),
    })
}

/// Riemann sum `Δ^dim Σ s·φ` approximating `⟨s, φ⟩`.
pub fn pair_test_function(path: &PathGrid, phi: &[f64]) -> Result<f64> {
    if phi.len() != path.values.len() {
        return Err(Error::Shape(format!(
            "test function has {} samples, path has {}",
            phi.len(),
            path.values.len()
        )));
    }
    let cell = path.grid.step.powi(path.grid.dim as i32);
    Ok(cell * path.values.iter().zip(phi).map(|(s, f)| s * f).sum::<f64>())
}
