//! Symmetric Lévy exponents and their small/large-frequency indices.
//!
//! Every supported exponent is real, even and non-positive. Closed forms are
//! used wherever they exist; the layered stable family is evaluated from its
//! Lévy-Khintchine integral
//!
//! ```text
//! Ψ(ξ) = -∫ (1 - cos ξt) ν(dt),   ν(dt) = |t|^{-α-1} dt on |t| ≤ 1, |t|^{-β-1} dt outside
//! ```
//!
//! after the substitution `x = |ξ| t`, which turns both layers into
//! integrals of `(1 - cos x) x^{-p-1}` over `[0, |ξ|]` and `[|ξ|, ∞)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, Tolerance};
use crate::stats::linear_fit;

/// Law of the jumps of a compound Poisson noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum JumpLaw {
    Gaussian { variance: f64 },
    Cauchy { scale: f64 },
    Sas { alpha: f64, scale: f64 },
}

impl JumpLaw {
    /// Characteristic function of a single jump.
    pub fn cf(&self, xi: f64) -> f64 {
        match *self {
            JumpLaw::Gaussian { variance } => (-0.5 * variance * xi * xi).exp(),
            JumpLaw::Cauchy { scale } => (-scale * xi.abs()).exp(),
            JumpLaw::Sas { alpha, scale } => (-scale * xi.abs().powf(alpha)).exp(),
        }
    }

    /// `cf(ξ) - 1`, accurate for small `|ξ|`.
    fn cf_minus_one(&self, xi: f64) -> f64 {
        match *self {
            JumpLaw::Gaussian { variance } => (-0.5 * variance * xi * xi).exp_m1(),
            JumpLaw::Cauchy { scale } => (-scale * xi.abs()).exp_m1(),
            JumpLaw::Sas { alpha, scale } => (-scale * xi.abs().powf(alpha)).exp_m1(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::Gaussian { variance } => positive("jump.variance", variance),
            JumpLaw::Cauchy { scale } => positive("jump.scale", scale),
            JumpLaw::Sas { alpha, scale } => {
                in_range("jump.alpha", alpha, 0.0, 2.0, false, true)?;
                positive("jump.scale", scale)
            }
        }
    }

    /// Exponent of `|ξ|` in `1 - cf(ξ)` near the origin.
    fn small_xi_power(&self) -> f64 {
        match *self {
            JumpLaw::Gaussian { .. } => 2.0,
            JumpLaw::Cauchy { .. } => 1.0,
            JumpLaw::Sas { alpha, .. } => alpha,
        }
    }

    fn small_xi_constant(&self) -> f64 {
        match *self {
            JumpLaw::Gaussian { variance } => 0.5 * variance,
            JumpLaw::Cauchy { scale } => scale,
            JumpLaw::Sas { scale, .. } => scale,
        }
    }
}

/// Noise family tag plus parameters. Build a validated [`LevyExponent`] from
/// it with [`LevyExponent::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Gaussian {
        variance: f64,
    },
    /// `Ψ(ξ) = -scale·|ξ|^α`.
    Sas {
        alpha: f64,
        scale: f64,
    },
    Cauchy {
        scale: f64,
    },
    GeneralizedLaplace {
        c: f64,
    },
    CompoundPoisson {
        rate: f64,
        jump: JumpLaw,
    },
    LayeredStable {
        alpha: f64,
        beta: f64,
    },
    Sum {
        components: Vec<LevyExponent>,
    },
}

/// A validated symmetric Lévy exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct LevyExponent {
    family: Family,
}

impl TryFrom<Family> for LevyExponent {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        LevyExponent::new(family)
    }
}

impl From<LevyExponent> for Family {
    fn from(e: LevyExponent) -> Family {
        e.family
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

fn in_range(name: &'static str, v: f64, lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<()> {
    let lo_ok = if lo_closed { v >= lo } else { v > lo };
    let hi_ok = if hi_closed { v <= hi } else { v < hi };
    if v.is_finite() && lo_ok && hi_ok {
        Ok(())
    } else {
        let l = if lo_closed { '[' } else { '(' };
        let h = if hi_closed { ']' } else { ')' };
        Err(Error::param(name, format!("must lie in {l}{lo}, {hi}{h}, got {v}")))
    }
}

/// Which end of the frequency axis an index or constant refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexEnd {
    /// `ξ → 0`, governing coarse scales (Pruitt index β₀).
    Zero,
    /// `ξ → ∞`, governing fine scales (Blumenthal-Getoor index β∞).
    Infinity,
}

/// The pair (β₀, β∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexPair {
    pub beta0: f64,
    pub beta_inf: f64,
}

impl IndexPair {
    pub fn new(beta0: f64, beta_inf: f64) -> Result<Self> {
        in_range("beta0", beta0, 0.0, 2.0, false, true)?;
        in_range("betaInf", beta_inf, 0.0, 2.0, true, true)?;
        Ok(IndexPair { beta0, beta_inf })
    }

    pub fn at(&self, end: IndexEnd) -> f64 {
        match end {
            IndexEnd::Zero => self.beta0,
            IndexEnd::Infinity => self.beta_inf,
        }
    }
}

/// Grid certificate that `|Ψ(ξ)| ≤ C|ξ|^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityCertificate {
    pub p: f64,
    pub admissible: bool,
    /// Largest `|Ψ(ξ)|/|ξ|^p` seen on the grid.
    pub constant: f64,
    /// Grid end where the ratio keeps growing, if any.
    pub witness: Option<f64>,
    pub grid: Vec<f64>,
}

impl LevyExponent {
    pub fn new(family: Family) -> Result<Self> {
        match &family {
            Family::Gaussian { variance } => positive("variance", *variance)?,
            Family::Sas { alpha, scale } => {
                in_range("alpha", *alpha, 0.0, 2.0, false, true)?;
                positive("scale", *scale)?;
            }
            Family::Cauchy { scale } => positive("scale", *scale)?,
            Family::GeneralizedLaplace { c } => positive("c", *c)?,
            Family::CompoundPoisson { rate, jump } => {
                positive("rate", *rate)?;
                jump.validate()?;
            }
            Family::LayeredStable { alpha, beta } => {
                in_range("alpha", *alpha, 0.0, 2.0, false, false)?;
                in_range("beta", *beta, 0.0, 2.0, false, false)?;
            }
            Family::Sum { components } => {
                if components.is_empty() {
                    return Err(Error::param("components", "a sum needs at least one component"));
                }
            }
        }
        Ok(LevyExponent { family })
    }

    pub fn gaussian(variance: f64) -> Result<Self> {
        Self::new(Family::Gaussian { variance })
    }

    pub fn sas(alpha: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Sas { alpha, scale })
    }

    pub fn cauchy(scale: f64) -> Result<Self> {
        Self::new(Family::Cauchy { scale })
    }

    pub fn generalized_laplace(c: f64) -> Result<Self> {
        Self::new(Family::GeneralizedLaplace { c })
    }

    pub fn compound_poisson(rate: f64, jump: JumpLaw) -> Result<Self> {
        Self::new(Family::CompoundPoisson { rate, jump })
    }

    pub fn layered_stable(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::LayeredStable { alpha, beta })
    }

    pub fn sum(components: Vec<LevyExponent>) -> Result<Self> {
        Self::new(Family::Sum { components })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Short lowercase family name, as used on the command line.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Gaussian { .. } => "gaussian",
            Family::Sas { .. } => "sas",
            Family::Cauchy { .. } => "cauchy",
            Family::GeneralizedLaplace { .. } => "generalized-laplace",
            Family::CompoundPoisson { .. } => "compound-poisson",
            Family::LayeredStable { .. } => "layered-stable",
            Family::Sum { .. } => "sum",
        }
    }

    /// Evaluates Ψ(ξ).
    pub fn psi(&self, xi: f64) -> Result<f64> {
        if !xi.is_finite() {
            return Err(Error::param("xi", format!("must be finite, got {xi}")));
        }
        if xi == 0.0 {
            return Ok(0.0);
        }
        let v = match &self.family {
            Family::Gaussian { variance } => -0.5 * variance * xi * xi,
            Family::Sas { alpha, scale } => -scale * xi.abs().powf(*alpha),
            Family::Cauchy { scale } => -scale * xi.abs(),
            Family::GeneralizedLaplace { c } => -c * (xi * xi).ln_1p(),
            Family::CompoundPoisson { rate, jump } => rate * jump.cf_minus_one(xi),
            Family::LayeredStable { alpha, beta } => layered_psi(*alpha, *beta, xi)?,
            Family::Sum { components } => {
                let mut acc = 0.0;
                for c in components {
                    acc += c.psi(xi)?;
                }
                acc
            }
        };
        Ok(v)
    }

    /// Tabulated (β₀, β∞).
    ///
    /// Sums take the smallest β₀ and the largest β∞ of their components.
    /// The layered stable family has β₀ = β (large jumps) and β∞ = α
    /// (small jumps).
    pub fn theoretical_indices(&self) -> IndexPair {
        let (b0, binf) = match &self.family {
            Family::Gaussian { .. } => (2.0, 2.0),
            Family::Sas { alpha, .. } => (*alpha, *alpha),
            Family::Cauchy { .. } => (1.0, 1.0),
            Family::GeneralizedLaplace { .. } => (2.0, 0.0),
            Family::CompoundPoisson { jump, .. } => (jump.small_xi_power(), 0.0),
            Family::LayeredStable { alpha, beta } => (*beta, *alpha),
            Family::Sum { components } => components
                .iter()
                .map(|c| c.theoretical_indices())
                .fold((f64::INFINITY, 0.0f64), |(b0, bi), p| {
                    (b0.min(p.beta0), bi.max(p.beta_inf))
                }),
        };
        IndexPair {
            beta0: b0,
            beta_inf: binf,
        }
    }

    /// Constant `C` in `Ψ(ξ) ~ -C|ξ|^β` at the given end, with β the
    /// matching index. `None` when that index is 0 (no power-law behaviour).
    pub fn asymptotic_constant(&self, end: IndexEnd) -> Result<Option<f64>> {
        let c = match (&self.family, end) {
            (Family::Gaussian { variance }, _) => Some(0.5 * variance),
            (Family::Sas { scale, .. }, _) => Some(*scale),
            (Family::Cauchy { scale }, _) => Some(*scale),
            (Family::GeneralizedLaplace { c }, IndexEnd::Zero) => Some(*c),
            (Family::CompoundPoisson { rate, jump }, IndexEnd::Zero) => Some(rate * jump.small_xi_constant()),
            (Family::GeneralizedLaplace { .. }, IndexEnd::Infinity)
            | (Family::CompoundPoisson { .. }, IndexEnd::Infinity) => None,
            (Family::LayeredStable { alpha, beta }, _) => {
                let (c0, cinf) = layered_asymptotic_constants(*alpha, *beta)?;
                Some(match end {
                    IndexEnd::Zero => c0,
                    IndexEnd::Infinity => cinf,
                })
            }
            (Family::Sum { components }, _) => {
                let target = self.theoretical_indices().at(end);
                if target == 0.0 {
                    None
                } else {
                    let mut acc = 0.0;
                    for comp in components {
                        if comp.theoretical_indices().at(end) == target {
                            acc += comp.asymptotic_constant(end)?.unwrap_or(0.0);
                        }
                    }
                    Some(acc)
                }
            }
        };
        Ok(c)
    }

    /// Fits the index at one end by least squares of `log|Ψ|` on `log ξ`.
    pub fn fit_index(&self, end: IndexEnd, grid: &[f64]) -> Result<IndexFit> {
        if grid.len() < 8 {
            return Err(Error::param(
                "grid",
                format!("need at least 8 points, got {}", grid.len()),
            ));
        }
        let ok = match end {
            IndexEnd::Zero => grid.iter().all(|&x| x > 0.0 && x <= 1e-2),
            IndexEnd::Infinity => grid.iter().all(|&x| x >= 1e2 && x.is_finite()),
        };
        if !ok {
            let msg = match end {
                IndexEnd::Zero => "zero-end grid must lie in (0, 1e-2]",
                IndexEnd::Infinity => "infinity-end grid must lie in [1e2, ∞)",
            };
            return Err(Error::param("grid", msg));
        }
        let mut xs = Vec::with_capacity(grid.len());
        let mut ys = Vec::with_capacity(grid.len());
        for &xi in grid {
            let psi = self.psi(xi)?;
            if psi == 0.0 || !psi.is_finite() {
                return Err(Error::DegenerateFit(format!("Ψ({xi}) = {psi}")));
            }
            xs.push(xi.ln());
            ys.push(psi.abs().ln());
        }
        let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::DegenerateFit("grid has no spread".into()))?;
        Ok(IndexFit {
            end,
            slope: fit.slope.clamp(0.0, 2.0),
            raw_slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            grid: grid.to_vec(),
        })
    }

    /// Fitted index at one end, clamped to `[0, 2]`.
    pub fn estimate_index(&self, end: IndexEnd, grid: &[f64]) -> Result<f64> {
        self.fit_index(end, grid).map(|f| f.slope)
    }

    /// Checks `|Ψ(ξ)| ≤ C|ξ|^p` on a finite grid.
    ///
    /// Only a necessary condition: the ratio is declared unbounded when its
    /// log-log slope over the outermost grid points keeps pointing outward
    /// (increasing toward ∞, or increasing toward 0).
    pub fn is_p_admissible(&self, p: f64, grid: &[f64]) -> Result<AdmissibilityCertificate> {
        in_range("p", p, 0.0, 2.0, false, true)?;
        let mut sorted: Vec<f64> = grid.iter().copied().filter(|x| *x > 0.0).collect();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        if sorted.len() < 8 || sorted[0] > 1e-4 || sorted[sorted.len() - 1] < 1e4 {
            return Err(Error::param(
                "grid",
                "must span at least [1e-4, 1e4] with 8 or more points",
            ));
        }
        let mut ratios = Vec::with_capacity(sorted.len());
        for &xi in &sorted {
            ratios.push(self.psi(xi)?.abs() / xi.powf(p));
        }
        let constant = ratios.iter().copied().fold(0.0, f64::max);

        const EDGE: usize = 4;
        const SLOPE_TOL: f64 = 1e-2;
        let edge_slope = |range: std::ops::Range<usize>| -> f64 {
            let xs: Vec<f64> = sorted[range.clone()].iter().map(|x| x.ln()).collect();
            let ys: Vec<f64> = ratios[range].iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).collect();
            linear_fit(&xs, &ys).map_or(0.0, |f| f.slope)
        };
        let n = sorted.len();
        let low = edge_slope(0..EDGE);
        let high = edge_slope(n - EDGE..n);
        let witness = if high > SLOPE_TOL {
            Some(sorted[n - 1])
        } else if low < -SLOPE_TOL {
            Some(sorted[0])
        } else {
            None
        };
        Ok(AdmissibilityCertificate {
            p,
            admissible: witness.is_none() && constant.is_finite(),
            constant,
            witness,
            grid: sorted,
        })
    }
}

/// Result of a log-log slope fit of `|Ψ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexFit {
    pub end: IndexEnd,
    /// Slope clamped to `[0, 2]`.
    pub slope: f64,
    pub raw_slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub grid: Vec<f64>,
}

/// `n` log-spaced points between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default fitting grid: 16 points on `[1e-6, 1e-3]` or `[1e2, 1e6]`.
pub fn default_index_grid(end: IndexEnd) -> Vec<f64> {
    match end {
        IndexEnd::Zero => log_grid(1e-6, 1e-3, 16),
        IndexEnd::Infinity => log_grid(1e2, 1e6, 16),
    }
}

/// Default admissibility grid: 81 points on `[1e-4, 1e4]`.
pub fn default_admissibility_grid() -> Vec<f64> {
    log_grid(1e-4, 1e4, 81)
}

/// `(C₀, C∞) = (∫(1-cos x)/|x|^{β+1} dx, ∫(1-cos x)/|x|^{α+1} dx)` over ℝ.
pub fn layered_asymptotic_constants(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    in_range("alpha", alpha, 0.0, 2.0, false, false)?;
    in_range("beta", beta, 0.0, 2.0, false, false)?;
    let cinf = 2.0 * cos_moment_to_infinity(alpha, 0.0)?;
    let c0 = if beta == alpha {
        cinf
    } else {
        2.0 * cos_moment_to_infinity(beta, 0.0)?
    };
    Ok((c0, cinf))
}

/// Bound `ξ²/2·∫_{|t|≤1} t² ν(dt) + 2∫_{|t|>1} ν(dt)` on `|Ψ_{α,β}(ξ)|`.
pub fn layered_psi_bound(alpha: f64, beta: f64, xi: f64) -> f64 {
    xi * xi / (2.0 - alpha) + 4.0 / beta
}

// Above this |ξ| the inner layer is computed as a complement of the full
// integral instead of panel by panel.
const DIRECT_LIMIT: f64 = 400.0;
// Number of π-wide panels integrated before switching to the asymptotic tail.
const TAIL_PANELS: f64 = 128.0;

fn layered_psi(alpha: f64, beta: f64, xi: f64) -> Result<f64> {
    let x = xi.abs();
    let inner = if x <= DIRECT_LIMIT {
        cos_moment(alpha, 0.0, x)?
    } else {
        cos_moment_to_infinity(alpha, 0.0)? - cos_moment_to_infinity(alpha, x)?
    };
    let outer = cos_moment_to_infinity(beta, x)?;
    Ok(-2.0 * (x.powf(alpha) * inner + x.powf(beta) * outer))
}

/// `∫_a^b (1 - cos x) x^{-p-1} dx` for `0 ≤ a ≤ b < ∞`.
fn cos_moment(p: f64, a: f64, b: f64) -> Result<f64> {
    let mut acc = 0.0;
    if a < 1.0 {
        acc += cos_moment_series(p, a, b.min(1.0));
    }
    let lo = a.max(1.0);
    if b > lo {
        acc += cos_moment_quadrature(p, lo, b)?;
    }
    Ok(acc)
}

/// `∫_a^∞ (1 - cos x) x^{-p-1} dx`.
fn cos_moment_to_infinity(p: f64, a: f64) -> Result<f64> {
    let lo = a.max(1.0);
    let cutoff = ((lo / PI).ceil() + TAIL_PANELS) * PI;
    let mut acc = cos_moment(p, a, cutoff)?;

    // ∫_L^∞ x^{-p-1} = L^{-p}/p exactly; the cosine part by its asymptotic
    // expansion, obtained by repeated integration by parts.
    let q = p + 1.0;
    let (s, c) = cutoff.sin_cos();
    let l = cutoff;
    let cos_tail = -s * l.powf(-q) + q * c * l.powf(-q - 1.0) + q * (q + 1.0) * s * l.powf(-q - 2.0)
        - q * (q + 1.0) * (q + 2.0) * c * l.powf(-q - 3.0)
        - q * (q + 1.0) * (q + 2.0) * (q + 3.0) * s * l.powf(-q - 4.0)
        + q * (q + 1.0) * (q + 2.0) * (q + 3.0) * (q + 4.0) * c * l.powf(-q - 5.0);
    acc += l.powf(-p) / p - cos_tail;
    Ok(acc)
}

/// Term-wise integration of the cosine series on `[a, b] ⊂ [0, 1]`, where
/// `1 - cos x = Σ (-1)^{k+1} x^{2k}/(2k)!` removes the `x^{1-p}` endpoint
/// singularity exactly.
fn cos_moment_series(p: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut fact = 1.0; // (2k)!
    for k in 1..40 {
        let e = 2.0 * k as f64 - p;
        fact *= (2 * k - 1) as f64 * (2 * k) as f64;
        let span = b.powf(e) - if a > 0.0 { a.powf(e) } else { 0.0 };
        let term = span / (e * fact);
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Adaptive Gauss-Kronrod on `[a, b]`, `a ≥ 1`, seeded with π-wide panels.
fn cos_moment_quadrature(p: f64, a: f64, b: f64) -> Result<f64> {
    let mut breaks = vec![a];
    let mut k = (a / PI).floor() + 1.0;
    while k * PI < b {
        breaks.push(k * PI);
        k += 1.0;
    }
    breaks.push(b);
    let base = Tolerance::default();
    // The integral from `a` scales like a^{-p}; keep the absolute tolerance
    // proportional so large-|ξ| tails retain relative accuracy.
    let tol = Tolerance {
        abs: base.abs * a.powf(-p).min(1.0),
        ..base
    };
    let est = integrate_panels(|x: f64| (1.0 - x.cos()) * x.powf(-p - 1.0), &breaks, tol)?;
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Closed form of ∫ℝ (1 - cos x)/|x|^{p+1} dx.
    fn stable_constant(p: f64) -> f64 {
        PI / (libm::tgamma(p + 1.0) * (PI * p / 2.0).sin())
    }

    #[test]
    fn gaussian_closed_form() {
        let e = LevyExponent::gaussian(1.0).unwrap();
        assert_eq!(e.psi(2.0).unwrap(), -2.0);
    }

    #[test]
    fn generalized_laplace_at_one() {
        let e = LevyExponent::generalized_laplace(1.0).unwrap();
        assert_relative_eq!(e.psi(1.0).unwrap(), -(2.0f64.ln()), epsilon = 1e-15);
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(LevyExponent::gaussian(0.0).is_err());
        assert!(LevyExponent::sas(2.5, 1.0).is_err());
        assert!(LevyExponent::sas(0.0, 1.0).is_err());
        assert!(LevyExponent::layered_stable(2.0, 1.0).is_err());
        assert!(LevyExponent::generalized_laplace(f64::NAN).is_err());
        assert!(LevyExponent::compound_poisson(1.0, JumpLaw::Cauchy { scale: -1.0 }).is_err());
        assert!(LevyExponent::sum(vec![]).is_err());
        assert!(IndexPair::new(0.0, 1.0).is_err());
        assert!(IndexPair::new(2.0, 0.0).is_ok());
    }

    #[test]
    fn serde_rejects_invalid_family() {
        let bad = r#"{"family":"sas","alpha":3.0,"scale":1.0}"#;
        assert!(serde_json::from_str::<LevyExponent>(bad).is_err());
        let good = r#"{"family":"compound-poisson","rate":2.0,"jump":{"law":"cauchy","scale":1.0}}"#;
        let e: LevyExponent = serde_json::from_str(good).unwrap();
        assert_eq!(
            e.theoretical_indices(),
            IndexPair {
                beta0: 1.0,
                beta_inf: 0.0
            }
        );
    }

    #[test]
    fn stable_constants_match_closed_form() {
        for &p in &[0.3, 0.7, 1.0, 1.5, 1.9] {
            let (c0, cinf) = layered_asymptotic_constants(p, p).unwrap();
            assert_eq!(c0, cinf);
            assert_relative_eq!(cinf, stable_constant(p), max_relative = 1e-8);
        }
    }

    #[test]
    fn layered_equal_indices_is_stable() {
        for &a in &[0.5, 1.0, 1.5] {
            let e = LevyExponent::layered_stable(a, a).unwrap();
            for &xi in &[1e-5, 0.3, 1.0, 7.5, 350.0, 1e4, 1e9] {
                let expected = -stable_constant(a) * f64::powf(xi, a);
                assert_relative_eq!(e.psi(xi).unwrap(), expected, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn table_indices() {
        let cp_sas = LevyExponent::compound_poisson(1.0, JumpLaw::Sas { alpha: 1.2, scale: 1.0 }).unwrap();
        assert_eq!(
            cp_sas.theoretical_indices(),
            IndexPair {
                beta0: 1.2,
                beta_inf: 0.0
            }
        );
        let gauss = LevyExponent::gaussian(3.0).unwrap();
        assert_eq!(
            gauss.theoretical_indices(),
            IndexPair {
                beta0: 2.0,
                beta_inf: 2.0
            }
        );
        let sum = LevyExponent::sum(vec![gauss, LevyExponent::cauchy(1.0).unwrap()]).unwrap();
        assert_eq!(
            sum.theoretical_indices(),
            IndexPair {
                beta0: 1.0,
                beta_inf: 2.0
            }
        );
        let layered = LevyExponent::layered_stable(0.7, 1.5).unwrap();
        assert_eq!(
            layered.theoretical_indices(),
            IndexPair {
                beta0: 1.5,
                beta_inf: 0.7
            }
        );
    }

    #[test]
    fn gaussian_zero_end_fit_is_exact() {
        let e = LevyExponent::gaussian(1.0).unwrap();
        let s = e.estimate_index(IndexEnd::Zero, &log_grid(1e-6, 1e-3, 12)).unwrap();
        assert_relative_eq!(s, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_preconditions() {
        let e = LevyExponent::gaussian(1.0).unwrap();
        assert!(e.estimate_index(IndexEnd::Zero, &log_grid(1e-6, 1e-3, 5)).is_err());
        assert!(e.estimate_index(IndexEnd::Zero, &log_grid(1e-3, 1.0, 10)).is_err());
        assert!(e.estimate_index(IndexEnd::Infinity, &log_grid(1.0, 1e3, 10)).is_err());
    }

    #[test]
    fn fit_reports_vanishing_exponent() {
        // ξ² underflows to exactly 0.
        let e = LevyExponent::gaussian(1.0).unwrap();
        match e.estimate_index(IndexEnd::Zero, &log_grid(1e-200, 1e-190, 10)) {
            Err(Error::DegenerateFit(_)) => {}
            other => panic!("expected degenerate fit, got {other:?}"),
        }
    }

    #[test]
    fn admissibility_examples() {
        let grid = default_admissibility_grid();
        let sas = LevyExponent::sas(1.5, 1.0)
            .unwrap()
            .is_p_admissible(1.5, &grid)
            .unwrap();
        assert!(sas.admissible);
        assert_relative_eq!(sas.constant, 1.0, epsilon = 1e-12);

        let g = LevyExponent::gaussian(1.0)
            .unwrap()
            .is_p_admissible(1.0, &grid)
            .unwrap();
        assert!(!g.admissible);
        assert_eq!(g.witness, Some(1e4));

        let gl = LevyExponent::generalized_laplace(1.0)
            .unwrap()
            .is_p_admissible(2.0, &grid)
            .unwrap();
        assert!(gl.admissible);
        assert!(gl.constant <= 1.0);

        let cauchy = LevyExponent::cauchy(1.0).unwrap().is_p_admissible(2.0, &grid).unwrap();
        assert!(!cauchy.admissible);
        assert_eq!(cauchy.witness, Some(1e-4));
    }

    #[test]
    fn admissibility_grid_must_span() {
        let e = LevyExponent::gaussian(1.0).unwrap();
        assert!(e.is_p_admissible(2.0, &log_grid(1e-2, 1e4, 20)).is_err());
        assert!(e.is_p_admissible(0.0, &default_admissibility_grid()).is_err());
    }

    #[test]
    fn sum_asymptotic_constants() {
        let sum = LevyExponent::sum(vec![
            LevyExponent::gaussian(1.0).unwrap(),
            LevyExponent::cauchy(2.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(sum.asymptotic_constant(IndexEnd::Zero).unwrap(), Some(2.0));
        assert_eq!(sum.asymptotic_constant(IndexEnd::Infinity).unwrap(), Some(0.5));
        let gl = LevyExponent::generalized_laplace(0.5).unwrap();
        assert_eq!(gl.asymptotic_constant(IndexEnd::Zero).unwrap(), Some(0.5));
        assert_eq!(gl.asymptotic_constant(IndexEnd::Infinity).unwrap(), None);
    }
}
