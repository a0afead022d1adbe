//! Generalized Pareto distribution: distribution functions, seeded sampling
//! and maximum-likelihood fitting of excesses over a threshold.
//!
//! The fit maximises the profile log-likelihood in `θ = ξ/σ`. For fixed `θ`
//! the likelihood is maximised by `ξ(θ) = mean(ln(1 + θ·y))`, which leaves a
//! smooth one-dimensional problem. It is searched on `s = ln(1 + θ·max(y))`,
//! which maps the feasible half-line `θ > -1/max(y)` onto the real line and
//! puts `θ = 0` (the exponential case) at `s = 0`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::optimize::brent_root;
use crate::{Error, Result, DEFAULT_MIN_EXCEEDANCES};

/// Shape `ξ` and scale `σ > 0` of a Generalized Pareto distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GpdParams {
    #[cfg_attr(feature = "serde", serde(rename = "xi"))]
    shape: f64,
    #[cfg_attr(feature = "serde", serde(rename = "sigma"))]
    scale: f64,
}

impl GpdParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !shape.is_finite() || !scale.is_finite() || scale <= 0.0 {
            return Err(Error::InvalidParams);
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `-σ/ξ` for a short tail; `None` when the support is unbounded.
    pub fn upper_endpoint(&self) -> Option<f64> {
        (self.shape < 0.0).then(|| -self.scale / self.shape)
    }

    /// `1 - (1 + ξy/σ)^(-1/ξ)`, or `1 - exp(-y/σ)` at `ξ = 0`.
    ///
    /// Zero at and below the origin; one at and beyond a finite upper endpoint.
    pub fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let x = y / self.scale;
        if self.shape == 0.0 {
            return -libm::expm1(-x);
        }
        let t = self.shape * x;
        if t <= -1.0 {
            return 1.0;
        }
        -libm::expm1(-libm::log1p(t) / self.shape)
    }

    /// Inverse of [`GpdParams::cdf`] for `q` in `[0, 1)`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidProbability(q));
        }
        let tail = libm::log1p(-q);
        if self.shape == 0.0 {
            return Ok(-self.scale * tail);
        }
        Ok(self.scale / self.shape * libm::expm1(-self.shape * tail))
    }

    /// Log-density; `-inf` outside the support.
    pub fn ln_pdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            return f64::NEG_INFINITY;
        }
        let x = y / self.scale;
        let t = self.shape * x;
        if t <= -1.0 {
            return f64::NEG_INFINITY;
        }
        -libm::log(self.scale) - log1p_ratio(x, self.shape) - libm::log1p(t)
    }
}

/// `ln(1 + k·x) / k`, continuous at `k = 0` where it equals `x`.
fn log1p_ratio(x: f64, k: f64) -> f64 {
    let t = k * x;
    if t.abs() < 1e-3 {
        // x·(1 - t/2 + t²/3 - ...)
        let mut sum = 0.0;
        let mut power = 1.0;
        for j in 1..=8 {
            let term = power / j as f64;
            sum += if j % 2 == 1 { term } else { -term };
            power *= t;
        }
        x * sum
    } else {
        libm::log1p(t) / k
    }
}

/// `(t/(1+t) - ln(1+t)) / k²` with `t = k·x`; tends to `-x²/2` as `k → 0`.
fn curvature_term(x: f64, k: f64) -> f64 {
    let t = k * x;
    if t.abs() < 1e-3 {
        // x²·Σ_{j≥2} (-1)^(j+1)·(j-1)/j·t^(j-2)
        let mut sum = 0.0;
        let mut power = 1.0;
        for j in 2..=9 {
            let term = (j - 1) as f64 / j as f64 * power;
            sum += if j % 2 == 1 { term } else { -term };
            power *= t;
        }
        x * x * sum
    } else {
        (t / (1.0 + t) - libm::log1p(t)) / (k * k)
    }
}

/// GPD log-likelihood of `excesses`; `-inf` when some excess is outside the support.
pub fn log_likelihood(params: &GpdParams, excesses: &[f64]) -> f64 {
    let (xi, sigma) = (params.shape, params.scale);
    let mut acc = 0.0;
    for &y in excesses {
        let x = y / sigma;
        let t = xi * x;
        if y < 0.0 || t <= -1.0 {
            return f64::NEG_INFINITY;
        }
        acc += log1p_ratio(x, xi) + libm::log1p(t);
    }
    -(excesses.len() as f64) * libm::log(sigma) - acc
}

/// Gradient `(∂ℓ/∂ξ, ∂ℓ/∂σ)` of the log-likelihood.
///
/// These are the two score equations whose common root is the interior MLE;
/// the `ξ` component is evaluated by series near `ξ = 0`.
pub fn score(params: &GpdParams, excesses: &[f64]) -> (f64, f64) {
    let (xi, sigma) = (params.shape, params.scale);
    let n = excesses.len() as f64;
    let mut curvature = 0.0;
    let mut weighted = 0.0;
    for &y in excesses {
        curvature += curvature_term(y / sigma, xi);
        weighted += y / (sigma + xi * y);
    }
    let d_shape = -curvature - weighted;
    let d_scale = -n / sigma + (1.0 + xi) / sigma * weighted;
    (d_shape, d_scale)
}

/// `count` inverse-transform draws, reproducible from `seed` alone.
pub fn gpd_sample(params: &GpdParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidCounts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| params.quantile(rng.random::<f64>())).collect()
}

/// Excesses `y = x - u` of the observations above a threshold `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessSample {
    threshold: f64,
    excesses: Vec<f64>,
    n: usize,
}

impl ExcessSample {
    /// `n` is the size of the parent tail sample the excesses were drawn from.
    pub fn new(threshold: f64, excesses: Vec<f64>, n: usize) -> Result<Self> {
        if excesses.is_empty() {
            return Err(Error::NoExceedances);
        }
        if excesses.len() > n {
            return Err(Error::InvalidCounts);
        }
        if let Some(i) = excesses.iter().position(|y| !(y.is_finite() && *y > 0.0)) {
            return Err(Error::NonFiniteValue { index: i });
        }
        Ok(Self { threshold, excesses, n })
    }

    /// Collects the excesses of `values` above `threshold`.
    pub fn from_observations(values: &[f64], threshold: f64) -> Result<Self> {
        let excesses: Vec<f64> = values.iter().filter(|&&x| x > threshold).map(|&x| x - threshold).collect();
        Self::new(threshold, excesses, values.len())
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn excesses(&self) -> &[f64] {
        &self.excesses
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_u(&self) -> usize {
        self.excesses.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub min_exceedances: usize,
    /// Cap on root-polishing iterations per bracketed maximum.
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { min_exceedances: DEFAULT_MIN_EXCEEDANCES, max_iterations: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub params: GpdParams,
    pub log_likelihood: f64,
    pub converged: bool,
    /// The optimum sits on the feasibility constraint `σ + ξ·max(y) ≥ 1e-10·σ`.
    pub boundary_hit: bool,
}

/// Search interval in `s = ln(1 + θ·max(y))`. The lower end is the
/// feasibility margin; the upper end allows ξ up to about 13.8.
const S_LOWER: f64 = -23.025_850_929_940_457; // ln(1e-10)
const S_UPPER: f64 = 13.815_510_557_964_274; // ln(1e6)
const S_BOUNDARY: f64 = -13.815_510_557_964_274; // ln(1e-6)
const GRID_POINTS: usize = 48;

struct Profile<'a> {
    y: &'a [f64],
    y_max: f64,
    n: f64,
}

impl Profile<'_> {
    fn theta(&self, s: f64) -> f64 {
        libm::expm1(s) / self.y_max
    }

    /// Σ ln(1 + θy)/θ, which is n·σ(θ).
    fn scale_sum(&self, theta: f64) -> f64 {
        self.y.iter().map(|&y| log1p_ratio(y, theta)).sum()
    }

    fn value(&self, theta: f64) -> f64 {
        let b = self.scale_sum(theta);
        -self.n * libm::log(b / self.n) - self.n - theta * b
    }

    /// d(profile)/dθ, evaluated without cancellation near θ = 0.
    fn slope(&self, theta: f64) -> f64 {
        let (mut b, mut a, mut h) = (0.0, 0.0, 0.0);
        for &y in self.y {
            b += log1p_ratio(y, theta);
            a += curvature_term(y, theta);
            h += y / (1.0 + theta * y);
        }
        -self.n * a / b - h
    }
}

/// Maximum-likelihood fit with default options.
pub fn fit_mle(sample: &ExcessSample) -> Result<FitResult> {
    fit_mle_with(sample, &FitOptions::default())
}

/// Maximum-likelihood fit of `(ξ, σ)` over `σ > 0`, `σ + ξ·y_i > 0`.
///
/// The profile slope is sampled on a coarse grid in `s`; every `+ → -` sign
/// change brackets a local maximum, which is polished by Brent's method to
/// machine precision. The best local maximum wins, with the feasibility
/// boundary as an extra candidate when the profile still rises toward it.
pub fn fit_mle_with(sample: &ExcessSample, options: &FitOptions) -> Result<FitResult> {
    let n_u = sample.n_u();
    let needed = options.min_exceedances.max(2);
    if n_u < needed {
        return Err(Error::TooFewExceedances { needed, got: n_u });
    }
    // sorted input makes the fit independent of the caller's ordering
    let mut y = sample.excesses.clone();
    y.sort_by(f64::total_cmp);
    let (y_min, y_max) = (y[0], y[n_u - 1]);
    if y_min == y_max {
        return Err(Error::DegenerateSample);
    }
    let profile = Profile { y: &y, y_max, n: n_u as f64 };
    let slope_at = |s: f64| profile.slope(profile.theta(s));
    let value_at = |s: f64| {
        let v = profile.value(profile.theta(s));
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let step = (S_UPPER - S_LOWER) / (GRID_POINTS - 1) as f64;
    let grid_s = |k: usize| if k == GRID_POINTS - 1 { S_UPPER } else { S_LOWER + step * k as f64 };
    let slopes: Vec<f64> = (0..GRID_POINTS).map(|k| slope_at(grid_s(k))).collect();

    let mut best: Option<(f64, f64)> = None;
    let mut consider = |s: f64| {
        let v = value_at(s);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((s, v));
        }
    };
    if slopes[0] <= 0.0 {
        consider(S_LOWER);
    }
    for k in 0..GRID_POINTS - 1 {
        let (lo, hi) = (slopes[k], slopes[k + 1]);
        if lo > 0.0 && hi <= 0.0 {
            let root = brent_root(slope_at, grid_s(k), grid_s(k + 1), lo, hi, 0.0, options.max_iterations)
                .ok_or(Error::NonConvergence { iterations: options.max_iterations })?;
            consider(root);
        }
    }
    let (s_hat, _) = best.ok_or(Error::NonConvergence { iterations: GRID_POINTS })?;

    let theta = profile.theta(s_hat);
    let scale = profile.scale_sum(theta) / profile.n;
    let params = GpdParams::new(theta * scale, scale)?;
    Ok(FitResult { params, log_likelihood: log_likelihood(&params, &y), converged: true, boundary_hit: s_hat <= S_BOUNDARY })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params(xi: f64, sigma: f64) -> GpdParams {
        GpdParams::new(xi, sigma).unwrap()
    }

    #[test]
    fn rejects_invalid_params() {
        assert_eq!(GpdParams::new(0.1, 0.0), Err(Error::InvalidParams));
        assert_eq!(GpdParams::new(0.1, -1.0), Err(Error::InvalidParams));
        assert_eq!(GpdParams::new(f64::NAN, 1.0), Err(Error::InvalidParams));
    }

    #[test]
    fn cdf_examples() {
        for p in [params(0.3, 2.0), params(0.0, 1.0), params(-0.4, 0.5)] {
            assert_eq!(p.cdf(0.0), 0.0);
        }
        assert!((params(0.0, 1.0).cdf(1.0) - 0.632_120_558_828_557_7).abs() < 1e-12);
        // 1 - 1.4^-5
        assert!((params(0.2, 1.0).cdf(2.0) - 0.814_065_567_918_129_2).abs() < 1e-12);
        assert_eq!(params(-0.5, 1.0).cdf(2.0), 1.0);
        assert_eq!(params(-0.5, 1.0).cdf(3.0), 1.0);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(params(0.3, 1.0).quantile(0.0).unwrap(), 0.0);
        let q = 1.0 - libm::exp(-1.0);
        assert!((params(0.0, 2.0).quantile(q).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(params(0.1, 1.0).quantile(1.0), Err(Error::InvalidProbability(1.0)));
        assert_eq!(params(0.1, 1.0).quantile(-0.1), Err(Error::InvalidProbability(-0.1)));
    }

    #[test]
    fn quantile_inverts_cdf() {
        for xi in [-0.4, 0.0, 0.3] {
            let p = params(xi, 1.3);
            let top = p.upper_endpoint().unwrap_or(10.0 * p.scale());
            for k in 0..200 {
                let y = top * k as f64 / 201.0;
                let back = p.quantile(p.cdf(y)).unwrap();
                assert!((back - y).abs() < 1e-10, "xi={xi} y={y} back={back}");
            }
        }
    }

    #[test]
    fn cdf_continuous_in_shape_at_zero() {
        let base = params(0.0, 1.5);
        for xi in [1e-8, -1e-8] {
            let p = params(xi, 1.5);
            for k in 0..=100 {
                let y = 15.0 * k as f64 / 100.0;
                assert!((p.cdf(y) - base.cdf(y)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ln_pdf_matches_density() {
        // ξ = 0.5, σ = 2 at y = 2: (1/σ)(1 + ξy/σ)^(-1/ξ - 1) = 0.5 · 1.5^-3
        let p = params(0.5, 2.0);
        assert!((libm::exp(p.ln_pdf(2.0)) - 0.5 / 3.375).abs() < 1e-14);
        assert_eq!(params(-0.5, 1.0).ln_pdf(2.5), f64::NEG_INFINITY);
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let p = params(-0.5, 1.0);
        let a = gpd_sample(&p, 500, 7).unwrap();
        assert_eq!(a, gpd_sample(&p, 500, 7).unwrap());
        assert_ne!(a, gpd_sample(&p, 500, 8).unwrap());
        assert!(a.iter().all(|&y| (0.0..=2.0).contains(&y)));
        assert_eq!(gpd_sample(&p, 0, 1), Err(Error::InvalidCounts));
    }

    #[test]
    fn series_helpers_match_direct_evaluation() {
        for &(x, k) in &[(2.0, 4e-4), (0.5, -1.9e-3), (3.0, 1e-6)] {
            let direct = libm::log1p(k * x) / k;
            assert!((log1p_ratio(x, k) - direct).abs() < 1e-12 * direct.abs());
        }
        assert_eq!(log1p_ratio(2.5, 0.0), 2.5);
        assert_eq!(curvature_term(2.0, 0.0), -2.0);
        // just outside the series region the direct form takes over smoothly
        let (inside, outside) = (curvature_term(1.0, 0.999e-3), curvature_term(1.0, 1.001e-3));
        assert!((inside - outside).abs() < 1e-5);
    }

    #[test]
    fn excess_sample_validation() {
        let s = ExcessSample::from_observations(&[1.0, 2.0, 3.0, 4.0], 2.5).unwrap();
        assert_eq!(s.excesses(), &[0.5, 1.5]);
        assert_eq!((s.n(), s.n_u()), (4, 2));
        assert_eq!(ExcessSample::from_observations(&[1.0, 2.0], 5.0), Err(Error::NoExceedances));
        assert_eq!(ExcessSample::new(0.0, vec![1.0, 2.0], 1), Err(Error::InvalidCounts));
        assert_eq!(ExcessSample::new(0.0, vec![1.0, 0.0], 5), Err(Error::NonFiniteValue { index: 1 }));
    }

    #[test]
    fn fit_errors() {
        let few = ExcessSample::new(0.0, vec![1.0, 2.0, 3.0], 3).unwrap();
        assert_eq!(fit_mle(&few), Err(Error::TooFewExceedances { needed: 10, got: 3 }));
        let flat = ExcessSample::new(0.0, vec![0.7; 12], 12).unwrap();
        assert_eq!(fit_mle(&flat), Err(Error::DegenerateSample));
    }

    #[test]
    fn exponential_fit_recovers_mean_scale() {
        // exact exponential quantile grid: MLE of σ on the ξ = 0 slice is the mean
        let y: Vec<f64> = (1..=400).map(|i| -libm::log(1.0 - i as f64 / 401.0)).collect();
        let s = ExcessSample::new(0.0, y, 400).unwrap();
        let fit = fit_mle(&s).unwrap();
        assert!(fit.params.shape().abs() < 0.05, "{:?}", fit);
        let (g_xi, g_sigma) = score(&fit.params, s.excesses());
        assert!(g_xi.abs() < 1e-6 && g_sigma.abs() < 1e-6, "{g_xi} {g_sigma}");
    }
}
