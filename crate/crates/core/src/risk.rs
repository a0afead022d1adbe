//! Value-at-Risk and Expected Shortfall from a fitted tail, and the
//! maximum-VaR threshold scan.

use alloc::vec::Vec;

use crate::excess::candidate_thresholds;
use crate::gof::{test_gpd_fit, CriticalValueTable, GofReport, SignificanceLevel};
use crate::gpd::{fit_mle_with, ExcessSample, FitOptions, GpdParams};
use crate::{Error, Result, DEFAULT_MIN_EXCEEDANCES, DEFAULT_TAIL_PROBABILITY};

/// Shapes within this distance of zero belong to neither regime.
const SHAPE_ZERO_BAND: f64 = 1e-8;

/// Relative VaR difference below which two candidates count as tied.
const VAR_TIE: f64 = 1e-15;

/// `VaR_p = u + (σ/ξ)·(((n/n_u)·p)^(-ξ) - 1)`, with the `ξ → 0` limit
/// `u + σ·ln(n_u/(n·p))`.
pub fn value_at_risk(u: f64, params: &GpdParams, n: usize, n_u: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if n_u == 0 || n_u > n {
        return Err(Error::InvalidCounts);
    }
    let (xi, sigma) = (params.shape(), params.scale());
    let log_ratio = libm::log(n as f64 / n_u as f64 * p);
    if xi.abs() < SHAPE_ZERO_BAND {
        return Ok(u - sigma * log_ratio);
    }
    Ok(u + sigma / xi * libm::expm1(-xi * log_ratio))
}

/// `ES_p = (VaR_p + σ - uξ) / (1 - ξ)`.
pub fn expected_shortfall(var: f64, u: f64, params: &GpdParams) -> Result<f64> {
    let (xi, sigma) = (params.shape(), params.scale());
    if xi >= 1.0 {
        return Err(Error::ShapeAtOrAboveOne);
    }
    Ok((var + sigma - u * xi) / (1.0 - xi))
}

/// Which sign of the fitted shape a tail is analysed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum TailRegime {
    HeavyTailPositiveXi,
    ShortTailNegativeXi,
}

impl TailRegime {
    pub fn admits(self, shape: f64) -> bool {
        match self {
            TailRegime::HeavyTailPositiveXi => shape > SHAPE_ZERO_BAND,
            TailRegime::ShortTailNegativeXi => shape < -SHAPE_ZERO_BAND,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RiskEstimate {
    pub u: f64,
    pub params: GpdParams,
    pub n: usize,
    pub n_u: usize,
    pub p: f64,
    pub var: f64,
    /// `None` when the shape is at or above one.
    pub es: Option<f64>,
    pub gof: Option<GofReport>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub p: f64,
    pub regime: TailRegime,
    /// Minimum exceedances per candidate; also the minimum fit size.
    pub min_exceedances: usize,
}

impl ScanSettings {
    pub fn new(regime: TailRegime) -> Self {
        Self { p: DEFAULT_TAIL_PROBABILITY, regime, min_exceedances: DEFAULT_MIN_EXCEEDANCES }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScanDiagnostics {
    pub candidates: usize,
    /// Candidates whose likelihood fit failed or did not converge.
    pub failed_fits: usize,
    /// Converged fits whose shape sign contradicts the regime.
    pub regime_rejected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScan {
    /// Surviving estimates in ascending threshold order.
    pub estimates: Vec<RiskEstimate>,
    pub selected: usize,
    pub regime: TailRegime,
    pub diagnostics: ScanDiagnostics,
}

impl ThresholdScan {
    /// Sorts by threshold and selects the maximum-VaR estimate.
    pub fn from_estimates(mut estimates: Vec<RiskEstimate>, regime: TailRegime, diagnostics: ScanDiagnostics) -> Result<Self> {
        estimates.sort_by(|a, b| a.u.total_cmp(&b.u));
        let selected = select_max_var(estimates.iter().enumerate()).ok_or(Error::NoSurvivingCandidates)?;
        Ok(Self { estimates, selected, regime, diagnostics })
    }

    pub fn selected_estimate(&self) -> &RiskEstimate {
        &self.estimates[self.selected]
    }
}

/// Index of the largest VaR; near-ties go to the smallest threshold.
fn select_max_var<'a>(candidates: impl Iterator<Item = (usize, &'a RiskEstimate)> + Clone) -> Option<usize> {
    let top = candidates.clone().map(|(_, e)| e.var).max_by(f64::total_cmp)?;
    let floor = top - VAR_TIE * top.abs().max(1.0);
    candidates.filter(|(_, e)| e.var >= floor).min_by(|a, b| a.1.u.total_cmp(&b.1.u)).map(|(i, _)| i)
}

/// Fits a GPD above every candidate threshold of `tail` and keeps the fits
/// whose shape matches the regime, selecting the one with maximal VaR.
pub fn scan_thresholds(tail: &[f64], settings: &ScanSettings, table: &CriticalValueTable) -> Result<ThresholdScan> {
    if tail.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(settings.p > 0.0 && settings.p < 1.0) {
        return Err(Error::InvalidProbability(settings.p));
    }
    let candidates = candidate_thresholds(tail, settings.min_exceedances)?;
    let options = FitOptions { min_exceedances: settings.min_exceedances, ..FitOptions::default() };
    let mut diagnostics = ScanDiagnostics { candidates: candidates.len(), ..ScanDiagnostics::default() };
    let mut estimates = Vec::new();
    for u in candidates {
        let sample = ExcessSample::from_observations(tail, u)?;
        let fit = match fit_mle_with(&sample, &options) {
            Ok(fit) if fit.converged => fit,
            _ => {
                diagnostics.failed_fits += 1;
                continue;
            }
        };
        if !settings.regime.admits(fit.params.shape()) {
            diagnostics.regime_rejected += 1;
            continue;
        }
        let var = value_at_risk(u, &fit.params, sample.n(), sample.n_u(), settings.p)?;
        estimates.push(RiskEstimate {
            u,
            params: fit.params,
            n: sample.n(),
            n_u: sample.n_u(),
            p: settings.p,
            var,
            es: expected_shortfall(var, u, &fit.params).ok(),
            gof: test_gpd_fit(sample.excesses(), &fit.params, table).ok(),
        });
    }
    ThresholdScan::from_estimates(estimates, settings.regime, diagnostics)
}

/// Maximum-VaR estimate among those accepted by both statistics at `alpha`.
pub fn scan_with_alpha_filter(scan: &ThresholdScan, alpha: SignificanceLevel) -> Result<&RiskEstimate> {
    if scan.regime == TailRegime::ShortTailNegativeXi {
        return Err(Error::NotApplicable);
    }
    let accepted = scan.estimates.iter().enumerate().filter(|(_, e)| e.gof.as_ref().and_then(|g| g.accepts(alpha)) == Some(true));
    select_max_var(accepted).map(|i| &scan.estimates[i]).ok_or(Error::NoSurvivingCandidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params(xi: f64, sigma: f64) -> GpdParams {
        GpdParams::new(xi, sigma).unwrap()
    }

    fn estimate(u: f64, var: f64, gof: Option<GofReport>) -> RiskEstimate {
        RiskEstimate { u, params: params(0.2, 1.0), n: 100, n_u: 20, p: 0.01, var, es: None, gof }
    }

    #[test]
    fn var_equals_threshold_when_p_is_exceedance_rate() {
        for xi in [-0.3, 0.0, 0.25] {
            let v = value_at_risk(0.7, &params(xi, 0.4), 200, 25, 25.0 / 200.0).unwrap();
            assert!((v - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn var_exponential_limit() {
        let v = value_at_risk(0.0, &params(0.0, 1.0), 50, 50, libm::exp(-1.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        // tiny shapes agree with the limit
        let near = value_at_risk(0.0, &params(1e-7, 1.0), 50, 50, libm::exp(-1.0)).unwrap();
        assert!((near - 1.0).abs() < 1e-6);
    }

    #[test]
    fn var_errors() {
        let p = params(0.1, 1.0);
        assert_eq!(value_at_risk(0.0, &p, 10, 5, 0.0), Err(Error::InvalidProbability(0.0)));
        assert_eq!(value_at_risk(0.0, &p, 10, 5, 1.0), Err(Error::InvalidProbability(1.0)));
        assert_eq!(value_at_risk(0.0, &p, 10, 0, 0.1), Err(Error::InvalidCounts));
        assert_eq!(value_at_risk(0.0, &p, 10, 11, 0.1), Err(Error::InvalidCounts));
    }

    #[test]
    fn es_examples() {
        let es = expected_shortfall(1.3954, 0.04125, &params(0.1814, 0.1982)).unwrap();
        assert!((es - 1.9376).abs() < 5e-4);
        let es = expected_shortfall(0.5130, 0.26423, &params(-0.3586, 0.1374)).unwrap();
        assert!((es - 0.5485).abs() < 5e-4);
        assert_eq!(expected_shortfall(2.0, 0.5, &params(0.0, 0.3)).unwrap(), 2.3);
        assert_eq!(expected_shortfall(2.0, 0.5, &params(1.0, 0.3)), Err(Error::ShapeAtOrAboveOne));
    }

    #[test]
    fn regimes_exclude_zero_shape() {
        assert!(TailRegime::HeavyTailPositiveXi.admits(0.1));
        assert!(!TailRegime::HeavyTailPositiveXi.admits(5e-9));
        assert!(!TailRegime::ShortTailNegativeXi.admits(-5e-9));
        assert!(TailRegime::ShortTailNegativeXi.admits(-0.1));
    }

    #[test]
    fn ties_go_to_smaller_threshold() {
        let scan = ThresholdScan::from_estimates(
            vec![estimate(0.3, 1.0 + 1e-16, None), estimate(0.1, 1.0, None), estimate(0.2, 0.5, None)],
            TailRegime::HeavyTailPositiveXi,
            ScanDiagnostics::default(),
        )
        .unwrap();
        assert_eq!(scan.selected_estimate().u, 0.1);
    }

    #[test]
    fn empty_scan_has_no_survivors() {
        let r = ThresholdScan::from_estimates(vec![], TailRegime::HeavyTailPositiveXi, ScanDiagnostics::default());
        assert_eq!(r, Err(Error::NoSurvivingCandidates));
    }

    fn report(shape: f64, w2: f64, a2: f64) -> GofReport {
        let table = CriticalValueTable::default();
        GofReport { w2, a2, n_used: 20, shape_used: shape, verdicts: table.verdicts(shape, w2, a2) }
    }

    #[test]
    fn alpha_filter_picks_accepted_estimate() {
        let accepted = report(0.2, 0.05, 0.3);
        let rejected = report(0.2, 0.5, 3.0);
        let scan = ThresholdScan::from_estimates(
            vec![estimate(0.1, 2.0, Some(rejected.clone())), estimate(0.2, 1.0, Some(accepted)), estimate(0.3, 1.5, None)],
            TailRegime::HeavyTailPositiveXi,
            ScanDiagnostics::default(),
        )
        .unwrap();
        assert_eq!(scan.selected_estimate().u, 0.1);
        assert_eq!(scan_with_alpha_filter(&scan, SignificanceLevel::P050).unwrap().u, 0.2);

        let none = ThresholdScan::from_estimates(
            vec![estimate(0.1, 2.0, Some(rejected))],
            TailRegime::HeavyTailPositiveXi,
            ScanDiagnostics::default(),
        )
        .unwrap();
        assert_eq!(scan_with_alpha_filter(&none, SignificanceLevel::P050), Err(Error::NoSurvivingCandidates));

        let short = ThresholdScan { regime: TailRegime::ShortTailNegativeXi, ..none };
        assert_eq!(scan_with_alpha_filter(&short, SignificanceLevel::P050), Err(Error::NotApplicable));
    }

    #[test]
    fn scan_rejects_bad_inputs() {
        let s = ScanSettings::new(TailRegime::HeavyTailPositiveXi);
        assert_eq!(scan_thresholds(&[], &s, &CriticalValueTable::default()).unwrap_err(), Error::EmptySample);
        let bad = ScanSettings { p: 1.5, ..s };
        assert_eq!(scan_thresholds(&[1.0; 20], &bad, &CriticalValueTable::default()).unwrap_err(), Error::InvalidProbability(1.5));
    }
}
