//! Peaks-over-threshold tail modelling for return series.
//!
//! The crate turns a dated revenue series into relative returns, fits
//! Generalized Pareto tails to the excesses above candidate thresholds by
//! maximum likelihood, checks the fits with Cramér–von Mises and
//! Anderson–Darling statistics, and selects the threshold that maximises
//! Value-at-Risk.
//!
//! Everything here is `no_std` + `alloc`. All transcendental functions go
//! through [`libm`], so results are bit-identical across platforms.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod date;
mod error;
mod optimize;

pub mod excess;
pub mod gof;
pub mod gpd;
pub mod risk;
pub mod series;
pub mod trend;

pub use date::{Date, DateRange};
pub use error::{Error, Result};
pub use excess::{
    candidate_thresholds, mean_excess_curve, mean_excess_empirical, mean_excess_theoretical, MeanExcessCurve, MeanExcessPoint,
};
pub use gof::{
    anderson_darling, cramer_von_mises, test_gpd_fit, transform_to_uniform, CriticalValueTable, GofReport, LevelVerdict, SignificanceLevel,
    Verdict,
};
pub use gpd::{fit_mle, fit_mle_with, gpd_sample, log_likelihood, score, ExcessSample, FitOptions, FitResult, GpdParams};
pub use risk::{
    expected_shortfall, scan_thresholds, scan_with_alpha_filter, value_at_risk, RiskEstimate, ScanDiagnostics, ScanSettings, TailRegime,
    ThresholdScan,
};
pub use series::{
    box_plot, compute_returns, split_by_period, split_by_sign, BoxPlotSummary, EarningsSeries, Observation, Return, ReturnSeries, SignSplit,
};
pub use trend::{linear_trend, yearly_means, LinearTrend, YearlyMean};

/// Minimum number of exceedances used for fitting and for candidate thresholds
/// when nothing else is configured.
pub const DEFAULT_MIN_EXCEEDANCES: usize = 10;

/// Tail probability analysed when nothing else is configured.
pub const DEFAULT_TAIL_PROBABILITY: f64 = 0.01;
