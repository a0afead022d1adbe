//! Revenue ingestion, relative returns, period and sign splits, box plots.

use alloc::vec::Vec;

use crate::{Date, DateRange, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub date: Date,
    pub revenue: f64,
}

/// Revenue observations with strictly increasing dates and nonnegative amounts.
#[derive(Debug, Clone, PartialEq)]
pub struct EarningsSeries {
    observations: Vec<Observation>,
}

impl EarningsSeries {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        for (i, obs) in observations.iter().enumerate() {
            if !obs.revenue.is_finite() {
                return Err(Error::NonFiniteValue { index: i });
            }
            if obs.revenue < 0.0 {
                return Err(Error::NegativeRevenue { index: i });
            }
            if i > 0 && observations[i - 1].date >= obs.date {
                return Err(Error::UnorderedDates { index: i });
            }
        }
        Ok(Self { observations })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Return {
    pub date: Date,
    pub value: f64,
}

/// Dated relative returns, or return magnitudes after a sign split.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReturnSeries {
    returns: Vec<Return>,
}

impl ReturnSeries {
    pub fn new(returns: Vec<Return>) -> Self {
        Self { returns }
    }

    pub fn returns(&self) -> &[Return] {
        &self.returns
    }

    pub fn values(&self) -> Vec<f64> {
        self.returns.iter().map(|r| r.value).collect()
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

/// Relative week-over-week change `(R[i+1] - R[i]) / R[i]`, dated at the later row.
pub fn compute_returns(series: &EarningsSeries) -> Result<ReturnSeries> {
    let obs = series.observations();
    if obs.len() < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: obs.len() });
    }
    let mut returns = Vec::with_capacity(obs.len() - 1);
    for (i, pair) in obs.windows(2).enumerate() {
        let (prev, next) = (pair[0], pair[1]);
        if prev.revenue == 0.0 {
            return Err(Error::ZeroDenominator { index: i });
        }
        returns.push(Return { date: next.date, value: (next.revenue - prev.revenue) / prev.revenue });
    }
    Ok(ReturnSeries { returns })
}

/// Partition returns into the given half-open periods, preserving order.
///
/// Returns outside every range are dropped. A range that captures nothing
/// yields an empty series; callers decide whether that is fatal.
pub fn split_by_period(returns: &ReturnSeries, ranges: &[DateRange]) -> Result<Vec<ReturnSeries>> {
    for (i, a) in ranges.iter().enumerate() {
        for (j, b) in ranges.iter().enumerate().skip(i + 1) {
            if a.overlaps(b) {
                return Err(Error::OverlappingRanges { first: i, second: j });
            }
        }
    }
    Ok(ranges
        .iter()
        .map(|range| ReturnSeries { returns: returns.returns.iter().copied().filter(|r| range.contains(r.date)).collect() })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignSplit {
    pub positive: ReturnSeries,
    /// Absolute values of the negative returns, so the loss tail is a right tail.
    pub negative_magnitudes: ReturnSeries,
    pub zeros: usize,
}

pub fn split_by_sign(returns: &ReturnSeries) -> SignSplit {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut zeros = 0;
    for r in &returns.returns {
        if r.value > 0.0 {
            positive.push(*r);
        } else if r.value < 0.0 {
            negative.push(Return { date: r.date, value: -r.value });
        } else {
            zeros += 1;
        }
    }
    SignSplit { positive: ReturnSeries::new(positive), negative_magnitudes: ReturnSeries::new(negative), zeros }
}

/// Quartiles with 1.5·IQR whiskers; only the extreme outliers are kept.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoxPlotSummary {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub min_outlier: Option<f64>,
    pub max_outlier: Option<f64>,
}

pub fn box_plot(values: &[f64]) -> Result<BoxPlotSummary> {
    if values.len() < 4 {
        return Err(Error::TooFewObservations { needed: 4, got: values.len() });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { index: i });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let whisker_low = q1 - 1.5 * iqr;
    let whisker_high = q3 + 1.5 * iqr;
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    Ok(BoxPlotSummary {
        q1,
        median,
        q3,
        iqr,
        whisker_low,
        whisker_high,
        min_outlier: (min < whisker_low).then_some(min),
        max_outlier: (max > whisker_high).then_some(max),
    })
}

/// Linear interpolation between the closest order statistics at position
/// `(n - 1)·q` (the "type 7" rule).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
