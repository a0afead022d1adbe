//! The `analyze` pipeline and its JSON report.

use boxtail_core::{
    box_plot, compute_returns, mean_excess_curve, scan_thresholds, scan_with_alpha_filter, split_by_period, split_by_sign, BoxPlotSummary,
    CriticalValueTable, DateRange, EarningsSeries, Error as CoreError, MeanExcessCurve, ReturnSeries, RiskEstimate, ScanSettings,
    TailRegime, ThresholdScan,
};
use serde::Serialize;

use crate::config::{AnalysisConfig, RecordedConfig};
use crate::error::{CliError, Result};
use crate::io::{csv_bytes, fmt_sig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Positive,
    Negative,
}

impl Tail {
    pub fn regime(self) -> TailRegime {
        match self {
            Tail::Positive => TailRegime::HeavyTailPositiveXi,
            Tail::Negative => TailRegime::ShortTailNegativeXi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tail::Positive => "positive",
            Tail::Negative => "negative",
        }
    }

    /// Positive returns, or negative-return magnitudes.
    pub fn sample(self, returns: &ReturnSeries) -> Vec<f64> {
        let split = split_by_sign(returns);
        match self {
            Tail::Positive => split.positive.values(),
            Tail::Negative => split.negative_magnitudes.values(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub config: RecordedConfig,
    pub observations: usize,
    pub returns: usize,
    pub periods: Vec<PeriodReport>,
}

#[derive(Debug, Serialize)]
pub struct PeriodReport {
    pub range: DateRange,
    pub returns: usize,
    pub positive: usize,
    pub negative: usize,
    pub zeros: usize,
    pub tails: Vec<TailReport>,
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub candidates: usize,
    pub failed_fits: usize,
    pub regime_rejected: usize,
    pub surviving: usize,
    /// Position of the selected estimate in the threshold-ordered scan export.
    pub selected_index: usize,
}

#[derive(Debug, Serialize)]
pub struct TailReport {
    pub tail: Tail,
    pub regime: TailRegime,
    pub count: usize,
    pub box_plot: Option<BoxPlotSummary>,
    pub scan: Option<ScanSummary>,
    pub selected: Option<RiskEstimate>,
    pub alpha_filtered: Option<RiskEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A file the pipeline wants written next to the report.
#[derive(Debug)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

pub fn returns_csv(returns: &ReturnSeries) -> Result<Vec<u8>> {
    csv_bytes(&["date", "return"], returns.returns().iter().map(|r| vec![r.date.to_string(), fmt_sig(r.value, 15)]))
}

pub fn curve_csv(curve: &MeanExcessCurve) -> Result<Vec<u8>> {
    csv_bytes(
        &["u", "mean_excess", "count"],
        curve.points.iter().map(|p| vec![p.u.to_string(), p.mean_excess.to_string(), p.count.to_string()]),
    )
}

pub fn scan_csv(scan: &ThresholdScan) -> Result<Vec<u8>> {
    let rows = scan.estimates.iter().map(|e| {
        let (w2, a2, accepted) = match &e.gof {
            Some(g) => {
                (g.w2.to_string(), g.a2.to_string(), g.accepted_levels().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";"))
            }
            None => Default::default(),
        };
        vec![
            e.u.to_string(),
            e.params.shape().to_string(),
            e.params.scale().to_string(),
            e.n_u.to_string(),
            e.var.to_string(),
            e.es.map(|v| v.to_string()).unwrap_or_default(),
            w2,
            a2,
            accepted,
        ]
    });
    csv_bytes(&["u", "xi", "sigma", "n_u", "var", "es", "w2", "a2", "accepted_alphas"], rows)
}

/// The whole-series period used when no `--periods` are given.
pub fn default_period(returns: &ReturnSeries) -> Result<DateRange> {
    let (first, last) = match returns.returns() {
        [] => return Err(CliError::Pipeline { context: "returns".into(), source: CoreError::EmptySample }),
        r => (r[0].date, r[r.len() - 1].date),
    };
    DateRange::new(first, last.add_days(1)).map_err(CliError::pipeline("returns"))
}

pub fn periods_or_default(returns: &ReturnSeries, periods: &[DateRange]) -> Result<Vec<DateRange>> {
    if periods.is_empty() {
        Ok(vec![default_period(returns)?])
    } else {
        Ok(periods.to_vec())
    }
}

/// Splits `returns` into the periods, rejecting any period that captured nothing.
pub fn split_nonempty(returns: &ReturnSeries, periods: &[DateRange]) -> Result<Vec<ReturnSeries>> {
    let parts = split_by_period(returns, periods).map_err(CliError::pipeline("periods"))?;
    if let Some(index) = parts.iter().position(|p| p.is_empty()) {
        return Err(CliError::Pipeline { context: format!("period {}", periods[index]), source: CoreError::EmptyPeriod { index } });
    }
    Ok(parts)
}

fn file_label(range: &DateRange, tail: Tail) -> String {
    format!("{}_{}_{}", range.start, range.end, tail.name())
}

fn analyze_tail(
    config: &AnalysisConfig,
    range: &DateRange,
    tail: Tail,
    sample: &[f64],
    table: &CriticalValueTable,
    artifacts: &mut Vec<Artifact>,
) -> Result<TailReport> {
    let mut report = TailReport {
        tail,
        regime: tail.regime(),
        count: sample.len(),
        box_plot: box_plot(sample).ok(),
        scan: None,
        selected: None,
        alpha_filtered: None,
        note: None,
        error: None,
    };
    let label = file_label(range, tail);
    if let Ok(curve) = mean_excess_curve(sample) {
        artifacts.push(Artifact { name: format!("mean_excess_{label}.csv"), contents: curve_csv(&curve)? });
    }
    let settings = ScanSettings { p: config.p, regime: tail.regime(), min_exceedances: config.min_exceedances };
    let scan = match scan_thresholds(sample, &settings, table) {
        Ok(scan) => scan,
        Err(e) => {
            report.error = Some(e.to_string());
            return Ok(report);
        }
    };
    artifacts.push(Artifact { name: format!("scan_{label}.csv"), contents: scan_csv(&scan)? });
    report.scan = Some(ScanSummary {
        candidates: scan.diagnostics.candidates,
        failed_fits: scan.diagnostics.failed_fits,
        regime_rejected: scan.diagnostics.regime_rejected,
        surviving: scan.estimates.len(),
        selected_index: scan.selected,
    });
    report.selected = Some(scan.selected_estimate().clone());
    if let Some(alpha) = config.alpha {
        match scan_with_alpha_filter(&scan, alpha) {
            Ok(e) => report.alpha_filtered = Some(e.clone()),
            Err(CoreError::NotApplicable) => {
                report.note = Some("goodness-of-fit table covers only positive shapes; no alpha filtering".into())
            }
            Err(e) => report.note = Some(format!("alpha {alpha}: {e}")),
        }
    }
    Ok(report)
}

/// Runs the full pipeline on an already-loaded series.
pub fn analyze(config: &AnalysisConfig, series: &EarningsSeries) -> Result<(AnalysisReport, Vec<Artifact>)> {
    let returns = compute_returns(series).map_err(CliError::pipeline("returns"))?;
    let periods = periods_or_default(&returns, &config.periods)?;
    let parts = split_nonempty(&returns, &periods)?;
    let table = CriticalValueTable::default();
    let mut artifacts = vec![Artifact { name: "returns.csv".into(), contents: returns_csv(&returns)? }];
    let mut period_reports = Vec::with_capacity(parts.len());
    for (range, part) in periods.iter().zip(&parts) {
        let split = split_by_sign(part);
        let mut tails = Vec::with_capacity(2);
        for tail in [Tail::Positive, Tail::Negative] {
            tails.push(analyze_tail(config, range, tail, &tail.sample(part), &table, &mut artifacts)?);
        }
        period_reports.push(PeriodReport {
            range: *range,
            returns: part.len(),
            positive: split.positive.len(),
            negative: split.negative_magnitudes.len(),
            zeros: split.zeros,
            tails,
        });
    }
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        config: config.recorded(),
        observations: series.len(),
        returns: returns.len(),
        periods: period_reports,
    };
    Ok((report, artifacts))
}

pub fn to_json(report: &impl Serialize) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(report).map_err(|e| CliError::Internal(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}
