use std::path::{Path, PathBuf};

use boxtail_core::{
    compute_returns, gpd_sample, linear_trend, scan_thresholds, scan_with_alpha_filter, yearly_means, BoxPlotSummary, CriticalValueTable,
    GpdParams, Return, ReturnSeries, RiskEstimate, ScanDiagnostics, ScanSettings, TailRegime,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{parse_alpha, parse_periods, validate_min_exceedances, validate_p, AnalysisConfig, Overrides};
use crate::error::{CliError, Result};
use crate::io::{csv_bytes, emit, parse_f64, read_earnings, read_rows, write_file};
use crate::report::{analyze, returns_csv, scan_csv, split_nonempty, to_json, Tail};
use crate::svg::{box_chart, line_chart, Labels};

#[derive(Debug, Parser)]
#[command(name = "boxtail", version, about = "Peaks-over-threshold tail risk for weekly revenue series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative returns between consecutive rows of a `date,revenue` file
    Returns(ReturnsArgs),
    /// Full pipeline: returns, period and sign split, threshold scans, report
    Analyze(AnalyzeArgs),
    /// Threshold scan of one tail
    Scan(ScanArgs),
    /// Render a curve CSV or a report as SVG
    Plot(PlotArgs),
    /// Draw a seeded GPD sample
    Simulate(SimulateArgs),
    /// Export the embedded W²/A² critical-value table
    GofTable(OutputArgs),
    /// Calendar-year mean returns and their least-squares trend
    Trend(ReturnsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    Json,
    #[default]
    Csv,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with header `date,revenue`
    #[arg(long)]
    pub input: PathBuf,
    /// Half-open date range `start:end`; repeat for several periods
    #[arg(long = "periods", value_name = "START:END")]
    pub periods: Vec<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write files here instead of printing to stdout
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReturnsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// TOML file with any of the flags below; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "periods", value_name = "START:END")]
    pub periods: Vec<String>,
    /// Tail probability for VaR and ES
    #[arg(long)]
    pub p: Option<f64>,
    /// Significance level for the goodness-of-fit filtered estimate
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub min_exceedances: Option<usize>,
    /// Recorded in the report; the analysis itself draws no random numbers
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Tail::Positive)]
    pub tail: Tail,
    #[arg(long, default_value_t = boxtail_core::DEFAULT_TAIL_PROBABILITY)]
    pub p: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = boxtail_core::DEFAULT_MIN_EXCEEDANCES)]
    pub min_exceedances: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// `u,mean_excess,count` curve
    MeanExcess,
    /// scan CSV, VaR against threshold
    Var,
    /// trend CSV `year,mean,count,fitted`
    Trend,
    /// box plots from an analyze report
    Box,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// Directory for `<input stem>.svg`
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub xi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Returns(args) => cmd_returns(&args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Scan(args) => cmd_scan(&args),
        Command::Plot(args) => cmd_plot(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::GofTable(args) => cmd_gof_table(&args),
        Command::Trend(args) => cmd_trend(&args),
    }
}

/// Returns inside the requested periods, concatenated; all returns when none are given.
fn load_returns(input: &InputArgs) -> Result<ReturnSeries> {
    let ranges = parse_periods(&input.periods)?;
    let series = read_earnings(&input.input)?;
    let returns = compute_returns(&series).map_err(CliError::pipeline("returns"))?;
    if ranges.is_empty() {
        return Ok(returns);
    }
    let parts = split_nonempty(&returns, &ranges)?;
    Ok(ReturnSeries::new(parts.iter().flat_map(|p| p.returns().iter().copied()).collect::<Vec<Return>>()))
}

fn cmd_returns(args: &ReturnsArgs) -> Result<()> {
    let returns = load_returns(&args.input)?;
    let out = args.output.out_dir.as_deref();
    match args.output.format {
        Format::Csv => emit(out, "returns.csv", &returns_csv(&returns)?),
        Format::Json => emit(out, "returns.json", &to_json(&returns.returns())?),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let flags = Overrides {
        input: args.input,
        periods: args.periods,
        p: args.p,
        min_exceedances: args.min_exceedances,
        alpha: args.alpha,
        seed: args.seed,
        out_dir: args.out_dir,
    };
    let config = AnalysisConfig::resolve(flags, args.config.as_deref())?;
    let series = read_earnings(&config.input)?;
    let (report, artifacts) = analyze(&config, &series)?;
    let path = config.out_dir.join("report.json");
    write_file(&path, &to_json(&report)?)?;
    for artifact in &artifacts {
        write_file(&config.out_dir.join(&artifact.name), &artifact.contents)?;
    }
    eprintln!("wrote {} and {} CSV exports", path.display(), artifacts.len());
    Ok(())
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    tail: Tail,
    regime: TailRegime,
    p: f64,
    diagnostics: ScanDiagnostics,
    selected_index: usize,
    estimates: &'a [RiskEstimate],
    alpha_filtered: Option<&'a RiskEstimate>,
}

fn cmd_scan(args: &ScanArgs) -> Result<()> {
    let p = validate_p(args.p)?;
    let min_exceedances = validate_min_exceedances(args.min_exceedances)?;
    let alpha = args.alpha.map(parse_alpha).transpose()?;
    let returns = load_returns(&args.input)?;
    let sample = args.tail.sample(&returns);
    let settings = ScanSettings { p, regime: args.tail.regime(), min_exceedances };
    let context = format!("{} tail", args.tail.name());
    let scan = scan_thresholds(&sample, &settings, &CriticalValueTable::default()).map_err(CliError::pipeline(&context))?;
    let filtered = match alpha {
        Some(alpha) => Some(scan_with_alpha_filter(&scan, alpha).map_err(CliError::pipeline(format!("{context}, alpha {alpha}")))?),
        None => None,
    };
    let best = scan.selected_estimate();
    eprintln!("selected u = {} (xi = {}, VaR = {})", best.u, best.params.shape(), best.var);
    let out = args.output.out_dir.as_deref();
    let name = format!("scan_{}", args.tail.name());
    match args.output.format {
        Format::Csv => emit(out, &format!("{name}.csv"), &scan_csv(&scan)?),
        Format::Json => {
            let body = ScanOutput {
                tail: args.tail,
                regime: scan.regime,
                p,
                diagnostics: scan.diagnostics,
                selected_index: scan.selected,
                estimates: &scan.estimates,
                alpha_filtered: filtered,
            };
            emit(out, &format!("{name}.json"), &to_json(&body)?)
        }
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let params = GpdParams::new(args.xi, args.sigma).map_err(CliError::pipeline("simulate"))?;
    let sample = gpd_sample(&params, args.count, args.seed).map_err(CliError::pipeline("simulate"))?;
    let out = args.output.out_dir.as_deref();
    match args.output.format {
        Format::Csv => emit(out, "sample.csv", &csv_bytes(&["y"], sample.iter().map(|y| vec![y.to_string()]))?),
        Format::Json => emit(out, "sample.json", &to_json(&sample)?),
    }
}

#[derive(Serialize)]
struct TableCell {
    xi: f64,
    alpha: boxtail_core::SignificanceLevel,
    w2: f64,
    a2: f64,
}

fn cmd_gof_table(args: &OutputArgs) -> Result<()> {
    let table = CriticalValueTable::default();
    let cells: Vec<TableCell> = table.entries().map(|(xi, alpha, w2, a2)| TableCell { xi, alpha, w2, a2 }).collect();
    let out = args.out_dir.as_deref();
    match args.format {
        Format::Csv => emit(
            out,
            "gof_table.csv",
            &csv_bytes(
                &["xi", "alpha", "w2", "a2"],
                cells.iter().map(|c| vec![c.xi.to_string(), c.alpha.to_string(), c.w2.to_string(), c.a2.to_string()]),
            )?,
        ),
        Format::Json => emit(out, "gof_table.json", &to_json(&cells)?),
    }
}

#[derive(Serialize)]
struct TrendOutput {
    /// Calendar year at x = 0.
    first_year: i32,
    slope: f64,
    intercept: f64,
    yearly: Vec<boxtail_core::YearlyMean>,
}

fn cmd_trend(args: &ReturnsArgs) -> Result<()> {
    let returns = load_returns(&args.input)?;
    let yearly = yearly_means(&returns);
    let first_year = yearly.first().map_or(0, |y| y.year);
    let points: Vec<(f64, f64)> = yearly.iter().map(|y| ((y.year - first_year) as f64, y.mean)).collect();
    let fit = linear_trend(&points).map_err(CliError::pipeline("yearly means"))?;
    eprintln!("slope {} per year, intercept {} at {first_year}", fit.slope, fit.intercept);
    let out = args.output.out_dir.as_deref();
    match args.output.format {
        Format::Csv => {
            let rows = yearly
                .iter()
                .zip(&points)
                .map(|(y, (x, _))| vec![y.year.to_string(), y.mean.to_string(), y.count.to_string(), fit.at(*x).to_string()]);
            emit(out, "trend.csv", &csv_bytes(&["year", "mean", "count", "fitted"], rows)?)
        }
        Format::Json => {
            let body = TrendOutput { first_year, slope: fit.slope, intercept: fit.intercept, yearly };
            emit(out, "trend.json", &to_json(&body)?)
        }
    }
}

/// Pairs of numeric columns from a headed CSV whose header starts with `header`.
fn read_columns(path: &Path, header: &[&str], x: usize, y: usize) -> Result<Vec<(f64, f64)>> {
    read_rows(path, header)?
        .into_iter()
        .map(|(line, r)| Ok((parse_f64(path, line, &r[x], header[x])?, parse_f64(path, line, &r[y], header[y])?)))
        .collect()
}

fn box_groups(path: &Path) -> Result<Vec<(String, BoxPlotSummary)>> {
    let text = crate::io::read_to_string(path)?;
    let bad = |m: &str| CliError::Parse { path: path.to_path_buf(), line: 0, message: m.to_string() };
    let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    let periods = report["periods"].as_array().ok_or_else(|| bad("no `periods` array; expected an analyze report"))?;
    let num = |v: &serde_json::Value, k: &str| v[k].as_f64().ok_or_else(|| bad(&format!("box_plot.{k} missing")));
    let mut groups = Vec::new();
    for period in periods {
        let range = period["range"].as_str().unwrap_or("?");
        for tail in period["tails"].as_array().into_iter().flatten() {
            let b = &tail["box_plot"];
            if b.is_null() {
                continue;
            }
            let label = format!("{} {}", range.split(':').next().unwrap_or(range), tail["tail"].as_str().unwrap_or("?"));
            let summary = BoxPlotSummary {
                q1: num(b, "q1")?,
                median: num(b, "median")?,
                q3: num(b, "q3")?,
                iqr: num(b, "iqr")?,
                whisker_low: num(b, "whisker_low")?,
                whisker_high: num(b, "whisker_high")?,
                min_outlier: b["min_outlier"].as_f64(),
                max_outlier: b["max_outlier"].as_f64(),
            };
            groups.push((label, summary));
        }
    }
    Ok(groups)
}

fn cmd_plot(args: &PlotArgs) -> Result<()> {
    let svg = match args.kind {
        PlotKind::MeanExcess => {
            let points = read_columns(&args.input, &["u", "mean_excess", "count"], 0, 1)?;
            line_chart(&Labels { title: "Mean excess", x: "threshold u", y: "mean excess e(u)" }, &points, None)?
        }
        PlotKind::Var => {
            let header = ["u", "xi", "sigma", "n_u", "var", "es", "w2", "a2", "accepted_alphas"];
            let points = read_columns(&args.input, &header, 0, 4)?;
            line_chart(&Labels { title: "VaR by candidate threshold", x: "threshold u", y: "VaR" }, &points, None)?
        }
        PlotKind::Trend => {
            let header = ["year", "mean", "count", "fitted"];
            let points = read_columns(&args.input, &header, 0, 1)?;
            let fit = read_columns(&args.input, &header, 0, 3)?;
            line_chart(&Labels { title: "Yearly average returns", x: "year", y: "mean return" }, &points, Some(&fit))?
        }
        PlotKind::Box => box_chart(&Labels { title: "Returns by period and tail", x: "", y: "return" }, &box_groups(&args.input)?)?,
    };
    let stem = args.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
    let path = args.out_dir.join(format!("{stem}.svg"));
    write_file(&path, svg.as_bytes())?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
