//! CSV ingestion and the small amount of number formatting the exports need.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use boxtail_core::{Date, EarningsSeries, Error as CoreError, Observation};

use crate::error::{CliError, Result};

/// `%g`-style formatting with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Write { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

/// Writes to `dir/name` when a directory is given, otherwise to stdout.
pub fn emit(dir: Option<&Path>, name: &str, contents: &[u8]) -> Result<()> {
    match dir {
        Some(dir) => write_file(&dir.join(name), contents),
        None => std::io::stdout().lock().write_all(contents).map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source }),
    }
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn reader(path: &Path, text: &str, header: &[&str]) -> Result<csv::Reader<std::io::Cursor<Vec<u8>>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(std::io::Cursor::new(text.as_bytes().to_vec()));
    let found = rdr.headers().map_err(|e| parse_error(path, 1, e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_error(
            path,
            1,
            format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(rdr)
}

/// Rows of a headed CSV as `(line number, fields)`.
pub fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let text = read_to_string(path)?;
    let mut rdr = reader(path, &text, header)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record));
    }
    Ok(rows)
}

pub fn parse_f64(path: &Path, line: u64, field: &str, column: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| parse_error(path, line, format!("{column}: `{field}` is not a number")))
}

/// Reads a `date,revenue` file into a validated series.
pub fn read_earnings(path: &Path) -> Result<EarningsSeries> {
    let rows = read_rows(path, &["date", "revenue"])?;
    let mut lines = Vec::with_capacity(rows.len());
    let mut observations = Vec::with_capacity(rows.len());
    for (line, record) in &rows {
        let date: Date = record[0].parse().map_err(|_| parse_error(path, *line, format!("date: `{}` is not YYYY-MM-DD", &record[0])))?;
        let revenue = parse_f64(path, *line, &record[1], "revenue")?;
        lines.push(*line);
        observations.push(Observation { date, revenue });
    }
    EarningsSeries::new(observations).map_err(|e| {
        let line = match e {
            CoreError::NegativeRevenue { index } | CoreError::NonFiniteValue { index } | CoreError::UnorderedDates { index } => {
                lines.get(index).copied()
            }
            _ => None,
        };
        match line {
            Some(line) => parse_error(path, line, e.to_string()),
            None => CliError::Pipeline { context: path.display().to_string(), source: e },
        }
    })
}

/// Serialises rows of already-formatted cells as CSV.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Internal(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}
