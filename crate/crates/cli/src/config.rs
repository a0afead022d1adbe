use std::path::{Path, PathBuf};

use boxtail_core::{DateRange, SignificanceLevel, DEFAULT_MIN_EXCEEDANCES, DEFAULT_TAIL_PROBABILITY};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Everything `analyze` needs, after flags and the optional config file are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub periods: Vec<DateRange>,
    pub p: f64,
    pub min_exceedances: usize,
    pub alpha: Option<SignificanceLevel>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// On-disk form of the config. Relative paths resolve against the file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub periods: Vec<String>,
    pub p: Option<f64>,
    pub min_exceedances: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Values given on the command line; these win over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub periods: Vec<String>,
    pub p: Option<f64>,
    pub min_exceedances: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// The part of the config recorded in the report: no absolute paths.
#[derive(Debug, Serialize)]
pub struct RecordedConfig {
    pub input: String,
    pub periods: Vec<DateRange>,
    pub p: f64,
    pub min_exceedances: usize,
    pub alpha: Option<SignificanceLevel>,
    pub seed: u64,
}

pub fn validate_p(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(CliError::Invalid(format!("--p must lie strictly between 0 and 1, got {p}")))
    }
}

pub fn validate_min_exceedances(m: usize) -> Result<usize> {
    if m >= 2 {
        Ok(m)
    } else {
        Err(CliError::Invalid(format!("--min-exceedances must be at least 2, got {m}")))
    }
}

pub fn parse_alpha(alpha: f64) -> Result<SignificanceLevel> {
    SignificanceLevel::from_value(alpha).ok_or_else(|| {
        let levels: Vec<String> = SignificanceLevel::ALL.iter().map(|l| l.to_string()).collect();
        CliError::Invalid(format!("--alpha {alpha} is not a tabulated level (one of {})", levels.join(", ")))
    })
}

pub fn parse_periods(periods: &[String]) -> Result<Vec<DateRange>> {
    periods.iter().map(|s| s.parse().map_err(|e| CliError::Invalid(format!("--periods `{s}`: {e}")))).collect()
}

impl Overrides {
    /// Checks the flag values alone, so bad flags fail before any file is touched.
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p {
            validate_p(p)?;
        }
        if let Some(m) = self.min_exceedances {
            validate_min_exceedances(m)?;
        }
        if let Some(a) = self.alpha {
            parse_alpha(a)?;
        }
        parse_periods(&self.periods)?;
        Ok(())
    }
}

impl AnalysisConfig {
    pub fn resolve(flags: Overrides, file: Option<&Path>) -> Result<Self> {
        flags.validate()?;
        let (cfg, base) = match file {
            Some(path) => {
                let text = crate::io::read_to_string(path)?;
                let cfg: ConfigFile =
                    toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {}", path.display(), e.message())))?;
                (cfg, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let input = match (flags.input, cfg.input) {
            (Some(input), _) => input,
            (None, Some(input)) => base.join(input),
            (None, None) => return Err(CliError::Invalid("no input file: pass --input or set `input` in the config".into())),
        };
        let periods = if flags.periods.is_empty() { cfg.periods } else { flags.periods };
        let alpha = flags.alpha.or(cfg.alpha).map(parse_alpha).transpose()?;
        Ok(Self {
            input,
            periods: parse_periods(&periods)?,
            p: validate_p(flags.p.or(cfg.p).unwrap_or(DEFAULT_TAIL_PROBABILITY))?,
            min_exceedances: validate_min_exceedances(flags.min_exceedances.or(cfg.min_exceedances).unwrap_or(DEFAULT_MIN_EXCEEDANCES))?,
            alpha,
            seed: flags.seed.or(cfg.seed).unwrap_or(0),
            out_dir: flags.out_dir.or_else(|| cfg.out_dir.map(|d| base.join(d))).unwrap_or_else(|| PathBuf::from("boxtail-report")),
        })
    }

    pub fn recorded(&self) -> RecordedConfig {
        RecordedConfig {
            input: self.input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            periods: self.periods.clone(),
            p: self.p,
            min_exceedances: self.min_exceedances,
            alpha: self.alpha,
            seed: self.seed,
        }
    }
}
