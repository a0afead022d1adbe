//! Cramér–von Mises and Anderson–Darling tests of a fitted GPD.
//!
//! Excesses are mapped through the fitted distribution function; under a
//! correct model the resulting values are uniform. Critical values depend on
//! the shape parameter because the parameters were estimated from the same
//! data, and are tabulated only for `0 ≤ ξ ≤ 0.3`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::gpd::GpdParams;
use crate::{Error, Result};

/// Upper-tail significance levels of the critical-value table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignificanceLevel {
    P500,
    P250,
    P100,
    P050,
    P025,
    P010,
    P005,
}

impl SignificanceLevel {
    /// Table column order: decreasing α.
    pub const ALL: [SignificanceLevel; 7] = [
        SignificanceLevel::P500,
        SignificanceLevel::P250,
        SignificanceLevel::P100,
        SignificanceLevel::P050,
        SignificanceLevel::P025,
        SignificanceLevel::P010,
        SignificanceLevel::P005,
    ];

    pub fn value(self) -> f64 {
        match self {
            SignificanceLevel::P500 => 0.5,
            SignificanceLevel::P250 => 0.25,
            SignificanceLevel::P100 => 0.1,
            SignificanceLevel::P050 => 0.05,
            SignificanceLevel::P025 => 0.025,
            SignificanceLevel::P010 => 0.01,
            SignificanceLevel::P005 => 0.005,
        }
    }

    pub fn from_value(alpha: f64) -> Option<Self> {
        Self::ALL.into_iter().find(|level| (level.value() - alpha).abs() < 1e-12)
    }

    fn column(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SignificanceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for SignificanceLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alpha: f64 = s.trim().parse().map_err(|_| Error::InvalidProbability(f64::NAN))?;
        Self::from_value(alpha).ok_or(Error::InvalidProbability(alpha))
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for SignificanceLevel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

/// Critical values `(W², A²)` indexed by shape row and significance column.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValueTable {
    shapes: [f64; 4],
    cells: [[(f64, f64); 7]; 4],
}

impl Default for CriticalValueTable {
    /// Standard GPD critical values for `ξ ∈ {0, 0.1, 0.2, 0.3}`.
    fn default() -> Self {
        Self {
            shapes: [0.0, 0.1, 0.2, 0.3],
            cells: [
                [(0.057, 0.397), (0.086, 0.569), (0.124, 0.796), (0.153, 0.974), (0.183, 1.158), (0.224, 1.409), (0.255, 1.603)],
                [(0.055, 0.386), (0.081, 0.550), (0.116, 0.766), (0.144, 0.935), (0.172, 1.110), (0.210, 1.348), (0.240, 1.532)],
                [(0.053, 0.376), (0.078, 0.534), (0.111, 0.741), (0.137, 0.903), (0.164, 1.069), (0.200, 1.296), (0.228, 1.471)],
                [(0.052, 0.369), (0.076, 0.522), (0.108, 0.722), (0.133, 0.879), (0.158, 1.039), (0.193, 1.257), (0.220, 1.426)],
            ],
        }
    }
}

impl CriticalValueTable {
    pub fn shapes(&self) -> &[f64; 4] {
        &self.shapes
    }

    pub fn critical(&self, row: usize, level: SignificanceLevel) -> (f64, f64) {
        self.cells[row][level.column()]
    }

    /// All cells as `(ξ, α, W² critical, A² critical)`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (f64, SignificanceLevel, f64, f64)> + '_ {
        self.shapes.iter().enumerate().flat_map(move |(row, &xi)| {
            SignificanceLevel::ALL.into_iter().map(move |level| {
                let (w2, a2) = self.critical(row, level);
                (xi, level, w2, a2)
            })
        })
    }

    /// Critical values linearly interpolated in `ξ`; `None` outside the tabulated range.
    pub fn interpolate(&self, shape: f64) -> Option<[(f64, f64); 7]> {
        let last = self.shapes.len() - 1;
        if !(self.shapes[0]..=self.shapes[last]).contains(&shape) {
            return None;
        }
        if let Some(row) = self.shapes.iter().position(|&s| s == shape) {
            return Some(self.cells[row]);
        }
        let row = self.shapes.iter().rposition(|&s| s < shape).unwrap_or(0).min(last - 1);
        let frac = (shape - self.shapes[row]) / (self.shapes[row + 1] - self.shapes[row]);
        let mut out = [(0.0, 0.0); 7];
        for (col, cell) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.cells[row][col], self.cells[row + 1][col]);
            *cell = (lo.0 + (hi.0 - lo.0) * frac, lo.1 + (hi.1 - lo.1) * frac);
        }
        Some(out)
    }

    /// Per-level verdicts for the two statistics at a given shape.
    pub fn verdicts(&self, shape: f64, w2: f64, a2: f64) -> Vec<LevelVerdict> {
        let criticals = self.interpolate(shape);
        SignificanceLevel::ALL
            .into_iter()
            .map(|alpha| match criticals {
                Some(c) => {
                    let (w2_critical, a2_critical) = c[alpha.column()];
                    LevelVerdict {
                        alpha,
                        w2_critical: Some(w2_critical),
                        a2_critical: Some(a2_critical),
                        w2: Verdict::compare(w2, w2_critical),
                        a2: Verdict::compare(a2, a2_critical),
                    }
                }
                None => {
                    LevelVerdict { alpha, w2_critical: None, a2_critical: None, w2: Verdict::NotApplicable, a2: Verdict::NotApplicable }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum Verdict {
    Accept,
    Reject,
    NotApplicable,
}

impl Verdict {
    fn compare(statistic: f64, critical: f64) -> Self {
        if statistic <= critical {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LevelVerdict {
    pub alpha: SignificanceLevel,
    pub w2_critical: Option<f64>,
    pub a2_critical: Option<f64>,
    pub w2: Verdict,
    pub a2: Verdict,
}

impl LevelVerdict {
    /// `Some(true)` when both statistics accept, `None` when the table does not apply.
    pub fn accepted(&self) -> Option<bool> {
        match (self.w2, self.a2) {
            (Verdict::NotApplicable, _) | (_, Verdict::NotApplicable) => None,
            (w2, a2) => Some(w2 == Verdict::Accept && a2 == Verdict::Accept),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GofReport {
    pub w2: f64,
    pub a2: f64,
    /// Number of nonzero transformed values the statistics were computed on.
    pub n_used: usize,
    pub shape_used: f64,
    pub verdicts: Vec<LevelVerdict>,
}

impl GofReport {
    pub fn verdict(&self, alpha: SignificanceLevel) -> &LevelVerdict {
        &self.verdicts[alpha.column()]
    }

    pub fn accepts(&self, alpha: SignificanceLevel) -> Option<bool> {
        self.verdict(alpha).accepted()
    }

    pub fn is_applicable(&self) -> bool {
        self.verdicts.iter().all(|v| v.accepted().is_some())
    }

    pub fn accepted_levels(&self) -> Vec<SignificanceLevel> {
        self.verdicts.iter().filter(|v| v.accepted() == Some(true)).map(|v| v.alpha).collect()
    }
}

/// `z_i = G(y_i)` sorted ascending.
pub fn transform_to_uniform(excesses: &[f64], params: &GpdParams) -> Result<Vec<f64>> {
    if excesses.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = excesses.iter().position(|y| y.is_nan()) {
        return Err(Error::NonFiniteValue { index: i });
    }
    let mut z: Vec<f64> = excesses.iter().map(|&y| params.cdf(y)).collect();
    z.sort_by(f64::total_cmp);
    Ok(z)
}

fn check_probabilities(z: &[f64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = z.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::BoundaryValue { index: i });
    }
    if z.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Unsorted);
    }
    Ok(())
}

/// `W² = Σ (z_i - (2i-1)/(2n))² + 1/(12n)` over sorted `z`.
pub fn cramer_von_mises(z: &[f64]) -> Result<f64> {
    check_probabilities(z)?;
    let n = z.len() as f64;
    let sum: f64 = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let d = zi - (2 * i + 1) as f64 / (2.0 * n);
            d * d
        })
        .sum();
    Ok(sum + 1.0 / (12.0 * n))
}

const Z_CLAMP: f64 = 1e-12;

/// `A² = -n - (1/n) Σ (2i-1)[ln z_i + ln(1 - z_{n+1-i})]` over sorted `z`.
///
/// Values are clamped into `[1e-12, 1 - 1e-12]` before taking logarithms.
pub fn anderson_darling(z: &[f64]) -> Result<f64> {
    check_probabilities(z)?;
    let n = z.len();
    let clamp = |v: f64| v.clamp(Z_CLAMP, 1.0 - Z_CLAMP);
    let sum: f64 = (0..n)
        .map(|i| {
            let lower = clamp(z[i]);
            let upper = clamp(z[n - 1 - i]);
            (2 * i + 1) as f64 * (libm::log(lower) + libm::log1p(-upper))
        })
        .sum();
    Ok(-(n as f64) - sum / n as f64)
}

/// Both statistics on the nonzero transformed excesses, with per-level verdicts.
pub fn test_gpd_fit(excesses: &[f64], params: &GpdParams, table: &CriticalValueTable) -> Result<GofReport> {
    let z: Vec<f64> = transform_to_uniform(excesses, params)?.into_iter().filter(|&v| v != 0.0).collect();
    let w2 = cramer_von_mises(&z)?;
    let a2 = anderson_darling(&z)?;
    Ok(GofReport { w2, a2, n_used: z.len(), shape_used: params.shape(), verdicts: table.verdicts(params.shape(), w2, a2) })
}
