//! Calendar-year average returns and their least-squares trend line.

use alloc::vec::Vec;

use crate::series::ReturnSeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct YearlyMean {
    pub year: i32,
    pub mean: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LinearTrend {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearTrend {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Mean return per calendar year of the return dates, in year order.
pub fn yearly_means(returns: &ReturnSeries) -> Vec<YearlyMean> {
    let mut out: Vec<YearlyMean> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    let mut sorted: Vec<_> = returns.returns().to_vec();
    sorted.sort_by_key(|r| r.date);
    for r in sorted {
        match out.last_mut() {
            Some(last) if last.year == r.date.year() => {
                last.count += 1;
                *sums.last_mut().unwrap() += r.value;
            }
            _ => {
                out.push(YearlyMean { year: r.date.year(), mean: 0.0, count: 1 });
                sums.push(r.value);
            }
        }
    }
    for (m, s) in out.iter_mut().zip(sums) {
        m.mean = s / m.count as f64;
    }
    out
}

/// Ordinary least squares fit of `y = intercept + slope·x`.
pub fn linear_trend(points: &[(f64, f64)]) -> Result<LinearTrend> {
    if points.len() < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: points.len() });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateSample);
    }
    let slope = sxy / sxx;
    Ok(LinearTrend { slope, intercept: mean_y - slope * mean_x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Return;
    use crate::Date;
    use alloc::vec;

    #[test]
    fn trend_examples() {
        let flat = linear_trend(&[(0.0, 0.3), (1.0, 0.3), (2.0, 0.3)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        let unit = linear_trend(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!((unit.slope, unit.intercept), (1.0, 0.0));
        // numpy.linalg.lstsq on x = 0..4, y = (0.12, 0.05, 0.20, 0.11, 0.16)
        let five = linear_trend(&[(0.0, 0.12), (1.0, 0.05), (2.0, 0.20), (3.0, 0.11), (4.0, 0.16)]).unwrap();
        assert!((five.slope - 0.014).abs() < 1e-10);
        assert!((five.intercept - 0.1).abs() < 1e-10);
        assert!(linear_trend(&[(1.0, 2.0)]).is_err());
        assert_eq!(linear_trend(&[(1.0, 2.0), (1.0, 3.0)]), Err(Error::DegenerateSample));
    }

    #[test]
    fn groups_by_calendar_year() {
        let d = |y, m, day| Date::from_ymd(y, m, day).unwrap();
        let r = ReturnSeries::new(vec![
            Return { date: d(1990, 1, 7), value: 0.2 },
            Return { date: d(1990, 12, 30), value: -0.1 },
            Return { date: d(1991, 1, 6), value: 0.4 },
        ]);
        let m = yearly_means(&r);
        assert_eq!(m.len(), 2);
        assert_eq!((m[0].year, m[0].count), (1990, 2));
        assert!((m[0].mean - 0.05).abs() < 1e-15);
        assert_eq!((m[1].year, m[1].mean), (1991, 0.4));
    }
}
