//! Empirical and theoretical mean-excess functions, and the data-driven
//! candidate thresholds the threshold scan iterates over.

use alloc::vec::Vec;

use crate::gpd::GpdParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MeanExcessPoint {
    pub u: f64,
    pub mean_excess: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeanExcessCurve {
    pub points: Vec<MeanExcessPoint>,
}

/// Average of `x - u` over the observations strictly above `u`, with their count.
pub fn mean_excess_empirical(sample: &[f64], u: f64) -> Result<(f64, usize)> {
    let mut sum = 0.0;
    let mut count = 0;
    for &x in sample.iter().filter(|&&x| x > u) {
        sum += x - u;
        count += 1;
    }
    if count == 0 {
        return Err(Error::NoExceedances);
    }
    Ok((sum / count as f64, count))
}

/// `e(u) = (σ + ξu) / (1 - ξ)`, valid for `ξ < 1` and `σ + ξu > 0`.
pub fn mean_excess_theoretical(params: &GpdParams, u: f64) -> Result<f64> {
    let (xi, sigma) = (params.shape(), params.scale());
    let numerator = sigma + xi * u;
    if xi >= 1.0 || numerator <= 0.0 {
        return Err(Error::InvalidParams);
    }
    Ok(numerator / (1.0 - xi))
}

/// Distinct observed values, ascending, with at least `min_exceedances`
/// observations strictly above them.
pub fn candidate_thresholds(sample: &[f64], min_exceedances: usize) -> Result<Vec<f64>> {
    if sample.len() <= min_exceedances {
        return Err(Error::TooFewObservations { needed: min_exceedances + 1, got: sample.len() });
    }
    if let Some(i) = sample.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue { index: i });
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let needed = min_exceedances.max(1);
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let value = sorted[i];
        let mut j = i + 1;
        while j < n && sorted[j] == value {
            j += 1;
        }
        if n - j < needed {
            break;
        }
        out.push(value);
        i = j;
    }
    Ok(out)
}

/// Empirical mean excess at every observed value that has an exceedance.
pub fn mean_excess_curve(sample: &[f64]) -> Result<MeanExcessCurve> {
    if sample.len() < 3 {
        return Err(Error::TooFewObservations { needed: 3, got: sample.len() });
    }
    let points = candidate_thresholds(sample, 1)?
        .into_iter()
        .map(|u| mean_excess_empirical(sample, u).map(|(mean_excess, count)| MeanExcessPoint { u, mean_excess, count }))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeanExcessCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn empirical_examples() {
        assert_eq!(mean_excess_empirical(&[1.0, 2.0, 3.0], 0.0).unwrap(), (2.0, 3));
        assert_eq!(mean_excess_empirical(&[1.0, 2.0, 3.0], 1.5).unwrap(), (1.0, 2));
        assert_eq!(mean_excess_empirical(&[5.0], 4.0).unwrap(), (1.0, 1));
        assert_eq!(mean_excess_empirical(&[1.0, 2.0], 2.0), Err(Error::NoExceedances));
    }

    #[test]
    fn theoretical_examples() {
        let e = |xi, sigma, u| mean_excess_theoretical(&GpdParams::new(xi, sigma).unwrap(), u);
        assert_eq!(e(0.0, 2.0, 0.0).unwrap(), 2.0);
        assert_eq!(e(0.0, 2.0, 17.0).unwrap(), 2.0);
        assert!((e(0.2, 1.0, 1.0).unwrap() - 1.5).abs() < 1e-12);
        assert!((e(-0.5, 1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(e(1.0, 1.0, 0.0), Err(Error::InvalidParams));
        assert_eq!(e(-0.5, 1.0, 2.0), Err(Error::InvalidParams));
    }

    #[test]
    fn candidate_examples() {
        assert_eq!(candidate_thresholds(&[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(candidate_thresholds(&[5.0, 3.0, 1.0, 4.0, 2.0], 2).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(candidate_thresholds(&[2.0; 6], 1).unwrap().is_empty());
        // ties collapse to one candidate and count only strict exceedances
        assert_eq!(candidate_thresholds(&[1.0, 1.0, 2.0, 3.0], 1).unwrap(), vec![1.0, 2.0]);
        assert_eq!(candidate_thresholds(&[1.0, 2.0], 2), Err(Error::TooFewObservations { needed: 3, got: 2 }));
    }

    #[test]
    fn candidate_count_bound() {
        let sample: Vec<f64> = (0..358).map(|i| libm::sqrt(i as f64)).collect();
        let c = candidate_thresholds(&sample, 10).unwrap();
        assert!(c.len() <= 348);
        assert_eq!(c.len(), 348);
    }

    #[test]
    fn curve_of_three_distinct_values() {
        let curve = mean_excess_curve(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(curve.points.len(), 2);
        assert_eq!(curve.points[0], MeanExcessPoint { u: 1.0, mean_excess: 1.5, count: 2 });
        assert_eq!(curve.points[1], MeanExcessPoint { u: 2.0, mean_excess: 1.0, count: 1 });
        assert!(mean_excess_curve(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn dense_evaluation_matches_brute_force() {
        let sample = [0.3, 1.1, 1.7, 2.4, 4.0];
        let brute = |u: f64| {
            let ex: Vec<f64> = sample.iter().filter(|&&x| x > u).map(|&x| x - u).collect();
            ex.iter().sum::<f64>() / ex.len() as f64
        };
        for k in 0..400 {
            let u = k as f64 * 0.01;
            let (e, _) = mean_excess_empirical(&sample, u).unwrap();
            assert!((e - brute(u)).abs() < 1e-12);
            // between order statistics e_n falls with slope -1
            let (e2, c2) = mean_excess_empirical(&sample, u + 1e-6).unwrap();
            let (_, c) = mean_excess_empirical(&sample, u).unwrap();
            if c == c2 {
                assert!(((e2 - e) / 1e-6 + 1.0).abs() < 1e-6);
            }
        }
    }
}
