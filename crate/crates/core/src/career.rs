//! Career-level smoothing, trimming, and aggregation of adjusted seasons.

use crate::error::Result;
use crate::spline::{smoothing_spline, Smoothing};

/// Averages each adjusted season with a natural smoothing spline fitted over
/// the career index. Non-finite entries are skipped and returned unchanged.
pub fn smooth_career(values: &[f64], smoothing: Smoothing) -> Result<Vec<f64>> {
    let idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite()).collect();
    let mut out = values.to_vec();
    if idx.len() < 3 {
        return Ok(out);
    }
    let x: Vec<f64> = idx.iter().map(|&i| (i + 1) as f64).collect();
    let y: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    let fitted = smoothing_spline(&x, &y, smoothing)?;
    for (k, &i) in idx.iter().enumerate() {
        out[i] = 0.5 * (values[i] + fitted[k]);
    }
    Ok(out)
}

/// Seasons kept after trimming sub-zero WAR at both ends of a career.
///
/// Returns `None` when no season is positive. Otherwise keeps everything from
/// the season just before the first positive one through `trailing` seasons
/// after the last positive one.
pub fn trim_career(war: &[f64], trailing: usize) -> Option<std::ops::RangeInclusive<usize>> {
    let first = war.iter().position(|&w| w > 0.0)?;
    let last = war.iter().rposition(|&w| w > 0.0)?;
    let start = first.saturating_sub(1);
    let end = (last + trailing).min(war.len() - 1);
    Some(start..=end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimming_rules() {
        assert_eq!(trim_career(&[1.0, 2.0, 0.5], 1), Some(0..=2));
        assert_eq!(trim_career(&[-1.0, -0.5, 2.0, 3.0, -0.2, -0.4], 1), Some(1..=4));
        assert_eq!(trim_career(&[-1.0, -0.5], 1), None);
        assert_eq!(trim_career(&[-1.0, -0.5, 2.0, 3.0, -0.2, -0.4], 2), Some(1..=5));
    }

    #[test]
    fn spike_stays_the_career_maximum() {
        let raw = [5.0, 5.0, 20.0, 5.0, 5.0];
        let s = smooth_career(&raw, Smoothing::Gcv).unwrap();
        assert!(s[2] < 20.0 && s[2] > 5.0);
        let argmax = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax, 2);
    }

    #[test]
    fn constant_and_linear_careers_unchanged() {
        let c = smooth_career(&[0.3; 8], Smoothing::Gcv).unwrap();
        assert!(c.iter().all(|v| (v - 0.3).abs() < 1e-9));
        let lin: Vec<f64> = (0..9).map(|i| 0.25 + 0.01 * i as f64).collect();
        let s = smooth_career(&lin, Smoothing::Gcv).unwrap();
        for (a, b) in s.iter().zip(&lin) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
