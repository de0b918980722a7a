//! Percentile-matching transfer of playing-time values between seasons.

use crate::error::{Error, Result};
use crate::tail_ecdf::hazen_percentile;

/// A season's values sorted for percentile lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentileTable {
    sorted: Vec<f64>,
}

impl PercentileTable {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("quantile map needs a nonempty season".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("quantile map values must be finite"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(PercentileTable { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Position of `value` on the `[0, 1]` scale running from the season
    /// minimum to the season maximum, linear between order statistics.
    fn position(&self, value: f64) -> f64 {
        let s = &self.sorted;
        let n = s.len();
        if n == 1 {
            return 0.5;
        }
        if value <= s[0] {
            return 0.0;
        }
        if value >= s[n - 1] {
            return 1.0;
        }
        // s[i] <= value < s[i + 1]; among ties use the middle of the run
        let lo = s.partition_point(|&x| x < value);
        let hi = s.partition_point(|&x| x <= value);
        if hi > lo {
            return 0.5 * ((lo as f64) + (hi - 1) as f64) / (n - 1) as f64;
        }
        let i = lo - 1;
        let f = (value - s[i]) / (s[i + 1] - s[i]);
        (i as f64 + f) / (n - 1) as f64
    }

    fn value_at(&self, position: f64) -> f64 {
        let s = &self.sorted;
        let n = s.len();
        if n == 1 {
            return s[0];
        }
        let h = position.clamp(0.0, 1.0) * (n - 1) as f64;
        let i = (h.floor() as usize).min(n - 2);
        let f = h - i as f64;
        s[i] + f * (s[i + 1] - s[i])
    }

    /// Hazen percentile of `value` within this season.
    pub fn percentile(&self, value: f64) -> f64 {
        let n = self.sorted.len();
        let lo = hazen_percentile(1, n);
        let hi = hazen_percentile(n, n);
        lo + self.position(value) * (hi - lo)
    }
}

/// Target-season value at the source-season percentile of `value`.
///
/// Hazen percentiles are affine in rank, so matching them after aligning the
/// two seasons' extreme plotting positions is interpolation on the
/// rank-fraction scale: minimum maps to minimum, median to median, maximum to
/// maximum, and seasons of equal size match Hazen percentiles exactly.
pub fn quantile_map(value: f64, source: &PercentileTable, target: &PercentileTable) -> f64 {
    target.value_at(source.position(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn extremes_and_median() {
        let s = PercentileTable::new(&[10.0, 20.0, 30.0, 40.0, 50.0]).unwrap();
        let t = PercentileTable::new(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        assert_eq!(quantile_map(50.0, &s, &t), 7.0);
        assert_eq!(quantile_map(10.0, &s, &t), 1.0);
        assert_eq!(quantile_map(30.0, &s, &t), 4.0);
    }

    #[test]
    fn hazen_quarter_point() {
        // Hazen percentile 0.25 of four values: (j - 1/3)/(4 + 1/3) = 0.25 at j = 1.4166..
        let s = PercentileTable::new(&[10.0, 20.0, 30.0, 40.0]).unwrap();
        let t = PercentileTable::new(&[100.0, 200.0, 300.0, 400.0]).unwrap();
        let j = 0.25 * (4.0 + 1.0 / 3.0) + 1.0 / 3.0;
        let value = 10.0 + (j - 1.0) * 10.0;
        assert_relative_eq!(s.percentile(value), 0.25, epsilon = 1e-12);
        assert_relative_eq!(quantile_map(value, &s, &t), 100.0 + (j - 1.0) * 100.0, epsilon = 1e-9);
    }

    #[test]
    fn ties_map_to_the_middle_of_their_run() {
        let s = PercentileTable::new(&[1.0, 2.0, 2.0, 2.0, 3.0]).unwrap();
        let t = PercentileTable::new(&[10.0, 20.0, 30.0, 40.0, 50.0]).unwrap();
        assert_eq!(quantile_map(2.0, &s, &t), 30.0);
    }
}
