#![allow(dead_code)]

use fullhouse_core::distributions::TalentLaw;

/// Right-continuous empirical CDF of ascending `sorted` at `t`.
pub fn ecdf(sorted: &[f64], t: f64) -> f64 {
    sorted.partition_point(|&v| v <= t) as f64 / sorted.len() as f64
}

/// Points where the supremum of `|F~ - F^|` can be attained: every sample,
/// the value just below it, midpoints, and both extensions.
pub fn probe_points(sorted: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    let span = (sorted[n - 1] - sorted[0]).max(1.0);
    let mut pts = vec![sorted[0] - 10.0 * span, sorted[n - 1] + 10.0 * span];
    for (i, &y) in sorted.iter().enumerate() {
        pts.push(y);
        pts.push(y.next_down());
        if i + 1 < n {
            pts.push(0.5 * (y + sorted[i + 1]));
        }
    }
    pts
}

pub fn four_laws() -> [TalentLaw; 4] {
    [
        TalentLaw::Pareto { alpha: TalentLaw::pareto_80_20_alpha() },
        TalentLaw::Pareto { alpha: 3.0 },
        TalentLaw::Normal { location: 0.0, scale: 1.0 },
        TalentLaw::FoldedNormal { location: 0.0, scale: 1.0 },
    ]
}

/// Sorted copy with exact duplicates removed.
pub fn distinct_sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}
