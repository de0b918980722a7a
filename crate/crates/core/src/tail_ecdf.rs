//! Interpolated empirical CDF with extrapolated support endpoints, and the
//! upper-tail regression used to place the right endpoint.

use crate::error::{Error, Result};
use crate::regression::{ols, RunningQuadratic, RunningSimple};
use crate::special::{student_t_quantile, Prob};
use serde::{Deserialize, Serialize};

const TIE_STEP: f64 = 1e-9;
/// `|c|` below this uses the logit family only.
pub const EVI_THRESHOLD: f64 = 0.05;
/// Samples below this size skip the k screen and regress on every point.
pub const MIN_SCREEN_SIZE: usize = 36;
const ADJ_R2_TIE: f64 = 1e-12;

/// Hazen plotting position `(j - 1/3) / (n + 1/3)`, with its complement.
pub fn hazen_pair(j: usize, n: usize) -> Prob {
    let d = n as f64 + 1.0 / 3.0;
    Prob::new((j as f64 - 1.0 / 3.0) / d, ((n - j) as f64 + 2.0 / 3.0) / d)
}

pub fn hazen_percentile(j: usize, n: usize) -> f64 {
    hazen_pair(j, n).p
}

/// Sorts and separates ties by successive multiples of `1e-9 * range`.
///
/// Returns the perturbed values and whether any tie was broken.
pub fn sort_and_break_ties(samples: &[f64]) -> Result<(Vec<f64>, bool)> {
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("samples contain a non-finite value"));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let range = v.last().copied().unwrap_or(0.0) - v.first().copied().unwrap_or(0.0);
    let scale = if range > 0.0 {
        range
    } else {
        v.iter().fold(1.0_f64, |m, x| m.max(x.abs()))
    };
    let step = TIE_STEP * scale;
    let mut perturbed = false;
    for i in 1..v.len() {
        if v[i] <= v[i - 1] {
            v[i] = v[i - 1] + step;
            perturbed = true;
        }
    }
    Ok((v, perturbed))
}

/// Piecewise-linear CDF through surrogate midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolatedCdf {
    /// Ascending samples after tie separation.
    pub sorted_samples: Vec<f64>,
    /// Ascending samples as supplied.
    pub raw_sorted: Vec<f64>,
    /// `n + 1` strictly increasing knots; knot `j` (0-based) has CDF value `j / n`.
    pub surrogates: Vec<f64>,
    pub y_star: f64,
    pub y_star_star: f64,
    pub ties_perturbed: bool,
    /// How `y_star_star` was chosen when it was not supplied.
    pub extension: Option<UpperExtension>,
}

impl InterpolatedCdf {
    /// Builds the CDF; `None` requests the automatic endpoint rules.
    ///
    /// Two samples suffice when both endpoints are supplied.
    pub fn build(samples: &[f64], y_star: Option<f64>, y_star_star: Option<f64>) -> Result<Self> {
        let n = samples.len();
        let needed = if y_star.is_some() && y_star_star.is_some() { 2 } else { 3 };
        if n < needed {
            return Err(Error::InsufficientData(format!(
                "interpolated CDF needs at least {needed} samples, got {n}"
            )));
        }
        let (sorted, ties_perturbed) = sort_and_break_ties(samples)?;
        let mut raw_sorted = samples.to_vec();
        raw_sorted.sort_by(f64::total_cmp);
        let y_star = match y_star {
            Some(v) if v > 0.0 && v.is_finite() => v,
            Some(v) => return Err(Error::domain(format!("y* must be positive, got {v}"))),
            None => sorted[1] - sorted[0],
        };
        let (y_star_star, extension) = match y_star_star {
            Some(v) if v > 0.0 && v.is_finite() => (v, None),
            Some(v) => return Err(Error::domain(format!("y** must be positive, got {v}"))),
            None => {
                let ext = compute_upper_extension(&sorted)?;
                (ext.y_star_star, Some(ext))
            }
        };
        let mut surrogates = Vec::with_capacity(n + 1);
        surrogates.push(sorted[0] - y_star);
        for j in 1..n {
            surrogates.push(0.5 * (sorted[j] + sorted[j - 1]));
        }
        surrogates.push(sorted[n - 1] + y_star_star);
        Ok(InterpolatedCdf {
            sorted_samples: sorted,
            raw_sorted,
            surrogates,
            y_star,
            y_star_star,
            ties_perturbed,
            extension,
        })
    }

    pub fn n(&self) -> usize {
        self.sorted_samples.len()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_pair(t).p
    }

    /// CDF at `t` with the complement computed from the upper end.
    pub fn eval_pair(&self, t: f64) -> Prob {
        let s = &self.surrogates;
        let n = self.n();
        if t.is_nan() {
            return Prob::new(f64::NAN, f64::NAN);
        }
        if t <= s[0] {
            return Prob::ZERO;
        }
        if t >= s[n] {
            return Prob::ONE;
        }
        // s[i] <= t < s[i + 1]
        let i = s.partition_point(|&x| x <= t) - 1;
        let width = s[i + 1] - s[i];
        let up = (t - s[i]) / width;
        let down = (s[i + 1] - t) / width;
        let nf = n as f64;
        Prob::new((i as f64 + up) / nf, ((n - i - 1) as f64 + down) / nf)
    }

    pub fn inverse(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("CDF inverse needs 0 <= p <= 1, got {p}")));
        }
        Ok(self.inverse_pair(Prob::from_p(p)))
    }

    /// Inverse working from whichever end of the pair is smaller.
    pub fn inverse_pair(&self, p: Prob) -> f64 {
        let s = &self.surrogates;
        let n = self.n();
        let nf = n as f64;
        if p.p <= 0.0 {
            return s[0];
        }
        if p.q <= 0.0 {
            return s[n];
        }
        if p.p <= p.q {
            let pos = p.p * nf;
            let i = (pos.floor() as usize).min(n - 1);
            let f = pos - i as f64;
            s[i] + f * (s[i + 1] - s[i])
        } else {
            let pos = p.q * nf;
            let j = (pos.floor() as usize).min(n - 1);
            let g = pos - j as f64;
            let i = n - 1 - j;
            s[i + 1] - g * (s[i + 1] - s[i])
        }
    }
}

/// `F~(Y_(n); y)` for an ascending, tie-free sample and candidate endpoint `y`.
pub fn cdf_at_max(sorted: &[f64], y: f64) -> Prob {
    let n = sorted.len();
    let d = 0.5 * (sorted[n - 1] - sorted[n - 2]);
    let nf = n as f64;
    let up = d / (d + y);
    let down = y / (d + y);
    Prob::new((nf - 1.0 + up) / nf, down / nf)
}

/// Regressor transform applied to plotting positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailTransform {
    Linear,
    Logit,
    LogitQuadratic,
    /// `f_c(p) = ((-n ln p)^(-c) - 1) / c`.
    ExtremeValue { c: f64, n: usize },
    ExtremeValueQuadratic { c: f64, n: usize },
}

impl TailTransform {
    fn base(&self, p: Prob) -> f64 {
        match *self {
            TailTransform::Linear => p.p,
            TailTransform::Logit | TailTransform::LogitQuadratic => p.logit(),
            TailTransform::ExtremeValue { c, n } | TailTransform::ExtremeValueQuadratic { c, n } => {
                let s = -(n as f64) * p.ln_p();
                // ((s)^(-c) - 1) / c = expm1(-c ln s) / c
                (-c * s.ln()).exp_m1() / c
            }
        }
    }

    fn quadratic(&self) -> bool {
        matches!(
            self,
            TailTransform::LogitQuadratic | TailTransform::ExtremeValueQuadratic { .. }
        )
    }

    fn columns(&self, ps: &[Prob]) -> Vec<Vec<f64>> {
        let r: Vec<f64> = ps.iter().map(|p| self.base(*p)).collect();
        if self.quadratic() {
            let r2 = r.iter().map(|v| v * v).collect();
            vec![r, r2]
        } else {
            vec![r]
        }
    }

    /// Percentile from a regressor value on the base scale.
    fn unbase(&self, r: f64) -> Option<Prob> {
        match *self {
            TailTransform::Linear => {
                if (0.0..=1.0).contains(&r) {
                    Some(Prob::from_p(r))
                } else {
                    None
                }
            }
            TailTransform::Logit | TailTransform::LogitQuadratic => Some(Prob::from_logit(r)),
            TailTransform::ExtremeValue { c, n } | TailTransform::ExtremeValueQuadratic { c, n } => {
                let base = 1.0 + c * r;
                if !(base > 0.0) {
                    return None;
                }
                let ln_p = -(-base.ln() / c).exp() / n as f64;
                Some(Prob::new(ln_p.exp(), -ln_p.exp_m1()))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TailTransform::Linear => "linear",
            TailTransform::Logit => "logit",
            TailTransform::LogitQuadratic => "logit-quadratic",
            TailTransform::ExtremeValue { .. } => "extreme-value",
            TailTransform::ExtremeValueQuadratic { .. } => "extreme-value-quadratic",
        }
    }
}

/// Upper-tail regression of order statistics on transformed plotting positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub k: usize,
    pub transform: TailTransform,
    /// Intercept, slope, and (quadratic forms) the squared-term coefficient.
    pub coefficients: Vec<f64>,
    pub adjusted_r2: f64,
    /// Extreme-value index estimate at this `k`, when it could be computed.
    pub evi: Option<f64>,
    /// Adjusted R^2 of every candidate that could be fitted.
    pub candidates: Vec<(TailTransform, f64)>,
}

impl TailFit {
    /// `h(p)`: the fitted statistic at percentile `p`.
    pub fn predict(&self, p: Prob) -> f64 {
        let r = self.transform.base(p);
        let c = &self.coefficients;
        if self.transform.quadratic() {
            c[0] + c[1] * r + c[2] * r * r
        } else {
            c[0] + c[1] * r
        }
    }

    /// `h^-1(y)` on the increasing branch, or `None` where undefined.
    pub fn inverse(&self, y: f64) -> Option<Prob> {
        let c = &self.coefficients;
        let r = if self.transform.quadratic() {
            let disc = c[1] * c[1] + 4.0 * c[2] * (y - c[0]);
            if !(disc >= 0.0) {
                return None;
            }
            let denom = c[1] + disc.sqrt();
            if !(denom > 0.0) {
                return None;
            }
            2.0 * (y - c[0]) / denom
        } else {
            if !(c[1] > 0.0) {
                return None;
            }
            (y - c[0]) / c[1]
        };
        if !r.is_finite() {
            return None;
        }
        self.transform.unbase(r)
    }
}

/// The candidate window `[K1, K2]` for the number of tail points.
pub fn k_bounds(n: usize) -> (usize, usize) {
    let nf = n as f64;
    let k1 = 6usize.max((1.3 * nf.sqrt()).floor() as usize);
    let k2 = 2 * (nf.log10() * nf.sqrt()).floor() as usize;
    (k1, k2)
}

fn t_quantile_75(df: f64) -> Result<f64> {
    if df < 100.0 {
        return student_t_quantile(0.75, df);
    }
    // Cornish-Fisher expansion around the normal quartile
    let z: f64 = 0.674_489_750_196_081_7;
    let z3 = z.powi(3);
    let z5 = z.powi(5);
    let z7 = z.powi(7);
    Ok(z + (z3 + z) / (4.0 * df)
        + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * df * df)
        + (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * df.powi(3)))
}

/// Chooses the number of upper-tail points for the extrapolation regression.
pub fn select_k(samples: &[f64]) -> Result<usize> {
    let n = samples.len();
    if n < MIN_SCREEN_SIZE {
        return Err(Error::InsufficientData(format!(
            "tail selection needs at least {MIN_SCREEN_SIZE} samples, got {n}"
        )));
    }
    let (sorted, _) = sort_and_break_ties(samples)?;
    let (k1, k2) = k_bounds(n);
    let k2 = k2.min(n);

    let mut logit = RunningSimple::default();
    let mut linear = RunningSimple::default();
    let mut quad = RunningQuadratic::default();
    // (k, slope, se, best adjusted R^2)
    let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
    for k in 1..=k2 {
        let j = n + 1 - k;
        let p = hazen_pair(j, n);
        let y = sorted[j - 1];
        let z = p.logit();
        logit.push(z, y);
        linear.push(p.p, y);
        quad.push(z, y);
        if k < k1 {
            continue;
        }
        if let Some((slope, se, adj_logit)) = logit.fit() {
            let mut best = adj_logit;
            if let Some((_, _, a)) = linear.fit() {
                best = best.max(a);
            }
            if let Some(a) = quad.adjusted_r2() {
                best = best.max(a);
            }
            rows.push((k, slope, se, best));
        }
    }
    if rows.is_empty() {
        return Ok(k1);
    }
    let mut slopes: Vec<f64> = rows.iter().map(|r| r.1).collect();
    slopes.sort_by(f64::total_cmp);
    let m = slopes.len();
    let median = if m % 2 == 1 {
        slopes[m / 2]
    } else {
        0.5 * (slopes[m / 2 - 1] + slopes[m / 2])
    };
    let mut chosen: Option<(usize, f64)> = None;
    for &(k, slope, se, adj) in &rows {
        let bound = se * t_quantile_75((k - 2) as f64)?;
        if (slope - median).abs() <= bound && chosen.is_none_or(|(_, best)| adj > best) {
            chosen = Some((k, adj));
        }
    }
    Ok(chosen.map(|c| c.0).unwrap_or(k1))
}

/// Moment estimator of the extreme-value index from an upper tail.
///
/// `tail` holds the `k` largest values after subtracting the sample median.
pub fn evi_from_tail(tail: &[f64]) -> Result<f64> {
    let k = tail.len();
    if k < 3 {
        return Err(Error::InsufficientData(format!(
            "extreme-value index needs k >= 3, got {k}"
        )));
    }
    let mut t = tail.to_vec();
    t.sort_by(|a, b| b.total_cmp(a));
    let floor = t[k - 1];
    if !(floor > 0.0) {
        return Err(Error::domain(format!(
            "tail values must be positive after median subtraction, smallest is {floor}"
        )));
    }
    let ln_floor = floor.ln();
    let (mut m1, mut m2) = (0.0, 0.0);
    for v in &t[..k - 1] {
        let l = v.ln() - ln_floor;
        m1 += l;
        m2 += l * l;
    }
    let km1 = (k - 1) as f64;
    m1 /= km1;
    m2 /= km1;
    let gap = 1.0 - m1 * m1 / m2;
    if !(m2 > 0.0) || gap.abs() < 1e-12 || !gap.is_finite() {
        return Err(Error::Singular(format!(
            "moment estimator undefined: M1 = {m1}, M2 = {m2}"
        )));
    }
    Ok(m1 + 1.0 - 0.5 / gap)
}

/// Moment estimator using the `k` largest samples, centred at the median.
pub fn evi_moment_estimate(samples: &[f64], k: usize) -> Result<f64> {
    let n = samples.len();
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds sample size {n}")));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    };
    let tail: Vec<f64> = s[n - k..].iter().map(|v| v - median).collect();
    evi_from_tail(&tail)
}

/// Fits every candidate transform to the top `k` points and keeps the best.
pub fn fit_tail(samples: &[f64], k: usize) -> Result<TailFit> {
    let (sorted, _) = sort_and_break_ties(samples)?;
    let n = sorted.len();
    if k < 3 || k > n {
        return Err(Error::domain(format!("tail size k = {k} invalid for n = {n}")));
    }
    let ps: Vec<Prob> = (n + 1 - k..=n).map(|j| hazen_pair(j, n)).collect();
    let ys = &sorted[n - k..];
    let evi = match evi_moment_estimate(&sorted, k) {
        Ok(c) if c.is_finite() => Some(c),
        Ok(_) => None,
        Err(e) => {
            log::debug!("extreme-value index unavailable at k = {k}: {e}");
            None
        }
    };
    let mut transforms = vec![
        TailTransform::Linear,
        TailTransform::Logit,
        TailTransform::LogitQuadratic,
    ];
    if let Some(c) = evi.filter(|c| c.abs() >= EVI_THRESHOLD) {
        transforms.push(TailTransform::ExtremeValue { c, n });
        transforms.push(TailTransform::ExtremeValueQuadratic { c, n });
    }

    let mut best: Option<TailFit> = None;
    let mut candidates = Vec::new();
    let mut last_err = None;
    for tr in transforms {
        let columns = tr.columns(&ps);
        if k <= columns.len() + 1 {
            continue;
        }
        match ols(&columns, ys) {
            Ok(fit) => {
                candidates.push((tr, fit.adjusted_r2));
                let better = best
                    .as_ref()
                    .is_none_or(|b| fit.adjusted_r2 > b.adjusted_r2 + ADJ_R2_TIE);
                if better {
                    best = Some(TailFit {
                        k,
                        transform: tr,
                        coefficients: fit.coefficients,
                        adjusted_r2: fit.adjusted_r2,
                        evi,
                        candidates: Vec::new(),
                    });
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(mut b) => {
            b.candidates = candidates;
            Ok(b)
        }
        None => Err(last_err.unwrap_or_else(|| {
            Error::DegenerateFit(format!("no tail transform could be fitted with k = {k}"))
        })),
    }
}

/// How the upper endpoint was placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperExtension {
    pub y_star_star: f64,
    /// `h^-1(Y_(n))`, the percentile the endpoint is matched to.
    pub target: Option<Prob>,
    pub fit: Option<TailFit>,
    /// The tail inverse was undefined and `Y_(n) - Y_(n-1)` was used.
    pub fallback: bool,
    /// The exact solution lay outside the search bracket and was clamped.
    pub clamped: bool,
}

/// Chooses `y**` so that `F~(Y_(n))` matches the tail regression's percentile.
///
/// `F~(Y_(n); y) = (n - 1)/n + d / (n (d + y))` with `d = (Y_(n) - Y_(n-1)) / 2`,
/// so the minimiser of `|h^-1(Y_(n)) - F~(Y_(n); y)|` is `y = d n q / (1 - n q)`
/// where `q = 1 - h^-1(Y_(n))`, clamped into `[1e-9 range, 50 IQR]`.
pub fn compute_upper_extension(samples: &[f64]) -> Result<UpperExtension> {
    let (sorted, _) = sort_and_break_ties(samples)?;
    let n = sorted.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "upper extension needs at least 3 samples, got {n}"
        )));
    }
    let gap = sorted[n - 1] - sorted[n - 2];
    let fallback = |fit: Option<TailFit>| UpperExtension {
        y_star_star: gap,
        target: None,
        fit,
        fallback: true,
        clamped: false,
    };
    let k = if n >= MIN_SCREEN_SIZE { select_k(&sorted)? } else { n };
    let fit = match fit_tail(&sorted, k) {
        Ok(f) => f,
        Err(e) => {
            log::warn!("tail fit failed ({e}); using the top gap as the upper extension");
            return Ok(fallback(None));
        }
    };
    let Some(target) = fit.inverse(sorted[n - 1]) else {
        log::debug!("tail fit cannot be inverted at the maximum; using the top gap");
        return Ok(fallback(Some(fit)));
    };
    let (lo, hi) = extension_bracket(&sorted);
    let d = 0.5 * gap;
    let nq = n as f64 * target.q;
    let raw = if nq >= 1.0 {
        f64::INFINITY
    } else {
        d * nq / (1.0 - nq)
    };
    if raw.is_nan() {
        return Ok(fallback(Some(fit)));
    }
    let y = raw.clamp(lo, hi);
    Ok(UpperExtension {
        y_star_star: y,
        target: Some(target),
        fit: Some(fit),
        fallback: false,
        clamped: y != raw,
    })
}

/// Search bracket `[1e-9 range, 50 IQR]` for the upper extension.
pub fn extension_bracket(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len();
    let range = sorted[n - 1] - sorted[0];
    let quartile = |p: f64| {
        let h = p * (n - 1) as f64;
        let i = h.floor() as usize;
        let f = h - i as f64;
        if i + 1 < n {
            sorted[i] + f * (sorted[i + 1] - sorted[i])
        } else {
            sorted[n - 1]
        }
    };
    let iqr = quartile(0.75) - quartile(0.25);
    let spread = if iqr > 0.0 { iqr } else { range };
    (TIE_STEP * range, 50.0 * spread)
}
