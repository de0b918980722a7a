//! Small ordinary least squares fits with an intercept.

use crate::error::{Error, Result};

/// Result of an OLS fit `y = b0 + b1 x1 + ... + bp xp`.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Intercept first, then one coefficient per regressor.
    pub coefficients: Vec<f64>,
    /// Standard errors, same layout as `coefficients`.
    pub std_errors: Vec<f64>,
    pub r2: f64,
    pub adjusted_r2: f64,
    pub n: usize,
}

/// Fits by Householder QR. `columns` holds the regressors without the intercept.
pub fn ols(columns: &[Vec<f64>], y: &[f64]) -> Result<OlsFit> {
    let n = y.len();
    let p = columns.len() + 1;
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::domain("regressor length differs from response length"));
    }
    if n <= p {
        return Err(Error::InsufficientData(format!(
            "{n} observations cannot fit {p} coefficients"
        )));
    }
    if y.iter().chain(columns.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite value in regression data"));
    }

    // column-major design matrix
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(p);
    a.push(vec![1.0; n]);
    a.extend(columns.iter().cloned());
    let mut b = y.to_vec();
    let mut r_diag = vec![0.0; p];
    let scale: Vec<f64> = a.iter().map(|c| norm(c)).collect();

    for k in 0..p {
        let alpha = norm(&a[k][k..]);
        if alpha <= 1e-10 * scale[k].max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateFit(format!(
                "collinear design: column {k} is dependent on earlier columns"
            )));
        }
        let alpha = if a[k][k] > 0.0 { -alpha } else { alpha };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        r_diag[k] = alpha;
        for j in (k + 1)..p {
            reflect(&v, vnorm2, &mut a[j][k..]);
        }
        reflect(&v, vnorm2, &mut b[k..]);
        a[k][k] = alpha;
    }

    // back substitution for R beta = Q'y
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = b[k];
        for j in (k + 1)..p {
            s -= a[j][k] * beta[j];
        }
        beta[k] = s / r_diag[k];
    }
    let rss: f64 = b[p..].iter().map(|v| v * v).sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if tss <= 0.0 {
        return Err(Error::DegenerateFit("response is constant".into()));
    }
    let r2 = (1.0 - rss / tss).min(1.0);
    let df = (n - p) as f64;
    let adjusted_r2 = 1.0 - (1.0 - r2) * (n - 1) as f64 / df;
    let sigma2 = rss / df;

    // diag((R'R)^-1) from R^-1
    let mut rinv = vec![vec![0.0; p]; p];
    for i in 0..p {
        rinv[i][i] = 1.0 / r_diag[i];
        for j in (i + 1)..p {
            let mut s = 0.0;
            for m in i..j {
                s += rinv[i][m] * a[j][m];
            }
            rinv[i][j] = -s / r_diag[j];
        }
    }
    let std_errors = (0..p)
        .map(|i| (sigma2 * rinv[i][i..].iter().map(|v| v * v).sum::<f64>()).sqrt())
        .collect();

    Ok(OlsFit {
        coefficients: beta,
        std_errors,
        r2,
        adjusted_r2,
        n,
    })
}

fn norm(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
}

fn reflect(v: &[f64], vnorm2: f64, target: &mut [f64]) {
    let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (t, vi) in target.iter_mut().zip(v) {
        *t -= f * vi;
    }
}

/// Running sums for a simple regression that grows one point at a time.
///
/// Values are shifted by the first point added to keep the sums well scaled.
#[derive(Debug, Clone, Default)]
pub(crate) struct RunningSimple {
    shift: Option<(f64, f64)>,
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    sxy: f64,
    syy: f64,
}

impl RunningSimple {
    pub fn push(&mut self, x: f64, y: f64) {
        let (x0, y0) = *self.shift.get_or_insert((x, y));
        let (x, y) = (x - x0, y - y0);
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.sxy += x * y;
        self.syy += y * y;
    }

    /// `(slope, slope standard error, adjusted R^2)`, or `None` when degenerate.
    pub fn fit(&self) -> Option<(f64, f64, f64)> {
        let n = self.n;
        if n < 3.0 {
            return None;
        }
        let cxx = self.sxx - self.sx * self.sx / n;
        let cxy = self.sxy - self.sx * self.sy / n;
        let cyy = self.syy - self.sy * self.sy / n;
        if cxx <= 0.0 || cyy <= 0.0 {
            return None;
        }
        let slope = cxy / cxx;
        let rss = (cyy - slope * cxy).max(0.0);
        let se = (rss / (n - 2.0) / cxx).sqrt();
        let r2 = 1.0 - rss / cyy;
        let adj = 1.0 - (1.0 - r2) * (n - 1.0) / (n - 2.0);
        Some((slope, se, adj))
    }
}

/// Running sums for `y` on `(x, x^2)`.
#[derive(Debug, Clone, Default)]
pub(crate) struct RunningQuadratic {
    shift: Option<(f64, f64)>,
    n: f64,
    s: [f64; 5],
    sy: f64,
    sxy: f64,
    sx2y: f64,
    syy: f64,
}

impl RunningQuadratic {
    pub fn push(&mut self, x: f64, y: f64) {
        let (x0, y0) = *self.shift.get_or_insert((x, y));
        let (x, y) = (x - x0, y - y0);
        self.n += 1.0;
        let mut pw = 1.0;
        for k in 0..5 {
            if k > 0 {
                pw *= x;
            }
            self.s[k] += pw;
        }
        self.sy += y;
        self.sxy += x * y;
        self.sx2y += x * x * y;
        self.syy += y * y;
    }

    /// Adjusted R^2 of the quadratic fit, or `None` when degenerate.
    pub fn adjusted_r2(&self) -> Option<f64> {
        let n = self.n;
        if n < 4.0 {
            return None;
        }
        let s = &self.s;
        let mean_x = s[1] / n;
        let mean_y = self.sy / n;
        // centred moments
        let cxx = s[2] - s[1] * mean_x;
        let cxq = s[3] - s[2] * mean_x;
        let cqq = s[4] - s[2] * s[2] / n;
        let cxy = self.sxy - s[1] * mean_y;
        let cqy = self.sx2y - s[2] * mean_y;
        let cyy = self.syy - self.sy * mean_y;
        let det = cxx * cqq - cxq * cxq;
        if cyy <= 0.0 || !(det > 1e-12 * cxx * cqq) {
            return None;
        }
        let b1 = (cqq * cxy - cxq * cqy) / det;
        let b2 = (cxx * cqy - cxq * cxy) / det;
        let ssr = b1 * cxy + b2 * cqy;
        let rss = (cyy - ssr).max(0.0);
        let r2 = 1.0 - rss / cyy;
        Some(1.0 - (1.0 - r2) * (n - 1.0) / (n - 3.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_quadratic() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3 + 1.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v + 0.25 * v * v).collect();
        let fit = ols(&[x.clone(), x.iter().map(|v| v * v).collect()], &y).unwrap();
        assert_relative_eq!(fit.coefficients[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.coefficients[1], -0.5, max_relative = 1e-12);
        assert_relative_eq!(fit.coefficients[2], 0.25, max_relative = 1e-12);
        assert_relative_eq!(fit.r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_standard_error_matches_textbook_formula() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![1.1, 1.9, 3.2, 3.9, 5.1];
        let fit = ols(&[x.clone()], &y).unwrap();
        let mx = 3.0;
        let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
        let my = y.iter().sum::<f64>() / 5.0;
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let slope = sxy / sxx;
        let rss: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| {
                let e = b - (my + slope * (a - mx));
                e * e
            })
            .sum();
        let se = (rss / 3.0 / sxx).sqrt();
        assert_relative_eq!(fit.coefficients[1], slope, max_relative = 1e-12);
        assert_relative_eq!(fit.std_errors[1], se, max_relative = 1e-10);

        let mut running = RunningSimple::default();
        for (a, b) in x.iter().zip(&y) {
            running.push(*a, *b);
        }
        let (s, e, adj) = running.fit().unwrap();
        assert_relative_eq!(s, slope, max_relative = 1e-12);
        assert_relative_eq!(e, se, max_relative = 1e-9);
        assert_relative_eq!(adj, fit.adjusted_r2, max_relative = 1e-10);
    }

    #[test]
    fn running_quadratic_matches_qr() {
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin() + i as f64 * 0.2).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * v - v + (i as f64).cos() * 0.1).collect();
        let fit = ols(&[x.clone(), x.iter().map(|v| v * v).collect()], &y).unwrap();
        let mut running = RunningQuadratic::default();
        for (a, b) in x.iter().zip(&y) {
            running.push(*a, *b);
        }
        assert_relative_eq!(running.adjusted_r2().unwrap(), fit.adjusted_r2, max_relative = 1e-8);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y = vec![1.0, 3.0, 2.0, 5.0];
        let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!(matches!(ols(&[x, twice], &y), Err(Error::DegenerateFit(_))));
    }
}
