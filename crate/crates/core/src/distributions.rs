//! Talent laws, order-statistic laws, and the parametric season fit.

use crate::error::{Error, Result};
use crate::special::{beta_cdf, beta_quantile, normal_cdf, normal_quantile, Prob};
use serde::{Deserialize, Serialize};
use statrs::function::erf;

/// A continuous law with complement-tracked CDF and quantile.
pub trait ContinuousLaw {
    /// `P(X <= x)` with its complement.
    fn cdf(&self, x: f64) -> Prob;
    /// The `x` with `cdf(x) = p`.
    fn quantile(&self, p: Prob) -> f64;
    /// `(infimum, supremum)` of the support.
    fn support(&self) -> (f64, f64);
}

/// The latent talent distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TalentLaw {
    /// Pareto with unit scale: support `[1, ∞)`, `F(x) = 1 - x^-alpha`.
    Pareto { alpha: f64 },
    Normal { location: f64, scale: f64 },
    /// Law of `|Z|` for `Z ~ Normal(location, scale)`.
    FoldedNormal { location: f64, scale: f64 },
}

impl TalentLaw {
    /// `log_4 5`, the 80-20 exponent.
    pub fn pareto_80_20_alpha() -> f64 {
        5f64.ln() / 4f64.ln()
    }

    pub fn pareto(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("Pareto alpha must be positive, got {alpha}")));
        }
        Ok(TalentLaw::Pareto { alpha })
    }

    pub fn normal(location: f64, scale: f64) -> Result<Self> {
        Self::check_scale(scale)?;
        Ok(TalentLaw::Normal { location, scale })
    }

    pub fn folded_normal(location: f64, scale: f64) -> Result<Self> {
        Self::check_scale(scale)?;
        Ok(TalentLaw::FoldedNormal { location, scale })
    }

    fn check_scale(scale: f64) -> Result<()> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("scale must be positive, got {scale}")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TalentLaw::Pareto { alpha } => Self::pareto(alpha).map(|_| ()),
            TalentLaw::Normal { scale, .. } | TalentLaw::FoldedNormal { scale, .. } => {
                Self::check_scale(scale)
            }
        }
    }

    /// Parses `pareto:1.16`, `pareto` (80-20 exponent), `normal`,
    /// `normal:0:1`, `folded-normal`, `folded-normal:0:1`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.trim().split(':');
        let kind = parts.next().unwrap_or_default().to_ascii_lowercase();
        let nums: Vec<f64> = parts
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad number '{s}' in talent law '{spec}'")))
            })
            .collect::<Result<_>>()?;
        let law = match (kind.as_str(), nums.as_slice()) {
            ("pareto", []) => Self::pareto(Self::pareto_80_20_alpha())?,
            ("pareto", [a]) => Self::pareto(*a)?,
            ("normal", []) => Self::normal(0.0, 1.0)?,
            ("normal", [m, s]) => Self::normal(*m, *s)?,
            ("folded-normal" | "folded_normal" | "foldednormal", []) => Self::folded_normal(0.0, 1.0)?,
            ("folded-normal" | "folded_normal" | "foldednormal", [m, s]) => {
                Self::folded_normal(*m, *s)?
            }
            _ => return Err(Error::domain(format!("unrecognised talent law '{spec}'"))),
        };
        Ok(law)
    }

    pub fn label(&self) -> String {
        match *self {
            TalentLaw::Pareto { alpha } => format!("pareto:{alpha}"),
            TalentLaw::Normal { location, scale } => format!("normal:{location}:{scale}"),
            TalentLaw::FoldedNormal { location, scale } => {
                format!("folded-normal:{location}:{scale}")
            }
        }
    }
}

impl ContinuousLaw for TalentLaw {
    fn cdf(&self, x: f64) -> Prob {
        match *self {
            TalentLaw::Pareto { alpha } => {
                if x <= 1.0 {
                    return Prob::ZERO;
                }
                if x == f64::INFINITY {
                    return Prob::ONE;
                }
                let ln_sf = -alpha * x.ln();
                Prob::new(-ln_sf.exp_m1(), ln_sf.exp())
            }
            TalentLaw::Normal { location, scale } => normal_cdf((x - location) / scale),
            TalentLaw::FoldedNormal { location, scale } => {
                if x <= 0.0 {
                    return Prob::ZERO;
                }
                let r = std::f64::consts::FRAC_1_SQRT_2 / scale;
                let a = (x - location) * r;
                let b = (x + location) * r;
                let p = 0.5 * (erf::erf(a) + erf::erf(b));
                let q = 0.5 * (erf::erfc(a) + erf::erfc(b));
                Prob::new(p, q)
            }
        }
    }

    fn quantile(&self, p: Prob) -> f64 {
        match *self {
            TalentLaw::Pareto { alpha } => {
                if p.q <= 0.0 {
                    return f64::INFINITY;
                }
                if p.p <= 0.0 {
                    return 1.0;
                }
                // x = q^(-1/alpha), with ln q from whichever side is exact
                let ln_q = if p.q < 0.5 { p.q.ln() } else { (-p.p).ln_1p() };
                (-ln_q / alpha).exp()
            }
            TalentLaw::Normal { location, scale } => location + scale * normal_quantile(p),
            TalentLaw::FoldedNormal { location, scale } => {
                if p.p <= 0.0 {
                    return 0.0;
                }
                if p.q <= 0.0 {
                    return f64::INFINITY;
                }
                if location == 0.0 {
                    let s2 = std::f64::consts::SQRT_2 * scale;
                    return if p.p <= 0.5 {
                        s2 * erf::erf_inv(p.p)
                    } else {
                        s2 * erf::erfc_inv(p.q)
                    };
                }
                invert_by_bisection(self, p)
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            TalentLaw::Pareto { .. } => (1.0, f64::INFINITY),
            TalentLaw::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            TalentLaw::FoldedNormal { .. } => (0.0, f64::INFINITY),
        }
    }
}

fn invert_by_bisection<L: ContinuousLaw>(law: &L, p: Prob) -> f64 {
    let (inf, _) = law.support();
    let mut lo = if inf.is_finite() { inf } else { -1.0 };
    let mut hi = lo.abs().max(1.0);
    while law.cdf(hi).q > p.q {
        hi *= 2.0;
    }
    while !inf.is_finite() && law.cdf(lo).p > p.p {
        lo *= 2.0;
    }
    let upper = p.q < p.p;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let c = law.cdf(mid);
        let below = if upper { c.q > p.q } else { c.p < p.p };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `F_X^{-1}(q)` for `0 <= q < 1`.
pub fn talent_quantile(law: &TalentLaw, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::domain(format!("talent quantile needs 0 <= q < 1, got {q}")));
    }
    Ok(law.quantile(Prob::from_p(q)))
}

/// Uniform law on `[0, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StandardUniform;

impl ContinuousLaw for StandardUniform {
    fn cdf(&self, x: f64) -> Prob {
        if x <= 0.0 {
            Prob::ZERO
        } else if x >= 1.0 {
            Prob::ONE
        } else {
            Prob::from_p(x)
        }
    }

    fn quantile(&self, p: Prob) -> f64 {
        p.p
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

/// Law of the `rank`-th smallest of `size` iid draws from `parent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStatLaw<L> {
    rank: u64,
    size: u64,
    parent: L,
}

impl<L: ContinuousLaw> OrderStatLaw<L> {
    pub fn new(rank: u64, size: u64, parent: L) -> Result<Self> {
        if rank == 0 || rank > size {
            return Err(Error::domain(format!(
                "order statistic rank {rank} invalid for sample size {size}"
            )));
        }
        Ok(OrderStatLaw { rank, size, parent })
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn parent(&self) -> &L {
        &self.parent
    }

    /// Parameters of the Beta law of `F(X_(r))`.
    pub fn beta_params(&self) -> (f64, f64) {
        (self.rank as f64, (self.size + 1 - self.rank) as f64)
    }

    /// `P(X_(r) <= x)` with complement.
    pub fn cdf(&self, x: f64) -> Result<Prob> {
        let (a, b) = self.beta_params();
        beta_cdf(a, b, self.parent.cdf(x))
    }

    /// Inverse of [`cdf`](Self::cdf) for `0 < p < 1`.
    pub fn quantile(&self, p: Prob) -> Result<f64> {
        if !(p.p > 0.0 && p.q > 0.0) {
            return Err(Error::domain(format!(
                "order statistic quantile needs 0 < p < 1, got {p:?}"
            )));
        }
        let (a, b) = self.beta_params();
        let u = beta_quantile(a, b, p)?;
        let x = self.parent.quantile(u);
        if !x.is_finite() && !(self.parent.support().1.is_infinite() && u.q == 0.0) {
            return Err(Error::numerical(
                "order_stat_quantile",
                format!("non-finite quantile for rank {} of {} at {p:?}", self.rank, self.size),
            ));
        }
        Ok(x)
    }
}

/// The distribution of the `rank`-th of `size` uniform order statistics.
pub fn uniform_order_stat(rank: u64, size: u64) -> Result<OrderStatLaw<StandardUniform>> {
    OrderStatLaw::new(rank, size, StandardUniform)
}

/// Denominator convention for the fitted standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdConvention {
    /// Divide by `n - 1`.
    #[default]
    Unbiased,
    /// Divide by `n`.
    MaximumLikelihood,
}

/// Normal fit of one season's statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonParametricFit {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
    /// Shapiro-Wilk p-value; diagnostic only.
    pub normality_p: Option<f64>,
}

impl SeasonParametricFit {
    pub fn cdf(&self, y: f64) -> Prob {
        normal_cdf((y - self.mean) / self.sd)
    }

    pub fn quantile(&self, p: Prob) -> f64 {
        self.mean + self.sd * normal_quantile(p)
    }
}

/// Fits a normal law to a season's values.
pub fn fit_season_normal(values: &[f64], convention: SdConvention) -> Result<SeasonParametricFit> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "normal fit needs at least 2 values, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("normal fit received a non-finite value"));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let denom = match convention {
        SdConvention::Unbiased => (n - 1) as f64,
        SdConvention::MaximumLikelihood => n as f64,
    };
    let sd = (ss / denom).sqrt();
    if sd <= 0.0 || values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateFit(format!(
            "all {n} values are identical ({})",
            values[0]
        )));
    }
    Ok(SeasonParametricFit {
        mean,
        sd,
        n,
        normality_p: shapiro_wilk(values).map(|r| r.p_value),
    })
}

/// Shapiro-Wilk statistic and p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p_value: f64,
}

fn poly(coefs: &[f64], x: f64) -> f64 {
    coefs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Royston's approximation; `None` outside `3 <= n <= 5000` or for constant data.
pub fn shapiro_wilk(values: &[f64]) -> Option<ShapiroWilk> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    const G: [f64; 2] = [-2.273, 0.459];

    let n = values.len();
    if !(3..=5000).contains(&n) {
        return None;
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    if x[n - 1] - x[0] <= 0.0 {
        return None;
    }
    let an = n as f64;
    let half = n / 2;
    // a[i] for i in 0..half are the coefficients of the upper half
    let mut a = vec![0.0; half];
    if n == 3 {
        a[0] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        let m: Vec<f64> = (1..=half)
            .map(|i| normal_quantile(Prob::from_p((i as f64 - 0.375) / (an + 0.25))))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / an.sqrt();
        let a1 = poly(&C1, rsn) - m[0] / ssumm2;
        let (first, fac) = if n > 5 {
            let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            a[1] = a2;
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        a[0] = a1;
        for i in first..half {
            a[i] = -m[i] / fac;
        }
    }
    let mean = x.iter().sum::<f64>() / an;
    let ssq: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = (0..half).map(|i| a[i] * (x[n - 1 - i] - x[i])).sum();
    let w = (num * num / ssq).min(1.0);

    let p_value = if n == 3 {
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = std::f64::consts::PI / 3.0;
        (pi6 * (w.sqrt().asin() - stqr)).clamp(0.0, 1.0)
    } else {
        let y = (1.0 - w).ln();
        let (z, m, s) = if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                return Some(ShapiroWilk { w, p_value: 1e-99 });
            }
            (-(gamma - y).ln(), poly(&C3, an), poly(&C4, an).exp())
        } else {
            let xx = an.ln();
            (y, poly(&C5, xx), poly(&C6, xx).exp())
        };
        normal_cdf((z - m) / s).q
    };
    Some(ShapiroWilk { w, p_value })
}
