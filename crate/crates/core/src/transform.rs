//! Talent extraction from a season and projection of talents into another season.

use std::collections::BTreeMap;

use crate::distributions::{
    fit_season_normal, ContinuousLaw, OrderStatLaw, SdConvention, SeasonParametricFit, TalentLaw,
};
use crate::error::{Error, Result};
use crate::special::{beta_cdf, beta_quantile, Prob};
use crate::tail_ecdf::InterpolatedCdf;
use serde::{Deserialize, Serialize};

/// Clamp applied to model CDF values before the Beta step.
pub const CDF_CLAMP: f64 = 1e-12;
/// Smallest probability handed to the order-statistic quantile.
const TINY: f64 = 1e-300;

/// How a season's statistic distribution is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimationMode {
    Parametric,
    Nonparametric,
}

/// A season's fitted statistic distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeasonModel {
    Parametric(SeasonParametricFit),
    Nonparametric(InterpolatedCdf),
}

impl SeasonModel {
    pub fn fit(values: &[f64], mode: EstimationMode, sd: SdConvention) -> Result<Self> {
        Ok(match mode {
            EstimationMode::Parametric => SeasonModel::Parametric(fit_season_normal(values, sd)?),
            EstimationMode::Nonparametric => {
                SeasonModel::Nonparametric(InterpolatedCdf::build(values, None, None)?)
            }
        })
    }

    pub fn cdf(&self, y: f64) -> Prob {
        match self {
            SeasonModel::Parametric(f) => f.cdf(y),
            SeasonModel::Nonparametric(c) => c.eval_pair(y),
        }
    }

    pub fn inverse(&self, p: Prob) -> f64 {
        match self {
            SeasonModel::Parametric(f) => f.quantile(p),
            SeasonModel::Nonparametric(c) => c.inverse_pair(p),
        }
    }

    pub fn is_parametric(&self) -> bool {
        matches!(self, SeasonModel::Parametric(_))
    }
}

/// Talents paired with the season's players in statistic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TalentAssignment {
    /// `order[j - 1]` is the input index of the `j`-th smallest value.
    pub order: Vec<usize>,
    /// Talent of the `j`-th smallest value at position `j - 1`.
    pub talents: Vec<f64>,
    /// Whether the model CDF had to be clamped at that rank.
    pub clamped: Vec<bool>,
}

impl TalentAssignment {
    /// Talents laid out in input order.
    pub fn by_input(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.order.len()];
        for (j, &idx) in self.order.iter().enumerate() {
            out[idx] = self.talents[j];
        }
        out
    }

    /// Rank (1-based) of each input index.
    pub fn ranks_by_input(&self) -> Vec<usize> {
        let mut out = vec![0; self.order.len()];
        for (j, &idx) in self.order.iter().enumerate() {
            out[idx] = j + 1;
        }
        out
    }
}

/// One season's population, fitted model, and extracted talents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonContext<L = TalentLaw> {
    pub year: i32,
    /// Eligible population `N`.
    pub population: u64,
    pub model: SeasonModel,
    pub law: L,
    /// Qualified values, ascending.
    pub values: Vec<f64>,
    pub assignment: TalentAssignment,
    /// Talents sorted ascending, used for rank lookups during projection.
    pub sorted_talents: Vec<f64>,
}

impl<L: ContinuousLaw + Clone> SeasonContext<L> {
    /// Fits the season model to `values` and extracts their talents.
    pub fn build(
        year: i32,
        population: u64,
        values: &[f64],
        mode: EstimationMode,
        sd: SdConvention,
        law: L,
    ) -> Result<Self> {
        let model = SeasonModel::fit(values, mode, sd)?;
        Self::with_model(year, population, values, model, law)
    }

    /// Uses a supplied model instead of fitting one.
    pub fn with_model(
        year: i32,
        population: u64,
        values: &[f64],
        model: SeasonModel,
        law: L,
    ) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InsufficientData(format!("season {year} has no values")));
        }
        if (population as usize) < n {
            return Err(Error::domain(format!(
                "season {year}: population {population} smaller than player count {n}"
            )));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut ctx = SeasonContext {
            year,
            population,
            model,
            law,
            values: sorted,
            assignment: TalentAssignment {
                order: Vec::new(),
                talents: Vec::new(),
                clamped: Vec::new(),
            },
            sorted_talents: Vec::new(),
        };
        let assignment = extract_talents(&ctx, values)?;
        let clamped = assignment.clamped.iter().filter(|c| **c).count();
        if clamped > 0 {
            log::warn!("season {year}: model CDF clamped for {clamped} value(s)");
        }
        let mut sorted_talents = assignment.talents.clone();
        sorted_talents.sort_by(f64::total_cmp);
        ctx.assignment = assignment;
        ctx.sorted_talents = sorted_talents;
        Ok(ctx)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Talent of a value that is not one of the season's qualified values.
    ///
    /// The value takes the rank of the largest qualified value not above it
    /// (rank 1 below the minimum), and the model CDF is always clamped.
    pub fn talent_for_value(&self, y: f64) -> Result<(f64, bool)> {
        let n = self.n();
        let rank = self.values.partition_point(|&v| v <= y).clamp(1, n);
        let p1 = self.model.cdf(y);
        let clamped = p1.min_side() < CDF_CLAMP;
        talent_chain(&self.law, self.population, n, rank, p1.clamp(CDF_CLAMP))
            .map(|t| (t, clamped))
    }
}

fn talent_chain<L: ContinuousLaw + Clone>(
    law: &L,
    population: u64,
    n: usize,
    j: usize,
    p1: Prob,
) -> Result<f64> {
    let nf = n as f64;
    let p2 = beta_cdf(j as f64, nf + 1.0 - j as f64, p1)?.clamp(TINY);
    let rank = population - n as u64 + j as u64;
    OrderStatLaw::new(rank, population, law.clone())?.quantile(p2)
}

/// Talent of every value in a season, in the season's statistic order.
///
/// For the `j`-th smallest value: `p1 = F(Y_(j))`, `p2 = I_{p1}(j, n + 1 - j)`,
/// and the talent is the `p2` quantile of order statistic `N - n + j` of `N`.
pub fn extract_talents<L: ContinuousLaw + Clone>(
    season: &SeasonContext<L>,
    values: &[f64],
) -> Result<TalentAssignment> {
    let n = values.len();
    if n != season.n() {
        return Err(Error::domain(format!(
            "season {} has {} values, extraction received {n}",
            season.year,
            season.n()
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut talents = Vec::with_capacity(n);
    let mut clamped = Vec::with_capacity(n);
    for (pos, &idx) in order.iter().enumerate() {
        let j = pos + 1;
        let (p1, was_clamped) = match &season.model {
            SeasonModel::Parametric(fit) => {
                let p = fit.cdf(values[idx]);
                (p.clamp(CDF_CLAMP), p.min_side() < CDF_CLAMP)
            }
            SeasonModel::Nonparametric(cdf) => {
                // evaluate at the tie-separated value so tied ranks stay distinct
                let y = if cdf.n() == n { cdf.sorted_samples[pos] } else { values[idx] };
                let p = cdf.eval_pair(y);
                if p.min_side() <= 0.0 {
                    (p.clamp(CDF_CLAMP), true)
                } else {
                    (p, false)
                }
            }
        };
        talents.push(talent_chain(&season.law, season.population, n, j, p1)?);
        clamped.push(was_clamped);
    }
    Ok(TalentAssignment {
        order,
        talents,
        clamped,
    })
}

/// A talent expressed as a statistic in a target season.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub value: f64,
    /// Rank `l` used for the Beta step.
    pub rank: usize,
    /// The talent sat below anything the target season could produce.
    pub sub_replacement: bool,
}

/// Projects a talent into `target`.
///
/// `own_rank` is the player's rank when `target` is the player's own season;
/// the player then replaces itself and `l = j`. Otherwise `l` is one plus the
/// number of target talents strictly below `talent` (ties go to the incumbent),
/// capped at `n`.
pub fn project<L: ContinuousLaw + Clone>(
    talent: f64,
    target: &SeasonContext<L>,
    own_rank: Option<usize>,
) -> Result<Projection> {
    let n = target.n();
    let l = match own_rank {
        Some(j) if (1..=n).contains(&j) => j,
        Some(j) => return Err(Error::domain(format!("own rank {j} outside 1..={n}"))),
        None => (1 + target.sorted_talents.partition_point(|&t| t < talent)).min(n),
    };
    let rank = target.population - n as u64 + l as u64;
    let os = OrderStatLaw::new(rank, target.population, target.law.clone())?;
    let mut p = os.cdf(talent)?;
    let mut sub_replacement = false;
    // only a talent the target season cannot produce at all is floored
    if p.p < TINY {
        // flooring at the trigger keeps projection monotone in the talent
        p = Prob::new(TINY, 1.0 - TINY);
        sub_replacement = true;
    }
    let u = if p.q <= 0.0 {
        Prob::ONE
    } else {
        beta_quantile(l as f64, (n + 1 - l) as f64, p)?
    };
    Ok(Projection {
        value: target.model.inverse(u),
        rank: l,
        sub_replacement,
    })
}

/// One season of a career placed on a common trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CareerProjection {
    pub source_year: i32,
    /// 1-based position in the career.
    pub career_index: usize,
    pub target_year: i32,
    /// `None` when the target year has no context.
    pub projection: Option<Projection>,
}

impl CareerProjection {
    pub fn truncated(&self) -> bool {
        self.projection.is_none()
    }
}

/// A season to place on the trajectory: year, talent, and the player's rank
/// in that season when the player is a qualified member of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CareerSeason {
    pub year: i32,
    pub talent: f64,
    pub own_rank: Option<usize>,
}

/// Projects career season `t` (seasons sorted by year) into `start_year + t - 1`.
pub fn era_adjust_career<L: ContinuousLaw + Clone>(
    seasons: &[CareerSeason],
    start_year: i32,
    contexts: &BTreeMap<i32, SeasonContext<L>>,
) -> Result<Vec<CareerProjection>> {
    let mut sorted = seasons.to_vec();
    sorted.sort_by_key(|s| s.year);
    let mut out = Vec::with_capacity(sorted.len());
    for (t, s) in sorted.iter().enumerate() {
        let target_year = start_year + t as i32;
        let projection = match contexts.get(&target_year) {
            Some(ctx) => {
                let own = if target_year == s.year { s.own_rank } else { None };
                Some(project(s.talent, ctx, own)?)
            }
            None => {
                log::debug!("no context for {target_year}; career season truncated");
                None
            }
        };
        out.push(CareerProjection {
            source_year: s.year,
            career_index: t + 1,
            target_year,
            projection,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::StandardUniform;
    use approx::assert_relative_eq;

    fn toy_model(y_star_star: f64) -> SeasonModel {
        SeasonModel::Nonparametric(
            InterpolatedCdf::build(&[1.0, 2.0, 3.0], Some(1.0), Some(y_star_star)).unwrap(),
        )
    }

    #[test]
    fn hand_chain_for_toy_season() {
        let ctx = SeasonContext::with_model(2000, 5, &[2.0, 3.0, 1.0], toy_model(0.5), StandardUniform)
            .unwrap();
        let p1: f64 = 5.0 / 6.0;
        let p2 = p1.powi(3);
        let top = ctx.assignment.talents[2];
        assert_relative_eq!(top, p2.powf(0.2), max_relative = 1e-12);
        // 0.5787^(1/5) = 0.89638, quoted to four places as 0.8965
        assert_relative_eq!(top, 0.8965, epsilon = 2e-4);
        assert_eq!(ctx.assignment.order, vec![2, 0, 1]);
    }

    #[test]
    fn single_player_identity() {
        let law = TalentLaw::pareto(1.16).unwrap();
        let fit = SeasonParametricFit { mean: 0.3, sd: 0.02, n: 1, normality_p: None };
        let ctx = SeasonContext::with_model(2000, 1, &[0.31], SeasonModel::Parametric(fit), law).unwrap();
        let p1 = fit.cdf(0.31);
        assert_relative_eq!(ctx.assignment.talents[0], law.quantile(p1), max_relative = 1e-12);
    }

    #[test]
    fn larger_population_means_larger_talents() {
        let law = TalentLaw::pareto(1.16).unwrap();
        let values = [0.25, 0.27, 0.29, 0.31, 0.26, 0.33];
        let build = |pop| {
            SeasonContext::build(2000, pop, &values, EstimationMode::Parametric, SdConvention::Unbiased, law)
                .unwrap()
        };
        let a = build(1_000_000);
        let b = build(10_000_000);
        for (x, y) in a.assignment.talents.iter().zip(&b.assignment.talents) {
            assert!(y > x);
        }
    }

    #[test]
    fn own_season_round_trip() {
        let law = TalentLaw::pareto(1.16).unwrap();
        let values: Vec<f64> = (0..40).map(|i| 0.25 + 0.002 * i as f64 + 0.001 * (i as f64).sin()).collect();
        let ctx = SeasonContext::build(2000, 4_000_000, &values, EstimationMode::Nonparametric, SdConvention::Unbiased, law)
            .unwrap();
        for (pos, &idx) in ctx.assignment.order.iter().enumerate() {
            let pr = project(ctx.assignment.talents[pos], &ctx, Some(pos + 1)).unwrap();
            assert_relative_eq!(pr.value, values[idx], max_relative = 1e-6);
        }
    }

    #[test]
    fn talent_above_every_target_extrapolates() {
        let law = TalentLaw::pareto(1.16).unwrap();
        let values = [0.25, 0.27, 0.29, 0.31, 0.26, 0.33];
        let ctx = SeasonContext::build(2000, 1_000_000, &values, EstimationMode::Nonparametric, SdConvention::Unbiased, law)
            .unwrap();
        let top = *ctx.sorted_talents.last().unwrap();
        let pr = project(top * 1.5, &ctx, None).unwrap();
        assert_eq!(pr.rank, 6);
        assert!(pr.value > 0.33);
    }

    #[test]
    fn missing_target_years_truncate() {
        let law = TalentLaw::pareto(1.16).unwrap();
        let values = [0.25, 0.27, 0.29, 0.31];
        let ctx = SeasonContext::build(1977, 1_000_000, &values, EstimationMode::Parametric, SdConvention::Unbiased, law)
            .unwrap();
        let mut contexts = BTreeMap::new();
        contexts.insert(1977, ctx.clone());
        let seasons = [
            CareerSeason { year: 1977, talent: ctx.assignment.talents[1], own_rank: Some(2) },
            CareerSeason { year: 1978, talent: ctx.assignment.talents[2], own_rank: None },
        ];
        let out = era_adjust_career(&seasons, 1977, &contexts).unwrap();
        assert_relative_eq!(out[0].projection.unwrap().value, 0.27, max_relative = 1e-9);
        assert!(out[1].truncated());
    }
}
