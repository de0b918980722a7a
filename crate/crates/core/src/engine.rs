//! Per-statistic season contexts shared by the batting and pitching pipelines.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::distributions::{SdConvention, TalentLaw};
use crate::error::{Error, Result};
use crate::population::PopulationSeries;
use crate::transform::{project, EstimationMode, Projection, SeasonContext};

/// Seasons with too few qualified values for a fit are skipped with a warning.
pub const MIN_SEASON_VALUES: usize = 3;

/// Contexts for one statistic across every season, plus qualified ranks.
#[derive(Debug, Clone)]
pub struct StatContexts {
    pub contexts: BTreeMap<i32, SeasonContext>,
    /// Rank within its season for each qualified row index.
    pub own_rank: HashMap<usize, usize>,
}

/// Talent of one player-season for one statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeasonTalent {
    pub talent: f64,
    /// Rank in the season when the row was one of the qualified values.
    pub own_rank: Option<usize>,
    /// The row was not qualified and was placed through the season model.
    pub partial: bool,
    /// The model CDF was clamped.
    pub clamped: bool,
}

impl StatContexts {
    /// Builds one context per year from the qualified rows.
    ///
    /// `qualified` maps a year to row indices; `value` yields a row's statistic.
    pub fn build<F>(
        label: &str,
        qualified: &BTreeMap<i32, Vec<usize>>,
        value: F,
        population: &PopulationSeries,
        law: TalentLaw,
        mode: EstimationMode,
        sd: SdConvention,
    ) -> Result<Self>
    where
        F: Fn(usize) -> Option<f64> + Sync,
    {
        let built: Vec<Result<Option<(i32, SeasonContext, Vec<usize>)>>> = qualified
            .par_iter()
            .map(|(&year, rows)| {
                let picked: Vec<usize> = rows.iter().copied().filter(|&r| value(r).is_some()).collect();
                if picked.len() < MIN_SEASON_VALUES {
                    log::warn!(
                        "{label}: season {year} has {} qualified values; skipped",
                        picked.len()
                    );
                    return Ok(None);
                }
                let values: Vec<f64> = picked.iter().map(|&r| value(r).unwrap()).collect();
                let distinct = values.iter().any(|v| *v != values[0]);
                if !distinct {
                    log::warn!("{label}: season {year} values are all identical; skipped");
                    return Ok(None);
                }
                let pop = population.count_at(year)?;
                let ctx = SeasonContext::build(year, pop, &values, mode, sd, law).map_err(|e| {
                    match e {
                        Error::Numerical { routine, detail } => Error::Numerical {
                            routine,
                            detail: format!("{label} {year}: {detail}"),
                        },
                        other => other,
                    }
                })?;
                Ok(Some((year, ctx, picked)))
            })
            .collect();
        let mut contexts = BTreeMap::new();
        let mut own_rank = HashMap::new();
        for item in built {
            if let Some((year, ctx, picked)) = item? {
                for (input_idx, rank) in ctx.assignment.ranks_by_input().into_iter().enumerate() {
                    own_rank.insert(picked[input_idx], rank);
                }
                contexts.insert(year, ctx);
            }
        }
        Ok(StatContexts { contexts, own_rank })
    }

    /// Talent of row `row` with statistic `value` in `year`.
    pub fn talent(&self, row: usize, year: i32, value: f64) -> Result<Option<SeasonTalent>> {
        let Some(ctx) = self.contexts.get(&year) else {
            return Ok(None);
        };
        if let Some(&rank) = self.own_rank.get(&row) {
            return Ok(Some(SeasonTalent {
                talent: ctx.assignment.talents[rank - 1],
                own_rank: Some(rank),
                partial: false,
                clamped: ctx.assignment.clamped[rank - 1],
            }));
        }
        let (talent, clamped) = ctx.talent_for_value(value)?;
        Ok(Some(SeasonTalent {
            talent,
            own_rank: None,
            partial: true,
            clamped,
        }))
    }

    /// Projects a talent from `source_year` into `target_year`.
    pub fn project(
        &self,
        talent: &SeasonTalent,
        source_year: i32,
        target_year: i32,
    ) -> Result<Option<Projection>> {
        let Some(ctx) = self.contexts.get(&target_year) else {
            return Ok(None);
        };
        let own = if source_year == target_year { talent.own_rank } else { None };
        project(talent.talent, ctx, own).map(Some)
    }

    /// Talents of the qualified players in `year`, best first.
    pub fn descending_talents(&self, year: i32) -> Option<Vec<f64>> {
        self.contexts
            .get(&year)
            .map(|c| c.sorted_talents.iter().rev().copied().collect())
    }
}

/// Median of a nonempty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
