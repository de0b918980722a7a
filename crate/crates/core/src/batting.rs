//! Era adjustment of batting seasons and careers.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::career::{smooth_career, trim_career};
use crate::config::RunConfig;
use crate::engine::{median, SeasonTalent, StatContexts};
use crate::error::{Error, Result};
use crate::io::{BattingRow, Hand, ParkFactorRow};
use crate::mapping::{quantile_map, PercentileTable};
use crate::population::PopulationSeries;
use crate::transform::EstimationMode;

/// A player's season with stints on several teams combined.
#[derive(Debug, Clone, PartialEq)]
pub struct BattingSeason {
    pub player_id: String,
    pub name: String,
    pub year: i32,
    /// Teams joined with `/` in input order.
    pub teams: String,
    pub bats: Hand,
    pub g: f64,
    pub pa: f64,
    pub ab: f64,
    pub h: f64,
    pub hr: f64,
    pub bb: f64,
    pub hbp: f64,
    pub sh: f64,
    pub sf: f64,
    pub bwar: Option<f64>,
    pub fwar: Option<f64>,
    /// PA-weighted park index for batting average.
    pub ba_park: f64,
    pub hr_park: f64,
    /// Some stint had no park factor and used the identity.
    pub park_missing: bool,
}

impl BattingSeason {
    pub fn raw_ba(&self) -> Option<f64> {
        (self.ab > 0.0).then(|| self.h / self.ab)
    }

    pub fn raw_obp(&self) -> Option<f64> {
        adjusted_obp(self.raw_ba()?, self.ab, self.bb, self.hbp, self.sf)
    }
}

/// Statistics adjusted through season talent distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BattingStat {
    /// Park-adjusted batting average.
    Ba,
    /// Park-adjusted home runs per at bat.
    HrRate,
    /// Walks per at bat.
    BbRate,
    /// bWAR per game.
    BwarRate,
    /// fWAR per game.
    FwarRate,
}

impl BattingStat {
    pub const ALL: [BattingStat; 5] = [
        BattingStat::Ba,
        BattingStat::HrRate,
        BattingStat::BbRate,
        BattingStat::BwarRate,
        BattingStat::FwarRate,
    ];

    pub fn key(self) -> &'static str {
        match self {
            BattingStat::Ba => "ba",
            BattingStat::HrRate => "hr_rate",
            BattingStat::BbRate => "bb_rate",
            BattingStat::BwarRate => "bwar_rate",
            BattingStat::FwarRate => "fwar_rate",
        }
    }

    /// The season value the distribution model sees.
    pub fn value(self, s: &BattingSeason) -> Option<f64> {
        match self {
            BattingStat::Ba => (s.ab > 0.0).then(|| park_adjust(s.h / s.ab, Some(s.ba_park)).0),
            BattingStat::HrRate => (s.ab > 0.0).then(|| park_adjust(s.hr / s.ab, Some(s.hr_park)).0),
            BattingStat::BbRate => (s.ab > 0.0).then(|| s.bb / s.ab),
            BattingStat::BwarRate => s.bwar.filter(|_| s.g > 0.0).map(|w| w / s.g),
            BattingStat::FwarRate => s.fwar.filter(|_| s.g > 0.0).map(|w| w / s.g),
        }
    }

    fn mode(self, config: &RunConfig) -> EstimationMode {
        match self {
            BattingStat::Ba => config.ba_mode,
            _ => EstimationMode::Nonparametric,
        }
    }
}

/// Qualification threshold: median PA after screening out seasons below `screen`.
pub fn qualification_cutoff(pa: &[f64], screen: f64) -> Result<f64> {
    let kept: Vec<f64> = pa.iter().copied().filter(|&v| v >= screen).collect();
    median(&kept).ok_or_else(|| Error::InsufficientData(format!("no season with PA >= {screen}")))
}

/// Divides by a positive park index; a missing index is the identity with a flag.
pub fn park_adjust(value: f64, index: Option<f64>) -> (f64, bool) {
    match index {
        Some(i) if i > 0.0 => (value / i, false),
        _ => (value, true),
    }
}

/// Adjusted at bats and walks from mapped plate appearances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedAtBats {
    pub ab: f64,
    pub bb: f64,
    /// The numerator was negative and the result was set to zero.
    pub zeroed: bool,
}

/// Solves `AB = PA - BB - HBP - SH - SF` with `BB = rate * AB`.
pub fn adjusted_ab(mapped_pa: f64, bb_rate: f64, hbp: f64, sh: f64, sf: f64) -> Result<AdjustedAtBats> {
    if !(0.0..1.0).contains(&bb_rate) {
        return Err(Error::domain(format!("walk rate {bb_rate} outside [0, 1)")));
    }
    let numerator = mapped_pa - hbp - sh - sf;
    if numerator < 0.0 {
        return Ok(AdjustedAtBats {
            ab: 0.0,
            bb: 0.0,
            zeroed: true,
        });
    }
    let ab = numerator / (1.0 + bb_rate);
    Ok(AdjustedAtBats {
        ab,
        bb: bb_rate * ab,
        zeroed: false,
    })
}

/// `(BA * AB + BB + HBP) / (AB + BB + HBP + SF)`; `None` for a zero denominator.
pub fn adjusted_obp(ba: f64, ab: f64, bb: f64, hbp: f64, sf: f64) -> Option<f64> {
    let denominator = ab + bb + hbp + sf;
    (denominator > 0.0).then(|| (ba * ab + bb + hbp) / denominator)
}

fn hand_index(hand: Hand, lhb: f64, rhb: f64) -> f64 {
    match hand {
        Hand::Left => lhb,
        Hand::Right => rhb,
        Hand::Both => 0.5 * (lhb + rhb),
    }
}

/// Combines stints into player seasons, sorted by year then player id.
pub fn aggregate_batting(rows: &[BattingRow], parks: &[ParkFactorRow]) -> Vec<BattingSeason> {
    let park: HashMap<(i32, &str), &ParkFactorRow> =
        parks.iter().map(|p| ((p.year, p.team.as_str()), p)).collect();
    let mut groups: BTreeMap<(i32, &str), Vec<&BattingRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.year, r.player_id.as_str())).or_default().push(r);
    }
    let mut missing_parks = 0usize;
    let out = groups
        .into_values()
        .map(|stints| {
            let first = stints[0];
            let mut s = BattingSeason {
                player_id: first.player_id.clone(),
                name: first.name.clone(),
                year: first.year,
                teams: String::new(),
                bats: first.bats,
                g: 0.0,
                pa: 0.0,
                ab: 0.0,
                h: 0.0,
                hr: 0.0,
                bb: 0.0,
                hbp: 0.0,
                sh: 0.0,
                sf: 0.0,
                bwar: None,
                fwar: None,
                ba_park: 0.0,
                hr_park: 0.0,
                park_missing: false,
            };
            let mut teams = Vec::new();
            let weights: Vec<f64> = if stints.iter().any(|r| r.pa > 0.0) {
                stints.iter().map(|r| r.pa).collect()
            } else {
                vec![1.0; stints.len()]
            };
            let total_weight: f64 = weights.iter().sum();
            for (r, w) in stints.iter().zip(&weights) {
                if !teams.contains(&r.team.as_str()) {
                    teams.push(r.team.as_str());
                }
                s.g += r.g;
                s.pa += r.pa;
                s.ab += r.ab;
                s.h += r.h;
                s.hr += r.hr;
                s.bb += r.bb;
                s.hbp += r.hbp;
                s.sh += r.sh;
                s.sf += r.sf;
                if let Some(v) = r.bwar {
                    s.bwar = Some(s.bwar.unwrap_or(0.0) + v);
                }
                if let Some(v) = r.fwar {
                    s.fwar = Some(s.fwar.unwrap_or(0.0) + v);
                }
                let (ba_i, hr_i) = match park.get(&(r.year, r.team.as_str())) {
                    Some(p) => (
                        hand_index(s.bats, p.ba_index_lhb, p.ba_index_rhb),
                        hand_index(s.bats, p.hr_index_lhb, p.hr_index_rhb),
                    ),
                    None => {
                        s.park_missing = true;
                        (1.0, 1.0)
                    }
                };
                s.ba_park += w / total_weight * ba_i;
                s.hr_park += w / total_weight * hr_i;
            }
            if s.park_missing {
                missing_parks += 1;
            }
            s.teams = teams.join("/");
            s
        })
        .collect();
    if missing_parks > 0 && !parks.is_empty() {
        log::warn!("{missing_parks} batting season(s) lack park factors; identity index used");
    }
    out
}

/// One adjusted season of a batting career.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustedBattingSeason {
    pub player_id: String,
    pub name: String,
    pub source_year: i32,
    pub career_index: usize,
    pub target_year: i32,
    /// Some statistic came from a sub-cutoff season.
    pub partial: bool,
    pub sub_replacement: bool,
    pub park_missing: bool,
    pub raw_pa: f64,
    pub raw_ab: f64,
    pub raw_h: f64,
    pub raw_hr: f64,
    pub raw_bb: f64,
    pub raw_ba: Option<f64>,
    pub raw_obp: Option<f64>,
    pub raw_bwar: Option<f64>,
    pub raw_fwar: Option<f64>,
    pub mapped_pa: f64,
    pub mapped_g: f64,
    /// Projected rates before career smoothing.
    pub ba_unsmoothed: Option<f64>,
    pub hr_rate_unsmoothed: Option<f64>,
    pub bb_rate_unsmoothed: Option<f64>,
    pub bwar_rate_unsmoothed: Option<f64>,
    pub fwar_rate_unsmoothed: Option<f64>,
    pub ba: Option<f64>,
    pub obp: Option<f64>,
    pub hr_rate: Option<f64>,
    pub bb_rate: Option<f64>,
    pub bwar_rate: Option<f64>,
    pub fwar_rate: Option<f64>,
    pub ab: f64,
    pub h: f64,
    pub hr: f64,
    pub bb: f64,
    pub bwar: Option<f64>,
    pub fwar: Option<f64>,
    pub ab_zeroed: bool,
    pub kept_bwar: bool,
    pub kept_fwar: bool,
}

/// Career sums over kept seasons and best single seasons.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BattingTotals {
    pub seasons: usize,
    pub pa: f64,
    pub ab: f64,
    pub h: f64,
    pub hr: f64,
    pub bb: f64,
    pub g: f64,
    pub ba: Option<f64>,
    pub obp: Option<f64>,
    pub bwar: Option<f64>,
    pub fwar: Option<f64>,
    pub peak_h: Option<f64>,
    pub peak_hr: Option<f64>,
    pub peak_bwar: Option<f64>,
    pub peak_fwar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BattingCareer {
    pub player_id: String,
    pub name: String,
    pub debut_year: i32,
    pub seasons: Vec<AdjustedBattingSeason>,
    /// Career seasons whose target year had no season context.
    pub truncated: usize,
    /// bWAR data exist and no adjusted season is positive.
    pub removed: bool,
    /// fWAR data exist and no adjusted season is positive.
    pub removed_fwar: bool,
    pub totals: BattingTotals,
}

/// Season contexts, qualification thresholds, and playing-time tables.
#[derive(Debug, Clone)]
pub struct BattingModel {
    pub seasons: Vec<BattingSeason>,
    pub thresholds: BTreeMap<i32, f64>,
    pub stats: BTreeMap<BattingStat, StatContexts>,
    pub pa_tables: BTreeMap<i32, PercentileTable>,
    pub g_tables: BTreeMap<i32, PercentileTable>,
    /// Median games of qualified players.
    pub median_games: BTreeMap<i32, f64>,
}

impl BattingModel {
    pub fn build(seasons: Vec<BattingSeason>, population: &PopulationSeries, config: &RunConfig) -> Result<Self> {
        Self::build_with(seasons, population, config, &BattingStat::ALL)
    }

    /// Builds contexts for `stats` only; the others stay empty in adjusted output.
    pub fn build_with(
        seasons: Vec<BattingSeason>,
        population: &PopulationSeries,
        config: &RunConfig,
        stats: &[BattingStat],
    ) -> Result<Self> {
        let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, s) in seasons.iter().enumerate() {
            by_year.entry(s.year).or_default().push(i);
        }
        let mut thresholds = BTreeMap::new();
        let mut qualified: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut pa_tables = BTreeMap::new();
        let mut g_tables = BTreeMap::new();
        let mut median_games = BTreeMap::new();
        for (&year, rows) in &by_year {
            let pas: Vec<f64> = rows.iter().map(|&i| seasons[i].pa).collect();
            let threshold = match qualification_cutoff(&pas, config.screen_pa) {
                Ok(t) => t,
                Err(_) => {
                    log::warn!("batting season {year}: no player reaches {} PA; skipped", config.screen_pa);
                    continue;
                }
            };
            let q: Vec<usize> = rows.iter().copied().filter(|&i| seasons[i].pa >= threshold).collect();
            let played: Vec<usize> = rows.iter().copied().filter(|&i| seasons[i].pa > 0.0).collect();
            let pa: Vec<f64> = played.iter().map(|&i| seasons[i].pa).collect();
            let g: Vec<f64> = played.iter().map(|&i| seasons[i].g).collect();
            pa_tables.insert(year, PercentileTable::new(&pa)?);
            g_tables.insert(year, PercentileTable::new(&g)?);
            let qg: Vec<f64> = q.iter().map(|&i| seasons[i].g).collect();
            median_games.insert(year, median(&qg).unwrap_or(0.0));
            thresholds.insert(year, threshold);
            qualified.insert(year, q);
        }
        let wanted = stats;
        let mut stats = BTreeMap::new();
        for &stat in wanted {
            let ctx = StatContexts::build(
                stat.key(),
                &qualified,
                |i| stat.value(&seasons[i]),
                population,
                config.talent_law,
                stat.mode(config),
                config.sd_convention,
            )?;
            stats.insert(stat, ctx);
        }
        Ok(BattingModel {
            seasons,
            thresholds,
            stats,
            pa_tables,
            g_tables,
            median_games,
        })
    }

    /// Row indices per player, each sorted by year.
    pub fn players(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, s) in self.seasons.iter().enumerate() {
            out.entry(s.player_id.as_str()).or_default().push(i);
        }
        for rows in out.values_mut() {
            rows.sort_by_key(|&i| self.seasons[i].year);
        }
        out
    }

    fn talent(&self, stat: BattingStat, row: usize) -> Result<Option<SeasonTalent>> {
        let s = &self.seasons[row];
        match (stat.value(s), self.stats.get(&stat)) {
            (Some(v), Some(ctx)) => ctx.talent(row, s.year, v),
            _ => Ok(None),
        }
    }

    /// Adjusts one player's seasons onto the trajectory starting at `config.start_year`.
    pub fn adjust_career(&self, rows: &[usize], config: &RunConfig) -> Result<BattingCareer> {
        let mut rows = rows.to_vec();
        rows.sort_by_key(|&i| self.seasons[i].year);
        let first = &self.seasons[rows[0]];
        let mut seasons = Vec::new();
        let mut source_rows = Vec::new();
        let mut truncated = 0;
        for (t, &row) in rows.iter().enumerate() {
            let s = &self.seasons[row];
            let target = config.start_year + t as i32;
            let (Some(pa_src), Some(pa_tgt), Some(g_src), Some(g_tgt)) = (
                self.pa_tables.get(&s.year),
                self.pa_tables.get(&target),
                self.g_tables.get(&s.year),
                self.g_tables.get(&target),
            ) else {
                truncated += 1;
                continue;
            };
            if !self.thresholds.contains_key(&target) {
                truncated += 1;
                continue;
            }
            let mut partial = false;
            let mut sub_replacement = false;
            let mut rates = [None; 5];
            for (k, stat) in BattingStat::ALL.into_iter().enumerate() {
                let Some(talent) = self.talent(stat, row)? else { continue };
                partial |= talent.partial;
                if let Some(p) = self.stats[&stat].project(&talent, s.year, target)? {
                    sub_replacement |= p.sub_replacement;
                    rates[k] = Some(p.value);
                }
            }
            let (mapped_pa, mapped_g) = if s.pa > 0.0 {
                (quantile_map(s.pa, pa_src, pa_tgt), quantile_map(s.g, g_src, g_tgt))
            } else {
                (0.0, 0.0)
            };
            seasons.push(AdjustedBattingSeason {
                player_id: s.player_id.clone(),
                name: s.name.clone(),
                source_year: s.year,
                career_index: t + 1,
                target_year: target,
                partial,
                sub_replacement,
                park_missing: s.park_missing,
                raw_pa: s.pa,
                raw_ab: s.ab,
                raw_h: s.h,
                raw_hr: s.hr,
                raw_bb: s.bb,
                raw_ba: s.raw_ba(),
                raw_obp: s.raw_obp(),
                raw_bwar: s.bwar,
                raw_fwar: s.fwar,
                mapped_pa,
                mapped_g,
                ba_unsmoothed: rates[0],
                hr_rate_unsmoothed: rates[1],
                bb_rate_unsmoothed: rates[2],
                bwar_rate_unsmoothed: rates[3],
                fwar_rate_unsmoothed: rates[4],
                ba: None,
                obp: None,
                hr_rate: None,
                bb_rate: None,
                bwar_rate: None,
                fwar_rate: None,
                ab: 0.0,
                h: 0.0,
                hr: 0.0,
                bb: 0.0,
                bwar: None,
                fwar: None,
                ab_zeroed: false,
                kept_bwar: true,
                kept_fwar: true,
            });
            source_rows.push(row);
        }
        self.finish(first, seasons, &source_rows, truncated, config)
    }

    fn finish(
        &self,
        first: &BattingSeason,
        mut seasons: Vec<AdjustedBattingSeason>,
        rows: &[usize],
        truncated: usize,
        config: &RunConfig,
    ) -> Result<BattingCareer> {
        let smooth = |get: fn(&AdjustedBattingSeason) -> Option<f64>| -> Result<Vec<Option<f64>>> {
            let raw: Vec<f64> = seasons.iter().map(|a| get(a).unwrap_or(f64::NAN)).collect();
            let out = match config.smoothing {
                Some(sm) => smooth_career(&raw, sm)?,
                None => raw,
            };
            Ok(out.into_iter().map(|v| v.is_finite().then_some(v)).collect())
        };
        let ba = smooth(|a| a.ba_unsmoothed)?;
        let hr_rate = smooth(|a| a.hr_rate_unsmoothed)?;
        let bb_rate = smooth(|a| a.bb_rate_unsmoothed)?;
        let bwar_rate = smooth(|a| a.bwar_rate_unsmoothed)?;
        let fwar_rate = smooth(|a| a.fwar_rate_unsmoothed)?;
        for (k, a) in seasons.iter_mut().enumerate() {
            let raw = &self.seasons[rows[k]];
            a.ba = ba[k].map(|v| v.clamp(0.0, 1.0));
            a.hr_rate = hr_rate[k].map(|v| v.max(0.0));
            a.bb_rate = bb_rate[k].map(|v| v.clamp(0.0, 0.999));
            a.bwar_rate = bwar_rate[k];
            a.fwar_rate = fwar_rate[k];
            let abs = adjusted_ab(a.mapped_pa, a.bb_rate.unwrap_or(0.0), raw.hbp, raw.sh, raw.sf)?;
            a.ab = abs.ab;
            a.bb = abs.bb;
            a.ab_zeroed = abs.zeroed;
            a.h = a.ba.unwrap_or(0.0) * a.ab;
            a.hr = a.hr_rate.unwrap_or(0.0) * a.ab;
            a.obp = match (a.ba, a.bb_rate) {
                (Some(ba), Some(_)) => adjusted_obp(ba, a.ab, a.bb, raw.hbp, raw.sf).map(|v| v.clamp(0.0, 1.0)),
                _ => None,
            };
            a.bwar = a.bwar_rate.map(|r| r * a.mapped_g);
            a.fwar = a.fwar_rate.map(|r| r * a.mapped_g);
        }
        let removed = apply_trim(&mut seasons, |a| a.bwar, |a, k| a.kept_bwar = k, config.trailing_keep);
        let removed_fwar = apply_trim(&mut seasons, |a| a.fwar, |a, k| a.kept_fwar = k, config.trailing_keep);

        let mut t = BattingTotals::default();
        let mut hbp = 0.0;
        let mut sf = 0.0;
        for (k, a) in seasons.iter().enumerate() {
            if a.kept_fwar {
                if let Some(w) = a.fwar {
                    t.fwar = Some(t.fwar.unwrap_or(0.0) + w);
                    t.peak_fwar = Some(t.peak_fwar.map_or(w, |p: f64| p.max(w)));
                }
            }
            if !a.kept_bwar {
                continue;
            }
            let raw = &self.seasons[rows[k]];
            t.seasons += 1;
            t.pa += a.mapped_pa;
            t.ab += a.ab;
            t.h += a.h;
            t.hr += a.hr;
            t.bb += a.bb;
            t.g += a.mapped_g;
            hbp += raw.hbp;
            sf += raw.sf;
            if let Some(w) = a.bwar {
                t.bwar = Some(t.bwar.unwrap_or(0.0) + w);
                t.peak_bwar = Some(t.peak_bwar.map_or(w, |p: f64| p.max(w)));
            }
            t.peak_h = Some(t.peak_h.map_or(a.h, |p: f64| p.max(a.h)));
            t.peak_hr = Some(t.peak_hr.map_or(a.hr, |p: f64| p.max(a.hr)));
        }
        if t.ab > 0.0 {
            t.ba = Some(t.h / t.ab);
        }
        let denominator = t.ab + t.bb + hbp + sf;
        if denominator > 0.0 {
            t.obp = Some((t.h + t.bb + hbp) / denominator);
        }
        Ok(BattingCareer {
            player_id: first.player_id.clone(),
            name: first.name.clone(),
            debut_year: first.year,
            seasons,
            truncated,
            removed,
            removed_fwar,
            totals: t,
        })
    }

    /// Adjusts every player, in player-id order.
    pub fn adjust_all(&self, config: &RunConfig) -> Result<Vec<BattingCareer>> {
        let players: Vec<Vec<usize>> = self.players().into_values().collect();
        players
            .par_iter()
            .map(|rows| self.adjust_career(rows, config))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().filter(|c| !c.seasons.is_empty()).collect())
    }
}

/// Marks kept seasons by the WAR trimming rule; returns whether the player is removed.
pub(crate) fn apply_trim<T>(
    seasons: &mut [T],
    war: impl Fn(&T) -> Option<f64>,
    mark: impl Fn(&mut T, bool),
    trailing: usize,
) -> bool {
    if seasons.iter().all(|a| war(a).is_none()) {
        return false;
    }
    let values: Vec<f64> = seasons.iter().map(|a| war(a).unwrap_or(0.0)).collect();
    let kept = trim_career(&values, trailing);
    for (k, a) in seasons.iter_mut().enumerate() {
        let keep = kept.as_ref().is_some_and(|r| r.contains(&k));
        mark(a, keep);
    }
    kept.is_none()
}
