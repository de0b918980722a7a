//! Era adjustment of pitching seasons, including rotation-size talent shifts.

use std::collections::{BTreeMap, HashSet};
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;

use crate::batting::apply_trim;
use crate::career::smooth_career;
use crate::config::RunConfig;
use crate::engine::{median, SeasonTalent, StatContexts};
use crate::error::{Error, Result};
use crate::io::{GamelogRow, PitchingRow, RotationRow};
use crate::mapping::{quantile_map, PercentileTable};
use crate::population::PopulationSeries;
use crate::transform::EstimationMode;

/// Average largest run of distinct starters beginning at each game.
///
/// From every start position the window grows while each new starter is
/// distinct from those already in it. Windows that reach the end of the
/// sequence without a repeat are censored and left out of the average unless
/// no window stopped on a repeat, in which case the whole sequence is one
/// rotation.
pub fn rotation_size<T: Eq + Hash>(starters: &[T]) -> Result<f64> {
    let n = starters.len();
    if n == 0 {
        return Err(Error::InsufficientData("rotation size needs at least one start".into()));
    }
    let mut total = 0usize;
    let mut windows = 0usize;
    let mut seen = HashSet::new();
    for i in 0..n {
        seen.clear();
        let mut j = i;
        while j < n && seen.insert(&starters[j]) {
            j += 1;
        }
        if j < n {
            total += j - i;
            windows += 1;
        }
    }
    if windows == 0 {
        return Ok(n as f64);
    }
    Ok(total as f64 / windows as f64)
}

/// A season's rotation size and team count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationProfile {
    pub year: i32,
    pub league_rotation: f64,
    pub teams: u32,
}

impl RotationProfile {
    /// Number of full-time starters, `round(rotation * teams)`.
    pub fn full_time_count(&self) -> usize {
        full_time_pitcher_count(self.league_rotation, self.teams)
    }
}

pub fn full_time_pitcher_count(league_rotation: f64, teams: u32) -> usize {
    (league_rotation * teams as f64).round() as usize
}

/// Profiles from game logs: per-team rotation sizes averaged over teams.
pub fn profiles_from_gamelogs(logs: &[GamelogRow]) -> Result<BTreeMap<i32, RotationProfile>> {
    let mut by_team: BTreeMap<(i32, &str), Vec<(u32, &str)>> = BTreeMap::new();
    for g in logs {
        by_team
            .entry((g.year, g.team.as_str()))
            .or_default()
            .push((g.game_number, g.starter_id.as_str()));
    }
    let mut sizes: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for ((year, _), mut games) in by_team {
        games.sort();
        let starters: Vec<&str> = games.iter().map(|g| g.1).collect();
        sizes.entry(year).or_default().push(rotation_size(&starters)?);
    }
    Ok(sizes
        .into_iter()
        .map(|(year, s)| {
            let profile = RotationProfile {
                year,
                league_rotation: s.iter().sum::<f64>() / s.len() as f64,
                teams: s.len() as u32,
            };
            (year, profile)
        })
        .collect())
}

pub fn profiles_from_table(rows: &[RotationRow]) -> BTreeMap<i32, RotationProfile> {
    rows.iter()
        .map(|r| {
            let profile = RotationProfile {
                year: r.year,
                league_rotation: r.league_rotation,
                teams: r.teams,
            };
            (r.year, profile)
        })
        .collect()
}

/// A talent shifted for a change in rotation size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationShift {
    pub talent: f64,
    /// Rank of the target starter whose talent was added or deducted.
    pub rank: Option<usize>,
    /// The rank exceeded the available starters and was clamped to the last.
    pub clamped: bool,
}

/// Shifts `talent` by the talent of a ranked qualifying starter in the target season.
///
/// Rotation sizes are compared after rounding to whole starters. The rank is
/// `source rotation * target teams` in both directions; the talent at that
/// rank (best first) is added when the source rotation is smaller and
/// deducted when it is larger.
pub fn rotation_adjust(
    talent: f64,
    source_rotation: f64,
    target_rotation: f64,
    target_teams: u32,
    target_talents_desc: &[f64],
) -> Result<RotationShift> {
    let rs = source_rotation.round();
    let rt = target_rotation.round();
    if rs == rt {
        return Ok(RotationShift {
            talent,
            rank: None,
            clamped: false,
        });
    }
    if target_talents_desc.is_empty() {
        return Err(Error::InsufficientData("rotation adjustment needs target starters".into()));
    }
    let wanted = (rs as usize * target_teams as usize).max(1);
    let clamped = wanted > target_talents_desc.len();
    let rank = wanted.min(target_talents_desc.len());
    let shift = target_talents_desc[rank - 1];
    let talent = if rs < rt { talent + shift } else { talent - shift };
    Ok(RotationShift {
        talent,
        rank: Some(rank),
        clamped,
    })
}

/// A player's pitching season with stints combined.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchingSeason {
    pub player_id: String,
    pub name: String,
    pub year: i32,
    pub teams: String,
    pub g: f64,
    pub gs: f64,
    pub ip: f64,
    pub er: f64,
    pub so: f64,
    pub bwar: Option<f64>,
    pub fwar: Option<f64>,
}

impl PitchingSeason {
    pub fn era(&self) -> Option<f64> {
        (self.ip > 0.0).then(|| 9.0 * self.er / self.ip)
    }
}

/// Combines stints; seasons without innings are dropped.
pub fn aggregate_pitching(rows: &[PitchingRow]) -> Vec<PitchingSeason> {
    let mut groups: BTreeMap<(i32, &str), Vec<&PitchingRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.year, r.player_id.as_str())).or_default().push(r);
    }
    groups
        .into_values()
        .filter_map(|stints| {
            let first = stints[0];
            let mut teams: Vec<&str> = Vec::new();
            let mut s = PitchingSeason {
                player_id: first.player_id.clone(),
                name: first.name.clone(),
                year: first.year,
                teams: String::new(),
                g: 0.0,
                gs: 0.0,
                ip: 0.0,
                er: 0.0,
                so: 0.0,
                bwar: None,
                fwar: None,
            };
            for r in &stints {
                if !teams.contains(&r.team.as_str()) {
                    teams.push(r.team.as_str());
                }
                s.g += r.g;
                s.gs += r.gs;
                s.ip += r.ip;
                s.er += r.er;
                s.so += r.so;
                if let Some(v) = r.bwar {
                    s.bwar = Some(s.bwar.unwrap_or(0.0) + v);
                }
                if let Some(v) = r.fwar {
                    s.fwar = Some(s.fwar.unwrap_or(0.0) + v);
                }
            }
            s.teams = teams.join("/");
            (s.ip > 0.0).then_some(s)
        })
        .collect()
}

/// Statistics adjusted through season talent distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PitchingStat {
    /// Negated ERA, so larger is better.
    NegEra,
    /// Strikeouts per inning.
    SoRate,
    BwarRate,
    FwarRate,
}

impl PitchingStat {
    pub const ALL: [PitchingStat; 4] = [
        PitchingStat::NegEra,
        PitchingStat::SoRate,
        PitchingStat::BwarRate,
        PitchingStat::FwarRate,
    ];

    pub fn key(self) -> &'static str {
        match self {
            PitchingStat::NegEra => "neg_era",
            PitchingStat::SoRate => "so_rate",
            PitchingStat::BwarRate => "bwar_rate",
            PitchingStat::FwarRate => "fwar_rate",
        }
    }

    pub fn value(self, s: &PitchingSeason) -> Option<f64> {
        match self {
            PitchingStat::NegEra => s.era().map(|e| -e),
            PitchingStat::SoRate => (s.ip > 0.0).then(|| s.so / s.ip),
            PitchingStat::BwarRate => s.bwar.filter(|_| s.g > 0.0).map(|w| w / s.g),
            PitchingStat::FwarRate => s.fwar.filter(|_| s.g > 0.0).map(|w| w / s.g),
        }
    }
}

/// Full-time pitchers of a season: the `count` largest IP, ties broken by player id.
pub fn select_full_time(seasons: &[PitchingSeason], rows: &[usize], count: usize) -> (Vec<usize>, bool) {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|&a, &b| {
        seasons[b]
            .ip
            .total_cmp(&seasons[a].ip)
            .then_with(|| seasons[a].player_id.cmp(&seasons[b].player_id))
    });
    let short = sorted.len() < count;
    sorted.truncate(count);
    (sorted, short)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustedPitchingSeason {
    pub player_id: String,
    pub name: String,
    pub source_year: i32,
    pub career_index: usize,
    pub target_year: i32,
    pub partial: bool,
    pub sub_replacement: bool,
    /// The rotation shift rank was clamped to the last starter.
    pub rotation_clamped: bool,
    pub source_rotation: f64,
    pub target_rotation: f64,
    pub raw_ip: f64,
    pub raw_er: f64,
    pub raw_so: f64,
    pub raw_era: Option<f64>,
    pub raw_bwar: Option<f64>,
    pub raw_fwar: Option<f64>,
    pub mapped_ip: f64,
    pub mapped_g: f64,
    pub era_unsmoothed: Option<f64>,
    pub so_rate_unsmoothed: Option<f64>,
    pub bwar_rate_unsmoothed: Option<f64>,
    pub fwar_rate_unsmoothed: Option<f64>,
    pub era: Option<f64>,
    pub so_rate: Option<f64>,
    pub bwar_rate: Option<f64>,
    pub fwar_rate: Option<f64>,
    pub er: f64,
    pub so: f64,
    pub bwar: Option<f64>,
    pub fwar: Option<f64>,
    pub kept_bwar: bool,
    pub kept_fwar: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PitchingTotals {
    pub seasons: usize,
    pub ip: f64,
    pub er: f64,
    pub so: f64,
    pub g: f64,
    pub era: Option<f64>,
    pub bwar: Option<f64>,
    pub fwar: Option<f64>,
    pub peak_so: Option<f64>,
    pub peak_bwar: Option<f64>,
    pub peak_fwar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchingCareer {
    pub player_id: String,
    pub name: String,
    pub debut_year: i32,
    pub seasons: Vec<AdjustedPitchingSeason>,
    pub truncated: usize,
    pub removed: bool,
    pub removed_fwar: bool,
    pub totals: PitchingTotals,
}

#[derive(Debug, Clone)]
pub struct PitchingModel {
    pub seasons: Vec<PitchingSeason>,
    pub profiles: BTreeMap<i32, RotationProfile>,
    pub stats: BTreeMap<PitchingStat, StatContexts>,
    pub ip_tables: BTreeMap<i32, PercentileTable>,
    pub g_tables: BTreeMap<i32, PercentileTable>,
    pub median_games: BTreeMap<i32, f64>,
}

impl PitchingModel {
    /// Builds contexts; seasons missing from `profiles` use the default
    /// rotation with the number of distinct teams in the data.
    pub fn build(
        seasons: Vec<PitchingSeason>,
        profiles: BTreeMap<i32, RotationProfile>,
        population: &PopulationSeries,
        config: &RunConfig,
    ) -> Result<Self> {
        let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, s) in seasons.iter().enumerate() {
            by_year.entry(s.year).or_default().push(i);
        }
        let mut profiles = profiles;
        let mut qualified = BTreeMap::new();
        let mut ip_tables = BTreeMap::new();
        let mut g_tables = BTreeMap::new();
        let mut median_games = BTreeMap::new();
        let (mut defaulted, mut short_years) = (Vec::new(), Vec::new());
        for (&year, rows) in &by_year {
            let profile = *profiles.entry(year).or_insert_with(|| {
                let teams: HashSet<&str> = rows
                    .iter()
                    .flat_map(|&i| seasons[i].teams.split('/'))
                    .collect();
                defaulted.push(year);
                RotationProfile {
                    year,
                    league_rotation: config.default_rotation,
                    teams: teams.len().max(1) as u32,
                }
            });
            let (q, short) = select_full_time(&seasons, rows, profile.full_time_count());
            if short {
                log::debug!(
                    "pitching season {year}: {} pitchers for {} full-time slots",
                    rows.len(),
                    profile.full_time_count()
                );
                short_years.push(year);
            }
            let ip: Vec<f64> = rows.iter().map(|&i| seasons[i].ip).collect();
            let g: Vec<f64> = rows.iter().map(|&i| seasons[i].g).collect();
            ip_tables.insert(year, PercentileTable::new(&ip)?);
            g_tables.insert(year, PercentileTable::new(&g)?);
            let qg: Vec<f64> = q.iter().map(|&i| seasons[i].g).collect();
            median_games.insert(year, median(&qg).unwrap_or(0.0));
            qualified.insert(year, q);
        }
        if !defaulted.is_empty() {
            log::warn!(
                "{} pitching season(s) lack rotation data; using rotation {}",
                defaulted.len(),
                config.default_rotation
            );
        }
        if !short_years.is_empty() {
            log::warn!(
                "{} pitching season(s) have fewer pitchers than full-time slots; all pitchers used",
                short_years.len()
            );
        }
        let mut stats = BTreeMap::new();
        for stat in PitchingStat::ALL {
            let ctx = StatContexts::build(
                stat.key(),
                &qualified,
                |i| stat.value(&seasons[i]),
                population,
                config.talent_law,
                EstimationMode::Nonparametric,
                config.sd_convention,
            )?;
            stats.insert(stat, ctx);
        }
        Ok(PitchingModel {
            seasons,
            profiles,
            stats,
            ip_tables,
            g_tables,
            median_games,
        })
    }

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

    fn shifted_talent(
        &self,
        stat: PitchingStat,
        talent: SeasonTalent,
        source: i32,
        target: i32,
    ) -> Result<(SeasonTalent, bool)> {
        if source == target {
            return Ok((talent, false));
        }
        let (Some(ps), Some(pt)) = (self.profiles.get(&source), self.profiles.get(&target)) else {
            return Ok((talent, false));
        };
        let Some(desc) = self.stats[&stat].descending_talents(target) else {
            return Ok((talent, false));
        };
        let shift = rotation_adjust(talent.talent, ps.league_rotation, pt.league_rotation, pt.teams, &desc)?;
        Ok((SeasonTalent { talent: shift.talent, ..talent }, shift.clamped))
    }

    pub fn adjust_career(&self, rows: &[usize], config: &RunConfig) -> Result<PitchingCareer> {
        let mut rows = rows.to_vec();
        rows.sort_by_key(|&i| self.seasons[i].year);
        let first = &self.seasons[rows[0]];
        let mut seasons = Vec::new();
        let mut truncated = 0;
        for (t, &row) in rows.iter().enumerate() {
            let s = &self.seasons[row];
            let target = config.start_year + t as i32;
            let (Some(ip_src), Some(ip_tgt), Some(g_src), Some(g_tgt)) = (
                self.ip_tables.get(&s.year),
                self.ip_tables.get(&target),
                self.g_tables.get(&s.year),
                self.g_tables.get(&target),
            ) else {
                truncated += 1;
                continue;
            };
            let mut partial = false;
            let mut sub_replacement = false;
            let mut rotation_clamped = false;
            let mut rates = [None; 4];
            for (k, stat) in PitchingStat::ALL.into_iter().enumerate() {
                let Some(v) = stat.value(s) else { continue };
                let Some(talent) = self.stats[&stat].talent(row, s.year, v)? else { continue };
                partial |= talent.partial;
                let (talent, clamped) = self.shifted_talent(stat, talent, s.year, target)?;
                rotation_clamped |= clamped;
                if let Some(p) = self.stats[&stat].project(&talent, s.year, target)? {
                    sub_replacement |= p.sub_replacement;
                    rates[k] = Some(p.value);
                }
            }
            seasons.push(AdjustedPitchingSeason {
                player_id: s.player_id.clone(),
                name: s.name.clone(),
                source_year: s.year,
                career_index: t + 1,
                target_year: target,
                partial,
                sub_replacement,
                rotation_clamped,
                source_rotation: self.profiles[&s.year].league_rotation,
                target_rotation: self.profiles[&target].league_rotation,
                raw_ip: s.ip,
                raw_er: s.er,
                raw_so: s.so,
                raw_era: s.era(),
                raw_bwar: s.bwar,
                raw_fwar: s.fwar,
                mapped_ip: quantile_map(s.ip, ip_src, ip_tgt),
                mapped_g: quantile_map(s.g, g_src, g_tgt),
                era_unsmoothed: rates[0].map(|v| -v),
                so_rate_unsmoothed: rates[1],
                bwar_rate_unsmoothed: rates[2],
                fwar_rate_unsmoothed: rates[3],
                era: None,
                so_rate: None,
                bwar_rate: None,
                fwar_rate: None,
                er: 0.0,
                so: 0.0,
                bwar: None,
                fwar: None,
                kept_bwar: true,
                kept_fwar: true,
            });
        }
        let smooth = |get: fn(&AdjustedPitchingSeason) -> Option<f64>| -> Result<Vec<Option<f64>>> {
            let raw: Vec<f64> = seasons.iter().map(|a| get(a).unwrap_or(f64::NAN)).collect();
            let out = match config.smoothing {
                Some(sm) => smooth_career(&raw, sm)?,
                None => raw,
            };
            Ok(out.into_iter().map(|v| v.is_finite().then_some(v)).collect())
        };
        let era = smooth(|a| a.era_unsmoothed)?;
        let so_rate = smooth(|a| a.so_rate_unsmoothed)?;
        let bwar_rate = smooth(|a| a.bwar_rate_unsmoothed)?;
        let fwar_rate = smooth(|a| a.fwar_rate_unsmoothed)?;
        for (k, a) in seasons.iter_mut().enumerate() {
            a.era = era[k].map(|v| v.max(0.0));
            a.so_rate = so_rate[k].map(|v| v.max(0.0));
            a.bwar_rate = bwar_rate[k];
            a.fwar_rate = fwar_rate[k];
            a.er = a.era.unwrap_or(0.0) * a.mapped_ip / 9.0;
            a.so = a.so_rate.unwrap_or(0.0) * a.mapped_ip;
            a.bwar = a.bwar_rate.map(|r| r * a.mapped_g);
            a.fwar = a.fwar_rate.map(|r| r * a.mapped_g);
        }
        let removed = apply_trim(&mut seasons, |a| a.bwar, |a, k| a.kept_bwar = k, config.trailing_keep);
        let removed_fwar = apply_trim(&mut seasons, |a| a.fwar, |a, k| a.kept_fwar = k, config.trailing_keep);
        let mut t = PitchingTotals::default();
        for a in &seasons {
            if a.kept_fwar {
                if let Some(w) = a.fwar {
                    t.fwar = Some(t.fwar.unwrap_or(0.0) + w);
                    t.peak_fwar = Some(t.peak_fwar.map_or(w, |p: f64| p.max(w)));
                }
            }
            if !a.kept_bwar {
                continue;
            }
            t.seasons += 1;
            t.ip += a.mapped_ip;
            t.er += a.er;
            t.so += a.so;
            t.g += a.mapped_g;
            if let Some(w) = a.bwar {
                t.bwar = Some(t.bwar.unwrap_or(0.0) + w);
                t.peak_bwar = Some(t.peak_bwar.map_or(w, |p: f64| p.max(w)));
            }
            t.peak_so = Some(t.peak_so.map_or(a.so, |p: f64| p.max(a.so)));
        }
        if t.ip > 0.0 {
            t.era = Some(9.0 * t.er / t.ip);
        }
        Ok(PitchingCareer {
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

    pub fn adjust_all(&self, config: &RunConfig) -> Result<Vec<PitchingCareer>> {
        let players: Vec<Vec<usize>> = self.players().into_values().collect();
        players
            .par_iter()
            .map(|rows| self.adjust_career(rows, config))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().filter(|c| !c.seasons.is_empty()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation_size(&["A", "A", "A", "A"]).unwrap(), 1.0);
        let abc: Vec<&str> = "ABCABCABC".split("").filter(|s| !s.is_empty()).collect();
        assert_eq!(rotation_size(&abc).unwrap(), 3.0);
        // windows from positions 1..3 stop at lengths 2, 3, 2; the last three reach the end
        let golden = rotation_size(&["A", "B", "A", "C", "A", "B"]).unwrap();
        assert!((golden - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(rotation_size(&["A", "B", "C"]).unwrap(), 3.0);
        assert!(rotation_size::<&str>(&[]).is_err());
    }

    #[test]
    fn rotation_relabel_and_phase_invariance() {
        let base: Vec<u32> = (0..40).map(|i| i % 5).collect();
        let relabeled: Vec<u32> = base.iter().map(|x| 100 - 7 * x).collect();
        let shifted: Vec<u32> = (0..40).map(|i| (i + 3) % 5).collect();
        let r = rotation_size(&base).unwrap();
        assert_eq!(r, 5.0);
        assert_eq!(rotation_size(&relabeled).unwrap(), r);
        assert_eq!(rotation_size(&shifted).unwrap(), r);
    }

    #[test]
    fn full_time_counts() {
        assert_eq!(full_time_pitcher_count(5.0, 30), 150);
        assert_eq!(full_time_pitcher_count(3.0, 12), 36);
    }

    #[test]
    fn ip_ties_break_by_player_id() {
        let mk = |id: &str, ip: f64| PitchingSeason {
            player_id: id.into(),
            name: String::new(),
            year: 1990,
            teams: "T".into(),
            g: 30.0,
            gs: 30.0,
            ip,
            er: 50.0,
            so: 100.0,
            bwar: None,
            fwar: None,
        };
        let s = vec![mk("c", 200.0), mk("b", 180.0), mk("a", 180.0), mk("d", 100.0)];
        let (q, short) = select_full_time(&s, &[0, 1, 2, 3], 2);
        assert_eq!(q, vec![0, 2]);
        assert!(!short);
        let (q, short) = select_full_time(&s, &[0, 1, 2, 3], 6);
        assert_eq!(q.len(), 4);
        assert!(short);
    }

    #[test]
    fn rotation_adjust_examples() {
        let desc: Vec<f64> = (0..200).map(|i| 1000.0 - i as f64).collect();
        let same = rotation_adjust(5.0, 4.6, 5.2, 30, &desc).unwrap();
        assert_eq!(same.talent, 5.0);
        assert_eq!(same.rank, None);
        // 3 * 30 = 90th starter
        let up = rotation_adjust(5.0, 3.0, 5.0, 30, &desc).unwrap();
        assert_eq!(up.rank, Some(90));
        assert_eq!(up.talent, 5.0 + desc[89]);
        // 5 * 12 = 60th starter, deducted
        let down = rotation_adjust(500.0, 5.0, 3.0, 12, &desc).unwrap();
        assert_eq!(down.rank, Some(60));
        assert_eq!(down.talent, 500.0 - desc[59]);
        let clamp = rotation_adjust(5.0, 4.0, 5.0, 60, &desc).unwrap();
        assert!(clamp.clamped);
        assert_eq!(clamp.rank, Some(200));
    }

    #[test]
    fn zero_ip_seasons_are_dropped() {
        let row = |id: &str, ip: f64| PitchingRow {
            player_id: id.into(),
            name: String::new(),
            year: 1990,
            team: "T".into(),
            g: 1.0,
            gs: 0.0,
            ip,
            er: 1.0,
            so: 0.0,
            bwar: None,
            fwar: None,
        };
        let s = aggregate_pitching(&[row("a", 0.0), row("b", 1.0)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].player_id, "b");
    }
}
