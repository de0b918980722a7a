//! Ranking tables with chance footers, replacement curves, and sensitivity sweeps.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::batting::{BattingCareer, BattingModel, BattingSeason, BattingStat};
use crate::config::RunConfig;
use crate::distributions::TalentLaw;
use crate::engine::StatContexts;
use crate::error::{Error, Result};
use crate::io::write_records;
use crate::pitching::PitchingCareer;
use crate::population::{chance_top_k, PopulationSeries};
use crate::transform::project;

/// `"1 in z"`: three significant figures below 100, whole numbers above.
pub fn format_odds(z: f64) -> String {
    if !z.is_finite() {
        return "1 in inf".to_string();
    }
    if z >= 100.0 {
        return format!("1 in {}", z.round() as u64);
    }
    let digits = 2 - z.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, z);
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    format!("1 in {s}")
}

pub fn format_probability(p: f64) -> String {
    format!("{p:.3}")
}

/// One player eligible for a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub player_id: String,
    pub name: String,
    pub debut_year: i32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub rank: usize,
    pub player_id: String,
    pub name: String,
    pub debut_year: i32,
    pub value: f64,
    /// Debuted before the footer cutoff year.
    pub early: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub stat: String,
    pub rows: Vec<RankRow>,
    /// `(label, value)` pairs in the order they are printed.
    pub footer: Vec<(String, String)>,
    /// Players eligible before truncation to the requested length.
    pub eligible: usize,
}

/// Ranks candidates (ties by player id) and attaches the footer rows.
pub fn rank_table(
    stat: &str,
    mut candidates: Vec<Candidate>,
    top: usize,
    ascending: bool,
    population: &PopulationSeries,
    config: &RunConfig,
) -> Result<RankTable> {
    candidates.retain(|c| c.value.is_finite());
    candidates.sort_by(|a, b| {
        let ord = if ascending {
            a.value.total_cmp(&b.value)
        } else {
            b.value.total_cmp(&a.value)
        };
        ord.then_with(|| a.player_id.cmp(&b.player_id))
    });
    let eligible = candidates.len();
    let cutoff = config.chance_cutoff_year;
    let rows: Vec<RankRow> = candidates
        .into_iter()
        .take(top)
        .enumerate()
        .map(|(i, c)| RankRow {
            rank: i + 1,
            early: c.debut_year < cutoff,
            player_id: c.player_id,
            name: c.name,
            debut_year: c.debut_year,
            value: c.value,
        })
        .collect();
    let footer = chance_footer(&rows, top, population, config)?;
    Ok(RankTable {
        stat: stat.to_string(),
        rows,
        footer,
        eligible,
    })
}

/// The proportion used for chance rows, from the config or the population series.
pub fn footer_proportion(population: &PopulationSeries, config: &RunConfig) -> Result<f64> {
    match config.chance_proportion {
        Some(p) => Ok(p),
        None => {
            let end = config.chance_end_year.unwrap_or(population.last_year());
            population.cumulative_proportion(config.chance_cutoff_year, population.first_year(), end)
        }
    }
}

fn chance_footer(
    rows: &[RankRow],
    top: usize,
    population: &PopulationSeries,
    config: &RunConfig,
) -> Result<Vec<(String, String)>> {
    let cutoff = config.chance_cutoff_year;
    let p = footer_proportion(population, config)?;
    let mut ks: Vec<usize> = [10, top].into_iter().filter(|&k| k <= rows.len()).collect();
    if ks.is_empty() && !rows.is_empty() {
        ks.push(rows.len());
    }
    ks.dedup();
    let mut out = Vec::new();
    let counts: Vec<(usize, usize)> = ks
        .iter()
        .map(|&k| (k, rows[..k].iter().filter(|r| r.early).count()))
        .collect();
    for &(k, x) in &counts {
        out.push((format!("pre-{cutoff} in top {k}"), format!("{x}/{k}")));
    }
    out.push((format!("proportion before {cutoff}"), format_probability(p)));
    if config.chance_proportion.is_none() {
        let end = config.chance_end_year.unwrap_or(population.last_year());
        out.push((
            "eligible population".to_string(),
            format!("({} - {end})", population.first_year()),
        ));
    }
    for &(k, x) in &counts {
        let z = chance_top_k(x as u64, k as u64, p)?;
        out.push((format!("chance in top {k}"), format_odds(z)));
    }
    Ok(out)
}

/// Writes the ranking as CSV between `#` header and footer lines.
pub fn write_rank_table<W: Write>(mut out: W, header: &[String], table: &RankTable) -> Result<()> {
    let mut buf = Vec::new();
    write_records(&mut buf, header, &table.rows)?;
    for (label, value) in &table.footer {
        writeln!(buf, "# {label}: {value}").map_err(|e| Error::Io(e.to_string()))?;
    }
    out.write_all(&buf).map_err(|e| Error::Io(e.to_string()))
}

/// Statistics a batting ranking can use.
pub const BATTING_RANK_STATS: &[&str] = &["bwar", "fwar", "h", "hr", "bb", "ba", "obp"];
pub const PITCHING_RANK_STATS: &[&str] = &["bwar", "fwar", "so", "era"];

fn unknown_stat(stat: &str, allowed: &[&str]) -> Error {
    Error::Range(format!("unknown statistic '{stat}'; expected one of {}", allowed.join(", ")))
}

/// Career (or, with `peak`, best-season) values of one batting statistic.
///
/// Players removed by WAR trimming are left out; BA and OBP need the career
/// at-bat cutoff.
pub fn batting_candidates(careers: &[BattingCareer], stat: &str, peak: bool, config: &RunConfig) -> Result<Vec<Candidate>> {
    if !BATTING_RANK_STATS.contains(&stat) {
        return Err(unknown_stat(stat, BATTING_RANK_STATS));
    }
    if peak && matches!(stat, "ba" | "obp" | "bb") {
        return Err(Error::Range(format!("no peak ranking for '{stat}'")));
    }
    let mut out = Vec::new();
    for c in careers {
        let removed = if stat == "fwar" { c.removed_fwar } else { c.removed };
        if removed {
            continue;
        }
        let t = &c.totals;
        let value = match (stat, peak) {
            ("bwar", false) => t.bwar,
            ("bwar", true) => t.peak_bwar,
            ("fwar", false) => t.fwar,
            ("fwar", true) => t.peak_fwar,
            ("h", false) => Some(t.h),
            ("h", true) => t.peak_h,
            ("hr", false) => Some(t.hr),
            ("hr", true) => t.peak_hr,
            ("bb", _) => Some(t.bb),
            ("ba", _) => t.ba.filter(|_| t.ab >= config.career_ab_cutoff),
            ("obp", _) => t.obp.filter(|_| t.ab >= config.career_ab_cutoff),
            _ => None,
        };
        if let Some(value) = value {
            out.push(Candidate {
                player_id: c.player_id.clone(),
                name: c.name.clone(),
                debut_year: c.debut_year,
                value,
            });
        }
    }
    Ok(out)
}

/// Pitching analogue of [`batting_candidates`]; ERA needs the career innings cutoff.
pub fn pitching_candidates(careers: &[PitchingCareer], stat: &str, peak: bool, config: &RunConfig) -> Result<Vec<Candidate>> {
    if !PITCHING_RANK_STATS.contains(&stat) {
        return Err(unknown_stat(stat, PITCHING_RANK_STATS));
    }
    if peak && stat == "era" {
        return Err(Error::Range("no peak ranking for 'era'".into()));
    }
    let mut out = Vec::new();
    for c in careers {
        let removed = if stat == "fwar" { c.removed_fwar } else { c.removed };
        if removed {
            continue;
        }
        let t = &c.totals;
        let value = match (stat, peak) {
            ("bwar", false) => t.bwar,
            ("bwar", true) => t.peak_bwar,
            ("fwar", false) => t.fwar,
            ("fwar", true) => t.peak_fwar,
            ("so", false) => Some(t.so),
            ("so", true) => t.peak_so,
            ("era", _) => t.era.filter(|_| t.ip >= config.career_ip_cutoff),
            _ => None,
        };
        if let Some(value) = value {
            out.push(Candidate {
                player_id: c.player_id.clone(),
                name: c.name.clone(),
                debut_year: c.debut_year,
                value,
            });
        }
    }
    Ok(out)
}

/// A zero-WAR season from the reference year expressed in another season.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplacementPoint {
    pub year: i32,
    /// WAR per game.
    pub rate: f64,
    /// Rate times the season's median qualified games.
    pub war: f64,
    pub sub_replacement: bool,
}

/// Projects the talent of a zero-WAR-per-game season in `reference_year` into every season.
pub fn replacement_curve(
    contexts: &StatContexts,
    games: &BTreeMap<i32, f64>,
    reference_year: i32,
) -> Result<Vec<ReplacementPoint>> {
    let reference = contexts
        .contexts
        .get(&reference_year)
        .ok_or_else(|| Error::Range(format!("no season context for reference year {reference_year}")))?;
    let (talent, _) = reference.talent_for_value(0.0)?;
    let rank = reference.values.partition_point(|&v| v <= 0.0).clamp(1, reference.n());
    contexts
        .contexts
        .iter()
        .map(|(&year, ctx)| {
            let own = (year == reference_year).then_some(rank);
            let p = project(talent, ctx, own)?;
            let g = games.get(&year).copied().unwrap_or(0.0);
            Ok(ReplacementPoint {
                year,
                rate: p.value,
                war: p.value * g,
                sub_replacement: p.sub_replacement,
            })
        })
        .collect()
}

/// Player ids ranked by career bWAR, best first.
pub fn career_bwar_order(careers: &[BattingCareer]) -> Vec<(String, String)> {
    let mut v: Vec<(&BattingCareer, f64)> = careers
        .iter()
        .filter(|c| !c.removed)
        .filter_map(|c| c.totals.bwar.map(|w| (c, w)))
        .collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.player_id.cmp(&b.0.player_id)));
    v.into_iter().map(|(c, _)| (c.player_id.clone(), c.name.clone())).collect()
}

/// Shared names and shared positions among the first `k` entries.
pub fn compare_rankings(a: &[String], b: &[String], k: usize) -> (usize, usize) {
    let a = &a[..k.min(a.len())];
    let b = &b[..k.min(b.len())];
    let names = a.iter().filter(|x| b.contains(x)).count();
    let ranks = a.iter().zip(b).filter(|(x, y)| x == y).count();
    (names, ranks)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawComparison {
    pub law: String,
    pub reference_law: String,
    pub top: usize,
    pub matched_names: usize,
    pub matched_ranks: usize,
}

/// Career bWAR rankings under each law compared with the first law.
pub fn law_sweep(
    seasons: &[BattingSeason],
    population: &PopulationSeries,
    config: &RunConfig,
    laws: &[TalentLaw],
    tops: &[usize],
) -> Result<(Vec<LawComparison>, Vec<Vec<(String, String)>>)> {
    let orders = laws
        .iter()
        .map(|law| {
            let cfg = RunConfig {
                talent_law: *law,
                ..config.clone()
            };
            let model = BattingModel::build_with(seasons.to_vec(), population, &cfg, &[BattingStat::BwarRate])?;
            Ok(career_bwar_order(&model.adjust_all(&cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let ids: Vec<Vec<String>> = orders
        .iter()
        .map(|o| o.iter().map(|(id, _)| id.clone()).collect())
        .collect();
    let mut out = Vec::new();
    for (i, law) in laws.iter().enumerate() {
        for &k in tops {
            let (names, ranks) = compare_rankings(&ids[0], &ids[i], k);
            out.push(LawComparison {
                law: law.label(),
                reference_law: laws[0].label(),
                top: k,
                matched_names: names,
                matched_ranks: ranks,
            });
        }
    }
    Ok((out, orders))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankBand {
    pub player_id: String,
    pub name: String,
    pub default_rank: usize,
    /// 10th percentile of ranks across start years.
    pub lower: f64,
    /// 90th percentile.
    pub upper: f64,
    pub median: f64,
    pub inside: bool,
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let f = h - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + f * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Inner-80% rank bands of the default-start top players across start years.
///
/// A player missing from a sweep ranking takes the rank after the last ranked player.
pub fn start_year_sweep(
    model: &BattingModel,
    config: &RunConfig,
    start_years: RangeInclusive<i32>,
    top: usize,
) -> Result<Vec<RankBand>> {
    let default_order = career_bwar_order(&model.adjust_all(config)?);
    let years: Vec<i32> = start_years.collect();
    let rankings: Vec<HashMap<String, usize>> = years
        .par_iter()
        .map(|&y| {
            let cfg = RunConfig {
                start_year: y,
                ..config.clone()
            };
            let order = career_bwar_order(&model.adjust_all(&cfg)?);
            Ok(order.into_iter().enumerate().map(|(i, (id, _))| (id, i + 1)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(default_order
        .iter()
        .take(top)
        .enumerate()
        .map(|(i, (id, name))| {
            let mut ranks: Vec<f64> = rankings
                .iter()
                .map(|r| r.get(id).copied().unwrap_or(r.len() + 1) as f64)
                .collect();
            ranks.sort_by(f64::total_cmp);
            let lower = quantile_sorted(&ranks, 0.1);
            let upper = quantile_sorted(&ranks, 0.9);
            let default_rank = i + 1;
            RankBand {
                player_id: id.clone(),
                name: name.clone(),
                default_rank,
                lower,
                upper,
                median: quantile_sorted(&ranks, 0.5),
                inside: lower <= default_rank as f64 && default_rank as f64 <= upper,
            }
        })
        .collect())
}
