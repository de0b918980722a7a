//! Command bodies. Every output starts with `# key = value` lines echoing the
//! effective settings.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::Context;
use fullhouse_core::batting::{aggregate_batting, BattingCareer, BattingModel, BattingStat};
use fullhouse_core::config::RunConfig;
use fullhouse_core::distributions::TalentLaw;
use fullhouse_core::io::{self, write_records};
use fullhouse_core::pitching::{PitchingCareer, PitchingStat};
use fullhouse_core::population::{chance_top_k, PopulationSeries};
use fullhouse_core::report::{
    batting_candidates, footer_proportion, format_odds, format_probability, law_sweep, pitching_candidates,
    rank_table, replacement_curve, start_year_sweep, write_rank_table,
};
use fullhouse_core::simulation::{run_simulation, SimConfig};
use fullhouse_core::{Error, Result};
use serde::Serialize;

use crate::data::{Inputs, Source};
use crate::{Cli, Side, Sweep};

/// Where the main output goes.
pub struct Output(Option<PathBuf>);

impl Output {
    pub fn new(path: Option<PathBuf>) -> Self {
        Output(path)
    }

    fn emit(&self, bytes: &[u8]) -> Result<()> {
        match &self.0 {
            Some(p) => fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(bytes).map_err(|e| Error::Io(e.to_string())),
        }
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Batting => "batting",
        Side::Pitching => "pitching",
    }
}

fn header(config: &RunConfig, extra: &[(&str, String)]) -> Vec<String> {
    let mut h = config.header_lines();
    h.extend(extra.iter().map(|(k, v)| format!("{k} = {v}")));
    h
}

fn records<T: Serialize>(header: &[String], rows: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_records(&mut buf, header, rows)?;
    Ok(buf)
}

pub fn ingest(source: Source, config: &RunConfig, out: &Output) -> anyhow::Result<()> {
    let inputs = Inputs::open(source, config)?;
    out.emit(&records(&header(config, &[]), &inputs.inventory()?)?)?;
    Ok(())
}

#[derive(Serialize)]
struct BattingCareerRow<'a> {
    player_id: &'a str,
    name: &'a str,
    debut_year: i32,
    removed: bool,
    removed_fwar: bool,
    truncated: usize,
    seasons: usize,
    pa: f64,
    ab: f64,
    h: f64,
    hr: f64,
    bb: f64,
    g: f64,
    ba: Option<f64>,
    obp: Option<f64>,
    bwar: Option<f64>,
    fwar: Option<f64>,
    peak_h: Option<f64>,
    peak_hr: Option<f64>,
    peak_bwar: Option<f64>,
    peak_fwar: Option<f64>,
}

impl<'a> From<&'a BattingCareer> for BattingCareerRow<'a> {
    fn from(c: &'a BattingCareer) -> Self {
        let t = &c.totals;
        BattingCareerRow {
            player_id: &c.player_id,
            name: &c.name,
            debut_year: c.debut_year,
            removed: c.removed,
            removed_fwar: c.removed_fwar,
            truncated: c.truncated,
            seasons: t.seasons,
            pa: t.pa,
            ab: t.ab,
            h: t.h,
            hr: t.hr,
            bb: t.bb,
            g: t.g,
            ba: t.ba,
            obp: t.obp,
            bwar: t.bwar,
            fwar: t.fwar,
            peak_h: t.peak_h,
            peak_hr: t.peak_hr,
            peak_bwar: t.peak_bwar,
            peak_fwar: t.peak_fwar,
        }
    }
}

#[derive(Serialize)]
struct PitchingCareerRow<'a> {
    player_id: &'a str,
    name: &'a str,
    debut_year: i32,
    removed: bool,
    removed_fwar: bool,
    truncated: usize,
    seasons: usize,
    ip: f64,
    er: f64,
    so: f64,
    g: f64,
    era: Option<f64>,
    bwar: Option<f64>,
    fwar: Option<f64>,
    peak_so: Option<f64>,
    peak_bwar: Option<f64>,
    peak_fwar: Option<f64>,
}

impl<'a> From<&'a PitchingCareer> for PitchingCareerRow<'a> {
    fn from(c: &'a PitchingCareer) -> Self {
        let t = &c.totals;
        PitchingCareerRow {
            player_id: &c.player_id,
            name: &c.name,
            debut_year: c.debut_year,
            removed: c.removed,
            removed_fwar: c.removed_fwar,
            truncated: c.truncated,
            seasons: t.seasons,
            ip: t.ip,
            er: t.er,
            so: t.so,
            g: t.g,
            era: t.era,
            bwar: t.bwar,
            fwar: t.fwar,
            peak_so: t.peak_so,
            peak_bwar: t.peak_bwar,
            peak_fwar: t.peak_fwar,
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn adjust(side: Side, source: Source, config: &RunConfig, careers: Option<&Path>, out: &Output) -> anyhow::Result<()> {
    let inputs = Inputs::open(source, config)?;
    let h = header(config, &[("side", side_name(side).to_string())]);
    let (seasons, totals) = match side {
        Side::Batting => {
            let all = inputs.batting_model(config)?.adjust_all(config)?;
            let seasons: Vec<_> = all.iter().flat_map(|c| c.seasons.iter()).collect();
            let totals: Vec<BattingCareerRow> = all.iter().map(Into::into).collect();
            (records(&h, &seasons)?, records(&h, &totals)?)
        }
        Side::Pitching => {
            let all = inputs.pitching_model(config)?.adjust_all(config)?;
            let seasons: Vec<_> = all.iter().flat_map(|c| c.seasons.iter()).collect();
            let totals: Vec<PitchingCareerRow> = all.iter().map(Into::into).collect();
            (records(&h, &seasons)?, records(&h, &totals)?)
        }
    };
    out.emit(&seasons)?;
    if let Some(path) = careers {
        write_file(path, &totals)?;
    }
    Ok(())
}

pub fn rank(side: Side, source: Source, config: &RunConfig, peak: bool, out: &Output) -> anyhow::Result<()> {
    let inputs = Inputs::open(source, config)?;
    let stat = config.stat.clone().unwrap_or_else(|| "bwar".to_string());
    let candidates = match side {
        Side::Batting => batting_candidates(&inputs.batting_model(config)?.adjust_all(config)?, &stat, peak, config)?,
        Side::Pitching => pitching_candidates(&inputs.pitching_model(config)?.adjust_all(config)?, &stat, peak, config)?,
    };
    let table = rank_table(&stat, candidates, config.top, stat == "era", &inputs.population, config)?;
    if table.eligible < config.top {
        log::warn!("only {} eligible players for a top {}", table.eligible, config.top);
    }
    let h = header(
        config,
        &[
            ("side", side_name(side).to_string()),
            ("ranking", if peak { "peak" } else { "career" }.to_string()),
            ("eligible", table.eligible.to_string()),
        ],
    );
    let mut buf = Vec::new();
    write_rank_table(&mut buf, &h, &table)?;
    out.emit(&buf)?;
    Ok(())
}

#[derive(Serialize)]
struct ChanceRow {
    early: u64,
    top: usize,
    proportion: String,
    reciprocal: f64,
    odds: String,
}

pub fn chance(
    early: u64,
    proportion: Option<f64>,
    population: Option<&Path>,
    config: &RunConfig,
    out: &Output,
) -> anyhow::Result<()> {
    let p = match proportion {
        Some(p) => p,
        None => {
            let series = match population {
                Some(path) => io::load_population(path)?,
                None => PopulationSeries::historical(),
            };
            footer_proportion(&series, config)?
        }
    };
    let z = chance_top_k(early, config.top as u64, p)?;
    let row = ChanceRow {
        early,
        top: config.top,
        proportion: format_probability(p),
        reciprocal: z,
        odds: format_odds(z),
    };
    out.emit(&records(&header(config, &[]), &[row])?)?;
    Ok(())
}

pub fn replacement(side: Side, source: Source, config: &RunConfig, reference_year: i32, out: &Output) -> anyhow::Result<()> {
    let inputs = Inputs::open(source, config)?;
    let stat = config.stat.as_deref().unwrap_or("bwar");
    let points = match (side, stat) {
        (Side::Batting, "bwar" | "fwar") => {
            let model = inputs.batting_model(config)?;
            let key = if stat == "bwar" { BattingStat::BwarRate } else { BattingStat::FwarRate };
            replacement_curve(&model.stats[&key], &model.median_games, reference_year)?
        }
        (Side::Pitching, "bwar" | "fwar") => {
            let model = inputs.pitching_model(config)?;
            let key = if stat == "bwar" { PitchingStat::BwarRate } else { PitchingStat::FwarRate };
            replacement_curve(&model.stats[&key], &model.median_games, reference_year)?
        }
        _ => return Err(Error::Range(format!("replacement curves need bwar or fwar, not '{stat}'")).into()),
    };
    let h = header(
        config,
        &[
            ("side", side_name(side).to_string()),
            ("reference_year", reference_year.to_string()),
        ],
    );
    out.emit(&records(&h, &points)?)?;
    Ok(())
}

/// The four standard laws with the configured one first.
fn sweep_laws(config: &RunConfig) -> Vec<TalentLaw> {
    let mut laws = vec![config.talent_law];
    for spec in ["pareto", "pareto:3", "normal", "folded-normal"] {
        let law = TalentLaw::parse(spec).expect("built-in law");
        if !laws.contains(&law) {
            laws.push(law);
        }
    }
    laws
}

pub fn sensitivity(
    sweep: Sweep,
    source: Source,
    config: &RunConfig,
    years: RangeInclusive<i32>,
    out: &Output,
) -> anyhow::Result<()> {
    let inputs = Inputs::open(source, config)?;
    let seasons = aggregate_batting(&inputs.batting_rows()?, &inputs.park_factors()?);
    let bytes = match sweep {
        Sweep::Laws => {
            let (rows, _) = law_sweep(&seasons, &inputs.population, config, &sweep_laws(config), &[10, 25])?;
            records(&header(config, &[("sweep", "laws".to_string())]), &rows)?
        }
        Sweep::StartYears => {
            if years.is_empty() {
                return Err(Error::Range(format!("empty start-year range {years:?}")).into());
            }
            let model = BattingModel::build_with(seasons, &inputs.population, config, &[BattingStat::BwarRate])?;
            let bands = start_year_sweep(&model, config, years.clone(), config.top)?;
            let inside = bands.iter().filter(|b| b.inside).count();
            let h = header(
                config,
                &[
                    ("sweep", format!("start years {}-{}", years.start(), years.end())),
                    ("inside_band", format!("{inside}/{}", bands.len())),
                ],
            );
            records(&h, &bands)?
        }
    };
    out.emit(&bytes)?;
    Ok(())
}

fn sim_header(c: &SimConfig) -> Vec<String> {
    let laws: Vec<String> = c.generating_laws.iter().map(TalentLaw::label).collect();
    let mut h = vec![
        format!("iterations = {}", c.iterations),
        format!("seed = {}", c.seed),
        format!("n = {}", c.n),
        format!("top = {}", c.top),
        format!("assumed_law = {}", c.assumed_law.label()),
        format!("generating_laws = {}", laws.join(",")),
    ];
    for (i, l) in c.leagues.iter().enumerate() {
        h.push(format!(
            "league{} = {},{},{},{},{}",
            i + 1,
            l.population,
            l.mu,
            l.sigma,
            l.improved,
            l.deteriorated
        ));
    }
    h
}

pub fn simulate(cli: &Cli, iterations: Option<usize>, json: Option<&Path>, out: &Output) -> anyhow::Result<()> {
    let mut c = SimConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        c.apply_text(&text)?;
    }
    if let Some(v) = &cli.talent_dist {
        c.set("assumed_law", v)?;
    }
    if let Some(v) = cli.seed {
        c.seed = v;
    }
    if let Some(v) = cli.top {
        c.top = v;
    }
    if let Some(v) = iterations {
        c.iterations = v;
    }
    let result = run_simulation(&c)?;
    let mut buf = Vec::new();
    write_records(&mut buf, &sim_header(&c), &result.records)?;
    for s in &result.summaries {
        writeln!(
            buf,
            "# {}: strictly beats {:.3}, beats or ties {:.3}",
            s.law, s.strictly_beats, s.beats_or_ties
        )
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    out.emit(&buf)?;
    if let Some(path) = json {
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a SimConfig,
            summaries: &'a [fullhouse_core::simulation::LawSummary],
        }
        let text = serde_json::to_string_pretty(&Report {
            config: &c,
            summaries: &result.summaries,
        })
        .context("serializing simulation summary")?;
        write_file(path, format!("{text}\n").as_bytes())?;
    }
    Ok(())
}
