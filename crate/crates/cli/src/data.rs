//! Input discovery: a data directory of CSVs or the seeded synthetic league.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fullhouse_core::batting::{aggregate_batting, BattingModel};
use fullhouse_core::config::RunConfig;
use fullhouse_core::io::{self, BattingRow, ParkFactorRow, PitchingRow};
use fullhouse_core::pitching::{aggregate_pitching, profiles_from_gamelogs, profiles_from_table, PitchingModel, RotationProfile};
use fullhouse_core::population::PopulationSeries;
use fullhouse_core::synth::{synth_batting, synth_pitching, SynthConfig};
use fullhouse_core::{Error, Result};
use serde::Serialize;

pub const POPULATION_FILE: &str = "population.csv";
pub const BATTING_FILE: &str = "batting.csv";
pub const PARK_FILE: &str = "park_factors.csv";
pub const PITCHING_FILE: &str = "pitching.csv";
pub const GAMELOG_FILE: &str = "gamelogs.csv";
pub const ROTATION_FILE: &str = "rotations.csv";

#[derive(Debug, Clone)]
pub enum Source {
    Dir(PathBuf),
    /// Synthetic league seeded from the run config.
    Synthetic,
}

#[derive(Debug, Serialize)]
pub struct InventoryRow {
    pub file: String,
    pub rows: usize,
    pub first_year: Option<i32>,
    pub last_year: Option<i32>,
}

fn row(file: &str, rows: usize, years: impl Iterator<Item = i32> + Clone) -> InventoryRow {
    InventoryRow {
        file: file.to_string(),
        rows,
        first_year: years.clone().min(),
        last_year: years.max(),
    }
}

pub struct Inputs {
    pub population: PopulationSeries,
    source: Source,
    seed: u64,
}

impl Inputs {
    pub fn open(source: Source, config: &RunConfig) -> Result<Self> {
        let population = match &source {
            Source::Dir(dir) if dir.join(POPULATION_FILE).exists() => io::load_population(&dir.join(POPULATION_FILE))?,
            Source::Dir(dir) => {
                if !dir.is_dir() {
                    return Err(Error::Io(format!("{}: not a directory", dir.display())));
                }
                log::warn!("no {POPULATION_FILE} in {}; using the built-in table", dir.display());
                PopulationSeries::historical()
            }
            Source::Synthetic => PopulationSeries::historical(),
        };
        Ok(Inputs {
            population,
            source,
            seed: config.seed,
        })
    }

    fn synth(&self) -> SynthConfig {
        SynthConfig {
            seed: self.seed,
            ..SynthConfig::default()
        }
    }

    fn required(dir: &Path, name: &str) -> Result<PathBuf> {
        let p = dir.join(name);
        if p.exists() {
            Ok(p)
        } else {
            Err(Error::Io(format!("{}: missing", p.display())))
        }
    }

    pub fn batting_rows(&self) -> Result<Vec<BattingRow>> {
        match &self.source {
            Source::Dir(dir) => io::load_batting(&Self::required(dir, BATTING_FILE)?),
            Source::Synthetic => Ok(synth_batting(&self.synth())),
        }
    }

    pub fn park_factors(&self) -> Result<Vec<ParkFactorRow>> {
        match &self.source {
            Source::Dir(dir) if dir.join(PARK_FILE).exists() => io::load_park_factors(&dir.join(PARK_FILE)),
            _ => Ok(Vec::new()),
        }
    }

    pub fn pitching_rows(&self) -> Result<Vec<PitchingRow>> {
        match &self.source {
            Source::Dir(dir) => io::load_pitching(&Self::required(dir, PITCHING_FILE)?),
            Source::Synthetic => Ok(synth_pitching(&self.synth())),
        }
    }

    /// Game logs win over a rotation table; neither means default rotations.
    pub fn rotation_profiles(&self) -> Result<BTreeMap<i32, RotationProfile>> {
        let Source::Dir(dir) = &self.source else {
            return Ok(BTreeMap::new());
        };
        if dir.join(GAMELOG_FILE).exists() {
            profiles_from_gamelogs(&io::load_gamelogs(&dir.join(GAMELOG_FILE))?)
        } else if dir.join(ROTATION_FILE).exists() {
            Ok(profiles_from_table(&io::load_rotations(&dir.join(ROTATION_FILE))?))
        } else {
            Ok(BTreeMap::new())
        }
    }

    pub fn batting_model(&self, config: &RunConfig) -> Result<BattingModel> {
        let seasons = aggregate_batting(&self.batting_rows()?, &self.park_factors()?);
        BattingModel::build(seasons, &self.population, config)
    }

    pub fn pitching_model(&self, config: &RunConfig) -> Result<PitchingModel> {
        let seasons = aggregate_pitching(&self.pitching_rows()?);
        PitchingModel::build(seasons, self.rotation_profiles()?, &self.population, config)
    }

    /// Row counts and year spans for every file present.
    pub fn inventory(&self) -> Result<Vec<InventoryRow>> {
        let mut out = Vec::new();
        let pop: Vec<i32> = self.population.records().map(|(y, _)| y).collect();
        out.push(row(POPULATION_FILE, pop.len(), pop.iter().copied()));
        let present = |name: &str| match &self.source {
            Source::Dir(dir) => dir.join(name).exists(),
            Source::Synthetic => matches!(name, BATTING_FILE | PITCHING_FILE),
        };
        if present(BATTING_FILE) {
            let rows = self.batting_rows()?;
            out.push(row(BATTING_FILE, rows.len(), rows.iter().map(|r| r.year)));
        }
        if present(PARK_FILE) {
            let rows = self.park_factors()?;
            out.push(row(PARK_FILE, rows.len(), rows.iter().map(|r| r.year)));
        }
        if present(PITCHING_FILE) {
            let rows = self.pitching_rows()?;
            out.push(row(PITCHING_FILE, rows.len(), rows.iter().map(|r| r.year)));
        }
        if let Source::Dir(dir) = &self.source {
            if present(GAMELOG_FILE) {
                let rows = io::load_gamelogs(&dir.join(GAMELOG_FILE))?;
                out.push(row(GAMELOG_FILE, rows.len(), rows.iter().map(|r| r.year)));
            }
            if present(ROTATION_FILE) {
                let rows = io::load_rotations(&dir.join(ROTATION_FILE))?;
                out.push(row(ROTATION_FILE, rows.len(), rows.iter().map(|r| r.year)));
            }
        }
        Ok(out)
    }
}
