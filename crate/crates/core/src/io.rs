//! CSV schemas, row validation, and output writers.
//!
//! Every reader takes a header row, ignores `#` comment lines, and reports the
//! first bad row with a distinct [`ValidationCode`] and its line number.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationCode};
use crate::population::PopulationSeries;

/// Batting handedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hand {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
    /// Switch hitter.
    #[serde(rename = "B")]
    Both,
}

impl Hand {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L" => Some(Hand::Left),
            "R" => Some(Hand::Right),
            "B" | "S" => Some(Hand::Both),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BattingRow {
    pub player_id: String,
    pub name: String,
    pub year: i32,
    pub team: String,
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
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParkFactorRow {
    pub year: i32,
    pub team: String,
    pub ba_index_lhb: f64,
    pub ba_index_rhb: f64,
    pub hr_index_lhb: f64,
    pub hr_index_rhb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchingRow {
    pub player_id: String,
    pub name: String,
    pub year: i32,
    pub team: String,
    pub g: f64,
    pub gs: f64,
    /// Innings pitched as a decimal number of innings.
    pub ip: f64,
    pub er: f64,
    pub so: f64,
    pub bwar: Option<f64>,
    pub fwar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GamelogRow {
    pub team: String,
    pub year: i32,
    pub game_number: u32,
    pub starter_id: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationRow {
    pub year: i32,
    pub league_rotation: f64,
    pub teams: u32,
}

pub const POPULATION_COLUMNS: &[&str] = &["year", "population_millions"];
pub const BATTING_COLUMNS: &[&str] = &[
    "player_id", "name", "year", "team", "bats", "G", "PA", "AB", "H", "HR", "BB", "HBP", "SH",
    "SF", "bwar", "fwar",
];
pub const PARK_COLUMNS: &[&str] = &[
    "year", "team", "ba_index_lhb", "ba_index_rhb", "hr_index_lhb", "hr_index_rhb",
];
pub const PITCHING_COLUMNS: &[&str] = &[
    "player_id", "name", "year", "team", "G", "GS", "IP", "ER", "SO", "bwar", "fwar",
];
pub const GAMELOG_COLUMNS: &[&str] = &["team", "year", "game_number", "starter_id"];
pub const ROTATION_COLUMNS: &[&str] = &["year", "league_rotation", "teams"];

/// A parsed CSV file with named-column access.
struct Table {
    source: String,
    columns: HashMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn read<R: Read>(reader: R, source: &str, required: &[&str]) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::validation(ValidationCode::Parse, format!("{source} header"), e.to_string()))?
            .clone();
        let columns: HashMap<String, usize> =
            headers.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        for &name in required {
            if !columns.contains_key(name) {
                return Err(Error::validation(
                    ValidationCode::MissingColumn,
                    format!("{source} header"),
                    format!("missing column '{name}'"),
                ));
            }
        }
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::validation(ValidationCode::Parse, format!("{source} line {line}"), e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record));
        }
        Ok(Table {
            source: source.to_string(),
            columns,
            rows,
        })
    }

    fn location(&self, line: u64) -> String {
        format!("{} line {line}", self.source)
    }

    fn text<'a>(&self, rec: &'a csv::StringRecord, name: &str) -> Option<&'a str> {
        self.columns.get(name).and_then(|&i| rec.get(i))
    }

    fn string(&self, line: u64, rec: &csv::StringRecord, name: &str) -> Result<String> {
        match self.text(rec, name) {
            Some(s) if !s.is_empty() => Ok(s.to_string()),
            _ => Err(Error::validation(
                ValidationCode::Parse,
                self.location(line),
                format!("empty '{name}'"),
            )),
        }
    }

    fn number<T: std::str::FromStr>(&self, line: u64, rec: &csv::StringRecord, name: &str) -> Result<T> {
        let s = self.text(rec, name).unwrap_or("");
        s.parse::<T>().map_err(|_| {
            Error::validation(
                ValidationCode::Parse,
                self.location(line),
                format!("'{name}' is not a number: '{s}'"),
            )
        })
    }

    fn real(&self, line: u64, rec: &csv::StringRecord, name: &str) -> Result<f64> {
        let v: f64 = self.number(line, rec, name)?;
        if !v.is_finite() {
            return Err(Error::validation(
                ValidationCode::Parse,
                self.location(line),
                format!("'{name}' is not finite"),
            ));
        }
        Ok(v)
    }

    fn optional_real(&self, line: u64, rec: &csv::StringRecord, name: &str) -> Result<Option<f64>> {
        match self.text(rec, name) {
            None | Some("") | Some("NA") => Ok(None),
            Some(_) => self.real(line, rec, name).map(Some),
        }
    }

    fn count(&self, line: u64, rec: &csv::StringRecord, name: &str) -> Result<f64> {
        let v = self.real(line, rec, name)?;
        if v < 0.0 {
            return Err(Error::validation(
                ValidationCode::NegativeCount,
                self.location(line),
                format!("'{name}' is negative ({v})"),
            ));
        }
        Ok(v)
    }

    fn positive(&self, line: u64, rec: &csv::StringRecord, name: &str) -> Result<f64> {
        let v = self.real(line, rec, name)?;
        if v <= 0.0 {
            return Err(Error::validation(
                ValidationCode::NonPositive,
                self.location(line),
                format!("'{name}' must be positive ({v})"),
            ));
        }
        Ok(v)
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reads `year,population_millions[,weight]`; a weight multiplies the count.
pub fn read_population<R: Read>(reader: R, source: &str) -> Result<PopulationSeries> {
    let t = Table::read(reader, source, POPULATION_COLUMNS)?;
    let mut records = Vec::with_capacity(t.rows.len());
    let mut previous: Option<i32> = None;
    for (line, rec) in &t.rows {
        let year: i32 = t.number(*line, rec, "year")?;
        if let Some(p) = previous {
            if year <= p {
                return Err(Error::validation(
                    ValidationCode::NonMonotoneYears,
                    t.location(*line),
                    format!("year {year} does not follow {p}"),
                ));
            }
        }
        previous = Some(year);
        let millions = t.positive(*line, rec, "population_millions")?;
        let weight = match t.optional_real(*line, rec, "weight")? {
            Some(w) if w <= 0.0 => {
                return Err(Error::validation(
                    ValidationCode::NonPositive,
                    t.location(*line),
                    format!("'weight' must be positive ({w})"),
                ))
            }
            Some(w) => w,
            None => 1.0,
        };
        records.push((year, millions * weight));
    }
    if records.is_empty() {
        return Err(Error::validation(ValidationCode::EmptySeason, source, "no population records"));
    }
    PopulationSeries::from_millions(&records)
}

pub fn read_batting<R: Read>(reader: R, source: &str) -> Result<Vec<BattingRow>> {
    let t = Table::read(reader, source, BATTING_COLUMNS)?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        let line = *line;
        let bats_text = t.text(rec, "bats").unwrap_or("");
        let bats = Hand::parse(bats_text).ok_or_else(|| {
            Error::validation(
                ValidationCode::Parse,
                t.location(line),
                format!("'bats' must be L, R, or B, got '{bats_text}'"),
            )
        })?;
        let row = BattingRow {
            player_id: t.string(line, rec, "player_id")?,
            name: t.text(rec, "name").unwrap_or("").to_string(),
            year: t.number(line, rec, "year")?,
            team: t.string(line, rec, "team")?,
            bats,
            g: t.count(line, rec, "G")?,
            pa: t.count(line, rec, "PA")?,
            ab: t.count(line, rec, "AB")?,
            h: t.count(line, rec, "H")?,
            hr: t.count(line, rec, "HR")?,
            bb: t.count(line, rec, "BB")?,
            hbp: t.count(line, rec, "HBP")?,
            sh: t.count(line, rec, "SH")?,
            sf: t.count(line, rec, "SF")?,
            bwar: t.optional_real(line, rec, "bwar")?,
            fwar: t.optional_real(line, rec, "fwar")?,
        };
        if row.pa < row.ab {
            return Err(Error::validation(
                ValidationCode::PlateAppearancesBelowAtBats,
                t.location(line),
                format!("PA {} below AB {}", row.pa, row.ab),
            ));
        }
        if row.ab < row.h {
            return Err(Error::validation(
                ValidationCode::AtBatsBelowHits,
                t.location(line),
                format!("AB {} below H {}", row.ab, row.h),
            ));
        }
        if row.h < row.hr {
            return Err(Error::validation(
                ValidationCode::HitsBelowHomeRuns,
                t.location(line),
                format!("H {} below HR {}", row.h, row.hr),
            ));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn read_park_factors<R: Read>(reader: R, source: &str) -> Result<Vec<ParkFactorRow>> {
    let t = Table::read(reader, source, PARK_COLUMNS)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(ParkFactorRow {
                year: t.number(*line, rec, "year")?,
                team: t.string(*line, rec, "team")?,
                ba_index_lhb: t.positive(*line, rec, "ba_index_lhb")?,
                ba_index_rhb: t.positive(*line, rec, "ba_index_rhb")?,
                hr_index_lhb: t.positive(*line, rec, "hr_index_lhb")?,
                hr_index_rhb: t.positive(*line, rec, "hr_index_rhb")?,
            })
        })
        .collect()
}

pub fn read_pitching<R: Read>(reader: R, source: &str) -> Result<Vec<PitchingRow>> {
    let t = Table::read(reader, source, PITCHING_COLUMNS)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            let line = *line;
            Ok(PitchingRow {
                player_id: t.string(line, rec, "player_id")?,
                name: t.text(rec, "name").unwrap_or("").to_string(),
                year: t.number(line, rec, "year")?,
                team: t.string(line, rec, "team")?,
                g: t.count(line, rec, "G")?,
                gs: t.count(line, rec, "GS")?,
                ip: t.count(line, rec, "IP")?,
                er: t.count(line, rec, "ER")?,
                so: t.count(line, rec, "SO")?,
                bwar: t.optional_real(line, rec, "bwar")?,
                fwar: t.optional_real(line, rec, "fwar")?,
            })
        })
        .collect()
}

pub fn read_gamelogs<R: Read>(reader: R, source: &str) -> Result<Vec<GamelogRow>> {
    let t = Table::read(reader, source, GAMELOG_COLUMNS)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(GamelogRow {
                team: t.string(*line, rec, "team")?,
                year: t.number(*line, rec, "year")?,
                game_number: t.number(*line, rec, "game_number")?,
                starter_id: t.string(*line, rec, "starter_id")?,
            })
        })
        .collect()
}

pub fn read_rotations<R: Read>(reader: R, source: &str) -> Result<Vec<RotationRow>> {
    let t = Table::read(reader, source, ROTATION_COLUMNS)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            let league_rotation = t.positive(*line, rec, "league_rotation")?;
            let teams: u32 = t.number(*line, rec, "teams")?;
            if teams == 0 {
                return Err(Error::validation(
                    ValidationCode::NonPositive,
                    t.location(*line),
                    "'teams' must be positive",
                ));
            }
            Ok(RotationRow {
                year: t.number(*line, rec, "year")?,
                league_rotation,
                teams,
            })
        })
        .collect()
}

macro_rules! path_reader {
    ($name:ident, $inner:ident, $ty:ty) => {
        pub fn $name(path: &Path) -> Result<$ty> {
            $inner(open(path)?, &source_name(path))
        }
    };
}

path_reader!(load_population, read_population, PopulationSeries);
path_reader!(load_batting, read_batting, Vec<BattingRow>);
path_reader!(load_park_factors, read_park_factors, Vec<ParkFactorRow>);
path_reader!(load_pitching, read_pitching, Vec<PitchingRow>);
path_reader!(load_gamelogs, read_gamelogs, Vec<GamelogRow>);
path_reader!(load_rotations, read_rotations, Vec<RotationRow>);

/// Writes `# ` header lines followed by serialized records.
pub fn write_records<W: Write, T: Serialize>(
    mut out: W,
    header: &[String],
    records: &[T],
) -> Result<()> {
    for line in header {
        writeln!(out, "# {line}").map_err(|e| Error::Io(e.to_string()))?;
    }
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Formats a float with a fixed number of decimals, leaving an empty field for `None`.
pub fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.decimals$}"),
        _ => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(err: Error) -> ValidationCode {
        match err {
            Error::Validation { code, .. } => code,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    const BAT_HEADER: &str = "player_id,name,year,team,bats,G,PA,AB,H,HR,BB,HBP,SH,SF,bwar,fwar\n";

    #[test]
    fn batting_row_parses() {
        let text = format!("{BAT_HEADER}p1,Ann,1990,AAA,L,150,600,520,160,20,70,5,3,2,4.5,\n");
        let rows = read_batting(text.as_bytes(), "batting.csv").unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].bats, Hand::Left);
        assert_eq!(rows[0].bwar, Some(4.5));
        assert_eq!(rows[0].fwar, None);
    }

    #[test]
    fn batting_violations_have_distinct_codes() {
        let cases = [
            ("p1,A,1990,T,R,10,100,120,10,1,0,0,0,0,,", ValidationCode::PlateAppearancesBelowAtBats),
            ("p1,A,1990,T,R,10,100,90,95,1,0,0,0,0,,", ValidationCode::AtBatsBelowHits),
            ("p1,A,1990,T,R,10,100,90,5,6,0,0,0,0,,", ValidationCode::HitsBelowHomeRuns),
            ("p1,A,1990,T,R,-1,100,90,5,1,0,0,0,0,,", ValidationCode::NegativeCount),
            ("p1,A,1990,T,X,10,100,90,5,1,0,0,0,0,,", ValidationCode::Parse),
        ];
        for (row, expected) in cases {
            let text = format!("{BAT_HEADER}{row}\n");
            assert_eq!(code(read_batting(text.as_bytes(), "b").unwrap_err()), expected, "{row}");
        }
    }

    #[test]
    fn row_numbers_are_reported() {
        let text = format!("{BAT_HEADER}p1,A,1990,T,R,10,100,90,5,1,0,0,0,0,,\np2,B,1990,T,R,10,80,90,5,1,0,0,0,0,,\n");
        match read_batting(text.as_bytes(), "batting.csv").unwrap_err() {
            Error::Validation { location, .. } => assert_eq!(location, "batting.csv line 3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_column() {
        let text = "player_id,name,year\np,A,1990\n";
        assert_eq!(code(read_batting(text.as_bytes(), "b").unwrap_err()), ValidationCode::MissingColumn);
    }

    #[test]
    fn population_rules() {
        let ok = "year,population_millions\n1900,1.0\n1910,2.0\n";
        let s = read_population(ok.as_bytes(), "p").unwrap();
        assert_eq!(s.count_at(1910).unwrap(), 2_000_000);
        let weighted = "year,population_millions,weight\n1900,1.0,0.5\n1910,2.0,\n";
        assert_eq!(read_population(weighted.as_bytes(), "p").unwrap().count_at(1900).unwrap(), 500_000);
        let back = "year,population_millions\n1910,1.0\n1900,2.0\n";
        assert_eq!(code(read_population(back.as_bytes(), "p").unwrap_err()), ValidationCode::NonMonotoneYears);
        let zero = "year,population_millions\n1900,0\n";
        assert_eq!(code(read_population(zero.as_bytes(), "p").unwrap_err()), ValidationCode::NonPositive);
    }

    #[test]
    fn comments_are_skipped() {
        let text = "# produced elsewhere\nyear,league_rotation,teams\n1990,4.8,26\n";
        let rows = read_rotations(text.as_bytes(), "r").unwrap();
        assert_eq!(rows, vec![RotationRow { year: 1990, league_rotation: 4.8, teams: 26 }]);
    }
}
