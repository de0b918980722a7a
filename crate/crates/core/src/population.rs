//! Eligible-population series and the binomial over-representation odds.

use crate::error::{Error, Result, ValidationCode};
use crate::special::{binomial_cdf, Prob};
use serde::{Deserialize, Serialize};

/// Decade estimates of the eligible population, in millions, 1870-2020.
pub const HISTORICAL_MILLIONS: [(i32, f64); 16] = [
    (1870, 0.39),
    (1880, 0.56),
    (1890, 0.67),
    (1900, 0.79),
    (1910, 1.27),
    (1920, 1.05),
    (1930, 1.36),
    (1940, 2.82),
    (1950, 3.41),
    (1960, 5.62),
    (1970, 7.80),
    (1980, 9.30),
    (1990, 8.18),
    (2000, 14.14),
    (2010, 14.50),
    (2020, 15.73),
];

/// Yearly eligible-population records with linear interpolation between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSeries {
    years: Vec<i32>,
    /// Persons (already multiplied by any weight).
    persons: Vec<f64>,
}

impl PopulationSeries {
    /// Builds from `(year, persons)` records; years must strictly increase.
    pub fn new(records: Vec<(i32, f64)>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::validation(
                ValidationCode::EmptySeason,
                "population",
                "no population records",
            ));
        }
        for (i, w) in records.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::validation(
                    ValidationCode::NonMonotoneYears,
                    format!("population record {}", i + 2),
                    format!("year {} does not follow {}", w[1].0, w[0].0),
                ));
            }
        }
        for (i, &(year, v)) in records.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(
                    ValidationCode::NonPositive,
                    format!("population record {}", i + 1),
                    format!("population for {year} must be positive, got {v}"),
                ));
            }
        }
        let (years, persons) = records.into_iter().unzip();
        Ok(PopulationSeries { years, persons })
    }

    /// Records given in millions.
    pub fn from_millions(records: &[(i32, f64)]) -> Result<Self> {
        Self::new(records.iter().map(|&(y, m)| (y, m * 1e6)).collect())
    }

    /// The built-in decade series.
    pub fn historical() -> Self {
        Self::from_millions(&HISTORICAL_MILLIONS).expect("built-in series is valid")
    }

    pub fn first_year(&self) -> i32 {
        self.years[0]
    }

    pub fn last_year(&self) -> i32 {
        *self.years.last().unwrap()
    }

    pub fn records(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.years.iter().copied().zip(self.persons.iter().copied())
    }

    /// Persons eligible in `year`, exact at records and linear between them.
    pub fn population_at(&self, year: f64) -> Result<f64> {
        let (first, last) = (self.first_year() as f64, self.last_year() as f64);
        if !(year >= first && year <= last) {
            return Err(Error::Range(format!(
                "year {year} outside population range {first}-{last}"
            )));
        }
        let i = self.years.partition_point(|&y| (y as f64) <= year);
        if i == 0 {
            return Ok(self.persons[0]);
        }
        let i = i - 1;
        if self.years[i] as f64 == year || i + 1 == self.years.len() {
            return Ok(self.persons[i]);
        }
        let (y0, y1) = (self.years[i] as f64, self.years[i + 1] as f64);
        let t = (year - y0) / (y1 - y0);
        Ok(self.persons[i] + t * (self.persons[i + 1] - self.persons[i]))
    }

    /// Population as a whole-person count, the `N` of a season.
    pub fn count_at(&self, year: i32) -> Result<u64> {
        Ok(self.population_at(year as f64)?.round().max(1.0) as u64)
    }

    /// Share of the record mass in `[start, end]` that lies at or before `cutoff`.
    pub fn cumulative_proportion(&self, cutoff: i32, start: i32, end: i32) -> Result<f64> {
        if end < start {
            return Err(Error::domain(format!("empty range {start}-{end}")));
        }
        let mut total = 0.0;
        let mut before = 0.0;
        for (y, v) in self.records() {
            if y < start || y > end {
                continue;
            }
            total += v;
            if y <= cutoff {
                before += v;
            }
        }
        if total <= 0.0 {
            return Err(Error::domain(format!("no population records in {start}-{end}")));
        }
        Ok(before / total)
    }

    /// [`cumulative_proportion`](Self::cumulative_proportion) over the whole series.
    pub fn cumulative_proportion_full(&self, cutoff: i32) -> Result<f64> {
        self.cumulative_proportion(cutoff, self.first_year(), self.last_year())
    }
}

/// `1 / P(Binomial(k, p) >= x)`: how unlikely `x` or more of `k` is by chance.
pub fn chance_top_k(x: u64, k: u64, p: f64) -> Result<f64> {
    if x > k {
        return Err(Error::domain(format!("x = {x} exceeds k = {k}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("probability must lie in (0, 1), got {p}")));
    }
    if x == 0 {
        return Ok(1.0);
    }
    let tail = binomial_cdf(k as f64, (x - 1) as f64, Prob::from_p(p)).q;
    Ok(1.0 / tail)
}
