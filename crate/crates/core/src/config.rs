//! Run configuration with `key = value` file support.

use std::path::Path;

use crate::distributions::{SdConvention, TalentLaw};
use crate::error::{Error, Result, ValidationCode};
use crate::spline::Smoothing;
use crate::transform::EstimationMode;

/// Settings shared by every adjustment command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub talent_law: TalentLaw,
    /// First season of the common career trajectory.
    pub start_year: i32,
    pub stat: Option<String>,
    pub top: usize,
    pub seed: u64,
    /// Estimation mode for batting average; every other statistic is nonparametric.
    pub ba_mode: EstimationMode,
    pub sd_convention: SdConvention,
    pub smoothing: Option<Smoothing>,
    /// Sub-zero seasons kept after a career's last positive-WAR season.
    pub trailing_keep: usize,
    /// Seasons below this PA are dropped before the qualification median.
    pub screen_pa: f64,
    pub career_ab_cutoff: f64,
    pub career_ip_cutoff: f64,
    /// Debut year splitting "early" players in ranking footers.
    pub chance_cutoff_year: i32,
    /// Last year of the population range behind ranking footers; defaults to the series end.
    pub chance_end_year: Option<i32>,
    /// Overrides the cumulative population proportion in ranking footers.
    pub chance_proportion: Option<f64>,
    /// Rotation used when neither game logs nor a rotation table are given.
    pub default_rotation: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            talent_law: TalentLaw::Pareto {
                alpha: TalentLaw::pareto_80_20_alpha(),
            },
            start_year: 1977,
            stat: None,
            top: 25,
            seed: 1,
            ba_mode: EstimationMode::Parametric,
            sd_convention: SdConvention::Unbiased,
            smoothing: Some(Smoothing::Gcv),
            trailing_keep: 1,
            screen_pa: 75.0,
            career_ab_cutoff: 3000.0,
            career_ip_cutoff: 1500.0,
            chance_cutoff_year: 1950,
            chance_end_year: None,
            chance_proportion: None,
            default_rotation: 5.0,
        }
    }
}

fn config_error(key: &str, message: impl Into<String>) -> Error {
    Error::validation(ValidationCode::Config, format!("config key '{key}'"), message)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_error(key, format!("cannot parse '{value}'")))
}

impl RunConfig {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "talent_dist" | "talent_law" => {
                self.talent_law =
                    TalentLaw::parse(value).map_err(|e| config_error(key, e.to_string()))?
            }
            "start_year" => self.start_year = parse_num(key, value)?,
            "stat" => self.stat = (!value.is_empty()).then(|| value.to_string()),
            "top" => {
                self.top = parse_num(key, value)?;
                if self.top == 0 {
                    return Err(config_error(key, "must be at least 1"));
                }
            }
            "seed" => self.seed = parse_num(key, value)?,
            "ba_mode" => {
                self.ba_mode = match value {
                    "parametric" => EstimationMode::Parametric,
                    "nonparametric" => EstimationMode::Nonparametric,
                    _ => return Err(config_error(key, "expected parametric or nonparametric")),
                }
            }
            "sd_convention" => {
                self.sd_convention = match value {
                    "unbiased" => SdConvention::Unbiased,
                    "ml" | "maximum_likelihood" => SdConvention::MaximumLikelihood,
                    _ => return Err(config_error(key, "expected unbiased or ml")),
                }
            }
            "smoothing" => {
                self.smoothing = match value {
                    "gcv" => Some(Smoothing::Gcv),
                    "off" | "none" => None,
                    other => {
                        let l: f64 = parse_num(key, other)?;
                        if !(l >= 0.0 && l.is_finite()) {
                            return Err(config_error(key, "penalty must be >= 0"));
                        }
                        Some(Smoothing::Fixed(l))
                    }
                }
            }
            "trailing_keep" => self.trailing_keep = parse_num(key, value)?,
            "screen_pa" => self.screen_pa = parse_num(key, value)?,
            "career_ab_cutoff" => self.career_ab_cutoff = parse_num(key, value)?,
            "career_ip_cutoff" => self.career_ip_cutoff = parse_num(key, value)?,
            "chance_cutoff_year" => self.chance_cutoff_year = parse_num(key, value)?,
            "chance_end_year" if value.is_empty() => self.chance_end_year = None,
            "chance_end_year" => self.chance_end_year = Some(parse_num(key, value)?),
            "chance_proportion" if value.is_empty() => self.chance_proportion = None,
            "chance_proportion" => {
                let p: f64 = parse_num(key, value)?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(config_error(key, "must lie in (0, 1)"));
                }
                self.chance_proportion = Some(p);
            }
            "default_rotation" => {
                let r: f64 = parse_num(key, value)?;
                if !(r >= 1.0 && r.is_finite()) {
                    return Err(config_error(key, "must be >= 1"));
                }
                self.default_rotation = r;
            }
            _ => return Err(config_error(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::validation(
                    ValidationCode::Config,
                    format!("config line {}", i + 1),
                    format!("expected key = value, got '{line}'"),
                ));
            };
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// The effective settings, one `key = value` per line.
    pub fn header_lines(&self) -> Vec<String> {
        let smoothing = match self.smoothing {
            Some(Smoothing::Gcv) => "gcv".to_string(),
            Some(Smoothing::Fixed(l)) => l.to_string(),
            None => "off".to_string(),
        };
        let mode = match self.ba_mode {
            EstimationMode::Parametric => "parametric",
            EstimationMode::Nonparametric => "nonparametric",
        };
        let sd = match self.sd_convention {
            SdConvention::Unbiased => "unbiased",
            SdConvention::MaximumLikelihood => "ml",
        };
        vec![
            format!("talent_dist = {}", self.talent_law.label()),
            format!("start_year = {}", self.start_year),
            format!("stat = {}", self.stat.as_deref().unwrap_or("")),
            format!("top = {}", self.top),
            format!("seed = {}", self.seed),
            format!("ba_mode = {mode}"),
            format!("sd_convention = {sd}"),
            format!("smoothing = {smoothing}"),
            format!("trailing_keep = {}", self.trailing_keep),
            format!("screen_pa = {}", self.screen_pa),
            format!("career_ab_cutoff = {}", self.career_ab_cutoff),
            format!("career_ip_cutoff = {}", self.career_ip_cutoff),
            format!("chance_cutoff_year = {}", self.chance_cutoff_year),
            format!(
                "chance_end_year = {}",
                self.chance_end_year.map(|y| y.to_string()).unwrap_or_default()
            ),
            format!(
                "chance_proportion = {}",
                self.chance_proportion.map(|p| p.to_string()).unwrap_or_default()
            ),
            format!("default_rotation = {}", self.default_rotation),
        ]
    }
}
