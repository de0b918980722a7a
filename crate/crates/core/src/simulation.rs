//! Monte Carlo validation on synthetic leagues.
//!
//! Each iteration draws the top `n` latent talents of five leagues of
//! different sizes, turns them into batting averages, and counts how many of
//! the 25 best talents overall each ranking method recovers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{ContinuousLaw, OrderStatLaw, SdConvention, TalentLaw};
use crate::error::{Error, Result, ValidationCode};
use crate::special::{beta_quantile, normal_quantile, Prob};
use crate::transform::{EstimationMode, SeasonContext};

/// One synthetic league.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeagueSpec {
    pub population: u64,
    pub mu: f64,
    pub sigma: f64,
    /// Underestimate that improves over time.
    pub improved: u64,
    /// Underestimate that deteriorates over time.
    pub deteriorated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub leagues: Vec<LeagueSpec>,
    /// Players per league.
    pub n: usize,
    pub iterations: usize,
    pub seed: u64,
    pub top: usize,
    pub generating_laws: Vec<TalentLaw>,
    pub assumed_law: TalentLaw,
    #[serde(skip)]
    pub sd_convention: SdConvention,
}

impl Default for SimConfig {
    fn default() -> Self {
        let league = |population: u64, mu, sigma, improved, deteriorated| LeagueSpec {
            population,
            mu,
            sigma,
            improved,
            deteriorated,
        };
        SimConfig {
            leagues: vec![
                league(1_000_000, 0.280, 0.040, 500_000, 1_000_000),
                league(2_000_000, 0.275, 0.0375, 1_500_000, 1_000_000),
                league(4_000_000, 0.270, 0.035, 3_330_000, 1_330_000),
                league(8_000_000, 0.265, 0.0325, 7_000_000, 2_000_000),
                league(16_000_000, 0.260, 0.030, 14_400_000, 3_200_000),
            ],
            n: 300,
            iterations: 200,
            seed: 20_230_501,
            top: 25,
            generating_laws: vec![
                TalentLaw::Pareto { alpha: 1.16 },
                TalentLaw::Pareto { alpha: 3.0 },
                TalentLaw::Normal { location: 0.0, scale: 1.0 },
                TalentLaw::FoldedNormal { location: 0.0, scale: 1.0 },
            ],
            assumed_law: TalentLaw::Pareto { alpha: 1.16 },
            sd_convention: SdConvention::Unbiased,
        }
    }
}

fn sim_config_error(key: &str, msg: impl Into<String>) -> Error {
    Error::validation(ValidationCode::Config, format!("simulate key '{key}'"), msg)
}

impl SimConfig {
    /// Applies `key = value` lines.
    ///
    /// Keys: `iterations`, `seed`, `n`, `top`, `assumed_law`,
    /// `generating_laws` (comma separated), and `leagueK =
    /// population,mu,sigma,improved,deteriorated` for `K = 1..`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| sim_config_error(line, "expected key = value"))?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.trim().parse::<f64>().map_err(|_| sim_config_error(key, format!("cannot parse '{v}'")))
        };
        match key {
            "iterations" => self.iterations = num(value)? as usize,
            "seed" => {
                self.seed = value.parse().map_err(|_| sim_config_error(key, "not an integer"))?
            }
            "n" => self.n = num(value)? as usize,
            "top" => self.top = num(value)? as usize,
            "assumed_law" => {
                self.assumed_law =
                    TalentLaw::parse(value).map_err(|e| sim_config_error(key, e.to_string()))?
            }
            "generating_laws" => {
                self.generating_laws = value
                    .split(',')
                    .map(|s| TalentLaw::parse(s).map_err(|e| sim_config_error(key, e.to_string())))
                    .collect::<Result<_>>()?
            }
            k if k.starts_with("league") => {
                let idx: usize = k[6..]
                    .parse()
                    .map_err(|_| sim_config_error(key, "expected leagueK"))?;
                let f: Vec<f64> = value.split(',').map(num).collect::<Result<_>>()?;
                if f.len() != 5 || idx == 0 {
                    return Err(sim_config_error(key, "expected population,mu,sigma,improved,deteriorated"));
                }
                let spec = LeagueSpec {
                    population: f[0] as u64,
                    mu: f[1],
                    sigma: f[2],
                    improved: f[3] as u64,
                    deteriorated: f[4] as u64,
                };
                if idx <= self.leagues.len() {
                    self.leagues[idx - 1] = spec;
                } else if idx == self.leagues.len() + 1 {
                    self.leagues.push(spec);
                } else {
                    return Err(sim_config_error(key, "leagues must be numbered consecutively"));
                }
            }
            _ => return Err(sim_config_error(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.leagues.is_empty() || self.n < 3 || self.iterations == 0 || self.generating_laws.is_empty() {
            return Err(sim_config_error("config", "needs leagues, n >= 3, iterations >= 1, and laws"));
        }
        if self.top == 0 || self.top > self.n * self.leagues.len() {
            return Err(sim_config_error("top", "must lie in 1..=n * leagues"));
        }
        for l in &self.leagues {
            let smallest = l.population.min(l.improved).min(l.deteriorated);
            if (smallest as usize) < self.n || !(l.sigma > 0.0) {
                return Err(sim_config_error("league", "populations must be >= n and sigma > 0"));
            }
        }
        Ok(())
    }
}

/// Top `n` of `N` iid draws from `law`, largest first, without drawing all `N`.
///
/// The maximum of `N` uniforms is `V^(1/N)` and, given the `i` largest, the
/// rest are iid uniform below the `i`-th, so logs of successive ratios are
/// independent `ln(V_i) / (N - i + 1)`. Working in logs keeps `1 - U` exact.
pub fn sample_top_talents<R: Rng + ?Sized>(law: &TalentLaw, population: u64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if (population as usize) < n || n == 0 {
        return Err(Error::domain(format!("need 1 <= n <= N, got n={n}, N={population}")));
    }
    let mut ln_u = 0.0f64;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v: f64 = 1.0 - rng.random::<f64>();
        ln_u += v.ln() / (population - i as u64) as f64;
        let p = Prob::new(ln_u.exp(), -ln_u.exp_m1());
        let mut x = law.quantile(p);
        if let Some(&prev) = out.last() {
            if x >= prev {
                x = f64::next_down(prev);
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// Season values for talents sorted largest first, returned in the same order.
///
/// The `j`-th smallest talent of the top `n` goes through the CDF of order
/// statistic `N - n + j`, the `j`-th uniform order-statistic quantile, and
/// the `Normal(mu, sigma)` quantile.
pub fn generate_observations(
    talents_desc: &[f64],
    law: &TalentLaw,
    mu: f64,
    sigma: f64,
    population: u64,
) -> Result<Vec<f64>> {
    let n = talents_desc.len();
    let mut out = vec![0.0; n];
    for (k, &x) in talents_desc.iter().enumerate() {
        let j = n - k;
        let os = OrderStatLaw::new(population - n as u64 + j as u64, population, *law)?;
        let p = os.cdf(x)?;
        let u = beta_quantile(j as f64, (n + 1 - j) as f64, p)?;
        out[k] = mu + sigma * normal_quantile(u);
    }
    Ok(out)
}

/// Ranking methods compared in each iteration.
pub const METHODS: [&str; 5] = [
    "full_house_correct",
    "full_house_improved",
    "full_house_deteriorated",
    "z_score",
    "raw",
];

/// Counts of true top talents recovered in one iteration under one law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub law: String,
    pub iteration: usize,
    pub full_house_correct: u32,
    pub full_house_improved: u32,
    pub full_house_deteriorated: u32,
    pub z_score: u32,
    pub raw: u32,
    /// Members of the first two leagues in the correct-population top list.
    pub full_house_early: u32,
    /// Members of the first two leagues in the raw top list.
    pub raw_early: u32,
}

impl IterationRecord {
    pub fn counts(&self) -> [u32; 5] {
        [
            self.full_house_correct,
            self.full_house_improved,
            self.full_house_deteriorated,
            self.z_score,
            self.raw,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawSummary {
    pub law: String,
    pub iterations: usize,
    /// Share of iterations where the deteriorated-population model beats Z-scores.
    pub strictly_beats: f64,
    pub beats_or_ties: f64,
    /// Median recovered count per method, in [`METHODS`] order.
    pub medians: Vec<f64>,
    pub means: Vec<f64>,
    pub mean_full_house_early: f64,
    pub mean_raw_early: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub records: Vec<IterationRecord>,
    pub summaries: Vec<LawSummary>,
}

fn top_indices(scores: &[f64], top: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(top);
    idx
}

fn overlap(a: &[usize], truth: &[bool]) -> u32 {
    a.iter().filter(|&&i| truth[i]).count() as u32
}

/// Runs one iteration for one generating law.
pub fn run_iteration(config: &SimConfig, law: &TalentLaw, rng: &mut ChaCha20Rng) -> Result<IterationRecord> {
    let n = config.n;
    let mut truth_scores = Vec::with_capacity(n * config.leagues.len());
    let mut league_of = Vec::with_capacity(truth_scores.capacity());
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(config.leagues.len());
    for (li, league) in config.leagues.iter().enumerate() {
        let talents = sample_top_talents(law, league.population, n, rng)?;
        let y = generate_observations(&talents, law, league.mu, league.sigma, league.population)?;
        truth_scores.extend_from_slice(&talents);
        league_of.extend(std::iter::repeat_n(li, n));
        values.push(y);
    }
    let total = truth_scores.len();
    let mut truth = vec![false; total];
    for i in top_indices(&truth_scores, config.top) {
        truth[i] = true;
    }
    let full_house = |pick: fn(&LeagueSpec) -> u64| -> Result<Vec<f64>> {
        let mut scores = Vec::with_capacity(total);
        for (li, league) in config.leagues.iter().enumerate() {
            let ctx = SeasonContext::build(
                li as i32,
                pick(league),
                &values[li],
                EstimationMode::Parametric,
                config.sd_convention,
                config.assumed_law,
            )?;
            scores.extend(ctx.assignment.by_input());
        }
        Ok(scores)
    };
    let fh_correct = top_indices(&full_house(|l| l.population)?, config.top);
    let fh_improved = top_indices(&full_house(|l| l.improved)?, config.top);
    let fh_deteriorated = top_indices(&full_house(|l| l.deteriorated)?, config.top);
    let mut z = Vec::with_capacity(total);
    let mut raw = Vec::with_capacity(total);
    for y in &values {
        let fit = crate::distributions::fit_season_normal(y, config.sd_convention)?;
        z.extend(y.iter().map(|v| (v - fit.mean) / fit.sd));
        raw.extend_from_slice(y);
    }
    let z_top = top_indices(&z, config.top);
    let raw_top = top_indices(&raw, config.top);
    let early = |top: &[usize]| top.iter().filter(|&&i| league_of[i] < 2).count() as u32;
    Ok(IterationRecord {
        law: law.label(),
        iteration: 0,
        full_house_correct: overlap(&fh_correct, &truth),
        full_house_improved: overlap(&fh_improved, &truth),
        full_house_deteriorated: overlap(&fh_deteriorated, &truth),
        z_score: overlap(&z_top, &truth),
        raw: overlap(&raw_top, &truth),
        full_house_early: early(&fh_correct),
        raw_early: early(&raw_top),
    })
}

/// Stream of iteration `it` under law `law_index`; independent of scheduling.
pub fn iteration_rng(seed: u64, law_index: usize, it: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((law_index as u64) << 32) | it as u64);
    rng
}

fn median_of(v: &mut [u32]) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2]) as f64
    }
}

pub fn summarize(law: &str, records: &[&IterationRecord]) -> LawSummary {
    let m = records.len() as f64;
    let mut medians = Vec::new();
    let mut means = Vec::new();
    for k in 0..METHODS.len() {
        let mut c: Vec<u32> = records.iter().map(|r| r.counts()[k]).collect();
        means.push(c.iter().map(|&x| x as f64).sum::<f64>() / m);
        medians.push(median_of(&mut c));
    }
    LawSummary {
        law: law.to_string(),
        iterations: records.len(),
        strictly_beats: records.iter().filter(|r| r.full_house_deteriorated > r.z_score).count() as f64 / m,
        beats_or_ties: records.iter().filter(|r| r.full_house_deteriorated >= r.z_score).count() as f64 / m,
        medians,
        means,
        mean_full_house_early: records.iter().map(|r| r.full_house_early as f64).sum::<f64>() / m,
        mean_raw_early: records.iter().map(|r| r.raw_early as f64).sum::<f64>() / m,
    }
}

/// Runs every iteration for every generating law in parallel.
pub fn run_simulation(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.generating_laws.len())
        .flat_map(|l| (0..config.iterations).map(move |i| (l, i)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(l, it)| {
            let mut rng = iteration_rng(config.seed, l, it);
            let mut r = run_iteration(config, &config.generating_laws[l], &mut rng)?;
            r.iteration = it + 1;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = config
        .generating_laws
        .iter()
        .enumerate()
        .map(|(l, law)| {
            let mine: Vec<&IterationRecord> = records[l * config.iterations..(l + 1) * config.iterations].iter().collect();
            summarize(&law.label(), &mine)
        })
        .collect();
    Ok(SimResult {
        config: config.clone(),
        records,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_league_table() {
        let c = SimConfig::default();
        assert_eq!(c.leagues.len(), 5);
        assert_eq!(c.leagues[4].mu, 0.260);
        assert_eq!(c.leagues[4].sigma, 0.030);
        assert_eq!(c.leagues[2].improved, 3_330_000);
        assert_eq!(c.leagues[4].deteriorated, 3_200_000);
        for w in c.leagues.windows(2) {
            assert!(w[1].sigma < w[0].sigma);
        }
        for l in &c.leagues {
            assert!(l.improved <= l.population && l.deteriorated <= l.population);
        }
        c.validate().unwrap();
    }

    #[test]
    fn sampler_is_strictly_decreasing() {
        let mut rng = iteration_rng(7, 0, 0);
        let t = sample_top_talents(&TalentLaw::Pareto { alpha: 1.16 }, 16_000_000, 300, &mut rng).unwrap();
        assert!(t.windows(2).all(|w| w[0] > w[1]));
        assert!(t[299] > 1.0);
    }

    #[test]
    fn single_draw_is_the_parent_law() {
        let mut rng = iteration_rng(3, 0, 0);
        let law = TalentLaw::Normal { location: 0.0, scale: 1.0 };
        let draws: Vec<f64> = (0..4000)
            .map(|_| sample_top_talents(&law, 1, 1, &mut rng).unwrap()[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / 4000.0;
        assert!(mean.abs() < 0.06, "{mean}");
    }

    #[test]
    fn config_text() {
        let mut c = SimConfig::default();
        c.apply_text("iterations = 3\nleague6 = 1000000,0.25,0.03,900000,800000\ngenerating_laws = pareto:1.16,normal\n")
            .unwrap();
        assert_eq!(c.iterations, 3);
        assert_eq!(c.leagues.len(), 6);
        assert_eq!(c.generating_laws.len(), 2);
        assert!(c.clone().apply_text("bogus = 1").is_err());
    }
}
