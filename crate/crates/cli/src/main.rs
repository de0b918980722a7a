//! `fullhouse`: era-adjusted baseball statistics from the command line.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure.

mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fullhouse_core::config::RunConfig;

use crate::data::Source;

#[derive(Debug, Parser)]
#[command(name = "fullhouse", version, about = "Era-adjusted baseball statistics via talent order statistics")]
pub struct Cli {
    /// `key = value` settings file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Talent law: pareto[:alpha], normal[:mu:sigma], folded-normal[:mu:sigma].
    #[arg(long, global = true)]
    talent_dist: Option<String>,
    #[arg(long, global = true)]
    start_year: Option<i32>,
    #[arg(long, global = true)]
    stat: Option<String>,
    #[arg(long, global = true)]
    top: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Directory holding population.csv, batting.csv, pitching.csv and the optional
    /// park_factors.csv, gamelogs.csv or rotations.csv.
    #[arg(long, required_unless_present = "synthetic")]
    data_dir: Option<PathBuf>,
    /// Use the seeded synthetic league instead of files.
    #[arg(long, conflicts_with = "data_dir")]
    synthetic: bool,
}

impl DataArgs {
    fn source(&self) -> Source {
        match &self.data_dir {
            Some(d) => Source::Dir(d.clone()),
            None => Source::Synthetic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Batting,
    Pitching,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Laws,
    StartYears,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate every input file and summarize it.
    Ingest(DataArgs),
    /// Adjust every player season into the common career trajectory.
    Adjust {
        side: Side,
        #[command(flatten)]
        data: DataArgs,
        /// Also write career aggregates to this file.
        #[arg(long)]
        careers: Option<PathBuf>,
    },
    /// Leaderboard of adjusted careers with chance footers.
    Rank {
        side: Side,
        #[command(flatten)]
        data: DataArgs,
        /// Rank best single adjusted seasons instead of careers.
        #[arg(long)]
        peak: bool,
    },
    /// Odds of at least `early` of the top `top` coming from a share `p` of the population.
    Chance {
        #[arg(long)]
        early: u64,
        /// Population share; defaults to the proportion before the cutoff year.
        #[arg(long)]
        proportion: Option<f64>,
        /// Population series to derive the default share from.
        #[arg(long)]
        population: Option<PathBuf>,
    },
    /// Equivalent WAR of a reference-year replacement player in every season.
    ReplacementCurve {
        side: Side,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 2020)]
        reference_year: i32,
    },
    /// Monte Carlo comparison against Z-scores; `--config` takes simulation keys here.
    Simulate {
        #[arg(long)]
        iterations: Option<usize>,
        /// Also write the per-law summary as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Stability of the batting bWAR leaderboard under model choices.
    Sensitivity {
        sweep: Sweep,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 1946)]
        from: i32,
        #[arg(long, default_value_t = 1995)]
        to: i32,
    },
}

impl Cli {
    /// Defaults, then the config file, then flags.
    fn run_config(&self) -> fullhouse_core::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        if let Some(v) = &self.talent_dist {
            c.set("talent_dist", v)?;
        }
        if let Some(v) = self.start_year {
            c.start_year = v;
        }
        if let Some(v) = &self.stat {
            c.set("stat", v)?;
        }
        if let Some(v) = self.top {
            c.set("top", &v.to_string())?;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        Ok(c)
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let out = commands::Output::new(cli.output.clone());
    if let Command::Simulate { iterations, json } = &cli.command {
        return commands::simulate(cli, *iterations, json.as_deref(), &out);
    }
    let config = cli.run_config()?;
    match &cli.command {
        Command::Ingest(data) => commands::ingest(data.source(), &config, &out),
        Command::Adjust { side, data, careers } => commands::adjust(*side, data.source(), &config, careers.as_deref(), &out),
        Command::Rank { side, data, peak } => commands::rank(*side, data.source(), &config, *peak, &out),
        Command::Chance {
            early,
            proportion,
            population,
        } => commands::chance(*early, *proportion, population.as_deref(), &config, &out),
        Command::ReplacementCurve {
            side,
            data,
            reference_year,
        } => commands::replacement(*side, data.source(), &config, *reference_year, &out),
        Command::Sensitivity { sweep, data, from, to } => {
            commands::sensitivity(*sweep, data.source(), &config, *from..=*to, &out)
        }
        Command::Simulate { .. } => unreachable!(),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<fullhouse_core::Error>() {
        Some(e) if !e.is_validation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn numerical_failures_exit_with_three() {
        let num = fullhouse_core::Error::Numerical {
            routine: "beta_quantile",
            detail: "no convergence".into(),
        };
        assert_eq!(exit_code(&num.into()), 3);
        assert_eq!(exit_code(&fullhouse_core::Error::Range("year".into()).into()), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 2);
    }
}
