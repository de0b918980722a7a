use std::collections::{BTreeMap, HashMap};

use fullhouse_core::batting::{aggregate_batting, BattingModel, BattingStat};
use fullhouse_core::config::RunConfig;
use fullhouse_core::distributions::{SdConvention, TalentLaw};
use fullhouse_core::engine::StatContexts;
use fullhouse_core::population::PopulationSeries;
use fullhouse_core::report::{law_sweep, replacement_curve, start_year_sweep};
use fullhouse_core::synth::{synth_batting, SynthConfig};
use fullhouse_core::transform::{EstimationMode, SeasonContext};

#[test]
fn replacement_curve_falls_as_the_population_grows() {
    let values: Vec<f64> = (0..60).map(|i| -0.012 + 0.001 * i as f64 + 1e-5 * (i * i) as f64).collect();
    let law = TalentLaw::Pareto { alpha: TalentLaw::pareto_80_20_alpha() };
    let contexts: BTreeMap<i32, SeasonContext> = (0..12)
        .map(|k| {
            let year = 1900 + 10 * k;
            let population = 500_000 * (k as u64 + 1);
            let ctx = SeasonContext::build(year, population, &values, EstimationMode::Nonparametric, SdConvention::Unbiased, law).unwrap();
            (year, ctx)
        })
        .collect();
    let stat = StatContexts { contexts, own_rank: HashMap::new() };
    let games: BTreeMap<i32, f64> = stat.contexts.keys().map(|&y| (y, 150.0)).collect();
    let curve = replacement_curve(&stat, &games, 2010).unwrap();
    assert_eq!(curve.len(), 12);
    assert!(curve.last().unwrap().rate.abs() < 1e-9);
    for w in curve.windows(2) {
        assert!(w[0].rate > w[1].rate, "{:?} then {:?}", w[0], w[1]);
        assert!((w[0].war - 150.0 * w[0].rate).abs() < 1e-12);
    }
    assert!(replacement_curve(&stat, &games, 2011).is_err());
}

fn synthetic_model(stats: &[BattingStat]) -> BattingModel {
    let rows = synth_batting(&SynthConfig::default());
    BattingModel::build_with(aggregate_batting(&rows, &[]), &PopulationSeries::historical(), &RunConfig::default(), stats).unwrap()
}

#[test]
fn synthetic_replacement_level_rises_into_the_past() {
    let m = synthetic_model(&[BattingStat::BwarRate]);
    let curve = replacement_curve(&m.stats[&BattingStat::BwarRate], &m.median_games, 2020).unwrap();
    let at = |y| curve.iter().find(|p| p.year == y).unwrap();
    assert!(at(2020).war.abs() < 1e-6);
    for y in [1910, 1920, 1930, 1940] {
        assert!(at(y).war > 1.0, "{:?}", at(y));
    }
}

#[test]
fn single_start_year_band_is_the_default_rank() {
    let m = synthetic_model(&[BattingStat::BwarRate]);
    let config = RunConfig::default();
    let bands = start_year_sweep(&m, &config, config.start_year..=config.start_year, 10).unwrap();
    assert_eq!(bands.len(), 10);
    for b in bands {
        assert_eq!((b.lower, b.median, b.upper), (b.default_rank as f64, b.default_rank as f64, b.default_rank as f64));
        assert!(b.inside);
    }
}

#[test]
fn law_sweep_compares_against_the_first_law() {
    let rows = synth_batting(&SynthConfig {
        first_year: 1950,
        last_year: 1990,
        ..SynthConfig::default()
    });
    let seasons = aggregate_batting(&rows, &[]);
    let laws = [TalentLaw::Pareto { alpha: 1.16 }, TalentLaw::Normal { location: 0.0, scale: 1.0 }];
    let (cmp, orders) = law_sweep(&seasons, &PopulationSeries::historical(), &RunConfig::default(), &laws, &[10, 25]).unwrap();
    assert_eq!(cmp.len(), 4);
    assert_eq!(orders.len(), 2);
    assert_eq!((cmp[0].matched_names, cmp[0].matched_ranks), (10, 10));
    assert_eq!((cmp[1].matched_names, cmp[1].matched_ranks), (25, 25));
    assert!(cmp.iter().all(|c| c.matched_ranks <= c.matched_names && c.matched_names <= c.top));
}
