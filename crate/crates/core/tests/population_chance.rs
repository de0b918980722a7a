use fullhouse_core::population::{chance_top_k, PopulationSeries, HISTORICAL_MILLIONS};
use fullhouse_core::report::format_odds;
use proptest::prelude::*;

/// `P(at least x of k)` by summing over every subset of the `k` slots.
fn enumerate_tail(x: u32, k: u32, p: f64) -> f64 {
    (0u32..1 << k)
        .filter(|mask| mask.count_ones() >= x)
        .map(|mask| {
            let c = mask.count_ones() as i32;
            p.powi(c) * (1.0 - p).powi(k as i32 - c)
        })
        .sum()
}

proptest! {
    #[test]
    fn chance_matches_subset_enumeration(k in 1u32..=12, x in 0u32..=12, p in 0.01f64..0.99) {
        prop_assume!(x <= k);
        let expected = 1.0 / enumerate_tail(x, k, p);
        let got = chance_top_k(x as u64, k as u64, p).unwrap();
        prop_assert!((got - expected).abs() <= 1e-11 * expected, "{got} vs {expected}");
    }

    #[test]
    fn more_early_players_are_less_likely(k in 2u64..60, p in 0.05f64..0.5) {
        let mut last = 0.0;
        for x in 0..=k {
            let z = chance_top_k(x, k, p).unwrap();
            prop_assert!(z >= last);
            last = z;
        }
    }
}

#[test]
fn decade_values_are_returned_exactly() {
    let s = PopulationSeries::historical();
    for (year, millions) in HISTORICAL_MILLIONS {
        assert_eq!(s.population_at(year as f64).unwrap(), millions * 1e6);
    }
}

#[test]
fn footer_odds_strings() {
    for (x, k, want) in [(6, 10, "1 in 205"), (15, 25, "1 in 142048"), (4, 25, "1 in 1.38")] {
        assert_eq!(format_odds(chance_top_k(x, k, 0.19).unwrap()), want);
    }
}
