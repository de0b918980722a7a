mod common;

use common::{distinct_sorted, ecdf, probe_points};
use fullhouse_core::tail_ecdf::InterpolatedCdf;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ContinuousCDF, Normal as OracleNormal};

fn sup_distance_to_ecdf(cdf: &InterpolatedCdf, sorted: &[f64]) -> f64 {
    probe_points(sorted)
        .into_iter()
        .map(|t| (cdf.eval(t) - ecdf(sorted, t)).abs())
        .fold(0.0, f64::max)
}

fn sample_set() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-1e3f64..1e3, 3..200),
        prop::collection::vec(0.0f64..1.0, 3..500),
        prop::collection::vec((1e-3f64..1.0).prop_map(|u| u.powf(-1.0 / 1.16)), 3..300),
    ]
    .prop_map(|v| distinct_sorted(&v))
    .prop_filter("need three distinct values", |v| v.len() >= 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interpolated_cdf_stays_within_one_step_of_the_ecdf(
        sorted in sample_set(),
        ends in prop::option::of((1e-3f64..50.0, 1e-3f64..50.0)),
    ) {
        let (ys, yss) = ends.map_or((None, None), |(a, b)| (Some(a), Some(b)));
        let cdf = InterpolatedCdf::build(&sorted, ys, yss).unwrap();
        let bound = 1.0 / sorted.len() as f64 + 1e-12;
        let d = sup_distance_to_ecdf(&cdf, &sorted);
        prop_assert!(d <= bound, "sup distance {d} > {bound}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interpolated_cdf_is_monotone_and_bounded(sorted in sample_set()) {
        let cdf = InterpolatedCdf::build(&sorted, None, None).unwrap();
        let pts = {
            let mut p = probe_points(&sorted);
            p.sort_by(f64::total_cmp);
            p
        };
        let mut last = 0.0;
        for t in pts {
            let v = cdf.eval(t);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn inverse_undoes_eval_inside_the_support(sorted in sample_set(), u in 0.001f64..0.999) {
        let cdf = InterpolatedCdf::build(&sorted, None, None).unwrap();
        let y = cdf.inverse(u).unwrap();
        let back = cdf.eval(y);
        prop_assert!((back - u).abs() < 1e-9, "u {u} -> y {y} -> {back}");
    }
}

fn normal_sup_distance(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let draw = Normal::new(0.0, 1.0).unwrap();
    let samples: Vec<f64> = (0..n).map(|_| draw.sample(&mut rng)).collect();
    let sorted = distinct_sorted(&samples);
    let cdf = InterpolatedCdf::build(&sorted, None, None).unwrap();
    let truth = OracleNormal::new(0.0, 1.0).unwrap();
    probe_points(&sorted)
        .into_iter()
        .map(|t| (cdf.eval(t) - truth.cdf(t)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn sup_distance_to_the_true_cdf_shrinks_with_n() {
    let median = |n: usize| {
        let mut d: Vec<f64> = (0..21).map(|s| normal_sup_distance(n, 100 + s)).collect();
        d.sort_by(f64::total_cmp);
        d[10]
    };
    let (a, b, c) = (median(100), median(1000), median(10_000));
    assert!(a > b && b > c, "medians {a} {b} {c}");
    assert!(c < 0.02);
}
