mod common;

use common::four_laws;
use fullhouse_core::distributions::{ContinuousLaw, TalentLaw};
use fullhouse_core::simulation::{generate_observations, iteration_rng, run_simulation, sample_top_talents, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Kolmogorov distance of `u` from Uniform(0, 1).
fn ks_uniform(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let m = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / m).abs().max(((i + 1) as f64 / m - v).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn sampled_top_two_follow_their_order_statistic_laws() {
    let law = TalentLaw::Pareto { alpha: 1.16 };
    let big_n = 100u64;
    let runs = 100_000;
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    let mut first = Vec::with_capacity(runs);
    let mut second = Vec::with_capacity(runs);
    for _ in 0..runs {
        let top = sample_top_talents(&law, big_n, 2, &mut rng).unwrap();
        let (f1, f2) = (law.cdf(top[0]).p, law.cdf(top[1]).p);
        first.push(f1.powi(big_n as i32));
        // P(second largest <= x) = F^N + N F^(N-1) (1 - F)
        second.push(f2.powi(big_n as i32) + big_n as f64 * f2.powi(big_n as i32 - 1) * (1.0 - f2));
    }
    // 1% critical value of the one-sample Kolmogorov statistic
    let critical = 1.63 / (runs as f64).sqrt();
    let (d1, d2) = (ks_uniform(first), ks_uniform(second));
    assert!(d1 < critical, "maximum: D = {d1}");
    assert!(d2 < critical, "second: D = {d2}");
}

#[test]
fn observations_follow_talent_order() {
    for law in four_laws() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for population in [100_000u64, 16_000_000] {
            let talents = sample_top_talents(&law, population, 300, &mut rng).unwrap();
            let y = generate_observations(&talents, &law, 0.27, 0.03, population).unwrap();
            assert!(y.windows(2).all(|w| w[0] > w[1]), "{law:?} N={population}");
        }
    }
}

fn small_config() -> SimConfig {
    let mut c = SimConfig::default();
    c.apply_text("iterations = 3\nn = 60\ntop = 10\n").unwrap();
    c
}

#[test]
fn runs_are_reproducible() {
    let c = small_config();
    let a = run_simulation(&c).unwrap();
    let b = run_simulation(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.records.len(), 3 * c.generating_laws.len());
    let mut other = c.clone();
    other.seed += 1;
    assert_ne!(run_simulation(&other).unwrap().records, a.records);
}

#[test]
fn iteration_streams_are_distinct() {
    use rand::Rng;
    let draw = |l, i| iteration_rng(1, l, i).random::<u64>();
    assert_ne!(draw(0, 0), draw(0, 1));
    assert_ne!(draw(0, 0), draw(1, 0));
    assert_eq!(draw(2, 5), draw(2, 5));
}

#[test]
fn recovered_counts_are_bounded_by_top() {
    let c = small_config();
    for r in run_simulation(&c).unwrap().records {
        assert!(r.counts().iter().all(|&k| k as usize <= c.top));
        assert!(r.full_house_early as usize <= c.top && r.raw_early as usize <= c.top);
    }
}
