use vanet_core::connectivity::{mc_gap_frequency, sample_consecutive_gaps};
use vanet_core::rng::derive_seed;
use vanet_core::{place_vehicles, vehicle_connection_probability, Street};

/// Kolmogorov-Smirnov distance between `sample` and Exponential(`rate`).
fn ks_exponential(sample: &mut [f64], rate: f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = -(-rate * x).exp_m1();
            (cdf - i as f64 / n).max((i + 1) as f64 / n - cdf)
        })
        .fold(0.0, f64::max)
}

#[test]
fn vehicle_count_mean_matches_density() {
    let street = Street::new("s", 1000.0).unwrap();
    let seeds = 10_000;
    let total: usize = (0..seeds)
        .map(|i| {
            place_vehicles(&street, 0.1, 10.0, derive_seed(7, "count", i))
                .unwrap()
                .len()
        })
        .sum();
    let mean = total as f64 / seeds as f64;
    // Poisson(100): standard error of the mean is sqrt(100 / 10^4) = 0.1
    assert!((mean - 100.0).abs() < 0.3, "mean count {mean}");
}

#[test]
fn gaps_follow_exponential_law() {
    let street = Street::new("s", 10_000.0).unwrap();
    let mut gaps = sample_consecutive_gaps(&street, 0.1, 100_000, 11).unwrap();
    let d = ks_exponential(&mut gaps, 0.1);
    assert!(d < 0.01, "KS distance {d}");
}

#[test]
fn per_gap_frequency_matches_vehicle_probability() {
    let street = Street::new("s", 10_000.0).unwrap();
    let est = mc_gap_frequency(&street, 0.1, 10.0, 100_000, 5).unwrap();
    let p = vehicle_connection_probability(0.1, 10.0).unwrap();
    assert!((est.estimate - p).abs() < 0.01, "{} vs {p}", est.estimate);
}

#[test]
fn positions_stay_on_the_street_and_sorted() {
    let street = Street::new("s", 750.0).unwrap();
    for i in 0..200 {
        let vs = place_vehicles(&street, 0.2, 30.0, i).unwrap();
        vs.check_invariants().unwrap();
        assert!(vs
            .vehicles
            .iter()
            .all(|v| (0.0..=750.0).contains(&v.position)));
    }
}
