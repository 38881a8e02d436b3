use num_rational::Ratio;

use boolnl::bounds::{expectation_upper_bound, lambda_n};
use boolnl::experiments::{
    derive_stream, exact_oracle, run_convergence, ExperimentKind, ExperimentManifest, SAMPLE_CSV_HEADER,
};
use boolnl::nonlin::nonlinearity;
use boolnl::sampling::sample_uniform;
use boolnl::SeedSpec;

/// Mean of N_r over `m` seeded samples and its standard error.
fn monte_carlo(n: u32, r: u32, m: u64) -> (f64, f64) {
    let seed = SeedSpec::new(0xACCE_5500, 0);
    let values: Vec<f64> = (0..m)
        .map(|i| {
            let f = sample_uniform(&derive_stream(&seed, i), n).unwrap();
            nonlinearity(&f, r).unwrap().value as f64
        })
        .collect();
    let mean = values.iter().sum::<f64>() / m as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    (mean, (var / m as f64).sqrt())
}

#[test]
fn monte_carlo_matches_exact_oracle() {
    for (n, r) in [(3, 1), (4, 1), (4, 2)] {
        let exact = exact_oracle(n, r).unwrap().mean_nr();
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        let (mean, se) = monte_carlo(n, r, 1 << (1 << n));
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "({n},{r}) mc {mean} exact {exact} se {se}"
        );
    }
}

#[test]
fn oracle_means_respect_expectation_bound() {
    for (n, r) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
        let d = exact_oracle(n, r).unwrap();
        assert_eq!(d.total(), 1 << (1 << n));
        assert!(d.counts.keys().all(|&v| v <= 1 << (n - 1)));
        assert!(d.mean_y_f64() < expectation_upper_bound(n, r).unwrap(), "({n},{r})");
    }
}

#[test]
fn oracle_upper_tail_decreases_in_epsilon() {
    for (n, r) in [(3, 1), (4, 1), (4, 2)] {
        let d = exact_oracle(n, r).unwrap();
        let lambda = lambda_n(n, r).unwrap();
        let tails: Vec<Ratio<u64>> = (0..=20).map(|i| d.y_tail(lambda * (1.0 + i as f64 * 0.05))).collect();
        assert!(tails.windows(2).all(|w| w[1] <= w[0]), "({n},{r}) {tails:?}");
    }
}

#[test]
fn exact_oracle_known_means() {
    // Independent counts for B_3: 16 affine, 8 * 16 at distance 1, rest at 2.
    assert_eq!(exact_oracle(3, 1).unwrap().mean_nr(), Ratio::new(11, 8));
    // B_4 has 896 bent functions, all at N_1 = 6.
    assert_eq!(exact_oracle(4, 1).unwrap().counts[&6], 896);
    // RM(3,4) is the even-weight code: odd-weight functions are at distance 1.
    let d = exact_oracle(4, 3).unwrap();
    assert_eq!(d.counts.len(), 2);
    assert_eq!(d.counts[&0], 1 << 15);
}

#[test]
fn sample_records_satisfy_identities() {
    let manifest = ExperimentManifest::new(ExperimentKind::Converge, vec![7, 9], 1, 50).with_seed(123);
    let mut csv = Vec::new();
    let summaries = run_convergence(&manifest, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(SAMPLE_CSV_HEADER));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let n: u32 = f[0].parse().unwrap();
        let value: i64 = f[3].parse().unwrap();
        let y: i64 = f[4].parse().unwrap();
        assert_eq!(y, (1 << n) - 2 * value);
        let lambda: f64 = f[5].parse().unwrap();
        assert!((lambda / lambda_n(n, 1).unwrap() - 1.0).abs() < 1e-8);
        let ratio: f64 = f[6].parse().unwrap();
        assert!((ratio - y as f64 / lambda).abs() <= 1e-8 * ratio.abs() + 1e-300);
    }
    for s in &summaries {
        assert!(s.within_expectation_bound(4.0), "{s:?}");
    }
}

#[test]
fn default_seed_streams_differ() {
    let seed = SeedSpec::default();
    let a = sample_uniform(&derive_stream(&seed, 0), 8).unwrap();
    let b = sample_uniform(&derive_stream(&seed, 1), 8).unwrap();
    assert_ne!(a.words(), b.words());
    assert_eq!(a, sample_uniform(&derive_stream(&seed, 0), 8).unwrap());
}
