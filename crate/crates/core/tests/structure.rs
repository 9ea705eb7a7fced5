use rand::seq::index::sample;
use rand::Rng as _;

use smoothed_nash::matrix::Matrix;
use smoothed_nash::seed::rng_from_seed;
use smoothed_nash::structure::*;

fn random_distribution(rng: &mut smoothed_nash::seed::Rng, n: usize, k: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for j in sample(rng, n, k) {
        x[j] = rng.random_range(0.01..1.0);
    }
    let s: f64 = x.iter().sum();
    x.iter().map(|v| v / s).collect()
}

#[test]
fn exact_and_monte_carlo_anticoncentration_agree() {
    let mut rng = rng_from_seed(12);
    let params = PartitionParams::desk_default(12);
    let mut misses = Vec::new();
    for t in 0..20 {
        let k = rng.random_range(1..=12);
        let x = random_distribution(&mut rng, 12, k);
        let exact = anti_concentration_estimate(&x, &params, 0.3, 0, 0, EstimateMode::Exact).unwrap();
        let mc = anti_concentration_estimate(&x, &params, 0.3, 100_000, t, EstimateMode::MonteCarlo).unwrap();
        assert_eq!(exact.threshold, mc.threshold);
        if !mc.proportion.contains(exact.probability) {
            misses.push((t, exact.probability, mc.proportion));
        }
    }
    // Each interval has 95% coverage, so a few misses among 20 are expected;
    // more than 3 happens with probability under 2%.
    assert!(misses.len() <= 3, "{misses:?}");
}

#[test]
fn sparse_distributions_clear_half_their_mass() {
    // With every level sparse and at most 2L nonzeros, the all-plus pattern
    // on the heavier half already reaches ½‖x‖₁.
    let mut rng = rng_from_seed(21);
    for l in 1..=3usize {
        for _ in 0..30 {
            let k = rng.random_range(1..=2 * l);
            let x = random_distribution(&mut rng, 40, k);
            let p = exact_sign_tail(&x, 0.5).unwrap().estimate.unwrap();
            assert!(p >= 2f64.powi(-(2 * l as i32 + 1)));
        }
    }
}

#[test]
fn erdos_dominance_on_random_instances() {
    let mut rng = rng_from_seed(3);
    for _ in 0..1000 {
        let n = rng.random_range(1..=14usize);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
        let k = rng.random_range(1..=n as i64 + 2);
        let r = erdos_dominance_check(&a, k).unwrap();
        assert!(r.holds, "{a:?} k={k}: {r:?}");
    }
}

#[test]
fn binomial_tail_below_thirty_is_reported() {
    let r = binom_tail_sweep(1, 29);
    // Whatever happens at small n is reported with both sides.
    for c in &r.failures {
        assert!(c.n < 30 && c.ln_lhs < c.ln_rhs);
    }
    assert_eq!(r.evaluated, (1..=29u64).map(|n| n / 2 + 1).sum::<u64>() as usize);
}

#[test]
fn halfspace_uniform_cloud_concentrates_less_with_more_points() {
    let median_at = |n: usize| {
        let fr: Vec<f64> = (0..50)
            .map(|s| {
                let mut rng = rng_from_seed(1000 + s);
                let rows = Matrix::from_fn(n, 8, |_, _| rng.random_range(-1.0..=1.0));
                halfspace_interval_density(&rows, 20, 0.05, s, Some(0.5)).unwrap().max_fraction
            })
            .collect();
        median(&fr).unwrap()
    };
    let small = median_at(512);
    let large = median_at(4096);
    assert!(large <= small, "{small} -> {large}");
    // Observed slack over √2·K·len stays within a few √(d/n).
    let predicted = std::f64::consts::SQRT_2 * 0.5 * 0.05;
    assert!(large - predicted <= 4.0 * (8.0f64 / 4096.0).sqrt(), "{large}");
}

#[test]
fn beta_bounds_for_random_distributions() {
    let mut rng = rng_from_seed(4);
    for _ in 0..500 {
        let n = rng.random_range(2..300);
        let k = rng.random_range(1..=n);
        let x = random_distribution(&mut rng, n, k);
        let p = PartitionParams::desk_default(n);
        let b = benchmark_beta(&x, &p).unwrap();
        let sl = (n as f64).ln().sqrt();
        assert!(b <= sl + 1.0 + 1e-12);
        assert!(b >= 0.5 * 1f64.min(sl / (n as f64).sqrt()));
    }
}
