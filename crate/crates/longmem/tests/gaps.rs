//! Gap injection and imputation: mask determinism, nesting, and marginal
//! frequency; imputer examples and invariants; truncated normal sampling
//! against its analytic distribution.

use longmem::arfima::{simulate_gaussian, ArfimaModel};
use longmem::gaps::*;
use longmem::rng::rng_from_seed;
use longmem::stats::{integrate, normal_cdf};

fn missing_set(series: &GappySeries) -> Vec<usize> {
    series
        .observed()
        .iter()
        .enumerate()
        .filter(|(_, &o)| !o)
        .map(|(i, _)| i)
        .collect()
}

#[test]
fn gappy_series_construction_rules() {
    assert!(GappySeries::new(vec![], vec![]).is_err());
    assert!(GappySeries::new(vec![1.0, 2.0], vec![true]).is_err(), "length mismatch");
    assert!(
        GappySeries::new(vec![1.0, 2.0, 3.0], vec![false, true, true]).is_err(),
        "first point must be observed"
    );
    assert!(
        GappySeries::new(vec![1.0, 2.0, 3.0], vec![true, true, false]).is_err(),
        "last point must be observed"
    );
    assert!(
        GappySeries::new(vec![1.0, f64::NAN, 3.0], vec![true, true, true]).is_err(),
        "observed values must be finite"
    );
    let s = GappySeries::new(vec![1.0, 7.0, 3.0], vec![true, false, true]).unwrap();
    assert!(s.values()[1].is_nan(), "unobserved values are normalised to NaN");
    assert_eq!(s.n_observed(), 2);
    assert_eq!(s.n_missing(), 1);
    assert!(!s.is_complete());
    assert_eq!(s.observed_values(), vec![1.0, 3.0]);

    let c = GappySeries::complete(vec![1.0, 2.0]).unwrap();
    assert!(c.is_complete());
    let f = GappySeries::from_options(&[Some(1.0), None, Some(2.0)]).unwrap();
    assert_eq!(missing_set(&f), vec![1]);
}

#[test]
fn mask_count_and_endpoints() {
    for &(n, p) in &[(10usize, 0.3f64), (100, 0.1), (1000, 0.3), (999, 0.7), (1000, 0.0)] {
        let series: Vec<f64> = (0..n).map(|t| t as f64).collect();
        let spec = MissingSpec { proportion: p, seed: 42 };
        let g = inject_missing(&series, &spec).unwrap();
        let k = (p * n as f64 + 0.5).floor() as usize;
        assert_eq!(g.n_missing(), k, "n={} p={}", n, p);
        assert!(g.observed()[0] && g.observed()[n - 1], "endpoints stay observed");
    }
}

#[test]
fn mask_rejects_bad_requests() {
    let series = vec![1.0, 2.0, 3.0];
    assert!(inject_missing(&series, &MissingSpec { proportion: 0.8, seed: 1 }).is_err());
    assert!(inject_missing(&series, &MissingSpec { proportion: -0.1, seed: 1 }).is_err());
    assert!(inject_missing(&series, &MissingSpec { proportion: 0.7, seed: 1 }).is_err(), "would need 2 of 1 interior points");
    assert!(inject_missing(&[1.0, 2.0], &MissingSpec { proportion: 0.0, seed: 1 }).is_err());
    assert!(inject_missing(&[1.0, f64::NAN, 3.0], &MissingSpec { proportion: 0.0, seed: 1 }).is_err());
}

#[test]
fn masks_are_deterministic_nested_and_value_independent() {
    let n = 500usize;
    let a: Vec<f64> = (0..n).map(|t| (t as f64).sin()).collect();
    let b: Vec<f64> = (0..n).map(|t| t as f64 * 3.5 - 100.0).collect();

    let m1 = inject_missing(&a, &MissingSpec { proportion: 0.3, seed: 77 }).unwrap();
    let m2 = inject_missing(&a, &MissingSpec { proportion: 0.3, seed: 77 }).unwrap();
    assert_eq!(m1.observed(), m2.observed(), "same (n, seed, p) gives the same mask");
    let m3 = inject_missing(&a, &MissingSpec { proportion: 0.3, seed: 78 }).unwrap();
    assert_ne!(m1.observed(), m3.observed(), "different seed gives a different mask");

    let mb = inject_missing(&b, &MissingSpec { proportion: 0.3, seed: 77 }).unwrap();
    assert_eq!(m1.observed(), mb.observed(), "mask does not depend on the values");

    let mut prev: Vec<usize> = vec![];
    for &p in &[0.1, 0.3, 0.5, 0.7] {
        let g = inject_missing(&a, &MissingSpec { proportion: p, seed: 77 }).unwrap();
        let cur = missing_set(&g);
        for idx in &prev {
            assert!(cur.contains(idx), "mask at p={} must contain the mask at lower p", p);
        }
        prev = cur;
    }
}

#[test]
fn mask_marginal_frequency_is_uniform_over_interior() {
    // Each interior index is missing with probability k / (n - 2).
    let n = 1000usize;
    let p = 0.3;
    let k = (p * n as f64 + 0.5).floor() as usize;
    let expect = k as f64 / (n - 2) as f64;
    let series: Vec<f64> = (0..n).map(|t| t as f64).collect();
    let trials = 10_000usize;
    let mut hits = [0usize; 3];
    let probe = [1usize, 500, n - 2];
    for seed in 0..trials {
        let g = inject_missing(&series, &MissingSpec { proportion: p, seed: seed as u64 }).unwrap();
        for (j, &idx) in probe.iter().enumerate() {
            if !g.observed()[idx] {
                hits[j] += 1;
            }
        }
    }
    let se = (expect * (1.0 - expect) / trials as f64).sqrt();
    for (j, &idx) in probe.iter().enumerate() {
        let freq = hits[j] as f64 / trials as f64;
        assert!(
            (freq - expect).abs() <= 3.0 * se,
            "index {}: frequency {:.4} vs expected {:.4} (3 se = {:.4})",
            idx,
            freq,
            expect,
            3.0 * se
        );
    }
}

#[test]
fn observed_stats_example() {
    let g = GappySeries::from_options(&[Some(1.0), None, Some(3.0), Some(5.0)]).unwrap();
    let s = observed_stats(&g).unwrap();
    assert_eq!(s.mean, 3.0);
    assert_eq!(s.sd, 2.0);
    assert_eq!(s.min, 1.0);
    assert_eq!(s.max, 5.0);
    assert_eq!(s.n_observed, 3);
    let tiny = GappySeries::complete(vec![4.0]).unwrap();
    assert!(observed_stats(&tiny).is_err());
}

#[test]
fn mean_imputation_fills_with_observed_mean() {
    let g = GappySeries::from_options(&[Some(1.0), None, Some(3.0)]).unwrap();
    assert_eq!(impute_mean(&g).unwrap(), vec![1.0, 2.0, 3.0]);
    let g2 = GappySeries::from_options(&[Some(0.0), None, None, Some(6.0)]).unwrap();
    assert_eq!(impute_mean(&g2).unwrap(), vec![0.0, 3.0, 3.0, 6.0]);
}

#[test]
fn linear_imputation_interpolates_between_neighbours() {
    let g = GappySeries::from_options(&[Some(0.0), None, None, Some(6.0)]).unwrap();
    assert_eq!(impute_linear(&g).unwrap(), vec![0.0, 2.0, 4.0, 6.0]);
    let g2 = GappySeries::from_options(&[Some(1.0), None, Some(3.0), None, Some(-1.0)]).unwrap();
    assert_eq!(impute_linear(&g2).unwrap(), vec![1.0, 2.0, 3.0, 1.0, -1.0]);
}

#[test]
fn imputers_preserve_observed_values_exactly() {
    let model = ArfimaModel::fractional(0.3).unwrap();
    let sim = simulate_gaussian(&model, 400, 100, 5).unwrap();
    let g = inject_missing(&sim.values, &MissingSpec { proportion: 0.4, seed: 13 }).unwrap();
    let stats = observed_stats(&g).unwrap();
    let outs = [
        impute_mean(&g).unwrap(),
        impute_linear(&g).unwrap(),
        impute_random_tn(&g, 10.0, 99).unwrap(),
    ];
    for out in &outs {
        assert_eq!(out.len(), g.len());
        for t in 0..g.len() {
            if g.observed()[t] {
                assert_eq!(out[t].to_bits(), g.values()[t].to_bits());
            } else {
                assert!(out[t].is_finite());
                assert!(out[t] >= stats.min && out[t] <= stats.max);
            }
        }
    }
    // On a complete series every imputer is the identity.
    let c = GappySeries::complete(sim.values.clone()).unwrap();
    assert_eq!(impute_mean(&c).unwrap(), sim.values);
    assert_eq!(impute_linear(&c).unwrap(), sim.values);
    assert_eq!(impute_random_tn(&c, 10.0, 1).unwrap(), sim.values);
}

#[test]
fn random_imputation_is_deterministic_in_the_seed() {
    let model = ArfimaModel::fractional(0.2).unwrap();
    let sim = simulate_gaussian(&model, 300, 0, 8).unwrap();
    let g = inject_missing(&sim.values, &MissingSpec { proportion: 0.5, seed: 21 }).unwrap();
    let a = impute_random_tn(&g, 10.0, 7).unwrap();
    let b = impute_random_tn(&g, 10.0, 7).unwrap();
    assert_eq!(a, b);
    let c = impute_random_tn(&g, 10.0, 8).unwrap();
    assert_ne!(a, c);
    assert!(impute_random_tn(&g, 0.0, 7).is_err());
    assert!(impute_random_tn(&g, -1.0, 7).is_err());
}

#[test]
fn random_imputation_noise_shrinks_with_varsigma() {
    // Scale is S / varsigma: a huge varsigma collapses each draw onto the
    // previous value (carry-forward), small varsigma adds visible noise.
    // Measure the root mean square one-step increment at imputed points;
    // with a shared seed the draws are paired across varsigma values.
    let model = ArfimaModel::fractional(0.3).unwrap();
    let sim = simulate_gaussian(&model, 1000, 200, 17).unwrap();
    let g = inject_missing(&sim.values, &MissingSpec { proportion: 0.5, seed: 31 }).unwrap();
    let rms_gap_increment = |filled: &[f64]| -> f64 {
        let mut s = 0.0;
        let mut k = 0usize;
        for t in 1..filled.len() {
            if !g.observed()[t] {
                s += (filled[t] - filled[t - 1]).powi(2);
                k += 1;
            }
        }
        (s / k as f64).sqrt()
    };
    let tight = rms_gap_increment(&impute_random_tn(&g, 1e6, 3).unwrap());
    let mid = rms_gap_increment(&impute_random_tn(&g, 10.0, 3).unwrap());
    let loose = rms_gap_increment(&impute_random_tn(&g, 4.0, 3).unwrap());
    assert!(tight < 1e-4, "varsigma = 1e6 should be near carry-forward, rms {}", tight);
    assert!(
        loose > 2.0 * mid,
        "varsigma = 4 draws are 2.5x wider than varsigma = 10: rms {} vs {}",
        loose,
        mid
    );
    assert!(mid > 100.0 * tight);
}

#[test]
fn truncated_normal_density_integrates_to_one() {
    let params = TruncNormalParams { mu: 0.3, sigma: 0.8, a: -0.5, b: 1.7 };
    let total = integrate(&|x| trunc_normal_pdf(&params, x), params.a, params.b, 1e-10);
    assert!((total - 1.0).abs() < 1e-8, "density mass {}", total);
    assert_eq!(trunc_normal_pdf(&params, -0.6), 0.0);
    assert_eq!(trunc_normal_pdf(&params, 1.8), 0.0);
}

#[test]
fn truncated_normal_sampler_matches_analytic_cdf() {
    let params = TruncNormalParams { mu: 0.0, sigma: 1.0, a: -1.0, b: 1.0 };
    let mut rng = rng_from_seed(1234);
    let n = 100_000usize;
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let d = sample_trunc_normal(&params, &mut rng).unwrap();
        assert!(!d.degenerate);
        assert!(d.value > params.a && d.value < params.b);
        draws.push(d.value);
    }
    draws.sort_unstable_by(f64::total_cmp);
    let z = normal_cdf(1.0) - normal_cdf(-1.0);
    let cdf = |x: f64| (normal_cdf(x) - normal_cdf(-1.0)) / z;
    let mut sup = 0.0f64;
    for (i, &x) in draws.iter().enumerate() {
        let e = cdf(x);
        let lo = i as f64 / n as f64;
        let hi = (i + 1) as f64 / n as f64;
        sup = sup.max((e - lo).abs()).max((e - hi).abs());
    }
    assert!(sup < 0.01, "empirical vs analytic CDF sup distance {}", sup);
}

#[test]
fn truncated_normal_degenerate_mass_clamps_to_support() {
    // Location 40000 scales below the support: the interval mass underflows
    // and the draw falls back to the clamped location.
    let params = TruncNormalParams { mu: 40.0, sigma: 1e-3, a: 0.0, b: 1.0 };
    let mut rng = rng_from_seed(5);
    let d = sample_trunc_normal(&params, &mut rng).unwrap();
    assert!(d.degenerate);
    assert_eq!(d.value, 1.0);

    assert!(sample_trunc_normal(
        &TruncNormalParams { mu: 0.0, sigma: 0.0, a: 0.0, b: 1.0 },
        &mut rng
    )
    .is_err());
    assert!(sample_trunc_normal(
        &TruncNormalParams { mu: 0.0, sigma: 1.0, a: 1.0, b: 0.0 },
        &mut rng
    )
    .is_err());
}
