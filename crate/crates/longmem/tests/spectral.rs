//! Frequency-domain estimators: periodogram against a direct DFT and
//! Parseval's identity, regression slope recovery on synthetic ordinates,
//! invariances, bias on white noise, and the fractional difference filter.

use longmem::arfima::{pi_coeffs, simulate_gaussian, ArfimaModel};
use longmem::spectral::*;
use longmem::stats::mean;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let model = ArfimaModel::fractional(0.0).unwrap();
    simulate_gaussian(&model, n, 0, seed).unwrap().values
}

#[test]
fn periodogram_matches_direct_dft() {
    let y = white_noise(128, 2);
    let fast = periodogram_full(&y).unwrap();
    assert_eq!(fast.len(), 128);
    let n = y.len();
    for j in 0..n {
        let lam = TWO_PI * j as f64 / n as f64;
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (t, &v) in y.iter().enumerate() {
            re += v * (lam * t as f64).cos();
            im -= v * (lam * t as f64).sin();
        }
        let direct = (re * re + im * im) / (TWO_PI * n as f64);
        assert!(
            (fast[j] - direct).abs() <= 1e-9 * direct.abs().max(1e-12),
            "ordinate {} mismatch: {} vs {}",
            j,
            fast[j],
            direct
        );
    }
}

#[test]
fn periodogram_satisfies_parseval() {
    for &n in &[16usize, 100, 127, 128, 1000] {
        for seed in 0..20u64 {
            let y = white_noise(n, 1000 * seed + n as u64);
            let full = periodogram_full(&y).unwrap();
            let lhs: f64 = full.iter().sum();
            let rhs: f64 = y.iter().map(|v| v * v).sum::<f64>() / TWO_PI;
            assert!(
                (lhs - rhs).abs() <= 1e-10 * rhs,
                "Parseval violated at n={} seed={}: {} vs {}",
                n,
                seed,
                lhs,
                rhs
            );
        }
    }
}

#[test]
fn periodogram_struct_covers_positive_frequencies() {
    let y = white_noise(101, 9);
    let pg = periodogram(&y).unwrap();
    assert_eq!(pg.n, 101);
    assert_eq!(pg.freqs.len(), 50);
    assert_eq!(pg.ordinates.len(), 50);
    assert!((pg.freqs[0] - TWO_PI / 101.0).abs() < 1e-15);
    assert!(pg.ordinates.iter().all(|&o| o > 0.0));
}

#[test]
fn non_finite_input_is_rejected_with_guidance() {
    let mut y = white_noise(64, 3);
    y[10] = f64::NAN;
    for r in [gph(&y, None), local_whittle(&y, None), elw(&y, None)] {
        let msg = r.unwrap_err().to_string();
        assert!(msg.contains("impute"), "error should point at imputation: {}", msg);
    }
}

#[test]
fn constant_series_reports_zero_ordinate() {
    let y = vec![3.25; 256];
    let err = gph(&y, None).unwrap_err().to_string();
    assert!(
        err.contains("zero periodogram ordinate at frequency index 1"),
        "unexpected error: {}",
        err
    );
    assert!(local_whittle(&y, None).is_err());
}

#[test]
fn bandwidth_rules() {
    assert_eq!(default_bandwidth(1000), 32);
    assert_eq!(default_bandwidth(511), 23);
    let y = white_noise(1000, 4);
    assert_eq!(gph(&y, None).unwrap().m_used, 32);
    assert_eq!(gph(&y, Some(100)).unwrap().m_used, 100);
    assert!(gph(&y, Some(1)).is_err());
    assert!(gph(&y, Some(500)).is_err(), "needs 2m < n");
    assert!(local_whittle(&y, Some(500)).is_err());
}

#[test]
fn log_periodogram_regression_recovers_exact_slope() {
    // Ordinates manufactured as I_j = C exp(d x_j) with x_j the regressor
    // -2 log(2 sin(lambda_j / 2)) make the regression exact.
    let n = 500usize;
    let m = 60usize;
    let d = 0.37;
    let c = 2.5f64;
    let ordinates: Vec<f64> = (1..=n / 2)
        .map(|j| {
            let lam = TWO_PI * j as f64 / n as f64;
            let x = -2.0 * (2.0 * (lam / 2.0).sin()).ln();
            c * (d * x).exp()
        })
        .collect();
    let res = gph_from_ordinates(&ordinates, n, m).unwrap();
    assert!((res.d_hat - d).abs() < 1e-12, "slope {} vs {}", res.d_hat, d);
    assert!((res.diagnostics["intercept"] - c.ln()).abs() < 1e-12);
    assert!(res.diagnostics["r2"] > 1.0 - 1e-12);
    assert!(res.converged);
    assert_eq!(res.method, "gph");
}

#[test]
fn gph_is_scale_invariant_and_shift_stable() {
    let y = white_noise(1000, 5);
    let base = gph(&y, None).unwrap().d_hat;
    let scaled: Vec<f64> = y.iter().map(|v| 2.7 * v).collect();
    assert!((gph(&scaled, None).unwrap().d_hat - base).abs() < 1e-12);
    let shifted: Vec<f64> = y.iter().map(|v| v + 5.0).collect();
    assert!((gph(&shifted, None).unwrap().d_hat - base).abs() < 1e-9);
}

#[test]
fn local_whittle_is_scale_invariant_and_shift_stable() {
    let y = white_noise(1000, 6);
    let base = local_whittle(&y, None).unwrap().d_hat;
    let scaled: Vec<f64> = y.iter().map(|v| 0.013 * v).collect();
    assert!((local_whittle(&scaled, None).unwrap().d_hat - base).abs() < 1e-5);
    let shifted: Vec<f64> = y.iter().map(|v| v - 11.0).collect();
    assert!((local_whittle(&shifted, None).unwrap().d_hat - base).abs() < 1e-5);
}

#[test]
fn elw_is_shift_invariant_by_anchoring() {
    let model = ArfimaModel::fractional(0.25).unwrap();
    let y = simulate_gaussian(&model, 400, 100, 12).unwrap().values;
    let base = elw(&y, None).unwrap().d_hat;
    let shifted: Vec<f64> = y.iter().map(|v| v + 1000.0).collect();
    assert!(
        (elw(&shifted, None).unwrap().d_hat - base).abs() < 1e-4,
        "anchoring should absorb level shifts"
    );
    let scaled: Vec<f64> = y.iter().map(|v| 31.0 * v).collect();
    assert!((elw(&scaled, None).unwrap().d_hat - base).abs() < 1e-5);
}

#[test]
fn estimators_are_nearly_unbiased_on_white_noise() {
    let reps = 300usize;
    let mut dg = Vec::with_capacity(reps);
    let mut dl = Vec::with_capacity(reps);
    for rep in 0..reps {
        let y = white_noise(1000, 40_000 + rep as u64);
        dg.push(gph(&y, None).unwrap().d_hat);
        dl.push(local_whittle(&y, None).unwrap().d_hat);
    }
    assert!(mean(&dg).abs() <= 0.03, "GPH white-noise bias {}", mean(&dg));
    assert!(mean(&dl).abs() <= 0.03, "LW white-noise bias {}", mean(&dl));

    let reps = 150usize;
    let mut de = Vec::with_capacity(reps);
    for rep in 0..reps {
        let y = white_noise(512, 80_000 + rep as u64);
        de.push(elw(&y, None).unwrap().d_hat);
    }
    assert!(mean(&de).abs() <= 0.03, "ELW white-noise bias {}", mean(&de));
}

#[test]
fn elw_tracks_local_whittle_on_stationary_series() {
    let model = ArfimaModel::fractional(0.2).unwrap();
    let reps = 200usize;
    let mut gaps = Vec::with_capacity(reps);
    for rep in 0..reps {
        let y = simulate_gaussian(&model, 1000, 200, 7_000 + rep as u64).unwrap().values;
        let a = elw(&y, None).unwrap().d_hat;
        let b = local_whittle(&y, None).unwrap().d_hat;
        gaps.push((a - b).abs());
    }
    gaps.sort_unstable_by(f64::total_cmp);
    let median = gaps[reps / 2];
    assert!(median < 0.05, "median |elw - lw| = {}", median);
}

#[test]
fn trend_pins_the_search_at_the_boundary() {
    let y: Vec<f64> = (0..400).map(|t| t as f64).collect();
    let res = local_whittle(&y, None).unwrap();
    assert!((res.d_hat - 0.499).abs() < 1e-9, "strong trend pins at the top of the grid");
    assert!(at_search_boundary(res.d_hat));
    assert!(!res.converged);
    assert_eq!(res.reason.as_deref(), Some("optimum at search boundary"));
}

#[test]
fn fractional_difference_identity_and_impulse() {
    let y = white_noise(100, 13);
    let z = fracdiff_apply(&y, 0.0).unwrap();
    assert_eq!(z, y, "d = 0 must be the identity filter");

    let mut e = vec![0.0; 50];
    e[0] = 1.0;
    for &d in &[0.3, -0.25] {
        let imp = fracdiff_apply(&e, d).unwrap();
        let pi = pi_coeffs(d, 50).unwrap();
        assert_eq!(imp, pi, "impulse response must equal the filter coefficients");
    }
}

#[test]
fn fractional_difference_round_trips() {
    let model = ArfimaModel::fractional(0.2).unwrap();
    let y = simulate_gaussian(&model, 200, 0, 3).unwrap().values;
    let w = fracdiff_apply(&y, 0.35).unwrap();
    let back = fracdiff_apply(&w, -0.35).unwrap();
    let worst = y
        .iter()
        .zip(&back)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-10, "round-trip error {}", worst);
}

#[test]
fn elw_input_rules() {
    assert!(elw(&[1.0, 2.0, 3.0], None).is_err(), "too short");
    let y = white_noise(100, 14);
    assert!(elw(&y, Some(50)).is_err(), "bandwidth measured on the anchored length 99");
    assert!(elw(&y, Some(49)).is_ok());
}
