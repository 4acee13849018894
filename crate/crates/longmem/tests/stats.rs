//! Checks of the shared numerical helpers against independently computed
//! reference values (normal distribution, quadrature nodes) and against
//! small cases worked by hand.

use longmem::stats::*;

fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{}: got {:.17e}, expected {:.17e} (tol {:.1e})",
        what,
        actual,
        expected,
        tol
    );
}

#[test]
fn normal_ppf_matches_reference_values() {
    let cases: [(f64, f64); 9] = [
        (1e-10, -6.3613409024040557),
        (0.00034, -3.3975184597785799),
        (0.01, -2.3263478740408408),
        (0.1, -1.2815515655446004),
        (0.3, -0.52440051270804089),
        (0.5, 0.0),
        (0.7, 0.52440051270804067),
        (0.975, 1.959963984540054),
        (0.9999999999, 6.3613408896974217),
    ];
    for (p, x) in cases {
        let tol = 1e-13 * x.abs().max(1.0);
        assert_close(normal_ppf(p), x, tol, &format!("ppf({})", p));
    }
    assert_eq!(normal_ppf(0.0), f64::NEG_INFINITY);
    assert_eq!(normal_ppf(1.0), f64::INFINITY);
}

#[test]
fn normal_cdf_matches_reference_values() {
    // The underlying erfc is accurate to about 4e-11 relative; everything
    // downstream (truncated-normal CDFs, distribution checks) needs far less.
    let cases: [(f64, f64); 7] = [
        (-8.0, 6.2209605742717405e-16),
        (-3.0, 0.0013498980316300933),
        (-1.0, 0.15865525393145707),
        (-0.5, 0.30853753872598688),
        (0.7, 0.75803634777692697),
        (2.5, 0.99379033467422384),
        (6.0, 0.9999999990134123),
    ];
    for (x, p) in cases {
        let tol = 1e-9 * p.abs().max(1e-14);
        assert_close(normal_cdf(x), p, tol, &format!("cdf({})", x));
    }
}

#[test]
fn normal_ppf_inverts_cdf() {
    for &x in &[-5.0, -2.3, -0.7, 0.0, 0.4, 1.9, 4.5] {
        assert_close(normal_ppf(normal_cdf(x)), x, 1e-10 * x.abs().max(1.0), "ppf(cdf(x))");
    }
}

#[test]
fn gauss_legendre_64_matches_reference_values() {
    let (nodes, weights) = gauss_legendre_64().clone();
    assert_eq!(nodes.len(), 64);
    assert_close(nodes[0], 0.00034747913211391479, 1e-15, "first node");
    assert_close(weights[0], 0.00089164036084710759, 5e-14, "first weight");
    assert_close(nodes[63], 0.99965252086788614, 1e-15, "last node");
    let total: f64 = weights.iter().sum();
    assert_close(total, 1.0, 1e-14, "weight sum");
    for w in &nodes {
        assert!(*w > 0.0 && *w < 1.0);
    }
    for i in 1..64 {
        assert!(nodes[i] > nodes[i - 1]);
    }
}

#[test]
fn gauss_legendre_exactness_on_polynomials() {
    // An order-n rule integrates degree 2n-1 polynomials exactly.
    let (nodes, weights) = gauss_legendre_unit(8);
    let approx: f64 = nodes.iter().zip(&weights).map(|(&x, &w)| w * x.powi(15)).sum();
    assert_close(approx, 1.0 / 16.0, 1e-15, "integral of x^15 on (0,1)");
}

#[test]
fn ranks_average_ties() {
    let r = average_ranks(&[3.0, 1.0, 4.0, 1.0, 5.0]);
    assert_eq!(r, vec![3.0, 1.5, 4.0, 1.5, 5.0]);
    let r2 = average_ranks(&[2.0, 2.0, 2.0]);
    assert_eq!(r2, vec![2.0, 2.0, 2.0]);
}

#[test]
fn spearman_of_monotone_data_is_one() {
    let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
    assert_close(spearman(&x, &y).unwrap(), 1.0, 1e-14, "spearman");
    let yrev: Vec<f64> = x.iter().map(|v| -v).collect();
    assert_close(spearman(&x, &yrev).unwrap(), -1.0, 1e-14, "spearman reversed");
}

#[test]
fn ols_recovers_exact_line() {
    let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 3.5 - 0.25 * v).collect();
    let fit = ols(&x, &y).unwrap();
    assert_close(fit.slope, -0.25, 1e-14, "slope");
    assert_close(fit.intercept, 3.5, 1e-13, "intercept");
    assert!(fit.resid_var < 1e-26);
    assert_close(fit.r2, 1.0, 1e-12, "r2");
}

#[test]
fn quantile_type7_interpolates() {
    let s = [1.0, 2.0, 3.0, 4.0];
    assert_close(quantile_sorted(&s, 0.0), 1.0, 0.0, "q0");
    assert_close(quantile_sorted(&s, 1.0), 4.0, 0.0, "q1");
    assert_close(quantile_sorted(&s, 0.5), 2.5, 1e-15, "median");
    assert_close(quantile_sorted(&s, 0.25), 1.75, 1e-15, "q25");
}

#[test]
fn variance_uses_n_minus_one() {
    assert_close(variance(&[1.0, -1.0]), 2.0, 1e-15, "variance");
    assert_close(sd(&[2.0, -1.0, 3.0, 0.0]), (10.0f64 / 3.0).sqrt(), 1e-15, "sd");
}

#[test]
fn simpson_integrates_smooth_functions() {
    let got = integrate(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
    assert_close(got, std::f64::consts::E - 1.0, 1e-11, "integral of exp");
}

#[test]
fn minimizer_finds_interior_optimum() {
    let grid = d_search_grid();
    assert_eq!(grid.len(), 101);
    assert_close(grid[0], -0.499, 1e-12, "grid start");
    assert_close(*grid.last().unwrap(), 0.499, 1e-12, "grid end");
    let m = minimize_scalar(|d| (d - 0.237).powi(2), &grid, 1e-6);
    assert_close(m.x, 0.237, 1e-5, "argmin");
    let edge = minimize_scalar(|d| d, &grid, 1e-6);
    assert_close(edge.x, -0.499, 1e-9, "monotone objective pins the lower edge");
}
