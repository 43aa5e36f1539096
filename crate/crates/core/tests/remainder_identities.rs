mod common;

use common::{log_grid, rel_err};
use fracreg::corpus::{make_example1_with_alpha, make_negative_control, make_power};
use fracreg::quadrature::{beta_integral, QuadConfig};
use fracreg::regularity::estimate_fk_holder_constant;
use fracreg::remainder::{
    compute_d, compute_n, eq1_bound, nd_ratio, nd_ratio_sup, taylor_remainder_deriv,
    taylor_remainder_value,
};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[test]
fn remainders_reproduce_closed_forms() {
    let cfg = QuadConfig::default();
    for f in common::corpus() {
        let k = f.k();
        let exponent = (k as f64 + f.alpha() - 1.0) / (k as f64 + f.alpha());
        for &x in f.zeros() {
            for y in log_grid(1e-6, 1.0, 20) {
                let d0 = f.value(y);
                let d1 = f.deriv(1, y);
                let v = taylor_remainder_value(&f, x, y, &cfg).unwrap();
                let dv = taylor_remainder_deriv(&f, x, y, &cfg).unwrap();
                assert!(
                    (v - d0).abs() <= 1e-8 * (1.0 + d0.abs()),
                    "{} y={y}",
                    f.label()
                );
                assert!(
                    (dv - d1).abs() <= 1e-8 * (1.0 + d1.abs()),
                    "{} y={y}",
                    f.label()
                );

                let n = compute_n(&f, x, y, &cfg).unwrap();
                let d = compute_d(&f, x, y, &cfg).unwrap();
                let n_exact = factorial(k - 2) * d1;
                let d_exact = (factorial(k - 1) * d0).powf(exponent);
                assert!(
                    rel_err(n, n_exact) <= 1e-8,
                    "{} N at y={y}: {n} vs {n_exact}",
                    f.label()
                );
                assert!(
                    rel_err(d, d_exact) <= 1e-8,
                    "{} D at y={y}: {d} vs {d_exact}",
                    f.label()
                );
            }
        }
    }
}

#[test]
fn taylor_holder_bound_majorises_f() {
    let cfg_grid = 64;
    for f in common::flat_zero_corpus() {
        let c = match f.fk_holder_constant() {
            Some(c) => c,
            None => 1.01 * estimate_fk_holder_constant(&f, cfg_grid).unwrap(),
        };
        for y in log_grid(1e-6, 1.0, 40) {
            let b = eq1_bound(&f, 0.0, y, c).unwrap();
            assert!(
                f.value(y) <= b,
                "{} y={y}: f={} bound={b}",
                f.label(),
                f.value(y)
            );
            if f.fk_holder_constant().is_some() {
                assert!(rel_err(b, f.value(y)) <= 1e-8);
            }
        }
    }
}

#[test]
fn taylor_holder_bound_fails_without_flat_zero() {
    let f = make_negative_control(1.0).unwrap();
    let b = eq1_bound(&f, 0.0, 0.5, 0.0).unwrap();
    assert!(f.value(0.5) > b);
}

#[test]
fn taylor_holder_bound_on_example1_spot_value() {
    let f = make_example1_with_alpha(2, 0.9, 1.0).unwrap();
    let c = 1.01 * estimate_fk_holder_constant(&f, 64).unwrap();
    let expected_f = -0.125 / 6.0 * 0.5f64.ln() + 5.0 / 36.0 * 0.125;
    assert!((f.value(0.5) - expected_f).abs() < 1e-15);
    assert!(eq1_bound(&f, 0.0, 0.5, c).unwrap() >= f.value(0.5));
}

#[test]
fn d_scales_like_a_power_for_pure_powers() {
    let cfg = QuadConfig::default();
    for &(k, alpha) in &[(2usize, 0.5), (3, 0.9), (2, 1.0)] {
        let f = make_power(k, alpha, 1.0).unwrap();
        let ys = log_grid(1e-6, 1.0, 25);
        let xs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let ds: Vec<f64> = ys
            .iter()
            .map(|&y| compute_d(&f, 0.0, y, &cfg).unwrap().ln())
            .collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let md = ds.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ds)
            .map(|(x, d)| (x - mx) * (d - md))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!(
            (slope - (k as f64 + alpha - 1.0)).abs() < 1e-6,
            "k={k} alpha={alpha}: {slope}"
        );
    }
}

#[test]
fn pure_power_ratio_matches_beta_oracle() {
    let cfg = QuadConfig::default();
    for &(k, alpha) in &[(2usize, 0.5), (3, 0.5), (3, 0.9)] {
        let f = make_power(k, alpha, 1.0).unwrap();
        let c = f.fk_holder_constant().unwrap();
        let e = (k as f64 + alpha - 1.0) / (k as f64 + alpha);
        let oracle = c * beta_integral(alpha + 1.0, k as f64 - 1.0).unwrap()
            / (c * beta_integral(alpha + 1.0, k as f64).unwrap()).powf(e);
        for y in log_grid(1e-6, 1.0, 13) {
            let r = nd_ratio(&f, 0.0, y, &cfg).unwrap();
            assert!(
                rel_err(r, oracle) < 1e-8,
                "k={k} alpha={alpha} y={y}: {r} vs {oracle}"
            );
        }
    }
}

#[test]
fn example1_ratio_matches_high_precision_oracle() {
    // mpmath at 40 digits: direct quadrature of the N and D integrals.
    let frozen = [
        (
            2usize,
            [
                1.3049705416141757,
                1.0779120589168423,
                0.7984838891733931,
                0.5648844903944414,
                0.3895725169739847,
                0.26435381705479527,
            ],
        ),
        (
            3,
            [
                0.9286664591311048,
                0.8001535143674223,
                0.6429905258257693,
                0.5010625574402551,
                0.3837561244540745,
                0.2906610709037983,
            ],
        ),
    ];
    let cfg = QuadConfig::default();
    for (k, values) in frozen {
        let f = make_example1_with_alpha(k, 0.5, 1.0).unwrap();
        for (i, &expected) in values.iter().enumerate() {
            let y = 10f64.powi(-(i as i32) - 1);
            let r = nd_ratio(&f, 0.0, y, &cfg).unwrap();
            assert!(
                rel_err(r, expected) < 1e-8,
                "k={k} y={y}: {r} vs {expected}"
            );
        }
    }
}

#[test]
fn example1_sup_near_zero_sits_at_largest_y() {
    let f = make_example1_with_alpha(2, 0.5, 1.0).unwrap();
    let grid = log_grid(1e-6, 0.1, 25);
    let s = nd_ratio_sup(&f, &grid, &QuadConfig::default()).unwrap();
    assert_eq!(s.argmax, (0.0, *grid.last().unwrap()));
    assert!(rel_err(s.sup, 1.3049705416141757) < 1e-8);
}
