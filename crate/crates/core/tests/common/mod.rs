#![allow(dead_code)]

use fracreg::corpus::{
    make_example1_with_alpha, make_example2, make_negative_control, make_power, FunctionSpec,
    SmoothFactor,
};

pub const ORDERS: [usize; 2] = [2, 3];
pub const ALPHAS: [f64; 2] = [0.5, 0.9];

/// Every built-in family over `k in {2,3}`, `alpha in {0.5, 0.9}`.
pub fn corpus() -> Vec<FunctionSpec> {
    let mut specs = Vec::new();
    for &k in &ORDERS {
        for &alpha in &ALPHAS {
            specs.push(make_example1_with_alpha(k, alpha, 1.0).unwrap());
            specs.push(make_power(k, alpha, 1.0).unwrap());
            specs.push(make_example2(k, alpha, SmoothFactor::flat_of_order(1), 1.0).unwrap());
            specs.push(make_example2(k, alpha, SmoothFactor::flat_of_order(0), 1.0).unwrap());
        }
    }
    specs.push(make_negative_control(1.0).unwrap());
    specs
}

/// The corpus without the negative control.
pub fn flat_zero_corpus() -> Vec<FunctionSpec> {
    corpus()
        .into_iter()
        .filter(|f| f.family() != fracreg::corpus::Family::NegativeControl)
        .collect()
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
