//! Adaptive integration on `[0, 1]` and the Beta function.
//!
//! Panels are integrated with the 15-point Gauss-Kronrod rule; the embedded
//! 7-point Gauss rule gives the error estimate. The panel with the largest
//! estimate is bisected until the global estimate meets the tolerance. All
//! nodes are interior to their panel, so the integrand is never evaluated at
//! `s = 0` or `s = 1`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Kronrod abscissae on `[-1, 1]`, nonnegative half, descending.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_47,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_41,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_67,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any single panel.
    pub max_depth: u32,
    /// Hard cap on the number of live panels.
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 50,
            max_panels: 4096,
        }
    }
}

impl QuadConfig {
    /// The CLI mapping: `rel_tol = 100 * abs_tol`.
    pub fn from_abs_tol(abs_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol: 100.0 * abs_tol,
            ..QuadConfig::default()
        }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Deepest bisection level reached by any panel.
    pub subdivisions: u32,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut finite = fc.is_finite();
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        finite &= pair.is_finite();
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    if !finite {
        return Err(Error::Domain(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Integrates `integrand` over `[0, 1]`.
pub fn integrate<F: Fn(f64) -> f64>(integrand: F, cfg: &QuadConfig) -> Result<QuadratureResult> {
    integrate_on(integrand, 0.0, 1.0, cfg)
}

/// Integrates `integrand` over `[a, b]`.
pub fn integrate_on<F: Fn(f64) -> f64>(
    integrand: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            panels: 0,
        });
    }
    let (value, error) = gauss_kronrod(&integrand, a, b)?;
    let mut panels = vec![Panel {
        a,
        b,
        value,
        error,
        depth: 0,
    }];
    loop {
        let (total, err) = totals(&mut panels);
        let max_depth = panels.iter().map(|p| p.depth).max().unwrap_or(0);
        if err <= cfg.target(total) {
            return Ok(QuadratureResult {
                value: total,
                error_estimate: err,
                subdivisions: max_depth,
                panels: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < cfg.max_depth)
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i);
        let worst = match worst {
            Some(i) if panels.len() < cfg.max_panels => i,
            _ => {
                return Err(Error::NonConvergence {
                    value: total,
                    error_estimate: err,
                    subdivisions: max_depth,
                })
            }
        };
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        let (lv, le) = gauss_kronrod(&integrand, p.a, mid)?;
        let (rv, re) = gauss_kronrod(&integrand, mid, p.b)?;
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: lv,
            error: le,
            depth: p.depth + 1,
        };
        panels.insert(
            worst + 1,
            Panel {
                a: mid,
                b: p.b,
                value: rv,
                error: re,
                depth: p.depth + 1,
            },
        );
    }
}

// Panels stay ordered left to right, so the sum order is fixed.
fn totals(panels: &mut [Panel]) -> (f64, f64) {
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b) = ∫_0^1 t^{a-1}(1-t)^{b-1} dt`.
pub fn beta_integral(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta arguments must be positive, got ({a}, {b})"
        )));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}
