//! Integral Taylor remainders at a flat zero and the `N`/`D` quantities.
//!
//! For a zero `x` of `f` with `f^{(j)}(x) = 0` for `j < k`, and
//! `I_p(x, y) = ∫_0^1 (1-s)^p f^{(k)}(s y + (1-s) x) ds`:
//!
//! ```text
//! f(y)  = (y-x)^k     / (k-1)! * I_{k-1}
//! f'(y) = (y-x)^{k-1} / (k-2)! * I_{k-2}
//! N(x,y) = (y-x)^{k-1} I_{k-2}
//! D(x,y) = ((y-x)^k I_{k-1})^{(k+alpha-1)/(k+alpha)}
//! ```
//!
//! so `N = (k-2)! f'(y)` and `D = ((k-1)! f(y))^{(k+alpha-1)/(k+alpha)}`.

use serde::Serialize;

use crate::corpus::FunctionSpec;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig, QuadratureResult};

/// Denominators below this are rejected by [`nd_ratio`].
pub const D_FLOOR: f64 = 1e-300;

/// Uniform grid size used for `||f^{(k)}||_inf`.
pub const SUP_NORM_GRID: usize = 10_001;

/// Relative slack under which two ratios count as tied in [`nd_ratio_sup`].
const TIE_TOLERANCE: f64 = 1e-9;

/// Abscissae used to pick the integrand scale.
const SCALE_PROBES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderPair {
    #[serde(rename = "N")]
    pub n_value: f64,
    #[serde(rename = "D")]
    pub d_value: f64,
    pub x: f64,
    pub y: f64,
    /// Absolute quadrature error carried into `N` plus the one carried into
    /// the inner value of `D`.
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NdSup {
    pub sup: f64,
    /// `(x, y)` attaining the sup; ties go to the smallest `x`, then `y`.
    pub argmax: (f64, f64),
    pub samples: usize,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn require_zero(f: &FunctionSpec, x: f64) -> Result<()> {
    if f.is_declared_zero(x) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "expansion point {x} is not a declared zero of {}",
            f.label()
        )))
    }
}

/// `I_p(x, y)`, integrated after dividing out the integrand's magnitude so
/// the relative tolerance governs even when `f^{(k)}` is tiny near `x`.
pub fn weighted_integral(
    f: &FunctionSpec,
    x: f64,
    y: f64,
    power: usize,
    cfg: &QuadConfig,
) -> Result<QuadratureResult> {
    let at = |s: f64| f.top_deriv(s * y + (1.0 - s) * x);
    let scale = (1..=SCALE_PROBES)
        .map(|i| at(i as f64 / SCALE_PROBES as f64).abs())
        .fold(0.0, f64::max);
    let scale = if scale > 0.0 && scale.is_finite() {
        scale
    } else {
        1.0
    };
    let p = power as i32;
    let mut r = integrate(|s| (1.0 - s).powi(p) * at(s) / scale, cfg)?;
    r.value *= scale;
    r.error_estimate *= scale;
    Ok(r)
}

/// `f(y)` rebuilt from the order-`k` remainder at the zero `x`.
pub fn taylor_remainder_value(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<f64> {
    require_zero(f, x)?;
    if y == x {
        return Ok(0.0);
    }
    let k = f.k();
    let i = weighted_integral(f, x, y, k - 1, cfg)?;
    Ok((y - x).powi(k as i32) / factorial(k - 1) * i.value)
}

/// `f'(y)` rebuilt from the order-`k` remainder at the zero `x`.
pub fn taylor_remainder_deriv(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<f64> {
    require_zero(f, x)?;
    if y == x {
        return Ok(0.0);
    }
    let k = f.k();
    let i = weighted_integral(f, x, y, k - 2, cfg)?;
    Ok((y - x).powi(k as i32 - 1) / factorial(k - 2) * i.value)
}

fn n_with_error(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    if y == x {
        return Ok((0.0, 0.0));
    }
    let k = f.k() as i32;
    let i = weighted_integral(f, x, y, f.k() - 2, cfg)?;
    let w = (y - x).powi(k - 1);
    Ok((w * i.value, w.abs() * i.error_estimate))
}

fn d_with_error(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    if y == x {
        return Ok((0.0, 0.0));
    }
    let k = f.k();
    let i = weighted_integral(f, x, y, k - 1, cfg)?;
    let w = (y - x).powi(k as i32);
    let inner = w * i.value;
    let slack = w.abs() * (i.error_estimate + cfg.target(i.value));
    if inner < -slack {
        return Err(Error::Domain(format!(
            "D inner value {inner:e} is negative beyond tolerance {slack:e} at (x, y) = ({x}, {y})"
        )));
    }
    let exponent = (k as f64 + f.alpha() - 1.0) / (k as f64 + f.alpha());
    Ok((inner.max(0.0).powf(exponent), w.abs() * i.error_estimate))
}

/// `N(x, y) = (y-x)^{k-1} ∫_0^1 (1-s)^{k-2} f^{(k)}(s y + (1-s) x) ds`.
pub fn compute_n(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<f64> {
    require_zero(f, x)?;
    n_with_error(f, x, y, cfg).map(|(n, _)| n)
}

/// `D(x, y) = ((y-x)^k ∫_0^1 (1-s)^{k-1} f^{(k)}(s y + (1-s) x) ds)^{(k+α-1)/(k+α)}`.
///
/// Inner values slightly below zero (within quadrature tolerance) are
/// clamped to zero.
pub fn compute_d(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<f64> {
    require_zero(f, x)?;
    d_with_error(f, x, y, cfg).map(|(d, _)| d)
}

pub fn remainder_pair(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<RemainderPair> {
    require_zero(f, x)?;
    let (n_value, n_err) = n_with_error(f, x, y, cfg)?;
    let (d_value, d_err) = d_with_error(f, x, y, cfg)?;
    Ok(RemainderPair {
        n_value,
        d_value,
        x,
        y,
        quad_error: n_err + d_err,
    })
}

/// `N(x, y) / D(x, y)` for a zero `x` and a positive point `y`.
pub fn nd_ratio(f: &FunctionSpec, x: f64, y: f64, cfg: &QuadConfig) -> Result<f64> {
    nd_pair_checked(f, x, y, cfg).map(|p| p.n_value / p.d_value)
}

pub(crate) fn nd_pair_checked(
    f: &FunctionSpec,
    x: f64,
    y: f64,
    cfg: &QuadConfig,
) -> Result<RemainderPair> {
    require_zero(f, x)?;
    let fy = f.value(y);
    if !(fy > 0.0) {
        return Err(Error::Precondition(format!(
            "f({y}) = {fy} is not positive"
        )));
    }
    let pair = remainder_pair(f, x, y, cfg)?;
    if pair.d_value < D_FLOOR {
        return Err(Error::OverflowGuard(pair.d_value));
    }
    Ok(pair)
}

/// Sup of `N/D` over every declared zero and every grid point.
pub fn nd_ratio_sup(f: &FunctionSpec, y_grid: &[f64], cfg: &QuadConfig) -> Result<NdSup> {
    if y_grid.is_empty() {
        return Err(Error::InvalidParameter("empty y grid".into()));
    }
    if f.zeros().is_empty() {
        return Err(Error::Precondition(format!(
            "{} has no declared zeros",
            f.label()
        )));
    }
    let mut ys = y_grid.to_vec();
    ys.sort_by(f64::total_cmp);
    let mut best: Option<NdSup> = None;
    let mut samples = 0;
    for &x in f.zeros() {
        for &y in &ys {
            let r = nd_ratio(f, x, y, cfg)?;
            samples += 1;
            let better = match best {
                None => true,
                Some(b) => r > b.sup + TIE_TOLERANCE * b.sup.abs(),
            };
            if better {
                best = Some(NdSup {
                    sup: r,
                    argmax: (x, y),
                    samples: 0,
                });
            }
        }
    }
    let mut best = best.expect("nonempty grid");
    best.samples = samples;
    Ok(best)
}

/// `C / ((1+α)(2+α)...(k+α)) |y-x|^{k+α}`, the majorant of `f(y)` at a flat
/// zero `x` when `C` is a Hölder constant of `f^{(k)}`.
pub fn eq1_bound(f: &FunctionSpec, x: f64, y: f64, holder_constant: f64) -> Result<f64> {
    require_zero(f, x)?;
    if !(holder_constant >= 0.0 && holder_constant.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Hölder constant must be finite and nonnegative, got {holder_constant}"
        )));
    }
    let alpha = f.alpha();
    let denom: f64 = (1..=f.k()).map(|i| i as f64 + alpha).product();
    Ok(holder_constant / denom * (y - x).abs().powf(f.k() as f64 + alpha))
}

/// `max |f^{(k)}|` over a uniform grid of [`SUP_NORM_GRID`] points of `[0, T]`.
pub fn top_deriv_sup_norm(f: &FunctionSpec) -> f64 {
    let n = SUP_NORM_GRID - 1;
    (0..=n)
        .map(|i| f.top_deriv(f.t_max() * i as f64 / n as f64).abs())
        .fold(0.0, f64::max)
}

fn require_corollary_point(f: &FunctionSpec, y: f64) -> Result<()> {
    if !(y > 0.0 && y <= f.t_max()) {
        return Err(Error::InvalidParameter(format!(
            "y must lie in (0, {}], got {y}",
            f.t_max()
        )));
    }
    if !f.is_declared_zero(0.0) {
        return Err(Error::HypothesisViolation(
            "0 is not a declared zero".into(),
        ));
    }
    if let Some(j) = (0..=f.k()).find(|&j| f.deriv(j, 0.0) != 0.0) {
        return Err(Error::HypothesisViolation(format!(
            "f^({j})(0) = {} is not zero",
            f.deriv(j, 0.0)
        )));
    }
    Ok(())
}

/// The strict upper bound
/// `min(1, ((k-1) / (2 ||f^{(k)}||) ∫_0^1 (1-s)^{k-2} f^{(k)}(s y) ds)^{1/(k-1)})`.
pub fn corollary_epsilon_bound(f: &FunctionSpec, y: f64, cfg: &QuadConfig) -> Result<f64> {
    require_corollary_point(f, y)?;
    let k = f.k();
    let inner = weighted_integral(f, 0.0, y, k - 2, cfg)?.value;
    let norm = top_deriv_sup_norm(f);
    if !(inner > 0.0 && norm > 0.0) {
        return Err(Error::HypothesisViolation(format!(
            "∫(1-s)^(k-2) f^(k)(sy) ds = {inner:e} at y = {y} is not positive"
        )));
    }
    let base = (k as f64 - 1.0) / (2.0 * norm) * inner;
    Ok(base.powf(1.0 / (k as f64 - 1.0)).min(1.0))
}

/// Half of [`corollary_epsilon_bound`]: a concrete admissible `ε`.
pub fn corollary_epsilon(f: &FunctionSpec, y: f64, cfg: &QuadConfig) -> Result<f64> {
    corollary_epsilon_bound(f, y, cfg).map(|b| 0.5 * b)
}

/// Whether `∫(1-s)^{k-1} f^{(k)}(sy) ds >= (ε/2) ∫(1-s)^{k-2} f^{(k)}(sy) ds`
/// holds up to quadrature tolerance.
pub fn corollary_chain_check(f: &FunctionSpec, y: f64, eps: f64, cfg: &QuadConfig) -> Result<bool> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be nonnegative, got {eps}"
        )));
    }
    if !(y > 0.0 && y <= f.t_max()) {
        return Err(Error::InvalidParameter(format!(
            "y must lie in (0, {}], got {y}",
            f.t_max()
        )));
    }
    let k = f.k();
    let lhs = weighted_integral(f, 0.0, y, k - 1, cfg)?;
    let rhs = weighted_integral(f, 0.0, y, k - 2, cfg)?;
    let rhs_value = 0.5 * eps * rhs.value;
    let slack = lhs.error_estimate + 0.5 * eps * rhs.error_estimate + cfg.target(lhs.value);
    Ok(lhs.value + slack >= rhs_value)
}
