//! Pointwise regularity of `(f^mu)'` and of `f^{(k)}`.
//!
//! Hölder exponents at a point are estimated by regressing
//! `log |g(y) - g(anchor)|` on `log |y - anchor|` over dyadic offsets
//! `base * 2^{-i}`.

use serde::Serialize;

use crate::corpus::FunctionSpec;
use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;

/// Minimum number of usable scales for a fit.
pub const MIN_SCALES: usize = 5;

/// Offsets below `SCALE_FLOOR * T` are discarded.
pub const SCALE_FLOOR: f64 = 1e-12;

const DEFAULT_BASE_OFFSET: f64 = 0.25;

/// Deepest geometric refinement around a zero for the `f^{(k)}` estimate.
const MAX_REFINEMENT: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckConfig {
    pub mu: f64,
    /// Number of dyadic offsets per anchor side.
    pub scales: usize,
    /// Largest offset; `None` means `min(0.25, distance to the boundary)`.
    pub base_offset: Option<f64>,
    pub grid_points: usize,
    #[serde(skip)]
    pub quad: QuadConfig,
    /// Allowed shortfall of a fitted exponent below its target.
    pub exponent_margin: f64,
    /// Fine-grid sup of `N/D` may exceed the coarse-grid sup by this factor.
    pub nd_stability: f64,
    /// Example 2 limit: "zero" when the last sample is below this fraction of the first.
    pub limit_zero_decay: f64,
    /// Example 2 limit: "positive" when the last two samples agree to this relative amount.
    pub limit_stabilization: f64,
    /// Example 2 limit: a positive limit must exceed this floor.
    pub limit_floor: f64,
    /// Relative slack for `f >= 0` on the sampling grid.
    pub nonneg_tol: f64,
    /// Guard band on both ends of the admissible `mu` interval.
    pub mu_guard: f64,
}

impl CheckConfig {
    pub fn new(mu: f64) -> Self {
        CheckConfig {
            mu,
            scales: 20,
            base_offset: None,
            grid_points: 64,
            quad: QuadConfig::default(),
            exponent_margin: 0.05,
            nd_stability: 1.05,
            limit_zero_decay: 0.1,
            limit_stabilization: 0.02,
            limit_floor: 1e-6,
            nonneg_tol: 1e-12,
            mu_guard: 1e-12,
        }
    }

    /// Lower end `1/(k+alpha)` of the admissible exponent interval.
    pub fn mu_lower(f: &FunctionSpec) -> f64 {
        1.0 / (f.k() as f64 + f.alpha())
    }

    /// `mu (k + alpha) - 1`.
    pub fn beta_raw(&self, f: &FunctionSpec) -> f64 {
        self.mu * (f.k() as f64 + f.alpha()) - 1.0
    }

    pub fn validate(&self, f: &FunctionSpec) -> Result<()> {
        validate_mu(f, self.mu, self.mu_guard)?;
        if self.scales < MIN_SCALES {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_SCALES} scales, got {}",
                self.scales
            )));
        }
        if self.grid_points < 16 {
            return Err(Error::InvalidParameter(format!(
                "grid_points must be >= 16, got {}",
                self.grid_points
            )));
        }
        if let Some(b) = self.base_offset {
            if !(b > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "base offset must be positive, got {b}"
                )));
            }
        }
        Ok(())
    }
}

fn validate_mu(f: &FunctionSpec, mu: f64, guard: f64) -> Result<()> {
    let lo = CheckConfig::mu_lower(f);
    if !(mu > lo + guard && mu < 1.0 - guard) {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} outside ({lo}, 1) for k = {}, alpha = {}",
            f.k(),
            f.alpha()
        )));
    }
    Ok(())
}

/// `(f^mu)'(x)`: `mu f^{mu-1} f'` at positive points, 0 at declared zeros.
pub fn frac_power_deriv(f: &FunctionSpec, mu: f64, x: f64) -> Result<f64> {
    if f.is_declared_zero(x) {
        return Ok(0.0);
    }
    let fx = f.value(x);
    if fx > 0.0 {
        Ok(mu * fx.powf(mu - 1.0) * f.deriv(1, x))
    } else {
        Err(Error::InconsistentSpec(format!(
            "f({x}) = {fx} but {x} is not a declared zero"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderEstimate {
    /// Least-squares slope; `+inf` when the anchor is exactly flat.
    pub exponent_fit: f64,
    pub constant_fit: f64,
    pub r_squared: f64,
    pub scales_used: usize,
    pub anchor: f64,
    pub flat: bool,
    /// Samples excluded from the fit (zero increments or points where `f` vanished).
    pub dropped: usize,
}

/// Fits `|Δg| ≈ C offset^p` on log-log axes.
///
/// `constant_fit` is the smallest `C` with `|Δg| <= C offset^p` at every
/// retained scale.
pub fn holder_fit(anchor: f64, values: &[(f64, f64)]) -> Result<HolderEstimate> {
    if values.len() < MIN_SCALES {
        return Err(Error::InsufficientData {
            got: values.len(),
            need: MIN_SCALES,
        });
    }
    if let Some(&(h, _)) = values.iter().find(|(h, _)| !(*h > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "offset {h} is not positive"
        )));
    }
    let points: Vec<(f64, f64)> = values
        .iter()
        .filter(|(_, d)| d.abs() > 0.0 && d.is_finite())
        .map(|&(h, d)| (h.ln(), d.abs().ln()))
        .collect();
    let dropped = values.len() - points.len();
    if points.len() < MIN_SCALES {
        return Ok(HolderEstimate {
            exponent_fit: f64::INFINITY,
            constant_fit: 0.0,
            r_squared: 1.0,
            scales_used: points.len(),
            anchor,
            flat: true,
            dropped,
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxx, sxy, syy) = points
        .iter()
        .fold((0.0, 0.0, 0.0), |(sxx, sxy, syy), &(x, y)| {
            let (dx, dy) = (x - mean_x, y - mean_y);
            (sxx + dx * dx, sxy + dx * dy, syy + dy * dy)
        });
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all offsets coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let log_constant = points
        .iter()
        .map(|&(x, y)| y - slope * x)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(HolderEstimate {
        exponent_fit: slope,
        constant_fit: log_constant.exp(),
        r_squared,
        scales_used: points.len(),
        anchor,
        flat: false,
        dropped,
    })
}

/// Sample points `x ± base 2^{-i}` on each side of `x` that has room.
pub fn dyadic_points(f: &FunctionSpec, x: f64, cfg: &CheckConfig) -> Vec<f64> {
    let t = f.t_max();
    let base = cfg.base_offset.unwrap_or(DEFAULT_BASE_OFFSET);
    let floor = SCALE_FLOOR * t;
    let mut ys = Vec::with_capacity(2 * cfg.scales);
    for (room, sign) in [(t - x, 1.0), (x, -1.0)] {
        let b = base.min(room);
        if !(b > 0.0) {
            continue;
        }
        for i in 0..cfg.scales {
            let h = b * 0.5f64.powi(i as i32);
            if h < floor {
                break;
            }
            ys.push((x + sign * h).clamp(0.0, t));
        }
    }
    ys
}

/// A `(offset, |Δg|)` table with the number of points that had to be skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementSamples {
    pub anchor: f64,
    pub pairs: Vec<(f64, f64)>,
    pub dropped: usize,
}

fn increment_samples<G>(
    f: &FunctionSpec,
    x: f64,
    cfg: &CheckConfig,
    g: G,
) -> Result<IncrementSamples>
where
    G: Fn(f64) -> Result<f64>,
{
    let g0 = g(x)?;
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for y in dyadic_points(f, x, cfg) {
        if y == x {
            continue;
        }
        if !f.is_declared_zero(y) && !(f.value(y) > 0.0) {
            dropped += 1;
            continue;
        }
        pairs.push(((y - x).abs(), (g(y)? - g0).abs()));
    }
    Ok(IncrementSamples {
        anchor: x,
        pairs,
        dropped,
    })
}

/// Increments of `(f^mu)'` around `x` at dyadic scales.
pub fn fracpow_deriv_samples(
    f: &FunctionSpec,
    mu: f64,
    x: f64,
    cfg: &CheckConfig,
) -> Result<IncrementSamples> {
    increment_samples(f, x, cfg, |y| frac_power_deriv(f, mu, y))
}

/// Increments of `f^mu` around `x` at dyadic scales.
pub fn fracpow_samples(
    f: &FunctionSpec,
    mu: f64,
    x: f64,
    cfg: &CheckConfig,
) -> Result<IncrementSamples> {
    increment_samples(f, x, cfg, |y| Ok(f.value(y).max(0.0).powf(mu)))
}

fn fit_samples(samples: IncrementSamples) -> Result<HolderEstimate> {
    if samples.pairs.len() < MIN_SCALES {
        return Err(Error::InsufficientData {
            got: samples.pairs.len(),
            need: MIN_SCALES,
        });
    }
    let mut est = holder_fit(samples.anchor, &samples.pairs)?;
    est.dropped += samples.dropped;
    Ok(est)
}

/// Hölder fit of `(f^mu)'` at the declared zero `x`.
pub fn pointwise_holder_of_fracpow_deriv(
    f: &FunctionSpec,
    mu: f64,
    x: f64,
    cfg: &CheckConfig,
) -> Result<HolderEstimate> {
    if !f.is_declared_zero(x) {
        return Err(Error::Precondition(format!("{x} is not a declared zero")));
    }
    fit_samples(fracpow_deriv_samples(f, mu, x, cfg)?)
}

/// Power-law fit of `|f(y)^mu - f(x)^mu|` at the declared zero `x`; a slope
/// above 1 certifies `(f^mu)'(x) = 0`.
pub fn pointwise_growth_of_fracpow(
    f: &FunctionSpec,
    mu: f64,
    x: f64,
    cfg: &CheckConfig,
) -> Result<HolderEstimate> {
    if !f.is_declared_zero(x) {
        return Err(Error::Precondition(format!("{x} is not a declared zero")));
    }
    fit_samples(fracpow_samples(f, mu, x, cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCertificate {
    pub x: f64,
    pub constant: f64,
    /// `[c, d]` with `f >= f(x)/2` on its grid.
    pub window: (f64, f64),
}

fn uniform(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { b } else { a + step * i as f64 })
}

fn distinct(points: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = points.collect();
    v.dedup();
    v.len()
}

/// Sup of `|(f^mu)'(y) - (f^mu)'(x)| / |y - x|` over a window grid around
/// the positive point `x` and a uniform grid of the rest of `[0, T]`.
pub fn lipschitz_at_positive(
    f: &FunctionSpec,
    mu: f64,
    x: f64,
    cfg: &CheckConfig,
) -> Result<LipschitzCertificate> {
    let t = f.t_max();
    let fx = f.value(x);
    if !(fx > 0.0) {
        return Err(Error::Precondition(format!(
            "f({x}) = {fx} is not positive"
        )));
    }
    let n = cfg.grid_points.max(4);
    let mut half = x.max(t - x);
    let (c, d) = loop {
        let (c, d) = ((x - half).max(0.0), (x + half).min(t));
        if d - c < SCALE_FLOOR * t || distinct(uniform(c, d, n)) < 4 {
            return Err(Error::DegenerateWindow { x, width: d - c });
        }
        if uniform(c, d, n).all(|y| f.value(y) >= 0.5 * fx) {
            break (c, d);
        }
        half *= 0.5;
    };
    let gx = frac_power_deriv(f, mu, x)?;
    let mut constant: f64 = 0.0;
    let far = uniform(0.0, t, n).filter(|&y| y < c || y > d);
    for y in uniform(c, d, n).chain(far) {
        if y == x {
            continue;
        }
        let q = (frac_power_deriv(f, mu, y)? - gx).abs() / (y - x).abs();
        constant = constant.max(q);
    }
    Ok(LipschitzCertificate {
        x,
        constant,
        window: (c, d),
    })
}

/// Grid estimate of `sup |f^{(k)}(u) - f^{(k)}(v)| / |u - v|^alpha`.
///
/// The sample set is a uniform grid of `grid_points` nodes plus the points
/// `z ± T 2^{-i}` near each zero; the set grows with `grid_points` whenever
/// `grid_points - 1` is refined by an integer factor.
pub fn estimate_fk_holder_constant(f: &FunctionSpec, grid_points: usize) -> Result<f64> {
    if grid_points < 16 {
        return Err(Error::InvalidParameter(format!(
            "grid_points must be >= 16, got {grid_points}"
        )));
    }
    let t = f.t_max();
    let mut pts: Vec<f64> = uniform(0.0, t, grid_points).collect();
    let depth = grid_points.min(MAX_REFINEMENT);
    for &z in f.zeros() {
        pts.push(z);
        for i in 1..=depth {
            let h = t * 0.5f64.powi(i as i32);
            for y in [z - h, z + h] {
                if (0.0..=t).contains(&y) {
                    pts.push(y);
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let vals: Vec<f64> = pts.iter().map(|&u| f.top_deriv(u)).collect();
    let alpha = f.alpha();
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let q = (vals[j] - vals[i]).abs() / (pts[j] - pts[i]).powf(alpha);
            best = best.max(q);
        }
    }
    Ok(best)
}
