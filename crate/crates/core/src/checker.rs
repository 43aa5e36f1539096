//! Hypothesis checks and verdict reports.
//!
//! Numerical failures at individual points are recorded in the report
//! instead of aborting it; only invalid parameters and violated
//! preconditions are returned as errors.

use serde::Serialize;

use crate::corpus::{make_example2, Family, FunctionSpec, SmoothFactor};
use crate::error::{Error, Result};
use crate::regularity::{
    dyadic_points, estimate_fk_holder_constant, lipschitz_at_positive, pointwise_growth_of_fracpow,
    pointwise_holder_of_fracpow_deriv, CheckConfig, HolderEstimate,
};
use crate::remainder::{corollary_chain_check, corollary_epsilon, nd_ratio, nd_ratio_sup};

/// The exponent formula implemented by [`check_theorem`].
pub const BETA_FORMULA: &str = "mu*(k+alpha)-1";

const NONNEG_GRID: usize = 4097;
const POSITIVE_POINTS: usize = 7;
/// Smallest offset of the `N/D` grid, relative to the room beside the zero.
const ND_GRID_DECADES: f64 = 6.0;
const POSITIVITY_GRID: usize = 1000;
const EXAMPLE2_LIMIT_T: f64 = 1.0;
const EXAMPLE2_LIMIT_DECADES: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesesFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub x: f64,
    pub order: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub nonneg_ok: bool,
    pub min_value: f64,
    pub zero_derivatives_ok: bool,
    pub violations: Vec<Violation>,
    pub fk_holder_estimate: f64,
    pub fk_holder_constant_known: Option<f64>,
    pub has_zero: bool,
}

impl HypothesisReport {
    pub fn all_ok(&self) -> bool {
        self.nonneg_ok && self.zero_derivatives_ok && self.has_zero
    }
}

fn nonneg_grid(f: &FunctionSpec, cfg: &CheckConfig) -> Vec<f64> {
    let t = f.t_max();
    let n = NONNEG_GRID - 1;
    let mut pts: Vec<f64> = (0..=n).map(|i| t * i as f64 / n as f64).collect();
    for &z in f.zeros() {
        pts.extend(dyadic_points(f, z, cfg));
    }
    pts
}

pub fn check_hypotheses(f: &FunctionSpec, cfg: &CheckConfig) -> HypothesisReport {
    let values: Vec<f64> = nonneg_grid(f, cfg)
        .into_iter()
        .map(|x| f.value(x))
        .collect();
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let nonneg_ok = min_value >= -cfg.nonneg_tol * scale;

    let violations: Vec<Violation> = f
        .zeros()
        .iter()
        .flat_map(|&x| {
            (0..=f.k()).filter_map(move |j| {
                let value = f.deriv(j, x);
                (value != 0.0).then_some(Violation { x, order: j, value })
            })
        })
        .collect();

    HypothesisReport {
        nonneg_ok,
        min_value,
        zero_derivatives_ok: violations.is_empty(),
        violations,
        fk_holder_estimate: estimate_fk_holder_constant(f, cfg.grid_points.max(16))
            .unwrap_or(f64::NAN),
        fk_holder_constant_known: f.fk_holder_constant(),
        has_zero: !f.zeros().is_empty(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub x: f64,
    /// Fit of `|f(y)^mu|`; a slope above 1 certifies `(f^mu)'(x) = 0`.
    pub differentiability: Option<HolderEstimate>,
    pub differentiability_ok: bool,
    pub holder_estimate: Option<HolderEstimate>,
    pub holder_ok: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveRecord {
    pub x: f64,
    pub lipschitz_constant: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub family: Family,
    pub label: String,
    pub k: usize,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
    pub mu: f64,
    pub beta_formula: &'static str,
    pub beta_raw: f64,
    pub beta_claimed: f64,
    pub exponent_margin: f64,
    pub hypotheses: HypothesisReport,
    pub zeros: Vec<ZeroRecord>,
    pub positives: Vec<PositiveRecord>,
    pub nd_sup: f64,
    pub nd_sup_fine: f64,
    pub nd_argmax: Option<(f64, f64)>,
    /// Grid-stability evidence for boundedness of `N/D` (numerical, not a proof).
    pub nd_bounded_ok: bool,
    pub errors: Vec<String>,
    pub verdict: Verdict,
}

fn flat_or_at_least(est: &HolderEstimate, target: f64, margin: f64) -> bool {
    est.flat || est.exponent_fit >= target - margin
}

fn zero_record(f: &FunctionSpec, x: f64, cfg: &CheckConfig, beta_claimed: f64) -> ZeroRecord {
    let growth_target = cfg.mu * (f.k() as f64 + f.alpha());
    let mut errors = Vec::new();
    let differentiability = pointwise_growth_of_fracpow(f, cfg.mu, x, cfg)
        .map_err(|e| errors.push(format!("differentiability: {e}")))
        .ok();
    let holder_estimate = pointwise_holder_of_fracpow_deriv(f, cfg.mu, x, cfg)
        .map_err(|e| errors.push(format!("holder: {e}")))
        .ok();
    ZeroRecord {
        x,
        differentiability_ok: differentiability
            .as_ref()
            .is_some_and(|e| flat_or_at_least(e, growth_target, cfg.exponent_margin)),
        differentiability,
        holder_ok: holder_estimate
            .as_ref()
            .is_some_and(|e| flat_or_at_least(e, beta_claimed, cfg.exponent_margin)),
        holder_estimate,
        error: (!errors.is_empty()).then(|| errors.join("; ")),
    }
}

/// Witness points for the Lipschitz conclusion: log-spaced in
/// `(largest zero, T]`.
pub fn positive_sample_points(f: &FunctionSpec) -> Vec<f64> {
    let z = f.zeros().last().copied().unwrap_or(0.0);
    let room = f.t_max() - z;
    if !(room > 0.0) {
        return Vec::new();
    }
    (0..POSITIVE_POINTS)
        .map(|i| {
            let e = -3.0 + 3.0 * i as f64 / (POSITIVE_POINTS - 1) as f64;
            if i + 1 == POSITIVE_POINTS {
                f.t_max()
            } else {
                z + room * 10f64.powf(e)
            }
        })
        .collect()
}

/// Log-spaced positive points beside each zero, spanning six decades.
pub fn nd_grid(f: &FunctionSpec, n: usize) -> Vec<f64> {
    let t = f.t_max();
    let n = n.max(2);
    let mut ys = Vec::new();
    for &z in f.zeros() {
        for (room, sign) in [(t - z, 1.0), (z, -1.0)] {
            if !(room > 0.0) {
                continue;
            }
            for i in 0..n {
                let h = if i + 1 == n {
                    room
                } else {
                    room * 10f64.powf(-ND_GRID_DECADES * (1.0 - i as f64 / (n - 1) as f64))
                };
                ys.push(z + sign * h);
            }
        }
    }
    ys.retain(|&y| !f.is_declared_zero(y) && f.value(y) > 0.0);
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    ys
}

fn positive_record(f: &FunctionSpec, x: f64, cfg: &CheckConfig) -> PositiveRecord {
    match lipschitz_at_positive(f, cfg.mu, x, cfg) {
        Ok(c) => PositiveRecord {
            x,
            lipschitz_constant: Some(c.constant),
            window: Some(c.window),
            ok: c.constant.is_finite(),
            error: None,
        },
        Err(e) => PositiveRecord {
            x,
            lipschitz_constant: None,
            window: None,
            ok: false,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every conclusion of the theorem on `f` at exponent `cfg.mu`.
///
/// When a hypothesis fails the diagnostics are still computed, so the report
/// shows whether the conclusion fails too, but the verdict is
/// [`Verdict::HypothesesFailed`].
pub fn check_theorem(f: &FunctionSpec, cfg: &CheckConfig) -> Result<TheoremReport> {
    cfg.validate(f)?;
    let hypotheses = check_hypotheses(f, cfg);
    let beta_raw = cfg.beta_raw(f);
    let beta_claimed = beta_raw.min(1.0);

    let zeros: Vec<ZeroRecord> = f
        .zeros()
        .iter()
        .map(|&x| zero_record(f, x, cfg, beta_claimed))
        .collect();
    let positives: Vec<PositiveRecord> = positive_sample_points(f)
        .into_iter()
        .filter(|&x| f.value(x) > 0.0)
        .map(|x| positive_record(f, x, cfg))
        .collect();

    let mut errors = Vec::new();
    let mut nd_sup = f64::NAN;
    let mut nd_sup_fine = f64::NAN;
    let mut nd_argmax = None;
    if hypotheses.has_zero {
        let coarse = nd_grid(f, cfg.grid_points);
        let fine = nd_grid(f, 2 * cfg.grid_points - 1);
        match (
            nd_ratio_sup(f, &coarse, &cfg.quad),
            nd_ratio_sup(f, &fine, &cfg.quad),
        ) {
            (Ok(c), Ok(fi)) => {
                nd_sup = c.sup;
                nd_sup_fine = fi.sup;
                nd_argmax = Some(c.argmax);
            }
            (Err(e), _) | (_, Err(e)) => errors.push(format!("nd_sup: {e}")),
        }
    }
    let nd_bounded_ok = nd_sup.is_finite() && nd_sup_fine <= cfg.nd_stability * nd_sup;

    let conclusions_ok = zeros.iter().all(|z| z.differentiability_ok && z.holder_ok)
        && positives.iter().all(|p| p.ok)
        && nd_bounded_ok;
    let verdict = if !hypotheses.all_ok() {
        Verdict::HypothesesFailed
    } else if conclusions_ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    };

    Ok(TheoremReport {
        family: f.family(),
        label: f.label().to_string(),
        k: f.k(),
        alpha: f.alpha(),
        t_max: f.t_max(),
        mu: cfg.mu,
        beta_formula: BETA_FORMULA,
        beta_raw,
        beta_claimed,
        exponent_margin: cfg.exponent_margin,
        hypotheses,
        zeros,
        positives,
        nd_sup,
        nd_sup_fine,
        nd_argmax,
        nd_bounded_ok,
        errors,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonSample {
    pub y: f64,
    pub epsilon: Option<f64>,
    pub chain_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub family: Family,
    pub label: String,
    pub k: usize,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
    pub mu: f64,
    pub eta: f64,
    pub beta_raw: f64,
    pub beta_claimed: f64,
    pub positivity_ok: bool,
    /// `min f^{(k)}` over the grid of `(0, eta]`.
    pub min_top_deriv_near: f64,
    /// `min f^{(k)}` over the grid of `[eta, T]`.
    pub min_top_deriv_far: f64,
    pub epsilon_samples: Vec<EpsilonSample>,
    pub chain_ok: bool,
    pub nd_sup_coarse: f64,
    pub nd_sup_fine: f64,
    pub nd_bounded_ok: bool,
    pub holder_at_zero: Option<HolderEstimate>,
    pub holder_ok: bool,
    pub errors: Vec<String>,
    pub verdict: Verdict,
}

fn log_grid(t: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                t
            } else {
                t * 10f64.powf(-ND_GRID_DECADES * (1.0 - i as f64 / (n - 1) as f64))
            }
        })
        .collect()
}

fn sup_ratio_on(f: &FunctionSpec, ys: &[f64], cfg: &CheckConfig) -> Result<f64> {
    ys.iter().try_fold(f64::NEG_INFINITY, |m, &y| {
        nd_ratio(f, 0.0, y, &cfg.quad).map(|r| m.max(r))
    })
}

/// Checks the corollary for a spec whose only zero is `0`.
pub fn check_corollary(f: &FunctionSpec, eta: f64, cfg: &CheckConfig) -> Result<CorollaryReport> {
    if f.zeros() != [0.0] {
        return Err(Error::Precondition(format!(
            "corollary needs zeros = [0], got {:?}",
            f.zeros()
        )));
    }
    let t = f.t_max();
    if !(eta > 0.0 && eta < t) {
        return Err(Error::InvalidParameter(format!(
            "eta must lie in (0, {t}), got {eta}"
        )));
    }
    cfg.validate(f)?;
    let beta_raw = cfg.beta_raw(f);
    let beta_claimed = beta_raw.min(1.0);
    let mut errors = Vec::new();

    let near = (1..=POSITIVITY_GRID)
        .map(|i| eta * i as f64 / POSITIVITY_GRID as f64)
        .chain(log_grid(eta, cfg.grid_points));
    let min_top_deriv_near = near.map(|u| f.top_deriv(u)).fold(f64::INFINITY, f64::min);
    let min_top_deriv_far = (0..=POSITIVITY_GRID)
        .map(|i| f.top_deriv(eta + (t - eta) * i as f64 / POSITIVITY_GRID as f64))
        .fold(f64::INFINITY, f64::min);
    let positivity_ok = min_top_deriv_near > 0.0 && min_top_deriv_far >= -1e-12;

    let ys = log_grid(t, cfg.grid_points);
    let epsilon_samples: Vec<EpsilonSample> = ys
        .iter()
        .map(|&y| {
            let eps = corollary_epsilon(f, y, &cfg.quad);
            let chain = eps
                .clone()
                .and_then(|e| corollary_chain_check(f, y, e, &cfg.quad));
            if let Err(e) = &chain {
                errors.push(format!("chain at y = {y}: {e}"));
            }
            EpsilonSample {
                y,
                epsilon: eps.ok(),
                chain_ok: chain.unwrap_or(false),
            }
        })
        .collect();
    let chain_ok = epsilon_samples
        .iter()
        .all(|s| s.chain_ok && s.epsilon.is_some_and(|e| e > 0.0));

    let mut nd_sup_coarse = f64::NAN;
    let mut nd_sup_fine = f64::NAN;
    match (
        sup_ratio_on(f, &ys, cfg),
        sup_ratio_on(f, &log_grid(t, 2 * cfg.grid_points - 1), cfg),
    ) {
        (Ok(c), Ok(fi)) => {
            nd_sup_coarse = c;
            nd_sup_fine = fi;
        }
        (Err(e), _) | (_, Err(e)) => errors.push(format!("nd_sup: {e}")),
    }
    let nd_bounded_ok =
        nd_sup_coarse.is_finite() && nd_sup_fine <= cfg.nd_stability * nd_sup_coarse;

    let holder_at_zero = pointwise_holder_of_fracpow_deriv(f, cfg.mu, 0.0, cfg)
        .map_err(|e| errors.push(format!("holder: {e}")))
        .ok();
    let holder_ok = holder_at_zero
        .as_ref()
        .is_some_and(|e| flat_or_at_least(e, beta_claimed, cfg.exponent_margin));

    let verdict = if positivity_ok && chain_ok && nd_bounded_ok && holder_ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CorollaryReport {
        family: f.family(),
        label: f.label().to_string(),
        k: f.k(),
        alpha: f.alpha(),
        t_max: t,
        mu: cfg.mu,
        eta,
        beta_raw,
        beta_claimed,
        positivity_ok,
        min_top_deriv_near,
        min_top_deriv_far,
        epsilon_samples,
        chain_ok,
        nd_sup_coarse,
        nd_sup_fine,
        nd_bounded_ok,
        holder_at_zero,
        holder_ok,
        errors,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitClass {
    Positive,
    Zero,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example2LimitReport {
    pub k: usize,
    pub alpha: f64,
    pub g: String,
    pub j: usize,
    pub ratio_samples: Vec<(f64, f64)>,
    pub limit_class: LimitClass,
    pub extrapolated_l: f64,
}

/// Classifies the limit of `N(0,y)/D(0,y)` for `f = x^{k+alpha} g` along
/// `y = 10^{-i}`, `i = 1..=8`.
pub fn check_example2_limit(
    k: usize,
    alpha: f64,
    g: SmoothFactor,
    j: usize,
    cfg: &CheckConfig,
) -> Result<Example2LimitReport> {
    if j > k {
        return Err(Error::InvalidParameter(format!("j = {j} exceeds k = {k}")));
    }
    if g.max_order() < j {
        return Err(Error::InvalidParameter(format!(
            "g has no derivative of order {j}"
        )));
    }
    if let Some(i) = (0..j).find(|&i| g.deriv(i, 0.0) != 0.0) {
        return Err(Error::Precondition(format!(
            "g^({i})(0) = {} is not zero",
            g.deriv(i, 0.0)
        )));
    }
    if g.deriv(j, 0.0) == 0.0 {
        return Err(Error::Precondition(format!("g^({j})(0) vanishes")));
    }
    let g_label = g.label().to_string();
    let f = make_example2(k, alpha, g, EXAMPLE2_LIMIT_T)?;
    let ratio_samples = (1..=EXAMPLE2_LIMIT_DECADES)
        .map(|i| {
            let y = 10f64.powi(-i);
            nd_ratio(&f, 0.0, y, &cfg.quad).map(|r| (y, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let r: Vec<f64> = ratio_samples.iter().map(|s| s.1).collect();
    let (first, last, prev) = (r[0], r[r.len() - 1], r[r.len() - 2]);
    let decreasing_tail = r[r.len() - 3..].windows(2).all(|w| w[1] < w[0]);
    let (limit_class, extrapolated_l) = if last < cfg.limit_zero_decay * first && decreasing_tail {
        (LimitClass::Zero, 0.0)
    } else if (last - prev).abs() <= cfg.limit_stabilization * prev.abs() && last > cfg.limit_floor
    {
        (LimitClass::Positive, last)
    } else {
        (LimitClass::Indeterminate, last)
    };
    Ok(Example2LimitReport {
        k,
        alpha,
        g: g_label,
        j,
        ratio_samples,
        limit_class,
        extrapolated_l,
    })
}
