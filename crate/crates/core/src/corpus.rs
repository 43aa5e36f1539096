//! Explicit function families with closed-form derivatives.
//!
//! Every family carries exact evaluators `d_j(x) = f^{(j)}(x)` for
//! `j = 0..=k`, a declared zero set and (when known) the Hölder constant of
//! `f^{(k)}`, so downstream numerics always have an analytic oracle.
//!
//! Zeros are declared by the constructor and never root-found.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Evaluates `f^{(j)}(x)` for a derivative order `j` and abscissa `x`.
pub type Evaluator = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Hölder exponent used for Example 1 when the caller does not choose one.
pub const DEFAULT_EXAMPLE1_ALPHA: f64 = 0.5;

/// Number of points on which `g > 0` is verified for Example 2.
const POSITIVITY_SAMPLES: usize = 1000;

/// The built-in families addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Example1,
    Example2Power,
    Example2,
    NegativeControl,
    /// A user-assembled spec (used by tests and synthetic checks).
    Custom,
}

impl Family {
    pub const BUILTIN: [Family; 4] = [
        Family::Example1,
        Family::Example2Power,
        Family::Example2,
        Family::NegativeControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Example1 => "example1",
            Family::Example2Power => "example2-power",
            Family::Example2 => "example2",
            Family::NegativeControl => "negative-control",
            Family::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::BUILTIN.into_iter().find(|f| f.name() == name)
    }

    /// Human-readable parameter domain, as listed by `fracreg corpus list`.
    pub fn parameter_domain(self) -> &'static str {
        match self {
            Family::Example1 => "k >= 2, alpha in (0,1), T in (0,1]",
            Family::Example2Power => "k >= 2, alpha in (0,1], T > 0",
            Family::Example2 => "k >= 2, alpha in (0,1], T > 0, j in 0..=k (g = x^j (1+x))",
            Family::NegativeControl => "k = 2, alpha = 1 (fixed), T > 0",
            Family::Custom => "user supplied",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A `C^{k,alpha}` function on `[0, T]` together with its derivatives.
#[derive(Clone)]
pub struct FunctionSpec {
    k: usize,
    alpha: f64,
    t_max: f64,
    eval: Evaluator,
    zeros: Vec<f64>,
    fk_holder_constant: Option<f64>,
    label: String,
    family: Family,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("label", &self.label)
            .field("k", &self.k)
            .field("alpha", &self.alpha)
            .field("t_max", &self.t_max)
            .field("zeros", &self.zeros)
            .field("fk_holder_constant", &self.fk_holder_constant)
            .finish()
    }
}

impl FunctionSpec {
    /// Assembles a spec from raw parts. The zero list is sorted; every zero
    /// must lie in `[0, T]`.
    pub fn new<F>(k: usize, alpha: f64, t_max: f64, zeros: Vec<f64>, eval: F) -> Result<Self>
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        validate_order_and_alpha(k, alpha)?;
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "T must be positive, got {t_max}"
            )));
        }
        let mut zeros = zeros;
        if let Some(z) = zeros.iter().find(|z| !(0.0..=t_max).contains(*z)) {
            return Err(Error::InvalidParameter(format!(
                "zero {z} outside [0, {t_max}]"
            )));
        }
        zeros.sort_by(f64::total_cmp);
        zeros.dedup();
        Ok(FunctionSpec {
            k,
            alpha,
            t_max,
            eval: Arc::new(eval),
            zeros,
            fk_holder_constant: None,
            label: "custom".to_string(),
            family: Family::Custom,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_holder_constant(mut self, c: f64) -> Self {
        self.fk_holder_constant = Some(c);
        self
    }

    fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn fk_holder_constant(&self) -> Option<f64> {
        self.fk_holder_constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `f^{(j)}(x)`.
    #[inline]
    pub fn deriv(&self, j: usize, x: f64) -> f64 {
        (self.eval)(j, x)
    }

    /// `f(x)`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(0, x)
    }

    /// `f^{(k)}(x)`.
    #[inline]
    pub fn top_deriv(&self, x: f64) -> f64 {
        (self.eval)(self.k, x)
    }

    /// Whether `x` is one of the declared zeros (exact comparison).
    pub fn is_declared_zero(&self, x: f64) -> bool {
        self.zeros.contains(&x)
    }
}

fn validate_order_and_alpha(k: usize, alpha: f64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "order k must be >= 2, got {k}"
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1], got {alpha}"
        )));
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `p(p-1)...(p-m+1)`.
fn falling_factorial(p: f64, m: usize) -> f64 {
    (0..m).map(|i| p - i as f64).product()
}

/// The coefficients `beta_0..beta_k` of Example 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Example1Coeffs {
    betas: Vec<BigRational>,
}

impl Example1Coeffs {
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn exact(&self, j: usize) -> &BigRational {
        &self.betas[j]
    }

    pub fn exact_all(&self) -> &[BigRational] {
        &self.betas
    }

    pub fn value(&self, j: usize) -> f64 {
        self.betas[j].to_f64().unwrap_or(f64::NAN)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.betas.len()).map(|j| self.value(j)).collect()
    }
}

/// `beta_0 = 0`, `beta_j = (beta_{j-1} + 1/(j+1)!) / (j+1)`, in exact
/// rational arithmetic.
pub fn example1_coeffs(k: usize) -> Result<Example1Coeffs> {
    if k < 1 {
        return Err(Error::InvalidParameter(format!(
            "example1_coeffs needs k >= 1, got {k}"
        )));
    }
    let mut betas = Vec::with_capacity(k + 1);
    betas.push(BigRational::zero());
    let mut fact = BigInt::from(1);
    for j in 1..=k {
        let n = BigInt::from(j + 1);
        fact *= &n;
        let inv_fact = BigRational::new(BigInt::from(1), fact.clone());
        let next = (&betas[j - 1] + inv_fact) / BigRational::from_integer(n);
        betas.push(next);
    }
    Ok(Example1Coeffs { betas })
}

/// Example 1 with the default Hölder exponent.
pub fn make_example1(k: usize, t_max: f64) -> Result<FunctionSpec> {
    make_example1_with_alpha(k, DEFAULT_EXAMPLE1_ALPHA, t_max)
}

/// `f(x) = -x^{k+1}/(k+1)! ln x + beta_k x^{k+1}` on `(0, T]`, `f(0) = 0`.
///
/// The derivatives follow the cascade
/// `d_j(x) = -x^m/m! ln x + beta_{k-j} x^m` with `m = k + 1 - j`, which ends
/// in `d_k(x) = -x ln x`. `alpha` must be strictly below 1: `-x ln x` is
/// `alpha`-Hölder only for `alpha < 1`.
pub fn make_example1_with_alpha(k: usize, alpha: f64, t_max: f64) -> Result<FunctionSpec> {
    validate_order_and_alpha(k, alpha)?;
    if alpha >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "example1 is only certified for alpha < 1, got {alpha}"
        )));
    }
    if !(t_max > 0.0 && t_max <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "example1 requires T in (0,1], got {t_max}"
        )));
    }
    let betas = example1_coeffs(k)?.values();
    let inv_fact: Vec<f64> = (0..=k + 1).map(|m| 1.0 / factorial(m)).collect();
    let eval = move |j: usize, x: f64| -> f64 {
        if j > k {
            return f64::NAN;
        }
        if x == 0.0 {
            return 0.0;
        }
        let m = k + 1 - j;
        let xm = x.powi(m as i32);
        -xm * inv_fact[m] * x.ln() + betas[k - j] * xm
    };
    Ok(FunctionSpec::new(k, alpha, t_max, vec![0.0], eval)?
        .with_label(format!("example1(k={k}, alpha={alpha}, T={t_max})"))
        .with_family(Family::Example1))
}

/// A smooth positive factor `g` supplied through its own derivative family.
#[derive(Clone)]
pub struct SmoothFactor {
    label: String,
    max_order: usize,
    eval: Evaluator,
}

impl fmt::Debug for SmoothFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFactor")
            .field("label", &self.label)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl SmoothFactor {
    /// `eval(i, x)` must return `g^{(i)}(x)` for `i <= max_order`.
    pub fn new<F>(label: impl Into<String>, max_order: usize, eval: F) -> Self
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        SmoothFactor {
            label: label.into(),
            max_order,
            eval: Arc::new(eval),
        }
    }

    /// `g(x) = sum_n coeffs[n] x^n`, with derivatives of every order.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let coeffs = coeffs.to_vec();
        let label = polynomial_label(&coeffs);
        let eval = move |i: usize, x: f64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .skip(i)
                .rev()
                .fold(0.0, |acc, (n, &c)| {
                    acc * x + c * falling_factorial(n as f64, i)
                })
        };
        SmoothFactor {
            label,
            max_order: usize::MAX,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(&[c])
    }

    /// `g(x) = x^j (1 + x)`: `g^{(i)}(0) = 0` for `i < j` and `g^{(j)}(0) = j!`.
    pub fn flat_of_order(j: usize) -> Self {
        let mut coeffs = vec![0.0; j + 2];
        coeffs[j] = 1.0;
        coeffs[j + 1] = 1.0;
        Self::polynomial(&coeffs)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    #[inline]
    pub fn deriv(&self, i: usize, x: f64) -> f64 {
        (self.eval)(i, x)
    }

    /// Index of the first derivative of `g` that does not vanish at 0.
    pub fn first_nonvanishing_order(&self, up_to: usize) -> Option<usize> {
        (0..=up_to.min(self.max_order)).find(|&i| self.deriv(i, 0.0) != 0.0)
    }
}

fn polynomial_label(coeffs: &[f64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(n, &c)| match n {
            0 => format!("{c}"),
            1 => format!("{c}*x"),
            _ => format!("{c}*x^{n}"),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// `f(x) = x^{k+alpha} g(x)`, differentiated with the Leibniz rule.
pub fn make_example2(k: usize, alpha: f64, g: SmoothFactor, t_max: f64) -> Result<FunctionSpec> {
    validate_order_and_alpha(k, alpha)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "T must be positive, got {t_max}"
        )));
    }
    if g.max_order < k {
        return Err(Error::InvalidParameter(format!(
            "g provides derivatives up to order {}, need {k}",
            g.max_order
        )));
    }
    for i in 1..=POSITIVITY_SAMPLES {
        let x = t_max * i as f64 / POSITIVITY_SAMPLES as f64;
        let gx = g.deriv(0, x);
        if !(gx > 0.0) {
            return Err(Error::HypothesisViolation(format!(
                "g must be positive on (0,T]; g({x}) = {gx}"
            )));
        }
    }
    let p = k as f64 + alpha;
    // falling[m] = p (p-1) ... (p-m+1)
    let falling: Vec<f64> = (0..=k).map(|m| falling_factorial(p, m)).collect();
    let binom: Vec<Vec<f64>> = (0..=k)
        .map(|j| (0..=j).map(|i| binomial(j, i)).collect())
        .collect();
    let label = format!("example2(k={k}, alpha={alpha}, g={}, T={t_max})", g.label);
    let eval = move |j: usize, x: f64| -> f64 {
        if j > k {
            return f64::NAN;
        }
        (0..=j)
            .map(|i| {
                let m = j - i;
                binom[j][i] * falling[m] * x.powf(p - m as f64) * g.deriv(i, x)
            })
            .sum()
    };
    Ok(FunctionSpec::new(k, alpha, t_max, vec![0.0], eval)?
        .with_label(label)
        .with_family(Family::Example2))
}

/// `f(x) = x^{k+alpha}`: Example 2 with `g = 1`.
///
/// The Hölder constant of `f^{(k)} = p_k x^alpha` is exactly
/// `p_k = (k+alpha)(k-1+alpha)...(1+alpha)` since `t -> t^alpha` is
/// `alpha`-Hölder with constant 1.
pub fn make_power(k: usize, alpha: f64, t_max: f64) -> Result<FunctionSpec> {
    let spec = make_example2(k, alpha, SmoothFactor::constant(1.0), t_max)?;
    let c = falling_factorial(k as f64 + alpha, k);
    Ok(spec
        .with_holder_constant(c)
        .with_label(format!("example2-power(k={k}, alpha={alpha}, T={t_max})"))
        .with_family(Family::Example2Power))
}

/// `f(x) = x^2` with `k = 2`, `alpha = 1`: `f''(0) = 2` breaks the flat-zero
/// hypothesis on purpose.
pub fn make_negative_control(t_max: f64) -> Result<FunctionSpec> {
    let eval = |j: usize, x: f64| -> f64 {
        match j {
            0 => x * x,
            1 => 2.0 * x,
            2 => 2.0,
            _ => f64::NAN,
        }
    };
    Ok(FunctionSpec::new(2, 1.0, t_max, vec![0.0], eval)?
        .with_holder_constant(0.0)
        .with_label(format!("negative-control(x^2, T={t_max})"))
        .with_family(Family::NegativeControl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn betas_match_hand_recursion() {
        let c = example1_coeffs(3).unwrap();
        assert_eq!(c.exact(0), &BigRational::zero());
        assert_eq!(c.exact(1), &rat(1, 4));
        assert_eq!(c.exact(2), &rat(5, 36));
        assert_eq!(c.exact(3), &rat(13, 288));
        assert!(c.values().iter().skip(1).all(|&b| b > 0.0));
    }

    #[test]
    fn betas_reject_order_zero() {
        assert!(matches!(
            example1_coeffs(0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn example1_cascade_cancels_linear_term() {
        // d_j = a_j x^m ln x + b_j x^m; differentiating maps
        // (a, b) -> (m a, a + m b) with m decreasing by one.
        for k in 2..=8 {
            let betas = example1_coeffs(k).unwrap();
            let mut fact = BigInt::one();
            for i in 2..=(k + 1) {
                fact *= BigInt::from(i);
            }
            let mut a = -BigRational::new(BigInt::one(), fact);
            let mut b = betas.exact(k).clone();
            for j in 0..k {
                let m = BigRational::from_integer(BigInt::from(k + 1 - j));
                let next_a = &m * &a;
                let next_b = &a + &m * &b;
                a = next_a;
                b = next_b;
                assert_eq!(b, betas.exact(k - j - 1).clone(), "k={k}, step {j}");
            }
            assert_eq!(a, -BigRational::one());
            assert!(b.is_zero());
        }
    }

    #[test]
    fn example1_values() {
        let f = make_example1(3, 1.0).unwrap();
        let expected = -0.5 * 0.5f64.ln();
        assert!((f.top_deriv(0.5) - expected).abs() < 1e-15);
        assert!((expected - 0.3465735903).abs() < 1e-10);
        for j in 0..=3 {
            assert_eq!(f.deriv(j, 0.0), 0.0);
        }
        let f2 = make_example1(2, 1.0).unwrap();
        assert!((f2.value(1.0) - 5.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn example1_rejects_bad_domain() {
        assert!(make_example1(2, 1.5).is_err());
        assert!(make_example1(2, 0.0).is_err());
        assert!(make_example1(1, 1.0).is_err());
        assert!(make_example1_with_alpha(2, 1.0, 1.0).is_err());
    }

    #[test]
    fn example2_leibniz_values() {
        let f = make_power(2, 0.5, 1.0).unwrap();
        for &t in &[0.01, 0.3, 0.9] {
            assert!((f.deriv(2, t) - 3.75 * t.sqrt()).abs() < 1e-14);
        }
        assert_eq!(f.value(0.0), 0.0);
        assert_eq!(f.fk_holder_constant(), Some(3.75));

        let g = make_example2(2, 0.5, SmoothFactor::polynomial(&[0.0, 1.0]), 1.0).unwrap();
        for &t in &[0.01, 0.3, 0.9] {
            assert!((g.value(t) - t.powf(3.5)).abs() < 1e-15);
            assert!((g.deriv(1, t) - 3.5 * t.powf(2.5)).abs() < 1e-14);
            assert!((g.deriv(2, t) - 8.75 * t.powf(1.5)).abs() < 1e-13);
        }
    }

    #[test]
    fn example2_rejects_nonpositive_factor() {
        let g = SmoothFactor::polynomial(&[1.0, -2.0]);
        assert!(matches!(
            make_example2(2, 0.5, g, 1.0),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn quartic_power() {
        let f = make_power(3, 1.0, 1.0).unwrap();
        assert!((f.value(0.7) - 0.7f64.powi(4)).abs() < 1e-15);
        assert!((f.deriv(3, 0.7) - 24.0 * 0.7).abs() < 1e-13);
        assert_eq!(f.fk_holder_constant(), Some(24.0));
    }

    #[test]
    fn negative_control_values() {
        let f = make_negative_control(1.0).unwrap();
        assert_eq!(f.deriv(2, 0.0), 2.0);
        assert_eq!(f.deriv(1, 0.0), 0.0);
        assert_eq!(f.value(0.0), 0.0);
        assert_eq!(f.zeros(), &[0.0]);
    }

    #[test]
    fn polynomial_factor_derivatives() {
        let g = SmoothFactor::flat_of_order(2); // x^2 + x^3
        assert_eq!(g.deriv(0, 2.0), 12.0);
        assert_eq!(g.deriv(1, 2.0), 16.0);
        assert_eq!(g.deriv(2, 2.0), 14.0);
        assert_eq!(g.deriv(3, 2.0), 6.0);
        assert_eq!(g.deriv(4, 2.0), 0.0);
        assert_eq!(g.first_nonvanishing_order(5), Some(2));
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::BUILTIN {
            assert_eq!(Family::from_name(fam.name()), Some(fam));
        }
        assert_eq!(Family::from_name("custom"), None);
    }

    #[test]
    fn power_scaling_is_constant() {
        for &(k, alpha) in &[(2usize, 0.5), (3, 0.9), (2, 1.0)] {
            let f = make_power(k, alpha, 1.0).unwrap();
            for j in 0..=k {
                let exponent = j as f64 - k as f64 - alpha;
                let reference = f.deriv(j, 0.5) * 0.5f64.powf(exponent);
                for i in 1..50 {
                    let t = i as f64 / 50.0;
                    let scaled = f.deriv(j, t) * t.powf(exponent);
                    assert!(((scaled - reference) / reference).abs() < 1e-12);
                }
            }
        }
    }
}
