//! Complex log-gamma and digamma.
//!
//! Both functions shift the argument upward with the functional equation
//! until `Re z >= 10` and then apply the Stirling expansion with Bernoulli
//! coefficients through `B_20`. The branch of `ln_gamma` is the one obtained
//! by summing principal logarithms, which is continuous along horizontal
//! lines in `Re z > 0` and matches the usual `loggamma` convention.
//!
//! Gamma ratios elsewhere in the crate are always formed as `exp` of
//! differences of `ln_gamma` values; the individual factors overflow long
//! before their ratios do.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The universal complex currency of the special-function code.
pub type ComplexValue = Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln(2π) / 2`
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Lower edge of the supported half-plane.
pub const MIN_RE: f64 = -20.0;

/// Largest supported `|Im z|`.
pub const MAX_IM: f64 = 1.0e6;

/// Real part above which the asymptotic series is applied directly.
const ASYMPTOTIC_RE: f64 = 10.0;

/// `B_{2k}` for k = 1..=10.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

fn check_domain(z: ComplexValue) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.re <= MIN_RE || z.im.abs() > MAX_IM {
        return Err(Error::Domain(format!(
            "{z} outside Re z > {MIN_RE}, |Im z| <= {MAX_IM}"
        )));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok(())
}

fn stirling_ln_gamma(w: ComplexValue) -> ComplexValue {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut power = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += power * (b / (two_k * (two_k - 1.0)));
        power *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

fn stirling_digamma(w: ComplexValue) -> ComplexValue {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut power = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += power * (b / two_k);
        power *= inv2;
    }
    w.ln() - 0.5 * inv - series
}

/// Principal-branch `ln Γ(z)` for `Re z > -20`, `|Im z| <= 1e6`.
pub fn ln_gamma(z: ComplexValue) -> Result<ComplexValue> {
    check_domain(z)?;
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < ASYMPTOTIC_RE {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling_ln_gamma(w) - shift)
}

/// Digamma `ψ(z) = Γ'(z)/Γ(z)` on the same domain as [`ln_gamma`].
pub fn digamma(z: ComplexValue) -> Result<ComplexValue> {
    check_domain(z)?;
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < ASYMPTOTIC_RE {
        shift += w.inv();
        w += 1.0;
    }
    Ok(stirling_digamma(w) - shift)
}

/// `|Γ(1/2 + it)|² = π / cosh(πt)`, evaluated without overflow for any `t`.
pub fn gamma_abs_sq_critical(t: f64) -> f64 {
    let e = (-2.0 * PI * t.abs()).exp();
    2.0 * PI * (-PI * t.abs()).exp() / (1.0 + e)
}
