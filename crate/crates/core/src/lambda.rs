//! The weight integral
//!
//! ```text
//! Λ(r, Z) = Γ²(1/2+ir)/Γ(1+2ir) ∫₀^∞ g(a/y) y^{-3/2+ir} F(1/2+ir, 1/2+ir; 1+2ir; -y) dy,   a = 1/Z,
//! ```
//!
//! its spectral companion `Θ = ½ Re((1 + i/sinh πr) Λ)` and the ratio of
//! `|Λ|` to the envelope `Z(log r + |log Z|) + Z^{3/2} r`.
//!
//! The integral is taken in `u = log(y/a)`, so the support of `g(a/y)` is
//! `0 < u < log 2`, with composite Gauss–Legendre panels between the
//! points where `g` switches between its transition and plateau pieces.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::ComplexValue;
use crate::hyp2f1::PrefactoredF21;
use crate::quadrature::{gauss_panel, gl16};

pub const MIN_R: f64 = 1.0;
pub const MAX_R: f64 = 100.0;
pub const MIN_Z: f64 = 1e-3;
pub const MAX_Z: f64 = 10.0;
pub const MAX_DELTA: f64 = 0.125;
pub const DEFAULT_DELTA: f64 = 0.0625;
/// Relative change between successive panel doublings accepted as converged.
pub const LAMBDA_REL_TOL: f64 = 1e-9;
/// Worst relative change tolerated when the doubling cap is reached.
pub const LAMBDA_FAIL_TOL: f64 = 1e-7;
const MAX_DOUBLINGS: usize = 8;

/// Smooth characteristic function of `[1/2, 1]` with transition width `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff {
    delta: f64,
}

impl SmoothCutoff {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= MAX_DELTA) {
            return Err(Error::Domain(format!("delta = {delta}, need 0 < delta <= 1/8")));
        }
        Ok(SmoothCutoff { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g(&self, x: f64) -> f64 {
        smooth_g(x, *self)
    }
}

impl Default for SmoothCutoff {
    fn default() -> Self {
        SmoothCutoff { delta: DEFAULT_DELTA }
    }
}

fn bump(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

fn smoothstep(u: f64) -> f64 {
    let (a, b) = (bump(u), bump(1.0 - u));
    a / (a + b)
}

/// Exponential smoothstep ramp up on `[1/2, 1/2+δ]`, plateau, ramp down on `[1-δ, 1]`.
pub fn smooth_g(x: f64, cutoff: SmoothCutoff) -> f64 {
    let d = cutoff.delta;
    if !(x > 0.5 && x < 1.0) {
        0.0
    } else if x < 0.5 + d {
        smoothstep((x - 0.5) / d)
    } else if x > 1.0 - d {
        smoothstep((1.0 - x) / d)
    } else {
        1.0
    }
}

/// Spectral parameter and `Z = M/f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPoint {
    r: f64,
    z: f64,
}

impl LambdaPoint {
    /// Accepts `1 <= |r| <= 100` and `1e-3 <= Z <= 10`.
    pub fn new(r: f64, z: f64) -> Result<Self> {
        if !(MIN_R..=MAX_R).contains(&r.abs()) {
            return Err(Error::Domain(format!("r = {r}, need 1 <= |r| <= 100")));
        }
        if !(MIN_Z..=MAX_Z).contains(&z) {
            return Err(Error::Domain(format!("Z = {z}, need 1e-3 <= Z <= 10")));
        }
        Ok(LambdaPoint { r, z })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn a(&self) -> f64 {
        1.0 / self.z
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    pub value: ComplexValue,
    /// Change between the last two panel doublings.
    pub est_error: f64,
    pub doublings: usize,
}

/// Points in `u` where `g(e^{-u})` changes piece.
fn breakpoints(delta: f64) -> [f64; 4] {
    [0.0, -(1.0 - delta).ln(), -(0.5 + delta).ln(), std::f64::consts::LN_2]
}

/// `Λ` with the `y`-integral restricted to `[y_lo, y_hi]`.
///
/// The integrand is still multiplied by `g(a/y)`, so any window containing
/// `[a, 2a]` gives the same value.
pub fn lambda_over(p: LambdaPoint, cutoff: SmoothCutoff, y_lo: f64, y_hi: f64) -> Result<LambdaEstimate> {
    let a = p.a();
    if !(y_lo > 0.0 && y_lo < y_hi) {
        return Err(Error::Domain(format!("window [{y_lo}, {y_hi}]")));
    }
    let (u_lo, u_hi) = ((y_lo / a).ln(), (y_hi / a).ln());
    let mut cuts = vec![u_lo];
    cuts.extend(breakpoints(cutoff.delta).into_iter().filter(|&b| b > u_lo && b < u_hi));
    cuts.push(u_hi);

    let support_max = y_hi.min(2.0 * a);
    let evaluator = PrefactoredF21::new(p.r, support_max.max(a))?;
    let r = p.r;
    let ln_a = a.ln();
    let integrand = |u: f64| -> Result<Complex64> {
        let gv = smooth_g((-u).exp(), cutoff);
        if gv == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ln_y = ln_a + u;
        let power = (Complex64::new(-0.5, r) * ln_y).exp();
        Ok(evaluator.evaluate(ln_y.exp())?.value * power * gv)
    };

    // about two panels per half-period of y^{ir}
    let base: Vec<usize> = cuts
        .windows(2)
        .map(|w| ((r.abs() * (w[1] - w[0]) / std::f64::consts::PI).ceil() as usize).max(2))
        .collect();
    let rule = gl16();
    let mut previous: Option<Complex64> = None;
    let mut last_diff = f64::INFINITY;
    for level in 0..=MAX_DOUBLINGS {
        let mut total = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for (w, &n0) in cuts.windows(2).zip(&base) {
            let n = n0 << level;
            let h = (w[1] - w[0]) / n as f64;
            for k in 0..n {
                let lo = w[0] + k as f64 * h;
                let mut err = None;
                let panel: Complex64 = gauss_panel(rule, lo, lo + h, |u| match integrand(u) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                total += panel;
                magnitude += panel.norm();
            }
        }
        if let Some(prev) = previous {
            let diff = (total - prev).norm();
            // rounding floor for totals much smaller than their panels
            let floor = 1e-13 * magnitude;
            if diff <= LAMBDA_REL_TOL * total.norm() || diff <= floor {
                return Ok(LambdaEstimate { value: total, est_error: diff, doublings: level });
            }
            last_diff = diff;
        }
        previous = Some(total);
    }
    let total = previous.expect("at least one level");
    if last_diff <= LAMBDA_FAIL_TOL * total.norm() {
        return Ok(LambdaEstimate { value: total, est_error: last_diff, doublings: MAX_DOUBLINGS });
    }
    Err(Error::Convergence(format!(
        "lambda at r = {}, Z = {}: change {last_diff:e} after {MAX_DOUBLINGS} doublings",
        p.r, p.z
    )))
}

/// `Λ(r, Z)` and its convergence diagnostics.
pub fn lambda_estimate(p: LambdaPoint, cutoff: SmoothCutoff) -> Result<LambdaEstimate> {
    let a = p.a();
    lambda_over(p, cutoff, a, 2.0 * a)
}

pub fn lambda(p: LambdaPoint, cutoff: SmoothCutoff) -> Result<ComplexValue> {
    Ok(lambda_estimate(p, cutoff)?.value)
}

/// `½ Re((1 + i/sinh πr) Λ)`.
pub fn theta_from_lambda(r: f64, lambda: ComplexValue) -> f64 {
    0.5 * (lambda.re - lambda.im / (std::f64::consts::PI * r).sinh())
}

/// `Θ` for `r >= 1`.
pub fn theta(p: LambdaPoint, cutoff: SmoothCutoff) -> Result<f64> {
    if p.r < MIN_R {
        return Err(Error::Domain(format!("theta needs r >= 1, got {}", p.r)));
    }
    Ok(theta_from_lambda(p.r, lambda(p, cutoff)?))
}

/// `Z(log r + |log Z|) + Z^{3/2} r`.
pub fn lambda_envelope(r: f64, z: f64) -> f64 {
    z * (r.ln() + z.ln().abs()) + z.powf(1.5) * r
}

/// `|Λ(r, Z)|` over its envelope, for `r >= 2`.
pub fn lambda_bound_ratio(p: LambdaPoint, cutoff: SmoothCutoff) -> Result<f64> {
    if p.r < 2.0 {
        return Err(Error::Domain(format!("bound ratio needs r >= 2, got {}", p.r)));
    }
    Ok(lambda(p, cutoff)?.norm() / lambda_envelope(p.r, p.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cutoff_examples() {
        for d in [0.01, 0.0625, 0.125] {
            let c = SmoothCutoff::new(d).unwrap();
            assert_eq!(c.g(0.75), 1.0);
            assert_eq!(c.g(0.5), 0.0);
            assert_eq!(c.g(1.0), 0.0);
            assert!((c.g(0.5 + d / 2.0) - 0.5).abs() < 1e-15);
            assert!((c.g(1.0 - d / 2.0) - 0.5).abs() < 1e-15);
        }
        assert!(SmoothCutoff::new(0.0).is_err());
        assert!(SmoothCutoff::new(0.13).is_err());
        assert!(SmoothCutoff::new(f64::NAN).is_err());
        assert_eq!(SmoothCutoff::default().delta(), 1.0 / 16.0);
    }

    #[test]
    fn cutoff_is_smooth() {
        let c = SmoothCutoff::default();
        let h = 1e-4;
        let mut x = 0.45;
        let mut max_d1: f64 = 0.0;
        let mut max_d2: f64 = 0.0;
        while x < 1.05 {
            let (a, b, e) = (c.g(x - h), c.g(x), c.g(x + h));
            max_d1 = max_d1.max(((e - a) / (2.0 * h)).abs());
            max_d2 = max_d2.max(((e - 2.0 * b + a) / (h * h)).abs());
            x += 1e-3;
        }
        // w' peaks at 2/δ, w'' stays within a few hundred/δ²
        assert!(max_d1 < 2.5 / c.delta());
        assert!(max_d2 < 10.0 / (c.delta() * c.delta()));
    }

    proptest! {
        #[test]
        fn cutoff_bounds(x in -1.0f64..2.0, d in 1e-3f64..0.125) {
            let c = SmoothCutoff::new(d).unwrap();
            let g = c.g(x);
            prop_assert!((0.0..=1.0).contains(&g));
            if x <= 0.5 || x >= 1.0 { prop_assert_eq!(g, 0.0); }
            if (0.5 + d..=1.0 - d).contains(&x) { prop_assert_eq!(g, 1.0); }
        }
    }

    #[test]
    fn point_domain() {
        assert!(LambdaPoint::new(0.5, 1.0).is_err());
        assert!(LambdaPoint::new(101.0, 1.0).is_err());
        assert!(LambdaPoint::new(5.0, 1e-4).is_err());
        assert!(LambdaPoint::new(5.0, 11.0).is_err());
        let p = LambdaPoint::new(-5.0, 0.25).unwrap();
        assert_eq!(p.a(), 4.0);
    }

    #[test]
    fn conjugation() {
        let c = SmoothCutoff::default();
        for (r, z) in [(2.0, 1.0), (10.0, 0.1), (5.0, 5.0)] {
            let l = lambda(LambdaPoint::new(r, z).unwrap(), c).unwrap();
            let m = lambda(LambdaPoint::new(-r, z).unwrap(), c).unwrap();
            assert!((l - m.conj()).norm() <= 1e-9 * l.norm(), "r = {r}, Z = {z}");
        }
    }

    #[test]
    fn crude_envelope() {
        let c = SmoothCutoff::default();
        for (r, z) in [(2.0, 1.0), (10.0, 0.1), (20.0, 3.0)] {
            let p = LambdaPoint::new(r, z).unwrap();
            let a = p.a();
            let ev = PrefactoredF21::new(r, 2.0 * a).unwrap();
            let max_p = (0..=400)
                .map(|k| ev.evaluate(a * (1.0 + k as f64 / 400.0)).unwrap().value.norm())
                .fold(0.0, f64::max);
            let weight = 2.0 * (1.0 - 1.0 / 2f64.sqrt()) / a.sqrt();
            assert!(lambda(p, c).unwrap().norm() <= max_p * weight);
        }
    }

    #[test]
    fn reference_values() {
        // 25-digit mpmath quadrature of the defining integral
        let c = SmoothCutoff::default();
        let l = lambda(LambdaPoint::new(10.0, 0.1).unwrap(), c).unwrap();
        let expected = Complex64::new(0.041_085_965_991_773_737, 0.006_302_569_211_539_341_7);
        assert!((l - expected).norm() <= 1e-7 * expected.norm());
        let l = lambda(LambdaPoint::new(2.0, 1.0).unwrap(), c).unwrap();
        let expected = Complex64::new(-0.388_987_406_448_637_53, 0.316_104_221_381_662_07);
        assert!((l - expected).norm() <= 1e-7 * expected.norm());
        let t = theta(LambdaPoint::new(5.0, 0.5).unwrap(), c).unwrap();
        assert!((t - 0.090_545_436_679_312_783).abs() <= 1e-7 * t.abs());
    }

    #[test]
    fn support_exactness() {
        let c = SmoothCutoff::default();
        for (r, z) in [(3.0, 0.5), (10.0, 2.0)] {
            let p = LambdaPoint::new(r, z).unwrap();
            let a = p.a();
            let inner = lambda_over(p, c, a, 2.0 * a).unwrap().value;
            let outer = lambda_over(p, c, 0.5 * a, 4.0 * a).unwrap().value;
            assert!((inner - outer).norm() <= 1e-12 * inner.norm());
        }
    }

    #[test]
    fn theta_correction_is_negligible_at_large_r() {
        let p = LambdaPoint::new(20.0, 0.5).unwrap();
        let l = lambda(p, SmoothCutoff::default()).unwrap();
        let t = theta_from_lambda(20.0, l);
        assert!((t - 0.5 * l.re).abs() <= 1e-27 * l.norm());
        assert!(theta(LambdaPoint::new(-2.0, 1.0).unwrap(), SmoothCutoff::default()).is_err());
    }

    #[test]
    fn bound_ratio_domain() {
        let c = SmoothCutoff::default();
        assert!(lambda_bound_ratio(LambdaPoint::new(1.5, 1.0).unwrap(), c).is_err());
        let q = lambda_bound_ratio(LambdaPoint::new(2.0, 1.0).unwrap(), c).unwrap();
        assert!(q.is_finite() && q > 0.0);
    }
}
