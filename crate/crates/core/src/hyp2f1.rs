//! The balanced Gauss hypergeometric function
//! `F(1/2 + ir, 1/2 + ir; 1 + 2ir; -y)` and its gamma-prefactored form
//! `Γ²(1/2 + ir) / Γ(1 + 2ir) · F`.
//!
//! Three backends cover `y ∈ (0, 1e6]` with overlapping ranges so each can
//! be checked against its neighbour:
//!
//! * [`f21_series`]: the defining power series, `y < 0.9`;
//! * [`f21_pfaff`]: the Pfaff-transformed series at `y / (1 + y)`, `y <= 50`;
//! * [`f21_mellin_barnes`]: trapezoid quadrature of the Mellin–Barnes
//!   integral on `Re s = -1/4`, `y >= 0.1`.
//!
//! For `|r|` in the tens the series terms grow like `e^{r y / 2}` before
//! cancelling to O(1), so both series backends accumulate in double-double
//! arithmetic. [`asymptotic_main`] gives the large-`y` main term obtained by
//! moving the Mellin–Barnes contour past the double pole at
//! `s = -1/2 - ir`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dd::{ComplexDd, Dd};
use crate::error::{Error, Result};
use crate::gamma::{digamma, ln_gamma, ComplexValue, EULER_GAMMA};
use crate::quadrature::LineKernel;

/// Largest supported `|r|`.
pub const MAX_R: f64 = 100.0;
/// Largest supported `y`.
pub const MAX_Y: f64 = 1.0e6;
/// Series termination threshold relative to the partial sum.
const SERIES_REL_TOL: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 1_000_000;
/// Abscissa of the Mellin–Barnes contour, midway between the pole lines
/// `Re s = -1/2` and `Re s = 0`.
pub const MB_ABSCISSA: f64 = -0.25;
/// Accuracy the dispatcher guarantees or reports as an error.
pub const PREFACTORED_REL_TOL: f64 = 1e-7;

/// Argument of the balanced function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypPoint {
    r: f64,
    y: f64,
}

impl HypPoint {
    pub fn new(r: f64, y: f64) -> Result<Self> {
        if !r.is_finite() || r.abs() > MAX_R {
            return Err(Error::Domain(format!("spectral parameter r = {r}, need |r| <= {MAX_R}")));
        }
        if !(y > 0.0 && y <= MAX_Y) {
            return Err(Error::Domain(format!("y = {y}, need 0 < y <= {MAX_Y}")));
        }
        Ok(HypPoint { r, y })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Which method produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Series,
    Pfaff,
    MellinBarnes,
    Asymptotic,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Series => "series",
            Backend::Pfaff => "pfaff",
            Backend::MellinBarnes => "mellin_barnes",
            Backend::Asymptotic => "asymptotic",
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: ComplexValue,
    pub est_error: f64,
    pub backend: Backend,
}

/// Switch-over points of the dispatcher in [`prefactored_f21`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackendThresholds {
    /// Below this `y` the plain series is used.
    pub series_below: f64,
    /// Below this `y` (and at or above `series_below`) the Pfaff series is used;
    /// Mellin–Barnes quadrature above.
    pub pfaff_below: f64,
}

impl Default for BackendThresholds {
    fn default() -> Self {
        BackendThresholds { series_below: 0.9, pfaff_below: 50.0 }
    }
}

fn spectral(r: f64) -> (ComplexDd, ComplexDd) {
    let a = ComplexDd::from_c64(Complex64::new(0.5, r));
    let c = ComplexDd::from_c64(Complex64::new(1.0, 2.0 * r));
    (a, c)
}

/// `Σ (a)_k (b)_k / ((c)_k k!) z^k` with Pochhammer ratios built term by term.
/// Returns the sum and the magnitude of the final term plus a rounding floor.
fn gauss_series(a: ComplexDd, b: ComplexDd, c: ComplexDd, z: ComplexDd) -> Result<(Complex64, f64)> {
    let mut term = ComplexDd::ONE;
    let mut sum = ComplexDd::ONE;
    let mut max_term: f64 = 1.0;
    let mut small_run = 0;
    for k in 0..SERIES_MAX_TERMS {
        let kd = ComplexDd::from_c64(Complex64::new(k as f64, 0.0));
        let num = (a + kd) * (b + kd) * z;
        let den = (c + kd).scale(Dd::from_f64(k as f64 + 1.0));
        term = term * num / den;
        sum = sum + term;
        let size = term.norm_hi();
        max_term = max_term.max(size);
        if size <= SERIES_REL_TOL * sum.norm_hi() {
            small_run += 1;
            if small_run == 2 {
                return Ok((sum.to_c64(), size + 1e-30 * max_term));
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Convergence(format!("hypergeometric series: {SERIES_MAX_TERMS} terms")))
}

/// Direct power series for `y < 0.9`.
pub fn f21_series(p: HypPoint) -> Result<EvalResult> {
    if p.y >= 0.9 {
        return Err(Error::Domain(format!("series backend needs y < 0.9, got {}", p.y)));
    }
    let (a, c) = spectral(p.r);
    let z = ComplexDd::from_c64(Complex64::new(-p.y, 0.0));
    let (value, est_error) = gauss_series(a, a, c, z)?;
    Ok(EvalResult { value, est_error, backend: Backend::Series })
}

/// Pfaff transformation `F(a,b;c;-y) = (1+y)^{-a} F(a, c-b; c; y/(1+y))`, `y <= 50`.
pub fn f21_pfaff(p: HypPoint) -> Result<EvalResult> {
    if p.y > 50.0 {
        return Err(Error::Domain(format!("Pfaff backend needs y <= 50, got {}", p.y)));
    }
    let (a, c) = spectral(p.r);
    // c - b = 1/2 + ir = a
    let y = Dd::from_f64(p.y);
    let x = y / (Dd::ONE + y);
    let (sum, err) = gauss_series(a, a, c, ComplexDd::new(x, Dd::ZERO))?;
    let factor = (-Complex64::new(0.5, p.r) * p.y.ln_1p()).exp();
    Ok(EvalResult {
        value: factor * sum,
        est_error: factor.norm() * err,
        backend: Backend::Pfaff,
    })
}

/// `Γ²(1/2 + ir) / Γ(1 + 2ir)` as an exponentiated log-gamma difference.
pub fn gamma_prefactor(r: f64) -> Result<ComplexValue> {
    let lg_a = ln_gamma(Complex64::new(0.5, r))?;
    let lg_c = ln_gamma(Complex64::new(1.0, 2.0 * r))?;
    Ok((2.0 * lg_a - lg_c).exp())
}

/// Base trapezoid step for the Mellin–Barnes and related line integrals.
pub fn line_step(y: f64) -> f64 {
    0.05f64.min(PI / (8.0 * (1.0 + y.ln().abs())))
}

/// Truncation radius in `t = Im s` for the Mellin–Barnes and related line integrals.
pub fn line_truncation(r: f64, y: f64) -> f64 {
    2.0 * r.abs() + 40.0 + 8.0 * y.ln_1p()
}

type Factor = Box<dyn Fn(f64) -> Result<Complex64> + Send + Sync>;

/// Mellin–Barnes integrand factors for one `r`, reusable across all
/// `y <= y_max`.
pub struct MellinBarnesKernel {
    r: f64,
    line: LineKernel<Factor>,
}

impl MellinBarnesKernel {
    /// Kernel whose step and truncation are adequate for every `y` in `[0.1, y_max]`.
    pub fn new(r: f64, y_max: f64) -> Result<Self> {
        if r.abs() < 0.01 || r.abs() > MAX_R {
            return Err(Error::Domain(format!("Mellin–Barnes backend needs 0.01 <= |r| <= {MAX_R}, got {r}")));
        }
        let ir = Complex64::new(0.0, r);
        let factor: Factor = Box::new(move |t: f64| {
            let s = Complex64::new(MB_ABSCISSA, t);
            let lg = 2.0 * ln_gamma(0.5 + ir + s)? + ln_gamma(-s)? - ln_gamma(1.0 + 2.0 * ir + s)?;
            Ok(lg.exp())
        });
        // line_step(y) >= 0.05 on [0.1, 1], so the step for y_max covers the range
        let step = line_step(y_max);
        let line = LineKernel::new(MB_ABSCISSA, line_truncation(r, y_max), step, factor);
        Ok(MellinBarnesKernel { r, line })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn evaluate(&self, y: f64) -> Result<EvalResult> {
        if !(0.1..=MAX_Y).contains(&y) {
            return Err(Error::Domain(format!("Mellin–Barnes backend needs 0.1 <= y <= {MAX_Y}, got {y}")));
        }
        let est = self.line.evaluate(y)?;
        Ok(EvalResult { value: est.value, est_error: est.est_error, backend: Backend::MellinBarnes })
    }

    /// Trapezoid value after `halvings` refinements (no convergence test).
    pub fn estimate_at_level(&self, y: f64, halvings: usize) -> Result<ComplexValue> {
        self.line.estimate_at_level(y, halvings)
    }
}

/// Prefactored value `Γ²(1/2+ir)/Γ(1+2ir) · F` as a Mellin–Barnes integral
/// on `Re s = -1/4`; needs `y >= 0.1` and `|r| >= 0.01`.
pub fn f21_mellin_barnes(p: HypPoint) -> Result<EvalResult> {
    MellinBarnesKernel::new(p.r, p.y)?.evaluate(p.y)
}

/// `log y + 2ψ(1) - 2ψ(1/2 + ir)`, the bracket of the large-`y` main term.
pub fn corollary_bracket(r: f64, y: f64) -> Result<ComplexValue> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("y = {y}")));
    }
    let psi = digamma(Complex64::new(0.5, r))?;
    Ok(Complex64::new(y.ln() - 2.0 * EULER_GAMMA, 0.0) - 2.0 * psi)
}

/// Main term `y^{-1/2-ir} (log y + 2ψ(1) - 2ψ(1/2+ir))` of the prefactored
/// function for `y > 1`; the remainder is `O(r / y)`.
pub fn asymptotic_main(p: HypPoint) -> Result<ComplexValue> {
    if p.y <= 1.0 {
        return Err(Error::Domain(format!("asymptotic form needs y > 1, got {}", p.y)));
    }
    let power = (-Complex64::new(0.5, p.r) * p.y.ln()).exp();
    Ok(power * corollary_bracket(p.r, p.y)?)
}

/// The unprefactored `F` via the series or Pfaff backend (`y <= 50`).
pub fn hyp2f1(p: HypPoint) -> Result<EvalResult> {
    if p.y < BackendThresholds::default().series_below {
        f21_series(p)
    } else {
        f21_pfaff(p)
    }
}

/// Prefactored-value evaluator for a fixed `r` over a range of `y`, sharing
/// the gamma prefactor and the Mellin–Barnes kernel between calls.
pub struct PrefactoredF21 {
    r: f64,
    prefactor: ComplexValue,
    thresholds: BackendThresholds,
    kernel: Option<MellinBarnesKernel>,
}

impl PrefactoredF21 {
    /// Evaluator valid for `y <= y_max`.
    pub fn new(r: f64, y_max: f64) -> Result<Self> {
        Self::with_thresholds(r, y_max, BackendThresholds::default())
    }

    pub fn with_thresholds(r: f64, y_max: f64, thresholds: BackendThresholds) -> Result<Self> {
        HypPoint::new(r, y_max)?;
        let kernel = if y_max >= thresholds.pfaff_below {
            Some(MellinBarnesKernel::new(r, y_max)?)
        } else {
            None
        };
        Ok(PrefactoredF21 { r, prefactor: gamma_prefactor(r)?, thresholds, kernel })
    }

    pub fn evaluate(&self, y: f64) -> Result<EvalResult> {
        let p = HypPoint::new(self.r, y)?;
        let res = if y < self.thresholds.series_below {
            let e = f21_series(p)?;
            EvalResult { value: self.prefactor * e.value, est_error: self.prefactor.norm() * e.est_error, ..e }
        } else if y < self.thresholds.pfaff_below {
            let e = f21_pfaff(p)?;
            EvalResult { value: self.prefactor * e.value, est_error: self.prefactor.norm() * e.est_error, ..e }
        } else {
            match &self.kernel {
                Some(k) => k.evaluate(y)?,
                None => return Err(Error::Domain(format!("y = {y} beyond evaluator range"))),
            }
        };
        if !(res.est_error <= PREFACTORED_REL_TOL * res.value.norm()) {
            return Err(Error::Convergence(format!(
                "prefactored F at r = {}, y = {y}: error estimate {:e} vs |value| {:e}",
                self.r,
                res.est_error,
                res.value.norm()
            )));
        }
        Ok(res)
    }
}

/// `Γ²(1/2+ir)/Γ(1+2ir) · F(1/2+ir, 1/2+ir; 1+2ir; -y)`, dispatched by `y`.
pub fn prefactored_f21(p: HypPoint) -> Result<EvalResult> {
    PrefactoredF21::new(p.r, p.y)?.evaluate(p.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(r: f64, y: f64) -> HypPoint {
        HypPoint::new(r, y).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn point_validation() {
        assert!(HypPoint::new(0.0, 0.0).is_err());
        assert!(HypPoint::new(101.0, 1.0).is_err());
        assert!(HypPoint::new(1.0, 2e6).is_err());
        assert!(HypPoint::new(f64::NAN, 1.0).is_err());
        assert!(HypPoint::new(-100.0, 1e6).is_ok());
    }

    #[test]
    fn series_near_origin() {
        for r in [0.0, 3.0, -40.0] {
            let v = f21_series(pt(r, 1e-12)).unwrap().value;
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn series_is_real_at_r_zero() {
        let v = f21_series(pt(0.0, 0.5)).unwrap();
        assert!(v.value.im.abs() <= 1e-14);
        assert!((v.value.re - 0.901_286_299_360_447_3).abs() < 1e-14);
        assert_eq!(v.backend, Backend::Series);
    }

    // Reference values from 40-digit mpmath `hyp2f1`.
    #[test]
    fn unprefactored_reference_values() {
        let table = [
            (1.0, 0.5, Complex64::new(0.882_292_374_258_128, -0.189_630_490_015_073_95)),
            (0.0, 3.0, Complex64::new(0.686_440_250_309_175_1, 0.0)),
            (2.0, 0.3, Complex64::new(0.902_257_046_331_034_5, -0.250_224_142_233_117_76)),
            (50.0, 0.8, Complex64::new(-0.861_657_972_098_373_7, 0.053_835_122_817_950_26)),
            (10.0, 40.0, Complex64::new(0.207_221_555_551_883_22, -0.334_013_266_929_896_9)),
            (100.0, 0.85, Complex64::new(-0.109_935_637_478_536_52, -0.850_369_261_277_565_9)),
            (0.5, 20.0, Complex64::new(0.233_907_385_885_754_93, -0.345_816_836_901_746_1)),
        ];
        for (r, y, expected) in table {
            let got = hyp2f1(pt(r, y)).unwrap().value;
            assert!(rel(got, expected) < 1e-11, "F({r}, {y}): rel err {:e}", rel(got, expected));
        }
    }

    #[test]
    fn series_and_pfaff_agree() {
        let s = f21_series(pt(1.0, 0.5)).unwrap().value;
        let p = f21_pfaff(pt(1.0, 0.5)).unwrap().value;
        assert!(rel(p, s) < 1e-10);
        let v = f21_pfaff(pt(0.0, 3.0)).unwrap().value;
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn mellin_barnes_against_series_backends() {
        let mb = f21_mellin_barnes(pt(2.0, 0.3)).unwrap().value;
        let s = gamma_prefactor(2.0).unwrap() * f21_series(pt(2.0, 0.3)).unwrap().value;
        assert!(rel(mb, s) < 1e-9);

        let mb = f21_mellin_barnes(pt(2.0, 1.0)).unwrap();
        assert_eq!(mb.backend, Backend::MellinBarnes);
        let pf = gamma_prefactor(2.0).unwrap() * f21_pfaff(pt(2.0, 1.0)).unwrap().value;
        assert!(rel(mb.value, pf) < 1e-8);
        let expected = Complex64::new(-0.474_421_734_746_624_4, 0.939_283_369_699_546_5);
        assert!(rel(mb.value, expected) < 1e-10);

        let mb = f21_mellin_barnes(pt(10.0, 40.0)).unwrap().value;
        let pf = gamma_prefactor(10.0).unwrap() * f21_pfaff(pt(10.0, 40.0)).unwrap().value;
        assert!(rel(mb, pf) < 1e-8);
    }

    #[test]
    fn mellin_barnes_domain() {
        assert!(matches!(f21_mellin_barnes(pt(0.0, 1.0)), Err(Error::Domain(_))));
        assert!(matches!(f21_mellin_barnes(pt(1.0, 0.05)), Err(Error::Domain(_))));
    }

    #[test]
    fn mellin_barnes_conjugate_symmetry() {
        for (r, y) in [(2.0, 1.0), (7.5, 300.0)] {
            let plus = f21_mellin_barnes(pt(r, y)).unwrap().value;
            let minus = f21_mellin_barnes(pt(-r, y)).unwrap().value;
            assert!((minus - plus.conj()).norm() <= 1e-10 * plus.norm());
        }
    }

    #[test]
    fn large_y_against_main_term() {
        let (r, y) = (5.0, 1e4);
        let mb = f21_mellin_barnes(pt(r, y)).unwrap().value;
        let main = asymptotic_main(pt(r, y)).unwrap();
        assert!((mb - main).norm() <= 10.0 * r / y);
        let expected = Complex64::new(-0.050_586_260_467_118_56, -0.027_374_670_097_296_16);
        assert!(rel(mb, expected) < 1e-9);
    }

    #[test]
    fn bracket_vanishes_at_forced_root() {
        // at r = 0: log y + 4 log 2, zero at y = 2^-4
        let b = corollary_bracket(0.0, 1.0 / 16.0).unwrap();
        assert!(b.norm() < 1e-14);
        let b = corollary_bracket(0.0, 3.0).unwrap();
        assert!((b.re - (3f64.ln() + 4.0 * 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn main_term_values() {
        let m = asymptotic_main(pt(10.0, 100.0)).unwrap();
        let bracket = corollary_bracket(10.0, 100.0).unwrap();
        assert!((m.norm() - 0.1 * bracket.norm()).abs() < 1e-15);
        let expected = Complex64::new(-0.220_744_599_411_636_5, 0.251_546_646_549_224_86);
        assert!(rel(m, expected) < 1e-13);

        let m = asymptotic_main(pt(5.0, 1000.0)).unwrap();
        let expected = Complex64::new(-0.082_100_265_079_656_46, 0.097_824_366_320_059_37);
        assert!(rel(m, expected) < 1e-13);
        assert!(asymptotic_main(pt(5.0, 1.0)).is_err());
    }

    #[test]
    fn main_term_modulus_ignores_phase() {
        for y in [2.0, 17.0, 900.0] {
            for r in [1.0, 4.0] {
                let m = asymptotic_main(pt(r, y)).unwrap();
                let b = corollary_bracket(r, y).unwrap();
                assert!((m.norm() - b.norm() / y.sqrt()).abs() <= 1e-14 * m.norm());
            }
        }
    }

    #[test]
    fn dispatcher_crosses_backends() {
        let low = prefactored_f21(pt(1.0, 0.5)).unwrap();
        let high = prefactored_f21(pt(1.0, 0.95)).unwrap();
        assert_eq!(low.backend, Backend::Series);
        assert_eq!(high.backend, Backend::Pfaff);
        let low_alt = gamma_prefactor(1.0).unwrap() * f21_pfaff(pt(1.0, 0.5)).unwrap().value;
        let high_alt = f21_mellin_barnes(pt(1.0, 0.95)).unwrap().value;
        assert!(rel(low.value, low_alt) < 1e-8);
        assert!(rel(high.value, high_alt) < 1e-8);

        let near_zero = prefactored_f21(pt(0.01, 10.0)).unwrap();
        assert_eq!(near_zero.backend, Backend::Pfaff);
        let expected = Complex64::new(1.580_082_761_729_459_9, -0.066_858_170_214_516_47);
        assert!(rel(near_zero.value, expected) < 1e-11);

        let far = prefactored_f21(pt(20.0, 100.0)).unwrap();
        assert_eq!(far.backend, Backend::MellinBarnes);
        let expected = Complex64::new(-0.106_974_839_976_034_17, -0.063_841_019_380_493);
        assert!(rel(far.value, expected) < 1e-9);
    }

    #[test]
    fn dispatcher_error_contract() {
        for (r, y) in [(0.3, 0.2), (-3.0, 7.0), (60.0, 49.0), (3.0, 5e5)] {
            let e = prefactored_f21(pt(r, y)).unwrap();
            assert!(e.est_error <= PREFACTORED_REL_TOL * e.value.norm());
        }
        let e = prefactored_f21(pt(-3.0, 7.0)).unwrap();
        let expected = Complex64::new(-0.481_424_331_900_567_7, 0.363_869_551_730_134_5);
        assert!(rel(e.value, expected) < 1e-11);
    }
}
