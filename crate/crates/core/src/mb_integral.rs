//! The remainder integral left after moving the Mellin–Barnes contour of
//! the prefactored hypergeometric function from `Re s = -1/4` to
//! `Re s = -1`:
//!
//! ```text
//! I(r, y) = (1/2π) ∫ Γ²(-1/2 + i(r+t)) Γ(1 - it) / Γ(i(2r+t)) · y^{-1+it} dt
//! ```
//!
//! so that `prefactored_f21(r, y) = asymptotic_main(r, y) + I(r, y)`. Also
//! here: the absolute-value majorant of the integrand split over the seven
//! intervals bounded by `1, -1, -r±1, -2r±1`, and the exponent profile
//! `|r + t/2| - |r + t| - |t|/2` that governs its exponential decay.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, ComplexValue};
use crate::hyp2f1::{line_step, line_truncation};
use crate::quadrature::{integrate_adaptive, LineEstimate, LineKernel};

/// Smallest validated spectral parameter.
pub const MIN_R: f64 = 2.0;
pub const MAX_R: f64 = 100.0;
pub const MIN_Y: f64 = 1.0;
pub const MAX_Y: f64 = 1.0e6;
/// Contour after the shift.
pub const REMAINDER_ABSCISSA: f64 = -1.0;
/// Integrand level below which infinite tails are cut.
const TAIL_CUTOFF: f64 = 1e-14;

fn check_r(r: f64) -> Result<()> {
    if !(MIN_R..=MAX_R).contains(&r) {
        return Err(Error::Domain(format!("r = {r}, need {MIN_R} <= r <= {MAX_R}")));
    }
    Ok(())
}

type Factor = Box<dyn Fn(f64) -> Result<Complex64> + Send + Sync>;

/// Gamma factors of `I(r, ·)` cached on the quadrature nodes.
pub struct RemainderKernel {
    line: LineKernel<Factor>,
}

impl RemainderKernel {
    /// Kernel adequate for all `y` in `[1, y_max]`.
    pub fn new(r: f64, y_max: f64) -> Result<Self> {
        check_r(r)?;
        if !(MIN_Y..=MAX_Y).contains(&y_max) {
            return Err(Error::Domain(format!("y = {y_max}, need {MIN_Y} <= y <= {MAX_Y}")));
        }
        let factor: Factor = Box::new(move |t: f64| {
            let recip_arg = Complex64::new(0.0, 2.0 * r + t);
            if recip_arg.im == 0.0 {
                // 1/Γ vanishes at the origin
                return Ok(Complex64::new(0.0, 0.0));
            }
            let lg = 2.0 * ln_gamma(Complex64::new(-0.5, r + t))? + ln_gamma(Complex64::new(1.0, -t))?
                - ln_gamma(recip_arg)?;
            Ok(lg.exp())
        });
        let line = LineKernel::new(REMAINDER_ABSCISSA, line_truncation(r, y_max), line_step(y_max), factor);
        Ok(RemainderKernel { line })
    }

    pub fn evaluate(&self, y: f64) -> Result<LineEstimate> {
        if !(MIN_Y..=MAX_Y).contains(&y) {
            return Err(Error::Domain(format!("y = {y}, need {MIN_Y} <= y <= {MAX_Y}")));
        }
        self.line.evaluate(y)
    }

    /// Trapezoid value after exactly `halvings` refinements of the base step.
    pub fn estimate_at_level(&self, y: f64, halvings: usize) -> Result<ComplexValue> {
        self.line.estimate_at_level(y, halvings)
    }

    pub fn base_step(&self) -> f64 {
        self.line.step()
    }
}

/// `I(r, y)` for `2 <= r <= 100`, `1 <= y <= 1e6`.
pub fn integral_i(r: f64, y: f64) -> Result<ComplexValue> {
    Ok(RemainderKernel::new(r, y)?.evaluate(y)?.value)
}

/// `|r + t/2| - |r + t| - |t|/2`, computed directly.
pub fn exponent_profile(r: f64, t: f64) -> f64 {
    (r + 0.5 * t).abs() - (r + t).abs() - 0.5 * t.abs()
}

fn ln_sinh(x: f64) -> f64 {
    if x < 20.0 {
        x.sinh().ln()
    } else {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
}

/// `√(|2r+t| sinh π|2r+t|) / ((1+(r+t)²) cosh π(r+t)) · √(|t| / sinh π|t|)`.
///
/// The integrand's absolute value equals this times
/// `π(1+(r+t)²) / (1/4+(r+t)²)`, a factor between π and 4π, so
/// `|I(r, y)| <= 2 · total / y`.
pub fn majorant_integrand(r: f64, t: f64) -> f64 {
    let u = (2.0 * r + t).abs();
    if u == 0.0 {
        return 0.0;
    }
    let growth = 0.5 * (u.ln() + ln_sinh(PI * u));
    let decay = if t == 0.0 {
        -0.5 * PI.ln()
    } else {
        0.5 * (t.abs().ln() - ln_sinh(PI * t.abs()))
    };
    let centre = (r + t) * (r + t);
    let damping = -centre.ln_1p() - ln_cosh(PI * (r + t));
    (growth + decay + damping).exp()
}

/// The seven majorant pieces `I_1 … I_7` and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantBreakdown {
    pub pieces: [f64; 7],
    pub total: f64,
}

impl MajorantBreakdown {
    /// `I_2 + I_3 + I_4`.
    pub fn dominant(&self) -> f64 {
        self.pieces[1] + self.pieces[2] + self.pieces[3]
    }
}

/// Interval endpoints of the seven pieces (infinite ends as `±inf`).
pub fn majorant_intervals(r: f64) -> [(f64, f64); 7] {
    [
        (1.0, f64::INFINITY),
        (-1.0, 1.0),
        (-r + 1.0, -1.0),
        (-r - 1.0, -r + 1.0),
        (-2.0 * r + 1.0, -r - 1.0),
        (-2.0 * r - 1.0, -2.0 * r + 1.0),
        (f64::NEG_INFINITY, -2.0 * r - 1.0),
    ]
}

fn tail_end(r: f64, from: f64, direction: f64) -> f64 {
    let mut t = from;
    loop {
        t += direction;
        if majorant_integrand(r, t) < TAIL_CUTOFF {
            return t;
        }
    }
}

/// Integrate the majorant over each of the seven intervals.
pub fn majorant_decomposition(r: f64) -> Result<MajorantBreakdown> {
    check_r(r)?;
    let tol = 1e-10 * (1.0 + r);
    let f = |t: f64| majorant_integrand(r, t);
    let mut pieces = [0.0; 7];
    for (k, (lo, hi)) in majorant_intervals(r).into_iter().enumerate() {
        let lo = if lo.is_infinite() { tail_end(r, hi, -1.0) } else { lo };
        let hi = if hi.is_infinite() { tail_end(r, lo, 1.0) } else { hi };
        // |2r + t| has a kink at t = -2r
        let kink = -2.0 * r;
        pieces[k] = if lo < kink && kink < hi {
            integrate_adaptive(f, lo, kink, 0.5 * tol)? + integrate_adaptive(f, kink, hi, 0.5 * tol)?
        } else {
            integrate_adaptive(f, lo, hi, tol)?
        };
    }
    Ok(MajorantBreakdown { pieces, total: pieces.iter().sum() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp2f1::{asymptotic_main, prefactored_f21, HypPoint};
    use proptest::prelude::*;

    /// The four-case closed form of the exponent profile.
    fn profile_cases(r: f64, t: f64) -> f64 {
        if t > 0.0 {
            -t
        } else if t > -r {
            0.0
        } else if t > -2.0 * r {
            2.0 * r + 2.0 * t
        } else {
            t
        }
    }

    #[test]
    fn exponent_profile_examples() {
        assert_eq!(exponent_profile(3.0, 1.0), -1.0);
        assert_eq!(exponent_profile(3.0, -2.0), 0.0);
        assert_eq!(exponent_profile(3.0, -5.0), -4.0);
        for r in [0.5, 3.0, 77.0] {
            for t in [0.0, -r, -2.0 * r] {
                assert!((exponent_profile(r, t) - profile_cases(r, t)).abs() <= 1e-14);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn exponent_profile_matches_cases(r in 0.01f64..100.0, s in -3.0f64..1.0) {
            let t = s * r;
            prop_assert!((exponent_profile(r, t) - profile_cases(r, t)).abs() <= 1e-14 * (1.0 + r));
        }
    }

    #[test]
    fn majorant_special_points() {
        let r = 4.0;
        // t = 0 uses the limit √(1/π) of √(t / sinh πt)
        let at_zero = majorant_integrand(r, 0.0);
        let near = majorant_integrand(r, 1e-9);
        assert!((at_zero - near).abs() <= 1e-8 * at_zero);
        assert_eq!(majorant_integrand(r, -2.0 * r), 0.0);
        // far tails decay without overflow
        assert!(majorant_integrand(100.0, -600.0) < 1e-100);
        assert!(majorant_integrand(100.0, 300.0) < 1e-100);
    }

    #[test]
    fn majorant_pieces_are_consistent() {
        for r in [2.0, 5.0, 13.0] {
            let b = majorant_decomposition(r).unwrap();
            assert!(b.pieces.iter().all(|&p| p >= 0.0));
            let sum: f64 = b.pieces.iter().sum();
            assert!((sum - b.total).abs() <= 1e-12 * b.total);
            assert!(b.dominant() >= 0.5 * b.total);
        }
        // the (-r+1, -1) interval is empty at r = 2
        assert_eq!(majorant_decomposition(2.0).unwrap().pieces[2], 0.0);
        assert!(majorant_decomposition(1.5).is_err());
    }

    #[test]
    fn integrand_modulus_matches_majorant_up_to_known_factor() {
        let r = 6.0;
        for t in [-13.0, -6.3, -6.0, -2.0, 0.7, 3.0] {
            let lg = 2.0 * ln_gamma(Complex64::new(-0.5, r + t)).unwrap()
                + ln_gamma(Complex64::new(1.0, -t)).unwrap()
                - ln_gamma(Complex64::new(0.0, 2.0 * r + t)).unwrap();
            let exact = lg.exp().norm();
            let c = (r + t) * (r + t);
            let factor = PI * (1.0 + c) / (0.25 + c);
            let m = majorant_integrand(r, t);
            assert!((exact - factor * m).abs() <= 1e-11 * exact, "t = {t}");
        }
    }

    #[test]
    fn contour_shift_identity() {
        // prefactored − main term = I, reference from 40-digit mpmath hyp2f1
        let expected = Complex64::new(-0.037_995_191_203_106_68, -0.081_129_888_351_191_26);
        let i = integral_i(5.0, 100.0).unwrap();
        assert!((i - expected).norm() < 1e-10);
        let p = HypPoint::new(5.0, 100.0).unwrap();
        let lhs = prefactored_f21(p).unwrap().value - asymptotic_main(p).unwrap();
        assert!((lhs - i).norm() < 1e-7);

        let expected = Complex64::new(-0.342_835_950_091_698_7, -0.207_416_082_571_146_57);
        assert!((integral_i(2.0, 10.0).unwrap() - expected).norm() < 1e-10);
        let expected = Complex64::new(-0.021_596_733_588_626_43, 0.034_419_495_594_279_99);
        assert!((integral_i(20.0, 1000.0).unwrap() - expected).norm() < 1e-10);
    }

    #[test]
    fn integral_domain() {
        assert!(integral_i(1.9, 10.0).is_err());
        assert!(integral_i(5.0, 0.5).is_err());
        assert!(integral_i(5.0, 2e6).is_err());
    }

    #[test]
    fn halving_is_stable() {
        for (r, y) in [(2.0, 1.0), (20.0, 1000.0)] {
            let k = RemainderKernel::new(r, y).unwrap();
            let coarse = k.estimate_at_level(y, 0).unwrap();
            let fine = k.estimate_at_level(y, 1).unwrap();
            assert!((coarse - fine).norm() <= 1e-8 * fine.norm());
        }
    }
}
