//! Calibrate-then-assert checks for bounds stated up to an unspecified
//! constant: the constant is measured on a coarse calibration set and the
//! bound is then required to hold on a fine set with a fixed slack factor.

/// Slack factor applied to calibrated constants.
pub const ENVELOPE_SLACK: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeCheck {
    /// Largest normalized value on the calibration set.
    pub calibrated: f64,
    /// Largest normalized value on the checked set.
    pub observed: f64,
    pub slack: f64,
}

impl EnvelopeCheck {
    pub fn passes(&self) -> bool {
        self.observed.is_finite() && self.observed <= self.slack * self.calibrated
    }

    /// `observed / calibrated`, the factor that has to stay below the slack.
    pub fn growth(&self) -> f64 {
        self.observed / self.calibrated
    }
}

/// Compare the maximum of `checked` against `slack` times the maximum of `calibration`.
pub fn calibrate_then_assert(calibration: &[f64], checked: &[f64], slack: f64) -> EnvelopeCheck {
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    EnvelopeCheck { calibrated: max(calibration), observed: max(checked), slack }
}
