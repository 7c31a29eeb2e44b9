//! Numerical laboratory for the binary additive divisor problem.
//!
//! The crate evaluates the special functions behind the spectral analysis
//! of `Σ_{n<=M} d(n) d(n+f)`: complex log-gamma and digamma, the balanced
//! hypergeometric function `F(1/2+ir, 1/2+ir; 1+2ir; -y)`, the
//! Mellin–Barnes remainder integral and its majorant, the weight integral
//! `Λ(r, Z)` with its spectral companion `Θ`. Alongside sits an exact
//! divisor-correlation engine that measures the error term of the
//! additive divisor problem and compares it with the known upper bounds.

mod dd;
pub mod divisor;
pub mod envelope;
pub mod error;
pub mod gamma;
pub mod hyp2f1;
pub mod lambda;
pub mod mb_integral;
pub mod quadrature;

pub use error::{Error, Result};
pub use gamma::{digamma, gamma_abs_sq_critical, ln_gamma, ComplexValue, EULER_GAMMA};
pub use hyp2f1::{
    asymptotic_main, f21_mellin_barnes, f21_pfaff, f21_series, prefactored_f21, Backend, EvalResult,
    HypPoint,
};
pub use lambda::{lambda, lambda_bound_ratio, smooth_g, theta, LambdaPoint, SmoothCutoff};
pub use mb_integral::{exponent_profile, integral_i, majorant_decomposition, MajorantBreakdown};
pub use divisor::{
    bound_rhs, divisor_correlation, error_term, exponent_fit, main_term, sieve_divisor_counts, Bound,
    BoundReport, DivisorTable, ExperimentConfig, ExponentFit, Regime,
};
