//! Quadrature building blocks: Gauss–Legendre panels, adaptive
//! Gauss–Kronrod (7/15), and a trapezoid rule on vertical lines with
//! nested step halving.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub(crate) fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

pub(crate) fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(64))
}

/// Apply a Gauss rule to `f` on `[a, b]`.
pub fn gauss_panel<T, F>(rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64, mut f: F) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    F: FnMut(f64) -> T,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::default();
    for (x, w) in rule.0.iter().zip(&rule.1) {
        acc = acc + f(mid + half * x) * (w * half);
    }
    acc
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod 7/15 integration of a real function.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate falls below `abs_tol`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4000;
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = kronrod15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            break;
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Convergence(format!(
                "adaptive quadrature on [{a}, {b}]: error {total_err:e} > {abs_tol:e}"
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&mut f, lo, m);
        let (v2, e2) = kronrod15(&mut f, m, hi);
        pieces.push((lo, m, v1, e1));
        pieces.push((m, hi, v2, e2));
    }
    // sum smallest first
    let mut vals: Vec<f64> = pieces.iter().map(|p| p.2).collect();
    vals.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(vals.iter().sum())
}

/// Outcome of a refined line integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineEstimate {
    pub value: Complex64,
    pub est_error: f64,
    pub halvings: usize,
}

/// Relative agreement demanded of successive halvings.
pub const LINE_REL_TOL: f64 = 1e-9;
/// Disagreement above which an unconverged line integral is an error.
pub const LINE_FAIL_TOL: f64 = 1e-7;
/// Maximum number of step halvings.
pub const LINE_MAX_HALVINGS: usize = 6;

type NodeValues = Result<Vec<(f64, Complex64)>>;

/// `(1/2π) ∫_{-T}^{T} K(t) y^{c+it} dt` by the trapezoid rule, with the
/// `y`-independent factor `K` cached per refinement level so that one kernel
/// can be evaluated at many `y`.
pub struct LineKernel<K> {
    abscissa: f64,
    t_max: f64,
    h0: f64,
    n0: usize,
    factor: K,
    levels: Vec<OnceLock<NodeValues>>,
}

impl<K> LineKernel<K>
where
    K: Fn(f64) -> Result<Complex64> + Sync,
{
    /// Kernel on `Re s = abscissa`, truncated to `|t| <= t_max`, base step `h0`.
    pub fn new(abscissa: f64, t_max: f64, h0: f64, factor: K) -> Self {
        let n0 = (2.0 * t_max / h0).ceil() as usize;
        let h0 = 2.0 * t_max / n0 as f64;
        let levels = (0..=LINE_MAX_HALVINGS).map(|_| OnceLock::new()).collect();
        LineKernel { abscissa, t_max, h0, n0, factor, levels }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn step(&self) -> f64 {
        self.h0
    }

    fn level(&self, k: usize) -> Result<&[(f64, Complex64)]> {
        let stored = self.levels[k].get_or_init(|| {
            let (start, step, count) = if k == 0 {
                (-self.t_max, self.h0, self.n0 + 1)
            } else {
                let h_prev = self.h0 / (1u64 << (k - 1)) as f64;
                (-self.t_max + 0.5 * h_prev, h_prev, self.n0 << (k - 1))
            };
            (0..count)
                .map(|j| {
                    let t = start + j as f64 * step;
                    (self.factor)(t).map(|v| (t, v))
                })
                .collect()
        });
        match stored {
            Ok(v) => Ok(v.as_slice()),
            Err(e) => Err(e.clone()),
        }
    }

    fn level_sum(&self, k: usize, ln_y: f64) -> Result<(Complex64, f64)> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for &(t, v) in self.level(k)? {
            let term = v * Complex64::cis(t * ln_y);
            acc += term;
            mag += term.norm();
        }
        Ok((acc, mag))
    }

    /// Trapezoid estimate after exactly `k` halvings of the base step.
    pub fn estimate_at_level(&self, y: f64, k: usize) -> Result<Complex64> {
        let ln_y = y.ln();
        let mut value = Complex64::new(0.0, 0.0);
        for j in 0..=k {
            let h = self.h0 / (1u64 << j) as f64;
            let (s, _) = self.level_sum(j, ln_y)?;
            value = if j == 0 { s * h } else { value * 0.5 + s * h };
        }
        Ok(value * self.scale(ln_y))
    }

    fn scale(&self, ln_y: f64) -> f64 {
        (self.abscissa * ln_y).exp() / (2.0 * PI)
    }

    /// Halve the step until successive sums agree to [`LINE_REL_TOL`].
    pub fn evaluate(&self, y: f64) -> Result<LineEstimate> {
        let ln_y = y.ln();
        let scale = self.scale(ln_y);
        let (s0, m0) = self.level_sum(0, ln_y)?;
        let mut value = s0 * self.h0;
        let mut magnitude = m0 * self.h0;
        let mut diff = f64::INFINITY;
        for k in 1..=LINE_MAX_HALVINGS {
            let h = self.h0 / (1u64 << k) as f64;
            let (s, m) = self.level_sum(k, ln_y)?;
            let next = value * 0.5 + s * h;
            magnitude = 0.5 * magnitude + m * h;
            diff = (next - value).norm();
            value = next;
            let floor = 64.0 * f64::EPSILON * magnitude;
            if diff <= LINE_REL_TOL * value.norm() || diff <= floor {
                return Ok(LineEstimate {
                    value: value * scale,
                    est_error: diff * scale,
                    halvings: k,
                });
            }
        }
        if diff <= LINE_FAIL_TOL * value.norm() {
            Ok(LineEstimate {
                value: value * scale,
                est_error: diff * scale,
                halvings: LINE_MAX_HALVINGS,
            })
        } else {
            Err(Error::Convergence(format!(
                "line integral at y = {y}: halving disagreement {:e} relative",
                diff / value.norm()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(16);
        let w: f64 = rule.1.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        // ∫_0^2 x^31 dx = 2^32 / 32
        let v: f64 = gauss_panel(&rule, 0.0, 2.0, |x: f64| x.powi(31));
        assert!((v / (2f64.powi(32) / 32.0) - 1.0).abs() < 1e-13);
        let rule = gl64();
        let v: f64 = gauss_panel(rule, 0.0, PI, |x: f64| x.sin());
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks_and_peaks() {
        let v = integrate_adaptive(|x: f64| x.abs(), -1.0, 2.0, 1e-12).unwrap();
        assert!((v - 2.5).abs() < 1e-11);
        let v = integrate_adaptive(|x: f64| 1.0 / (1.0 + 1e4 * x * x), -1.0, 1.0, 1e-12).unwrap();
        let exact = 2.0 * (100.0f64).atan() / 100.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn line_kernel_gaussian() {
        // (1/2π) ∫ e^{-t²/2} e^{it log y} dt = e^{-(log y)²/2} / sqrt(2π)
        let kernel = LineKernel::new(0.0, 12.0, 0.5, |t: f64| Ok(Complex64::new((-0.5 * t * t).exp(), 0.0)));
        for y in [1.0, 3.0, 20.0] {
            let got = kernel.evaluate(y).unwrap();
            let ly: f64 = (y as f64).ln();
            let exact = (-0.5 * ly * ly).exp() / (2.0 * PI).sqrt();
            assert!((got.value.re - exact).abs() < 1e-14, "y = {y}");
            assert!(got.value.im.abs() < 1e-15);
        }
        let a = kernel.estimate_at_level(3.0, 0).unwrap();
        let b = kernel.estimate_at_level(3.0, 1).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn line_kernel_propagates_factor_errors() {
        let kernel = LineKernel::new(0.0, 1.0, 0.5, |t: f64| {
            if t == 0.0 {
                Err(Error::Pole("t = 0".into()))
            } else {
                Ok(Complex64::new(1.0, 0.0))
            }
        });
        assert!(matches!(kernel.evaluate(2.0), Err(Error::Pole(_))));
    }
}
