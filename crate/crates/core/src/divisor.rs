//! Exact divisor correlations `Σ_{n<=M} d(n) d(n+f)`, the classical main
//! term `MT(M, f)`, the error `E(M, f) = correlation - MT`, log-log exponent
//! fits and the three upper bounds for `E` with implied constant 1.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::gamma::EULER_GAMMA;
use crate::quadrature::{gauss_panel, gl16, gl64};

/// Largest sieve length.
pub const MAX_N: u64 = 1 << 31;
pub const DEFAULT_ALPHA: f64 = 7.0 / 64.0;
pub const DEFAULT_EPSILON: f64 = 0.01;

const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
const ZETA2_D1: f64 = -0.937_548_254_315_843_8;
const ZETA2_D2: f64 = 1.989_280_234_298_901;

/// `d(n)` for `1 <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct DivisorTable {
    counts: Vec<u16>,
}

impl DivisorTable {
    pub fn n_max(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    /// `d(n)`, or `None` outside `1..=n_max`.
    pub fn get(&self, n: u64) -> Option<u16> {
        if n == 0 {
            return None;
        }
        self.counts.get(usize::try_from(n).ok()?).copied()
    }

    /// Counts indexed by `n`; entry 0 is unused and zero.
    pub fn counts(&self) -> &[u16] {
        &self.counts
    }

    /// `Σ_{n<=N} d(n)`.
    pub fn summatory(&self, n: u64) -> Result<u64> {
        if n > self.n_max() {
            return Err(Error::Range(format!("N = {n} exceeds table size {}", self.n_max())));
        }
        Ok(self.counts[..=n as usize].iter().map(|&c| c as u64).sum())
    }
}

/// Harmonic sieve: every `k <= n_max` increments all of its multiples.
pub fn sieve_divisor_counts(n_max: u64) -> Result<DivisorTable> {
    if n_max == 0 || n_max > MAX_N {
        return Err(Error::Domain(format!("n_max = {n_max}, need 1 <= n_max <= 2^31")));
    }
    let len = n_max as usize + 1;
    let mut counts: Vec<u16> = Vec::new();
    counts
        .try_reserve_exact(len)
        .map_err(|e| Error::Capacity(format!("{len} divisor counts: {e}")))?;
    counts.resize(len, 0);
    for k in 1..len {
        for c in counts[k..].iter_mut().step_by(k) {
            *c += 1;
        }
    }
    Ok(DivisorTable { counts })
}

/// `Σ_{k<=N} ⌊N/k⌋`.
pub fn floor_quotient_sum(n: u64) -> u64 {
    (1..=n).map(|k| n / k).sum()
}

fn check_window(table: &DivisorTable, m: u64, f: u64) -> Result<()> {
    if m == 0 || f == 0 {
        return Err(Error::Domain(format!("M = {m}, f = {f} must be positive")));
    }
    if m.checked_add(f).is_none_or(|top| top > table.n_max()) {
        return Err(Error::Range(format!("M + f = {m} + {f} exceeds table size {}", table.n_max())));
    }
    Ok(())
}

/// `Σ_{n<=M} d(n) d(n+f)`, requires `M + f <= n_max`.
pub fn divisor_correlation(table: &DivisorTable, m: u64, f: u64) -> Result<u64> {
    check_window(table, m, f)?;
    let (m, f) = (m as usize, f as usize);
    let c = &table.counts;
    Ok(c[1..=m].iter().zip(&c[1 + f..=m + f]).map(|(&a, &b)| a as u64 * b as u64).sum())
}

/// Running correlations: entry `M - 1` is `Σ_{n<=M} d(n) d(n+f)` for `M = 1..=m_max`.
pub fn correlation_profile(table: &DivisorTable, m_max: u64, f: u64) -> Result<Vec<u64>> {
    check_window(table, m_max, f)?;
    let (m, f) = (m_max as usize, f as usize);
    let c = &table.counts;
    let mut acc = 0u64;
    Ok(c[1..=m]
        .iter()
        .zip(&c[1 + f..=m + f])
        .map(|(&a, &b)| {
            acc += a as u64 * b as u64;
            acc
        })
        .collect())
}

/// Positive divisors of `f` in increasing order, by trial division.
pub fn divisors(f: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut q = 1;
    while q * q <= f {
        if f.is_multiple_of(q) {
            small.push(q);
            if q * q != f {
                large.push(f / q);
            }
        }
        q += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Density of the main term for shift `f`.
///
/// With `D(s) = σ_{1-s}(f)/ζ(s)` and its derivatives at `s = 2`,
///
/// ```text
/// MT(M, f) = ∫₀^M [D (log x + 2γ)(log(x+f) + 2γ) + 2D' (log x + log(x+f) + 4γ) + 4D''] dx.
/// ```
///
/// The leading coefficient `D(2) = (6/π²) σ₋₁(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainTerm {
    f: u64,
    d0: f64,
    d1: f64,
    d2: f64,
}

impl MainTerm {
    pub fn new(f: u64) -> Result<Self> {
        if f == 0 {
            return Err(Error::Domain("shift f must be positive".into()));
        }
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for q in divisors(f) {
            let (w, l) = (1.0 / q as f64, (q as f64).ln());
            s0 += w;
            s1 -= l * w;
            s2 += l * l * w;
        }
        let z = 1.0 / ZETA2;
        let z1 = -ZETA2_D1 / (ZETA2 * ZETA2);
        let z2 = -ZETA2_D2 / (ZETA2 * ZETA2) + 2.0 * ZETA2_D1 * ZETA2_D1 / (ZETA2 * ZETA2 * ZETA2);
        Ok(MainTerm { f, d0: s0 * z, d1: s1 * z + s0 * z1, d2: s2 * z + 2.0 * s1 * z1 + s0 * z2 })
    }

    /// `D(2) = (6/π²) σ₋₁(f)`.
    pub fn leading_coefficient(&self) -> f64 {
        self.d0
    }

    pub fn density(&self, x: f64) -> f64 {
        let g2 = 2.0 * EULER_GAMMA;
        let (lx, lxf) = (x.ln(), (x + self.f as f64).ln());
        self.d0 * (lx + g2) * (lxf + g2) + 2.0 * self.d1 * (lx + lxf + 2.0 * g2) + 4.0 * self.d2
    }

    /// `∫₀^ε density` with `log(x+f)` frozen at `log f`, accurate for `ε ≪ f`.
    fn origin_tail(&self, eps: f64) -> f64 {
        let g2 = 2.0 * EULER_GAMMA;
        let b0 = (self.f as f64).ln() + g2;
        let l = eps.ln() - 1.0 + g2;
        eps * ((self.d0 * b0 + 2.0 * self.d1) * l + 2.0 * self.d1 * b0 + 4.0 * self.d2)
    }

    /// `∫₀^M density`, over the dyadic panels `[M/2^{k+1}, M/2^k]` down to `M·2^{-60}`.
    pub fn integral(&self, m: f64) -> f64 {
        const LEVELS: i32 = 60;
        let rule = gl64();
        let mut sum = self.origin_tail(m * 2f64.powi(-LEVELS));
        for k in (0..LEVELS).rev() {
            let hi = m * 2f64.powi(-k);
            sum += gauss_panel(rule, 0.5 * hi, hi, |x| self.density(x));
        }
        sum
    }

    /// `∫_n^{n+1} density` for `n >= 1`.
    pub fn unit_step(&self, n: u64) -> f64 {
        let a = n as f64;
        gauss_panel(gl16(), a, a + 1.0, |x| self.density(x))
    }
}

/// `MT(M, f)` for `M >= 2`.
pub fn main_term(m: u64, f: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("M = {m}, need M >= 2")));
    }
    Ok(MainTerm::new(f)?.integral(m as f64))
}

/// `E(M, f) = Σ_{n<=M} d(n) d(n+f) - MT(M, f)`.
pub fn error_term(table: &DivisorTable, m: u64, f: u64) -> Result<f64> {
    let c = divisor_correlation(table, m, f)?;
    Ok(c as f64 - main_term(m, f)?)
}

/// `E(M, f)` for every `M = 1..=m_max` (entry `M - 1`), with the main term
/// accumulated one unit interval at a time.
pub fn error_term_profile(table: &DivisorTable, m_max: u64, f: u64) -> Result<Vec<f64>> {
    let corr = correlation_profile(table, m_max, f)?;
    let mt = MainTerm::new(f)?;
    // Neumaier-compensated running integral
    let mut sum = mt.integral(1.0);
    let mut comp = 0.0;
    let mut out = Vec::with_capacity(corr.len());
    for (i, &c) in corr.iter().enumerate() {
        if i > 0 {
            let step = mt.unit_step(i as u64);
            let t = sum + step;
            comp += if sum.abs() >= step.abs() { (sum - t) + step } else { (step - t) + sum };
            sum = t;
        }
        out.push(c as f64 - (sum + comp));
    }
    Ok(out)
}

/// Least-squares line through `(log M, log |E|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Points entering the fit.
    pub used: usize,
    /// Points dropped because `|E| = 0` or a coordinate is not finite.
    pub dropped: usize,
}

/// Fit `log |E| = slope · log M + intercept` from `(M, E)` pairs.
pub fn exponent_fit(series: &[(f64, f64)]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(m, e)| *m > 0.0 && m.is_finite() && e.is_finite() && *e != 0.0)
        .map(|&(m, e)| (m.ln(), e.abs().ln()))
        .collect();
    let dropped = series.len() - pts.len();
    if dropped > 0 {
        log::warn!("exponent fit: dropped {dropped} of {} points with zero or non-finite values", series.len());
    }
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!("{} usable points, need at least 5", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all M values coincide".into()));
    }
    let slope = sxy / sxx;
    Ok(ExponentFit { slope, intercept: my - slope * mx, used: pts.len(), dropped })
}

/// Which upper bound for `E(M, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    /// Motohashi, valid for `1 <= f <= M^{2/(1+2α)}`.
    Mot,
    /// Meurman, valid for `1 <= f <= M^{2-ε}`.
    Meur,
    /// The spectral bound, valid for `M^{2/(1+4α)} < f < M^{2-ε}`.
    New,
}

impl Bound {
    pub const ALL: [Bound; 3] = [Bound::Mot, Bound::Meur, Bound::New];

    pub fn name(self) -> &'static str {
        match self {
            Bound::Mot => "mot",
            Bound::Meur => "meur",
            Bound::New => "new",
        }
    }

    /// Whether `(M, f)` lies in the validity range.
    pub fn applies(self, m: f64, f: f64, alpha: f64, epsilon: f64) -> bool {
        if !(m >= 1.0 && f >= 1.0) {
            return false;
        }
        match self {
            Bound::Mot => f <= m.powf(2.0 / (1.0 + 2.0 * alpha)),
            Bound::Meur => f <= m.powf(2.0 - epsilon),
            Bound::New => f > crossover_shift(m, alpha) && f < m.powf(2.0 - epsilon),
        }
    }
}

/// Right-hand side of the chosen bound with implied constant 1.
pub fn bound_rhs(m: f64, f: f64, alpha: f64, epsilon: f64, which: Bound) -> Result<f64> {
    if !(0.0..=0.5).contains(&alpha) || !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha}, epsilon = {epsilon}")));
    }
    if !which.applies(m, f, alpha, epsilon) {
        return Err(Error::Range(format!("(M, f) = ({m}, {f}) outside the {} range", which.name())));
    }
    let q = m * m + m * f;
    Ok(match which {
        Bound::Mot => {
            q.powf(1.0 / 3.0 + epsilon)
                + f.powf(0.125 + alpha / 2.0) * q.powf(0.25 + epsilon)
                + f.powf(0.5 + alpha) * m.powf(epsilon)
        }
        Bound::Meur => {
            let me = m.powf(epsilon);
            q.powf(1.0 / 3.0) * me + q.powf(0.25) * me * m.powf(0.25).min(f.powf(0.125 + alpha / 2.0))
        }
        Bound::New => f.powf(epsilon) * ((f * m).powf(1.0 / 3.0) + f.powf(0.25) * m.sqrt()),
    })
}

/// `M^{2/(1+4α)}`, above which the spectral and Meurman bounds coincide.
pub fn crossover_shift(m: f64, alpha: f64) -> f64 {
    m.powf(2.0 / (1.0 + 4.0 * alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BelowCrossover,
    AboveCrossover,
}

impl Regime {
    pub fn of(m: f64, f: f64, alpha: f64) -> Regime {
        if f > crossover_shift(m, alpha) {
            Regime::AboveCrossover
        } else {
            Regime::BelowCrossover
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::BelowCrossover => "below_crossover",
            Regime::AboveCrossover => "above_crossover",
        }
    }
}

/// Shifts, lengths and bound parameters of a divisor experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub shifts: Vec<u64>,
    pub m_grid: Vec<u64>,
    pub alpha: f64,
    pub epsilon: f64,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            shifts: vec![1],
            m_grid: (10..=20).map(|k| 1u64 << k).collect(),
            alpha: DEFAULT_ALPHA,
            epsilon: DEFAULT_EPSILON,
            output_path: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shifts.is_empty() || self.m_grid.is_empty() {
            return Err(Error::Domain("shifts and M grid must be non-empty".into()));
        }
        if !(0.0..=0.5).contains(&self.alpha) {
            return Err(Error::Domain(format!("alpha = {}, need 0 <= alpha <= 1/2", self.alpha)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon = {}, need epsilon > 0", self.epsilon)));
        }
        for &m in &self.m_grid {
            for &f in &self.shifts {
                if f == 0 || (f as f64) >= (m as f64) * (m as f64) {
                    return Err(Error::Domain(format!("(M, f) = ({m}, {f}), need 1 <= f < M^2")));
                }
            }
        }
        Ok(())
    }

    /// Largest `M + f`, the sieve length the experiment needs.
    pub fn required_n_max(&self) -> u64 {
        self.m_grid.iter().max().copied().unwrap_or(0) + self.shifts.iter().max().copied().unwrap_or(0)
    }
}

/// One `(M, f)` row: the measured error next to each applicable bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub m: u64,
    pub f: u64,
    pub correlation: u64,
    pub main_term: f64,
    pub error_term: f64,
    pub bound_mot: Option<f64>,
    pub bound_meur: Option<f64>,
    pub bound_new: Option<f64>,
    pub regime: Regime,
}

pub fn bound_report(table: &DivisorTable, m: u64, f: u64, alpha: f64, epsilon: f64) -> Result<BoundReport> {
    let correlation = divisor_correlation(table, m, f)?;
    let main_term = main_term(m, f)?;
    let (mf, ff) = (m as f64, f as f64);
    let bound = |b| bound_rhs(mf, ff, alpha, epsilon, b).ok();
    Ok(BoundReport {
        m,
        f,
        correlation,
        main_term,
        error_term: correlation as f64 - main_term,
        bound_mot: bound(Bound::Mot),
        bound_meur: bound(Bound::Meur),
        bound_new: bound(Bound::New),
        regime: Regime::of(mf, ff, alpha),
    })
}

/// `δM + δ^{-1/2} f^{1/2}`, the smoothing cost traded against the spectral error.
pub fn smoothing_objective(delta: f64, m: f64, f: f64) -> f64 {
    delta * m + (f / delta).sqrt()
}

/// `f^{1/3} / M^{2/3}`, where the two terms of the objective are equal.
pub fn balanced_delta(m: f64, f: f64) -> f64 {
    f.cbrt() / (m * m).cbrt()
}

/// Exact minimizer `(f^{1/2} / 2M)^{2/3} = 2^{-2/3} · balanced_delta`.
pub fn optimal_delta(m: f64, f: f64) -> f64 {
    (f.sqrt() / (2.0 * m)).powf(2.0 / 3.0)
}

/// Minimizer of the objective over `points` log-spaced values in `[lo, hi]`.
pub fn grid_argmin_delta(m: f64, f: f64, lo: f64, hi: f64, points: usize) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .min_by(|x, y| smoothing_objective(*x, m, f).total_cmp(&smoothing_objective(*y, m, f)))
        .unwrap_or(lo)
}
