use std::path::PathBuf;

use adp_core::divisor::{
    bound_report, bound_rhs, crossover_shift, exponent_fit, sieve_divisor_counts, Bound, BoundReport,
    ExperimentConfig, DEFAULT_ALPHA, DEFAULT_EPSILON, MAX_N,
};
use clap::Args;
use rayon::prelude::*;

use crate::report::{num, opt_num, CommandError, Run};

/// Window for the fitted exponent of `|E(M, f)|`.
pub const EXPONENT_WINDOW: (f64, f64) = (0.4, 0.8);
/// Sampled `(M, f)` pairs for the bound comparisons.
pub const BOUND_SAMPLES: usize = 20;

fn default_m_grid() -> Vec<u64> {
    (10..=20).map(|k| 1u64 << k).collect()
}

#[derive(Args, Debug, Clone)]
pub struct DivisorArgs {
    /// Sieve length; must cover every M + f.
    #[arg(long, default_value_t = (1 << 20) + 1)]
    pub n_max: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64])]
    pub shifts: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = default_m_grid())]
    pub m_grid: Vec<u64>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// `(M, f)` pairs above the crossover and inside the Motohashi range,
/// log-spaced in `M ∈ [10^3, 10^9]` and in `f` across the admissible band.
pub fn bound_samples(alpha: f64) -> Vec<(f64, f64)> {
    (0..BOUND_SAMPLES)
        .map(|k| {
            let s = (k as f64 + 0.5) / BOUND_SAMPLES as f64;
            let m = 10f64.powf(3.0 + 6.0 * s);
            let lo = crossover_shift(m, alpha);
            let hi = m.powf(2.0 / (1.0 + 2.0 * alpha));
            // alternate positions across the band
            let u = ((k * 7) % BOUND_SAMPLES) as f64 / BOUND_SAMPLES as f64 * 0.98 + 0.01;
            (m, lo * (hi / lo).powf(u))
        })
        .collect()
}

fn report_row(m: u64, f: u64, rep: &Result<BoundReport, adp_core::Error>) -> Vec<String> {
    match rep {
        Ok(b) => vec![
            m.to_string(),
            f.to_string(),
            b.correlation.to_string(),
            num(b.main_term),
            num(b.error_term),
            opt_num(b.bound_mot),
            opt_num(b.bound_meur),
            opt_num(b.bound_new),
            b.regime.name().into(),
            "ok".into(),
        ],
        Err(e) => {
            let mut row = vec![m.to_string(), f.to_string()];
            row.extend(std::iter::repeat_n("NA".to_string(), 7));
            row.push(e.to_string());
            row
        }
    }
}

pub fn run(args: &DivisorArgs, run: &mut Run) -> Result<(), CommandError> {
    run.param("n-max", args.n_max);
    run.list_param("shifts", &args.shifts);
    run.list_param("m-grid", &args.m_grid);
    run.param("alpha", args.alpha);
    run.param("epsilon", args.epsilon);
    let config = ExperimentConfig {
        shifts: args.shifts.clone(),
        m_grid: args.m_grid.clone(),
        alpha: args.alpha,
        epsilon: args.epsilon,
        output_path: args.out_dir.clone(),
    };
    config.validate().map_err(|e| CommandError::Usage(e.to_string()))?;
    if !(1..=MAX_N).contains(&args.n_max) {
        return Err(CommandError::Usage(format!("--n-max {} must lie in [1, 2^31]", args.n_max)));
    }

    let table = match sieve_divisor_counts(args.n_max) {
        Ok(t) => Some(t),
        Err(e) => {
            run.check("sieve", false, e.to_string());
            None
        }
    };

    let pairs: Vec<(u64, u64)> =
        config.shifts.iter().flat_map(|&f| config.m_grid.iter().map(move |&m| (m, f))).collect();
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    if let Some(table) = &table {
        let reports: Vec<_> =
            pairs.par_iter().map(|&(m, f)| bound_report(table, m, f, config.alpha, config.epsilon)).collect();
        let errors: Vec<String> = pairs
            .iter()
            .zip(&reports)
            .filter_map(|(&(m, f), r)| r.as_ref().err().map(|e| format!("(M, f) = ({m}, {f}): {e}")))
            .collect();
        run.check(
            "rows",
            errors.is_empty(),
            if errors.is_empty() { format!("{} rows", pairs.len()) } else { errors.join("; ") },
        );
        rows = pairs.iter().zip(&reports).map(|(&(m, f), r)| report_row(m, f, r)).collect();

        for &f in &config.shifts {
            let series: Vec<(f64, f64)> = pairs
                .iter()
                .zip(&reports)
                .filter(|((_, g), _)| *g == f)
                .filter_map(|((m, _), r)| r.as_ref().ok().map(|b| (*m as f64, b.error_term)))
                .collect();
            match exponent_fit(&series) {
                Ok(fit) => {
                    let (lo, hi) = EXPONENT_WINDOW;
                    run.check(
                        format!("exponent_f{f}"),
                        (lo..=hi).contains(&fit.slope),
                        format!("slope {:.4} from {} points, window [{lo}, {hi}]", fit.slope, fit.used),
                    );
                    fits.push(vec![
                        f.to_string(),
                        num(fit.slope),
                        num(fit.intercept),
                        fit.used.to_string(),
                        fit.dropped.to_string(),
                    ]);
                }
                Err(e) => {
                    run.check(format!("exponent_f{f}"), false, e.to_string());
                    fits.push(vec![f.to_string(), "NA".into(), "NA".into(), "0".into(), series.len().to_string()]);
                }
            }
        }
    }

    let samples = bound_samples(config.alpha);
    let mut ordering_fail = Vec::new();
    let mut worst_log_ratio: f64 = 0.0;
    let mut agreement_ok = true;
    for &(m, f) in &samples {
        let mot = bound_rhs(m, f, config.alpha, config.epsilon, Bound::Mot);
        let meur = bound_rhs(m, f, config.alpha, config.epsilon, Bound::Meur);
        let new = bound_rhs(m, f, config.alpha, config.epsilon, Bound::New);
        match (mot, meur, new) {
            (Ok(mot), Ok(meur), Ok(new)) => {
                if meur > mot {
                    ordering_fail.push(format!("(M, f) = ({m:.3e}, {f:.3e})"));
                }
                // |log(Meur/New)| <= 2ε log M
                let lr = (meur / new).ln().abs() / m.ln();
                worst_log_ratio = worst_log_ratio.max(lr);
                agreement_ok &= lr <= 2.0 * config.epsilon;
            }
            _ => ordering_fail.push(format!("(M, f) = ({m:.3e}, {f:.3e}) outside a validity range")),
        }
    }
    run.check(
        "bound_ordering",
        ordering_fail.is_empty(),
        if ordering_fail.is_empty() { format!("{} samples", samples.len()) } else { ordering_fail.join("; ") },
    );
    run.check(
        "meur_new_agreement",
        agreement_ok && ordering_fail.is_empty(),
        format!("max |log(Meur/New)| / log M = {worst_log_ratio:.5}, limit {}", 2.0 * config.epsilon),
    );

    run.write_csv(
        "divisor_report.csv",
        &[
            "M",
            "f",
            "correlation",
            "main_term",
            "error_term",
            "bound_mot",
            "bound_meur",
            "bound_new",
            "regime",
            "status",
        ],
        &rows,
    )?;
    run.write_csv("exponent_fit.csv", &["f", "slope", "intercept", "points", "dropped"], &fits)
}
