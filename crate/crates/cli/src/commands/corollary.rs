use std::path::PathBuf;

use adp_core::envelope::{calibrate_then_assert, ENVELOPE_SLACK};
use adp_core::hyp2f1::{asymptotic_main, Backend, HypPoint, PrefactoredF21};
use clap::Args;
use rayon::prelude::*;

use crate::report::{num, CommandError, Run};

#[derive(Args, Debug, Clone)]
pub struct CorollaryArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0])]
    pub r_list: Vec<f64>,
    #[arg(long, default_value_t = 100.0)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1.0e4)]
    pub y_max: f64,
    /// Log-spaced points in [y_min, y_max].
    #[arg(long, default_value_t = 30)]
    pub grid_points: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

struct Sample {
    abs_diff: f64,
    backend: Backend,
}

/// `|prefactored F - main term|` at every `y`, sharing one evaluator.
fn scan(r: f64, ys: &[f64]) -> Vec<adp_core::Result<Sample>> {
    let top = ys.iter().copied().fold(0.0, f64::max);
    let ev = match PrefactoredF21::new(r, top) {
        Ok(ev) => ev,
        Err(e) => return ys.iter().map(|_| Err(e.clone())).collect(),
    };
    ys.par_iter()
        .map(|&y| {
            let v = ev.evaluate(y)?;
            let main = asymptotic_main(HypPoint::new(r, y)?)?;
            Ok(Sample { abs_diff: (v.value - main).norm(), backend: v.backend })
        })
        .collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

pub fn run(args: &CorollaryArgs, run: &mut Run) -> Result<(), CommandError> {
    run.list_param("r-list", &args.r_list);
    run.param("y-min", args.y_min);
    run.param("y-max", args.y_max);
    run.param("grid-points", args.grid_points);
    if args.r_list.is_empty() || args.r_list.iter().any(|r| !(1.0..=100.0).contains(r)) {
        return Err(CommandError::Usage("--r-list needs values in [1, 100]".into()));
    }
    if !(args.y_min > 1.0 && args.y_min < args.y_max && args.y_max <= 1e6) {
        return Err(CommandError::Usage(format!(
            "need 1 < y-min < y-max <= 1e6, got [{}, {}]",
            args.y_min, args.y_max
        )));
    }
    if args.grid_points < 2 {
        return Err(CommandError::Usage("--grid-points needs at least 2".into()));
    }

    let fine = log_grid(args.y_min, args.y_max, args.grid_points);
    // three calibration points over the first decade
    let coarse = [args.y_min, args.y_min * 10f64.sqrt(), args.y_min * 10.0];
    let mut table = Vec::new();
    for &r in &args.r_list {
        let mut ys = fine.clone();
        ys.extend(coarse);
        let results = scan(r, &ys);
        let (fine_res, coarse_res) = results.split_at(fine.len());
        let mut scaled_fine = Vec::new();
        let mut scaled_coarse = Vec::new();
        let mut failures = Vec::new();
        for (&y, res) in fine.iter().zip(fine_res) {
            match res {
                Ok(s) => {
                    let ratio = s.abs_diff * y / r;
                    scaled_fine.push(ratio);
                    table.push(vec![num(r), num(y), num(s.abs_diff), num(r / y), num(ratio), s.backend.name().into()]);
                }
                Err(e) => failures.push(format!("y = {y}: {e}")),
            }
        }
        for (&y, res) in coarse.iter().zip(coarse_res) {
            match res {
                Ok(s) => scaled_coarse.push(s.abs_diff * y / r),
                Err(e) => failures.push(format!("calibration y = {y}: {e}")),
            }
        }
        if !failures.is_empty() {
            run.check(format!("evaluate_r{r}"), false, failures.join("; "));
        }
        let env = calibrate_then_assert(&scaled_coarse, &scaled_fine, ENVELOPE_SLACK);
        run.check(
            format!("envelope_r{r}"),
            failures.is_empty() && env.passes(),
            format!("C_fine {:.6e}, C_coarse {:.6e}, growth {:.4}", env.observed, env.calibrated, env.growth()),
        );
    }
    run.write_csv("corollary_scan.csv", &["r", "y", "abs_diff", "r_over_y", "ratio", "backend"], &table)
}
