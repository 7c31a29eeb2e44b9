use std::path::PathBuf;

use adp_core::envelope::{calibrate_then_assert, ENVELOPE_SLACK};
use adp_core::lambda::{lambda, lambda_envelope, LambdaPoint, SmoothCutoff, DEFAULT_DELTA};
use clap::Args;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::report::{num, CommandError, Run};

/// Points where the envelope constant is calibrated.
pub const CALIBRATION: [(f64, f64); 2] = [(5.0, 0.1), (10.0, 1.0)];
pub const CONJUGATION_TOL: f64 = 1e-9;

#[derive(Args, Debug, Clone)]
pub struct LambdaArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0, 20.0, 50.0])]
    pub r_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-2, 0.1, 1.0, 10.0])]
    pub z_list: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

struct Point {
    value: Complex64,
    mirrored: Complex64,
}

pub fn run(args: &LambdaArgs, run: &mut Run) -> Result<(), CommandError> {
    run.list_param("r-list", &args.r_list);
    run.list_param("z-list", &args.z_list);
    run.param("delta", args.delta);
    if args.r_list.is_empty() || args.z_list.is_empty() {
        return Err(CommandError::Usage("--r-list and --z-list must be non-empty".into()));
    }
    if args.r_list.iter().any(|r| !(2.0..=100.0).contains(r)) {
        return Err(CommandError::Usage("--r-list needs values in [2, 100]".into()));
    }
    if args.z_list.iter().any(|z| !(1e-3..=10.0).contains(z)) {
        return Err(CommandError::Usage("--z-list needs values in [1e-3, 10]".into()));
    }
    let cutoff = SmoothCutoff::new(args.delta).map_err(|e| CommandError::Usage(e.to_string()))?;

    let grid: Vec<(f64, f64)> = args.r_list.iter().flat_map(|&r| args.z_list.iter().map(move |&z| (r, z))).collect();
    let eval = |&(r, z): &(f64, f64)| -> adp_core::Result<Point> {
        Ok(Point {
            value: lambda(LambdaPoint::new(r, z)?, cutoff)?,
            mirrored: lambda(LambdaPoint::new(-r, z)?, cutoff)?,
        })
    };
    let results: Vec<_> = grid.par_iter().map(eval).collect();
    let calibration: Vec<_> = CALIBRATION
        .par_iter()
        .map(|&(r, z)| lambda(LambdaPoint::new(r, z)?, cutoff).map(|l| l.norm() / lambda_envelope(r, z)))
        .collect();

    let mut table = Vec::new();
    let mut ratios = Vec::new();
    let mut failures = Vec::new();
    let mut worst_conj: f64 = 0.0;
    for (&(r, z), res) in grid.iter().zip(&results) {
        match res {
            Ok(p) => {
                let env = lambda_envelope(r, z);
                let ratio = p.value.norm() / env;
                ratios.push(ratio);
                worst_conj = worst_conj.max((p.value - p.mirrored.conj()).norm() / p.value.norm());
                table.push(vec![
                    num(r),
                    num(z),
                    num(p.value.re),
                    num(p.value.im),
                    num(p.value.norm()),
                    num(env),
                    num(ratio),
                ]);
            }
            Err(e) => failures.push(format!("(r, Z) = ({r}, {z}): {e}")),
        }
    }
    let calibrated: Vec<f64> = calibration
        .iter()
        .zip(CALIBRATION)
        .filter_map(|(c, (r, z))| match c {
            Ok(v) => Some(*v),
            Err(e) => {
                failures.push(format!("calibration (r, Z) = ({r}, {z}): {e}"));
                None
            }
        })
        .collect();
    if !failures.is_empty() {
        run.check("evaluate", false, failures.join("; "));
    }
    let env = calibrate_then_assert(&calibrated, &ratios, ENVELOPE_SLACK);
    run.check(
        "envelope",
        failures.is_empty() && env.passes(),
        format!("max ratio {:.6e}, calibrated {:.6e}, growth {:.4}", env.observed, env.calibrated, env.growth()),
    );
    run.check(
        "conjugation",
        failures.is_empty() && worst_conj <= CONJUGATION_TOL,
        format!("max relative asymmetry {worst_conj:.3e}"),
    );
    run.write_csv("lambda_scan.csv", &["r", "Z", "re", "im", "abs", "envelope", "ratio"], &table)
}
