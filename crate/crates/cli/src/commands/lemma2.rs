use std::path::PathBuf;

use adp_core::envelope::{calibrate_then_assert, ENVELOPE_SLACK};
use adp_core::mb_integral::{
    exponent_profile, integral_i, majorant_decomposition, MajorantBreakdown, RemainderKernel, MAX_R, MIN_R,
};
use clap::Args;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::report::{num, CommandError, Run};

/// Points where the `|I| y / r` constant is calibrated.
pub const CALIBRATION: [(f64, f64); 2] = [(2.0, 10.0), (5.0, 100.0)];
/// `|I| <= 2 · total / y`: the majorant omits a factor of at most 4π against the `1/2π` normalization.
pub const MAJORANT_CONSTANT: f64 = 2.0;

#[derive(Args, Debug, Clone)]
pub struct Lemma2Args {
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0, 20.0, 50.0])]
    pub r_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0, 1000.0])]
    pub y_list: Vec<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

struct PerR {
    breakdown: MajorantBreakdown,
    values: Vec<Complex64>,
}

fn evaluate(r: f64, ys: &[f64]) -> adp_core::Result<PerR> {
    let breakdown = majorant_decomposition(r)?;
    let top = ys.iter().copied().fold(0.0, f64::max);
    let kernel = RemainderKernel::new(r, top)?;
    let values = ys.iter().map(|&y| kernel.evaluate(y).map(|e| e.value)).collect::<adp_core::Result<_>>()?;
    Ok(PerR { breakdown, values })
}

/// The four-case form of the exponent profile.
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

/// Largest `piece(r) · r^power` on the checked `r` against the first two.
fn piece_scaling(rs: &[f64], per_r: &[PerR], piece: usize, power: f64) -> (bool, String) {
    let mut pairs: Vec<(f64, f64)> =
        rs.iter().zip(per_r).map(|(&r, p)| (r, p.breakdown.pieces[piece] * r.powf(power))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scaled: Vec<f64> = pairs.into_iter().map(|p| p.1).collect();
    let env = calibrate_then_assert(&scaled[..2], &scaled[2..], ENVELOPE_SLACK);
    (env.passes(), format!("max {:.6e}, calibrated {:.6e}, growth {:.4}", env.observed, env.calibrated, env.growth()))
}

pub fn run(args: &Lemma2Args, run: &mut Run) -> Result<(), CommandError> {
    run.list_param("r-list", &args.r_list);
    run.list_param("y-list", &args.y_list);
    if args.r_list.is_empty() || args.y_list.is_empty() {
        return Err(CommandError::Usage("--r-list and --y-list must be non-empty".into()));
    }
    if args.r_list.iter().any(|r| !(MIN_R..=MAX_R).contains(r)) {
        return Err(CommandError::Usage(format!("--r-list needs values in [{MIN_R}, {MAX_R}]")));
    }
    if args.y_list.iter().any(|y| !(1.0..=1e6).contains(y)) {
        return Err(CommandError::Usage("--y-list needs values in [1, 1e6]".into()));
    }

    let rs = &args.r_list;
    let per_r: Vec<_> = rs.par_iter().map(|&r| evaluate(r, &args.y_list)).collect();
    let calibration: Vec<_> =
        CALIBRATION.par_iter().map(|&(r, y)| integral_i(r, y).map(|i| i.norm() * y / r)).collect();

    let mut failures = Vec::new();
    let mut ok_r = Vec::new();
    let mut ok = Vec::new();
    for (&r, res) in rs.iter().zip(per_r) {
        match res {
            Ok(p) => {
                ok_r.push(r);
                ok.push(p);
            }
            Err(e) => failures.push(format!("r = {r}: {e}")),
        }
    }
    let calibrated: Vec<f64> = calibration
        .into_iter()
        .zip(CALIBRATION)
        .filter_map(|(c, (r, y))| {
            c.map_err(|e| failures.push(format!("calibration (r, y) = ({r}, {y}): {e}"))).ok()
        })
        .collect();

    let mut table = Vec::new();
    let mut scaled = Vec::new();
    let mut worst_majorant: f64 = 0.0;
    let mut worst_share: f64 = 1.0;
    for (&r, p) in ok_r.iter().zip(&ok) {
        let b = &p.breakdown;
        worst_share = worst_share.min(b.dominant() / b.total);
        for (&y, i) in args.y_list.iter().zip(&p.values) {
            let ratio = i.norm() * y / r;
            scaled.push(ratio);
            worst_majorant = worst_majorant.max(i.norm() * y / (MAJORANT_CONSTANT * b.total));
            table.push(vec![
                num(r),
                num(y),
                num(i.norm()),
                num(r / y),
                num(ratio),
                num(b.pieces[1]),
                num(b.pieces[2]),
                num(b.pieces[3]),
                num(b.total),
            ]);
        }
    }

    if !failures.is_empty() {
        run.check("evaluate", false, failures.join("; "));
    }
    let clean = failures.is_empty();
    let env = calibrate_then_assert(&calibrated, &scaled, ENVELOPE_SLACK);
    run.check(
        "envelope",
        clean && env.passes(),
        format!("max |I|y/r {:.6e}, calibrated {:.6e}, growth {:.4}", env.observed, env.calibrated, env.growth()),
    );
    run.check(
        "majorant_validity",
        clean && worst_majorant <= 1.0 + 1e-6,
        format!("max |I|y / (2 total) = {worst_majorant:.6}"),
    );
    run.check("dominance", clean && worst_share >= 0.5, format!("min (I2+I3+I4)/total = {worst_share:.6}"));
    if ok_r.len() >= 3 {
        for (name, piece, power) in [("scaling_I2", 1, 1.5), ("scaling_I3", 2, -1.0), ("scaling_I4", 3, -1.0)] {
            let (pass, detail) = piece_scaling(&ok_r, &ok, piece, power);
            run.check(name, clean && pass, detail);
        }
    }
    let mut profile_ok = true;
    let mut profile_err: f64 = 0.0;
    for &r in rs {
        for t in [1.0, -0.5 * r, -1.5 * r, -3.0 * r, 0.0, -r, -2.0 * r] {
            let err = (exponent_profile(r, t) - profile_cases(r, t)).abs();
            profile_ok &= err <= 1e-14 * (1.0 + r);
            profile_err = profile_err.max(err);
        }
    }
    run.check("exponent_profile", profile_ok, format!("max deviation {profile_err:.3e}"));

    run.write_csv(
        "lemma2_scan.csv",
        &["r", "y", "abs_I", "r_over_y", "ratio", "I2", "I3", "I4", "total_majorant"],
        &table,
    )
}
