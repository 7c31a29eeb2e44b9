use std::f64::consts::PI;
use std::path::PathBuf;

use adp_core::gamma::{digamma, ln_gamma, EULER_GAMMA};
use clap::Args;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{complex, num, CommandError, Run};

pub const CRITICAL_LINE_TOL: f64 = 1e-10;
pub const RECURRENCE_TOL: f64 = 1e-12;
const SPECIAL_TOL: f64 = 1e-14;

#[derive(Args, Debug, Clone)]
pub struct GammaArgs {
    /// Largest t on the critical-line grid.
    #[arg(long, default_value_t = 30.0)]
    pub t_max: f64,
    /// Number of critical-line points in [0, t_max].
    #[arg(long, default_value_t = 61)]
    pub grid: usize,
    /// Random points for the digamma recurrence.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

struct Row {
    check: &'static str,
    argument: String,
    observed: f64,
    expected: f64,
    tol: f64,
}

impl Row {
    fn abs_err(&self) -> f64 {
        (self.observed - self.expected).abs()
    }

    fn pass(&self) -> bool {
        self.abs_err() <= self.tol
    }
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
}

/// `|Γ(1/2+it)|² cosh(πt) / π`, assembled in log space.
fn critical_line_product(t: f64) -> Option<f64> {
    let lg = ln_gamma(Complex64::new(0.5, t)).ok()?;
    Some((2.0 * lg.re + ln_cosh(PI * t) - PI.ln()).exp())
}

pub fn run(args: &GammaArgs, run: &mut Run) -> Result<(), CommandError> {
    run.param("t-max", args.t_max);
    run.param("grid", args.grid);
    run.param("samples", args.samples);
    run.param("seed", args.seed);
    if !(args.t_max.is_finite() && args.t_max >= 0.0 && args.t_max <= 1e6) {
        return Err(CommandError::Usage(format!("--t-max {} must lie in [0, 1e6]", args.t_max)));
    }
    if args.grid < 2 {
        return Err(CommandError::Usage("--grid needs at least 2 points".into()));
    }

    let mut rows = Vec::new();
    for k in 0..args.grid {
        let t = args.t_max * k as f64 / (args.grid - 1) as f64;
        rows.push(Row {
            check: "critical_line",
            argument: num(t),
            observed: critical_line_product(t).unwrap_or(f64::NAN),
            expected: 1.0,
            tol: CRITICAL_LINE_TOL,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for _ in 0..args.samples {
        let z = Complex64::new(rng.gen_range(1.0..50.0), rng.gen_range(-100.0..100.0));
        let residual = match (digamma(z + 1.0), digamma(z)) {
            (Ok(a), Ok(b)) => (a - b - z.inv()).norm(),
            _ => f64::NAN,
        };
        rows.push(Row {
            check: "digamma_recurrence",
            argument: complex(z),
            observed: residual,
            expected: 0.0,
            tol: RECURRENCE_TOL,
        });
    }

    let special = [
        ("ln_gamma_one", Complex64::new(1.0, 0.0), ln_gamma(Complex64::new(1.0, 0.0)).map(|v| v.re), 0.0),
        ("ln_gamma_half", Complex64::new(0.5, 0.0), ln_gamma(Complex64::new(0.5, 0.0)).map(|v| v.re), 0.5 * PI.ln()),
        ("digamma_one", Complex64::new(1.0, 0.0), digamma(Complex64::new(1.0, 0.0)).map(|v| v.re), -EULER_GAMMA),
        (
            "digamma_half",
            Complex64::new(0.5, 0.0),
            digamma(Complex64::new(0.5, 0.0)).map(|v| v.re),
            -EULER_GAMMA - 2.0 * std::f64::consts::LN_2,
        ),
    ];
    for (check, z, value, expected) in special {
        rows.push(Row {
            check,
            argument: complex(z),
            observed: value.unwrap_or(f64::NAN),
            expected,
            tol: SPECIAL_TOL,
        });
    }

    for name in ["critical_line", "digamma_recurrence", "ln_gamma_one", "ln_gamma_half", "digamma_one", "digamma_half"]
    {
        let group: Vec<&Row> = rows.iter().filter(|r| r.check == name).collect();
        if group.is_empty() {
            continue;
        }
        let failed = group.iter().filter(|r| !r.pass()).count();
        let worst = group.iter().map(|r| r.abs_err()).fold(0.0, f64::max);
        run.check(name, failed == 0, format!("{} points, {failed} failed, max abs err {worst:.3e}", group.len()));
    }

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.check.to_string(),
                r.argument.clone(),
                num(r.observed),
                num(r.expected),
                num(r.abs_err()),
                r.pass().to_string(),
            ]
        })
        .collect();
    run.write_csv("gamma_checks.csv", &["check", "argument", "observed", "expected", "abs_err", "pass"], &table)
}
