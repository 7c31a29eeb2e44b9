//! Check bookkeeping, CSV output and the run manifest.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const MANIFEST_NAME: &str = "run_manifest.txt";

/// Round-trip exact float text: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), num)
}

pub fn complex(z: num_complex::Complex64) -> String {
    format!("{}{:+.16e}i", num(z.re), z.im)
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Failure modes that abort a subcommand before its checks decide the exit status.
#[derive(Debug)]
pub enum CommandError {
    /// Bad flag values or an unusable output directory; exit status 2.
    Usage(String),
}

impl From<io::Error> for CommandError {
    fn from(e: io::Error) -> Self {
        CommandError::Usage(format!("output: {e}"))
    }
}

impl From<csv::Error> for CommandError {
    fn from(e: csv::Error) -> Self {
        CommandError::Usage(format!("output: {e}"))
    }
}

pub struct Run {
    subcommand: &'static str,
    params: Vec<(String, String)>,
    out_dir: PathBuf,
    started: SystemTime,
    checks: Vec<Check>,
    outputs: Vec<PathBuf>,
}

fn unix_seconds(t: SystemTime) -> String {
    let d = t.duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03}", d.as_secs(), d.subsec_millis())
}

impl Run {
    pub fn new(subcommand: &'static str, out_dir: &Path) -> Self {
        Run {
            subcommand,
            params: Vec::new(),
            out_dir: out_dir.to_path_buf(),
            started: SystemTime::now(),
            checks: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn list_param<T: Display>(&mut self, key: &str, values: &[T]) {
        let joined = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        self.param(key, joined);
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        let check = Check { name: name.into(), pass, detail: detail.into() };
        log::debug!("{} {}: {}", if check.pass { "PASS" } else { "FAIL" }, check.name, check.detail);
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Write a CSV with a fixed header into the output directory.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CommandError> {
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.outputs.push(path);
        Ok(())
    }

    /// Write `run_manifest.txt`; `status` is the process exit status.
    pub fn write_manifest(&self, status: i32) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(MANIFEST_NAME);
        let mut f = io::BufWriter::new(fs::File::create(&path)?);
        writeln!(f, "subcommand={}", self.subcommand)?;
        writeln!(f, "version={}", env!("CARGO_PKG_VERSION"))?;
        for (k, v) in &self.params {
            writeln!(f, "param.{k}={v}")?;
        }
        writeln!(f, "started_unix={}", unix_seconds(self.started))?;
        writeln!(f, "finished_unix={}", unix_seconds(SystemTime::now()))?;
        for c in &self.checks {
            writeln!(f, "check.{}={}", c.name, if c.pass { "pass" } else { "fail" })?;
        }
        for (i, p) in self.outputs.iter().enumerate() {
            writeln!(f, "output.{i}={}", p.display())?;
        }
        writeln!(f, "exit_status={status}")?;
        f.flush()?;
        Ok(path)
    }

    /// Pass/fail table on stderr.
    pub fn print_summary(&self) {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        eprintln!("{:width$}  result  detail", "check");
        for c in &self.checks {
            eprintln!("{:width$}  {:6}  {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        eprintln!("{} checks, {failed} failed", self.checks.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17);
        }
        assert_eq!(opt_num(None), "NA");
    }

    #[test]
    fn manifest_lists_outputs_and_checks() {
        let dir = tempfile::tempdir().unwrap();
        let mut run = Run::new("demo", dir.path());
        run.param("grid", 3);
        run.list_param("r-list", &[1.0, 2.5]);
        run.check("always", true, "");
        run.check("never", false, "x");
        run.write_csv("t.csv", &["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        assert!(!run.all_pass());
        let path = run.write_manifest(1).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.contains("param.r-list=1,2.5\n"));
        assert!(text.contains("check.never=fail\n"));
        assert!(text.contains("t.csv"));
        assert!(text.ends_with("exit_status=1\n"));
        let csv_text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(csv_text, "a,b\n1,\"x,y\"\n");
    }
}
