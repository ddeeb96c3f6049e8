//! Command-line front end. [`run`] does all the work and returns the exit
//! status with the text destined for stdout and stderr, so the binary is a
//! thin shell around it.
//!
//! Exit status: 0 on success, 1 on parse or validation errors, 2 when an
//! inequality is violated (`check`, `fuzz`) or the two edge computations
//! disagree (`fuzz`).

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bands::{band_structure, Spectrum};
use crate::discriminant::dispersion_table;
use crate::error::{Error, Result};
use crate::estimates::{check_estimates, EstimateReport, InequalityId, DEFAULT_RELATIVE_TOLERANCE};
use crate::fuzz::{default_start, fuzz_estimates, sharpness_search, FuzzConfig, FuzzReport};
use crate::instance::PeriodicJacobi;
use crate::perturbation::{theorem1_csv, theorem1_instance, theorem1_report};
use crate::report::fmt_num;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "jacobi-spectra", version, about = "Band/gap structure of periodic Jacobi matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bands, gaps and measures of one instance.
    Bands {
        #[command(flatten)]
        input: InstanceSource,
        #[command(flatten)]
        output: Output,
    },
    /// All gap inequalities for one instance.
    Check {
        #[command(flatten)]
        input: InstanceSource,
        #[command(flatten)]
        output: Output,
        /// Relative tolerance; a violation needs slack < -tol (1 + r).
        #[arg(long, default_value_t = DEFAULT_RELATIVE_TOLERANCE)]
        tol: f64,
    },
    /// Dispersion curves lambda_i(k) on a uniform grid over [0, pi].
    Dispersion {
        #[command(flatten)]
        input: InstanceSource,
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value_t = 201)]
        kpoints: usize,
    },
    /// Weak-bond family against its first-order gap law.
    Theorem1 {
        #[arg(long)]
        p: usize,
        /// Comma-separated values in (0, 1).
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Randomized campaign over all inequalities.
    Fuzz {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Fixes the period (sets both --p-min and --p-max).
        #[arg(long, conflicts_with_all = ["p_min", "p_max"])]
        p: Option<usize>,
        #[arg(long, default_value_t = 2)]
        p_min: usize,
        #[arg(long, default_value_t = 12)]
        p_max: usize,
        #[arg(long, default_value_t = 1e-3)]
        a_lo: f64,
        #[arg(long, default_value_t = 1e3)]
        a_hi: f64,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        b_lo: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        b_hi: f64,
        #[arg(long, default_value_t = DEFAULT_RELATIVE_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Random descent on the slack of one inequality.
    Sharpness {
        #[arg(long, default_value = "estc")]
        inequality: InequalityId,
        /// Period of the default start point.
        #[arg(long, default_value_t = 4)]
        p: usize,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Start point as inline JSON instead of the default.
        #[arg(long, conflicts_with = "file")]
        instance: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct InstanceSource {
    /// Inline JSON `{"a": [...], "b": [...]}`.
    #[arg(long, conflicts_with_all = ["file", "p"])]
    pub instance: Option<String>,
    /// Path to a JSON instance.
    #[arg(long, conflicts_with = "p")]
    pub file: Option<PathBuf>,
    /// Generated instance: the free operator of period p, or with --c the
    /// weak-bond family member.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, requires = "p")]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl std::fmt::Display) -> Self {
        Self { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
                }
                _ => {
                    let line = text.lines().next().unwrap_or("invalid arguments");
                    Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("{line}\n") }
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(out) => out,
        Err(e) => Outcome::usage(e),
    }
}

struct Report {
    text: String,
    code: i32,
    note: String,
}

fn execute(command: Command) -> Result<Outcome> {
    let (report, output) = match command {
        Command::Bands { input, output } => {
            let s = band_structure(&input.load()?)?;
            let text = match output.format(Format::Json) {
                Format::Json => s.to_json(),
                Format::Csv => spectrum_csv(&s),
            };
            (Report { text, code: EXIT_OK, note: String::new() }, output)
        }
        Command::Check { input, output, tol } => {
            check_tolerance(tol)?;
            let j = input.load()?;
            let r = check_estimates(&j, &band_structure(&j)?, tol);
            let text = match output.format(Format::Json) {
                Format::Json => r.to_json(),
                Format::Csv => format!("{}\n{}\n", EstimateReport::csv_header(), r.csv_row(j.period())),
            };
            let code = check_exit_code(&r);
            let note = r
                .violated
                .iter()
                .map(|id| format!("violated: {id} (slack {})\n", fmt_num(r.slack(*id))))
                .collect();
            (Report { text, code, note }, output)
        }
        Command::Dispersion { input, output, kpoints } => {
            let t = dispersion_table(&input.load()?, kpoints)?;
            let text = match output.format(Format::Csv) {
                Format::Csv => t.to_csv(),
                Format::Json => pretty(&json!({ "k": t.k, "lambda": t.values })),
            };
            (Report { text, code: EXIT_OK, note: String::new() }, output)
        }
        Command::Theorem1 { p, c, output } => {
            let rows = theorem1_report(p, &c)?;
            let text = match output.format(Format::Csv) {
                Format::Csv => theorem1_csv(&rows),
                Format::Json => pretty(&rows),
            };
            (Report { text, code: EXIT_OK, note: String::new() }, output)
        }
        Command::Fuzz { trials, seed, p, p_min, p_max, a_lo, a_hi, b_lo, b_hi, tol, output } => {
            let (p_min, p_max) = p.map_or((p_min, p_max), |p| (p, p));
            let cfg = FuzzConfig {
                trials,
                p_min,
                p_max,
                a_lo,
                a_hi,
                b_lo,
                b_hi,
                seed,
                rel_tol: tol,
                ..FuzzConfig::default()
            };
            let started = Instant::now();
            let r = fuzz_estimates(&cfg)?;
            let elapsed = started.elapsed().as_secs_f64();
            let text = match output.format(Format::Json) {
                Format::Json => r.to_json(),
                Format::Csv => r.trials_csv(),
            };
            let code = fuzz_exit_code(&r);
            let note = format!(
                "{} trials in {elapsed:.3} s: {} violations, {} oracle mismatches, {} failures\n",
                r.trials_run,
                r.violations.len(),
                r.oracle_mismatches.len(),
                r.failures.len()
            );
            (Report { text, code, note }, output)
        }
        Command::Sharpness { inequality, p, iterations, seed, instance, file, output } => {
            let start = match (instance, file) {
                (Some(text), _) => PeriodicJacobi::from_json(&text)?,
                (None, Some(path)) => PeriodicJacobi::from_json(&read(&path)?)?,
                (None, None) => default_start(inequality, p)?,
            };
            let r = sharpness_search(inequality, start, iterations, seed)?;
            let text = match output.format(Format::Json) {
                Format::Json => pretty(&r),
                Format::Csv => r.trace_csv(),
            };
            let note = format!("best {inequality} slack {}\n", fmt_num(r.best_slack));
            (Report { text, code: EXIT_OK, note }, output)
        }
    };
    let mut report = report;
    if !report.text.ends_with('\n') {
        report.text.push('\n');
    }
    let mut stdout = String::new();
    match &output.out {
        Some(path) => std::fs::write(path, &report.text)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))?,
        None => stdout = report.text,
    }
    Ok(Outcome { code: report.code, stdout, stderr: report.note })
}

impl InstanceSource {
    fn load(&self) -> Result<PeriodicJacobi> {
        match (&self.instance, &self.file, self.p, self.c) {
            (Some(text), None, None, None) => PeriodicJacobi::from_json(text),
            (None, Some(path), None, None) => PeriodicJacobi::from_json(&read(path)?),
            (None, None, Some(p), Some(c)) => theorem1_instance(p, c),
            (None, None, Some(p), None) => PeriodicJacobi::free(p),
            _ => {
                Err(Error::InvalidConfig("an instance is required: --instance, --file, or --p [--c]".into()))
            }
        }
    }
}

impl Output {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn check_exit_code(r: &EstimateReport) -> i32 {
    if r.violated.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn fuzz_exit_code(r: &FuzzReport) -> i32 {
    if r.is_clean() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("tolerance must be finite and nonnegative, got {tol}")))
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))
}

fn pretty<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("kind,index,lo,hi,length\n");
    let mut row = |kind: &str, i: usize, lo: f64, hi: f64| {
        out.push_str(&format!("{kind},{i},{},{},{}\n", fmt_num(lo), fmt_num(hi), fmt_num(hi - lo)));
    };
    for (i, b) in s.bands.iter().enumerate() {
        row("band", i + 1, b.lo, b.hi);
    }
    for (i, g) in s.gaps.iter().enumerate() {
        row("gap", i + 1, g.lo, g.hi);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzz::fuzz_instances;

    #[test]
    fn violations_map_to_exit_2() {
        let j = PeriodicJacobi::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let mut r = check_estimates(&j, &band_structure(&j).unwrap(), DEFAULT_RELATIVE_TOLERANCE);
        assert_eq!(check_exit_code(&r), EXIT_OK);
        r.violated.push(InequalityId::Estc);
        assert_eq!(check_exit_code(&r), EXIT_VIOLATION);

        let mut f = fuzz_instances([(0, j)], DEFAULT_RELATIVE_TOLERANCE, 1e-8);
        assert_eq!(fuzz_exit_code(&f), EXIT_OK);
        f.oracle_mismatches.push(crate::fuzz::OracleMismatch {
            trial: 0,
            instance: PeriodicJacobi::free(2).unwrap(),
            max_deviation: 1.0,
        });
        assert_eq!(fuzz_exit_code(&f), EXIT_VIOLATION);
    }
}
