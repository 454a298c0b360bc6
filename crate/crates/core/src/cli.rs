//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a numerical
//! certification fails (caustic near the origin, parameter at a critical value,
//! inconsistent census, or disagreeing counts), 1 on I/O failure.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::caustic::{affine_map, epicycloid_spec, sample_caustic};
use crate::census::{certify_zeros, CensusOptions};
use crate::family::FamilyParams;
use crate::output::{
    caustic_csv, census_csv, critical_values_csv, fmt_f64, sweep_csv, CausticDocument,
    CensusDocument, CountDocument, CriticalValuesDocument, SweepDocument, VerifyDocument,
    WindingDocument, SCHEMA_VERSION,
};
use crate::theorem::{
    critical_values, critical_values_closed_form, predicted_count_theorem, regime, sweep, verify,
    VerifyOptions,
};
use crate::winding::caustic_winding;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

pub const THREADS_ENV: &str = "HARMONIC_CENSUS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "harmonic-census",
    version,
    about = "Caustics, winding numbers and certified zero counts for the harmonic family f_a"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
}

#[derive(Debug, Args)]
struct ToleranceArgs {
    /// Residual tolerance relative to 1 + |a|.
    #[arg(long)]
    tol_f: Option<f64>,
    /// Jacobian singularity threshold relative to |h'|^2 + |g'|^2.
    #[arg(long)]
    tol_det: Option<f64>,
    /// Smallest cell diameter relative to the outer containment radius.
    #[arg(long)]
    cell_min: Option<f64>,
    #[arg(long)]
    critical_exclusion: Option<f64>,
    #[arg(long)]
    max_cells: Option<usize>,
}

impl ToleranceArgs {
    fn census_options(&self) -> Result<CensusOptions, Error> {
        let mut o = CensusOptions::default();
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidParams(format!("--{name} must be positive")))
            }
        };
        if let Some(v) = self.tol_f {
            o.tol_f_rel = positive("tol-f", v)?;
        }
        if let Some(v) = self.tol_det {
            o.tol_det_rel = positive("tol-det", v)?;
        }
        if let Some(v) = self.cell_min {
            o.cell_min_rel = positive("cell-min", v)?;
        }
        if let Some(v) = self.critical_exclusion {
            o.critical_exclusion = positive("critical-exclusion", v)?;
        }
        if let Some(v) = self.max_cells {
            o.max_cells = v;
        }
        Ok(o)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Adaptively sampled caustic f_a(unit circle).
    Caustic {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = PI / 4.0)]
        max_turn: f64,
        #[arg(long, default_value_t = 100_000)]
        max_points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Winding number of the caustic about the origin.
    Winding {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Critical parameter values a_1 < ... < a_N.
    CriticalValues {
        #[arg(long)]
        n: u32,
        /// Skip the winding-jump bisection cross-check.
        #[arg(long)]
        no_cross_check: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certified census of all zeros.
    Zeros {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        tolerances: ToleranceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Zero count predicted from the critical values.
    Count {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the predicted, winding-based and census counts.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        tolerances: ToleranceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify over a grid of a values.
    Sweep {
        #[arg(long)]
        n: u32,
        /// Grid spec "start:stop:count,log|lin".
        #[arg(long, conflicts_with = "values")]
        grid: Option<String>,
        /// Comma-separated list of a values.
        #[arg(long, value_delimiter = ',', required_unless_present = "grid")]
        values: Vec<f64>,
        #[command(flatten)]
        tolerances: ToleranceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Parses `start:stop:count[,log|lin]` into a list of values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let (range, scale) = match spec.split_once(',') {
        Some((r, s)) => (r, s.trim()),
        None => (spec, "lin"),
    };
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(format!(
            "grid {spec:?} is not of the form start:stop:count[,log|lin]"
        ));
    };
    let start: f64 = start
        .trim()
        .parse()
        .map_err(|e| format!("bad start: {e}"))?;
    let stop: f64 = stop.trim().parse().map_err(|e| format!("bad stop: {e}"))?;
    let count: usize = count
        .trim()
        .parse()
        .map_err(|e| format!("bad count: {e}"))?;
    if count == 0 {
        return Err("grid count must be positive".into());
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err("grid bounds must be finite".into());
    }
    let t = |k: usize| {
        if count == 1 {
            0.0
        } else {
            k as f64 / (count - 1) as f64
        }
    };
    match scale {
        "lin" => Ok((0..count).map(|k| start + (stop - start) * t(k)).collect()),
        "log" => {
            if start <= 0.0 || stop <= 0.0 {
                return Err("log grid needs positive bounds".into());
            }
            let (l0, l1) = (start.ln(), stop.ln());
            Ok((0..count)
                .map(|k| match k {
                    0 => start,
                    k if k + 1 == count => stop,
                    k => (l0 + (l1 - l0) * t(k)).exp(),
                })
                .collect())
        }
        other => Err(format!("unknown grid scale {other:?}")),
    }
}

enum Failure {
    Usage(String),
    Certification(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_certification_failure() {
            Failure::Certification(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

struct Emitted {
    body: String,
    /// Set when the document was produced but certifies a failure.
    failure: Option<String>,
}

fn json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn params(f: &FamilyArgs) -> Result<FamilyParams, Failure> {
    FamilyParams::new(f.n, f.a).map_err(Failure::from)
}

fn dispatch(command: &Command) -> Result<Emitted, Failure> {
    match command {
        Command::Caustic {
            family,
            max_turn,
            max_points,
            output,
        } => {
            let p = params(family)?;
            let curve = sample_caustic(&p, *max_turn, *max_points)?;
            let body = match output.format {
                Format::Json => json(&CausticDocument::new(
                    &curve,
                    epicycloid_spec(&p),
                    affine_map(&p),
                )),
                Format::Csv => caustic_csv(&curve),
            };
            Ok(Emitted {
                body,
                failure: None,
            })
        }
        Command::Winding { family, output } => {
            let p = params(family)?;
            let w = caustic_winding(&p)?;
            let doc = WindingDocument::new(p.n(), p.a(), &w);
            let body = match output.format {
                Format::Json => json(&doc),
                Format::Csv => format!(
                    "value,min_distance,refinements,status\n{},{},{},{}\n",
                    w.value,
                    fmt_f64(w.min_distance),
                    w.refinements,
                    if w.is_certified() {
                        "certified"
                    } else {
                        "near_origin"
                    }
                ),
            };
            Ok(Emitted {
                body,
                failure: (!w.is_certified())
                    .then(|| "caustic passes too close to the origin".to_string()),
            })
        }
        Command::CriticalValues {
            n,
            no_cross_check,
            output,
        } => {
            let table = if *no_cross_check {
                critical_values_closed_form(*n)?
            } else {
                critical_values(*n)?
            };
            let body = match output.format {
                Format::Json => json(&CriticalValuesDocument::new(&table)),
                Format::Csv => critical_values_csv(&table),
            };
            Ok(Emitted {
                body,
                failure: None,
            })
        }
        Command::Zeros {
            family,
            tolerances,
            output,
        } => {
            let p = params(family)?;
            let opts = tolerances.census_options()?;
            let (report, failure) = match certify_zeros(&p, &opts) {
                Ok(r) => {
                    let failure = (!r.consistent)
                        .then(|| "census total disagrees with the winding-based count".to_string());
                    (r, failure)
                }
                Err(Error::InconsistentCensus(r)) => {
                    let msg = format!("census is inconsistent: {}", r.warnings.join("; "));
                    (*r, Some(msg))
                }
                Err(e) => return Err(e.into()),
            };
            let body = match output.format {
                Format::Json => json(&CensusDocument::new(&report)),
                Format::Csv => census_csv(&report),
            };
            Ok(Emitted { body, failure })
        }
        Command::Count { family, output } => {
            let p = params(family)?;
            if p.a() < 1.0 {
                return Err(Failure::Usage(
                    "the predicted count needs a > 1; use `verify` for 0 < a < 1".into(),
                ));
            }
            let table = critical_values_closed_form(p.n())?;
            let count = predicted_count_theorem(p.n(), p.a(), &table)?;
            let doc = CountDocument {
                schema_version: SCHEMA_VERSION,
                n: p.n(),
                a: p.a(),
                count,
                regime: regime(p.n(), p.a(), &table),
            };
            let body = match output.format {
                Format::Json => json(&doc),
                Format::Csv => format!("n,a,count\n{},{},{}\n", p.n(), fmt_f64(p.a()), count),
            };
            Ok(Emitted {
                body,
                failure: None,
            })
        }
        Command::Verify {
            family,
            tolerances,
            output,
        } => {
            let p = params(family)?;
            let opts = VerifyOptions {
                census: tolerances.census_options()?,
            };
            let report = verify(&p, &opts)?;
            let doc = VerifyDocument::new(&report);
            let body = match output.format {
                Format::Json => json(&doc),
                Format::Csv => sweep_csv(&SweepDocument {
                    schema_version: SCHEMA_VERSION,
                    n: p.n(),
                    entries: vec![crate::output::SweepRow {
                        a: p.a(),
                        report: Some(doc.clone()),
                        error: None,
                    }],
                }),
            };
            Ok(Emitted {
                body,
                failure: (!report.agree).then(|| "counts disagree".to_string()),
            })
        }
        Command::Sweep {
            n,
            grid,
            values,
            tolerances,
            output,
        } => {
            let a_values = match grid {
                Some(g) => parse_grid(g).map_err(Failure::Usage)?,
                None => values.clone(),
            };
            for &a in &a_values {
                FamilyParams::new(*n, a)?;
            }
            let opts = VerifyOptions {
                census: tolerances.census_options()?,
            };
            let entries = sweep(*n, &a_values, &opts)?;
            let doc = SweepDocument::new(*n, &entries);
            let failed = doc
                .entries
                .iter()
                .filter(|e| e.error.is_some() || e.report.as_ref().is_some_and(|r| !r.agree))
                .count();
            let body = match output.format {
                Format::Json => json(&doc),
                Format::Csv => sweep_csv(&doc),
            };
            Ok(Emitted {
                body,
                failure: (failed > 0).then(|| format!("{failed} sweep entries failed")),
            })
        }
    }
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Caustic { output, .. }
        | Command::Winding { output, .. }
        | Command::CriticalValues { output, .. }
        | Command::Zeros { output, .. }
        | Command::Count { output, .. }
        | Command::Verify { output, .. }
        | Command::Sweep { output, .. } => output,
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Failure::Io(e.to_string()))
}

fn execute(command: &Command, stdout: &mut dyn Write) -> Result<Option<String>, Failure> {
    let emitted = match thread_pool()? {
        Some(pool) => pool.install(|| dispatch(command))?,
        None => dispatch(command)?,
    };
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    match &output_args(command).out {
        Some(path) => std::fs::write(path, &emitted.body).map_err(io)?,
        None => stdout.write_all(emitted.body.as_bytes()).map_err(io)?,
    }
    Ok(emitted.failure)
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(None) => EXIT_OK,
        Ok(Some(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CERTIFICATION
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Certification(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CERTIFICATION
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lin() {
        assert_eq!(parse_grid("1:3:3,lin").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("2:5:1").unwrap(), vec![2.0]);
    }

    #[test]
    fn grid_log() {
        let g = parse_grid("1.05:30:50,log").unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 1.05);
        assert_eq!(g[49], 30.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let ratio = g[1] / g[0];
        assert!((g[2] / g[1] - ratio).abs() < 1e-12);
    }

    #[test]
    fn grid_errors() {
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("0:2:5,log").is_err());
        assert!(parse_grid("1:2:5,cubic").is_err());
        assert!(parse_grid("x:2:5").is_err());
    }
}
