//! The `opconn` command line.
//!
//! Every verb prints one pretty-printed JSON document. Exit codes: 0 on
//! success, 2 when a solve ends in a range violation or hits a
//! non-cancellable connection, 1 on any input error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::axioms::verify_axioms;
use crate::classify::{classify_connection, projection_fixed_points, regularity_witness};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::matfile::read_matrix;
use crate::measure::{fn_from_measure, FiniteMeasure};
use crate::solver::{solve_left, solve_right, SolveStatus};
use crate::symmetric::{PdMatrix, PsdMatrix, Tolerances};

const GRAMMAR: &str = "\
connection: --fn KIND[:param=value,...] and/or --measure MEASURE
  kinds: constant:k  scalar_identity:k  arithmetic:alpha  geometric:alpha
         harmonic:alpha  quasi_arithmetic:p=..,alpha=..  logarithmic
         dual_logarithmic; any kind also takes scale=k
  measure: atoms=[(t,w),...] density=arcsine|uniform|table:[(t,v),...]
           nodes=N scale=c
matrix files: {\"dim\": n, \"rows\": [[...], ...]}";

#[derive(Debug, Parser)]
#[command(name = "opconn", version, about = "Operator connections on positive semidefinite matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate A σ B.
    Eval(MatrixArgs),
    /// Solve A σ X = B.
    Solve(MatrixArgs),
    /// Solve X σ A = B.
    SolveRight(MatrixArgs),
    /// Cancellability and regularity of a connection.
    Classify(RandomArgs),
    /// Check the connection axioms on random matrices.
    Verify(RandomArgs),
    /// Analyze a representing function and evaluate it at points.
    Fn(PointArgs),
    /// Evaluate the function represented by a measure.
    MeasureFn(PointArgs),
}

#[derive(Debug, Args)]
struct ConnectionArgs {
    /// Representing function, e.g. `geometric:0.5`.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Associated measure, e.g. `atoms=[(0,0.5),(1,0.5)]`.
    #[arg(long)]
    measure: Option<String>,
    #[arg(long = "tol-psd")]
    tol_psd: Option<f64>,
    #[arg(long = "tol-order")]
    tol_order: Option<f64>,
    #[arg(long = "tol-range")]
    tol_range: Option<f64>,
    #[arg(long = "tol-solve")]
    tol_solve: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    #[command(flatten)]
    conn: ConnectionArgs,
    #[arg(long = "A")]
    a: PathBuf,
    #[arg(long = "B")]
    b: PathBuf,
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[command(flatten)]
    conn: ConnectionArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    conn: ConnectionArgs,
    /// Points at which to evaluate, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
}

impl ConnectionArgs {
    fn tolerances(&self) -> Result<Tolerances> {
        let d = Tolerances::default();
        let t = Tolerances {
            psd_tol: self.tol_psd.unwrap_or(d.psd_tol),
            order_tol: self.tol_order.unwrap_or(d.order_tol),
            range_tol: self.tol_range.unwrap_or(d.range_tol),
            solve_rtol: self.tol_solve.unwrap_or(d.solve_rtol),
        };
        t.validate()?;
        Ok(t)
    }

    fn measure(&self) -> Result<Option<FiniteMeasure>> {
        self.measure.as_deref().map(str::parse).transpose()
    }

    fn connection(&self) -> Result<Connection> {
        let c = match (&self.function, self.measure()?) {
            (Some(f), None) => f.parse::<Connection>()?,
            (Some(f), Some(mu)) => {
                let c = f.parse::<Connection>()?;
                let f = c.function().cloned().expect("parsed from a function");
                Connection::from_parts(f, mu)?.with_scale(c.scale())?
            }
            (None, Some(mu)) => Connection::from_measure(mu),
            (None, None) => {
                return Err(Error::InvalidParameter("one of --fn or --measure is required".into()))
            }
        };
        c.with_tolerances(self.tolerances()?)
    }
}

/// Outcome of a verb: the report and the exit code it implies.
struct Outcome {
    report: serde_json::Value,
    code: i32,
}

impl Outcome {
    fn ok(report: impl Serialize) -> Result<Self> {
        Ok(Self {
            report: to_value(report)?,
            code: 0,
        })
    }
}

fn to_value(v: impl Serialize) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(format!("report serialization: {e}")))
}

fn load(path: &Path, tol: f64) -> Result<(PsdMatrix, f64)> {
    let file = read_matrix(path)?;
    Ok((PsdMatrix::new(file.matrix, tol)?, file.asymmetry))
}

fn matrix_verb(cmd: &Command, args: &MatrixArgs) -> Result<Outcome> {
    let sigma = args.conn.connection()?;
    let tol = sigma.tolerances().psd_tol;
    let (a, asym_a) = load(&args.a, tol)?;
    let (b, asym_b) = load(&args.b, tol)?;
    let asymmetry = json!({ "A": asym_a, "B": asym_b });
    if let Command::Eval(_) = cmd {
        let value = sigma.evaluate(&a, &b)?;
        return Outcome::ok(json!({
            "connection": sigma.label(),
            "input_asymmetry": asymmetry,
            "result": value,
        }));
    }
    let a = PdMatrix::from_psd(a, tol)?;
    let report = match cmd {
        Command::Solve(_) => solve_left(&sigma, &a, &b)?,
        _ => solve_right(&sigma, &a, &b)?,
    };
    let code = match report.status {
        SolveStatus::UniqueSolution => 0,
        SolveStatus::RangeViolation | SolveStatus::NotCancellable => 2,
    };
    Ok(Outcome {
        report: json!({
            "connection": sigma.label(),
            "input_asymmetry": asymmetry,
            "report": to_value(&report)?,
        }),
        code,
    })
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Eval(m) | Command::Solve(m) | Command::SolveRight(m) => matrix_verb(cmd, m),
        Command::Classify(r) => {
            let sigma = r.conn.connection()?;
            let mut report = json!({
                "classification": to_value(classify_connection(&sigma))?,
                "regularity": to_value(regularity_witness(&sigma, r.dim, r.seed)?)?,
            });
            if sigma.is_mean() {
                report["projections"] = to_value(projection_fixed_points(&sigma, r.dim, r.seed)?)?;
            }
            Outcome::ok(report)
        }
        Command::Verify(r) => {
            let sigma = r.conn.connection()?;
            let report = verify_axioms(&sigma, r.trials, r.dim, r.seed)?;
            Outcome::ok(json!({
                "all_pass": report.all_pass(),
                "report": to_value(&report)?,
            }))
        }
        Command::Fn(p) => {
            let sigma = p.conn.connection()?;
            let (props, range) = sigma.analyze();
            let values = p
                .x
                .iter()
                .map(|&x| Ok(json!({ "x": x, "f": sigma.representing_value(x)? })))
                .collect::<Result<Vec<_>>>()?;
            Outcome::ok(json!({
                "connection": sigma.label(),
                "properties": to_value(props)?,
                "range": to_value(range)?,
                "values": values,
            }))
        }
        Command::MeasureFn(p) => {
            let mu = p.conn.measure()?.ok_or_else(|| {
                Error::InvalidParameter("measure-fn requires --measure".into())
            })?;
            let values = p
                .x
                .iter()
                .map(|&x| Ok(json!({ "x": x, "f": fn_from_measure(&mu, x)? })))
                .collect::<Result<Vec<_>>>()?;
            Outcome::ok(json!({
                "measure": mu.to_string(),
                "mass": mu.mass(),
                "is_probability": mu.is_probability(),
                "values": values,
            }))
        }
    }
}

fn out_path(cmd: &Command) -> Option<&Path> {
    let conn = match cmd {
        Command::Eval(m) | Command::Solve(m) | Command::SolveRight(m) => &m.conn,
        Command::Classify(r) | Command::Verify(r) => &r.conn,
        Command::Fn(p) | Command::MeasureFn(p) => &p.conn,
    };
    conn.out.as_deref()
}

/// Runs the command line `args` (program name first), writing the report to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(err, "{e}\n{GRAMMAR}");
            return 1;
        }
    };
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("json value") + "\n";
    match out_path(&cli.command) {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if outcome.code == 2 {
        let _ = writeln!(err, "no solution: see report status");
    }
    outcome.code
}
