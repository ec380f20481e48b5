//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 numeric
//! or I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::config::{config_path, config_tokens, inject, load_config};
use super::format::{fmt_sig, to_json};
use super::grid::{sample_surface, write_sample_csv, SamplingGrid};
use super::mesh::{export_obj, mesh_lines, write_svg, MeshData, Projection};
use super::report::{run_audit, AuditOptions};
use crate::error::Error;
use crate::immersion::CoordinateOffset;
use crate::spinor::{potential_condition, DiracConvention};
use crate::torus::conditions::{amplitude_conditions_residual, consistency_residual};
use crate::torus::dehn::{dehn_invariance_check, dehn_twist};
use crate::torus::{build_solution_with_mode, DehnTwist, ExponentMode, Lattice, RealityBranch, TorusParameters};
use crate::C64;

#[derive(Debug, Parser)]
#[command(name = "weier-torus", version, about = "Bloch-wave tori in R^4: construction, sampling and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print wave vectors, amplitudes and p^2.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Run every audit and emit a JSON report.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Audit(AuditArgs),
    /// Sample the surface on a grid (CSV).
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Sample(SampleArgs),
    /// Export a projected quad mesh (OBJ or SVG).
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Mesh(MeshArgs),
    /// Apply a Dehn twist and compare p^2 before and after.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Dehn(DehnArgs),
    /// Sweep a (and optionally b) and tabulate residuals and p^2.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Obj,
    Svg,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = std::f64::consts::PI)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda2: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, default_value_t = 1)]
    n: i64,
    #[arg(long = "c-re", default_value_t = 1.0)]
    c_re: f64,
    #[arg(long = "c-im", default_value_t = 0.0)]
    c_im: f64,
    /// Use phi2 exponent k1 z + h2 zbar exactly as printed.
    #[arg(long)]
    strict_print: bool,
    /// Impose b = +ra or b = -ra (r = lambda2/lambda1), or leave b free.
    #[arg(long, default_value = "free", value_parser = parse_from_str::<RealityBranch>)]
    reality_branch: RealityBranch,
    #[arg(long, default_value = "B", value_parser = parse_from_str::<DiracConvention>)]
    convention: DiracConvention,
    #[arg(long)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file of flag defaults; command-line flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Omit timestamps so identical invocations give identical bytes.
    #[arg(long)]
    deterministic: bool,
}

impl Common {
    fn params(&self) -> crate::Result<TorusParameters> {
        let lattice = Lattice::new(self.lambda1, self.lambda2)?;
        let p = TorusParameters::new(lattice, self.a, self.b, self.n, C64::new(self.c_re, self.c_im))?;
        Ok(self.reality_branch.apply(p))
    }

    fn mode(&self) -> ExponentMode {
        if self.strict_print {
            ExponentMode::StrictPrint
        } else {
            ExponentMode::Shared
        }
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!("--format {f:?} is not available for this command").to_lowercase()))
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[command(flatten)]
    common: Common,
    /// Absolute tolerance handed to the contour integrator.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Per-check tolerance override, `CHECK_ID=VALUE`; repeatable.
    #[arg(long = "check-tol", value_parser = parse_check_tol)]
    check_tol: Vec<(String, f64)>,
    /// Evaluation grid for pointwise checks.
    #[arg(long, default_value = "4x4")]
    grid: SamplingGrid,
    /// Also audit p^2 under this twist.
    #[arg(long)]
    twist: Option<DehnTwist>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "8x8")]
    grid: SamplingGrid,
    /// Measure coordinates from z = 0 instead of the centred torus.
    #[arg(long)]
    from_origin: bool,
}

#[derive(Debug, Args)]
struct MeshArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "32x32")]
    grid: SamplingGrid,
    /// Three of the four coordinates, e.g. 123 or 134.
    #[arg(long, default_value = "123")]
    project: Projection,
    #[arg(long)]
    from_origin: bool,
}

#[derive(Debug, Args)]
struct DehnArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    twist: DehnTwist,
    /// Values of a as `lo:hi:count`.
    #[arg(long = "a-range", default_value = "0.1:0.5:5", value_parser = parse_range, allow_hyphen_values = true)]
    a_range: ValueRange,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "a-range", default_value = "-2:2:41", value_parser = parse_range, allow_hyphen_values = true)]
    a_range: ValueRange,
    /// Sweep b as well; otherwise b follows --b or --reality-branch.
    #[arg(long = "b-range", value_parser = parse_range, allow_hyphen_values = true)]
    b_range: Option<ValueRange>,
}

fn parse_from_str<T: FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn parse_check_tol(s: &str) -> Result<(String, f64), String> {
    let (id, v) = s.split_once('=').ok_or("expected CHECK_ID=VALUE")?;
    let v: f64 = v.parse().map_err(|e| format!("{e}"))?;
    if v.is_nan() || v < 0.0 {
        return Err("tolerance must be non-negative".into());
    }
    Ok((id.to_owned(), v))
}

/// Evenly spaced values parsed from `lo:hi:count`.
#[derive(Debug, Clone, PartialEq)]
struct ValueRange(Vec<f64>);

fn parse_range(s: &str) -> Result<ValueRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err("expected lo:hi:count".into());
    };
    let lo: f64 = lo.parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("{e}"))?;
    let count: usize = count.parse().map_err(|e| format!("{e}"))?;
    if !lo.is_finite() || !hi.is_finite() || count == 0 {
        return Err("range needs finite bounds and count >= 1".into());
    }
    Ok(ValueRange(match count {
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidPath(_) => CliError::Usage(e.to_string()),
            other => CliError::Run(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(Error::Io(e))
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    to_json(v).map(String::into_bytes).map_err(|e| CliError::Run(Error::Io(e.into())))
}

#[derive(Serialize)]
struct SolveOutput {
    parameters: super::report::ParameterRecord,
    solution: crate::torus::TorusSolution,
    p_squared: C64,
    potential_mismatch: C64,
}

fn solve(args: &SolveArgs) -> Result<Vec<u8>, CliError> {
    let c = &args.common;
    c.format(Format::Json, &[Format::Json])?;
    let params = c.params()?;
    let sol = build_solution_with_mode(&params, c.mode())?;
    let pot = potential_condition(&sol.wvs);
    json_bytes(&SolveOutput {
        parameters: super::report::ParameterRecord::new(&params),
        solution: sol,
        p_squared: pot.p_squared,
        potential_mismatch: pot.mismatch,
    })
}

fn audit(args: &AuditArgs) -> Result<Vec<u8>, CliError> {
    let c = &args.common;
    c.format(Format::Json, &[Format::Json])?;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let mut options = AuditOptions {
        convention: c.convention,
        mode: c.mode(),
        reality_branch: c.reality_branch,
        twist: args.twist,
        sample_grid: args.grid,
        deterministic: c.deterministic,
        ..AuditOptions::default()
    };
    options.tolerances.quadrature = args.tol;
    options.tolerances.overrides.extend(args.check_tol.iter().cloned());
    let report = run_audit(&c.params()?, &options)?;
    json_bytes(&report)
}

fn offset(from_origin: bool) -> CoordinateOffset {
    if from_origin {
        CoordinateOffset::FromOrigin
    } else {
        CoordinateOffset::None
    }
}

fn sample(args: &SampleArgs) -> Result<Vec<u8>, CliError> {
    let c = &args.common;
    let f = c.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let sol = build_solution_with_mode(&c.params()?, c.mode())?;
    let table = sample_surface(&sol, args.grid, offset(args.from_origin));
    match f {
        Format::Json => json_bytes(&table),
        _ => {
            let mut buf = Vec::new();
            write_sample_csv(&table, &mut buf)?;
            Ok(buf)
        }
    }
}

fn mesh(args: &MeshArgs) -> Result<Vec<u8>, CliError> {
    let c = &args.common;
    let f = c.format(Format::Obj, &[Format::Obj, Format::Svg])?;
    let sol = build_solution_with_mode(&c.params()?, c.mode())?;
    let mesh = MeshData::build(&sol, args.grid, args.project, offset(args.from_origin))?;
    let mut buf = Vec::new();
    match f {
        Format::Svg => {
            let [i, j, _] = args.project.0;
            write_svg(&mesh_lines(&mesh, (i, j)), 512.0, &mut buf)?;
        }
        _ => export_obj(&mesh, &mut buf)?,
    }
    Ok(buf)
}

#[derive(Serialize)]
struct DehnOutput {
    before: super::report::ParameterRecord,
    after: super::report::ParameterRecord,
    report: crate::torus::dehn::DehnReport,
}

fn dehn(args: &DehnArgs) -> Result<Vec<u8>, CliError> {
    let c = &args.common;
    c.format(Format::Json, &[Format::Json])?;
    let params = c.params()?;
    let after = dehn_twist(&params, args.twist)?;
    let report = dehn_invariance_check(&params, args.twist, &args.a_range.0, c.reality_branch)?;
    json_bytes(&DehnOutput {
        before: super::report::ParameterRecord::new(&params),
        after: super::report::ParameterRecord::new(&after),
        report,
    })
}

#[derive(Serialize)]
struct ScanRow {
    a: f64,
    b: f64,
    p_squared: C64,
    consistency: f64,
    ab1: f64,
    ab2: f64,
    potential_mismatch: f64,
    flags: String,
}

const SCAN_HEADER: [&str; 9] = ["a", "b", "p2_re", "p2_im", "consistency", "ab1", "ab2", "potential_mismatch", "flags"];

fn scan(args: &ScanArgs) -> Result<Vec<u8>, CliError> {
    let c = &args.common;
    let f = c.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let base = c.params()?;
    let mut rows = Vec::new();
    for &a in &args.a_range.0 {
        let bs = match &args.b_range {
            Some(bs) => bs.0.clone(),
            None => vec![c.reality_branch.apply(base.with_a(a)).b],
        };
        for b in bs {
            let params = base.with_a(a).with_b(b);
            let sol = build_solution_with_mode(&params, c.mode())?;
            let (c1, c2) = consistency_residual(&sol.wvs);
            let amp = amplitude_conditions_residual(&sol);
            let pot = potential_condition(&sol.wvs);
            let flags: Vec<String> = sol
                .flags
                .iter()
                .map(|f| serde_json::to_value(f).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default())
                .collect();
            rows.push(ScanRow {
                a,
                b,
                p_squared: pot.p_squared,
                consistency: c1.norm().max(c2.norm()),
                ab1: amp[0].norm().max(amp[1].norm()),
                ab2: amp[2].norm().max(amp[3].norm()),
                potential_mismatch: pot.mismatch.norm(),
                flags: flags.join(";"),
            });
        }
    }
    if f == Format::Json {
        return json_bytes(&rows);
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Run(Error::Io(std::io::Error::other(e)));
    w.write_record(SCAN_HEADER).map_err(csv_err)?;
    for r in &rows {
        let s = |x: f64| fmt_sig(x, 9);
        w.write_record([
            s(r.a),
            s(r.b),
            s(r.p_squared.re),
            s(r.p_squared.im),
            s(r.consistency),
            s(r.ab1),
            s(r.ab2),
            s(r.potential_mismatch),
            r.flags.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Run(Error::Io(std::io::Error::other(e.to_string()))))
}

fn execute(cli: &Cli) -> Result<(Vec<u8>, Option<PathBuf>), CliError> {
    let (bytes, common) = match &cli.command {
        Command::Solve(a) => (solve(a)?, &a.common),
        Command::Audit(a) => (audit(a)?, &a.common),
        Command::Sample(a) => (sample(a)?, &a.common),
        Command::Mesh(a) => (mesh(a)?, &a.common),
        Command::Dehn(a) => (dehn(a)?, &a.common),
        Command::Scan(a) => (scan(a)?, &a.common),
    };
    Ok((bytes, common.out.clone()))
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Some(path) = config_path(&argv) {
        match load_config(PathBuf::from(path).as_path()) {
            Ok(entries) => argv = inject(&argv, config_tokens(&entries)),
            Err(e) => {
                let _ = writeln!(stderr, "error: config: {e}");
                return 1;
            }
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let outcome = execute(&cli).and_then(|(bytes, out)| {
        match out {
            Some(path) => std::fs::write(path, bytes)?,
            None => stdout.write_all(&bytes)?,
        }
        Ok(())
    });
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(CliError::Run(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
