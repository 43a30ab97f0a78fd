//! `pdlcap` command-line front end.
//!
//! Every command is a pure function of its flags. [`run`] takes the argument
//! list and output streams explicitly and returns the process exit code, so
//! the whole front end can be driven in-process.

mod svg;
mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::{classify, ChannelParams, Classification};
use crate::closedform::{
    benefit_n_exact, doubling_series_bound, in_asymptotic_region, n_threshold, solve_q1,
    superadditivity_report_with, w_asymptotic, w_n,
};
use crate::error::Error;
use crate::region::{self, BoundaryCurve, RegionGrid, MAX_RESOLUTION};

pub use verify::{run_checks, CheckOutcome, VerifyLevel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pdlcap",
    version,
    about = "Capacity bounds for the erasure channel with polarization-dependent losses (all values in bits)"
)]
struct Cli {
    /// Worker threads for scans and verification (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Superadditivity report of the n-qubit W-state code at one point.
    Point(PointArgs),
    /// Classification and superadditivity map over the parameter square.
    Region(RegionArgs),
    /// Zero set of w_n located by bisection along axis-parallel rays.
    Boundary(BoundaryArgs),
    /// One-shot coherent information optimum.
    Q1(ParamArgs),
    /// The w_n criterion, with its asymptotic form where defined.
    Wn(WnArgs),
    /// Partial sums of the doubling-series lower bound on Q - Q1.
    Bound(BoundArgs),
    /// Closed forms against the dense spectral oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

fn probability(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is not a transmission probability in [0, 1]"))
    }
}

fn block_length(s: &str) -> Result<u64, String> {
    let n: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if n == 0 {
        Err("block length must be at least 1".into())
    } else {
        Ok(n)
    }
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Transmission probability of H photons.
    #[arg(long, value_parser = probability)]
    ph: f64,
    /// Transmission probability of V photons.
    #[arg(long, value_parser = probability)]
    pv: f64,
    /// Output format; plain text when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 2, value_parser = block_length)]
    n: u64,
    /// Last doubling level included in the series bound.
    #[arg(long, default_value_t = 10)]
    mmax: u32,
}

#[derive(Debug, Args)]
struct WnArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = block_length)]
    n: u64,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 10)]
    mmax: u32,
}

#[derive(Debug, Args)]
struct RegionArgs {
    /// Cells per axis.
    #[arg(long, default_value_t = 101,
          value_parser = clap::value_parser!(u32).range(2..=MAX_RESOLUTION as i64))]
    res: u32,
    /// Comma-separated block lengths.
    #[arg(long, value_delimiter = ',', default_value = "2,3,10", value_parser = block_length)]
    n_list: Vec<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    /// Rays per axis.
    #[arg(long, default_value_t = 200,
          value_parser = clap::value_parser!(u32).range(1..=MAX_RESOLUTION as i64))]
    res: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = VerifyLevel::Fast)]
    level: VerifyLevel,
    /// Seed for the random parameter points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t as usize);
    }
    // Commands write into buffers so they can run on the worker pool.
    let (mut out_buf, mut err_buf) = (Vec::new(), Vec::new());
    let outcome = match pool.build() {
        Ok(pool) => pool.install(|| dispatch(&cli.command, &mut out_buf, &mut err_buf)),
        Err(e) => Err(Failure::Usage(format!("cannot start worker pool: {e}"))),
    };
    let flushed = stdout.write_all(&out_buf).and_then(|_| stderr.write_all(&err_buf));
    let outcome = match (outcome, flushed) {
        (Ok(()), Err(e)) => Err(Failure::Io(format!("writing output: {e}"))),
        (outcome, _) => outcome,
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Verify) => EXIT_VERIFY_FAILED,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

fn dispatch(command: &Command, stdout: &mut Vec<u8>, stderr: &mut Vec<u8>) -> CmdResult {
    match command {
        Command::Point(a) => cmd_point(a, stdout),
        Command::Region(a) => cmd_region(a, stdout),
        Command::Boundary(a) => cmd_boundary(a, stdout),
        Command::Q1(a) => cmd_q1(a, stdout),
        Command::Wn(a) => cmd_wn(a, stdout),
        Command::Bound(a) => cmd_bound(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    }
}

/// Writes to `--out` when given, else to `stdout`.
fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> CmdResult {
    match out {
        None => stdout
            .write_all(bytes)
            .map_err(|e| Failure::Io(format!("writing to standard output: {e}"))),
        Some(path) => {
            let io_err = |e: io::Error| Failure::Io(format!("{}: {e}", path.display()));
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            w.write_all(bytes).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
    }
}

/// Twelve significant digits.
pub fn csv_number(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn no_svg(format: Option<Format>, command: &str) -> CmdResult {
    if format == Some(Format::Svg) {
        return Err(Failure::Usage(format!(
            "--format svg is only available for `region` and `boundary`, not `{command}`"
        )));
    }
    Ok(())
}

fn channel(a: &ParamArgs) -> Result<ChannelParams, Failure> {
    Ok(ChannelParams::new(a.ph, a.pv)?)
}

/// Fields printed by `point`; the JSON object has exactly these keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOutput {
    pub classification: Classification,
    pub q1: f64,
    pub w_n: f64,
    pub benefit: f64,
    pub qn_lower: f64,
    pub doubling_bound: f64,
}

fn cmd_point(a: &PointArgs, stdout: &mut dyn Write) -> CmdResult {
    no_svg(a.params.format, "point")?;
    let params = channel(&a.params)?;
    let solution = solve_q1(params);
    let report = superadditivity_report_with(params, &solution, a.n)?;
    let out = PointOutput {
        classification: report.classification,
        q1: report.q1,
        w_n: report.w_n,
        benefit: report.benefit,
        qn_lower: report.qn_lower,
        doubling_bound: doubling_series_bound(params, &solution, a.mmax),
    };
    let bytes = match a.params.format {
        Some(Format::Json) => json_bytes(&out)?,
        Some(Format::Csv) => csv_bytes(
            &["classification", "q1", "w_n", "benefit", "qn_lower", "doubling_bound"].map(String::from),
            [vec![
                out.classification.to_string(),
                csv_number(out.q1),
                csv_number(out.w_n),
                csv_number(out.benefit),
                csv_number(out.qn_lower),
                csv_number(out.doubling_bound),
            ]],
        )?,
        _ => {
            let mut s = String::new();
            s += &format!("p_h = {}, p_v = {}, n = {}\n", params.p_h(), params.p_v(), a.n);
            s += &format!("classification  {}\n", out.classification);
            s += &format!("q1              {:.6e} bits\n", out.q1);
            s += &format!("w_n             {:.6e} bits\n", out.w_n);
            s += &format!("benefit         {:.6e} bits per use\n", out.benefit);
            if a.n >= 2 {
                let exact = benefit_n_exact(params, &solution, a.n)?;
                s += &format!("benefit (exact) {exact:.6e} bits per use\n");
            }
            s += &format!("qn_lower        {:.6e} bits\n", out.qn_lower);
            s += &format!("doubling_bound  {:.6e} bits (m <= {})\n", out.doubling_bound, a.mmax);
            s.into_bytes()
        }
    };
    emit(&a.params.out, stdout, &bytes)
}

fn region_csv(grid: &RegionGrid) -> Result<Vec<u8>, Failure> {
    let mut header: Vec<String> = ["p_h", "p_v", "classification"].map(String::from).to_vec();
    for n in &grid.n_list {
        header.push(format!("w_{n}"));
        header.push(format!("benefit_{n}"));
        header.push(format!("superadditive_{n}"));
    }
    let rows = grid.cells.iter().map(|c| {
        let mut row = vec![csv_number(c.p_h), csv_number(c.p_v), c.classification.to_string()];
        for v in &c.verdicts {
            row.push(csv_number(v.w_n));
            row.push(csv_number(v.benefit));
            row.push(v.superadditive.to_string());
        }
        row
    });
    csv_bytes(&header, rows)
}

fn cmd_region(a: &RegionArgs, stdout: &mut dyn Write) -> CmdResult {
    let grid = region::scan(a.res as usize, &a.n_list)?;
    let bytes = match a.format {
        Format::Csv => region_csv(&grid)?,
        Format::Json => json_bytes(&grid)?,
        Format::Svg => svg::region_map(&grid).into_bytes(),
    };
    emit(&a.out, stdout, &bytes)
}

fn boundary_csv(curve: &BoundaryCurve) -> Result<Vec<u8>, Failure> {
    let rows = curve
        .points
        .iter()
        .map(|p| vec![curve.n.to_string(), csv_number(p.p_h), csv_number(p.p_v)]);
    csv_bytes(&["n", "p_h", "p_v"].map(String::from), rows)
}

fn cmd_boundary(a: &BoundaryArgs, stdout: &mut dyn Write) -> CmdResult {
    let curve = region::boundary(a.n, a.res as usize)?;
    let bytes = match a.format {
        Format::Csv => boundary_csv(&curve)?,
        Format::Json => json_bytes(&curve)?,
        Format::Svg => svg::boundary_plot(&curve).into_bytes(),
    };
    emit(&a.out, stdout, &bytes)
}

#[derive(Debug, Serialize)]
struct Q1Output {
    classification: Classification,
    q1: f64,
    rho_hh: f64,
    rho_vv: f64,
    degenerate: bool,
}

fn cmd_q1(a: &ParamArgs, stdout: &mut dyn Write) -> CmdResult {
    no_svg(a.format, "q1")?;
    let params = channel(a)?;
    let s = solve_q1(params);
    let out = Q1Output {
        classification: classify(params),
        q1: s.q1,
        rho_hh: s.state.rho_hh(),
        rho_vv: s.state.rho_vv(),
        degenerate: s.degenerate,
    };
    let bytes = match a.format {
        Some(Format::Json) => json_bytes(&out)?,
        Some(Format::Csv) => csv_bytes(
            &["classification", "q1", "rho_hh", "rho_vv", "degenerate"].map(String::from),
            [vec![
                out.classification.to_string(),
                csv_number(out.q1),
                csv_number(out.rho_hh),
                csv_number(out.rho_vv),
                out.degenerate.to_string(),
            ]],
        )?,
        _ => format!(
            "classification  {}\nq1              {:.12e} bits\nrho_hh          {:.12}\nrho_vv          {:.12}\ndegenerate      {}\n",
            out.classification, out.q1, out.rho_hh, out.rho_vv, out.degenerate
        )
        .into_bytes(),
    };
    emit(&a.out, stdout, &bytes)
}

#[derive(Debug, Serialize)]
struct WnOutput {
    n: u64,
    w_n: f64,
    /// Absent outside `0 < p_min < 1/2 < p_maj < 1`.
    w_asymptotic: Option<f64>,
    n0: Option<f64>,
}

fn cmd_wn(a: &WnArgs, stdout: &mut dyn Write) -> CmdResult {
    no_svg(a.params.format, "wn")?;
    let params = channel(&a.params)?;
    let asym = in_asymptotic_region(params);
    let out = WnOutput {
        n: a.n,
        w_n: w_n(params, a.n)?,
        w_asymptotic: if asym { Some(w_asymptotic(params, a.n as f64)?) } else { None },
        n0: if asym { Some(n_threshold(params)?) } else { None },
    };
    let opt = |x: Option<f64>| x.map(csv_number).unwrap_or_default();
    let bytes = match a.params.format {
        Some(Format::Json) => json_bytes(&out)?,
        Some(Format::Csv) => csv_bytes(
            &["n", "w_n", "w_asymptotic", "n0"].map(String::from),
            [vec![out.n.to_string(), csv_number(out.w_n), opt(out.w_asymptotic), opt(out.n0)]],
        )?,
        _ => {
            let mut s = format!("w_{}           {:.12e} bits\n", out.n, out.w_n);
            match (out.w_asymptotic, out.n0) {
                (Some(w), Some(n0)) => {
                    s += &format!("w_asymptotic    {w:.12e} bits\nn0              {n0:.6}\n");
                }
                _ => s += "w_asymptotic    undefined outside 0 < p_min < 1/2 < p_maj < 1\n",
            }
            s.into_bytes()
        }
    };
    emit(&a.params.out, stdout, &bytes)
}

#[derive(Debug, Serialize)]
struct BoundRow {
    m_max: u32,
    bound: f64,
}

fn cmd_bound(a: &BoundArgs, stdout: &mut dyn Write) -> CmdResult {
    no_svg(a.params.format, "bound")?;
    let params = channel(&a.params)?;
    let s = solve_q1(params);
    let rows: Vec<BoundRow> = (0..=a.mmax)
        .map(|m| BoundRow {
            m_max: m,
            bound: doubling_series_bound(params, &s, m),
        })
        .collect();
    let bytes = match a.params.format {
        Some(Format::Json) => json_bytes(&rows)?,
        Some(Format::Csv) => csv_bytes(
            &["m_max", "bound"].map(String::from),
            rows.iter().map(|r| vec![r.m_max.to_string(), csv_number(r.bound)]),
        )?,
        _ => {
            let mut out = format!("q1 = {:.12e} bits\n", s.q1);
            for r in &rows {
                out += &format!("m <= {:<3} Q - Q1 >= {:.12e} bits\n", r.m_max, r.bound);
            }
            out.into_bytes()
        }
    };
    emit(&a.params.out, stdout, &bytes)
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let outcomes = run_checks(a.level, a.seed);
    let io = |e: io::Error| Failure::Io(format!("writing report: {e}"));
    let mut failed = 0;
    for o in &outcomes {
        writeln!(stdout, "{} {:<40} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail)
            .map_err(io)?;
        if !o.passed {
            failed += 1;
        }
    }
    writeln!(stdout, "{} checks, {failed} failed", outcomes.len()).map_err(io)?;
    if failed > 0 {
        for o in outcomes.iter().filter(|o| !o.passed) {
            writeln!(stderr, "verification failed: {}", o.name).map_err(io)?;
        }
        return Err(Failure::Verify);
    }
    Ok(())
}
