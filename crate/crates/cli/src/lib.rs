//! Command-line front end: reads one JSON document, runs one library
//! operation, writes one JSON document.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use circfn::characterize::{self, DegreeOutcome, DivisorVerdict, PathSpec};
use circfn::fft;
use circfn::funcalc::{self, CircFunction};
use circfn::solver::{self, SolutionStatus};
use circfn::spectral::{self, default_rank_tol};
use circfn::Circulant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_SOLUTION: i32 = 2;
pub const EXIT_INFINITE_FAMILY: i32 = 3;
pub const EXIT_NEGATIVE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "circfn", version, about = "Function calculus over complex circulant matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Input JSON file, or `-` for stdin.
    #[arg(long, global = true, default_value = "-")]
    pub input: String,
    /// Output JSON file, or `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Tolerance: rank threshold (pinv), residual tolerance (solve) or
    /// rounding tolerance (divisor, degree).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub t_min: Option<f64>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub t_points: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Orders at or above this use FFT multiplication.
    #[arg(long, global = true)]
    pub fft_threshold: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Eigenvalues of a circulant.
    Spectrum,
    /// Moore–Penrose pseudoinverse of a circulant.
    Pinv,
    /// Evaluate a function and its derivative at a point: `{"function": F, "point": Z}`.
    Eval,
    /// Solve `P(Z) = 0` for a polynomial function.
    Solve,
    /// Estimate the divisor of a polynomial or rational function.
    Divisor,
    /// Detect the degree of a polynomial function.
    Degree,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalInput {
    function: CircFunction,
    point: Circulant,
}

#[derive(Serialize)]
struct EvalOutput {
    value: Circulant,
    /// 1-based channels zeroed by the pseudoinverse of the denominator.
    flagged_channels: Vec<usize>,
    /// `null` at a pole.
    derivative: Option<Circulant>,
}

#[derive(Serialize)]
struct PinvOutput {
    pseudoinverse: Circulant,
    zeroed_channels: Vec<usize>,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, String> {
    let common = &cli.common;
    if let Some(tol) = common.tol {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(format!("--tol must be positive, got {tol}"));
        }
    }
    let input = read_input(&common.input)?;
    let (json, code) = match common.fft_threshold {
        Some(t) => fft::with_fft_threshold(t, || dispatch(cli.command, common, &input))?,
        None => dispatch(cli.command, common, &input)?,
    };
    write_output(&common.output, &json)?;
    Ok(code)
}

fn dispatch(command: Command, common: &CommonArgs, input: &str) -> Result<(String, i32), String> {
    match command {
        Command::Spectrum => {
            let z: Circulant = parse(input)?;
            emit(&spectral::spectrum(&z), EXIT_OK)
        }
        Command::Pinv => {
            let z: Circulant = parse(input)?;
            let tol = common.tol.unwrap_or_else(|| default_rank_tol(z.order()));
            let (pseudoinverse, zeroed) = spectral::pseudoinverse_masked(&z, tol).map_err(|e| e.to_string())?;
            let out = PinvOutput { pseudoinverse, zeroed_channels: zeroed.into_iter().map(|i| i + 1).collect() };
            emit(&out, EXIT_OK)
        }
        Command::Eval => {
            let EvalInput { function, point } = parse(input)?;
            let value = funcalc::func_eval(&function, &point).map_err(|e| e.to_string())?;
            let derivative = match funcalc::derivative(&function, &point) {
                Ok(d) => Some(d),
                Err(circfn::Error::Pole { .. }) => None,
                Err(e) => return Err(e.to_string()),
            };
            emit(&EvalOutput { value: value.value, flagged_channels: value.flagged_channels, derivative }, EXIT_OK)
        }
        Command::Solve => {
            let p = match parse::<CircFunction>(input)? {
                CircFunction::Poly(p) => p,
                _ => return Err("field `kind`: solve needs a \"poly\" function".into()),
            };
            let set = solver::solve_circ_poly(&p, common.tol.unwrap_or(1e-8)).map_err(|e| e.to_string())?;
            let code = match set.status {
                SolutionStatus::Finite => EXIT_OK,
                SolutionStatus::NoSolution => EXIT_NO_SOLUTION,
                SolutionStatus::InfiniteFamily => EXIT_INFINITE_FAMILY,
            };
            emit(&set, code)
        }
        Command::Divisor => {
            let f: CircFunction = parse(input)?;
            let path = path_spec(common, f.order())?;
            let report = characterize::estimate_divisor(&f, &path).map_err(|e| e.to_string())?;
            let code = if report.verdict == DivisorVerdict::Rational { EXIT_OK } else { EXIT_NEGATIVE };
            emit(&report, code)
        }
        Command::Degree => {
            let f: CircFunction = parse(input)?;
            let path = path_spec(common, f.order())?;
            let report = characterize::detect_poly_degree(&f, &path).map_err(|e| e.to_string())?;
            let code = match report.result {
                DegreeOutcome::Degree { .. } => EXIT_OK,
                DegreeOutcome::NotPolynomial => EXIT_NEGATIVE,
            };
            emit(&report, code)
        }
    }
}

fn path_spec(common: &CommonArgs, d: usize) -> Result<PathSpec, String> {
    let default = PathSpec::new(d);
    let t_min = common.t_min.unwrap_or(default.scales[0]);
    let t_max = common.t_max.unwrap_or(*default.scales.last().expect("non-empty"));
    let points = common.t_points.unwrap_or(default.scales.len());
    let mut path = PathSpec::geometric(d, t_min, t_max, points).map_err(|e| e.to_string())?.with_seed(common.seed);
    if let Some(tol) = common.tol {
        path.round_tol = tol;
    }
    Ok(path)
}

fn parse<T: for<'de> Deserialize<'de>>(input: &str) -> Result<T, String> {
    serde_json::from_str(input).map_err(|e| format!("invalid input: {e}"))
}

fn emit<T: Serialize>(value: &T, code: i32) -> Result<(String, i32), String> {
    let mut json = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    json.push('\n');
    Ok((json, code))
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        fs::read_to_string(PathBuf::from(path)).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn write_output(path: &str, json: &str) -> Result<(), String> {
    if path == "-" {
        io::stdout().write_all(json.as_bytes()).map_err(|e| format!("writing stdout: {e}"))
    } else {
        fs::write(path, json).map_err(|e| format!("writing {path}: {e}"))
    }
}
