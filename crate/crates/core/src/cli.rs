//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::curve::{self, find_normalized, scan, ScanOptions};
use crate::error::{Error, Result};
use crate::io::{curve_svg, to_json, write_file, SolutionRecord};
use crate::nonlinearity::NonlinearitySpec;
use crate::roots;
use crate::shooting::ground_state;
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const GRAMMAR: &str = "\
Nonlinearity grammar for --g:
  power:p=P                    g(s) = s^P
  cubic-quintic:a=A,b=B        g(s) = A s^3 - B s^5 (defaults a=1, b=1)
  combined:+C1*s^P1,-C2*s^P2   signed sum of monomials
--truncate replaces g by the version cut off at its first positive zero.
Env var NLS_THREADS caps the number of worker threads.";

#[derive(Debug, Parser)]
#[command(
    name = "normsol",
    version,
    about = "Ground states, mass-frequency curves and normalized solutions of -Δu + μu = g(u)",
    after_help = GRAMMAR
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the radial ground state at one frequency.
    Solve(SolveArgs),
    /// Sample a(μ), c₋(μ), c₊(μ) over a frequency grid.
    Scan(ScanArgs),
    /// Find normalized solutions with prescribed mass.
    Find(FindArgs),
    /// Print the threshold μ* = sup 2G(s)/s².
    MuStar(MuStarArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Nonlinearity, e.g. `power:p=3` or `cubic-quintic:a=1,b=1`.
    #[arg(long = "g", value_name = "SPEC")]
    pub g: String,
    /// Space dimension N.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Truncate g at its first positive zero.
    #[arg(long)]
    pub truncate: bool,
}

impl ProblemArgs {
    pub fn spec(&self) -> Result<NonlinearitySpec> {
        let spec: NonlinearitySpec = self.g.parse()?;
        if self.truncate {
            spec.truncate()
        } else {
            Ok(spec)
        }
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true, requires = "mu_max")]
    pub mu_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "mu_min")]
    pub mu_max: Option<f64>,
    /// Number of log-spaced frequencies.
    #[arg(long, default_value_t = 32)]
    pub steps: usize,
    /// Starting heights per frequency.
    #[arg(long, default_value_t = 8)]
    pub n_starts: usize,
}

impl GridArgs {
    fn grid(&self, spec: &NonlinearitySpec) -> Result<Vec<f64>> {
        match (self.mu_min, self.mu_max) {
            (Some(lo), Some(hi)) => Ok(roots::geomspace(lo, hi, self.steps)),
            _ => {
                let default = curve::default_mu_grid(spec)?;
                let (lo, hi) = (default[0], default[default.len() - 1]);
                Ok(roots::geomspace(lo, hi, self.steps))
            }
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.steps < 2 {
            return Err(format!("--steps must be at least 2, got {}", self.steps));
        }
        if self.n_starts == 0 {
            return Err("--n-starts must be positive".into());
        }
        if let (Some(lo), Some(hi)) = (self.mu_min, self.mu_max) {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(format!(
                    "--mu-min/--mu-max must satisfy 0 < min < max, got {lo}, {hi}"
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Frequency μ > 0.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Mass m used to report J_m(μ, u) = I(μ, u) - mμ.
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Output directory for profile.csv and result.json (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Mass m; adds the b_m(μ) = a(μ) - mμ column.
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Output directory for curve.csv (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write curve.svg (requires --out).
    #[arg(long, requires = "out")]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Prescribed mass m = ½|u|₂².
    #[arg(long, allow_negative_numbers = true)]
    pub mass: f64,
    /// Relative mass tolerance.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-3)]
    pub tol: f64,
    /// Output directory for solutions.json (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write curve.csv and curve.svg of the underlying scan (requires --out).
    #[arg(long, requires = "out")]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct MuStarArgs {
    #[arg(long = "g", value_name = "SPEC")]
    pub g: String,
    #[arg(long)]
    pub truncate: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of: all, mu-star, pohozaev, scaling, derivative, curve,
    /// multiplicity, uniqueness, determinism.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 8)]
    pub n_starts: usize,
}

fn threads_from_env() -> Option<usize> {
    std::env::var("NLS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn scan_options(n_starts: usize) -> ScanOptions {
    ScanOptions {
        n_starts,
        threads: threads_from_env(),
        ..ScanOptions::default()
    }
}

fn check_positive(name: &str, value: f64) -> std::result::Result<(), String> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be a positive number, got {value}"))
    }
}

/// Flag checks that clap cannot express; runs before any solve.
fn validate(command: &Command) -> std::result::Result<(), String> {
    match command {
        Command::Solve(a) => {
            check_positive("--mu", a.mu)?;
            if let Some(m) = a.mass {
                check_positive("--mass", m)?;
            }
        }
        Command::Scan(a) => {
            a.grid.validate()?;
            if let Some(m) = a.mass {
                check_positive("--mass", m)?;
            }
        }
        Command::Find(a) => {
            a.grid.validate()?;
            check_positive("--mass", a.mass)?;
            check_positive("--tol", a.tol)?;
        }
        Command::MuStar(_) => {}
        Command::Verify(a) => {
            a.suite.parse::<Suite>().map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, name: &str, contents: &str) -> Result<()> {
    match out {
        Some(dir) => write_file(dir, name, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_command(command: Command) -> Result<i32> {
    match command {
        Command::Solve(a) => {
            let spec = a.problem.spec()?;
            let state = ground_state(&spec, a.problem.dim, a.mu, &Default::default())?;
            let record = to_json(&SolutionRecord::from_state(&state, a.mass))?;
            match &a.out {
                Some(dir) => {
                    write_file(dir, "profile.csv", &state.profile.to_csv())?;
                    write_file(dir, "result.json", &record)?;
                }
                None => print!("{record}"),
            }
        }
        Command::Scan(a) => {
            let spec = a.problem.spec()?;
            let grid = a.grid.grid(&spec)?;
            let curve = scan(&spec, a.problem.dim, &grid, &scan_options(a.grid.n_starts))?;
            for gap in &curve.gaps {
                eprintln!("warning: mu = {} failed: {}", gap.mu, gap.reason);
            }
            emit(&a.out, "curve.csv", &curve.to_csv(a.mass))?;
            if a.plot {
                if let Some(dir) = &a.out {
                    write_file(dir, "curve.svg", &curve_svg(&curve, a.mass))?;
                }
            }
        }
        Command::Find(a) => {
            let spec = a.problem.spec()?;
            let grid = a.grid.grid(&spec)?;
            let opts = scan_options(a.grid.n_starts);
            let curve = scan(&spec, a.problem.dim, &grid, &opts)?;
            let records: Vec<SolutionRecord> = match find_normalized(&curve, a.mass, a.tol, &opts) {
                Ok(found) => {
                    for msg in &found.aborted {
                        eprintln!("warning: {msg}");
                    }
                    found
                        .solutions
                        .iter()
                        .map(SolutionRecord::from_normalized)
                        .collect()
                }
                Err(Error::NoSolution { mass }) => {
                    eprintln!("no normalized solution with mass {mass} on the scanned range");
                    Vec::new()
                }
                Err(e) => return Err(e),
            };
            emit(&a.out, "solutions.json", &to_json(&records)?)?;
            if a.plot {
                if let Some(dir) = &a.out {
                    write_file(dir, "curve.csv", &curve.to_csv(Some(a.mass)))?;
                    write_file(dir, "curve.svg", &curve_svg(&curve, Some(a.mass)))?;
                }
            }
        }
        Command::MuStar(a) => {
            let spec: NonlinearitySpec = a.g.parse()?;
            let spec = if a.truncate { spec.truncate()? } else { spec };
            println!("{}", spec.mu_star()?);
        }
        Command::Verify(a) => {
            let suite: Suite = a.suite.parse()?;
            let report = run_suite(suite, scan_options(a.n_starts));
            for r in &report.results {
                println!("{r}");
            }
            for d in &report.diagnostics {
                println!("note: {d}");
            }
            if !report.all_passed() {
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(msg) = validate(&cli.command) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e @ (Error::Parse(_) | Error::InvalidSpec(_))) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
