//! `rogers`: tables of Rogers-function quantities as CSV or JSON.
//!
//! Exit status is 2 for bad flags or specs, 1 when some cell did not
//! converge (or a `check` failed) and 0 otherwise.

mod commands;
mod table;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use commands::Job;
use rogers_core::quad::QuadOptions;
use rogers_core::{make, FunctionSpec, Side};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use table::{Format, Table};

#[derive(Parser, Debug)]
#[command(name = "rogers", version, about = "Wiener-Hopf factors and fluctuation tables for Rogers functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON function spec file
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    rtol: Option<f64>,
    /// rmin,rmax,n
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    xi: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Points for the index-one density (stable-sup) or the CDF (mc)
    #[arg(long, global = true, value_delimiter = ',')]
    x: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum, default_value = "up")]
    side: SideArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    paths: usize,
    /// Fine time steps; a power of two
    #[arg(long, global = true, default_value_t = 8192)]
    steps: usize,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// f on the positive half-line
    Eval,
    /// Curve of real values
    Curve,
    /// Wiener-Hopf factors and ratios to ξ = 1
    Wh,
    /// Extended factors over τ × ξ
    Kappa,
    /// Laplace transform of the supremum or infimum over t × ξ
    Sup,
    /// Explicit stable formulas; --x gives the index-one density
    StableSup,
    /// Invariant suite with a pass/fail report
    Check,
    /// Monte Carlo summary for a stable spec
    Mc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Up,
    Down,
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, n] = parts[..] else { bail!("--grid expects rmin,rmax,n") };
    Ok((a.parse()?, b.parse()?, n.parse()?))
}

fn positive(name: &str, v: &[f64]) -> Result<()> {
    if let Some(x) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        bail!("--{name} values must be positive and finite, got {x}");
    }
    Ok(())
}

fn job(cli: &Cli) -> Result<Job> {
    let path = cli.spec.as_ref().ok_or_else(|| anyhow!("--spec is required"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = FunctionSpec::from_json(&text)?;
    let f = make(&spec)?;
    let mut opts = QuadOptions::default();
    if let Some(r) = cli.rtol {
        if !(r > 0.0 && r < 1.0) {
            bail!("--rtol must lie in (0, 1)");
        }
        opts = opts.with_rel_tol(r);
    }
    let grid = cli.grid.as_deref().map(parse_grid).transpose().context("--grid")?;
    let list = |v: &Option<Vec<f64>>, d: &[f64]| v.clone().unwrap_or_else(|| d.to_vec());
    let j = Job {
        spec,
        f,
        opts,
        grid,
        tau: list(&cli.tau, &[1.0]),
        xi: list(&cli.xi, &[1.0]),
        t: list(&cli.t, &[1.0]),
        x: list(&cli.x, &[]),
        side: match cli.side {
            SideArg::Up => Side::Up,
            SideArg::Down => Side::Down,
        },
        seed: cli.seed,
        paths: cli.paths,
        steps: cli.steps,
    };
    positive("tau", &j.tau)?;
    positive("xi", &j.xi)?;
    positive("t", &j.t)?;
    Ok(j)
}

fn run(cli: &Cli) -> Result<Table> {
    let j = job(cli)?;
    match cli.command {
        Command::Eval => commands::eval(&j),
        Command::Curve => commands::curve(&j),
        Command::Wh => commands::wh(&j),
        Command::Kappa => commands::kappa_table(&j),
        Command::Sup => commands::sup(&j),
        Command::StableSup => commands::stable_sup(&j),
        Command::Check => commands::check(&j),
        Command::Mc => commands::mc(&j),
    }
}

fn emit(cli: &Cli, t: &Table) -> Result<()> {
    match &cli.out {
        Some(p) => {
            let mut file = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            t.write(cli.format, &mut file)?;
            file.flush()?;
        }
        None => t.write(cli.format, std::io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let table = match run(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &table) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if table.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
