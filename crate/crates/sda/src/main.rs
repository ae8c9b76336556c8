use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sda::{run, CliResult, Command, KeyValues};

#[derive(Parser)]
#[command(name = "sda", version, about = "Stokes-Darcy solver with residual error estimation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve and write solution.vtk
    Solve(Options),
    /// Solve, estimate and write indicators.csv
    Estimate(Options),
    /// Run the adaptive loop and write history.csv and one mesh per iteration
    Adapt(Options),
    /// Uniform refinement study written to convergence.csv
    Convergence(Options),
}

#[derive(Args)]
struct Options {
    /// key = value file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh file
    #[arg(long, conflicts_with = "benchmark")]
    mesh: Option<String>,
    /// Structured mesh NXxNY
    #[arg(long)]
    benchmark: Option<String>,
    /// Manufactured case: zero, discrete, smooth or layer
    #[arg(long)]
    case: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
    /// Dörfler fraction
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Interface stabilization weight
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Number of meshes in a convergence study
    #[arg(long, allow_hyphen_values = true)]
    levels: Option<String>,
    /// Any other config key, as KEY=VALUE
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn execute(command: Command, o: Options) -> CliResult<()> {
    let mut kv = match &o.config {
        Some(path) => KeyValues::read(path)?,
        None => KeyValues::default(),
    };
    // a mesh given on the command line replaces either source from the file
    if o.mesh.is_some() || o.benchmark.is_some() {
        kv.remove("mesh");
        kv.remove("benchmark");
    }
    for (key, value) in [
        ("mesh", o.mesh),
        ("benchmark", o.benchmark),
        ("case", o.case),
        ("out", o.out),
        ("theta", o.theta),
        ("delta", o.delta),
        ("levels", o.levels),
    ] {
        if let Some(v) = value {
            kv.set(key, &v)?;
        }
    }
    for pair in &o.set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| sda::CliError::config(pair.as_str(), "expected KEY=VALUE"))?;
        kv.set(key.trim(), value.trim())?;
    }
    let config = kv.into_config(command)?;
    let summary = run(&config)?;
    for m in &summary.messages {
        println!("{m}");
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, options) = match cli.command {
        Cmd::Solve(o) => (Command::Solve, o),
        Cmd::Estimate(o) => (Command::Estimate, o),
        Cmd::Adapt(o) => (Command::Adapt, o),
        Cmd::Convergence(o) => (Command::Convergence, o),
    };
    match execute(command, options) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sda {command}: {e}");
            ExitCode::FAILURE
        }
    }
}
