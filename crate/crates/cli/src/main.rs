use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod fmt;
mod svg;

#[derive(Debug, Parser)]
#[command(
    name = "lensfix",
    version,
    about = "Complex images of rational gravitational lenses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the degree, conjugate-symmetry and decay conditions of a model.
    Validate(Common),
    /// All complex fixed points for one source, as JSON lines.
    Images(Common),
    /// Magnification sums for many sources, as CSV.
    Invariant(Common),
    /// Real-image counts over a source-plane window, as CSV.
    Scan(Common),
    /// Critical curves and caustics as polyline CSV.
    Caustics(Common),
    /// Cross-check the solver against independent oracles.
    Verify(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model file (TOML).
    #[arg(long)]
    pub model: PathBuf,
    /// Source position RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    pub source: Option<String>,
    /// File of source positions, one RE,IM per line.
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// Number of random generic sources.
    #[arg(long)]
    pub random: Option<usize>,
    /// Seed for --random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid CX,CY,HW,HH,NX,NY: centre, half extents, node counts.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Tolerance on |sum mu - 1|.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render an SVG preview here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Validate(c) => ("validate", c),
        Command::Images(c) => ("images", c),
        Command::Invariant(c) => ("invariant", c),
        Command::Scan(c) => ("scan", c),
        Command::Caustics(c) => ("caustics", c),
        Command::Verify(c) => ("verify", c),
    };
    match commands::run(name, common) {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
