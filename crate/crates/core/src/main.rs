use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use collective_lamb::cli::{self, RunError, RunOptions};
use collective_lamb::config::{self, Command, Format, RunConfig};

#[derive(Parser)]
#[command(name = "collective-lamb", version, about = "Collective Lamb shift and linewidth of a dense two-level gas")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// RNG seed for Monte Carlo commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Solve one (C, detuning) point
    Solve,
    /// Sweep detuning at fixed C
    SweepDetuning,
    /// Sweep C at fixed detuning
    SweepDensity,
    /// Pair terms against separation in the dressed medium
    PairSweep,
    /// Effective linewidth and shift against sample size
    EnsembleSweep,
    /// Run the cross-check suite
    Validate,
    /// Print the fully defaulted configuration
    EmitConfig,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn load(path: &Option<PathBuf>) -> Result<RunConfig, RunError> {
    let Some(path) = path else { return Ok(config::parse_config("")?) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Ok(config::parse_config(&text)?)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Solve => Command::Solve,
        Cmd::SweepDetuning => Command::SweepDetuning,
        Cmd::SweepDensity => Command::SweepDensity,
        Cmd::PairSweep => Command::PairSweep,
        Cmd::EnsembleSweep => Command::EnsembleSweep,
        Cmd::Validate => Command::Validate,
        Cmd::EmitConfig => {
            return match load(&args.config) {
                Ok(cfg) => {
                    print!("{}", config::emit_config(&cfg));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    };
    let opts = RunOptions {
        out: args.out,
        format: args.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        seed: args.seed,
        quiet: args.quiet,
        threads: args.threads,
    };
    match load(&args.config).and_then(|cfg| cli::run(command, cfg, &opts)) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("{}", e.record());
    ExitCode::from(e.exit_code() as u8)
}
