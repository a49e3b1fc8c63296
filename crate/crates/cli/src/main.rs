use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use siet_cli::{
    cmd_bounds, cmd_design, cmd_simulate, cmd_sweep, codebook_json, design_summary, read_file,
    write_file, CliError, CliResult, Options, SweepOptions,
};
use siet_core::constellation::PackingMode;
use siet_core::simulator::DecoderKind;

/// Design and evaluate finite-blocklength codes for simultaneous information
/// and energy transmission.
#[derive(Parser)]
#[command(name = "siet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a constant-composition code meeting (n, R, B, ε, δ).
    Design(Common),
    /// Print every converse and achievability bound for a codebook.
    Bounds(Common),
    /// Estimate the decoding error probability by Monte-Carlo simulation.
    Simulate(Common),
    /// Sweep DEP targets and layer probabilities; writes CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Keep only the rate-energy Pareto frontier.
        #[arg(long)]
        frontier: bool,
    },
}

#[derive(Args)]
struct Common {
    /// JSON spec file.
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_parser = parse_decoder)]
    decoder: Option<DecoderKind>,
    #[arg(long, value_parser = parse_packing)]
    packing: Option<PackingMode>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Override a top-level spec field, `key=value` (value parsed as JSON).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn parse_decoder(s: &str) -> Result<DecoderKind, String> {
    s.parse().map_err(|e: siet_core::Error| e.to_string())
}

fn parse_packing(s: &str) -> Result<PackingMode, String> {
    s.parse().map_err(|e: siet_core::Error| e.to_string())
}

impl Common {
    fn options(&self) -> Options {
        Options {
            seed: self.seed,
            trials: self.trials,
            decoder: self.decoder,
            packing: self.packing,
            grid_step: self.grid_step,
            overrides: self.overrides.clone(),
            base_dir: self.input.parent().map(Path::to_path_buf),
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Design(c) => {
            let outcome = cmd_design(&read_file(&c.input)?, &c.options())?;
            if let Some(path) = &c.output {
                write_file(path, &codebook_json(&outcome))?;
            }
            print!("{}", design_summary(&outcome, c.output.as_deref()));
            Ok(())
        }
        Command::Bounds(c) => {
            let out = cmd_bounds(&read_file(&c.input)?, &c.options())?;
            print!("{}", out.table);
            emit(c.output.as_deref(), &out.json)
        }
        Command::Simulate(c) => {
            let json = cmd_simulate(&read_file(&c.input)?, &c.options())?;
            emit(c.output.as_deref(), &json)
        }
        Command::Sweep {
            common: c,
            frontier,
        } => {
            let csv = cmd_sweep(
                &read_file(&c.input)?,
                &c.options(),
                &SweepOptions {
                    frontier_only: frontier,
                },
            )?;
            emit(c.output.as_deref(), &csv)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SIET_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("SIET_THREADS={raw} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::InfeasibleTargets { report, .. } = &e {
                print!("{report}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
