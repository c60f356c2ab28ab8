//! `ldpc-de`: density evolution thresholds, convergence-rate sweeps and
//! Monte Carlo runs from a JSON configuration.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ldpc_de::DeMode;

use crate::config::{Command, RunConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "ldpc-de", version, about = "LDPC density evolution workbench")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; missing fields take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    grid_bin: Option<f64>,
    #[arg(long, global = true)]
    grid_half_range: Option<f64>,
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<DeMode>,
    /// Iteration cap for `de` and `threshold`, BP iterations for `mc`.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Worker threads for `mc`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

fn parse_mode(s: &str) -> Result<DeMode, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown mode {s:?}; expected classical, linear or coset"))
}

fn effective_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    cfg.command = Some(cli.command);
    cfg.override_grid(cli.grid_bin, cli.grid_half_range)
        .map_err(|e| e.to_string())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    if let Some(n) = cli.max_iter {
        cfg.de.max_iter = n;
        cfg.threshold.iter_cap = n;
        cfg.mc.bp_iterations = n;
    }
    if let Some(w) = cli.workers {
        cfg.mc.workers = Some(w);
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate(cli.command).map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn write(path: &std::path::Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(cli: &Cli) -> Result<bool, String> {
    let cfg = effective_config(cli)?;
    if cli.print_config {
        println!("{}", cfg.to_json());
        return Ok(true);
    }
    let artifact = match cli.command {
        Command::De => commands::de(&cfg),
        Command::Threshold => commands::threshold(&cfg),
        Command::Rates => commands::rates(&cfg),
        Command::Qgap => commands::qgap(&cfg),
        Command::Mc => commands::mc(&cfg),
    }?;
    match &cfg.out {
        Some(path) => {
            write(path, &artifact.body)?;
            for (suffix, text) in &artifact.companions {
                write(&path.with_extension(suffix), text)?;
            }
        }
        None => print!("{}", artifact.body),
    }
    eprintln!("{}", artifact.summary);
    Ok(artifact.converged)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NOT_CONVERGED),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
