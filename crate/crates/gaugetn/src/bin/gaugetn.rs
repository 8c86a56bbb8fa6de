use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use gaugetn::config::{Ansatz, ConfigError, ExperimentConfig, ScanSettings};
use gaugetn::runner::build_model;
use gaugetn::tables::{dump_sector, dump_tables};
use gaugetn::{emit_results, exit_code, run_ground_state, run_potential_scan};
use gaugetn_core::models::ChargeConfig;

const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_SOLVER_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "gaugetn", version, about = "Tensor-network ground states of lattice gauge models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vacuum ground state and observables.
    Ground(RunArgs),
    /// Static-charge potential scan.
    Scan(RunArgs),
    /// Parse and validate a config, then print its resolved form.
    ValidateConfig(RunArgs),
    /// Write the local operator tables of the vacuum model as JSON.
    DumpTables(DumpArgs),
    /// Write the physical-sector basis and Hamiltonian as JSON.
    DumpSector(DumpArgs),
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    chi: Option<usize>,
    #[arg(long, value_parser = parse_ansatz)]
    ansatz: Option<Ansatz>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated separations; creates a scan section if missing.
    #[arg(long, value_delimiter = ',')]
    separations: Option<Vec<usize>>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config, or JSON when the extension is `.json`.
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct DumpArgs {
    config: PathBuf,
    /// Output file.
    #[arg(long, short)]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

fn parse_ansatz(s: &str) -> Result<Ansatz, String> {
    match s {
        "mps" => Ok(Ansatz::Mps),
        "ttn" => Ok(Ansatz::Ttn),
        "exact" => Ok(Ansatz::Exact),
        _ => Err(format!("unknown ansatz {s:?}, expected mps, ttn or exact")),
    }
}

fn load(path: &Path, o: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let mut c = ExperimentConfig::from_path(path)?;
    if let Some(x) = o.seed {
        c.seed = x;
    }
    if let Some(x) = o.chi {
        c.chi = x;
    }
    if let Some(x) = o.ansatz {
        c.ansatz = x;
    }
    if let Some(x) = o.m {
        c.m = x;
    }
    if let Some(x) = o.g {
        c.g = x;
    }
    if let Some(x) = o.workers {
        c.workers = x;
    }
    if let Some(x) = &o.separations {
        c.scan.get_or_insert_with(ScanSettings::default).separations = x.clone();
    }
    if let Some(x) = &o.output_dir {
        c.output.dir = Some(x.clone());
    }
    c.validate()?;
    Ok(c)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (path, overrides) = match &cli.command {
        Command::Ground(a) | Command::Scan(a) | Command::ValidateConfig(a) => (&a.config, &a.overrides),
        Command::DumpTables(a) | Command::DumpSector(a) => (&a.config, &a.overrides),
    };
    let cfg = match load(path, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_INVALID_CONFIG));
        }
    };
    match &cli.command {
        Command::ValidateConfig(_) => {
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Ground(_) | Command::Scan(_) => {
            let rec = if matches!(cli.command, Command::Scan(_)) {
                run_potential_scan(&cfg)
            } else {
                run_ground_state(&cfg)
            };
            for e in &rec.errors {
                eprintln!("error: {e}");
            }
            for p in emit_results(&rec, &cfg.output_dir())? {
                println!("{}", p.display());
            }
            Ok(ExitCode::from(exit_code(&rec) as u8))
        }
        Command::DumpTables(a) => {
            let model = build_model(&cfg, &ChargeConfig::neutral())?;
            write_json(&a.out, &dump_tables(&model))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DumpSector(a) => {
            let model = build_model(&cfg, &ChargeConfig::neutral())?;
            match dump_sector(&model, cfg.oracle_cap) {
                Ok(d) => {
                    write_json(&a.out, &d)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(EXIT_SOLVER_FAILED))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
