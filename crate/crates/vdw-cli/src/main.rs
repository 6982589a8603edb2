use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use vdw_cli::config::ConfigFile;
use vdw_cli::kernel_check::run_kernel_check;
use vdw_cli::scenario::{run_cp_consistency, run_force_scan, ScanKind, ScanOutput};

/// Batch computation of time-dependent van der Waals and Casimir-Polder
/// forces between excited atoms.
#[derive(Parser)]
#[command(name = "vdw", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-atom force against a distance grid at fixed time.
    ForceVsDistance(ScanArgs),
    /// Two-atom force against a time grid at fixed distance.
    ForceVsTime(ScanArgs),
    /// Single-atom Casimir-Polder force vs the pairwise Born sum.
    CpConsistency(ScanArgs),
    /// Randomized verification of the spectral-kernel identities.
    KernelCheck(KernelCheckArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/SVG files.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for grid evaluation; 0 uses all cores. Results are
    /// byte-identical for any worker count.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct KernelCheckArgs {
    /// Output directory for the CSV report.
    #[arg(long)]
    out: PathBuf,
    /// Seed of the random parameter draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random parameter sets.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Maximum accepted relative deviation.
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
}

fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read configuration {}", path.display()))?;
    ConfigFile::parse(&text)
}

fn write_scan_output(out_dir: &Path, output: &ScanOutput) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let csv_path = out_dir.join(&output.csv_name);
    fs::write(&csv_path, &output.csv)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    if let (Some(name), Some(svg)) = (&output.svg_name, &output.svg) {
        let svg_path = out_dir.join(name);
        fs::write(&svg_path, svg)
            .with_context(|| format!("cannot write {}", svg_path.display()))?;
    }
    Ok(())
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::ForceVsDistance(args) => {
            let config = load_config(&args.config)?;
            let output = run_force_scan(&config, ScanKind::Distance, args.workers)?;
            write_scan_output(&args.out, &output)?;
            println!("force-vs-distance: {}", output.summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::ForceVsTime(args) => {
            let config = load_config(&args.config)?;
            let output = run_force_scan(&config, ScanKind::Time, args.workers)?;
            write_scan_output(&args.out, &output)?;
            println!("force-vs-time: {}", output.summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::CpConsistency(args) => {
            let config = load_config(&args.config)?;
            let output = run_cp_consistency(&config, args.workers)?;
            write_scan_output(&args.out, &output)?;
            println!("cp-consistency: {}", output.summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::KernelCheck(args) => {
            let report = run_kernel_check(args.seed, args.count, args.tolerance);
            fs::create_dir_all(&args.out).with_context(|| {
                format!("cannot create output directory {}", args.out.display())
            })?;
            let path = args.out.join("kernel_check.csv");
            fs::write(&path, &report.csv)
                .with_context(|| format!("cannot write {}", path.display()))?;
            println!("kernel-check: {}", report.summary);
            if report.failures > 0 {
                Ok(ExitCode::FAILURE)
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
