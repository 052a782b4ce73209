use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use motorcargo::{experiments, ExperimentSpec, Overrides};

#[derive(Parser)]
#[command(name = "motorcargo", version, about = "Motor-cargo transport experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file with parameter overrides, grids and simulation settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Quadrature error above which rows are flagged.
    #[arg(long, global = true)]
    tol_quad: Option<f64>,
    /// Replicas per simulated point.
    #[arg(long, global = true)]
    replicas: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// One-motor force-velocity: simulation, averaged and instantaneous.
    Fv1,
    /// One- and two-motor velocity across cargo friction.
    ViscSweep,
    /// Two-motor force-velocity and force-diffusivity, with stall forces.
    Fv2,
    /// Two-motor force-velocity at raised friction.
    RegimePanels,
    /// Stall forces of one and two motors.
    Stall,
    /// Stationary densities as CSV.
    DensityDump,
}

impl Command {
    fn id(self) -> &'static str {
        match self {
            Self::Fv1 => "fv1",
            Self::ViscSweep => "visc-sweep",
            Self::Fv2 => "fv2",
            Self::RegimePanels => "regime-panels",
            Self::Stall => "stall",
            Self::DensityDump => "density-dump",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides { seed: cli.seed, out: cli.out, tol_quad: cli.tol_quad, replicas: cli.replicas };
    let run = || -> anyhow::Result<motorcargo::Report> {
        let spec = ExperimentSpec::resolve(cli.command.id(), cli.config.as_deref(), &overrides)?;
        experiments::run(&spec)
    };
    match run() {
        Ok(report) => {
            print!("{}", report.summary());
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprint!("{}", report.diff());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
