use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chaplygin_cli::commands::{cmd_eigen, cmd_limit_study, cmd_sample, cmd_simulate, cmd_solve, cmd_verify};
use chaplygin_cli::{CliError, LoadedConfig, Report, VerifyOverrides};
use chaplygin_core::fvm::FluxKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact Riemann solutions for the relativistic Chaplygin gas.
#[derive(Debug, Parser)]
#[command(name = "chaplygin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Problem file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; a directory for `simulate`. Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FluxArg {
    Godunov,
    Lxf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the data and print the solution constants.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the self-similar solution at time `t`.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        xmin: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        xmax: f64,
        #[arg(long, default_value_t = 101)]
        npoints: usize,
    },
    /// Jump, generalized jump and weak-form residuals; exit 5 on a breach.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rh_tolerance: Option<f64>,
        #[arg(long)]
        grh_tolerance: Option<f64>,
        #[arg(long)]
        weak_tolerance: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Shift the delta shock speed before checking (debugging aid).
        #[arg(long, hide = true, allow_negative_numbers = true)]
        perturb_sigma: Option<f64>,
    },
    /// Fan integrals as the right state approaches the delta regime.
    LimitStudy {
        #[command(flatten)]
        common: Common,
    },
    /// Finite-volume run of the Riemann data.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        flux: Option<FluxArg>,
    },
    /// Characteristic speeds and eigenvectors of both states.
    Eigen {
        #[command(flatten)]
        common: Common,
    },
}

fn emit(report: &Report, out: Option<&Path>, directory: bool) -> Result<(), CliError> {
    match out {
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for (k, t) in report.tables.iter().enumerate() {
                if k > 0 {
                    writeln!(w)?;
                }
                t.write_to(&mut w)?;
            }
            w.flush()?;
        }
        Some(dir) if directory => {
            std::fs::create_dir_all(dir)?;
            for t in &report.tables {
                std::fs::write(dir.join(format!("{}.csv", t.name)), t.render())?;
            }
        }
        Some(path) => {
            let text: Vec<String> = report.tables.iter().map(|t| t.render()).collect();
            std::fs::write(path, text.join("\n"))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, directory, report) = match cli.command {
        Command::Solve { common } => {
            let cfg = LoadedConfig::load(&common.config)?;
            (common, false, cmd_solve(&cfg)?)
        }
        Command::Sample { common, t, xmin, xmax, npoints } => {
            let cfg = LoadedConfig::load(&common.config)?;
            (common, false, cmd_sample(&cfg, t, xmin, xmax, npoints)?)
        }
        Command::Verify { common, rh_tolerance, grh_tolerance, weak_tolerance, seed, perturb_sigma } => {
            let cfg = LoadedConfig::load(&common.config)?;
            let o = VerifyOverrides { rh_tolerance, grh_tolerance, weak_tolerance, seed, perturb_sigma };
            (common, false, cmd_verify(&cfg, &o)?)
        }
        Command::LimitStudy { common } => {
            let cfg = LoadedConfig::load(&common.config)?;
            (common, false, cmd_limit_study(&cfg)?)
        }
        Command::Simulate { common, flux } => {
            let cfg = LoadedConfig::load(&common.config)?;
            let flux = flux.map(|f| match f {
                FluxArg::Godunov => FluxKind::Godunov,
                FluxArg::Lxf => FluxKind::LaxFriedrichs,
            });
            (common, true, cmd_simulate(&cfg, flux)?)
        }
        Command::Eigen { common } => {
            let cfg = LoadedConfig::load(&common.config)?;
            (common, false, cmd_eigen(&cfg)?)
        }
    };
    emit(&report, common.out.as_deref(), directory)?;
    if report.breaches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(report.breaches.join("; ")))
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chaplygin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
