//! `modgauss` command-line harness.
//!
//! Exit status: 0 when every gate passes, 1 when a gate fails, 2 on a
//! usage or parameter error.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use modgauss::Complex64;
use serde::Serialize;

use commands::{ExpansionSweep, McExperiment, ZonePreset};
use config::{CommonArgs, ComplexArg, ExperimentConfig, OutputFormat};
use output::{write_report, Report};

#[derive(Debug, Parser)]
#[command(name = "modgauss", version, about = "Log-determinant transforms, expansions and Monte Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the finite-n residue against its limit.
    PsiTable {
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluation points, e.g. `0.5,0.2+0.3i`.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5", allow_hyphen_values = true)]
        z: Vec<ComplexArg>,
    },
    /// Compare the exact gamma-ratio sum with its expansion.
    VerifyExpansion(VerifyArgs),
    /// Tail probabilities against the normal tail.
    McClt {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        y: Vec<f64>,
        /// Allowed |ratio − 1|.
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
    },
    /// Kolmogorov distance against the zone-of-control bound.
    McBerryEsseen {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = ZonePreset::BetaProof)]
        zone: ZonePreset,
        /// K1 for the beta presets, K for the GUE presets.
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        /// Required ratio between the distances at the first and last n.
        #[arg(long, default_value_t = 1.5)]
        min_decrease: f64,
    },
    /// Moderate-deviation tails P[X − μ ≥ x t_n].
    McMdp {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.3", allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 0.7)]
        low: f64,
        #[arg(long, default_value_t = 1.4)]
        high: f64,
    },
    /// Window probabilities at scale t_n^(-delta_exp).
    McLlt {
        #[command(flatten)]
        common: CommonArgs,
        /// Window `a,b`.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [-1.0, 1.0], allow_hyphen_values = true)]
        window: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        delta_exp: f64,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// Empirical Laplace transform against the exact one.
    McLaplace {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_value = "-0.25,0.25,0.5", allow_hyphen_values = true)]
        z: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        /// Gates allowed in (sigma, sigma + 1].
        #[arg(long, default_value_t = 2)]
        allowance: usize,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    n: Vec<u64>,
    /// Explicit grid; a spiral inside the window is used when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    z: Vec<ComplexArg>,
    #[arg(long, default_value_t = 20)]
    spiral: usize,
    #[arg(long, default_value_t = 3.0)]
    max_spread: f64,
    #[arg(long, default_value_t = 1e-9)]
    telescoping_tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn zs(list: &[ComplexArg]) -> Vec<Complex64> {
    list.iter().map(|c| c.0).collect()
}

fn emit<R: Serialize>(report: Report<R>, cfg: &ExperimentConfig) -> Result<bool> {
    write_report(&report, cfg.output_format, cfg.output_path.as_deref())?;
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool> {
    let mc = |common: &CommonArgs, experiment: McExperiment| -> Result<bool> {
        let cfg = ExperimentConfig::from_args(common, Vec::new(), false)?;
        let report = commands::mc(&cfg, &experiment)?;
        emit(report, &cfg)
    };
    match cli.command {
        Command::PsiTable { common, z } => {
            let cfg = ExperimentConfig::from_args(&common, zs(&z), true)?;
            emit(commands::psi_table(&cfg)?, &cfg)
        }
        Command::VerifyExpansion(v) => {
            if v.beta.is_empty() || v.n.is_empty() {
                bail!("--beta and --n need at least one value");
            }
            if v.z.is_empty() && v.spiral == 0 {
                bail!("the z grid is empty");
            }
            let common = CommonArgs {
                ensemble: "laguerre".into(),
                beta: v.beta[0],
                n: v.n.clone(),
                tau1: 1.0,
                tau2: 1.0,
                delta_re: 0.0,
                delta_im: 0.0,
                samples: 1,
                seed: 0,
                format: v.format,
                out: v.out.clone(),
            };
            let cfg = ExperimentConfig::from_args(&common, zs(&v.z), false)?;
            let sweep = ExpansionSweep {
                betas: v.beta,
                n_list: v.n,
                z_grid: zs(&v.z),
                spiral: v.spiral,
                max_spread: v.max_spread,
                telescoping_tol: v.telescoping_tol,
            };
            emit(commands::verify_expansion(&sweep, &cfg)?, &cfg)
        }
        Command::McClt { common, y, tol } => mc(&common, McExperiment::Clt { ys: y, tol }),
        Command::McBerryEsseen { common, zone, k1, min_decrease } => {
            mc(&common, McExperiment::BerryEsseen { zone, k1, min_decrease })
        }
        Command::McMdp { common, x, low, high } => mc(&common, McExperiment::Mdp { xs: x, low, high }),
        Command::McLlt { common, window, delta_exp, tol } => {
            mc(&common, McExperiment::Llt { a: window[0], b: window[1], delta_exp, tol })
        }
        Command::McLaplace { common, z, sigma, allowance } => {
            if z.is_empty() {
                bail!("the z grid is empty");
            }
            mc(&common, McExperiment::Laplace { zs: z, sigma, allowance })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("modgauss: one or more gates failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("modgauss: {e:#}");
            ExitCode::from(2)
        }
    }
}
