//! Command-line arguments shared by every subcommand and their validation
//! into an [`ExperimentConfig`].

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use modgauss::cgf::{EnsembleKind, EnsembleSpec};
use modgauss::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A real or complex number written as `a`, `a+bi`, `a-bi` or `bi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim().replace(' ', "");
        let bad = || format!("cannot parse '{s}' as a complex number");
        let Some(body) = t.strip_suffix('i') else {
            return t.parse::<f64>().map(|re| ComplexArg(Complex64::new(re, 0.0))).map_err(|_| bad());
        };
        // split at the last sign that is not part of an exponent or the leading sign
        let bytes = body.as_bytes();
        let split =
            (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.parse().map_err(|_| bad())?;
        Ok(ComplexArg(Complex64::new(re, im)))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// gue, laguerre, gram, jacobi, circular or circular-jacobi
    #[arg(long, default_value = "laguerre")]
    pub ensemble: String,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Matrix sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub tau1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta_im: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 20261018)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: EnsembleKind,
    pub beta: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub delta: Complex64,
    pub n_list: Vec<u64>,
    pub z_grid: Vec<Complex64>,
    pub n_samples: u64,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_args(args: &CommonArgs, z_grid: Vec<Complex64>, needs_z: bool) -> Result<Self> {
        let kind: EnsembleKind = args.ensemble.parse().map_err(anyhow::Error::new)?;
        if args.n.is_empty() {
            bail!("--n needs at least one matrix size");
        }
        if needs_z && z_grid.is_empty() {
            bail!("the z grid is empty");
        }
        if args.samples == 0 {
            bail!("--samples must be at least 1");
        }
        let cfg = Self {
            kind,
            beta: if kind == EnsembleKind::Gue { 2.0 } else { args.beta },
            tau1: args.tau1,
            tau2: args.tau2,
            delta: Complex64::new(args.delta_re, args.delta_im),
            n_list: args.n.clone(),
            z_grid,
            n_samples: args.samples,
            seed: args.seed,
            output_format: args.format,
            output_path: args.out.clone(),
        };
        for &n in &cfg.n_list {
            cfg.spec(n)?;
        }
        Ok(cfg)
    }

    pub fn spec(&self, n: u64) -> Result<EnsembleSpec> {
        let spec = match self.kind {
            EnsembleKind::Gue => EnsembleSpec::gue(n),
            EnsembleKind::Laguerre => EnsembleSpec::laguerre(self.beta, n),
            EnsembleKind::Gram => EnsembleSpec::gram(self.beta, n),
            EnsembleKind::Jacobi => EnsembleSpec::jacobi(self.beta, n, self.tau1, self.tau2),
            EnsembleKind::Circular => EnsembleSpec::circular(self.beta, n),
            EnsembleKind::CircularJacobi => EnsembleSpec::circular_jacobi(self.beta, n, self.delta),
        };
        spec.with_context(|| format!("invalid {} ensemble at n = {n}", self.kind))
    }
}
