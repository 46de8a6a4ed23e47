mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contactloc_core::Error;

use crate::config::RunConfig;

/// Exact localization, residues and Duistermaat-Heckman asymptotics on weighted spheres.
#[derive(Parser, Debug)]
#[command(name = "contactloc", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// JSON run configuration (`-` reads stdin).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Reeb weights, e.g. `3/2,1`.
    #[arg(long, global = true, value_delimiter = ',', value_name = "W")]
    weights: Option<Vec<String>>,

    /// Action weights, e.g. `-1,1`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true, value_name = "B")]
    beta: Option<Vec<i64>>,

    /// Equivariant class as a polynomial in `u` and `s`.
    #[arg(long, global = true)]
    eta: Option<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Worker threads for the Monte Carlo oracle.
    #[arg(long, global = true, env = "CONTACTLOC_THREADS")]
    workers: Option<usize>,

    /// Histogram bins for the Monte Carlo oracle.
    #[arg(long, global = true)]
    bins: Option<usize>,

    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contact volume, exact and optionally by Monte Carlo.
    Volume {
        #[arg(long)]
        mc: bool,
    },
    /// Critical circles and the localized pairing ∫α∧η.
    Localize,
    /// Pushforward Π_*(η ∧ e^{i d_G α}) term by term.
    Pushforward {
        /// Evaluate the pushforward at these nonzero φ.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi: Vec<f64>,
    },
    /// Pairing on the contact quotient via a Jeffrey-Kirwan residue.
    Residue {
        /// Residue cone (`positive` or `negative`).
        #[arg(long)]
        cone: Option<String>,
    },
    /// Piecewise polynomial Duistermaat-Heckman distribution.
    DhProfile {
        /// Write (y, Re Q, Im Q) samples as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Also run the Monte Carlo histogram.
        #[arg(long)]
        mc: bool,
        /// Write the histogram (bin_left, bin_right, density, stderr) as CSV.
        #[arg(long, value_name = "FILE")]
        histogram_csv: Option<PathBuf>,
    },
    /// Gaussian-damped integral I(ε) and its ε → 0 behaviour.
    Asymptotics {
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        /// Write (epsilon, Re I, Im I) as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Run the verification suite.
    Verify {
        /// Run only these checks (by name or criterion label).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// List the available checks and exit.
        #[arg(long)]
        list: bool,
        /// Small Monte Carlo runs with widened tolerances.
        #[arg(long)]
        quick: bool,
        /// Multiply one Euler class by 1 + DELTA (negative control).
        #[arg(long, value_name = "DELTA")]
        perturb_euler: Option<f64>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    if e.is_precondition() {
        EXIT_PRECONDITION
    } else if matches!(e, Error::Internal(_)) {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_CONFIG
    }
}

fn load_config(args: &GlobalArgs) -> contactloc_core::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(w) = &args.weights {
        cfg.set_weights(w);
    }
    if let Some(b) = &args.beta {
        cfg.set_beta(b);
    }
    if let Some(eta) = &args.eta {
        cfg.eta = Some(eta.clone());
    }
    cfg.mc.seed = args.seed.or(cfg.mc.seed);
    cfg.mc.samples = args.samples.or(cfg.mc.samples);
    cfg.mc.workers = args.workers.or(cfg.mc.workers);
    cfg.mc.histogram_bins = args.bins.or(cfg.mc.histogram_bins);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli.global).and_then(|cfg| commands::run(&cli.command, &cfg, &cli.global));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
