use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "levy-deco", version, about = "Decoherence factors of Lévy momentum-kick processes")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Evaluate the characteristic exponent Ψ(s) on a grid.
    Exponent(ExponentArgs),
    /// Decoherence factor Φ(t,s) in closed form, optionally against the jump expansion.
    Evolve(EvolveArgs),
    /// Compound-Poisson decoherence against its Gaussian limit over mean event numbers.
    Transition(TransitionArgs),
    /// Empirical CF of sampled momentum transfers against the analytic one.
    Montecarlo(MontecarloArgs),
    /// Fringe visibility over time for given path-separation weights.
    Visibility(VisibilityArgs),
}

impl Cmd {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponent(_) => "exponent",
            Self::Evolve(_) => "evolve",
            Self::Transition(_) => "transition",
            Self::Montecarlo(_) => "montecarlo",
            Self::Visibility(_) => "visibility",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Separation grid as lo:hi:n.
    #[arg(long)]
    pub grid: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flat key=value file; keys are long flag names, flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(
    ArgGroup::new("model")
        .required(true)
        .multiple(true)
        .args(["gaussian", "stable", "mandel", "gas", "pd", "lambda_sq", "omega_sq"])
))]
pub struct ModelArgs {
    /// Drift and diffusion, e.g. a=0,D=1.
    #[arg(long)]
    pub gaussian: Option<String>,
    /// Symmetric stable law, e.g. alpha=1.5,K=1,x0=1.
    #[arg(long)]
    pub stable: Option<String>,
    /// Photon recoil kicks, e.g. k0=1,rate=2.
    #[arg(long)]
    pub mandel: Option<String>,
    /// Tabulated collision kernel w(q).
    #[arg(long)]
    pub gas: Option<PathBuf>,
    /// Gas density, particle mass and incoming momentum, e.g. n=1,M=1,p0=1.
    #[arg(long, requires = "gas")]
    pub gas_params: Option<String>,
    /// Tabulated kick density for a compound-Poisson process at --rate.
    #[arg(long, requires = "rate")]
    pub pd: Option<PathBuf>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Tabulated |λ(q)|², the finite-rate jump weight.
    #[arg(long)]
    pub lambda_sq: Option<PathBuf>,
    /// Tabulated |ω(q)|², the compensated jump weight.
    #[arg(long)]
    pub omega_sq: Option<PathBuf>,
    /// Compensator scale for --omega-sq.
    #[arg(long, default_value_t = 1.0)]
    pub q0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Build stable exponents from their Lévy measure by quadrature.
    #[arg(long)]
    pub numeric: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountModelArg {
    Poisson,
    Gaussian,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Times as a comma list or lo:hi:n.
    #[arg(long, default_value = "1")]
    pub t: String,
    /// Add the jump-expansion columns (compound-Poisson models only).
    #[arg(long)]
    pub jump: bool,
    /// Highest event number kept in the jump expansion.
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long, value_enum, default_value = "poisson")]
    pub count_model: CountModelArg,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct TransitionArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Mean event numbers as a comma list.
    #[arg(long, required = true)]
    pub nbar: String,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct MontecarloArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Also write the raw samples to this file.
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct VisibilityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Times as a comma list or lo:hi:n.
    #[arg(long, default_value = "0,0.5,1,2")]
    pub t: String,
    /// Two-column file of separations and weights summing to one.
    #[arg(long, conflicts_with = "point")]
    pub weights: Option<PathBuf>,
    /// All weight on a single separation.
    #[arg(long)]
    pub point: Option<f64>,
}

/// Inserts `--key=value` tokens from a config file right after the
/// subcommand, so anything given on the command line overrides them.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let mut injected = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("{path}:{}: expected key=value", n + 1)));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            continue;
        }
        match value {
            "true" => injected.push(format!("--{key}")),
            "false" => {}
            _ => injected.push(format!("--{key}={value}")),
        }
    }
    let mut out = argv;
    if out.len() >= 2 {
        let tail = out.split_off(2);
        out.extend(injected);
        out.extend(tail);
    }
    Ok(out)
}
