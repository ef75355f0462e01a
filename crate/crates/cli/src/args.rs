use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "recur", version, about = "Recurrence-time and large-deviation workbench")]
pub struct Cli {
    /// JSON experiment config or a manifest from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 picks automatically. Falls back to RECUR_LDP_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON model file.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub model: Option<PathBuf>,
    /// Built-in model (default bernoulli-0.3).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Entropy rate, chain classification and stationary distribution.
    ModelInfo(NoArgs),
    /// Write a two-sided realization.
    Simulate(SimulateArgs),
    /// R_n and L_m on a single realization.
    Recur(RecurArgs),
    /// J_n convergence sweep over seeds.
    Estimate(EstimateArgs),
    /// Monte Carlo tail probabilities.
    Tails(TailsArgs),
    /// Exponential decay fits of tail probabilities.
    RateFit(RateFitArgs),
    /// Exact and simulated AEP deviation probabilities.
    Aep(AepArgs),
    /// Cramér rate function of -ln p(X) for i.i.d. sources.
    Cramer(CramerArgs),
    /// Exponential law of P(block)·R_n.
    KimCheck(BlockArgs),
    /// Conditional mean return time against 1/P(block).
    KacCheck(BlockArgs),
    /// J_n against the match-length estimator.
    CompareEstimators(CompareArgs),
    /// Render CSV columns as an SVG line plot.
    Plot(PlotArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ModelInfo(_) => "model-info",
            Command::Simulate(_) => "simulate",
            Command::Recur(_) => "recur",
            Command::Estimate(_) => "estimate",
            Command::Tails(_) => "tails",
            Command::RateFit(_) => "rate-fit",
            Command::Aep(_) => "aep",
            Command::Cramer(_) => "cramer",
            Command::KimCheck(_) => "kim-check",
            Command::KacCheck(_) => "kac-check",
            Command::CompareEstimators(_) => "compare-estimators",
            Command::Plot(_) => "plot",
        }
    }

    /// The subcommand with no flags set, for runs driven by a config file.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "model-info" => Command::ModelInfo(NoArgs::default()),
            "simulate" => Command::Simulate(SimulateArgs::default()),
            "recur" => Command::Recur(RecurArgs::default()),
            "estimate" => Command::Estimate(EstimateArgs::default()),
            "tails" => Command::Tails(TailsArgs::default()),
            "rate-fit" => Command::RateFit(RateFitArgs::default()),
            "aep" => Command::Aep(AepArgs::default()),
            "cramer" => Command::Cramer(CramerArgs::default()),
            "kim-check" => Command::KimCheck(BlockArgs::default()),
            "kac-check" => Command::KacCheck(BlockArgs::default()),
            "compare-estimators" => Command::CompareEstimators(CompareArgs::default()),
            "plot" => Command::Plot(PlotArgs::default()),
            _ => return None,
        })
    }
}

// Every field is optional so that flags can be layered over a config file;
// `fill_defaults` settles what was left unset.

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoArgs {}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// Symbols at or before x_0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub past: Option<usize>,
    /// Symbols from x_1 on.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub future: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurArgs {
    /// Realization written by `simulate`; generated from the model if absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub past: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub future: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Vec<usize>>,
    /// Q(n) = max(1, ⌈c·n^k⌉).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<f64>,
    /// Independent realizations per n.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runs: Option<u64>,
    /// Past window; defaults to ⌈2^{n(H+1)}⌉ + n capped at 2^26.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w_max: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailsArgs {
    /// upper, lower, aep, match_upper, match_lower.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub side: Option<Vec<String>>,
    /// Block lengths (window sizes m for the match sides).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<u64>,
    /// strict or weak.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub boundary: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateFitArgs {
    /// tails.csv to fit; a fresh sweep is run if absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub side: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub boundary: Option<String>,
}

impl RateFitArgs {
    pub fn sweep(&self) -> TailsArgs {
        TailsArgs {
            side: self.side.clone(),
            n: self.n.clone(),
            eps: self.eps.clone(),
            trials: self.trials,
            boundary: self.boundary.clone(),
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AepArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<Vec<f64>>,
    /// Monte Carlo trials alongside the exact value; 0 skips simulation.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<u64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CramerArgs {
    /// Levels a in nats.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<Vec<f64>>,
    /// AEP deviations δ in bits; evaluated at H ± δ ln 2.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockArgs {
    /// Blocks as symbol strings, e.g. 0000001.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block: Option<Vec<String>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<u64>,
    /// Scan window in units of 1/P(block).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u_max: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runs: Option<u64>,
    /// Future symbols each match-length window may use.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub horizon: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<String>,
    /// Columns whose values split the rows into separate lines.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group: Option<Vec<String>>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub log_y: Option<bool>,
    /// SVG file name inside the output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub svg: Option<String>,
}
