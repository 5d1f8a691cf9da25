use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "evlab", version, about = "Uniform maximum and anti-maximum principles for discretized operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the operator gallery with predicted verdicts.
    Gallery(GalleryArgs),
    /// Classify R(mu) over a grid of spectral parameters.
    Scan(ScanArgs),
    /// Follow margins at a fixed mu under mesh refinement.
    Refine(RefineArgs),
    /// Run a theorem-check suite.
    Check(CheckArgs),
    /// Compare discretized resolvents with closed forms.
    Oracle(OracleArgs),
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, found {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("parameter {k} is not a number: {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Args, Clone, Default)]
pub struct OutputArgs {
    /// Report path; a scan also writes a CSV table next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report to stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ThresholdArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub eps_cls: Option<f64>,
    #[arg(long)]
    pub uniform_low: Option<f64>,
    #[arg(long)]
    pub uniform_high: Option<f64>,
    #[arg(long)]
    pub divergent_growth: Option<f64>,
    #[arg(long)]
    pub proximity_fraction: Option<f64>,
    #[arg(long)]
    pub min_doublings: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct OperatorArgs {
    /// dirichlet, neumann, periodic, nonlocal_symmetric, thermostat, graph, odd_order, delay
    #[arg(long)]
    pub op: Option<String>,
    /// Operator parameter, e.g. beta=0.2; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Graph edges as "a-b:length,..."
    #[arg(long)]
    pub edges: Option<String>,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, allow_hyphen_values = true)]
    pub probe_mu: Option<f64>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// core, resolvent-identity, extension, projection, powers, characterization, group-positivity, all
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// dirichlet_green, thermostat, periodic_first_order, neumann_constant, delay_left_eigenvector
    #[arg(long)]
    pub name: String,
    #[command(flatten)]
    pub operator: OperatorArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}
