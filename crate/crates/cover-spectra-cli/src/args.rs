use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cover_spectra::covers::ModelKind;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "cover-spectra", version, about = "Experiments on random covers of a base graph")]
pub struct Cli {
    /// Worker threads for Monte Carlo loops.
    #[arg(long, global = true, env = "COVER_SPECTRA_THREADS")]
    pub threads: Option<usize>,

    /// Write the table here (plus a `.json` sidecar) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|_| {
        let names: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown model `{s}`, expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BaseArgs {
    /// Base graph file; the figure-eight when omitted.
    #[arg(long)]
    pub base: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_parser = parse_model, default_value = "permutation")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample covers and list them, or print one as a graph file.
    Generate(GenerateArgs),
    /// Adjacency spectra of sampled covers with new eigenvalues marked.
    Spectrum(SpectrumArgs),
    /// Probability of a non-Alon new eigenvalue across degrees.
    Nonalon(NonalonArgs),
    /// Search sampled covers (or the base) for tangles.
    Tangles(TanglesArgs),
    /// Non-backtracking trace excess of sampled covers.
    TraceScan(TraceScanArgs),
    /// Exact and Monte Carlo expected counts of small étale patterns.
    Expect(ExpectArgs),
    /// Shannon valence of a graph with edge lengths.
    Shannon(ShannonArgs),
    /// Trace-method bounds as a Markdown table.
    Bounds(BoundsArgs),
    /// Check the Ihara determinant identity on given or random graphs.
    IharaCheck(IharaArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Print the first cover in the graph file format instead of a table.
    #[arg(long)]
    pub graph: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NonalonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Expected degree of the base; checked against the graph.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TanglesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Cover degree; the base itself is searched when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub r: i64,
    #[arg(long, default_value_t = 12)]
    pub edge_budget: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TraceScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Zero out covers containing a tangle with this Perron value.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub r: i64,
    #[arg(long, default_value_t = 12)]
    pub edge_budget: usize,
    /// Fit this many terms of the 1/n expansion for each k.
    #[arg(long)]
    pub fit: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExpectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub max_edges: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Monte Carlo trials per degree; exact values only when zero.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long)]
    pub connected: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShannonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    /// One length per edge in orientation order; all ones when omitted.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Vec<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    /// Trace power; `2 floor(sqrt(d-1) + 1)` when omitted.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IharaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    /// Check this many random graphs instead of the base.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub max_v: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
