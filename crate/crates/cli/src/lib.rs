//! The `bouncer` command line.

pub mod cmd;
pub mod exit;
pub mod replication;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use exit::{exit_code, UsageError};

#[derive(Debug, Parser)]
#[command(
    name = "bouncer",
    version,
    about = "Explanation laundering on remote classifiers, and the audits that catch it"
)]
pub struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Tree,
    Mlp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Honest,
    #[value(alias = "pr-attack")]
    PrAttack,
}

impl From<ModeArg> for bouncer_service::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Honest => Self::Honest,
            ModeArg::PrAttack => Self::PrAttack,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PruneArg {
    PartialEvaluation,
    PathOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    A,
    B,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    /// Headered CSV with one column per feature.
    Csv,
    /// The 25-column whitespace-separated German Credit file.
    German,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CurveScenario {
    Independence,
    Dependence,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a tree from a CSV dataset, or a batch of credit networks.
    Train(TrainArgs),
    /// Show the honest and the laundered explanation of one decision.
    AttackDemo(DemoArgs),
    /// Search a model, local or remote, for incoherent pairs.
    Audit(AuditArgs),
    /// Incoherent-pair probability curves under group disparity.
    Dimpact(DimpactArgs),
    /// Run the classify-and-explain endpoint.
    Serve(ServeArgs),
    /// Encode the categorical German Credit file as the 24-column numeric file.
    ConvertGerman(ConvertArgs),
    /// Train and audit the credit networks and compare with the published results.
    Replicate(ReplicateArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub backend: BackendKind,
    /// Training data: CSV with a `label` column (tree) or the numeric German file (mlp).
    #[arg(long)]
    pub data: PathBuf,
    /// Feature space TOML (tree only).
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Credit configuration TOML (mlp only); the bundled one by default.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub min_samples_split: usize,
    /// Number of networks, seeded `--seed`, `--seed + 1`, ...
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Model file (tree) or output directory (mlp).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_enum, default_value = "tree")]
    pub backend: BackendKind,
    #[arg(long)]
    pub model: PathBuf,
    /// `name=value,...` covering every feature.
    #[arg(long)]
    pub instance: String,
    #[arg(long, value_enum, default_value = "partial-evaluation")]
    pub prune: PruneArg,
    /// Also write the surrogate tree here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    /// In-process target: model kind.
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    /// In-process target: model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Remote target: base URL of a running server.
    #[arg(long)]
    pub url: Option<String>,
    /// Feature space TOML; required for a remote target.
    #[arg(long)]
    pub space: Option<PathBuf>,
    #[arg(long, default_value = "auditor")]
    pub client_id: String,
    /// Profiles to audit; drawn uniformly from the space when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub data_format: DataFormat,
    /// Number of profiles to use.
    #[arg(long, default_value_t = 50)]
    pub profiles: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Comma-separated discriminative features swapped together (scenario b).
    /// Repeat the flag for several sets; all discriminative features by default.
    #[arg(long = "swap-set")]
    pub swap_sets: Vec<String>,
    /// Target confidence for the pairs-needed estimate.
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
    /// Output directory for report.csv and confidence.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DimpactArgs {
    /// Grid resolution: alpha and p_b each take `steps + 1` values on [0, 1].
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub scenario: CurveScenario,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Server TOML. Without it, --backend and --model are required.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub listen: Option<String>,
    #[arg(long)]
    pub max_queries: Option<u32>,
    #[arg(long)]
    pub window_secs: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// The categorical file (`german.data`).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    /// The numeric file (`german.data-numeric`).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub seeds: u64,
    /// Scenario A trials per model; the configured value by default.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Target confidence for the pairs-needed table.
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Directory for the report and CSVs; the report is always printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Train(a) => cmd::train::run(&a, seed),
        Command::AttackDemo(a) => cmd::demo::run(&a),
        Command::Audit(a) => cmd::audit::run(&a, seed),
        Command::Dimpact(a) => cmd::dimpact::run(&a),
        Command::Serve(a) => cmd::serve::run(&a),
        Command::ConvertGerman(a) => cmd::german::convert(&a),
        Command::Replicate(a) => cmd::german::replicate(&a, seed),
    }
}
