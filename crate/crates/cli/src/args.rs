use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Crowdfunding campaign analytics: features, success prediction, relaunch
/// pairs and temporal clustering.
#[derive(Debug, Parser)]
#[command(name = "crowdcast", version)]
pub struct Cli {
    /// Flat key=value file mirroring the subcommand's flags; explicit flags win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Global seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (default: available cores). Never changes any output.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load JSONL record files into a corpus snapshot.
    Ingest(IngestArgs),
    /// Build a feature table from a corpus snapshot.
    Featurize(FeaturizeArgs),
    /// Train one classifier and save it.
    Train(TrainArgs),
    /// Stratified k-fold cross-validation.
    Evaluate(EvaluateArgs),
    /// Cross-validated accuracy per temporal state.
    SweepStates(SweepArgs),
    /// Failed-relaunch pair analysis.
    Pairs(PairsArgs),
    /// GMM clustering of successful projects' pledge curves.
    Cluster(ClusterArgs),
    /// Success rates per group.
    Summarize(SummarizeArgs),
    /// Print the embedded stop-word and abbreviation lists.
    DumpLexicons(DumpArgs),
    /// Render a markdown report and plot data from run outputs.
    Report(ReportArgs),
    /// Write a synthetic corpus with planted ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory holding projects.jsonl, creators.jsonl and the optional files.
    #[arg(long, value_name = "DIR")]
    pub dir: Option<PathBuf>,
    #[arg(long, required_unless_present = "dir")]
    pub projects: Option<PathBuf>,
    #[arg(long, required_unless_present = "dir")]
    pub creators: Option<PathBuf>,
    #[arg(long)]
    pub temporal: Option<PathBuf>,
    #[arg(long)]
    pub social: Option<PathBuf>,
    #[arg(long)]
    pub promo: Option<PathBuf>,
    /// Fail on any validation problem instead of dropping the record.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Feature families: static, static+social or full.
    #[arg(long, default_value = "full")]
    pub config: String,
    /// Temporal cutoff state (full config only; default: last state).
    #[arg(long)]
    pub state: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub n_states: usize,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Also export the table as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct LearnerArgs {
    /// success, range2 or range3.
    #[arg(long, default_value = "success")]
    pub task: String,
    /// nb, rf or ada.
    #[arg(long, default_value = "rf")]
    pub algo: String,
    /// Trees per random forest.
    #[arg(long, default_value_t = 100)]
    pub n_trees: usize,
    /// AdaBoost stages.
    #[arg(long, default_value_t = 10)]
    pub n_stages: usize,
    /// Trees in each AdaBoost base forest.
    #[arg(long, default_value_t = 10)]
    pub base_trees: usize,
    /// Features tried per split: sqrt, all or a count.
    #[arg(long, default_value = "sqrt")]
    pub max_features: String,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub min_leaf: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub var_floor: f64,
    /// Keep only features with chi-squared p below this before learning.
    #[arg(long, value_name = "ALPHA")]
    pub select_alpha: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub chi2_bins: usize,
    /// Write the chi-squared ranking here (needs --select-alpha).
    #[arg(long, value_name = "PATH")]
    pub chi2: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long)]
    pub report: PathBuf,
    /// Pooled confusion matrix, rows are true classes.
    #[arg(long, value_name = "PATH")]
    pub confusion: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// `a..b` (inclusive), `a..b:step` or a comma list.
    #[arg(long, default_value = "0..100")]
    pub states: String,
    #[arg(long, default_value_t = 100)]
    pub n_states: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Similarity threshold for the property study.
    #[arg(long, default_value_t = 0.8)]
    pub lambda: f64,
    /// λ grid `start:end:step`.
    #[arg(long, value_name = "GRID")]
    pub sweep: Option<String>,
    /// Where the λ sweep goes (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub sweep_out: Option<PathBuf>,
    /// Every candidate pair with similarity and change rates.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-property means and Welch tests at --lambda.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Comma-separated ECDF outputs, one per --cdf-properties entry.
    #[arg(long, value_name = "PATHS")]
    pub cdf: Option<String>,
    #[arg(long, default_value = "goal,n_updates")]
    pub cdf_properties: String,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub buckets: usize,
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    /// diagonal or full.
    #[arg(long, default_value = "diagonal")]
    pub cov: String,
    /// Penalize BIC by free-parameter count instead of K.
    #[arg(long)]
    pub bic_param_count: bool,
    #[arg(long, default_value_t = 5)]
    pub n_init: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub ridge: f64,
    /// Cluster label per project.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub bic: Option<PathBuf>,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub promo: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// month, category, duration_days, country or us_state.
    #[arg(long, default_value = "category")]
    pub by: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Mean per-state percentage of money and backers.
    #[arg(long, value_name = "PATH")]
    pub percent_profile: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub n_states: usize,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub eval: Option<PathBuf>,
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub pairs_report: Option<PathBuf>,
    #[arg(long)]
    pub lambda_sweep: Option<PathBuf>,
    #[arg(long)]
    pub bic: Option<PathBuf>,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub promo: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Directory receiving report.md and the plot CSVs.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    pub n_projects: usize,
    #[arg(long, default_value_t = 0.46)]
    pub success_rate: f64,
    #[arg(long, default_value_t = 0.03)]
    pub ineligible_rate: f64,
    /// Copy the success label into the FAQ count.
    #[arg(long)]
    pub label_copy: bool,
    #[arg(long, default_value_t = 1.0)]
    pub temporal_rate: f64,
    #[arg(long, default_value_t = 0.6)]
    pub social_rate: f64,
    #[arg(long)]
    pub no_promo: bool,
    #[arg(long, default_value_t = 10)]
    pub identical_pairs: usize,
    #[arg(long, default_value_t = 50)]
    pub dissimilar_pairs: usize,
    #[arg(long, default_value_t = 8000.0)]
    pub success_scale: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}
