use std::path::PathBuf;

use billner::scoring::Level;
use billner::{RepairPolicy, Scheme};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "billner", version, about = "Two-level entity annotation toolkit for congressional bills")]
pub struct Cli {
    /// JSON object of flag defaults; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Upper bound on concurrent work (HTTP requests).
    #[arg(long, short = 'j', global = true, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,

    /// Log progress to standard error.
    #[arg(long, short = 'v', global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download introduced bill texts and write a tokenized split.
    Ingest(IngestArgs),
    /// Tokenize plain text files into a split with no tag columns.
    Tokenize(TokenizeArgs),
    /// Check tag layers for ill-formed sequences.
    Validate(ValidateArgs),
    /// Print size and mention statistics of splits.
    Stats(StatsArgs),
    /// Entity-level precision, recall and F1 of predictions against gold.
    Score(ScoreArgs),
    /// Pairwise agreement between annotators.
    Iaa(IaaArgs),
    /// Token-level confusion matrix.
    Confusion(ConfusionArgs),
    /// Assign level-two labels to level-one predictions with a chat model.
    Sublabel(SublabelArgs),
    /// Validate, sublabel, score and report in one run.
    Pipeline(PipelineArgs),
    /// Print the label system as JSON.
    Ontology(OntologyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepairArg {
    Conll,
    Discard,
    None,
}

impl RepairArg {
    pub fn policy(self) -> Option<RepairPolicy> {
        match self {
            RepairArg::Conll => Some(RepairPolicy::Conll),
            RepairArg::Discard => Some(RepairPolicy::Discard),
            RepairArg::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Csv,
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Bill identifier such as 118-hr-189; repeatable.
    #[arg(long = "bill", value_name = "ID")]
    pub bills: Vec<String>,
    /// File with one bill identifier per line.
    #[arg(long, value_name = "FILE")]
    pub bills_file: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Directory for the untokenized texts.
    #[arg(long, value_name = "DIR")]
    pub raw_dir: Option<PathBuf>,
    #[arg(long, env = "CONGRESS_API_KEY", hide_env_values = true)]
    pub api_key: Option<String>,
    #[arg(long, default_value = billner::corpus::DEFAULT_API_BASE)]
    pub api_base: String,
    /// Extra tokens kept whole, one per line.
    #[arg(long, value_name = "FILE")]
    pub abbreviations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TokenizeArgs {
    /// Text files, one document each; standard input when empty.
    pub inputs: Vec<PathBuf>,
    /// Output split; standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub abbreviations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "bio")]
    pub scheme: Scheme,
    /// Exit with status 1 when any violation is found.
    #[arg(long)]
    pub strict: bool,
    /// Write a repaired copy of the (single) input.
    #[arg(long, value_name = "FILE", requires = "repair")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub repair: Option<RepairArg>,
    /// Machine-readable violation list.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "split", value_name = "FILE", required = true)]
    pub splits: Vec<PathBuf>,
    /// JSON output file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReadArgs {
    #[arg(long, default_value = "bio")]
    pub scheme: Scheme,
    #[arg(long, value_enum, default_value = "conll")]
    pub repair: RepairArg,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    #[arg(long, default_value = "one")]
    pub level: Level,
    /// Score the IO view of both layers.
    #[arg(long)]
    pub io: bool,
    #[command(flatten)]
    pub read: ReadArgs,
    /// JSON report file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IaaArgs {
    /// NAME=FILE for one annotator; at least two.
    #[arg(long = "annotator", value_name = "NAME=FILE", required = true, num_args = 1)]
    pub annotators: Vec<String>,
    #[arg(long, value_enum, default_value = "conll")]
    pub repair: RepairArg,
    /// JSON output file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConfusionArgs {
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    #[arg(long, default_value = "two")]
    pub level: Level,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: MatrixFormat,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EndpointArgs {
    #[arg(long, env = "LLM_BASE_URL")]
    pub base_url: Option<String>,
    #[arg(long, env = "LLM_API_KEY", hide_env_values = true)]
    pub api_key: Option<String>,
    #[arg(long, env = "LLM_MODEL", default_value = billner::router::DEFAULT_MODEL)]
    pub model: String,
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = billner::router::DEFAULT_MAX_TOKENS)]
    pub max_tokens: u32,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 120)]
    pub timeout: u64,
    #[arg(long, default_value_t = 2)]
    pub retries: u32,
    /// Transcript file used for replay and recording.
    #[arg(long, value_name = "FILE")]
    pub cache: Option<PathBuf>,
    /// Answer only from the cache; never contact the endpoint.
    #[arg(long, requires = "cache")]
    pub offline: bool,
}

#[derive(Debug, Args)]
pub struct SublabelArgs {
    /// Split with level-one predictions.
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    /// Output split with both layers.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// One JSON line per classified mention.
    #[arg(long, value_name = "FILE")]
    pub results: Option<PathBuf>,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    /// Split with level-one predictions.
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Args)]
pub struct OntologyArgs {
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
