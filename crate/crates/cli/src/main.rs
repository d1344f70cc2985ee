mod commands;
mod heatmap;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nl2sparql::eval::Method;
use nl2sparql::seq2seq::Variant;

/// Translate English questions into SPARQL with an LSTM encoder-decoder.
#[derive(Parser, Debug)]
#[command(name = "nl2sparql", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the synthetic Geo880-style pair file.
    GenerateCorpus(GenerateArgs),
    /// Dump vocabularies and the fold assignment for a pair file.
    Prepare(PrepareArgs),
    /// Build a source or target embedding table.
    Embed(EmbedArgs),
    /// Bootstrap a target lexicon from attention alignments.
    Ourapp(OurappArgs),
    /// Train a model and write a checkpoint with its loss curve.
    Train(TrainArgs),
    /// Translate questions with a trained checkpoint.
    Translate(TranslateArgs),
    /// Score predictions, or cross-validate grid cells.
    Evaluate(EvaluateArgs),
    /// Render result tables from evaluation JSON.
    Report(ReportArgs),
    /// Draw an attention dump as a graymap.
    Heatmap(HeatmapArgs),
    /// Check queries against the SPARQL grammar, one per line.
    Lint(LintArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value_t = nl2sparql::corpus::geo::GEO_CORPUS_SIZE)]
    size: usize,
    #[arg(long, default_value_t = nl2sparql::corpus::geo::GEO_CORPUS_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PrepareArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Side {
    Source,
    Target,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Random,
    TfidfPca,
    W2v,
    Ourapp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Random => Method::Random,
            MethodArg::TfidfPca => Method::TfidfPca,
            MethodArg::W2v => Method::W2v10,
            MethodArg::Ourapp => Method::OurApp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Plain,
    Attention,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Attention => Variant::Attention,
        }
    }
}

fn hidden_dim(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(h @ (100 | 200 | 400)) => Ok(h),
        _ => Err(format!("`{s}` is not one of 100, 200, 400")),
    }
}

/// Corpus and vocabulary inputs shared by the training commands.
#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// Question/query pair file.
    #[arg(long)]
    pairs: PathBuf,
    /// Pretrained source vectors; seeded random vectors when absent.
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Keyword map of target keyword TAB English word.
    #[arg(long)]
    keywords: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Optimization settings shared by the training commands.
#[derive(Args, Debug, Clone)]
struct TrainingArgs {
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 0.9)]
    lr: f64,
    /// Also update the source embedding table.
    #[arg(long)]
    train_source: bool,
    /// Keep the target embedding table fixed.
    #[arg(long)]
    freeze_target: bool,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    side: Side,
    #[arg(long, value_enum, default_value = "random")]
    method: MethodArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OurappArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long)]
    keywords: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = hidden_dim, default_value = "100")]
    hidden: usize,
    #[command(flatten)]
    training: TrainingArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    training: TrainingArgs,
    #[arg(long, value_enum, default_value = "attention")]
    variant: VariantArg,
    #[arg(long, value_parser = hidden_dim, default_value = "100")]
    hidden: usize,
    #[arg(long, value_enum, default_value = "random")]
    method: MethodArg,
    /// Precomputed target lexicon; overrides --method.
    #[arg(long)]
    target_vectors: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Questions, one per line; anything after a TAB is ignored.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = nl2sparql::seq2seq::DEFAULT_MAX_LEN)]
    max_len: usize,
    /// Directory for per-question attention CSV files.
    #[arg(long)]
    attention_dir: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Predicted queries, one per line.
    #[arg(long, requires = "gold", conflicts_with = "pairs")]
    predictions: Option<PathBuf>,
    /// Gold queries, one per line or as the second field of a pair file.
    #[arg(long, requires = "predictions")]
    gold: Option<PathBuf>,
    /// Cross-validate on this pair file.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long)]
    vectors: Option<PathBuf>,
    #[arg(long)]
    keywords: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    training: TrainingArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["plain", "attention"])]
    variant: Vec<VariantArg>,
    #[arg(long, value_parser = hidden_dim, value_delimiter = ',', default_values = ["100", "200", "400"])]
    hidden: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["random", "tfidf-pca", "w2v", "ourapp"])]
    method: Vec<MethodArg>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Cross-validate a seeded random subset of this many examples.
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long, default_value_t = nl2sparql::seq2seq::DEFAULT_MAX_LEN)]
    max_len: usize,
    /// Folds trained concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    /// Also write the tables here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HeatmapArgs {
    /// Attention CSV written by `translate --attention-dir`.
    #[arg(long)]
    dump: PathBuf,
    /// Graymap path; the CSV is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct LintArgs {
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
