//! `lingua-screen`: batch pipeline for the writing-sample screening toolkit.
//! Subcommands cover corpus ingestion, fallback annotation, topic and cluster
//! model training, feature export, cross-validated evaluation, feature
//! selection, synthetic corpora, and report rendering.
//!
//! Exit codes: 0 success, 1 validation problem (bad flags, bad config, bad or
//! missing inputs), 2 runtime failure (I/O).

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "lingua-screen",
    version,
    about = "Stylometric screening pipeline: writing samples in, cross-validated reports out"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct GlobalArgs {
    /// Flat key = value configuration file; flags win over file values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Root RNG seed (fallback: config file, then LINGUA_SCREEN_SEED, then 0)
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,

    /// Worker threads (default: available cores)
    #[arg(long, global = true, value_name = "INT")]
    pub threads: Option<usize>,

    /// Fit topic and cluster models on the full corpus instead of per fold
    #[arg(long, global = true)]
    pub paper_mode: bool,

    /// Dataset profile: labwriting (default) or twitter
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,

    /// Output directory (default: out)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Comma-separated feature categories (default: all)
    #[arg(long, global = true, value_name = "NAME[,NAME]")]
    pub category: Option<String>,

    /// Classifiers to train: svm, forest, or both (default: both)
    #[arg(long, global = true, value_name = "NAME")]
    pub classifier: Option<String>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build the corpus store from raw JSONL text plus optional annotations
    Ingest(IngestArgs),
    /// Fill missing POS and sentiment layers with the fallback annotators
    Annotate(AnnotateArgs),
    /// Train the topic model on the corpus and save it
    TrainTopics(TrainTopicsArgs),
    /// Cluster a word-vector table and save the assignment
    ClusterVectors(ClusterVectorsArgs),
    /// Export feature matrices as CSV, one file per category
    Featurize(FeaturizeArgs),
    /// Cross-validated evaluation: report JSON, text table, and ROC plots
    Evaluate(EvaluateArgs),
    /// Rank features by information gain or recursive elimination
    Select(SelectArgs),
    /// Generate a synthetic annotated corpus with word vectors
    Synth(SynthArgs),
    /// Render the text table from a saved report
    Report(ReportArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    /// Raw corpus: one JSON record per line with id, label, text
    #[arg(long, value_name = "PATH")]
    pub text: Option<PathBuf>,

    /// Dependency parses in 10-column CoNLL format, grouped by document id
    #[arg(long, value_name = "PATH")]
    pub parses: Option<PathBuf>,

    /// Which parse column carries the POS tag: xpos (default) or upos
    #[arg(long, value_name = "NAME")]
    pub pos_column: Option<String>,

    /// JSONL sidecar with frame, belief, and sentiment annotations
    #[arg(long, value_name = "PATH")]
    pub annotations: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnnotateArgs {
    /// Corpus store to annotate (default: <out>/corpus.json)
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// word<TAB>tag lexicon consulted before the suffix rules
    #[arg(long, value_name = "PATH")]
    pub pos_lexicon: Option<PathBuf>,

    /// word<TAB>score lexicon for sentiment phrases, scores in [-1, 1]
    #[arg(long, value_name = "PATH")]
    pub sentiment_lexicon: Option<PathBuf>,
}

#[derive(Args)]
pub struct TrainTopicsArgs {
    /// Corpus store to train on (default: <out>/corpus.json)
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Topic count (default: 20 for labwriting, 40 for twitter)
    #[arg(long, value_name = "INT")]
    pub topics_k: Option<usize>,

    /// Gibbs sweeps (default: 1000)
    #[arg(long, value_name = "INT")]
    pub lda_iters: Option<usize>,

    /// Sweeps discarded before averaging (default: 200)
    #[arg(long, value_name = "INT")]
    pub lda_burnin: Option<usize>,

    /// Document-topic smoothing (default: 5 / K)
    #[arg(long, value_name = "FLOAT")]
    pub lda_alpha: Option<f64>,

    /// Topic-word smoothing (default: 0.01)
    #[arg(long, value_name = "FLOAT")]
    pub lda_beta: Option<f64>,
}

#[derive(Args)]
pub struct ClusterVectorsArgs {
    /// Word-vector table, one word and its components per line
    /// (default: <out>/vectors.txt)
    #[arg(long, value_name = "PATH")]
    pub vectors: Option<PathBuf>,

    /// Cluster count (default: 100, capped at the table size)
    #[arg(long, value_name = "INT")]
    pub cluster_k: Option<usize>,
}

#[derive(Args)]
pub struct FeaturizeArgs {
    /// Corpus store (default: <out>/corpus.json)
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Trained topic model (default: <out>/topics.json)
    #[arg(long, value_name = "PATH")]
    pub topics: Option<PathBuf>,

    /// Trained cluster model (default: <out>/clusters.json)
    #[arg(long, value_name = "PATH")]
    pub clusters: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Corpus store (default: <out>/corpus.json)
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Word-vector table for the cluster channel (default: <out>/vectors.txt)
    #[arg(long, value_name = "PATH")]
    pub vectors: Option<PathBuf>,

    /// Cross-validation folds (default: 10)
    #[arg(long, value_name = "INT")]
    pub folds: Option<usize>,

    /// Topic count (default: 20 for labwriting, 40 for twitter)
    #[arg(long, value_name = "INT")]
    pub topics_k: Option<usize>,

    /// Gibbs sweeps (default: 1000)
    #[arg(long, value_name = "INT")]
    pub lda_iters: Option<usize>,

    /// Sweeps discarded before averaging (default: 200)
    #[arg(long, value_name = "INT")]
    pub lda_burnin: Option<usize>,

    /// Document-topic smoothing (default: 5 / K)
    #[arg(long, value_name = "FLOAT")]
    pub lda_alpha: Option<f64>,

    /// Topic-word smoothing (default: 0.01)
    #[arg(long, value_name = "FLOAT")]
    pub lda_beta: Option<f64>,

    /// Cluster count (default: 100, capped at the table size)
    #[arg(long, value_name = "INT")]
    pub cluster_k: Option<usize>,

    /// SVM misclassification cost (default: 1.0)
    #[arg(long, value_name = "FLOAT")]
    pub svm_c: Option<f64>,

    /// SVM stopping tolerance (default: 1e-4)
    #[arg(long, value_name = "FLOAT")]
    pub svm_tol: Option<f64>,

    /// SVM epoch cap (default: 1000)
    #[arg(long, value_name = "INT")]
    pub svm_max_epochs: Option<usize>,

    /// Trees per forest (default: 100)
    #[arg(long, value_name = "INT")]
    pub forest_trees: Option<usize>,

    /// Minimum samples per leaf (default: 1)
    #[arg(long, value_name = "INT")]
    pub forest_min_leaf: Option<usize>,

    /// Features sampled per split (default: ceil(sqrt(d)))
    #[arg(long, value_name = "INT")]
    pub forest_mtry: Option<usize>,

    /// Tree depth cap (default: none)
    #[arg(long, value_name = "INT")]
    pub forest_max_depth: Option<usize>,

    /// F-score averaging: weighted (default), macro, or micro
    #[arg(long, value_name = "NAME")]
    pub f_average: Option<String>,
}

#[derive(Args)]
pub struct SelectArgs {
    /// Corpus store (default: <out>/corpus.json)
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,

    /// Ranking method: ig (default) or rfe
    #[arg(long, value_name = "NAME")]
    pub method: Option<String>,

    /// Discretization bins for information gain (default: 10)
    #[arg(long, value_name = "INT")]
    pub bins: Option<usize>,

    /// Binning scheme: width (default) or rank
    #[arg(long, value_name = "NAME")]
    pub binning: Option<String>,

    /// Features kept by recursive elimination (default: 1)
    #[arg(long, value_name = "INT")]
    pub target_k: Option<usize>,

    /// Fraction of surviving features dropped per round (default: 0.1)
    #[arg(long, value_name = "FLOAT")]
    pub drop_fraction: Option<f64>,

    /// SVM misclassification cost for rfe (default: 1.0)
    #[arg(long, value_name = "FLOAT")]
    pub svm_c: Option<f64>,

    /// Trained topic model (default: <out>/topics.json)
    #[arg(long, value_name = "PATH")]
    pub topics: Option<PathBuf>,

    /// Trained cluster model (default: <out>/clusters.json)
    #[arg(long, value_name = "PATH")]
    pub clusters: Option<PathBuf>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Documents generated per class (default: 100)
    #[arg(long, value_name = "INT")]
    pub docs_per_class: Option<usize>,

    /// Class-marker strength in [0, 1] (default: 1.0)
    #[arg(long, value_name = "FLOAT")]
    pub strength: Option<f64>,

    /// Sentences per document, lower bound (default: 3)
    #[arg(long, value_name = "INT")]
    pub min_sentences: Option<usize>,

    /// Sentences per document, upper bound (default: 8)
    #[arg(long, value_name = "INT")]
    pub max_sentences: Option<usize>,

    /// Tokens per sentence, lower bound (default: 5)
    #[arg(long, value_name = "INT")]
    pub min_tokens: Option<usize>,

    /// Tokens per sentence, upper bound (default: 12)
    #[arg(long, value_name = "INT")]
    pub max_tokens: Option<usize>,

    /// Word-vector dimensionality (default: 16, minimum 6)
    #[arg(long, value_name = "INT")]
    pub vector_dim: Option<usize>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Report to render (default: <out>/report.json)
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                // bad flags and unknown subcommands are validation failures:
                // usage goes to stderr, exit code 1
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
