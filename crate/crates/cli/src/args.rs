use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Sentiment composition workbench for opposing-polarity phrases.
///
/// Exit status: 0 on success, 1 on invalid input or usage, 2 on runtime
/// failure. Logs go to standard error; data goes to standard output or the
/// file named by --out, written atomically.
#[derive(Debug, Parser)]
#[command(name = "polcomp", version)]
pub struct Cli {
    /// JSON object of defaults keyed by long flag name (e.g. {"seed": 7,
    /// "min-support": 5}); command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Log verbosity: -v info, -vv debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List corpus n-grams containing a positive and a negative word.
    ///
    /// Corpus: one pre-tokenized sentence per line, tokens separated by
    /// spaces. Lexicons: `token<TAB>positive|negative` per line; a token
    /// labelled differently by two lexicons counts as neither. Output: one
    /// n-gram per line, sorted.
    Extract(ExtractArgs),
    /// Generate a Best-Worst Scaling design of 4-term tuples.
    ///
    /// Terms: one per line. Output: JSON Lines, one `{"id", "items"}` object
    /// per tuple.
    Tuples(TuplesArgs),
    /// Score terms from BWS responses by the counting procedure.
    ///
    /// Responses: JSON Lines of `{"tuple_id", "annotator", "best", "worst",
    /// "timestamp"}`. Output (tsv): `term<TAB>score` with three decimals,
    /// highest first; (json): the full best/worst/appearance table.
    ScoreBws(ScoreBwsArgs),
    /// Share of best and worst answers that match each tuple's majority.
    Agreement(AgreementArgs),
    /// Mine sentiment composition patterns from a lexicon with POS tags.
    ///
    /// Lexicon: `term<TAB>score` per line. POS file: `term<TAB>tag tag ...`
    /// per line with one tag per token. Output columns: lhs, rhs, occ, support.
    MinePatterns(MineArgs),
    /// Cross-validate baselines and SVM/SVR feature sets; prints a results table.
    ///
    /// Systems: majority, last, most-polar, pos-rule, or a `+`-joined feature
    /// set from uni, uni-pos, pos, label, score, conc, avg, max. Output: one
    /// row per system with accuracy (%) and Pearson r per n-gram order.
    Eval(EvalArgs),
    /// Fit an SVM or SVR on all phrases of one order and save it as JSON.
    Train(TrainArgs),
    /// Score phrases with a model saved by `train`.
    ///
    /// Phrases: `phrase` or `phrase<TAB>tag tag ...` per line. Output:
    /// `phrase<TAB>value<TAB>label`.
    Predict(PredictArgs),
    /// Run the annotation HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Polarity lexicon; repeat for several.
    #[arg(long = "lexicon", value_name = "FILE", required = true)]
    pub lexicons: Vec<PathBuf>,
    /// N-gram order, 2 or 3.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuplesArgs {
    #[arg(long, value_name = "FILE")]
    pub terms: PathBuf,
    /// Tuples each term appears in (default 8).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreBwsArgs {
    #[arg(long, value_name = "FILE")]
    pub tuples: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub responses: PathBuf,
    /// tsv or json (default tsv).
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    #[arg(long, value_name = "FILE")]
    pub tuples: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub responses: PathBuf,
}

#[derive(Debug, Args)]
pub struct PosInput {
    /// Phrase POS tags, `term<TAB>tag tag ...`.
    #[arg(long, value_name = "FILE")]
    pub pos: Option<PathBuf>,
    /// Overrides for the fine-to-coarse tag mapping, `fine<TAB>coarse`.
    #[arg(long, value_name = "FILE")]
    pub pos_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long, value_name = "FILE")]
    pub lexicon: PathBuf,
    #[command(flatten)]
    pub pos: PosInput,
    /// Minimum phrases per left-hand side (default 10).
    #[arg(long)]
    pub min_support: Option<usize>,
    /// Minimum occurrence rate (default 0.5).
    #[arg(long)]
    pub min_rate: Option<f64>,
    /// Constituents with |score| below this have no polarity (default 0).
    #[arg(long)]
    pub neutral_threshold: Option<f64>,
    /// text or tsv (default text).
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SvmFlags {
    /// Soft-margin penalty (default 1).
    #[arg(long = "C", alias = "c")]
    pub c: Option<f64>,
    /// RBF width (default 1 / feature dimension).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// SVR tube half-width (default 0.1).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Skip min-max scaling of features.
    #[arg(long)]
    pub no_scale: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    pub lexicon: PathBuf,
    #[command(flatten)]
    pub pos: PosInput,
    /// Text word vectors, `token v1 ... vd` per line.
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// N-gram orders, comma-separated (default 2,3).
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Comma-separated systems (default majority,last,most-polar, plus
    /// pos-rule when --pos is given).
    #[arg(long, value_delimiter = ',')]
    pub systems: Option<Vec<String>>,
    /// binary, regression or both (default both).
    #[arg(long)]
    pub task: Option<String>,
    /// Folds per repeat (default 10).
    #[arg(long)]
    pub folds: Option<usize>,
    /// Repeats (default 10).
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub svm: SvmFlags,
    /// Tune C and gamma by inner cross-validation.
    #[arg(long)]
    pub grid: bool,
    /// Per-run metrics as CSV.
    #[arg(long, value_name = "FILE")]
    pub runs: Option<PathBuf>,
    /// Compare every system against this one with a paired t-test.
    #[arg(long, value_name = "SYSTEM")]
    pub compare: Option<String>,
    /// Where to write the comparison (`system<TAB>n<TAB>task<TAB>p`).
    #[arg(long, value_name = "FILE", requires = "compare")]
    pub significance: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_name = "FILE")]
    pub lexicon: PathBuf,
    #[command(flatten)]
    pub pos: PosInput,
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// N-gram order, 2 or 3.
    #[arg(long)]
    pub n: Option<usize>,
    /// `+`-joined feature blocks.
    #[arg(long)]
    pub features: String,
    /// binary or regression (default binary).
    #[arg(long)]
    pub task: Option<String>,
    #[command(flatten)]
    pub svm: SvmFlags,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Lexicon supplying constituent scores.
    #[arg(long, value_name = "FILE")]
    pub lexicon: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub phrases: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub pos_map: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, value_name = "FILE")]
    pub tuples: PathBuf,
    /// Append-only response log; created when missing.
    #[arg(long, value_name = "FILE")]
    pub responses: PathBuf,
    /// Listen address (default 127.0.0.1:8080).
    #[arg(long)]
    pub addr: Option<String>,
    /// Campaign name (default "default").
    #[arg(long)]
    pub campaign: Option<String>,
    /// Responses wanted per tuple (default 8).
    #[arg(long)]
    pub quota: Option<usize>,
    /// Seconds before an unanswered assignment is reissued (default 600).
    #[arg(long)]
    pub expiry_secs: Option<i64>,
    /// Directory of UI files served at `/`.
    #[arg(long = "static", value_name = "DIR")]
    pub static_dir: Option<PathBuf>,
}
