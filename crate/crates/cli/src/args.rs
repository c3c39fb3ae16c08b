use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "contraforge", version, about = "Build and evaluate contradicting-context QA datasets")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Base seed for every randomized step (default 0)
    #[arg(long, global = true, env = "CONTRAFORGE_SEED")]
    pub seed: Option<u64>,

    /// TOML file with `seed`, `jobs`, `lambda`, `threshold` and `[endpoints.<capability>]` tables.
    #[arg(long, global = true, env = "CONTRAFORGE_CONFIG")]
    pub config_file: Option<PathBuf>,

    /// Worker threads; results do not depend on this [default: available cores]
    #[arg(long, global = true, env = "CONTRAFORGE_JOBS")]
    pub jobs: Option<usize>,

    #[arg(long, global = true, value_name = "URL")]
    pub parse_url: Option<String>,
    #[arg(long, global = true, value_name = "URL")]
    pub fill_url: Option<String>,
    #[arg(long, global = true, value_name = "URL")]
    pub read_url: Option<String>,
    #[arg(long, global = true, value_name = "URL")]
    pub detect_url: Option<String>,
    #[arg(long, global = true, value_name = "URL")]
    pub complete_url: Option<String>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build seq2seq training pairs for the mask filler from article text.
    GcfBuild(GcfBuildArgs),
    /// Generate fake paragraphs by iterative constituent rewriting or prefix completion.
    Rewrite(RewriteArgs),
    /// Combine real SQuAD paragraphs with fakes into a shuffled dataset.
    Assemble(AssembleArgs),
    /// Score a reader (and optionally a detector) on a dataset.
    Evaluate(EvaluateArgs),
    /// Serve the annotation task routes.
    ServeAnnotation(ServeAnnotationArgs),
    /// Serve the in-process baselines over the backend wire protocol.
    ServeBaselines(ServeBaselinesArgs),
}

#[derive(Debug, Args)]
pub struct GcfBuildArgs {
    /// JSONL of `{id, sentences}` or a directory of plain-text articles.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// `chunk`, `treebank:<file>` or a parse service URL.
    #[arg(long, alias = "parser-endpoint")]
    pub parser: Option<String>,
    #[arg(long, default_value = "[MASK]")]
    pub mask_token: String,
    #[arg(long, default_value_t = 128)]
    pub max_sentence_tokens: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bartfg,
    Prefix,
}

#[derive(Debug, Args)]
pub struct RewriteArgs {
    /// SQuAD JSON, JSONL with `text` or `context` fields, or plain text (one paragraph per line).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Rewrite iterations per sentence.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Fakes per paragraph, each from its own seeded run.
    #[arg(long, default_value_t = 1)]
    pub n_fakes: usize,
    /// `gazetteer:<table.json>` or a fill service URL.
    #[arg(long)]
    pub filler: Option<String>,
    /// `chunk`, `treebank:<file>` or a parse service URL.
    #[arg(long)]
    pub parser: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Bartfg)]
    pub mode: Mode,
    /// Share of leading tokens kept in prefix mode.
    #[arg(long, default_value_t = 0.2)]
    pub prefix_ratio: f64,
    /// Prefix-mode continuation source: `bigram` (fit on the input) or a URL.
    #[arg(long)]
    pub completer: Option<String>,
    #[arg(long, default_value = "[MASK]")]
    pub mask_token: String,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// SQuAD-format JSON with the real paragraphs and questions.
    #[arg(long)]
    pub real: PathBuf,
    /// Fake paragraphs (JSONL). Required unless --random-ctx is given.
    #[arg(long)]
    pub fakes: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Add unrelated real paragraphs as distractors instead of fakes.
    #[arg(long)]
    pub random_ctx: bool,
    /// Distractors per question with --random-ctx.
    #[arg(long, default_value_t = 3)]
    pub n_random: usize,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// `overlap` or a read service URL.
    #[arg(long, default_value = "overlap")]
    pub reader: String,
    /// `oracle` or a detect service URL.
    #[arg(long)]
    pub detector: Option<String>,
    /// Weight of the reader score in the fused score (default 0.5)
    #[arg(long, env = "CONTRAFORGE_LAMBDA")]
    pub lambda: Option<f64>,
    /// Keep this many non-real contexts per question.
    #[arg(long)]
    pub n_fakes: Option<usize>,
    /// Report one row per N = 0..=4.
    #[arg(long)]
    pub n_fakes_sweep: bool,
    /// squad, squad_random_ctx, contra or contra_with_detector [default: by --detector]
    #[arg(long)]
    pub setting: Option<String>,
    /// Trust threshold for detector accuracy (default 0.5)
    #[arg(long, env = "CONTRAFORGE_THRESHOLD")]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub report: PathBuf,
    /// Optional per-sample JSONL for error attribution.
    #[arg(long)]
    pub per_sample: Option<PathBuf>,
    /// Optional copy of the plain-text table.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeAnnotationArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Seconds a task stays leased to the annotator who fetched it.
    #[arg(long, default_value_t = 1800)]
    pub lease_secs: u64,
}

#[derive(Debug, Args)]
pub struct ServeBaselinesArgs {
    #[arg(long, default_value_t = 8090)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Gazetteer table for /fill; without it /fill answers 501.
    #[arg(long)]
    pub gazetteer: Option<PathBuf>,
    /// Pre-parsed trees for /parse; the chunk parser is used otherwise.
    #[arg(long)]
    pub treebank: Option<PathBuf>,
    /// Known-real paragraphs for /detect (same formats as `rewrite --input`).
    #[arg(long)]
    pub real: Option<PathBuf>,
    /// Corpus for the /complete bigram model (same formats as `rewrite --input`).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}
