//! `charnet`: character co-occurrence networks from the command line.
//!
//! Four subcommands: `extract` runs the full pipeline from annotations or
//! plain text to exported networks; `eval` scores a predicted `.entities`
//! file against gold; `render` draws an exported network JSON as SVG;
//! `metrics` dumps importance scores for one. Exit codes are stable:
//! 0 success, 1 input error, 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod settings;

#[derive(Parser)]
#[command(name = "charnet", version, about = "Character co-occurrence networks from annotated or plain literary text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

// One value lives for the whole process; variant size spread is harmless.
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand)]
enum Command {
    /// Extract, slice, and export character networks
    Extract(ExtractArgs),
    /// Score a predicted .entities file against a gold one
    Eval(EvalArgs),
    /// Render an exported network JSON file to SVG
    Render(RenderArgs),
    /// Dump importance scores for an exported network JSON file
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// BookNLP-style .tokens table (annotated mode, with --entities)
    #[arg(long, value_name = "FILE")]
    tokens: Option<PathBuf>,
    /// BookNLP-style .entities table (annotated mode)
    #[arg(long, value_name = "FILE")]
    entities: Option<PathBuf>,
    /// Plain UTF-8 text; mentions are detected with built-in rules
    #[arg(long, value_name = "FILE")]
    raw: Option<PathBuf>,
    /// key = value settings file; flags given here win over it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Co-occurrence window: sentence, paragraph, or token:<width>
    #[arg(long, value_name = "KIND")]
    window: Option<String>,
    /// Edge weight scheme: binary (per window) or pairs (per mention pair)
    #[arg(long, value_name = "SCHEME")]
    count: Option<String>,
    /// Narrative slice boundaries as fractions, e.g. 0,0.25,0.75,1
    #[arg(long, value_name = "CSV")]
    slices: Option<String>,
    /// Grow slices cumulatively from the start instead of disjointly
    #[arg(long)]
    cumulative: bool,
    /// Keep only the first and last slice, relabeled begin and end
    #[arg(long)]
    drop_middle: bool,
    /// Importance measure: degree, weighted-degree, betweenness, pagerank
    #[arg(long, value_name = "NAME")]
    measure: Option<String>,
    /// Drop edges lighter than this weight
    #[arg(long, value_name = "N")]
    min_edge_weight: Option<u64>,
    /// Drop characters with fewer mentions in scope
    #[arg(long, value_name = "N")]
    min_mentions: Option<usize>,
    /// Comma-separated subset of gexf,graphml,dot,json,svg
    #[arg(long, value_name = "CSV")]
    formats: Option<String>,
    /// Layout seed for SVG output
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Lexicon file replacing the built-in French word lists
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Alias table (alias = canonical per line) merging characters
    #[arg(long, value_name = "FILE")]
    aliases: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// .tokens table both entity files annotate
    #[arg(long, value_name = "FILE")]
    tokens: PathBuf,
    /// Gold .entities table
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    /// Predicted .entities table
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    /// Report format: json or tsv
    #[arg(long, value_name = "KIND", default_value = "json")]
    format: String,
}

#[derive(Args)]
struct RenderArgs {
    /// Network JSON file, as written by extract's json format
    #[arg(long, value_name = "FILE")]
    network: PathBuf,
    /// Where to write the SVG
    #[arg(long, value_name = "FILE")]
    out_file: PathBuf,
    /// Layout seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Layout iterations (at least 1)
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    /// Importance measure driving node size and color
    #[arg(long, value_name = "NAME")]
    measure: Option<String>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Network JSON file, as written by extract's json format
    #[arg(long, value_name = "FILE")]
    network: PathBuf,
    /// Importance measure, or all
    #[arg(long, value_name = "NAME", default_value = "all")]
    measure: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Extract(args) => commands::extract(args),
        Command::Eval(args) => commands::eval(args),
        Command::Render(args) => commands::render(args),
        Command::Metrics(args) => commands::metrics(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
