//! The four subcommands: extract, eval, render, metrics.
//!
//! All output files go through a temp-file-plus-rename so a failing run
//! leaves nothing half-written; `extract` additionally stages every
//! document in memory before the first write. Warnings (dropped clusters,
//! empty slices, degenerate metrics) go to standard error and never change
//! the exit code.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use charnet::annotation::{build_document, parse_entities, parse_tokens, Token};
use charnet::export;
use charnet::layout::{self, layout_force_directed};
use charnet::metrics::{connected_components, importance};
use charnet::network::{build_network, filter_network, slice_networks};
use charnet::pipeline::{
    detect_mentions, merge_aliases, promote_characters, resolve_coreference,
};
use charnet::render::{render_svg, ColorScale, DEFAULT_RADIUS_RANGE};
use charnet::segment::segment_text;
use charnet::{
    CharacterNetwork, Clustering, ClusterAssignment, Diagnostic, Document, EvalReport, Lexicon,
    Measure, ScoreMap, SliceSpec,
};
use serde_json::json;

use crate::error::CliError;
use crate::settings::{self, Format, Layered, Settings, PRONOUN_MAX_DISTANCE};
use crate::{EvalArgs, ExtractArgs, MetricsArgs, RenderArgs};

pub fn extract(args: &ExtractArgs) -> Result<(), CliError> {
    let file_config = match &args.config {
        Some(path) => settings::parse_config(&read(path)?, path)?,
        None => BTreeMap::new(),
    };
    let flags = settings::FlagValues {
        window: args.window.as_deref(),
        count: args.count.as_deref(),
        slices: args.slices.as_deref(),
        cumulative: args.cumulative,
        drop_middle: args.drop_middle,
        measure: args.measure.as_deref(),
        min_edge_weight: args.min_edge_weight,
        min_mentions: args.min_mentions,
        formats: args.formats.as_deref(),
        seed: args.seed,
        out: args.out.as_deref(),
        lexicon: args.lexicon.as_deref(),
        aliases: args.aliases.as_deref(),
    };
    let settings = Layered { flags, file: &file_config }.resolve()?;

    let lexicon = match &settings.lexicon {
        Some(path) => Lexicon::parse(&read(path)?).map_err(|e| CliError::input(path, e))?,
        None => Lexicon::french(),
    };

    let (doc, assignment) = load_input(args, &lexicon)?;
    let (characters, mut diagnostics) = promote_characters(&doc, &assignment, &lexicon);
    let characters = match &settings.aliases {
        Some(path) => {
            let table = parse_alias_table(&read(path)?, path)?;
            let (merged, merge_diags) = merge_aliases(characters, &table)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            diagnostics.extend(merge_diags);
            merged
        }
        None => characters,
    };

    let mut networks = match &settings.slices {
        Some(bounds) => {
            let spec = SliceSpec::new(bounds.clone(), settings.cumulative)
                .map_err(|e| CliError::config(format!("slices: {e}")))?;
            let (nets, slice_diags) =
                slice_networks(&doc, &characters, settings.window, &spec)
                    .map_err(|e| CliError::config(e.to_string()))?;
            diagnostics.extend(slice_diags);
            nets
        }
        None => {
            let net =
                build_network(&doc, &characters, settings.window, (0, doc.token_count()))
                    .map_err(|e| CliError::config(e.to_string()))?;
            vec![net]
        }
    };

    if settings.drop_middle && networks.len() >= 2 {
        let mut first = networks.remove(0);
        let mut last = networks.pop().expect("at least one network left");
        first.slice_label = "begin".to_string();
        last.slice_label = "end".to_string();
        networks = vec![first, last];
    }

    let networks: Vec<CharacterNetwork> = networks
        .iter()
        .map(|net| filter_network(net, settings.min_edge_weight, settings.min_mentions))
        .collect();

    // Stage every document, then write; a late failure leaves no partial set.
    let mut outputs: Vec<(PathBuf, String)> = Vec::new();
    let mut rows: Vec<SummaryRow> = Vec::new();
    for net in &networks {
        let scores = importance(net, settings.measure, true);
        for &format in &settings.formats {
            let name =
                format!("{}.{}.{}", net.source_id, net.slice_label, format.extension());
            outputs.push((settings.out.join(name), export_format(net, &scores, format, &settings)));
        }
        rows.push(summary_row(net, &scores));
    }
    for (path, content) in &outputs {
        write_atomic(path, content)?;
    }

    print_summary(&rows, settings.measure);
    emit_warnings(&diagnostics);
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    enum ReportFormat {
        Json,
        Tsv,
    }
    let format = match args.format.as_str() {
        "json" => ReportFormat::Json,
        "tsv" => ReportFormat::Tsv,
        other => {
            return Err(CliError::config(format!(
                "unknown report format `{other}`; expected json or tsv"
            )))
        }
    };

    let tokens = parse_tokens(&read(&args.tokens)?)
        .map_err(|e| CliError::input(&args.tokens, e))?;
    let gold = load_clustering(&args.gold, tokens.clone())?;
    let pred = load_clustering(&args.pred, tokens)?;

    let (report, diagnostics) = EvalReport::evaluate(&gold, &pred);
    match format {
        ReportFormat::Json => print!("{}", report.to_json()),
        ReportFormat::Tsv => print!("{}", report.to_tsv()),
    }
    emit_warnings(&diagnostics);
    Ok(())
}

pub fn render(args: &RenderArgs) -> Result<(), CliError> {
    let measure = match &args.measure {
        Some(v) => settings::parse_measure(v).map_err(CliError::config)?,
        None => Measure::WeightedDegree,
    };
    let iterations = args.iterations.unwrap_or(layout::DEFAULT_ITERATIONS);
    if iterations == 0 {
        return Err(CliError::config("iterations must be at least 1"));
    }
    let seed = args.seed.unwrap_or(layout::DEFAULT_SEED);

    let net = export::network_from_json(&read(&args.network)?)
        .map_err(|e| CliError::input(&args.network, e))?;
    let scores = importance(&net, measure, true);
    let positions = layout_force_directed(&net, seed, iterations);
    let svg = render_svg(&net, &positions, &scores, &ColorScale::heat(), DEFAULT_RADIUS_RANGE);
    write_atomic(&args.out_file, &svg)
}

pub fn metrics(args: &MetricsArgs) -> Result<(), CliError> {
    let measures: Vec<Measure> = match args.measure.as_str() {
        "all" => Measure::ALL.to_vec(),
        other => vec![settings::parse_measure(other).map_err(CliError::config)?],
    };
    let mut net = export::network_from_json(&read(&args.network)?)
        .map_err(|e| CliError::input(&args.network, e))?;
    // The JSON interchange schema has no source id; recover it from the file.
    net.source_id = stem(&args.network);

    let per_measure: Vec<serde_json::Value> = measures
        .iter()
        .map(|&measure| {
            let scores = importance(&net, measure, false);
            let rows: Vec<serde_json::Value> = scores
                .iter()
                .map(|(id, score)| {
                    let label =
                        net.node(id).map(|n| n.name.clone()).unwrap_or_default();
                    json!({ "id": id, "label": label, "score": score })
                })
                .collect();
            json!({ "measure": measure.label(), "scores": rows })
        })
        .collect();
    let dump = json!({
        "source_id": net.source_id,
        "slice_label": net.slice_label,
        "normalized": false,
        "measures": per_measure,
    });
    println!("{}", serde_json::to_string_pretty(&dump).expect("dump serializes"));
    Ok(())
}

/// Reads the document in whichever input mode the flags select.
fn load_input(
    args: &ExtractArgs,
    lexicon: &Lexicon,
) -> Result<(Document, ClusterAssignment), CliError> {
    match (&args.tokens, &args.entities, &args.raw) {
        (Some(tokens_path), Some(entities_path), None) => {
            let tokens = parse_tokens(&read(tokens_path)?)
                .map_err(|e| CliError::input(tokens_path, e))?;
            let mentions = parse_entities(&read(entities_path)?, tokens.len())
                .map_err(|e| CliError::input(entities_path, e))?;
            let doc = build_document(tokens, mentions, stem(tokens_path))
                .map_err(|e| CliError::input(entities_path, e))?;
            let assignment = ClusterAssignment::from_annotations(&doc);
            Ok((doc, assignment))
        }
        (None, None, Some(raw_path)) => {
            let segmented = segment_text(&read(raw_path)?, &stem(raw_path));
            let mentions = detect_mentions(&segmented, lexicon);
            let source_id = segmented.source_id.clone();
            let doc = build_document(segmented.tokens, mentions, source_id)
                .map_err(|e| CliError::input(raw_path, e))?;
            let assignment = resolve_coreference(&doc, lexicon, PRONOUN_MAX_DISTANCE);
            Ok((doc, assignment))
        }
        (Some(_), None, None) => Err(CliError::config("--tokens requires --entities")),
        (None, Some(_), None) => Err(CliError::config("--entities requires --tokens")),
        _ => Err(CliError::config(
            "choose exactly one input mode: --tokens with --entities, or --raw",
        )),
    }
}

fn load_clustering(entities_path: &Path, tokens: Vec<Token>) -> Result<Clustering, CliError> {
    let mentions = parse_entities(&read(entities_path)?, tokens.len())
        .map_err(|e| CliError::input(entities_path, e))?;
    let doc = build_document(tokens, mentions, "eval")
        .map_err(|e| CliError::input(entities_path, e))?;
    Clustering::from_document(&doc).map_err(|e| CliError::input(entities_path, e))
}

fn export_format(
    net: &CharacterNetwork,
    scores: &ScoreMap,
    format: Format,
    settings: &Settings,
) -> String {
    match format {
        Format::Gexf => export::to_gexf(net, Some(scores)),
        Format::Graphml => export::to_graphml(net, Some(scores)),
        Format::Dot => export::to_dot(net, Some(scores)),
        Format::Json => export::to_json(net, Some(scores)),
        Format::Svg => {
            let positions =
                layout_force_directed(net, settings.seed, layout::DEFAULT_ITERATIONS);
            render_svg(net, &positions, scores, &ColorScale::heat(), DEFAULT_RADIUS_RANGE)
        }
    }
}

/// Alias tables are `alias = canonical` per line with `#` comments.
fn parse_alias_table(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut table = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((source, target)) = line.split_once('=') else {
            return Err(CliError::Input(format!(
                "{}: line {line_no}: expected `alias = canonical`",
                path.display()
            )));
        };
        let (source, target) = (source.trim(), target.trim());
        if source.is_empty() || target.is_empty() {
            return Err(CliError::Input(format!(
                "{}: line {line_no}: empty alias or target",
                path.display()
            )));
        }
        if table.insert(source.to_string(), target.to_string()).is_some() {
            return Err(CliError::Input(format!(
                "{}: line {line_no}: duplicate alias `{source}`",
                path.display()
            )));
        }
    }
    Ok(table)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "document".to_string())
}

fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::input(dir, e))?;
    let mut tmp = tempfile::Builder::new()
        .prefix(".charnet-")
        .tempfile_in(dir)
        .map_err(|e| CliError::input(path, e))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| CliError::input(path, e))?;
    tmp.persist(path).map_err(|e| CliError::input(path, e.error))?;
    Ok(())
}

struct SummaryRow {
    label: String,
    nodes: usize,
    edges: usize,
    components: usize,
    top: String,
}

fn summary_row(net: &CharacterNetwork, scores: &ScoreMap) -> SummaryRow {
    let top = scores
        .ranking()
        .into_iter()
        .take(3)
        .map(|id| {
            let name = net.node(id).map(|n| n.name.as_str()).unwrap_or("?");
            format!("{name} {:.2}", scores.get(id).unwrap_or(0.0))
        })
        .collect::<Vec<_>>()
        .join(", ");
    SummaryRow {
        label: net.slice_label.clone(),
        nodes: net.node_count(),
        edges: net.edge_count(),
        components: connected_components(net).len(),
        top,
    }
}

fn print_summary(rows: &[SummaryRow], measure: Measure) {
    let label_width = rows
        .iter()
        .map(|r| r.label.len())
        .chain(std::iter::once("slice".len()))
        .max()
        .expect("iterator is non-empty");
    println!(
        "{:<label_width$}  {:>5}  {:>5}  {:>10}  top importance ({})",
        "slice",
        "nodes",
        "edges",
        "components",
        measure.label()
    );
    for row in rows {
        println!(
            "{:<label_width$}  {:>5}  {:>5}  {:>10}  {}",
            row.label, row.nodes, row.edges, row.components, row.top
        );
    }
}

fn emit_warnings(diagnostics: &[Diagnostic]) {
    for diagnostic in diagnostics {
        eprintln!("warning: {}", diagnostic.message);
    }
}
