//! Extraction settings: defaults, config file, flags — flags win.
//!
//! The config file is `key = value` per line with `#` comments, keyed by
//! the long flag names (`window`, `count`, `slices`, `cumulative`,
//! `drop-middle`, `measure`, `min-edge-weight`, `min-mentions`, `formats`,
//! `seed`, `out`, `lexicon`, `aliases`). Values use the same grammar as
//! the flags, so one parser serves both sources. Input paths are
//! deliberately not config keys: a config file describes how to extract,
//! not what from.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use charnet::{layout, CountScheme, Measure, WindowMode, WindowSpec};

use crate::error::CliError;

/// Sentence distance cap for pronoun antecedent search in raw mode.
pub const PRONOUN_MAX_DISTANCE: usize = 2;

pub const CONFIG_KEYS: [&str; 13] = [
    "window",
    "count",
    "slices",
    "cumulative",
    "drop-middle",
    "measure",
    "min-edge-weight",
    "min-mentions",
    "formats",
    "seed",
    "out",
    "lexicon",
    "aliases",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Gexf,
    Graphml,
    Dot,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Gexf => "gexf",
            Format::Graphml => "graphml",
            Format::Dot => "dot",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Fully resolved extraction settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub window: WindowSpec,
    pub slices: Option<Vec<f64>>,
    pub cumulative: bool,
    pub drop_middle: bool,
    pub measure: Measure,
    pub min_edge_weight: u64,
    pub min_mentions: usize,
    pub formats: Vec<Format>,
    pub seed: u64,
    pub out: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            window: WindowSpec::default(),
            slices: None,
            cumulative: false,
            drop_middle: false,
            measure: Measure::WeightedDegree,
            min_edge_weight: 1,
            min_mentions: 1,
            formats: vec![Format::Gexf, Format::Json, Format::Svg],
            seed: layout::DEFAULT_SEED,
            out: PathBuf::from("."),
            lexicon: None,
            aliases: None,
        }
    }
}

pub fn parse_window(value: &str) -> Result<WindowMode, String> {
    match value {
        "sentence" => Ok(WindowMode::Sentence),
        "paragraph" => Ok(WindowMode::Paragraph),
        _ => {
            if let Some(width) = value.strip_prefix("token:") {
                let width: usize = width
                    .parse()
                    .map_err(|_| format!("token window width `{width}` is not an integer"))?;
                if width == 0 {
                    return Err("token window width must be at least 1".to_string());
                }
                return Ok(WindowMode::TokenSliding(width));
            }
            Err(format!("unknown window `{value}`; expected sentence, paragraph, or token:<width>"))
        }
    }
}

pub fn parse_count(value: &str) -> Result<CountScheme, String> {
    match value {
        "binary" => Ok(CountScheme::BinaryPerWindow),
        "pairs" => Ok(CountScheme::PairPerMention),
        _ => Err(format!("unknown count scheme `{value}`; expected binary or pairs")),
    }
}

pub fn parse_measure(value: &str) -> Result<Measure, String> {
    Measure::ALL
        .into_iter()
        .find(|m| m.label() == value)
        .ok_or_else(|| {
            let labels: Vec<&str> = Measure::ALL.iter().map(|m| m.label()).collect();
            format!("unknown measure `{value}`; expected one of {}", labels.join(", "))
        })
}

pub fn parse_formats(value: &str) -> Result<Vec<Format>, String> {
    let mut formats = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        let format = match item {
            "gexf" => Format::Gexf,
            "graphml" => Format::Graphml,
            "dot" => Format::Dot,
            "json" => Format::Json,
            "svg" => Format::Svg,
            _ => {
                return Err(format!(
                    "unknown format `{item}`; expected a comma-separated subset of gexf, graphml, dot, json, svg"
                ))
            }
        };
        if !formats.contains(&format) {
            formats.push(format);
        }
    }
    if formats.is_empty() {
        return Err("formats list is empty".to_string());
    }
    Ok(formats)
}

pub fn parse_slices(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .map_err(|_| format!("slice boundary `{item}` is not a number"))
        })
        .collect()
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("`{value}` is not a boolean; expected true or false")),
    }
}

/// Parses the `key = value` config format, rejecting unknown keys.
pub fn parse_config(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut values = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::config(format!(
                "{}: line {line_no}: expected `key = value`",
                path.display()
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::config(format!(
                "{}: line {line_no}: unknown key `{key}`",
                path.display()
            )));
        }
        if values.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::config(format!(
                "{}: line {line_no}: duplicate key `{key}`",
                path.display()
            )));
        }
    }
    Ok(values)
}

/// Flag values (left) layered over a parsed config file (right), over
/// [`Settings::default`].
pub struct Layered<'a> {
    pub flags: FlagValues<'a>,
    pub file: &'a BTreeMap<String, String>,
}

/// The settings-relevant subset of the `extract` flags.
#[derive(Default)]
pub struct FlagValues<'a> {
    pub window: Option<&'a str>,
    pub count: Option<&'a str>,
    pub slices: Option<&'a str>,
    pub cumulative: bool,
    pub drop_middle: bool,
    pub measure: Option<&'a str>,
    pub min_edge_weight: Option<u64>,
    pub min_mentions: Option<usize>,
    pub formats: Option<&'a str>,
    pub seed: Option<u64>,
    pub out: Option<&'a Path>,
    pub lexicon: Option<&'a Path>,
    pub aliases: Option<&'a Path>,
}

impl Layered<'_> {
    pub fn resolve(&self) -> Result<Settings, CliError> {
        let mut settings = Settings::default();
        let file = |key: &str| self.file.get(key).map(String::as_str);
        let bad = |key: &str, msg: String| CliError::config(format!("{key}: {msg}"));

        let mode = match self.flags.window.or_else(|| file("window")) {
            Some(v) => parse_window(v).map_err(|e| bad("window", e))?,
            None => settings.window.mode,
        };
        let scheme = match self.flags.count.or_else(|| file("count")) {
            Some(v) => parse_count(v).map_err(|e| bad("count", e))?,
            None => settings.window.scheme,
        };
        settings.window = WindowSpec { mode, scheme };

        if let Some(v) = self.flags.slices.or_else(|| file("slices")) {
            settings.slices = Some(parse_slices(v).map_err(|e| bad("slices", e))?);
        }
        settings.cumulative = self.flags.cumulative
            || match file("cumulative") {
                Some(v) => parse_bool(v).map_err(|e| bad("cumulative", e))?,
                None => false,
            };
        settings.drop_middle = self.flags.drop_middle
            || match file("drop-middle") {
                Some(v) => parse_bool(v).map_err(|e| bad("drop-middle", e))?,
                None => false,
            };
        if let Some(v) = self.flags.measure.or_else(|| file("measure")) {
            settings.measure = parse_measure(v).map_err(|e| bad("measure", e))?;
        }
        settings.min_edge_weight = match self.flags.min_edge_weight {
            Some(v) => v,
            None => match file("min-edge-weight") {
                Some(v) => v
                    .parse()
                    .map_err(|_| bad("min-edge-weight", format!("`{v}` is not an integer")))?,
                None => settings.min_edge_weight,
            },
        };
        settings.min_mentions = match self.flags.min_mentions {
            Some(v) => v,
            None => match file("min-mentions") {
                Some(v) => v
                    .parse()
                    .map_err(|_| bad("min-mentions", format!("`{v}` is not an integer")))?,
                None => settings.min_mentions,
            },
        };
        if let Some(v) = self.flags.formats.or_else(|| file("formats")) {
            settings.formats = parse_formats(v).map_err(|e| bad("formats", e))?;
        }
        settings.seed = match self.flags.seed {
            Some(v) => v,
            None => match file("seed") {
                Some(v) => v
                    .parse()
                    .map_err(|_| bad("seed", format!("`{v}` is not an integer")))?,
                None => settings.seed,
            },
        };
        if let Some(v) = self.flags.out {
            settings.out = v.to_path_buf();
        } else if let Some(v) = file("out") {
            settings.out = PathBuf::from(v);
        }
        settings.lexicon = self
            .flags
            .lexicon
            .map(Path::to_path_buf)
            .or_else(|| file("lexicon").map(PathBuf::from));
        settings.aliases = self
            .flags
            .aliases
            .map(Path::to_path_buf)
            .or_else(|| file("aliases").map(PathBuf::from));

        Ok(settings)
    }
}
