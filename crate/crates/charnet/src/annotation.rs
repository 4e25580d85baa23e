//! Ingestion of BookNLP-style token and entity tables.
//!
//! Two tab-separated files describe a document: a `.tokens` table with one
//! row per token and a `.entities` table with one row per entity mention.
//! Columns are matched by header name, never by position, and unknown
//! columns are ignored so that variant exports keep parsing. All parse
//! errors carry the 1-based line number of the offending row (the header
//! is line 1).

use std::collections::HashMap;

use thiserror::Error;

/// Required header names of the `.tokens` table.
const TOKEN_COLUMNS: [&str; 6] = [
    "paragraph_ID",
    "sentence_ID",
    "token_ID_within_document",
    "word",
    "lemma",
    "POS_tag",
];

/// Required header names of the `.entities` table.
const ENTITY_COLUMNS: [&str; 6] = ["COREF", "start_token", "end_token", "prop", "cat", "text"];

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line 1: missing required column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("line {line}: {message}")]
    Structure { line: usize, message: String },
    #[error("line {line}: {message}")]
    Bounds { line: usize, message: String },
    #[error("line {line}: {message}")]
    Span { line: usize, message: String },
    #[error("{0}")]
    Document(String),
}

impl ParseError {
    fn row(line: usize, message: impl Into<String>) -> Self {
        ParseError::Row { line, message: message.into() }
    }
}

/// One token of the source text, in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub doc_index: usize,
    pub sentence_id: usize,
    pub paragraph_id: usize,
    pub surface: String,
    pub lemma: String,
    pub pos: String,
}

/// How a mention refers to its entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MentionKind {
    Proper,
    Nominal,
    Pronoun,
}

impl MentionKind {
    /// The `prop` column value for this kind.
    pub fn prop_label(self) -> &'static str {
        match self {
            MentionKind::Proper => "PROP",
            MentionKind::Nominal => "NOM",
            MentionKind::Pronoun => "PRON",
        }
    }

    fn from_prop(value: &str) -> Option<Self> {
        match value {
            "PROP" => Some(MentionKind::Proper),
            "NOM" => Some(MentionKind::Nominal),
            "PRON" => Some(MentionKind::Pronoun),
            _ => None,
        }
    }
}

/// A token span referring to an entity. Token indices are inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub start_token: usize,
    pub end_token: usize,
    pub kind: MentionKind,
    pub category: String,
    pub cluster_id: Option<usize>,
    pub text: String,
}

impl Mention {
    /// True when `self` strictly contains `other` (containment, not equality).
    fn strictly_contains(&self, other: &Mention) -> bool {
        self.start_token <= other.start_token
            && other.end_token <= self.end_token
            && (self.start_token, self.end_token) != (other.start_token, other.end_token)
    }
}

/// An annotated document: ordered tokens plus mention annotations.
///
/// Immutable after construction; sentence and paragraph extents are
/// precomputed so downstream passes can treat them as cheap lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub source_id: String,
    pub tokens: Vec<Token>,
    pub mentions: Vec<Mention>,
    sentence_spans: Vec<(usize, usize)>,
    paragraph_spans: Vec<(usize, usize)>,
    sentence_of_token: Vec<usize>,
}

impl Document {
    /// Token ranges `[start, end)` of each sentence, in document order.
    pub fn sentences(&self) -> &[(usize, usize)] {
        &self.sentence_spans
    }

    /// Token ranges `[start, end)` of each paragraph, in document order.
    pub fn paragraphs(&self) -> &[(usize, usize)] {
        &self.paragraph_spans
    }

    /// Ordinal sentence index (0-based, gap-free) of a token.
    pub fn sentence_ordinal(&self, token_index: usize) -> usize {
        self.sentence_of_token[token_index]
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }
}

/// Splits a header or data line into fields. Accepts LF and CRLF input.
fn split_line(line: &str) -> Vec<&str> {
    line.strip_suffix('\r').unwrap_or(line).split('\t').collect()
}

/// Resolves the column index of every required header name.
fn header_indices(
    line: Option<&str>,
    required: &[&str],
) -> Result<HashMap<String, usize>, ParseError> {
    let line = line.ok_or_else(|| ParseError::row(1, "empty input: missing header row"))?;
    let fields = split_line(line);
    let mut indices = HashMap::new();
    for name in required {
        match fields.iter().position(|f| f == name) {
            Some(idx) => {
                indices.insert((*name).to_string(), idx);
            }
            None => return Err(ParseError::MissingColumn((*name).to_string())),
        }
    }
    Ok(indices)
}

fn field<'a>(
    fields: &[&'a str],
    indices: &HashMap<String, usize>,
    name: &str,
    line: usize,
) -> Result<&'a str, ParseError> {
    let idx = indices[name];
    fields.get(idx).copied().ok_or_else(|| {
        ParseError::row(line, format!("row has {} fields, column `{name}` is missing", fields.len()))
    })
}

fn parse_usize(value: &str, column: &str, line: usize) -> Result<usize, ParseError> {
    value.trim().parse::<usize>().map_err(|_| {
        ParseError::row(line, format!("column `{column}`: `{value}` is not a non-negative integer"))
    })
}

/// Parses a `.tokens` table into tokens in document order.
///
/// Validates the structural invariants as it goes: token ids contiguous
/// from 0, sentence and paragraph ids non-decreasing, and sentences never
/// crossing paragraph boundaries.
pub fn parse_tokens(input: &str) -> Result<Vec<Token>, ParseError> {
    let mut lines = input.lines();
    let indices = header_indices(lines.next(), &TOKEN_COLUMNS)?;

    let mut tokens: Vec<Token> = Vec::new();
    for (row, line) in lines.enumerate() {
        let line_no = row + 2;
        if line.trim_end_matches('\r').is_empty() {
            continue;
        }
        let fields = split_line(line);
        let doc_index =
            parse_usize(field(&fields, &indices, "token_ID_within_document", line_no)?, "token_ID_within_document", line_no)?;
        let sentence_id =
            parse_usize(field(&fields, &indices, "sentence_ID", line_no)?, "sentence_ID", line_no)?;
        let paragraph_id =
            parse_usize(field(&fields, &indices, "paragraph_ID", line_no)?, "paragraph_ID", line_no)?;
        let surface = field(&fields, &indices, "word", line_no)?.to_string();
        let lemma = field(&fields, &indices, "lemma", line_no)?.to_string();
        let pos = field(&fields, &indices, "POS_tag", line_no)?.to_string();

        if doc_index != tokens.len() {
            return Err(ParseError::Structure {
                line: line_no,
                message: format!(
                    "token ids must be contiguous from 0: found {doc_index}, expected {}",
                    tokens.len()
                ),
            });
        }
        if let Some(prev) = tokens.last() {
            if sentence_id < prev.sentence_id {
                return Err(ParseError::Structure {
                    line: line_no,
                    message: format!(
                        "sentence_ID decreased from {} to {sentence_id}",
                        prev.sentence_id
                    ),
                });
            }
            if paragraph_id < prev.paragraph_id {
                return Err(ParseError::Structure {
                    line: line_no,
                    message: format!(
                        "paragraph_ID decreased from {} to {paragraph_id}",
                        prev.paragraph_id
                    ),
                });
            }
            if paragraph_id != prev.paragraph_id && sentence_id == prev.sentence_id {
                return Err(ParseError::Structure {
                    line: line_no,
                    message: format!(
                        "sentence {sentence_id} crosses a paragraph boundary at token {doc_index}"
                    ),
                });
            }
        }

        tokens.push(Token { doc_index, sentence_id, paragraph_id, surface, lemma, pos });
    }
    Ok(tokens)
}

/// Parses a `.entities` table into mentions sorted by span.
///
/// `token_count` is the length of the corresponding token table; spans
/// reaching past it are rejected here rather than at network-build time.
pub fn parse_entities(input: &str, token_count: usize) -> Result<Vec<Mention>, ParseError> {
    let mut lines = input.lines();
    let indices = header_indices(lines.next(), &ENTITY_COLUMNS)?;

    let mut mentions: Vec<Mention> = Vec::new();
    for (row, line) in lines.enumerate() {
        let line_no = row + 2;
        if line.trim_end_matches('\r').is_empty() {
            continue;
        }
        let fields = split_line(line);
        let coref_raw = field(&fields, &indices, "COREF", line_no)?.trim();
        let cluster_id = if coref_raw.is_empty() || coref_raw == "-" {
            None
        } else {
            Some(parse_usize(coref_raw, "COREF", line_no)?)
        };
        let start_token =
            parse_usize(field(&fields, &indices, "start_token", line_no)?, "start_token", line_no)?;
        let end_token =
            parse_usize(field(&fields, &indices, "end_token", line_no)?, "end_token", line_no)?;
        let prop_raw = field(&fields, &indices, "prop", line_no)?.trim();
        let kind = MentionKind::from_prop(prop_raw).ok_or_else(|| {
            ParseError::row(line_no, format!("unknown prop value `{prop_raw}` (expected PROP, NOM or PRON)"))
        })?;
        let category = field(&fields, &indices, "cat", line_no)?.to_string();
        let text = field(&fields, &indices, "text", line_no)?.to_string();

        if start_token > end_token {
            return Err(ParseError::Span {
                line: line_no,
                message: format!("mention span starts at {start_token} but ends at {end_token}"),
            });
        }
        if end_token >= token_count {
            return Err(ParseError::Bounds {
                line: line_no,
                message: format!(
                    "mention span [{start_token}, {end_token}] exceeds document of {token_count} tokens"
                ),
            });
        }

        mentions.push(Mention { start_token, end_token, kind, category, cluster_id, text });
    }

    sort_mentions(&mut mentions);
    Ok(mentions)
}

/// Canonical mention order: by start, outermost span first on ties.
fn sort_mentions(mentions: &mut [Mention]) {
    mentions.sort_by(|a, b| {
        a.start_token.cmp(&b.start_token).then(b.end_token.cmp(&a.end_token))
    });
}

/// Assembles and cross-validates a [`Document`].
///
/// Checks every mention span against token bounds, the single-sentence
/// constraint, and the nesting rule: overlapping mentions are only valid
/// when one strictly contains the other.
pub fn build_document(
    tokens: Vec<Token>,
    mentions: Vec<Mention>,
    source_id: impl Into<String>,
) -> Result<Document, ParseError> {
    let mut mentions = mentions;
    sort_mentions(&mut mentions);

    for mention in &mentions {
        if mention.start_token > mention.end_token {
            return Err(ParseError::Document(format!(
                "mention `{}` span starts at {} but ends at {}",
                mention.text, mention.start_token, mention.end_token
            )));
        }
        if mention.end_token >= tokens.len() {
            return Err(ParseError::Document(format!(
                "mention `{}` spans [{}, {}] but the document has {} tokens",
                mention.text,
                mention.start_token,
                mention.end_token,
                tokens.len()
            )));
        }
        let start_sentence = tokens[mention.start_token].sentence_id;
        let end_sentence = tokens[mention.end_token].sentence_id;
        if start_sentence != end_sentence {
            return Err(ParseError::Document(format!(
                "mention `{}` [{}, {}] crosses sentences {} and {}",
                mention.text, mention.start_token, mention.end_token, start_sentence, end_sentence
            )));
        }
    }

    // Overlap check over the sorted order: a stack of currently open spans.
    let mut open: Vec<&Mention> = Vec::new();
    for mention in &mentions {
        while let Some(top) = open.last() {
            if top.end_token < mention.start_token {
                open.pop();
            } else {
                break;
            }
        }
        if let Some(top) = open.last() {
            if !top.strictly_contains(mention) {
                return Err(ParseError::Document(format!(
                    "mentions `{}` [{}, {}] and `{}` [{}, {}] overlap without nesting",
                    top.text,
                    top.start_token,
                    top.end_token,
                    mention.text,
                    mention.start_token,
                    mention.end_token
                )));
            }
        }
        open.push(mention);
    }

    let mut sentence_spans = Vec::new();
    let mut paragraph_spans = Vec::new();
    let mut sentence_of_token = Vec::with_capacity(tokens.len());
    for (idx, token) in tokens.iter().enumerate() {
        let new_sentence = idx == 0 || tokens[idx - 1].sentence_id != token.sentence_id;
        if new_sentence {
            sentence_spans.push((idx, idx + 1));
        } else {
            sentence_spans.last_mut().unwrap().1 = idx + 1;
        }
        let new_paragraph = idx == 0 || tokens[idx - 1].paragraph_id != token.paragraph_id;
        if new_paragraph {
            paragraph_spans.push((idx, idx + 1));
        } else {
            paragraph_spans.last_mut().unwrap().1 = idx + 1;
        }
        sentence_of_token.push(sentence_spans.len() - 1);
    }

    Ok(Document {
        source_id: source_id.into(),
        tokens,
        mentions,
        sentence_spans,
        paragraph_spans,
        sentence_of_token,
    })
}

/// Serializes tokens back to the `.tokens` table format.
pub fn write_tokens(doc: &Document) -> String {
    let mut out = String::from(
        "paragraph_ID\tsentence_ID\ttoken_ID_within_document\tword\tlemma\tPOS_tag\n",
    );
    for token in &doc.tokens {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            token.paragraph_id, token.sentence_id, token.doc_index, token.surface, token.lemma,
            token.pos
        ));
    }
    out
}

/// Serializes mentions back to the `.entities` table format.
pub fn write_entities(doc: &Document) -> String {
    let mut out = String::from("COREF\tstart_token\tend_token\tprop\tcat\ttext\n");
    for mention in &doc.mentions {
        let coref = match mention.cluster_id {
            Some(id) => id.to_string(),
            None => "-".to_string(),
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            coref,
            mention.start_token,
            mention.end_token,
            mention.kind.prop_label(),
            mention.category,
            mention.text
        ));
    }
    out
}
