//! Plain-text segmentation for the fallback pipeline.
//!
//! Splits raw UTF-8 prose into paragraphs on blank lines and into
//! sentences on terminal punctuation (`.` `!` `?`), with a small
//! abbreviation guard so "M. Loiseau" does not end a sentence. Tokens are
//! whitespace-separated words with punctuation split off and French
//! elisions ("d'Artagnan") cut after the apostrophe.

use crate::annotation::{build_document, Document, Token};

/// Words whose trailing period is part of the token, not a sentence end.
const ABBREVIATIONS: [&str; 7] = ["M.", "MM.", "Mme.", "Mlle.", "Dr.", "St.", "etc."];

/// Elided prefixes kept as their own token, apostrophe included.
const ELISIONS: [&str; 12] = [
    "l", "d", "j", "n", "s", "c", "m", "t", "qu", "jusqu", "lorsqu", "puisqu",
];

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_opening_punct(c: char) -> bool {
    matches!(c, '«' | '“' | '"' | '(' | '[' | '—' | '–')
}

fn is_closing_punct(c: char) -> bool {
    matches!(c, '»' | '”' | '"' | ')' | ']' | ',' | ';' | ':' | '…' | '!' | '?' | '.')
}

fn is_sentence_end(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| matches!(c, '.' | '!' | '?' | '…'))
}

/// Splits one whitespace-delimited word into tokens.
fn split_word(word: &str, out: &mut Vec<String>) {
    let mut rest = word;

    while let Some(c) = rest.chars().next() {
        if is_opening_punct(c) {
            out.push(c.to_string());
            rest = &rest[c.len_utf8()..];
        } else {
            break;
        }
    }

    // Elision: a short prefix ending in an apostrophe becomes its own token.
    if let Some(apo_pos) = rest.char_indices().find(|(_, c)| is_apostrophe(*c)).map(|(i, _)| i) {
        let prefix = &rest[..apo_pos];
        if ELISIONS.iter().any(|e| e.eq_ignore_ascii_case(prefix)) {
            let apo_len = rest[apo_pos..].chars().next().unwrap().len_utf8();
            out.push(rest[..apo_pos + apo_len].to_string());
            rest = &rest[apo_pos + apo_len..];
        }
    }

    // Peel trailing punctuation, merging runs of dots into one token.
    let mut trailing: Vec<String> = Vec::new();
    while let Some(c) = rest.chars().last() {
        if !is_closing_punct(c) {
            break;
        }
        let cut = rest.len() - c.len_utf8();
        if c == '.' && ABBREVIATIONS.iter().any(|a| a.eq_ignore_ascii_case(rest)) {
            break;
        }
        if c == '.' {
            if let Some(last) = trailing.last_mut() {
                if last.chars().all(|d| d == '.') {
                    last.insert(0, '.');
                    rest = &rest[..cut];
                    continue;
                }
            }
        }
        trailing.push(c.to_string());
        rest = &rest[..cut];
    }

    if !rest.is_empty() {
        out.push(rest.to_string());
    }
    out.extend(trailing.into_iter().rev());
}

/// Segments plain text into a [`Document`] with no mention annotations.
pub fn segment_text(text: &str, source_id: &str) -> Document {
    let mut tokens: Vec<Token> = Vec::new();
    let mut sentence_id = 0usize;
    let mut paragraph_id = 0usize;
    let mut sentence_open = false;
    let mut pending_break = false;

    let mut paragraphs: Vec<String> = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                paragraphs.push(std::mem::take(&mut current));
            }
        } else {
            if !current.is_empty() {
                current.push(' ');
            }
            current.push_str(line);
        }
    }
    if !current.is_empty() {
        paragraphs.push(current);
    }

    let mut scratch: Vec<String> = Vec::new();
    for (p_idx, paragraph) in paragraphs.iter().enumerate() {
        if p_idx > 0 {
            paragraph_id += 1;
            if sentence_open {
                sentence_id += 1;
                sentence_open = false;
            }
            pending_break = false;
        }
        for word in paragraph.split_whitespace() {
            scratch.clear();
            split_word(word, &mut scratch);
            for surface in scratch.drain(..) {
                let ends = is_sentence_end(&surface);
                if pending_break && !ends && !surface.chars().all(is_closing_punct) {
                    sentence_id += 1;
                    pending_break = false;
                }
                tokens.push(Token {
                    doc_index: tokens.len(),
                    sentence_id,
                    paragraph_id,
                    surface: surface.clone(),
                    lemma: surface,
                    pos: String::new(),
                });
                sentence_open = true;
                if ends {
                    pending_break = true;
                }
            }
        }
    }

    build_document(tokens, Vec::new(), source_id)
        .expect("segmenter emits structurally valid tokens")
}
