//! Diagnostics emitted by lossy or degenerate processing steps.
//!
//! Several stages drop or reshape data without failing (pronoun-only
//! clusters, empty narrative slices, degenerate metric denominators).
//! Each such event is reported as a [`Diagnostic`] so callers can surface
//! it instead of silently losing information.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// A coreference cluster contained only pronouns and was not promoted.
    PronounOnlyCluster,
    /// Two characters were unioned through the alias table.
    AliasMerge,
    /// A narrative slice covered zero sentences.
    EmptySlice,
    /// A MUC denominator was zero (all-singleton clustering).
    DegenerateMuc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}
