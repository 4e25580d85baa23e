//! Lexical resources for the rule-based mention pipeline.
//!
//! A [`Lexicon`] bundles the three word lists the detector and resolver
//! need: honorifics with their grammatical gender, personal pronouns with
//! gender and number, and common nouns that denote persons. A built-in
//! French lexicon ships with the crate; external files use a small
//! three-section key-value format:
//!
//! ```text
//! [honorifics]
//! Mme = fem
//! [pronouns]
//! elle = fem singular
//! [person_nouns]
//! femme
//! ```
//!
//! Honorific lookup is case-sensitive ("Mme" is not "mme"); pronoun and
//! person-noun lookup is case-insensitive.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gender {
    Masc,
    Fem,
    Unknown,
}

impl Gender {
    /// Unknown gender never conflicts with anything.
    pub fn compatible(self, other: Gender) -> bool {
        self == Gender::Unknown || other == Gender::Unknown || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Number {
    Singular,
    Plural,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("section `{0}` is empty")]
    EmptySection(&'static str),
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    honorifics: BTreeMap<String, Gender>,
    pronouns: BTreeMap<String, (Gender, Number)>,
    person_nouns: BTreeSet<String>,
}

impl Lexicon {
    /// The built-in French lexicon.
    pub fn french() -> Self {
        let mut honorifics = BTreeMap::new();
        for (surface, gender) in [
            ("M.", Gender::Masc),
            ("MM.", Gender::Masc),
            ("Monsieur", Gender::Masc),
            ("Mme", Gender::Fem),
            ("Madame", Gender::Fem),
            ("Mlle", Gender::Fem),
            ("Mademoiselle", Gender::Fem),
            ("Comte", Gender::Masc),
            ("Comtesse", Gender::Fem),
            ("Baron", Gender::Masc),
            ("Baronne", Gender::Fem),
            ("Docteur", Gender::Masc),
            ("Capitaine", Gender::Masc),
        ] {
            honorifics.insert(surface.to_string(), gender);
        }

        let mut pronouns = BTreeMap::new();
        for (surface, gender, number) in [
            ("il", Gender::Masc, Number::Singular),
            ("elle", Gender::Fem, Number::Singular),
            ("ils", Gender::Masc, Number::Plural),
            ("elles", Gender::Fem, Number::Plural),
        ] {
            pronouns.insert(surface.to_string(), (gender, number));
        }

        let person_nouns = [
            "femme",
            "homme",
            "dame",
            "demoiselle",
            "monsieur",
            "madame",
            "comte",
            "comtesse",
            "baron",
            "baronne",
            "officier",
            "soldat",
            "religieuse",
            "cocher",
            "aubergiste",
            "voyageur",
            "voyageuse",
            "prostituée",
            "époux",
            "épouse",
            "mari",
        ]
        .into_iter()
        .map(str::to_string)
        .collect();

        Self { honorifics, pronouns, person_nouns }
    }

    /// Parses the three-section lexicon file format.
    pub fn parse(input: &str) -> Result<Self, LexiconError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Honorifics,
            Pronouns,
            PersonNouns,
        }

        let mut honorifics = BTreeMap::new();
        let mut pronouns = BTreeMap::new();
        let mut person_nouns = BTreeSet::new();
        let mut section = Section::None;

        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name {
                    "honorifics" => Section::Honorifics,
                    "pronouns" => Section::Pronouns,
                    "person_nouns" => Section::PersonNouns,
                    other => {
                        return Err(LexiconError::Line {
                            line: line_no,
                            message: format!("unknown section `{other}`"),
                        })
                    }
                };
                continue;
            }
            match section {
                Section::None => {
                    return Err(LexiconError::Line {
                        line: line_no,
                        message: "entry before any section header".to_string(),
                    })
                }
                Section::Honorifics => {
                    let (key, value) = split_entry(line, line_no)?;
                    let gender = parse_gender(value, line_no)?;
                    honorifics.insert(key.to_string(), gender);
                }
                Section::Pronouns => {
                    let (key, value) = split_entry(line, line_no)?;
                    let mut parts = value.split_whitespace();
                    let gender = parse_gender(
                        parts.next().ok_or_else(|| LexiconError::Line {
                            line: line_no,
                            message: "pronoun entry needs `gender number`".to_string(),
                        })?,
                        line_no,
                    )?;
                    let number = match parts.next() {
                        Some("singular") => Number::Singular,
                        Some("plural") => Number::Plural,
                        other => {
                            return Err(LexiconError::Line {
                                line: line_no,
                                message: format!(
                                    "expected `singular` or `plural`, got `{}`",
                                    other.unwrap_or("")
                                ),
                            })
                        }
                    };
                    pronouns.insert(key.to_lowercase(), (gender, number));
                }
                Section::PersonNouns => {
                    person_nouns.insert(line.to_lowercase());
                }
            }
        }

        if honorifics.is_empty() {
            return Err(LexiconError::EmptySection("honorifics"));
        }
        if pronouns.is_empty() {
            return Err(LexiconError::EmptySection("pronouns"));
        }
        Ok(Self { honorifics, pronouns, person_nouns })
    }

    /// Gender of an honorific surface form, if known. Case-sensitive.
    pub fn honorific_gender(&self, surface: &str) -> Option<Gender> {
        self.honorifics.get(surface).copied()
    }

    pub fn is_honorific(&self, surface: &str) -> bool {
        self.honorifics.contains_key(surface)
    }

    /// Gender and number of a pronoun surface form. Case-insensitive.
    pub fn pronoun(&self, surface: &str) -> Option<(Gender, Number)> {
        self.pronouns.get(&surface.to_lowercase()).copied()
    }

    pub fn is_pronoun(&self, surface: &str) -> bool {
        self.pronouns.contains_key(&surface.to_lowercase())
    }

    pub fn is_person_noun(&self, surface: &str) -> bool {
        self.person_nouns.contains(&surface.to_lowercase())
    }
}

fn split_entry(line: &str, line_no: usize) -> Result<(&str, &str), LexiconError> {
    line.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| LexiconError::Line {
            line: line_no,
            message: "expected `key = value`".to_string(),
        })
}

fn parse_gender(value: &str, line_no: usize) -> Result<Gender, LexiconError> {
    match value {
        "masc" => Ok(Gender::Masc),
        "fem" => Ok(Gender::Fem),
        "unknown" => Ok(Gender::Unknown),
        other => Err(LexiconError::Line {
            line: line_no,
            message: format!("unknown gender `{other}`"),
        }),
    }
}
