//! Rule-based mention detection, coreference resolution and character
//! promotion.
//!
//! This is the fallback path for plain text without precomputed
//! annotations. Detection and resolution are deterministic surface rules:
//! capitalized runs for proper names, a pronoun lexicon, and
//! determiner+person-noun bigrams; clustering matches normalized surfaces,
//! merges surname subsets under gender compatibility, and links singular
//! pronouns to the nearest compatible antecedent within a sentence window.
//! Cluster quality is far below a trained coreference system; the rules
//! exist to make the network extractor usable on bare text, and every
//! lossy step emits a [`Diagnostic`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::annotation::{Document, Mention, MentionKind};
use crate::diag::{Diagnostic, DiagnosticKind};
use crate::lexicon::{Gender, Lexicon, Number};

/// Lowercase particles absorbed inside proper-name spans and dropped from
/// surname token sets ("Boule de Suif", "Comte de Bréville").
const PARTICLES: [&str; 6] = ["de", "du", "des", "d'", "la", "le"];

/// Determiners accepted before a person noun in a nominal mention.
const DETERMINERS: [&str; 21] = [
    "le", "la", "les", "l'", "un", "une", "ce", "cette", "ces", "sa", "son", "ses", "leur",
    "leurs", "ma", "mon", "mes", "notre", "nos", "votre", "vos",
];

#[derive(Debug, Error)]
pub enum AliasError {
    #[error("alias target `{0}` is not a canonical name of any character")]
    UnknownTarget(String),
    #[error("alias target `{0}` is itself remapped; chained alias tables are not supported")]
    ChainedTarget(String),
}

/// A coreference cluster promoted to a network node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub character_id: usize,
    pub canonical_name: String,
    pub aliases: BTreeSet<String>,
    /// Indices into `Document::mentions`, ascending.
    pub mention_indices: Vec<usize>,
    pub gender: Gender,
}

/// Dense cluster ids per mention, ordered by first mention position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    cluster_of: Vec<usize>,
    num_clusters: usize,
}

impl ClusterAssignment {
    fn from_raw(raw: Vec<usize>) -> Self {
        // Renumber so that cluster ids are dense and ordered by first mention.
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cluster_of = Vec::with_capacity(raw.len());
        for old in raw {
            let next = remap.len();
            let id = *remap.entry(old).or_insert(next);
            cluster_of.push(id);
        }
        let num_clusters = remap.len();
        Self { cluster_of, num_clusters }
    }

    /// Derives an assignment from the annotations already on the document:
    /// COREF ids define clusters, unclustered mentions become singletons.
    pub fn from_annotations(doc: &Document) -> Self {
        let mut raw = Vec::with_capacity(doc.mentions.len());
        let mut by_coref: BTreeMap<usize, usize> = BTreeMap::new();
        let mut next = 0usize;
        for mention in &doc.mentions {
            let id = match mention.cluster_id {
                Some(coref) => *by_coref.entry(coref).or_insert_with(|| {
                    next += 1;
                    next - 1
                }),
                None => {
                    next += 1;
                    next - 1
                }
            };
            raw.push(id);
        }
        Self::from_raw(raw)
    }

    pub fn cluster_of(&self, mention_index: usize) -> usize {
        self.cluster_of[mention_index]
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn mention_count(&self) -> usize {
        self.cluster_of.len()
    }

    /// Mention indices grouped per cluster, both levels ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_clusters];
        for (mention, &cluster) in self.cluster_of.iter().enumerate() {
            groups[cluster].push(mention);
        }
        groups
    }
}

fn fold_apostrophes(s: &str) -> String {
    s.replace('\u{2019}', "'")
}

fn is_particle(surface: &str) -> bool {
    let folded = fold_apostrophes(&surface.to_lowercase());
    PARTICLES.contains(&folded.as_str())
}

fn is_determiner(surface: &str) -> bool {
    let folded = fold_apostrophes(&surface.to_lowercase());
    DETERMINERS.contains(&folded.as_str())
}

fn is_capitalized(surface: &str) -> bool {
    surface.chars().next().is_some_and(|c| c.is_uppercase())
}

/// Joins token surfaces, omitting the space after an elided article ("d'").
fn join_surfaces<'a>(surfaces: impl Iterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for surface in surfaces {
        if !out.is_empty() && !out.ends_with('\'') && !out.ends_with('\u{2019}') {
            out.push(' ');
        }
        out.push_str(surface);
    }
    out
}

/// Detects character mentions with surface rules.
///
/// Proper mentions are maximal capitalized-token runs with leading
/// honorifics absorbed and lowercase particles bridged between capitalized
/// tokens; pronoun mentions come from the lexicon (taking precedence over
/// capitalization, so sentence-initial "Il" is a pronoun); nominal
/// mentions are determiner+person-noun bigrams. Everything is category
/// "PER" with no cluster id.
pub fn detect_mentions(doc: &Document, lex: &Lexicon) -> Vec<Mention> {
    let mut mentions = Vec::new();
    let tokens = &doc.tokens;

    for &(sent_start, sent_end) in doc.sentences() {
        let mut i = sent_start;
        while i < sent_end {
            let surface = tokens[i].surface.as_str();

            if lex.is_pronoun(surface) {
                mentions.push(Mention {
                    start_token: i,
                    end_token: i,
                    kind: MentionKind::Pronoun,
                    category: "PER".to_string(),
                    cluster_id: None,
                    text: surface.to_string(),
                });
                i += 1;
                continue;
            }

            // Proper run: honorific prefix, then capitalized tokens with
            // particle bridges.
            if lex.is_honorific(surface) || is_capitalized(surface) {
                let mut j = i;
                while j < sent_end && lex.is_honorific(tokens[j].surface.as_str()) {
                    j += 1;
                }
                let mut has_name_token = false;
                loop {
                    if j < sent_end
                        && is_capitalized(tokens[j].surface.as_str())
                        && !lex.is_pronoun(tokens[j].surface.as_str())
                        && !lex.is_honorific(tokens[j].surface.as_str())
                    {
                        if !is_particle(tokens[j].surface.as_str()) {
                            has_name_token = true;
                        }
                        j += 1;
                        continue;
                    }
                    // Bridge a run of lowercase particles if a capitalized
                    // non-pronoun token follows.
                    let mut k = j;
                    while k < sent_end && is_particle(tokens[k].surface.as_str()) {
                        k += 1;
                    }
                    if k > j
                        && k < sent_end
                        && is_capitalized(tokens[k].surface.as_str())
                        && !lex.is_pronoun(tokens[k].surface.as_str())
                    {
                        j = k;
                        continue;
                    }
                    break;
                }
                if has_name_token {
                    mentions.push(Mention {
                        start_token: i,
                        end_token: j - 1,
                        kind: MentionKind::Proper,
                        category: "PER".to_string(),
                        cluster_id: None,
                        text: join_surfaces(
                            tokens[i..j].iter().map(|t| t.surface.as_str()),
                        ),
                    });
                    i = j;
                    continue;
                }
            }

            if is_determiner(surface)
                && i + 1 < sent_end
                && lex.is_person_noun(tokens[i + 1].surface.as_str())
            {
                mentions.push(Mention {
                    start_token: i,
                    end_token: i + 1,
                    kind: MentionKind::Nominal,
                    category: "PER".to_string(),
                    cluster_id: None,
                    text: join_surfaces(
                        tokens[i..i + 2].iter().map(|t| t.surface.as_str()),
                    ),
                });
                i += 2;
                continue;
            }

            i += 1;
        }
    }

    mentions
}

/// Case-folded surface of a mention with any leading honorifics stripped
/// and whitespace collapsed.
fn normalized_surface(doc: &Document, mention: &Mention, lex: &Lexicon) -> String {
    let tokens = &doc.tokens[mention.start_token..=mention.end_token];
    let mut start = 0;
    while start < tokens.len() && lex.is_honorific(tokens[start].surface.as_str()) {
        start += 1;
    }
    let joined = join_surfaces(tokens[start..].iter().map(|t| t.surface.as_str()));
    fold_apostrophes(&joined.to_lowercase())
}

/// Normalized non-particle tokens of a proper mention.
fn surname_token_set(doc: &Document, mention: &Mention, lex: &Lexicon) -> BTreeSet<String> {
    let tokens = &doc.tokens[mention.start_token..=mention.end_token];
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .skip_while(|s| lex.is_honorific(s))
        .filter(|s| !is_particle(s))
        .map(|s| fold_apostrophes(&s.to_lowercase()))
        .collect()
}

/// Honorific-derived gender of a mention: a leading honorific inside the
/// span wins, else the token immediately before the span (same sentence).
fn honorific_gender(doc: &Document, mention: &Mention, lex: &Lexicon) -> Gender {
    let first = doc.tokens[mention.start_token].surface.as_str();
    if let Some(g) = lex.honorific_gender(first) {
        return g;
    }
    if mention.start_token > 0 {
        let prev = &doc.tokens[mention.start_token - 1];
        if prev.sentence_id == doc.tokens[mention.start_token].sentence_id {
            if let Some(g) = lex.honorific_gender(prev.surface.as_str()) {
                return g;
            }
        }
    }
    Gender::Unknown
}

/// Gender evidence a mention offers as an antecedent.
fn mention_gender(doc: &Document, mention: &Mention, lex: &Lexicon) -> Gender {
    match mention.kind {
        MentionKind::Pronoun => lex
            .pronoun(doc.tokens[mention.start_token].surface.as_str())
            .map(|(g, _)| g)
            .unwrap_or(Gender::Unknown),
        _ => honorific_gender(doc, mention, lex),
    }
}

struct ClusterState {
    mentions: Vec<usize>,
    proper_surfaces: Vec<String>,
    proper_token_sets: Vec<BTreeSet<String>>,
    nominal_surfaces: Vec<String>,
    genders: BTreeSet<Gender>,
    last_start: usize,
}

impl ClusterState {
    fn gender_compatible(&self, gender: Gender) -> bool {
        gender == Gender::Unknown || self.genders.is_empty() || self.genders.contains(&gender)
    }
}

/// Clusters the document's mentions with deterministic rules.
///
/// Proper mentions join a cluster on identical normalized surface, or on a
/// surname token-set subset relation, both gated on honorific-gender
/// compatibility. Singular pronouns link to the nearest preceding mention
/// within `max_distance` sentences with a compatible gender; plural
/// pronouns stay singletons. Nominal mentions link only on exact
/// normalized-surface match with a prior nominal.
pub fn resolve_coreference(
    doc: &Document,
    lex: &Lexicon,
    max_distance: usize,
) -> ClusterAssignment {
    let mentions = &doc.mentions;
    let mut clusters: Vec<ClusterState> = Vec::new();
    let mut raw = vec![usize::MAX; mentions.len()];

    // Clusters scanned most-recently-mentioned first.
    let recency_order = |clusters: &[ClusterState]| {
        let mut order: Vec<usize> = (0..clusters.len()).collect();
        order.sort_by_key(|&c| std::cmp::Reverse(clusters[c].last_start));
        order
    };

    for (idx, mention) in mentions.iter().enumerate() {
        let chosen = match mention.kind {
            MentionKind::Proper => {
                let surface = normalized_surface(doc, mention, lex);
                let token_set = surname_token_set(doc, mention, lex);
                let gender = honorific_gender(doc, mention, lex);
                let order = recency_order(&clusters);

                let exact = (!surface.is_empty())
                    .then(|| {
                        order.iter().copied().find(|&c| {
                            clusters[c].gender_compatible(gender)
                                && clusters[c].proper_surfaces.contains(&surface)
                        })
                    })
                    .flatten();
                let subset = exact.or_else(|| {
                    if token_set.is_empty() {
                        return None;
                    }
                    order.iter().copied().find(|&c| {
                        clusters[c].gender_compatible(gender)
                            && clusters[c].proper_token_sets.iter().any(|other| {
                                !other.is_empty()
                                    && (token_set.is_subset(other) || other.is_subset(&token_set))
                            })
                    })
                });
                subset
            }
            MentionKind::Pronoun => {
                let pron = lex.pronoun(doc.tokens[mention.start_token].surface.as_str());
                match pron {
                    Some((_, Number::Plural)) | None => None,
                    Some((gender, Number::Singular)) => {
                        let sentence = doc.sentence_ordinal(mention.start_token);
                        mentions[..idx]
                            .iter()
                            .enumerate()
                            .rev()
                            .take_while(|(_, cand)| {
                                sentence - doc.sentence_ordinal(cand.start_token) <= max_distance
                            })
                            .find(|(_, cand)| {
                                gender.compatible(mention_gender(doc, cand, lex))
                            })
                            .map(|(j, _)| raw[j])
                    }
                }
            }
            MentionKind::Nominal => {
                let surface = normalized_surface(doc, mention, lex);
                let order = recency_order(&clusters);
                order
                    .into_iter()
                    .find(|&c| clusters[c].nominal_surfaces.contains(&surface))
            }
        };

        let cluster_id = match chosen {
            Some(c) => c,
            None => {
                clusters.push(ClusterState {
                    mentions: Vec::new(),
                    proper_surfaces: Vec::new(),
                    proper_token_sets: Vec::new(),
                    nominal_surfaces: Vec::new(),
                    genders: BTreeSet::new(),
                    last_start: 0,
                });
                clusters.len() - 1
            }
        };

        let state = &mut clusters[cluster_id];
        state.mentions.push(idx);
        state.last_start = mention.start_token;
        match mention.kind {
            MentionKind::Proper => {
                state.proper_surfaces.push(normalized_surface(doc, mention, lex));
                state.proper_token_sets.push(surname_token_set(doc, mention, lex));
                let g = honorific_gender(doc, mention, lex);
                if g != Gender::Unknown {
                    state.genders.insert(g);
                }
            }
            MentionKind::Nominal => {
                state.nominal_surfaces.push(normalized_surface(doc, mention, lex));
            }
            MentionKind::Pronoun => {}
        }
        raw[idx] = cluster_id;
    }

    ClusterAssignment::from_raw(raw)
}

/// Promotes clusters to characters.
///
/// A cluster becomes a character when it holds at least one proper or
/// nominal mention of category "PER". Pronoun-only clusters are dropped
/// with a diagnostic. The canonical name is the most frequent proper alias
/// (earliest first occurrence on ties; nominal aliases fill in when a
/// cluster has no proper mention). Gender is the majority over honorific
/// and pronoun evidence.
pub fn promote_characters(
    doc: &Document,
    assignment: &ClusterAssignment,
    lex: &Lexicon,
) -> (Vec<Character>, Vec<Diagnostic>) {
    let mut characters = Vec::new();
    let mut diagnostics = Vec::new();

    for cluster in assignment.clusters() {
        let all_pronouns = cluster
            .iter()
            .all(|&m| doc.mentions[m].kind == MentionKind::Pronoun);
        if all_pronouns {
            let texts: Vec<&str> =
                cluster.iter().map(|&m| doc.mentions[m].text.as_str()).collect();
            diagnostics.push(Diagnostic::new(
                DiagnosticKind::PronounOnlyCluster,
                format!("dropped pronoun-only cluster {{{}}}", texts.join(", ")),
            ));
            continue;
        }
        let promotable = cluster.iter().any(|&m| {
            let mention = &doc.mentions[m];
            mention.category == "PER" && mention.kind != MentionKind::Pronoun
        });
        if !promotable {
            continue;
        }

        let canonical = canonical_name(doc, &cluster, MentionKind::Proper)
            .or_else(|| canonical_name(doc, &cluster, MentionKind::Nominal))
            .expect("promotable cluster has a proper or nominal mention");

        let aliases: BTreeSet<String> =
            cluster.iter().map(|&m| doc.mentions[m].text.clone()).collect();

        let mut masc = 0usize;
        let mut fem = 0usize;
        for &m in &cluster {
            match mention_gender(doc, &doc.mentions[m], lex) {
                Gender::Masc => masc += 1,
                Gender::Fem => fem += 1,
                Gender::Unknown => {}
            }
        }
        let gender = match masc.cmp(&fem) {
            std::cmp::Ordering::Greater => Gender::Masc,
            std::cmp::Ordering::Less => Gender::Fem,
            std::cmp::Ordering::Equal => Gender::Unknown,
        };

        characters.push(Character {
            character_id: characters.len(),
            canonical_name: canonical,
            aliases,
            mention_indices: cluster,
            gender,
        });
    }

    (characters, diagnostics)
}

/// Most frequent alias of the given kind; ties go to the earliest first
/// occurrence in mention order.
fn canonical_name(doc: &Document, cluster: &[usize], kind: MentionKind) -> Option<String> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (pos, &m) in cluster.iter().enumerate() {
        let mention = &doc.mentions[m];
        if mention.kind != kind {
            continue;
        }
        let entry = counts.entry(mention.text.as_str()).or_insert((0, pos));
        entry.0 += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| {
            a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1))
        })
        .map(|(text, _)| text.to_string())
}

/// Unions characters through a canonical-name alias table.
///
/// Sources that match no character are ignored (which makes repeated
/// application a no-op); unknown targets and chained tables are errors.
pub fn merge_aliases(
    characters: Vec<Character>,
    alias_table: &BTreeMap<String, String>,
) -> Result<(Vec<Character>, Vec<Diagnostic>), AliasError> {
    let canonical_names: BTreeSet<&str> =
        characters.iter().map(|c| c.canonical_name.as_str()).collect();
    for (source, target) in alias_table {
        if source == target {
            continue;
        }
        if !canonical_names.contains(target.as_str()) {
            return Err(AliasError::UnknownTarget(target.clone()));
        }
        if alias_table.get(target).is_some_and(|t| t != target) {
            return Err(AliasError::ChainedTarget(target.clone()));
        }
    }

    let resolved: Vec<String> = characters
        .iter()
        .map(|c| {
            alias_table
                .get(&c.canonical_name)
                .cloned()
                .unwrap_or_else(|| c.canonical_name.clone())
        })
        .collect();

    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (idx, name) in resolved.iter().enumerate() {
        groups.entry(name.as_str()).or_default().push(idx);
    }
    if groups.values().all(|g| g.len() == 1) {
        return Ok((characters, Vec::new()));
    }

    let mut diagnostics = Vec::new();
    let mut merged: Vec<Character> = Vec::new();
    for (name, members) in &groups {
        let target_idx = *members
            .iter()
            .find(|&&i| characters[i].canonical_name.as_str() == *name)
            .expect("alias target exists in its own group");
        let mut aliases = BTreeSet::new();
        let mut mention_indices = Vec::new();
        let mut gender = characters[target_idx].gender;
        for &i in members {
            aliases.extend(characters[i].aliases.iter().cloned());
            mention_indices.extend(characters[i].mention_indices.iter().copied());
            if gender == Gender::Unknown {
                gender = characters[i].gender;
            }
            if i != target_idx {
                diagnostics.push(Diagnostic::new(
                    DiagnosticKind::AliasMerge,
                    format!(
                        "merged `{}` into `{}`",
                        characters[i].canonical_name, name
                    ),
                ));
            }
        }
        mention_indices.sort_unstable();
        merged.push(Character {
            character_id: 0,
            canonical_name: (*name).to_string(),
            aliases,
            mention_indices,
            gender,
        });
    }

    merged.sort_by_key(|c| c.mention_indices[0]);
    for (idx, character) in merged.iter_mut().enumerate() {
        character.character_id = idx;
    }
    diagnostics.sort_by(|a, b| a.message.cmp(&b.message));
    Ok((merged, diagnostics))
}
