//! Coreference evaluation: mention-level precision/recall/F plus the MUC,
//! B³ and CEAFₑ clustering metrics with mean-F aggregation.
//!
//! Gold and predicted clusterings need not share a mention universe:
//! mentions present on only one side are added to the other as singletons
//! before scoring, so imperfect recognizers can still be scored.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::annotation::Document;
use crate::assignment::max_similarity_assignment;
use crate::diag::{Diagnostic, DiagnosticKind};

/// A mention span `(start_token, end_token)`, both inclusive.
pub type MentionKey = (usize, usize);

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("mention ({0}, {1}) appears in two clusters")]
    Overlap(usize, usize),
    #[error("clusters must be non-empty")]
    EmptyCluster,
}

/// Disjoint non-empty sets of mention spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    clusters: Vec<BTreeSet<MentionKey>>,
}

impl Clustering {
    pub fn new(clusters: Vec<BTreeSet<MentionKey>>) -> Result<Self, EvalError> {
        let mut seen = BTreeSet::new();
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(EvalError::EmptyCluster);
            }
            for &key in cluster {
                if !seen.insert(key) {
                    return Err(EvalError::Overlap(key.0, key.1));
                }
            }
        }
        Ok(Self { clusters })
    }

    /// Clusters from a document's COREF annotations; unclustered mentions
    /// become singletons.
    pub fn from_document(doc: &Document) -> Result<Self, EvalError> {
        let mut by_id: BTreeMap<usize, BTreeSet<MentionKey>> = BTreeMap::new();
        let mut singletons: Vec<BTreeSet<MentionKey>> = Vec::new();
        for mention in &doc.mentions {
            let key = (mention.start_token, mention.end_token);
            match mention.cluster_id {
                Some(id) => {
                    by_id.entry(id).or_default().insert(key);
                }
                None => singletons.push(BTreeSet::from([key])),
            }
        }
        let mut clusters: Vec<BTreeSet<MentionKey>> = by_id.into_values().collect();
        clusters.extend(singletons);
        Self::new(clusters)
    }

    pub fn clusters(&self) -> &[BTreeSet<MentionKey>] {
        &self.clusters
    }

    pub fn mentions(&self) -> BTreeSet<MentionKey> {
        self.clusters.iter().flatten().copied().collect()
    }

    /// Adds each mention in `universe` that this clustering lacks as a
    /// singleton cluster.
    fn completed(&self, universe: &BTreeSet<MentionKey>) -> Vec<BTreeSet<MentionKey>> {
        let own = self.mentions();
        let mut clusters = self.clusters.clone();
        for &key in universe.difference(&own) {
            clusters.push(BTreeSet::from([key]));
        }
        clusters
    }
}

/// One precision/recall/F triple. F is the harmonic mean, 0 when P+R = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

/// Set precision/recall/F over mention spans. Empty pred scores precision
/// 1 against empty gold and 0 otherwise; recall symmetric.
pub fn prf(gold: &BTreeSet<MentionKey>, pred: &BTreeSet<MentionKey>) -> Prf {
    let hits = gold.intersection(pred).count() as f64;
    let precision = if pred.is_empty() {
        if gold.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        hits / pred.len() as f64
    };
    let recall = if gold.is_empty() {
        if pred.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        hits / gold.len() as f64
    };
    Prf::from_pr(precision, recall)
}

/// Link-based MUC recall: Σ(|S| − p(S)) / Σ(|S| − 1) over gold clusters,
/// where p(S) is the number of response parts S intersects; precision
/// swaps the roles. All-singleton sides have denominator 0 and score 0
/// with a diagnostic.
fn muc_side(
    reference: &[BTreeSet<MentionKey>],
    response: &[BTreeSet<MentionKey>],
    side: &str,
    diagnostics: &mut Vec<Diagnostic>,
) -> f64 {
    let mut cluster_of: BTreeMap<MentionKey, usize> = BTreeMap::new();
    for (idx, cluster) in response.iter().enumerate() {
        for &key in cluster {
            cluster_of.insert(key, idx);
        }
    }
    let mut numerator = 0usize;
    let mut denominator = 0usize;
    for cluster in reference {
        let parts: BTreeSet<usize> = cluster.iter().map(|key| cluster_of[key]).collect();
        numerator += cluster.len() - parts.len();
        denominator += cluster.len() - 1;
    }
    if denominator == 0 {
        diagnostics.push(Diagnostic::new(
            DiagnosticKind::DegenerateMuc,
            format!("MUC {side} undefined on all-singleton clusters; scored 0"),
        ));
        return 0.0;
    }
    numerator as f64 / denominator as f64
}

pub fn muc(gold: &Clustering, pred: &Clustering) -> (Prf, Vec<Diagnostic>) {
    let universe: BTreeSet<MentionKey> =
        gold.mentions().union(&pred.mentions()).copied().collect();
    let g = gold.completed(&universe);
    let p = pred.completed(&universe);
    let mut diagnostics = Vec::new();
    let recall = muc_side(&g, &p, "recall", &mut diagnostics);
    let precision = muc_side(&p, &g, "precision", &mut diagnostics);
    (Prf::from_pr(precision, recall), diagnostics)
}

/// B³: per-mention cluster-intersection ratios averaged over the mention
/// universe; precision divides by the response cluster size, recall by the
/// gold cluster size.
pub fn b_cubed(gold: &Clustering, pred: &Clustering) -> Prf {
    let universe: BTreeSet<MentionKey> =
        gold.mentions().union(&pred.mentions()).copied().collect();
    if universe.is_empty() {
        return Prf::from_pr(0.0, 0.0);
    }
    let g = gold.completed(&universe);
    let p = pred.completed(&universe);
    let find = |clusters: &[BTreeSet<MentionKey>], key: MentionKey| -> usize {
        clusters.iter().position(|c| c.contains(&key)).unwrap()
    };
    let mut precision = 0.0;
    let mut recall = 0.0;
    for &key in &universe {
        let gc = &g[find(&g, key)];
        let pc = &p[find(&p, key)];
        let overlap = gc.intersection(pc).count() as f64;
        precision += overlap / pc.len() as f64;
        recall += overlap / gc.len() as f64;
    }
    let n = universe.len() as f64;
    Prf::from_pr(precision / n, recall / n)
}

/// Entity CEAF: optimal one-to-one cluster alignment under
/// φ4(g, p) = 2|g∩p| / (|g| + |p|); recall divides the total similarity by
/// the gold cluster count, precision by the response cluster count.
///
/// Unlike MUC and B³, no singleton completion happens here: the alignment
/// is already total over mismatched universes, and completion would let a
/// response inflate its score with invented mentions (each would align
/// perfectly with its own injected gold singleton).
pub fn ceaf_e(gold: &Clustering, pred: &Clustering) -> Prf {
    let g = gold.clusters();
    let p = pred.clusters();
    if g.is_empty() || p.is_empty() {
        return Prf::from_pr(0.0, 0.0);
    }
    let sim: Vec<Vec<f64>> = g
        .iter()
        .map(|gc| {
            p.iter()
                .map(|pc| {
                    2.0 * gc.intersection(pc).count() as f64 / (gc.len() + pc.len()) as f64
                })
                .collect()
        })
        .collect();
    let total = max_similarity_assignment(&sim);
    Prf::from_pr(total / p.len() as f64, total / g.len() as f64)
}

/// Arithmetic mean of the three coreference F values.
pub fn mean_f(muc_f: f64, b_cubed_f: f64, ceaf_f: f64) -> f64 {
    (muc_f + b_cubed_f + ceaf_f) / 3.0
}

/// Full evaluation bundle: optional mention-recognition P/R/F plus the
/// three coreference metrics and their mean F.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ner: Option<Prf>,
    pub muc: Prf,
    pub b_cubed: Prf,
    pub ceaf_e: Prf,
    pub mean_f: f64,
}

impl EvalReport {
    pub fn evaluate(gold: &Clustering, pred: &Clustering) -> (Self, Vec<Diagnostic>) {
        let (muc_scores, diagnostics) = muc(gold, pred);
        let b_cubed_scores = b_cubed(gold, pred);
        let ceaf_scores = ceaf_e(gold, pred);
        let report = Self {
            ner: Some(prf(&gold.mentions(), &pred.mentions())),
            muc: muc_scores,
            b_cubed: b_cubed_scores,
            ceaf_e: ceaf_scores,
            mean_f: mean_f(muc_scores.f1, b_cubed_scores.f1, ceaf_scores.f1),
        };
        (report, diagnostics)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tprecision\trecall\tf1\n");
        let mut row = |name: &str, p: Prf| {
            out.push_str(&format!("{name}\t{}\t{}\t{}\n", p.precision, p.recall, p.f1));
        };
        if let Some(ner) = self.ner {
            row("ner", ner);
        }
        row("muc", self.muc);
        row("b_cubed", self.b_cubed);
        row("ceaf_e", self.ceaf_e);
        out.push_str(&format!("mean_f\t\t\t{}\n", self.mean_f));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(c: char) -> MentionKey {
        let i = c as usize;
        (i, i)
    }

    fn clustering(groups: &[&[char]]) -> Clustering {
        Clustering::new(
            groups
                .iter()
                .map(|g| g.iter().map(|&c| key(c)).collect())
                .collect(),
        )
        .unwrap()
    }

    const EPS: f64 = 1e-9;

    fn assert_close(actual: f64, expected: f64) {
        assert!(
            (actual - expected).abs() < EPS,
            "expected {expected}, got {actual}"
        );
    }

    #[test]
    fn prf_reproduces_reported_f_measure() {
        // Construct sets with exact overlap ratios 0.915 and 0.852:
        // 12993/14200 and 12993/15250.
        let gold: BTreeSet<MentionKey> = (0..15250).map(|i| (i, i)).collect();
        let pred: BTreeSet<MentionKey> =
            (0..12993).chain(20000..21207).map(|i| (i, i)).collect();
        assert_eq!(pred.len(), 14200);
        let scores = prf(&gold, &pred);
        assert_close(scores.precision, 0.915);
        assert_close(scores.recall, 0.852);
        assert!((scores.f1 - 0.8824).abs() < 0.0005);
    }

    #[test]
    fn prf_identity_and_miss_cases() {
        let gold: BTreeSet<MentionKey> = [key('a'), key('b')].into();
        let scores = prf(&gold, &gold);
        assert_eq!((scores.precision, scores.recall, scores.f1), (1.0, 1.0, 1.0));

        let gold: BTreeSet<MentionKey> = [key('a'), key('b'), key('c'), key('d')].into();
        let pred: BTreeSet<MentionKey> = [key('a'), key('b'), key('e')].into();
        let scores = prf(&gold, &pred);
        assert_close(scores.precision, 2.0 / 3.0);
        assert_close(scores.recall, 0.5);
        assert_close(scores.f1, 4.0 / 7.0);
    }

    #[test]
    fn prf_empty_conventions() {
        let empty = BTreeSet::new();
        let some: BTreeSet<MentionKey> = [key('a')].into();
        assert_eq!(prf(&empty, &empty).precision, 1.0);
        assert_eq!(prf(&empty, &empty).recall, 1.0);
        assert_eq!(prf(&some, &empty).precision, 0.0);
        assert_eq!(prf(&empty, &some).recall, 0.0);
    }

    #[test]
    fn muc_worked_example() {
        let gold = clustering(&[&['a', 'b', 'c', 'd']]);
        let pred = clustering(&[&['a', 'b'], &['c', 'd']]);
        let (scores, diags) = muc(&gold, &pred);
        assert_close(scores.precision, 1.0);
        assert_close(scores.recall, 2.0 / 3.0);
        assert_close(scores.f1, 0.8);
        assert!(diags.is_empty());
    }

    #[test]
    fn muc_identity() {
        let gold = clustering(&[&['a', 'b'], &['c']]);
        let (scores, _) = muc(&gold, &gold);
        assert_eq!((scores.precision, scores.recall, scores.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn muc_all_singletons_scores_zero_with_diagnostic() {
        let gold = clustering(&[&['a'], &['b']]);
        let pred = clustering(&[&['a'], &['b']]);
        let (scores, diags) = muc(&gold, &pred);
        assert_eq!((scores.precision, scores.recall, scores.f1), (0.0, 0.0, 0.0));
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| d.kind == DiagnosticKind::DegenerateMuc));
    }

    #[test]
    fn b_cubed_worked_example() {
        let gold = clustering(&[&['a', 'b', 'c'], &['d']]);
        let pred = clustering(&[&['a', 'b'], &['c', 'd']]);
        let scores = b_cubed(&gold, &pred);
        assert_close(scores.precision, 0.75);
        assert_close(scores.recall, 2.0 / 3.0);
        assert_close(scores.f1, 12.0 / 17.0);
    }

    #[test]
    fn b_cubed_identity_and_singleton_response() {
        let gold = clustering(&[&['a', 'b', 'c'], &['d']]);
        let scores = b_cubed(&gold, &gold);
        assert_eq!((scores.precision, scores.recall, scores.f1), (1.0, 1.0, 1.0));

        let gold = clustering(&[&['a', 'b', 'c', 'd']]);
        let pred = clustering(&[&['a'], &['b'], &['c'], &['d']]);
        let scores = b_cubed(&gold, &pred);
        assert_close(scores.precision, 1.0);
        assert_close(scores.recall, 0.25);
    }

    #[test]
    fn ceaf_worked_example() {
        let gold = clustering(&[&['a', 'b', 'c'], &['d']]);
        let pred = clustering(&[&['a', 'b'], &['c', 'd']]);
        let scores = ceaf_e(&gold, &pred);
        assert_close(scores.precision, 11.0 / 15.0);
        assert_close(scores.recall, 11.0 / 15.0);
        assert_close(scores.f1, 11.0 / 15.0);
    }

    #[test]
    fn ceaf_identity_and_disjoint() {
        let gold = clustering(&[&['a', 'b'], &['c']]);
        let scores = ceaf_e(&gold, &gold);
        assert_eq!((scores.precision, scores.recall, scores.f1), (1.0, 1.0, 1.0));

        let gold = clustering(&[&['a', 'b']]);
        let pred = clustering(&[&['x', 'y']]);
        let scores = ceaf_e(&gold, &pred);
        assert_eq!((scores.precision, scores.recall, scores.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn mean_f_is_arithmetic() {
        assert_close(mean_f(0.8, 0.75, 0.7), 0.75);
        assert_close(mean_f(1.0, 1.0, 1.0), 1.0);
        let expected = (0.8 + 12.0 / 17.0 + 11.0 / 15.0) / 3.0;
        assert_close(mean_f(0.8, 12.0 / 17.0, 11.0 / 15.0), expected);
    }

    #[test]
    fn universe_completion_handles_missing_mentions() {
        // Pred misses 'c' entirely; it is added to pred as a singleton.
        let gold = clustering(&[&['a', 'b', 'c']]);
        let pred = clustering(&[&['a', 'b']]);
        let (scores, _) = muc(&gold, &pred);
        assert_close(scores.precision, 1.0);
        assert_close(scores.recall, 0.5);
    }

    #[test]
    fn swapping_sides_swaps_precision_and_recall() {
        let gold = clustering(&[&['a', 'b', 'c'], &['d', 'e']]);
        let pred = clustering(&[&['a', 'b'], &['c', 'd'], &['e', 'f']]);
        let (m1, _) = muc(&gold, &pred);
        let (m2, _) = muc(&pred, &gold);
        assert_close(m1.precision, m2.recall);
        assert_close(m1.recall, m2.precision);
        assert_close(m1.f1, m2.f1);
        let b1 = b_cubed(&gold, &pred);
        let b2 = b_cubed(&pred, &gold);
        assert_close(b1.precision, b2.recall);
        assert_close(b1.f1, b2.f1);
        let c1 = ceaf_e(&gold, &pred);
        let c2 = ceaf_e(&pred, &gold);
        assert_close(c1.precision, c2.recall);
        assert_close(c1.f1, c2.f1);
    }

    #[test]
    fn overlapping_clusters_rejected() {
        let err = Clustering::new(vec![
            BTreeSet::from([key('a'), key('b')]),
            BTreeSet::from([key('b')]),
        ]);
        assert!(matches!(err, Err(EvalError::Overlap(_, _))));
        let err = Clustering::new(vec![BTreeSet::new()]);
        assert!(matches!(err, Err(EvalError::EmptyCluster)));
    }

    #[test]
    fn report_bundles_all_metrics() {
        let gold = clustering(&[&['a', 'b', 'c'], &['d']]);
        let pred = clustering(&[&['a', 'b'], &['c', 'd']]);
        let (report, _) = EvalReport::evaluate(&gold, &pred);
        assert_close(report.b_cubed.precision, 0.75);
        assert_close(report.ceaf_e.f1, 11.0 / 15.0);
        assert_close(
            report.mean_f,
            mean_f(report.muc.f1, report.b_cubed.f1, report.ceaf_e.f1),
        );
        assert_eq!(report.ner.unwrap().f1, 1.0);
        let json = report.to_json();
        assert!(json.contains("\"mean_f\""));
    }
}
