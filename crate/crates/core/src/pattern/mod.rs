//! Composite patterns, layered similarity and the generalization hierarchy.

mod hierarchy;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::annotate::{AnnotatedSentence, LabelSet, LayerId, Layers};
use crate::error::{Error, Result};
use crate::lcs::lcs_len;

pub use hierarchy::{brute_force_lookup, PatternHierarchy};

/// The multi-layer label matrix of one sentence plus its surface tokens.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern", into = "RawPattern")]
pub struct CompositePattern {
    surface: Vec<String>,
    cells: Layers,
}

#[derive(Serialize, Deserialize)]
struct RawPattern {
    tokens: Vec<String>,
    layers: Layers,
}

impl TryFrom<RawPattern> for CompositePattern {
    type Error = Error;

    fn try_from(raw: RawPattern) -> Result<Self> {
        let sentence = AnnotatedSentence::new("", raw.tokens, raw.layers)?;
        Ok(create_cp(&sentence))
    }
}

impl From<CompositePattern> for RawPattern {
    fn from(cp: CompositePattern) -> Self {
        RawPattern {
            tokens: cp.surface,
            layers: cp.cells,
        }
    }
}

/// Copies every layer of `sentence` in the fixed layer order.
pub fn create_cp(sentence: &AnnotatedSentence) -> CompositePattern {
    let mut cells = Layers::new();
    for layer in LayerId::ALL {
        cells.insert(layer, sentence.layer(layer).to_vec());
    }
    CompositePattern {
        surface: sentence.texts(),
        cells,
    }
}

impl CompositePattern {
    pub fn token_count(&self) -> usize {
        self.surface.len()
    }

    pub fn surface(&self) -> &[String] {
        &self.surface
    }

    pub fn row(&self, layer: LayerId) -> &[LabelSet] {
        &self.cells[&layer]
    }

    pub fn cell(&self, layer: LayerId, slot: usize) -> &LabelSet {
        &self.cells[&layer][slot]
    }

    pub fn layers(&self) -> &Layers {
        &self.cells
    }

    pub fn pos(&self, slot: usize) -> &str {
        self.cell(LayerId::Pos, slot).first().unwrap_or("")
    }

    pub fn lemma(&self, slot: usize) -> &str {
        self.cell(LayerId::Lemma, slot).first().unwrap_or("")
    }

    pub fn key(&self, layer: LayerId) -> PatternKey {
        PatternKey::of_row(layer, self.row(layer))
    }

    /// Number of non-empty cells on `layer`.
    pub fn filled(&self, layer: LayerId) -> usize {
        self.row(layer).iter().filter(|c| !c.is_empty()).count()
    }

    /// Rebuilds an annotated sentence carrying the same labels.
    pub fn to_sentence(&self, source_id: &str) -> AnnotatedSentence {
        AnnotatedSentence::new(source_id, self.surface.clone(), self.cells.clone())
            .expect("composite pattern satisfies sentence invariants")
    }
}

/// Canonical single-string rendering of one layer row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternKey {
    pub layer: LayerId,
    pub key: String,
}

impl PatternKey {
    pub fn of_row(layer: LayerId, row: &[LabelSet]) -> Self {
        PatternKey {
            layer,
            key: row
                .iter()
                .map(LabelSet::render)
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

impl fmt::Display for PatternKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

fn cells_match(layer: LayerId, a: &LabelSet, b: &LabelSet) -> bool {
    if layer == LayerId::Lemma {
        a.intersects_ignore_case(b)
    } else {
        a.intersects(b)
    }
}

/// Row-level comparison returning `(matched, comparable)`.
///
/// Equal lengths compare position by position, counting positions where either
/// side is labelled. Unequal lengths take the LCS of the labelled cells over
/// the larger labelled count.
pub fn row_match(layer: LayerId, a: &[LabelSet], b: &[LabelSet]) -> (usize, usize) {
    if a.len() == b.len() {
        let mut matched = 0;
        let mut comparable = 0;
        for (x, y) in a.iter().zip(b) {
            if x.is_empty() && y.is_empty() {
                continue;
            }
            comparable += 1;
            if cells_match(layer, x, y) {
                matched += 1;
            }
        }
        return (matched, comparable);
    }
    let xs: Vec<&LabelSet> = a.iter().filter(|c| !c.is_empty()).collect();
    let ys: Vec<&LabelSet> = b.iter().filter(|c| !c.is_empty()).collect();
    let matched = lcs_len(&xs, &ys, |x, y| cells_match(layer, x, y));
    (matched, xs.len().max(ys.len()))
}

pub fn layer_match(a: &CompositePattern, b: &CompositePattern, layer: LayerId) -> (usize, usize) {
    row_match(layer, a.row(layer), b.row(layer))
}

/// Per-layer and total matched/comparable cell counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityBreakdown {
    pub per_layer: BTreeMap<LayerId, (usize, usize)>,
    pub matched_total: usize,
    pub comparable_total: usize,
    pub score: f64,
}

impl SimilarityBreakdown {
    pub fn from_counts(per_layer: BTreeMap<LayerId, (usize, usize)>) -> Self {
        let matched_total = per_layer.values().map(|c| c.0).sum();
        let comparable_total = per_layer.values().map(|c| c.1).sum();
        SimilarityBreakdown {
            per_layer,
            matched_total,
            comparable_total,
            score: ratio(matched_total, comparable_total),
        }
    }

    /// Exact comparison of the two scores as fractions.
    pub fn cmp_score(&self, other: &SimilarityBreakdown) -> Ordering {
        cmp_fraction(
            (self.matched_total, self.comparable_total),
            (other.matched_total, other.comparable_total),
        )
    }
}

pub(crate) fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Compares a/b with c/d; a zero denominator counts as zero.
pub(crate) fn cmp_fraction((a, b): (usize, usize), (c, d): (usize, usize)) -> Ordering {
    let (a, b) = if b == 0 { (0, 1) } else { (a, b) };
    let (c, d) = if d == 0 { (0, 1) } else { (c, d) };
    (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
}

pub fn similarity(a: &CompositePattern, b: &CompositePattern) -> SimilarityBreakdown {
    SimilarityBreakdown::from_counts(
        LayerId::ALL
            .into_iter()
            .map(|l| (l, layer_match(a, b, l)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::parse_annotations;
    use proptest::prelude::*;

    pub(crate) fn cp(rows: &[(&str, &str, &str, &str, &str)]) -> CompositePattern {
        // (text, lemma, pos, ner, sst)
        let mut layers = Layers::new();
        let col = |k: usize| -> Vec<LabelSet> {
            rows.iter()
                .map(|r| LabelSet::parse([r.1, r.2, r.3, r.4][k]))
                .collect()
        };
        layers.insert(LayerId::Lemma, col(0));
        layers.insert(LayerId::Pos, col(1));
        layers.insert(LayerId::Ner, col(2));
        layers.insert(LayerId::Sst, col(3));
        let texts = rows.iter().map(|r| r.0.to_string()).collect();
        create_cp(&AnnotatedSentence::new("t", texts, layers).unwrap())
    }

    const KISKA_TSV: &str = "# id=t2
0\tPeter\tPeter\tNNP\tperson\tperson\t_\t_
1\tSagan\tSagan\tNNP\tperson\tperson\t_\t_
2\tcomes\tcome\tVBZ\t_\t_\t_\t_
3\tfrom\tfrom\tIN\t_\t_\t_\t_
4\tSlovakia\tSlovakia\tNNP\tlocation\tcountry\t_\tcountry
5\t.\t.\t.\t_\t_\t_\t_
";

    #[test]
    fn table_two_pattern_and_keys() {
        let s = &parse_annotations(KISKA_TSV, "t2").unwrap()[0];
        let p = create_cp(s);
        assert_eq!(p.token_count(), 6);
        assert_eq!(p.key(LayerId::Pos).key, "NNP NNP VBZ IN NNP .");
        assert_eq!(p.key(LayerId::PosSimple).key, "NN NN VB IN NN .");
        assert_eq!(p.key(LayerId::Viaf).key, "_ _ _ _ _ _");
        assert_eq!(create_cp(s), p);
    }

    #[test]
    fn reflexive_and_disjoint() {
        let a = cp(&[("Go", "go", "VB", "_", "_"), (".", ".", ".", "_", "_")]);
        assert_eq!(a.token_count(), 2);
        let s = similarity(&a, &a);
        assert_eq!(s.score, 1.0);
        assert_eq!(layer_match(&a, &a, LayerId::Pos), (2, 2));
        let b = cp(&[("Run", "run", "NN", "_", "_"), ("!", "!", "SYM", "_", "_")]);
        assert_eq!(similarity(&a, &b).score, 0.0);
    }

    #[test]
    fn unequal_lengths_use_lcs() {
        let a = cp(&[
            ("a", "a", "DT", "_", "_"),
            ("b", "b", "NN", "person", "_"),
            ("c", "c", "VBZ", "_", "_"),
        ]);
        let b = cp(&[("b", "b", "NN", "person", "_"), ("c", "c", "VBZ", "_", "_")]);
        assert_eq!(layer_match(&a, &b, LayerId::Lemma), (2, 3));
        assert_eq!(layer_match(&a, &b, LayerId::Ner), (1, 1));
        assert_eq!(layer_match(&a, &b, LayerId::Sst), (0, 0));
    }

    #[test]
    fn lemma_matching_ignores_case() {
        let a = cp(&[("The", "The", "DT", "_", "_")]);
        let b = cp(&[("the", "the", "DT", "_", "_")]);
        assert_eq!(layer_match(&a, &b, LayerId::Lemma), (1, 1));
    }

    #[test]
    fn serde_round_trip() {
        let s = &parse_annotations(KISKA_TSV, "t2").unwrap()[0];
        let p = create_cp(s);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"POS_SIMPLE\""));
        let back: CompositePattern = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    fn arb_cp() -> impl Strategy<Value = CompositePattern> {
        let row = (
            prop::sample::select(vec!["the", "king", "be", "of", "come"]),
            prop::sample::select(vec!["DT", "NN", "NNP", "VBZ", "VBD", "IN"]),
            prop::sample::select(vec!["_", "person", "location", "person|location"]),
            prop::sample::select(vec!["_", "role", "city"]),
        );
        prop::collection::vec(row, 1..7).prop_map(|rows| {
            let owned: Vec<(&str, &str, &str, &str, &str)> =
                rows.iter().map(|r| (r.0, r.0, r.1, r.2, r.3)).collect();
            cp(&owned)
        })
    }

    proptest! {
        #[test]
        fn similarity_symmetric_and_bounded(a in arb_cp(), b in arb_cp()) {
            let ab = similarity(&a, &b);
            let ba = similarity(&b, &a);
            prop_assert_eq!(ab.score, ba.score);
            prop_assert!((0.0..=1.0).contains(&ab.score));
            let longest = a.token_count().max(b.token_count());
            for (m, c) in ab.per_layer.values() {
                prop_assert!(m <= c && *c <= longest);
            }
            prop_assert_eq!(similarity(&a, &a).score, 1.0);
        }
    }
}
