//! Tokens, annotation layers and the annotated sentence record.
//!
//! Every downstream structure (composite patterns, rules, candidates) is built
//! from [`AnnotatedSentence`]: a token sequence plus one [`LabelSet`] per token
//! for each [`LayerId`].

mod lexicon;
mod pos;
mod provider;
mod text;
mod tsv;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use lexicon::{Gazetteer, LexiconTagger};
pub use pos::{is_penn_tag, simplify_pos};
pub use provider::{annotate, AnnotationProvider, Annotator, FileProvider, LabelContext};
pub use text::{detokenize, is_punctuation, split_sentences, tokenize};
pub use tsv::{load_annotations, parse_annotations, save_annotations, write_annotations};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub index: usize,
    /// Character (not byte) offset of the token in its sentence.
    pub char_offset: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LayerId {
    Lemma,
    Pos,
    PosSimple,
    Ner,
    Gkg,
    Viaf,
    Sst,
}

impl LayerId {
    pub const ALL: [LayerId; 7] = [
        LayerId::Lemma,
        LayerId::Pos,
        LayerId::PosSimple,
        LayerId::Ner,
        LayerId::Gkg,
        LayerId::Viaf,
        LayerId::Sst,
    ];

    /// Sparse layers filled by entity/semantic annotators.
    pub const SEMANTIC: [LayerId; 4] = [LayerId::Ner, LayerId::Gkg, LayerId::Viaf, LayerId::Sst];

    /// Layers every token must carry a label on.
    pub fn is_dense(self) -> bool {
        matches!(self, LayerId::Lemma | LayerId::Pos | LayerId::PosSimple)
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerId::Lemma => "LEMMA",
            LayerId::Pos => "POS",
            LayerId::PosSimple => "POS_SIMPLE",
            LayerId::Ner => "NER",
            LayerId::Gkg => "GKG",
            LayerId::Viaf => "VIAF",
            LayerId::Sst => "SST",
        }
    }

    pub fn from_name(name: &str) -> Option<LayerId> {
        LayerId::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Set of labels one annotator assigned to one token.
///
/// Renders as `_` when empty and as `|`-joined sorted values otherwise.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(BTreeSet<String>);

impl LabelSet {
    pub fn new() -> Self {
        LabelSet(BTreeSet::new())
    }

    pub fn single(label: impl Into<String>) -> Self {
        let mut set = BTreeSet::new();
        set.insert(label.into());
        LabelSet(set)
    }

    /// Parses a file cell: `_` (or an empty string) is the empty set, `|` separates values.
    pub fn parse(cell: &str) -> Self {
        let cell = cell.trim();
        if cell.is_empty() || cell == "_" {
            return LabelSet::new();
        }
        LabelSet(
            cell.split('|')
                .map(str::trim)
                .filter(|v| !v.is_empty() && *v != "_")
                .map(str::to_string)
                .collect(),
        )
    }

    pub fn render(&self) -> String {
        if self.0.is_empty() {
            "_".to_string()
        } else {
            self.0
                .iter()
                .map(String::as_str)
                .collect::<Vec<_>>()
                .join("|")
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn first(&self) -> Option<&str> {
        self.0.iter().next().map(String::as_str)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    pub fn insert(&mut self, label: impl Into<String>) -> bool {
        self.0.insert(label.into())
    }

    pub fn intersects(&self, other: &LabelSet) -> bool {
        self.0.iter().any(|v| other.0.contains(v))
    }

    pub fn intersects_ignore_case(&self, other: &LabelSet) -> bool {
        self.0
            .iter()
            .any(|a| other.0.iter().any(|b| a.to_lowercase() == b.to_lowercase()))
    }

    pub fn map(&self, f: impl Fn(&str) -> String) -> LabelSet {
        LabelSet(self.0.iter().map(|v| f(v)).collect())
    }
}

impl<S: Into<String>> FromIterator<S> for LabelSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        LabelSet(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for LabelSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for LabelSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let cell = String::deserialize(deserializer)?;
        Ok(LabelSet::parse(&cell))
    }
}

pub type Layers = BTreeMap<LayerId, Vec<LabelSet>>;

/// A tokenized sentence with one label set per token on every layer.
///
/// Token offsets always index into [`AnnotatedSentence::text`], the canonical
/// detokenized surface, so two sentences with the same tokens and labels
/// compare equal regardless of the original spacing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub source_id: String,
    tokens: Vec<Token>,
    layers: Layers,
}

impl AnnotatedSentence {
    /// Builds a sentence from token texts and layer rows.
    ///
    /// `PosSimple` is always recomputed from `Pos`; missing sparse layers are
    /// filled with empty label sets.
    pub fn new(
        source_id: impl Into<String>,
        texts: Vec<String>,
        mut layers: Layers,
    ) -> Result<Self> {
        if texts.is_empty() {
            return Err(Error::EmptySentence);
        }
        if let Some(bad) = texts.iter().position(|t| t.is_empty()) {
            return Err(Error::InvalidArgument(format!(
                "token {bad} has empty text"
            )));
        }
        let n = texts.len();
        for layer in [LayerId::Lemma, LayerId::Pos] {
            let row = layers.get(&layer).ok_or(Error::RequiredLayer {
                layer,
                message: "layer missing".into(),
            })?;
            if row.len() != n {
                return Err(Error::LayerLength {
                    layer,
                    found: row.len(),
                    expected: n,
                });
            }
            if let Some(i) = row.iter().position(LabelSet::is_empty) {
                return Err(Error::RequiredLayer {
                    layer,
                    message: format!("token {i} ({:?}) has no label", texts[i]),
                });
            }
        }
        let simple = layers[&LayerId::Pos]
            .iter()
            .map(|cell| cell.map(simplify_pos))
            .collect();
        layers.insert(LayerId::PosSimple, simple);
        for layer in LayerId::SEMANTIC {
            let row = layers
                .entry(layer)
                .or_insert_with(|| vec![LabelSet::new(); n]);
            if row.len() != n {
                return Err(Error::LayerLength {
                    layer,
                    found: row.len(),
                    expected: n,
                });
            }
        }
        Ok(AnnotatedSentence {
            source_id: source_id.into(),
            tokens: canonical_tokens(&texts),
            layers,
        })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.text.clone()).collect()
    }

    pub fn layer(&self, layer: LayerId) -> &[LabelSet] {
        &self.layers[&layer]
    }

    pub fn layers(&self) -> &Layers {
        &self.layers
    }

    pub fn cell(&self, layer: LayerId, index: usize) -> &LabelSet {
        &self.layers[&layer][index]
    }

    /// First POS tag of a token.
    pub fn pos(&self, index: usize) -> &str {
        self.cell(LayerId::Pos, index).first().unwrap_or("")
    }

    /// First lemma of a token.
    pub fn lemma(&self, index: usize) -> &str {
        self.cell(LayerId::Lemma, index).first().unwrap_or("")
    }

    pub fn text(&self) -> String {
        detokenize(self.tokens.iter().map(|t| t.text.as_str()))
    }

    /// New sentence made of the tokens at `indices` (in the given order),
    /// labels sliced from this one. `terminal` appends a final "." token when
    /// the slice does not already end in sentence punctuation.
    pub fn slice(
        &self,
        source_id: impl Into<String>,
        indices: &[usize],
        terminal: bool,
    ) -> Result<Self> {
        let mut texts: Vec<String> = indices
            .iter()
            .map(|&i| self.tokens[i].text.clone())
            .collect();
        let mut layers: Layers = LayerId::ALL
            .into_iter()
            .map(|l| {
                (
                    l,
                    indices
                        .iter()
                        .map(|&i| self.layers[&l][i].clone())
                        .collect(),
                )
            })
            .collect();
        let ends_with_stop = texts
            .last()
            .is_some_and(|t| matches!(t.as_str(), "." | "!" | "?"));
        if terminal && !ends_with_stop {
            texts.push(".".to_string());
            for (layer, row) in layers.iter_mut() {
                row.push(match layer {
                    LayerId::Lemma | LayerId::Pos | LayerId::PosSimple => LabelSet::single("."),
                    _ => LabelSet::new(),
                });
            }
        }
        AnnotatedSentence::new(source_id, texts, layers)
    }
}

/// Tokens re-based onto the canonical detokenized surface.
fn canonical_tokens(texts: &[String]) -> Vec<Token> {
    let mut tokens = Vec::with_capacity(texts.len());
    let mut offset = 0;
    for (i, text) in texts.iter().enumerate() {
        if i > 0 && text::space_before(&texts[i - 1], text) {
            offset += 1;
        }
        tokens.push(Token {
            text: text.clone(),
            index: i,
            char_offset: offset,
        });
        offset += text.chars().count();
    }
    tokens
}
