//! Built-in, table-driven annotators: a lexicon POS tagger/lemmatizer and a
//! phrase gazetteer for the sparse semantic layers.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use super::provider::{AnnotationProvider, LabelContext};
use super::{is_punctuation, LabelSet, LayerId};
use crate::error::{Error, Result};
use crate::morph::{singularize, Morphology};

const BUNDLED_LEXICON: &str = include_str!("../../data/lexicon.tsv");
const BUNDLED_GAZETTEER: &str = include_str!("../../data/gazetteer.tsv");

/// Tags that are looked up before any verb reading is considered.
const CLOSED_CLASS: &[&str] = &[
    "DT", "IN", "CC", "TO", "PRP", "PRP$", "WP", "WP$", "WDT", "WRB", "MD", "EX", "CD", "RB",
];

/// Deterministic POS tagger and lemmatizer backed by a word list and the
/// morphology table. Covers the Lemma and Pos layers.
#[derive(Clone, Debug)]
pub struct LexiconTagger {
    words: HashMap<String, String>,
    morph: Arc<Morphology>,
}

impl LexiconTagger {
    pub fn bundled() -> Self {
        static WORDS: OnceLock<HashMap<String, String>> = OnceLock::new();
        let words = WORDS
            .get_or_init(|| parse_lexicon(BUNDLED_LEXICON).expect("bundled lexicon"))
            .clone();
        static MORPH: OnceLock<Arc<Morphology>> = OnceLock::new();
        let morph = MORPH
            .get_or_init(|| Arc::new(Morphology::bundled().clone()))
            .clone();
        LexiconTagger { words, morph }
    }

    pub fn with_morphology(mut self, morph: Arc<Morphology>) -> Self {
        self.morph = morph;
        self
    }

    /// (POS, lemma) for every token.
    pub fn tag(&self, texts: &[&str]) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::with_capacity(texts.len());
        for (i, &word) in texts.iter().enumerate() {
            let tagged = self.tag_one(texts, i, &out);
            debug_assert!(!tagged.0.is_empty(), "{word}");
            out.push(tagged);
        }
        out
    }

    fn tag_one(&self, texts: &[&str], i: usize, prev: &[(String, String)]) -> (String, String) {
        let word = texts[i];
        let lower = word.to_lowercase();
        if let Some(tag) = punctuation_tag(word) {
            return (tag.to_string(), word.to_string());
        }
        if word == "'s" || word == "’s" {
            return ("POS".into(), word.into());
        }
        if is_number(word) {
            return ("CD".into(), word.into());
        }
        let prev_tag = prev.last().map(|(t, _)| t.as_str()).unwrap_or("");
        let lex = self.words.get(&lower).map(String::as_str);
        let capitalized = word.chars().next().is_some_and(char::is_uppercase);

        if capitalized && i > 0 {
            return match lex {
                Some(tag @ ("JJ" | "PRP")) => (tag.into(), word.into()),
                _ => ("NNP".into(), word.into()),
            };
        }
        if lower == "that" {
            let tag = if prev_tag.starts_with("NN") {
                "WDT"
            } else {
                "DT"
            };
            return (tag.into(), word.into());
        }
        if let Some(tag) = lex.filter(|t| CLOSED_CLASS.contains(t)) {
            return (tag.into(), word.into());
        }

        let noun_context = matches!(prev_tag, "DT" | "JJ" | "PRP$" | "POS" | "IN" | "CD");
        let noun_reading = lex.is_some_and(|t| t.starts_with("NN"))
            || self
                .words
                .get(&singularize(&lower))
                .is_some_and(|t| t == "NN");
        let analyses = self.morph.analyses(&lower);
        if !analyses.is_empty() && !(noun_context && noun_reading) {
            let (tag, lemma) = choose_verb_reading(analyses, prev);
            return (tag, lemma);
        }
        if let Some(tag) = lex {
            let lemma = if tag == "NNS" {
                singularize(word)
            } else {
                word.to_string()
            };
            return (tag.into(), lemma);
        }
        if noun_reading {
            return ("NNS".into(), singularize(word));
        }
        if capitalized {
            return ("NNP".into(), word.into());
        }
        suffix_guess(word, prev)
    }
}

fn choose_verb_reading(
    analyses: &[(String, String)],
    prev: &[(String, String)],
) -> (String, String) {
    let window = &prev[prev.len().saturating_sub(4)..];
    let after_do = window
        .iter()
        .any(|(tag, lemma)| tag == "MD" || tag == "TO" || lemma.eq_ignore_ascii_case("do"));
    let after_be_have = prev[prev.len().saturating_sub(3)..]
        .iter()
        .any(|(_, lemma)| lemma.eq_ignore_ascii_case("be") || lemma.eq_ignore_ascii_case("have"));
    let order: &[&str] = if after_do {
        &["VB", "VBP", "VBZ", "VBD", "VBN", "VBG"]
    } else if after_be_have {
        &["VBN", "VBG", "VBZ", "VBD", "VBP", "VB"]
    } else {
        &["VBZ", "VBD", "VBP", "VBN", "VB", "VBG"]
    };
    for want in order {
        if let Some((lemma, tag)) = analyses.iter().find(|(_, t)| t == want) {
            return (tag.clone(), lemma.clone());
        }
    }
    let (lemma, tag) = &analyses[0];
    (tag.clone(), lemma.clone())
}

fn suffix_guess(word: &str, prev: &[(String, String)]) -> (String, String) {
    let lower = word.to_lowercase();
    let after_be_have = prev
        .last()
        .is_some_and(|(_, l)| l.eq_ignore_ascii_case("be") || l.eq_ignore_ascii_case("have"));
    if lower.len() > 4 && lower.ends_with("ly") {
        return ("RB".into(), word.into());
    }
    if lower.len() > 5 && lower.ends_with("ing") {
        return ("VBG".into(), lower[..lower.len() - 3].to_string());
    }
    if lower.len() > 4 && lower.ends_with("ed") {
        let tag = if after_be_have { "VBN" } else { "VBD" };
        return (tag.into(), lower[..lower.len() - 2].to_string());
    }
    const ADJ: &[&str] = &[
        "al", "ous", "ive", "ful", "ic", "able", "ible", "ian", "ese", "ish", "less",
    ];
    if lower.len() > 4 && ADJ.iter().any(|s| lower.ends_with(s)) {
        return ("JJ".into(), word.into());
    }
    if lower.len() > 3 && lower.ends_with('s') && !lower.ends_with("ss") && !lower.ends_with("us") {
        return ("NNS".into(), singularize(word));
    }
    ("NN".into(), word.into())
}

fn punctuation_tag(word: &str) -> Option<&'static str> {
    Some(match word {
        "." | "?" | "!" => ".",
        "," => ",",
        ";" | ":" | "-" | "--" => ":",
        "(" => "-LRB-",
        ")" => "-RRB-",
        "\"" | "``" | "''" => "''",
        w if is_punctuation(w) => "SYM",
        _ => return None,
    })
}

fn is_number(word: &str) -> bool {
    word.chars().any(|c| c.is_ascii_digit())
        && word
            .chars()
            .all(|c| c.is_ascii_digit() || c == ',' || c == '.')
}

fn parse_lexicon(text: &str) -> Result<HashMap<String, String>> {
    let mut words = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::format("lexicon.tsv", n + 1, "expected WORD<TAB>TAG"));
        }
        words
            .entry(cols[0].to_lowercase())
            .or_insert_with(|| cols[1].to_string());
    }
    Ok(words)
}

impl AnnotationProvider for LexiconTagger {
    fn name(&self) -> &str {
        "lexicon"
    }

    fn label(&self, layer: LayerId, ctx: &LabelContext<'_>) -> Option<Vec<Option<LabelSet>>> {
        if !matches!(layer, LayerId::Pos | LayerId::Lemma) {
            return None;
        }
        let texts: Vec<&str> = ctx.tokens.iter().map(|t| t.text.as_str()).collect();
        let tagged = self.tag(&texts);
        Some(
            tagged
                .into_iter()
                .map(|(pos, lemma)| {
                    Some(LabelSet::single(if layer == LayerId::Pos {
                        pos
                    } else {
                        lemma
                    }))
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug)]
struct Phrase {
    words: Vec<String>,
    case_sensitive: bool,
    labels: Vec<(LayerId, String)>,
}

/// Longest-match phrase gazetteer for the Ner, Gkg, Viaf and Sst layers.
///
/// Phrases containing an uppercase letter match case-sensitively, others
/// case-insensitively. Numbers are labelled on the Ner layer (`date` for
/// four-digit years, `number` otherwise).
#[derive(Clone, Debug, Default)]
pub struct Gazetteer {
    by_first: HashMap<String, Vec<Phrase>>,
}

impl Gazetteer {
    pub fn bundled() -> Self {
        static GAZ: OnceLock<Gazetteer> = OnceLock::new();
        GAZ.get_or_init(|| {
            Gazetteer::parse(BUNDLED_GAZETTEER, "gazetteer.tsv").expect("bundled gazetteer")
        })
        .clone()
    }

    /// Parses `PHRASE<TAB>LAYER<TAB>LABEL` lines.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut gaz = Gazetteer::default();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::format(
                    source_name,
                    n + 1,
                    "expected PHRASE<TAB>LAYER<TAB>LABEL",
                ));
            }
            let layer = LayerId::from_name(cols[1])
                .filter(|l| LayerId::SEMANTIC.contains(l))
                .ok_or_else(|| {
                    Error::format(source_name, n + 1, format!("unknown layer {:?}", cols[1]))
                })?;
            gaz.add(cols[0], layer, cols[2]);
        }
        Ok(gaz)
    }

    pub fn add(&mut self, phrase: &str, layer: LayerId, label: &str) {
        let case_sensitive = phrase.chars().any(char::is_uppercase);
        let words: Vec<String> = phrase
            .split_whitespace()
            .map(|w| {
                if case_sensitive {
                    w.to_string()
                } else {
                    w.to_lowercase()
                }
            })
            .collect();
        if words.is_empty() {
            return;
        }
        let bucket = self.by_first.entry(words[0].to_lowercase()).or_default();
        match bucket.iter_mut().find(|p| p.words == words) {
            Some(existing) => existing.labels.push((layer, label.to_string())),
            None => bucket.push(Phrase {
                words,
                case_sensitive,
                labels: vec![(layer, label.to_string())],
            }),
        }
    }

    fn matches_at(&self, texts: &[&str], at: usize, layer: LayerId) -> Option<(&Phrase, usize)> {
        let bucket = self.by_first.get(&texts[at].to_lowercase())?;
        bucket
            .iter()
            .filter(|p| p.labels.iter().any(|(l, _)| *l == layer))
            .filter(|p| {
                at + p.words.len() <= texts.len()
                    && p.words.iter().zip(&texts[at..]).all(|(w, t)| {
                        if p.case_sensitive {
                            w == t
                        } else {
                            *w == t.to_lowercase()
                        }
                    })
            })
            .max_by_key(|p| p.words.len())
            .map(|p| (p, p.words.len()))
    }

    pub fn label_layer(
        &self,
        texts: &[&str],
        pos: Option<&[LabelSet]>,
        layer: LayerId,
    ) -> Vec<LabelSet> {
        let mut cells = vec![LabelSet::new(); texts.len()];
        let mut i = 0;
        while i < texts.len() {
            if let Some((phrase, len)) = self.matches_at(texts, i, layer) {
                for cell in &mut cells[i..i + len] {
                    for (l, label) in &phrase.labels {
                        if *l == layer {
                            cell.insert(label.clone());
                        }
                    }
                }
                i += len;
                continue;
            }
            if layer == LayerId::Ner {
                let is_cd = pos.is_some_and(|p| p[i].contains("CD")) || is_number(texts[i]);
                if is_cd && texts[i].chars().any(|c| c.is_ascii_digit()) {
                    let year = texts[i].len() == 4 && texts[i].chars().all(|c| c.is_ascii_digit());
                    cells[i].insert(if year { "date" } else { "number" });
                }
            }
            i += 1;
        }
        cells
    }
}

impl AnnotationProvider for Gazetteer {
    fn name(&self) -> &str {
        "gazetteer"
    }

    fn label(&self, layer: LayerId, ctx: &LabelContext<'_>) -> Option<Vec<Option<LabelSet>>> {
        if !LayerId::SEMANTIC.contains(&layer) {
            return None;
        }
        let texts: Vec<&str> = ctx.tokens.iter().map(|t| t.text.as_str()).collect();
        let pos = ctx.layers.get(&LayerId::Pos).map(Vec::as_slice);
        Some(
            self.label_layer(&texts, pos, layer)
                .into_iter()
                .map(Some)
                .collect(),
        )
    }
}
