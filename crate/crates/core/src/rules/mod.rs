//! Transformation rules: learned edit scripts from sentence-question pairs,
//! and the store that indexes them.

mod extract;
mod store;
mod train;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::annotate::{detokenize, LayerId};
use crate::error::{Error, Result};
use crate::morph::{change_form, Morphology};
use crate::pattern::CompositePattern;

pub use extract::{extract_rule, extract_rule_with};
pub use store::{load_store, save_store, RuleStore, STORE_VERSION};
pub use train::{load_pairs, parse_pairs, train, train_with, TrainReport, TrainingPair};

pub type RuleId = u64;

/// One step of a rule's edit script. Slots index the rule's sentence
/// pattern; positions index the question under construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Remove { slot: usize },
    Insert { text: String, at: usize },
    Move { slot: usize, at: usize },
    ChangeForm { slot: usize, tag: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Guard {
    pub layer: LayerId,
    pub label: String,
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.layer, self.label)
    }
}

/// Inclusive slot range holding the answer, plus an optional label the
/// aligned target tokens must carry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerSpanSpec {
    pub start: usize,
    pub end: usize,
    pub guard: Option<Guard>,
}

impl AnswerSpanSpec {
    pub fn contains(&self, slot: usize) -> bool {
        (self.start..=self.end).contains(&slot)
    }

    pub fn slots(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Trained,
    Derived,
}

impl Origin {
    /// Statistics a rule starts with: trained rules count as one success.
    pub fn baseline(self) -> (u64, f64) {
        match self {
            Origin::Trained => (1, 1.0),
            Origin::Derived => (0, 0.0),
        }
    }
}

/// Element of a replayed question: fixed text or a sentence slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuestionItem {
    Literal(String),
    Slot { slot: usize, form: Option<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformationRule {
    pub id: RuleId,
    pub origin: Origin,
    #[serde(rename = "sentence")]
    pub sentence_cp: CompositePattern,
    #[serde(rename = "question")]
    pub question_cp: CompositePattern,
    pub edits: Vec<EditOp>,
    pub answer: AnswerSpanSpec,
    pub application_count: u64,
    pub success_sum: f64,
}

impl TransformationRule {
    pub fn success_rate(&self) -> f64 {
        if self.application_count == 0 {
            0.0
        } else {
            self.success_sum / self.application_count as f64
        }
    }

    /// Runs the edit script over slot identities.
    ///
    /// The working sequence starts as every sentence slot outside the answer
    /// span; answer slots the question needs are brought back by `Move`.
    pub fn question_items(&self) -> Result<Vec<QuestionItem>> {
        replay(self.sentence_cp.token_count(), &self.answer, &self.edits)
    }

    /// Slots the replayed question refers to.
    pub fn referenced_slots(&self) -> Result<Vec<usize>> {
        Ok(self
            .question_items()?
            .into_iter()
            .filter_map(|item| match item {
                QuestionItem::Slot { slot, .. } => Some(slot),
                QuestionItem::Literal(_) => None,
            })
            .collect())
    }

    /// The question this rule produces from its own training sentence.
    pub fn replay_on_training(&self, morph: &Morphology) -> Result<String> {
        let cp = &self.sentence_cp;
        let items = self.question_items()?;
        let tokens: Vec<String> = items
            .iter()
            .enumerate()
            .map(|(at, item)| match item {
                QuestionItem::Literal(text) => case_for_position(text, at, false, ""),
                QuestionItem::Slot { slot, form } => {
                    let surface = &cp.surface()[*slot];
                    let text = match form {
                        Some(tag) => change_form(morph, surface, cp.lemma(*slot), tag),
                        None => surface.clone(),
                    };
                    case_for_position(&text, at, *slot == 0, cp.pos(*slot))
                }
            })
            .collect();
        Ok(detokenize(tokens.iter().map(String::as_str)))
    }
}

pub(crate) fn replay(
    slot_count: usize,
    answer: &AnswerSpanSpec,
    edits: &[EditOp],
) -> Result<Vec<QuestionItem>> {
    let mut work: Vec<QuestionItem> = (0..slot_count)
        .filter(|s| !answer.contains(*s))
        .map(|slot| QuestionItem::Slot { slot, form: None })
        .collect();
    let mut forms: BTreeMap<usize, String> = BTreeMap::new();
    let position_of = |work: &[QuestionItem], s: usize| {
        work.iter()
            .position(|item| matches!(item, QuestionItem::Slot { slot, .. } if *slot == s))
    };
    let bad = |msg: String| Error::InvalidArgument(format!("edit script: {msg}"));
    for op in edits {
        match op {
            EditOp::Remove { slot } => {
                let at = position_of(&work, *slot)
                    .ok_or_else(|| bad(format!("remove of absent slot {slot}")))?;
                work.remove(at);
            }
            EditOp::ChangeForm { slot, tag } => {
                if *slot >= slot_count {
                    return Err(bad(format!("slot {slot} out of range")));
                }
                forms.insert(*slot, tag.clone());
            }
            EditOp::Insert { text, at } => {
                if *at > work.len() {
                    return Err(bad(format!("insert position {at} beyond {}", work.len())));
                }
                work.insert(*at, QuestionItem::Literal(text.clone()));
            }
            EditOp::Move { slot, at } => {
                if *slot >= slot_count {
                    return Err(bad(format!("slot {slot} out of range")));
                }
                if let Some(from) = position_of(&work, *slot) {
                    work.remove(from);
                }
                if *at > work.len() {
                    return Err(bad(format!("move position {at} beyond {}", work.len())));
                }
                work.insert(
                    *at,
                    QuestionItem::Slot {
                        slot: *slot,
                        form: None,
                    },
                );
            }
        }
    }
    for item in &mut work {
        if let QuestionItem::Slot { slot, form } = item {
            *form = forms.get(slot).cloned();
        }
    }
    Ok(work)
}

fn capitalize(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn decapitalize(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) => first.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Question-position casing: the first token is capitalized; a token that
/// opened its source sentence loses its capital elsewhere unless it is a
/// proper noun.
pub(crate) fn case_for_position(
    text: &str,
    position: usize,
    sentence_initial: bool,
    pos: &str,
) -> String {
    if position == 0 {
        capitalize(text)
    } else if sentence_initial && !matches!(pos, "NNP" | "NNPS") && !is_all_caps(text) {
        decapitalize(text)
    } else {
        text.to_string()
    }
}

fn is_all_caps(text: &str) -> bool {
    text.chars().filter(|c| c.is_alphabetic()).count() > 1 && !text.chars().any(char::is_lowercase)
}
