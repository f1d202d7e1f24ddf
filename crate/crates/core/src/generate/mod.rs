//! Question generation: retrieve similar rules, align, replay.

mod align;

use serde::{Deserialize, Serialize};

pub use crate::morph::change_form;
pub use align::{align, align_with, Alignment};

use crate::annotate::{detokenize, AnnotatedSentence, LabelSet, LayerId, Layers};
use crate::error::{Error, Result};
use crate::morph::Morphology;
use crate::pattern::{create_cp, CompositePattern, SimilarityBreakdown};
use crate::rules::{case_for_position, QuestionItem, RuleId, RuleStore, TransformationRule};
use crate::simplify::simplify_sentence;

pub const DEFAULT_MIN_SIMILARITY: f64 = 0.5;
pub const DEFAULT_MAX_RULES_PER_SENTENCE: usize = 8;

/// Result of replaying one rule on one target sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct AppliedRule {
    pub question: String,
    pub answer: String,
    /// Inclusive target token range of the answer.
    pub answer_range: (usize, usize),
    /// The generated question with labels carried over from the target
    /// tokens and the rule's own question.
    pub question_cp: CompositePattern,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuestionCandidate {
    pub text: String,
    pub answer: String,
    pub rule_id: RuleId,
    /// Id of the input sentence, shared by its simplifications.
    pub source_id: String,
    /// Surface of the (possibly simplified) sentence the question came from.
    pub sentence: String,
    pub answer_range: (usize, usize),
    /// Ner and Gkg cells of the answer tokens.
    pub answer_entities: Vec<(LabelSet, LabelSet)>,
    pub question_cp: CompositePattern,
    pub match_: SimilarityBreakdown,
    pub estimated_score: f64,
}

/// One line of a questions file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: String,
    pub source_id: String,
    pub sentence: String,
    pub question: String,
    pub answer: String,
    pub rule_id: RuleId,
    pub match_score: f64,
    pub estimated_score: f64,
    /// Label of the generating system, used to group the rating report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
}

impl QuestionCandidate {
    pub fn to_record(&self, id: String) -> QuestionRecord {
        QuestionRecord {
            id,
            source_id: self.source_id.clone(),
            sentence: self.sentence.clone(),
            question: self.text.clone(),
            answer: self.answer.clone(),
            rule_id: self.rule_id,
            match_score: self.match_.score,
            estimated_score: self.estimated_score,
            system: None,
        }
    }
}

fn label_row(sentence: &AnnotatedSentence, i: usize) -> Vec<(LayerId, LabelSet)> {
    LayerId::ALL
        .into_iter()
        .filter(|l| *l != LayerId::PosSimple)
        .map(|l| (l, sentence.cell(l, i).clone()))
        .collect()
}

fn cp_row(cp: &CompositePattern, j: usize) -> Vec<(LayerId, LabelSet)> {
    LayerId::ALL
        .into_iter()
        .filter(|l| *l != LayerId::PosSimple)
        .map(|l| (l, cp.cell(l, j).clone()))
        .collect()
}

/// Replays `rule` on `target` through alignment `a`.
///
/// Every slot the question uses must be aligned (or elided as part of an
/// aligned entity run), at least one answer slot must be aligned, and the
/// answer tokens must satisfy the rule's guard.
pub fn apply_rule(
    rule: &TransformationRule,
    target: &AnnotatedSentence,
    a: &Alignment,
    morph: &Morphology,
) -> Result<AppliedRule> {
    let items = rule.question_items()?;
    for item in &items {
        if let QuestionItem::Slot { slot, .. } = item {
            if !a.is_covered(*slot) {
                return Err(Error::InapplicableRule { slot: *slot });
            }
        }
    }
    let answer_targets: Vec<usize> = rule.answer.slots().flat_map(|s| a.targets(s)).collect();
    let (Some(&lo), Some(&hi)) = (answer_targets.iter().min(), answer_targets.iter().max()) else {
        return Err(Error::InapplicableRule {
            slot: rule.answer.start,
        });
    };
    if let Some(guard) = &rule.answer.guard {
        if !(lo..=hi).any(|t| target.cell(guard.layer, t).contains(&guard.label)) {
            return Err(Error::GuardFailed {
                layer: guard.layer,
                label: guard.label.clone(),
            });
        }
    }

    let mut texts: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<(LayerId, LabelSet)>> = Vec::new();
    for (j, item) in items.iter().enumerate() {
        match item {
            QuestionItem::Literal(text) => {
                texts.push(case_for_position(text, texts.len(), false, ""));
                rows.push(cp_row(&rule.question_cp, j));
            }
            QuestionItem::Slot { slot, form } => {
                for t in a.targets(*slot) {
                    let surface = &target.tokens()[t].text;
                    let mut row = label_row(target, t);
                    let text = match form {
                        Some(tag) => {
                            for (layer, cell) in &mut row {
                                if *layer == LayerId::Pos {
                                    *cell = LabelSet::single(tag.clone());
                                }
                            }
                            change_form(morph, surface, target.lemma(t), tag)
                        }
                        None => surface.clone(),
                    };
                    texts.push(case_for_position(&text, texts.len(), t == 0, target.pos(t)));
                    rows.push(row);
                }
            }
        }
    }
    let mut layers = Layers::new();
    for row in &rows {
        for (layer, cell) in row {
            layers.entry(*layer).or_default().push(cell.clone());
        }
    }
    let question = detokenize(texts.iter().map(String::as_str));
    let question_cp = create_cp(&AnnotatedSentence::new(
        format!("{}?", target.source_id),
        texts,
        layers,
    )?);
    let answer = detokenize((lo..=hi).map(|t| target.tokens()[t].text.as_str()));
    Ok(AppliedRule {
        question,
        answer,
        answer_range: (lo, hi),
        question_cp,
    })
}

/// Aligns and applies in one step, exempting answer slots from the entity
/// constraint so a mismatched answer reaches the guard.
pub fn try_rule(
    rule: &TransformationRule,
    target: &AnnotatedSentence,
    morph: &Morphology,
) -> Result<AppliedRule> {
    let target_cp = create_cp(target);
    let a = align_with(&rule.sentence_cp, &target_cp, |s| rule.answer.contains(s));
    apply_rule(rule, target, &a, morph)
}

pub fn generate_questions(
    sentences: &[AnnotatedSentence],
    store: &RuleStore,
    min_similarity: f64,
    max_rules_per_sentence: usize,
) -> Result<Vec<QuestionCandidate>> {
    generate_questions_with(
        Morphology::bundled(),
        sentences,
        store,
        min_similarity,
        max_rules_per_sentence,
    )
}

/// Runs every sentence and its simplifications through lookup and rule
/// application. Inapplicable rules are skipped.
pub fn generate_questions_with(
    morph: &Morphology,
    sentences: &[AnnotatedSentence],
    store: &RuleStore,
    min_similarity: f64,
    max_rules_per_sentence: usize,
) -> Result<Vec<QuestionCandidate>> {
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    let mut out = Vec::new();
    for sentence in sentences {
        for variant in simplify_sentence(sentence) {
            let cp = create_cp(&variant);
            for (rule_id, sim) in store.lookup(&cp, min_similarity, max_rules_per_sentence) {
                let rule = store.get(rule_id).ok_or(Error::UnknownRule(rule_id))?;
                let applied = match try_rule(rule, &variant, morph) {
                    Ok(applied) => applied,
                    Err(e) => {
                        log::debug!("{}: rule {rule_id} skipped: {e}", variant.source_id);
                        continue;
                    }
                };
                let (lo, hi) = applied.answer_range;
                out.push(QuestionCandidate {
                    text: applied.question,
                    answer: applied.answer,
                    rule_id,
                    source_id: sentence.source_id.clone(),
                    sentence: variant.text(),
                    answer_range: applied.answer_range,
                    answer_entities: (lo..=hi)
                        .map(|t| {
                            (
                                variant.cell(LayerId::Ner, t).clone(),
                                variant.cell(LayerId::Gkg, t).clone(),
                            )
                        })
                        .collect(),
                    question_cp: applied.question_cp,
                    match_: sim,
                    estimated_score: 0.0,
                });
            }
        }
    }
    Ok(out)
}
