use std::collections::BTreeSet;

use super::{
    case_for_position, AnswerSpanSpec, EditOp, Guard, Origin, QuestionItem, TransformationRule,
};
use crate::annotate::{is_punctuation, tokenize, AnnotatedSentence, LayerId};
use crate::error::{Error, Result};
use crate::lcs::lcs_pairs;
use crate::morph::{change_form, Morphology};
use crate::pattern::create_cp;

/// Tags that never form an answer on their own.
const FUNCTION_TAGS: &[&str] = &[
    "DT", "IN", "CC", "TO", "POS", "PRP", "PRP$", "MD", "WDT", "WP", "WRB",
];

pub fn extract_rule(
    sentence: &AnnotatedSentence,
    question: &AnnotatedSentence,
    answer_text: Option<&str>,
) -> Result<TransformationRule> {
    extract_rule_with(Morphology::bundled(), sentence, question, answer_text)
}

/// Learns the edit script turning `sentence` into `question`.
///
/// Tokens are aligned by an LCS over lowercased lemmas; leftover question
/// tokens are then paired with unused sentence tokens of the same lemma,
/// which become moves. The returned rule has id 0 until a store assigns one.
pub fn extract_rule_with(
    morph: &Morphology,
    sentence: &AnnotatedSentence,
    question: &AnnotatedSentence,
    answer_text: Option<&str>,
) -> Result<TransformationRule> {
    if question.tokens().last().map(|t| t.text.as_str()) != Some("?") {
        return Err(Error::UnalignablePair);
    }
    let s_lemmas: Vec<String> = (0..sentence.len())
        .map(|i| sentence.lemma(i).to_lowercase())
        .collect();
    let q_lemmas: Vec<String> = (0..question.len())
        .map(|j| question.lemma(j).to_lowercase())
        .collect();

    let mut q_to_s: Vec<Option<usize>> = vec![None; question.len()];
    let mut s_used = vec![false; sentence.len()];
    for (i, j) in lcs_pairs(&s_lemmas, &q_lemmas, |a, b| a == b) {
        q_to_s[j] = Some(i);
        s_used[i] = true;
    }
    for j in 0..question.len() {
        if q_to_s[j].is_some() || is_punctuation(&question.tokens()[j].text) {
            continue;
        }
        if let Some(i) = (0..sentence.len()).find(|&i| !s_used[i] && s_lemmas[i] == q_lemmas[j]) {
            q_to_s[j] = Some(i);
            s_used[i] = true;
        }
    }
    let shared = q_to_s
        .iter()
        .enumerate()
        .filter(|(j, s)| s.is_some() && !is_punctuation(&question.tokens()[*j].text))
        .count();
    if shared < 2 {
        return Err(Error::UnalignablePair);
    }

    let (start, end) = match answer_text.and_then(|a| locate_answer(sentence, a)) {
        Some(span) => span,
        None => infer_answer(sentence, &s_used).ok_or(Error::NoAnswerSpan)?,
    };
    let answer = AnswerSpanSpec {
        start,
        end,
        guard: choose_guard(sentence, start, end),
    };

    let mut items = Vec::with_capacity(question.len());
    for (j, token) in question.tokens().iter().enumerate() {
        let literal = QuestionItem::Literal(token.text.clone());
        let Some(i) = q_to_s[j] else {
            items.push(literal);
            continue;
        };
        let surface = &sentence.tokens()[i].text;
        let (text, form) = if surface.to_lowercase() == token.text.to_lowercase() {
            (surface.clone(), None)
        } else {
            let tag = question.pos(j);
            let changed = change_form(morph, surface, sentence.lemma(i), tag);
            if changed.to_lowercase() != token.text.to_lowercase() {
                items.push(literal);
                continue;
            }
            (changed, Some(tag.to_string()))
        };
        if case_for_position(&text, j, i == 0, sentence.pos(i)) != token.text {
            items.push(literal);
            continue;
        }
        items.push(QuestionItem::Slot { slot: i, form });
    }

    let edits = edit_script(sentence.len(), &answer, &items);
    let rule = TransformationRule {
        id: 0,
        origin: Origin::Trained,
        sentence_cp: create_cp(sentence),
        question_cp: create_cp(question),
        edits,
        answer,
        application_count: 1,
        success_sum: 1.0,
    };
    let got = rule.replay_on_training(morph)?;
    let want = question.text();
    if got != want {
        return Err(Error::ReplayMismatch { got, want });
    }
    Ok(rule)
}

/// Removes, then form changes, then a left-to-right pass that inserts
/// literals and moves slots into place.
fn edit_script(slot_count: usize, answer: &AnswerSpanSpec, items: &[QuestionItem]) -> Vec<EditOp> {
    let referenced: BTreeSet<usize> = items
        .iter()
        .filter_map(|it| match it {
            QuestionItem::Slot { slot, .. } => Some(*slot),
            QuestionItem::Literal(_) => None,
        })
        .collect();
    let mut edits = Vec::new();
    let mut work: Vec<Option<usize>> = Vec::new(); // None marks an inserted literal
    for slot in 0..slot_count {
        if answer.contains(slot) {
            continue;
        }
        if referenced.contains(&slot) {
            work.push(Some(slot));
        } else {
            edits.push(EditOp::Remove { slot });
        }
    }
    for item in items {
        if let QuestionItem::Slot {
            slot,
            form: Some(tag),
        } = item
        {
            edits.push(EditOp::ChangeForm {
                slot: *slot,
                tag: tag.clone(),
            });
        }
    }
    for (at, item) in items.iter().enumerate() {
        match item {
            QuestionItem::Literal(text) => {
                edits.push(EditOp::Insert {
                    text: text.clone(),
                    at,
                });
                work.insert(at, None);
            }
            QuestionItem::Slot { slot, .. } => {
                if work.get(at) == Some(&Some(*slot)) {
                    continue;
                }
                if let Some(from) = work.iter().position(|w| *w == Some(*slot)) {
                    work.remove(from);
                }
                work.insert(at, Some(*slot));
                edits.push(EditOp::Move { slot: *slot, at });
            }
        }
    }
    edits
}

/// Finds the answer text in the sentence; failing an exact match, the longest
/// run of answer tokens that occurs contiguously and is not all function words.
fn locate_answer(sentence: &AnnotatedSentence, answer: &str) -> Option<(usize, usize)> {
    let wanted: Vec<String> = tokenize(answer)
        .ok()?
        .into_iter()
        .map(|t| t.text.to_lowercase())
        .filter(|t| !matches!(t.as_str(), "." | "?" | "!"))
        .collect();
    let have: Vec<String> = sentence
        .tokens()
        .iter()
        .map(|t| t.text.to_lowercase())
        .collect();
    for len in (1..=wanted.len()).rev() {
        for from in 0..=wanted.len() - len {
            let needle = &wanted[from..from + len];
            let Some(at) = have.windows(len).position(|w| w == needle) else {
                continue;
            };
            let content = (at..at + len).any(|i| {
                let pos = sentence.pos(i);
                !FUNCTION_TAGS.contains(&pos) && !is_punctuation(&sentence.tokens()[i].text)
            });
            if content {
                return Some((at, at + len - 1));
            }
        }
    }
    None
}

fn longest_run(n: usize, ok: impl Fn(usize) -> bool) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < n {
        if !ok(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && ok(i) {
            i += 1;
        }
        if best.is_none_or(|(s, e)| i - start > e + 1 - s) {
            best = Some((start, i - 1));
        }
    }
    best
}

fn infer_answer(sentence: &AnnotatedSentence, used: &[bool]) -> Option<(usize, usize)> {
    let n = sentence.len();
    let entity = |i: usize| {
        !used[i]
            && (!sentence.cell(LayerId::Ner, i).is_empty()
                || !sentence.cell(LayerId::Gkg, i).is_empty())
    };
    longest_run(n, entity)
        .or_else(|| longest_run(n, |i| !used[i] && sentence.pos(i).starts_with("NN")))
}

/// Guard label from the span's strongest semantic layer (Ner, then Gkg, then
/// Sst). When Ner and Gkg both label the span but disagree, the finer Gkg
/// label is used.
fn choose_guard(sentence: &AnnotatedSentence, start: usize, end: usize) -> Option<Guard> {
    let first_label = |layer: LayerId| {
        (start..=end).find_map(|i| sentence.cell(layer, i).first().map(str::to_string))
    };
    let union = |layer: LayerId| {
        (start..=end)
            .flat_map(|i| {
                sentence
                    .cell(layer, i)
                    .iter()
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            })
            .collect::<BTreeSet<String>>()
    };
    let ner = union(LayerId::Ner);
    let gkg = union(LayerId::Gkg);
    let layer = if !ner.is_empty() && !gkg.is_empty() && ner.is_disjoint(&gkg) {
        LayerId::Gkg
    } else if !ner.is_empty() {
        LayerId::Ner
    } else if !gkg.is_empty() {
        LayerId::Gkg
    } else {
        LayerId::Sst
    };
    first_label(layer).map(|label| Guard { layer, label })
}
