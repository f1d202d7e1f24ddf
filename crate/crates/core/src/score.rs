//! Candidate scoring, rewards, feedback, deduplication and ranking.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::OpenOptions;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotate::LayerId;
use crate::error::{Error, Result};
use crate::generate::QuestionCandidate;
use crate::pattern::{similarity, CompositePattern};
use crate::rules::{RuleId, RuleStore, TransformationRule};

/// Multiplier applied when an answer token carries disagreeing Ner and Gkg labels.
pub const DISAGREEMENT_PENALTY: f64 = 0.5;
pub const DEFAULT_DEDUP_THRESHOLD: f64 = 0.9;
pub const DEFAULT_MIN_SCORE: f64 = 0.75;

/// One human judgement of a generated question.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub question_id: String,
    pub rater_id: String,
    pub syntax: Option<f64>,
    pub semantics: Option<f64>,
    pub skipped: bool,
    pub correction: Option<String>,
    pub timestamp: String,
}

fn on_scale(v: f64) -> bool {
    v == 0.0 || v == 0.5 || v == 1.0
}

impl Rating {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRating(m));
        if self.question_id.is_empty() || self.rater_id.is_empty() {
            return bad("question_id and rater_id are required".into());
        }
        match (self.skipped, self.syntax, self.semantics) {
            (true, None, None) => Ok(()),
            (true, _, _) => bad("a skipped rating carries no values".into()),
            (false, Some(a), Some(b)) if on_scale(a) && on_scale(b) => Ok(()),
            (false, Some(_), Some(_)) => bad("values must be 0, 0.5 or 1".into()),
            (false, _, _) => bad("syntax and semantics are required unless skipped".into()),
        }
    }

    /// Mean of syntax and semantics, `None` for skipped ratings.
    pub fn value(&self) -> Option<f64> {
        match (self.skipped, self.syntax, self.semantics) {
            (false, Some(a), Some(b)) => Some((a + b) / 2.0),
            _ => None,
        }
    }
}

pub fn parse_ratings(text: &str, source_name: &str) -> Result<Vec<Rating>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize::<Rating>() {
        let rating = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::format(source_name, line, e.to_string())
        })?;
        rating
            .validate()
            .map_err(|e| Error::format(source_name, out.len() + 2, e.to_string()))?;
        out.push(rating);
    }
    Ok(out)
}

/// Reads a ratings log; a missing file is an empty log.
pub fn load_ratings(path: &Path) -> Result<Vec<Rating>> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_ratings(&text, &path.display().to_string()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

/// Appends one rating, writing the header first if the log is new or empty.
pub fn append_rating(path: &Path, rating: &Rating) -> Result<()> {
    rating.validate()?;
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    writer.serialize(rating)?;
    writer.flush()?;
    Ok(())
}

pub fn write_ratings(ratings: &[Rating]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in ratings {
        writer.serialize(r)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScoreBreakdown {
    pub sent_sim: f64,
    pub quest_sim: f64,
    pub application_rate: f64,
    pub success_rate: f64,
    /// True when the disagreement penalty was applied.
    pub penalized: bool,
    pub product: f64,
}

pub fn estimate_score(
    candidate: &QuestionCandidate,
    rule: &TransformationRule,
    store: &RuleStore,
) -> ScoreBreakdown {
    let sent_sim = candidate.match_.score;
    let quest_sim = similarity(&candidate.question_cp, &rule.question_cp).score;
    let application_rate =
        (rule.application_count as f64 / store.max_application_count() as f64).min(1.0);
    let success_rate = rule.success_rate();
    let penalized = candidate
        .answer_entities
        .iter()
        .any(|(ner, gkg)| !ner.is_empty() && !gkg.is_empty() && !ner.intersects(gkg));
    let mut product = sent_sim * quest_sim * application_rate * success_rate;
    if penalized {
        product *= DISAGREEMENT_PENALTY;
    }
    ScoreBreakdown {
        sent_sim,
        quest_sim,
        application_rate,
        success_rate,
        penalized,
        product,
    }
}

/// Fills `estimated_score` on every candidate.
pub fn score_candidates(candidates: &mut [QuestionCandidate], store: &RuleStore) -> Result<()> {
    for c in candidates {
        let rule = store.get(c.rule_id).ok_or(Error::UnknownRule(c.rule_id))?;
        c.estimated_score = estimate_score(c, rule, store).product;
    }
    Ok(())
}

fn lemma_key(cp: &CompositePattern) -> String {
    cp.key(LayerId::Lemma).key.to_lowercase()
}

/// Lemma keys of the questions seen in training.
#[derive(Clone, Debug, Default)]
pub struct TrainingQuestions(HashSet<String>);

impl TrainingQuestions {
    pub fn new<'a>(questions: impl IntoIterator<Item = &'a CompositePattern>) -> Self {
        TrainingQuestions(questions.into_iter().map(lemma_key).collect())
    }

    pub fn from_store(store: &RuleStore) -> Self {
        Self::new(store.rules().map(|r| &r.question_cp))
    }

    pub fn contains(&self, cp: &CompositePattern) -> bool {
        self.0.contains(&lemma_key(cp))
    }
}

pub fn reward_with_score(
    question_cp: &CompositePattern,
    rule_question: &CompositePattern,
    rule_score: f64,
    training: &TrainingQuestions,
) -> f64 {
    if training.contains(question_cp) {
        1.0
    } else {
        similarity(question_cp, rule_question).score * rule_score
    }
}

/// 1 for a question known from training, otherwise similarity to the rule's
/// own question times the rule's success rate.
pub fn reward(
    question_cp: &CompositePattern,
    rule: &TransformationRule,
    training: &TrainingQuestions,
) -> f64 {
    reward_with_score(
        question_cp,
        &rule.question_cp,
        rule.success_rate(),
        training,
    )
}

/// Folds one rating into its rule's statistics. Returns false for skipped ratings.
pub fn apply_feedback(store: &mut RuleStore, rating: &Rating, rule_id: RuleId) -> Result<bool> {
    rating.validate()?;
    if store.get(rule_id).is_none() {
        return Err(Error::UnknownRule(rule_id));
    }
    match rating.value() {
        Some(v) => {
            store.record_application(rule_id, v)?;
            Ok(true)
        }
        None => Ok(false),
    }
}

/// Latest rating per (rater, question), in order of that latest submission.
pub fn effective_ratings(log: &[Rating]) -> Vec<&Rating> {
    let mut last: HashMap<(&str, &str), usize> = HashMap::new();
    for (i, r) in log.iter().enumerate() {
        last.insert((r.rater_id.as_str(), r.question_id.as_str()), i);
    }
    let mut keep: Vec<usize> = last.into_values().collect();
    keep.sort_unstable();
    keep.into_iter().map(|i| &log[i]).collect()
}

/// Rebuilds rule statistics from a ratings log: baseline, then the latest
/// rating of each rater for each question. Ratings of unknown questions are
/// skipped with a warning. Returns the number of applied ratings.
pub fn replay_feedback(
    store: &mut RuleStore,
    log: &[Rating],
    rule_of: impl Fn(&str) -> Option<RuleId>,
) -> Result<usize> {
    store.reset_statistics();
    let mut applied = 0;
    for r in effective_ratings(log) {
        let Some(rule_id) = rule_of(&r.question_id) else {
            log::warn!("rating for unknown question {}", r.question_id);
            continue;
        };
        if apply_feedback(store, r, rule_id)? {
            applied += 1;
        }
    }
    Ok(applied)
}

fn by_score(a: &QuestionCandidate, b: &QuestionCandidate) -> Ordering {
    b.estimated_score
        .total_cmp(&a.estimated_score)
        .then(a.rule_id.cmp(&b.rule_id))
        .then_with(|| a.source_id.cmp(&b.source_id))
}

/// Keeps the best-scored of any group of near-identical questions.
pub fn dedup(candidates: Vec<QuestionCandidate>, threshold: f64) -> Vec<QuestionCandidate> {
    let mut sorted = candidates;
    sorted.sort_by(by_score);
    let mut kept: Vec<QuestionCandidate> = Vec::new();
    let mut texts: HashSet<String> = HashSet::new();
    for c in sorted {
        if texts.contains(&c.text)
            || kept
                .iter()
                .any(|k| similarity(&k.question_cp, &c.question_cp).score >= threshold)
        {
            continue;
        }
        texts.insert(c.text.clone());
        kept.push(c);
    }
    kept
}

/// Sorts by score, drops those below `min_score` and keeps at most `cap` per source.
pub fn rank_and_filter(
    candidates: Vec<QuestionCandidate>,
    min_score: f64,
    cap: usize,
) -> Vec<QuestionCandidate> {
    let mut sorted = candidates;
    sorted.sort_by(by_score);
    let mut per_source: BTreeMap<String, usize> = BTreeMap::new();
    sorted
        .into_iter()
        .filter(|c| c.estimated_score >= min_score)
        .filter(|c| {
            let n = per_source.entry(c.source_id.clone()).or_default();
            *n += 1;
            *n <= cap
        })
        .collect()
}
