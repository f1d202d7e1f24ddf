use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{extract_rule_with, RuleStore};
use crate::annotate::Annotator;
use crate::error::{Error, Result};
use crate::morph::Morphology;

/// One line of a training file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair {
    #[serde(default)]
    pub id: Option<String>,
    pub sentence: String,
    pub question: String,
    #[serde(default)]
    pub answer: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    pub pairs: usize,
    pub added: usize,
    pub duplicates: usize,
    /// (pair id, reason) for every pair that yielded no rule.
    pub failures: Vec<(String, String)>,
}

pub fn parse_pairs(text: &str, source_name: &str) -> Result<Vec<TrainingPair>> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut pair: TrainingPair = serde_json::from_str(line)
            .map_err(|e| Error::format(source_name, n + 1, e.to_string()))?;
        if pair.id.is_none() {
            pair.id = Some(format!("line{}", n + 1));
        }
        pairs.push(pair);
    }
    Ok(pairs)
}

pub fn load_pairs(path: &Path) -> Result<Vec<TrainingPair>> {
    parse_pairs(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// Trains a fresh store. Individual pair failures are reported, not fatal;
/// a dataset that yields no rule at all is an error.
pub fn train(pairs: &[TrainingPair], annotator: &Annotator) -> Result<(RuleStore, TrainReport)> {
    let mut store = RuleStore::new();
    let report = train_with(&mut store, pairs, annotator, Morphology::bundled());
    if store.is_empty() {
        return Err(Error::NoRulesExtracted { pairs: pairs.len() });
    }
    Ok((store, report))
}

/// Extracts a rule from every pair and adds the new ones to `store`, in input order.
pub fn train_with(
    store: &mut RuleStore,
    pairs: &[TrainingPair],
    annotator: &Annotator,
    morph: &Morphology,
) -> TrainReport {
    let mut report = TrainReport {
        pairs: pairs.len(),
        ..TrainReport::default()
    };
    for (n, pair) in pairs.iter().enumerate() {
        let id = pair.id.clone().unwrap_or_else(|| format!("pair{n}"));
        let extracted = annotator
            .annotate(&id, &pair.sentence)
            .and_then(|sentence| {
                let question = annotator.annotate(&format!("{id}?"), &pair.question)?;
                extract_rule_with(morph, &sentence, &question, pair.answer.as_deref())
            });
        match extracted {
            Ok(rule) => match store.insert(rule) {
                Some(_) => report.added += 1,
                None => report.duplicates += 1,
            },
            Err(e) => {
                log::warn!("pair {id}: {e}");
                report.failures.push((id, e.to_string()));
            }
        }
    }
    report
}
