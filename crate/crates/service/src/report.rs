use std::collections::{BTreeMap, HashMap};

use qgen_core::metrics::{irr_binary, irr_numeric, ratings_by_question};
use qgen_core::score::{effective_ratings, Rating};
use qgen_core::QuestionRecord;
use serde::{Deserialize, Serialize};

/// Label for questions that carry no system name.
pub const DEFAULT_SYSTEM: &str = "qgen";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub system: String,
    pub questions: usize,
    pub rated_questions: usize,
    pub ratings: usize,
    /// Mean of (syntax + semantics) / 2 over all ratings.
    pub avg_score: f64,
    pub syntax_score: f64,
    pub semantics_score: f64,
    /// Rated questions whose mean rating reaches the threshold.
    pub correct_questions: usize,
    pub correctness_pct: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub systems: Vec<SystemReport>,
    pub irr_binary: Option<f64>,
    pub irr_numeric: Option<f64>,
}

fn mean(sum: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Aggregates the effective ratings per system label. Depends only on the
/// question pool and the log.
pub fn build_report(
    questions: &[QuestionRecord],
    log: &[Rating],
    correct_threshold: f64,
) -> Report {
    let system_of: HashMap<&str, &str> = questions
        .iter()
        .map(|q| (q.id.as_str(), q.system.as_deref().unwrap_or(DEFAULT_SYSTEM)))
        .collect();
    let mut systems: BTreeMap<&str, SystemReport> = BTreeMap::new();
    for q in questions {
        let sys = q.system.as_deref().unwrap_or(DEFAULT_SYSTEM);
        systems.entry(sys).or_default().questions += 1;
    }
    if systems.is_empty() {
        systems.insert(DEFAULT_SYSTEM, SystemReport::default());
    }

    // (sum of values, sum of syntax, sum of semantics) per system, and per-question values.
    let mut sums: HashMap<&str, (f64, f64, f64)> = HashMap::new();
    let mut per_question: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in effective_ratings(log) {
        let (Some(sys), Some(value)) = (system_of.get(r.question_id.as_str()), r.value()) else {
            continue;
        };
        let entry = sums.entry(sys).or_default();
        entry.0 += value;
        entry.1 += r.syntax.unwrap_or(0.0);
        entry.2 += r.semantics.unwrap_or(0.0);
        systems.get_mut(sys).expect("system registered").ratings += 1;
        per_question
            .entry(r.question_id.as_str())
            .or_default()
            .push(value);
    }
    for (qid, values) in &per_question {
        let sys = systems.get_mut(system_of[qid]).expect("system registered");
        sys.rated_questions += 1;
        if mean(values.iter().sum(), values.len()) >= correct_threshold {
            sys.correct_questions += 1;
        }
    }
    for (name, sys) in systems.iter_mut() {
        sys.system = name.to_string();
        let (v, syn, sem) = sums.get(name).copied().unwrap_or_default();
        sys.avg_score = mean(v, sys.ratings);
        sys.syntax_score = mean(syn, sys.ratings);
        sys.semantics_score = mean(sem, sys.ratings);
        sys.correctness_pct = 100.0 * mean(sys.correct_questions as f64, sys.rated_questions);
    }
    let by_q = ratings_by_question(log);
    Report {
        systems: systems.into_values().collect(),
        irr_binary: irr_binary(&by_q),
        irr_numeric: irr_numeric(&by_q),
    }
}
