use crate::annotate::AnnotatedSentence;
use crate::config::Config;
use crate::error::Result;
use crate::generate::{generate_questions_with, QuestionCandidate};
use crate::morph::Morphology;
use crate::rules::RuleStore;
use crate::score::{dedup, rank_and_filter, score_candidates};

/// Generate, score, deduplicate, then rank and filter.
pub fn generate_ranked(
    morph: &Morphology,
    sentences: &[AnnotatedSentence],
    store: &RuleStore,
    config: &Config,
) -> Result<Vec<QuestionCandidate>> {
    config.validate()?;
    let mut candidates = generate_questions_with(
        morph,
        sentences,
        store,
        config.min_similarity,
        config.max_per_sentence,
    )?;
    score_candidates(&mut candidates, store)?;
    let kept = dedup(candidates, config.dedup_threshold);
    Ok(rank_and_filter(
        kept,
        config.min_score,
        config.max_per_sentence,
    ))
}
