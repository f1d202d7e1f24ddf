//! Tunables shared by the command line and the service.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{DEFAULT_MAX_RULES_PER_SENTENCE, DEFAULT_MIN_SIMILARITY};
use crate::score::{DEFAULT_DEDUP_THRESHOLD, DEFAULT_MIN_SCORE};

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub min_similarity: f64,
    pub min_score: f64,
    /// Cap on rules tried per sentence and on questions kept per sentence.
    pub max_per_sentence: usize,
    pub dedup_threshold: f64,
    /// Extra morphology table merged over the bundled one.
    pub morphology_path: Option<PathBuf>,
    pub port: u16,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            min_similarity: DEFAULT_MIN_SIMILARITY,
            min_score: DEFAULT_MIN_SCORE,
            max_per_sentence: DEFAULT_MAX_RULES_PER_SENTENCE,
            dedup_threshold: DEFAULT_DEDUP_THRESHOLD,
            morphology_path: None,
            port: DEFAULT_PORT,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be within [0, 1], got {v}"
                )))
            }
        };
        unit("min_similarity", self.min_similarity)?;
        unit("min_score", self.min_score)?;
        unit("dedup_threshold", self.dedup_threshold)?;
        if self.dedup_threshold == 0.0 {
            return Err(Error::InvalidArgument(
                "dedup_threshold must be above 0".into(),
            ));
        }
        if self.max_per_sentence == 0 {
            return Err(Error::InvalidArgument(
                "max_per_sentence must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
