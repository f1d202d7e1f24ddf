//! Data-driven question generation: annotate sentences, learn transformation
//! rules from sentence/question pairs, generate and score new questions, and
//! evaluate them against references and human ratings.

pub mod annotate;
pub mod config;
pub mod error;
pub mod generate;
mod lcs;
pub mod metrics;
pub mod morph;
pub mod pattern;
mod pipeline;
pub mod rules;
pub mod score;
pub mod simplify;

pub use annotate::{simplify_pos, AnnotatedSentence, Annotator, LayerId};
pub use config::Config;
pub use error::{Error, Result};
pub use generate::{generate_questions, QuestionCandidate, QuestionRecord};
pub use morph::Morphology;
pub use pattern::{create_cp, similarity, CompositePattern};
pub use pipeline::generate_ranked;
pub use rules::{RuleStore, TransformationRule};
