//! HTTP rating service: hands out generated questions to raters, records
//! their ratings in an append-only CSV log, folds them into rule statistics
//! and reports aggregates per generating system.
//!
//! The log is the source of truth. A resubmission by the same rater for the
//! same question replaces the earlier rating, and rule statistics are then
//! rebuilt from the log.

mod report;

use std::collections::{HashMap, HashSet};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use qgen_core::rules::{save_store, RuleStore};
use qgen_core::score::{
    append_rating, apply_feedback, effective_ratings, load_ratings, replay_feedback, Rating,
};
use qgen_core::QuestionRecord;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

pub use report::{build_report, Report, SystemReport, DEFAULT_SYSTEM};

pub const DEFAULT_BATCH: usize = 5;
pub const MAX_BATCH: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown question {0:?}")]
    UnknownQuestion(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::UnknownQuestion(_) => StatusCode::NOT_FOUND,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (
            status,
            Json(serde_json::json!({ "error": self.to_string() })),
        )
            .into_response()
    }
}

impl From<qgen_core::Error> for ApiError {
    fn from(e: qgen_core::Error) -> Self {
        match e {
            qgen_core::Error::InvalidRating(m) => ApiError::BadRequest(m),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ServiceOptions {
    pub ratings_path: PathBuf,
    /// Where to persist the store after each rating; `None` keeps it in memory.
    pub store_path: Option<PathBuf>,
    /// Seed for the serving order; `None` seeds from the OS.
    pub seed: Option<u64>,
    /// Mean rating from which a question counts as correct.
    pub correct_threshold: f64,
    /// A question is no longer offered once it has this many ratings.
    pub max_votes: usize,
}

impl ServiceOptions {
    pub fn new(ratings_path: impl Into<PathBuf>) -> Self {
        ServiceOptions {
            ratings_path: ratings_path.into(),
            store_path: None,
            seed: None,
            correct_threshold: 0.75,
            max_votes: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServedQuestion {
    pub question_id: String,
    pub sentence: String,
    pub question: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RatingRequest {
    pub question_id: String,
    pub rater_id: String,
    #[serde(default)]
    pub syntax: Option<f64>,
    #[serde(default)]
    pub semantics: Option<f64>,
    #[serde(default)]
    pub skipped: bool,
    #[serde(default)]
    pub correction: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingAck {
    pub question_id: String,
    pub rater_id: String,
    /// True when an earlier rating by the same rater was replaced.
    pub replaced: bool,
    /// Success rate of the owning rule after the update, if it is loaded.
    pub rule_success_rate: Option<f64>,
}

struct Pool {
    questions: Vec<QuestionRecord>,
    index: HashMap<String, usize>,
    log: Vec<Rating>,
    store: Option<RuleStore>,
}

impl Pool {
    fn rule_of(&self, question_id: &str) -> Option<u64> {
        self.index
            .get(question_id)
            .map(|&i| self.questions[i].rule_id)
    }
}

pub struct Service {
    pool: RwLock<Pool>,
    rng: Mutex<StdRng>,
    options: ServiceOptions,
}

/// Reads a questions JSON-lines file.
pub fn load_questions(path: &Path) -> qgen_core::Result<Vec<QuestionRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: QuestionRecord =
            serde_json::from_str(line).map_err(|e| qgen_core::Error::Format {
                source_name: path.display().to_string(),
                line: n + 1,
                message: e.to_string(),
            })?;
        out.push(record);
    }
    Ok(out)
}

impl Service {
    /// Loads the existing ratings log and rebuilds the store statistics from it.
    pub fn new(
        questions: Vec<QuestionRecord>,
        store: Option<RuleStore>,
        options: ServiceOptions,
    ) -> qgen_core::Result<Self> {
        let mut index = HashMap::new();
        for (i, q) in questions.iter().enumerate() {
            if index.insert(q.id.clone(), i).is_some() {
                return Err(qgen_core::Error::DuplicateSourceId(q.id.clone()));
            }
        }
        let log = load_ratings(&options.ratings_path)?;
        let mut pool = Pool {
            questions,
            index,
            log,
            store,
        };
        if let Some(store) = pool.store.as_mut() {
            let index = &pool.index;
            let questions = &pool.questions;
            replay_feedback(store, &pool.log, |q| {
                index.get(q).map(|&i| questions[i].rule_id)
            })?;
        }
        let rng = match options.seed {
            Some(seed) => StdRng::seed_from_u64(seed),
            None => StdRng::from_os_rng(),
        };
        Ok(Service {
            pool: RwLock::new(pool),
            rng: Mutex::new(rng),
            options,
        })
    }

    /// Up to `n` questions the rater has not answered yet, fewest ratings
    /// first, random among equals. Questions at the vote cap are withheld.
    pub async fn next_questions(&self, rater_id: &str, n: usize) -> Vec<ServedQuestion> {
        let pool = self.pool.read().await;
        let mut votes: HashMap<&str, usize> = HashMap::new();
        let mut seen: HashSet<&str> = HashSet::new();
        for r in effective_ratings(&pool.log) {
            if r.rater_id == rater_id {
                seen.insert(&r.question_id);
            }
            if !r.skipped {
                *votes.entry(r.question_id.as_str()).or_default() += 1;
            }
        }
        let mut open: Vec<(usize, &QuestionRecord)> = pool
            .questions
            .iter()
            .filter(|q| !seen.contains(q.id.as_str()))
            .map(|q| (votes.get(q.id.as_str()).copied().unwrap_or(0), q))
            .filter(|(v, _)| *v < self.options.max_votes)
            .collect();
        open.shuffle(&mut *self.rng.lock().expect("rng lock"));
        open.sort_by_key(|(v, _)| *v);
        open.into_iter()
            .take(n)
            .map(|(_, q)| ServedQuestion {
                question_id: q.id.clone(),
                sentence: q.sentence.clone(),
                question: q.question.clone(),
            })
            .collect()
    }

    /// Validates, logs and applies one rating.
    pub async fn submit(&self, req: RatingRequest) -> Result<RatingAck, ApiError> {
        let rating = Rating {
            question_id: req.question_id,
            rater_id: req.rater_id,
            syntax: req.syntax,
            semantics: req.semantics,
            skipped: req.skipped,
            correction: req.correction.filter(|c| !c.is_empty()),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        };
        rating.validate()?;
        let mut pool = self.pool.write().await;
        let Some(rule_id) = pool.rule_of(&rating.question_id) else {
            return Err(ApiError::UnknownQuestion(rating.question_id));
        };
        let replaced = pool
            .log
            .iter()
            .any(|r| r.rater_id == rating.rater_id && r.question_id == rating.question_id);
        append_rating(&self.options.ratings_path, &rating)?;
        pool.log.push(rating.clone());

        let pool = &mut *pool;
        let mut rule_success_rate = None;
        if let Some(store) = pool.store.as_mut() {
            if store.get(rule_id).is_none() {
                log::warn!(
                    "question {} refers to rule {rule_id}, which is not in the store",
                    rating.question_id
                );
            } else {
                if replaced {
                    let (index, questions) = (&pool.index, &pool.questions);
                    replay_feedback(store, &pool.log, |q| {
                        index.get(q).map(|&i| questions[i].rule_id)
                    })?;
                } else {
                    apply_feedback(store, &rating, rule_id)?;
                }
                rule_success_rate = store.get(rule_id).map(|r| r.success_rate());
                if let Some(path) = &self.options.store_path {
                    save_store(store, path)?;
                }
            }
        }
        Ok(RatingAck {
            question_id: rating.question_id,
            rater_id: rating.rater_id,
            replaced,
            rule_success_rate,
        })
    }

    pub async fn report(&self) -> Report {
        let pool = self.pool.read().await;
        build_report(&pool.questions, &pool.log, self.options.correct_threshold)
    }

    /// Copy of the current rule store, if one is loaded.
    pub async fn store(&self) -> Option<RuleStore> {
        self.pool.read().await.store.clone()
    }

    pub async fn log_len(&self) -> usize {
        self.pool.read().await.log.len()
    }
}

#[derive(Debug, Deserialize)]
struct QuestionsQuery {
    rater: String,
    n: Option<usize>,
}

async fn questions(
    State(svc): State<Arc<Service>>,
    query: Result<Query<QuestionsQuery>, QueryRejection>,
) -> Result<Json<Vec<ServedQuestion>>, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    if q.rater.trim().is_empty() {
        return Err(ApiError::BadRequest("rater must not be empty".into()));
    }
    let n = q.n.unwrap_or(DEFAULT_BATCH).min(MAX_BATCH);
    Ok(Json(svc.next_questions(&q.rater, n).await))
}

async fn ratings(
    State(svc): State<Arc<Service>>,
    body: Result<Json<RatingRequest>, JsonRejection>,
) -> Result<Json<RatingAck>, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    svc.submit(req).await.map(Json)
}

async fn report(State(svc): State<Arc<Service>>) -> Json<Report> {
    Json(svc.report().await)
}

async fn health(State(svc): State<Arc<Service>>) -> Json<serde_json::Value> {
    let pool = svc.pool.read().await;
    Json(serde_json::json!({
        "status": "ok",
        "questions": pool.questions.len(),
        "ratings": pool.log.len(),
    }))
}

pub fn router(svc: Arc<Service>) -> Router {
    Router::new()
        .route("/api/questions", get(questions))
        .route("/api/ratings", post(ratings))
        .route("/api/report", get(report))
        .route("/api/health", get(health))
        .with_state(svc)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(svc: Arc<Service>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(svc)).await
}
