use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EditOp, Origin, RuleId, TransformationRule};
use crate::annotate::LayerId;
use crate::error::{Error, Result};
use crate::pattern::{CompositePattern, PatternHierarchy, SimilarityBreakdown};

pub const STORE_VERSION: u32 = 1;

type DedupKey = (String, String, Vec<EditOp>);

fn dedup_key(rule: &TransformationRule) -> DedupKey {
    (
        rule.sentence_cp.key(LayerId::Pos).key,
        rule.question_cp.key(LayerId::Pos).key,
        rule.edits.clone(),
    )
}

/// All learned rules, their hierarchy index and a uniqueness index.
#[derive(Clone, Debug, Default)]
pub struct RuleStore {
    next_id: RuleId,
    rules: BTreeMap<RuleId, TransformationRule>,
    hierarchy: PatternHierarchy,
    unique: HashMap<DedupKey, RuleId>,
}

impl PartialEq for RuleStore {
    fn eq(&self, other: &Self) -> bool {
        self.next_id == other.next_id && self.rules == other.rules
    }
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    version: u32,
    next_id: RuleId,
    rules: Vec<TransformationRule>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

impl RuleStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a rule unless an identical one (same sentence Pos key, question
    /// Pos key and edit script) exists. Returns the new id, or `None` for a
    /// duplicate. Statistics are reset to the origin's baseline.
    pub fn insert(&mut self, mut rule: TransformationRule) -> Option<RuleId> {
        let key = dedup_key(&rule);
        if self.unique.contains_key(&key) {
            return None;
        }
        let id = self.next_id;
        self.next_id += 1;
        rule.id = id;
        (rule.application_count, rule.success_sum) = rule.origin.baseline();
        self.index(rule, key);
        Some(id)
    }

    fn index(&mut self, rule: TransformationRule, key: DedupKey) {
        self.hierarchy.insert(&rule.sentence_cp, rule.id);
        self.unique.insert(key, rule.id);
        self.rules.insert(rule.id, rule);
    }

    pub fn get(&self, id: RuleId) -> Option<&TransformationRule> {
        self.rules.get(&id)
    }

    pub fn rules(&self) -> impl Iterator<Item = &TransformationRule> {
        self.rules.values()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn next_id(&self) -> RuleId {
        self.next_id
    }

    pub fn hierarchy(&self) -> &PatternHierarchy {
        &self.hierarchy
    }

    pub fn lookup(
        &self,
        cp: &CompositePattern,
        min_similarity: f64,
        max_results: usize,
    ) -> Vec<(RuleId, SimilarityBreakdown)> {
        self.hierarchy.lookup(cp, min_similarity, max_results)
    }

    /// Largest application count in the store, at least 1.
    pub fn max_application_count(&self) -> u64 {
        self.rules
            .values()
            .map(|r| r.application_count)
            .max()
            .unwrap_or(0)
            .max(1)
    }

    /// Adds one application with the given success value (0 to 1).
    pub fn record_application(&mut self, id: RuleId, success: f64) -> Result<()> {
        let rule = self.rules.get_mut(&id).ok_or(Error::UnknownRule(id))?;
        rule.application_count += 1;
        rule.success_sum += success;
        Ok(())
    }

    /// Overwrites the statistics pair of one rule.
    pub fn set_statistics(
        &mut self,
        id: RuleId,
        application_count: u64,
        success_sum: f64,
    ) -> Result<()> {
        let rule = self.rules.get_mut(&id).ok_or(Error::UnknownRule(id))?;
        rule.application_count = application_count;
        rule.success_sum = success_sum;
        Ok(())
    }

    /// Puts every rule back to its origin baseline.
    pub fn reset_statistics(&mut self) {
        for rule in self.rules.values_mut() {
            (rule.application_count, rule.success_sum) = rule.origin.baseline();
        }
    }

    /// Registers a copy of an existing rule under a fresh id, bypassing
    /// deduplication. Used to compare rules that differ only in feedback.
    pub fn clone_rule(&mut self, id: RuleId, origin: Origin) -> Result<RuleId> {
        let mut rule = self.rules.get(&id).ok_or(Error::UnknownRule(id))?.clone();
        rule.id = self.next_id;
        rule.origin = origin;
        (rule.application_count, rule.success_sum) = origin.baseline();
        self.next_id += 1;
        let new_id = rule.id;
        self.hierarchy.insert(&rule.sentence_cp, new_id);
        self.rules.insert(new_id, rule);
        Ok(new_id)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = StoreFile {
            version: STORE_VERSION,
            next_id: self.next_id,
            rules: self.rules.values().cloned().collect(),
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let corrupt = |e: serde_json::Error| Error::CorruptStore {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        };
        let probe: VersionProbe = serde_json::from_str(text).map_err(corrupt)?;
        if probe.version != STORE_VERSION {
            return Err(Error::StoreVersion {
                found: probe.version,
                expected: STORE_VERSION,
            });
        }
        let file: StoreFile = serde_json::from_str(text).map_err(corrupt)?;
        let mut store = RuleStore::new();
        for rule in file.rules {
            if rule.id >= file.next_id || store.rules.contains_key(&rule.id) {
                return Err(Error::CorruptStore {
                    line: 0,
                    column: 0,
                    message: format!(
                        "rule id {} duplicated or not below next_id {}",
                        rule.id, file.next_id
                    ),
                });
            }
            let key = dedup_key(&rule);
            store.index(rule, key);
        }
        store.next_id = file.next_id;
        Ok(store)
    }
}

/// Writes the store atomically (temp file, then rename).
pub fn save_store(store: &RuleStore, path: &Path) -> Result<()> {
    let text = store.to_json()?;
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(tmp.as_file_mut(), text.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn load_store(path: &Path) -> Result<RuleStore> {
    RuleStore::from_json(&std::fs::read_to_string(path)?)
}
