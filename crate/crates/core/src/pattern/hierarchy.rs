use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{cmp_fraction, row_match, similarity, CompositePattern, SimilarityBreakdown};
use crate::annotate::{LabelSet, LayerId};
use crate::rules::RuleId;

#[derive(Clone, Debug)]
struct Entry {
    cp: CompositePattern,
    sparse: [usize; 4],
}

impl Entry {
    fn new(cp: CompositePattern) -> Self {
        let sparse = LayerId::SEMANTIC.map(|l| cp.filled(l));
        Entry { cp, sparse }
    }
}

#[derive(Clone, Debug)]
struct Node {
    simple_row: Vec<LabelSet>,
    children: BTreeMap<String, BTreeMap<RuleId, Entry>>,
}

/// Two-level index: PosSimple key, then Pos key, then rule ids.
#[derive(Clone, Debug, Default)]
pub struct PatternHierarchy {
    roots: BTreeMap<String, Node>,
}

fn rank(a: &(RuleId, SimilarityBreakdown), b: &(RuleId, SimilarityBreakdown)) -> Ordering {
    b.1.cmp_score(&a.1).then(a.0.cmp(&b.0))
}

impl PatternHierarchy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `rule_id` under the pattern's PosSimple and Pos keys.
    /// Returns false (and warns) when the pair is already present.
    pub fn insert(&mut self, cp: &CompositePattern, rule_id: RuleId) -> bool {
        let root_key = cp.key(LayerId::PosSimple).key;
        let leaf_key = cp.key(LayerId::Pos).key;
        let node = self.roots.entry(root_key).or_insert_with(|| Node {
            simple_row: cp.row(LayerId::PosSimple).to_vec(),
            children: BTreeMap::new(),
        });
        let group = node.children.entry(leaf_key.clone()).or_default();
        if group.contains_key(&rule_id) {
            log::warn!("rule {rule_id} already indexed under {leaf_key:?}");
            return false;
        }
        group.insert(rule_id, Entry::new(cp.clone()));
        true
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of indexed rule entries.
    pub fn len(&self) -> usize {
        self.roots
            .values()
            .flat_map(|n| n.children.values())
            .map(BTreeMap::len)
            .sum()
    }

    pub fn root_keys(&self) -> impl Iterator<Item = &str> {
        self.roots.keys().map(String::as_str)
    }

    pub fn child_keys(&self, root: &str) -> Vec<&str> {
        self.roots
            .get(root)
            .map(|n| n.children.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn rules_at(&self, root: &str, child: &str) -> Vec<RuleId> {
        self.roots
            .get(root)
            .and_then(|n| n.children.get(child))
            .map(|g| g.keys().copied().collect())
            .unwrap_or_default()
    }

    fn entries(&self) -> impl Iterator<Item = (RuleId, &CompositePattern)> {
        self.roots
            .values()
            .flat_map(|n| n.children.values())
            .flat_map(|g| g.iter().map(|(id, e)| (*id, &e.cp)))
    }

    /// Rules ranked by similarity to `cp`, best first, ties by lower id.
    ///
    /// Stage one scores every rule under the exact PosSimple root. Stage two
    /// visits the remaining roots by PosSimple agreement and skips any rule
    /// whose similarity upper bound cannot reach the result list, so the
    /// output equals a full scan.
    pub fn lookup(
        &self,
        cp: &CompositePattern,
        min_similarity: f64,
        max_results: usize,
    ) -> Vec<(RuleId, SimilarityBreakdown)> {
        let max_results = max_results.max(1);
        let root_key = cp.key(LayerId::PosSimple).key;
        let mut results: Vec<(RuleId, SimilarityBreakdown)> = Vec::new();

        if let Some(node) = self.roots.get(&root_key) {
            for group in node.children.values() {
                for (&id, entry) in group {
                    let sim = similarity(cp, &entry.cp);
                    if sim.score >= min_similarity {
                        results.push((id, sim));
                    }
                }
            }
        }
        results.sort_by(rank);
        results.truncate(max_results);

        let query_simple = cp.row(LayerId::PosSimple);
        let query_sparse = LayerId::SEMANTIC.map(|l| cp.filled(l));
        let nq = cp.token_count();
        let mut others: Vec<(&String, &Node, (usize, usize))> = self
            .roots
            .iter()
            .filter(|(k, _)| **k != root_key)
            .map(|(k, n)| {
                (
                    k,
                    n,
                    row_match(LayerId::PosSimple, query_simple, &n.simple_row),
                )
            })
            .collect();
        others.sort_by(|a, b| cmp_fraction(b.2, a.2).then_with(|| a.0.cmp(b.0)));

        for (_, node, (m_simple, _)) in others {
            let nr = node.simple_row.len();
            let lemma_cap = nq.min(nr);
            let dense_den = 3 * nq.max(nr);
            for group in node.children.values() {
                for (&id, entry) in group {
                    // Pos matches imply PosSimple matches, sparse matches are
                    // capped by the smaller filled count per layer.
                    let sparse: usize = query_sparse
                        .iter()
                        .zip(entry.sparse)
                        .map(|(q, r)| (*q).min(r))
                        .sum();
                    let bound = (2 * m_simple + lemma_cap + sparse, dense_den + sparse);
                    if super::ratio(bound.0, bound.1) < min_similarity {
                        continue;
                    }
                    if results.len() >= max_results {
                        let kth = &results[max_results - 1].1;
                        if cmp_fraction(bound, (kth.matched_total, kth.comparable_total))
                            == Ordering::Less
                        {
                            continue;
                        }
                    }
                    let sim = similarity(cp, &entry.cp);
                    if sim.score >= min_similarity {
                        let at = results
                            .partition_point(|r| rank(r, &(id, sim.clone())) == Ordering::Less);
                        results.insert(at, (id, sim));
                        results.truncate(max_results);
                    }
                }
            }
        }
        results
    }

    /// Exhaustive ranking over every indexed rule; the reference for [`lookup`](Self::lookup).
    pub fn brute_force(
        &self,
        cp: &CompositePattern,
        min_similarity: f64,
        max_results: usize,
    ) -> Vec<(RuleId, SimilarityBreakdown)> {
        brute_force_lookup(self.entries(), cp, min_similarity, max_results)
    }
}

/// Scores every candidate, filters by `min_similarity`, sorts best first
/// (ties by lower id) and keeps `max_results`.
pub fn brute_force_lookup<'a>(
    entries: impl IntoIterator<Item = (RuleId, &'a CompositePattern)>,
    cp: &CompositePattern,
    min_similarity: f64,
    max_results: usize,
) -> Vec<(RuleId, SimilarityBreakdown)> {
    let mut all: Vec<(RuleId, SimilarityBreakdown)> = entries
        .into_iter()
        .map(|(id, other)| (id, similarity(cp, other)))
        .filter(|(_, s)| s.score >= min_similarity)
        .collect();
    all.sort_by(rank);
    all.truncate(max_results.max(1));
    all
}
