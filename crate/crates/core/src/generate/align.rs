use std::collections::{BTreeMap, BTreeSet};

use crate::annotate::{LabelSet, LayerId};
use crate::pattern::CompositePattern;

/// Correspondence between a rule's sentence slots and target token indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alignment {
    /// Injective slot to target index map.
    pub slot_map: BTreeMap<usize, usize>,
    /// Mapped slots that also cover the following target tokens of their
    /// entity run, up to and including the given index.
    pub extend_to: BTreeMap<usize, usize>,
    /// Unmapped slots whose entity run was mapped through another slot.
    pub elided: BTreeSet<usize>,
}

impl Alignment {
    /// Target indices a slot renders as; empty for elided or unmapped slots.
    pub fn targets(&self, slot: usize) -> Vec<usize> {
        match self.slot_map.get(&slot) {
            Some(&t) => (t..=self.extend_to.get(&slot).copied().unwrap_or(t)).collect(),
            None => Vec::new(),
        }
    }

    pub fn is_covered(&self, slot: usize) -> bool {
        self.slot_map.contains_key(&slot) || self.elided.contains(&slot)
    }
}

const ENTITY_LAYERS: [LayerId; 3] = [LayerId::Ner, LayerId::Gkg, LayerId::Sst];

/// Maximal runs of consecutive positions carrying the same non-empty label set.
fn runs(row: &[LabelSet], free: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < row.len() {
        if row[i].is_empty() || !free(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < row.len() && row[i + 1] == row[start] && free(i + 1) {
            i += 1;
        }
        out.push((start, i));
        i += 1;
    }
    out
}

fn relative(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// Greedy layered alignment with no slot exemptions.
pub fn align(rule_cp: &CompositePattern, target: &CompositePattern) -> Alignment {
    align_with(rule_cp, target, |_| false)
}

/// Greedy layered alignment.
///
/// Entity layers (Ner, Gkg, Sst) pair whole runs of equally labelled tokens,
/// each rule run taking the nearest compatible target run. The Lemma and Pos
/// passes then pair single tokens, preferring the same index and otherwise
/// the nearest relative position. A slot carrying a Ner label may only be
/// paired on an entity layer unless `exempt(slot)` holds.
pub fn align_with(
    rule_cp: &CompositePattern,
    target: &CompositePattern,
    exempt: impl Fn(usize) -> bool,
) -> Alignment {
    let mut a = Alignment::default();
    let mut used = vec![false; target.token_count()];

    for layer in ENTITY_LAYERS {
        let rule_row = rule_cp.row(layer);
        let target_row = target.row(layer);
        let rule_runs = runs(rule_row, |s| {
            !a.slot_map.contains_key(&s) && !a.elided.contains(&s)
        });
        for (rs, re) in rule_runs {
            let target_runs = runs(target_row, |t| !used[t]);
            let best = target_runs
                .iter()
                .filter(|(ts, _)| target_row[*ts].intersects(&rule_row[rs]))
                .min_by_key(|(ts, _)| (ts.abs_diff(rs), *ts));
            let Some(&(ts, te)) = best else {
                continue;
            };
            let shared = (re - rs + 1).min(te - ts + 1);
            for k in 0..shared {
                a.slot_map.insert(rs + k, ts + k);
            }
            if te - ts + 1 > shared {
                a.extend_to.insert(rs + shared - 1, te);
            }
            a.elided.extend(rs + shared..=re);
            for flag in &mut used[ts..=te] {
                *flag = true;
            }
        }
    }

    for layer in [LayerId::Lemma, LayerId::Pos] {
        for slot in 0..rule_cp.token_count() {
            if a.is_covered(slot) || (!rule_cp.cell(LayerId::Ner, slot).is_empty() && !exempt(slot))
            {
                continue;
            }
            let cell = rule_cp.cell(layer, slot);
            let matches = |t: usize| {
                let other = target.cell(layer, t);
                if layer == LayerId::Lemma {
                    cell.intersects_ignore_case(other)
                } else {
                    cell.intersects(other)
                }
            };
            let pick = if slot < used.len() && !used[slot] && matches(slot) {
                Some(slot)
            } else {
                let r = relative(slot, rule_cp.token_count());
                (0..target.token_count())
                    .filter(|&t| !used[t] && matches(t))
                    .min_by(|&x, &y| {
                        let dx = (relative(x, target.token_count()) - r).abs();
                        let dy = (relative(y, target.token_count()) - r).abs();
                        dx.total_cmp(&dy).then(x.cmp(&y))
                    })
            };
            if let Some(t) = pick {
                a.slot_map.insert(slot, t);
                used[t] = true;
            }
        }
    }
    a
}
