//! Reference-based metrics (BLEU, ROUGE-L, length ratio) and inter-rater
//! reliability.
//!
//! Text is tokenized with the annotation tokenizer and lowercased;
//! punctuation tokens count as ordinary tokens. BLEU-n is the cumulative
//! score: the geometric mean of the clipped 1..n-gram precisions times the
//! brevity penalty. An order with no matching n-gram gets `EPSILON` matches
//! instead of zero.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotate::tokenize;
use crate::error::{Error, Result};
use crate::lcs::lcs_len;
use crate::score::{effective_ratings, Rating};

pub const EPSILON: f64 = 0.1;
pub const MAX_ORDER: usize = 4;

fn metric_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .map(|ts| ts.into_iter().map(|t| t.text.to_lowercase()).collect())
        .unwrap_or_default()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn bleu_tokens(cand: &[String], reference: &[String], n: usize) -> f64 {
    if n == 0 || cand.len() < n || reference.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for k in 1..=n {
        let ref_counts = ngram_counts(reference, k);
        let total = cand.len() + 1 - k;
        let clipped: usize = ngram_counts(cand, k)
            .into_iter()
            .map(|(g, c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
            .sum();
        let matches = if clipped == 0 {
            EPSILON
        } else {
            clipped as f64
        };
        log_sum += (matches / total as f64).ln();
    }
    let bp = (1.0 - reference.len() as f64 / cand.len() as f64)
        .min(0.0)
        .exp();
    bp * (log_sum / n as f64).exp()
}

pub fn bleu_n(candidate: &str, reference: &str, n: usize) -> f64 {
    bleu_tokens(&metric_tokens(candidate), &metric_tokens(reference), n)
}

/// Mean of BLEU-1 to BLEU-4.
pub fn bleu_average(candidate: &str, reference: &str) -> f64 {
    let (c, r) = (metric_tokens(candidate), metric_tokens(reference));
    (1..=MAX_ORDER).map(|n| bleu_tokens(&c, &r, n)).sum::<f64>() / MAX_ORDER as f64
}

fn rouge_tokens(cand: &[String], reference: &[String]) -> f64 {
    let lcs = lcs_len(cand, reference, |a, b| a == b);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / cand.len() as f64;
    let r = lcs as f64 / reference.len() as f64;
    2.0 * p * r / (p + r)
}

/// LCS-based F1.
pub fn rouge_l(candidate: &str, reference: &str) -> f64 {
    rouge_tokens(&metric_tokens(candidate), &metric_tokens(reference))
}

/// One generated question and its reference. Pairs sharing a group compete
/// for the same reference; ungrouped pairs stand alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPair {
    #[serde(default)]
    pub group: Option<String>,
    pub generated: String,
    pub reference: String,
}

pub fn parse_eval_pairs(text: &str, source_name: &str) -> Result<Vec<EvalPair>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| Error::format(source_name, n + 1, e.to_string()))
        })
        .collect()
}

pub fn load_eval_pairs(path: &Path) -> Result<Vec<EvalPair>> {
    parse_eval_pairs(&std::fs::read_to_string(path)?, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Selected pairs, one per group.
    pub pairs: usize,
    pub bleu: BTreeMap<usize, f64>,
    pub bleu_average: f64,
    pub rouge_l: f64,
    pub len_reference: usize,
    pub len_generated: usize,
    pub length_ratio: f64,
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28}{:>10}", "Metric", "Value")?;
        for (n, v) in &self.bleu {
            writeln!(f, "{:<28}{:>10.4}", format!("BLEU-{n}"), v)?;
        }
        writeln!(f, "{:<28}{:>10.4}", "BLEU - average", self.bleu_average)?;
        writeln!(f, "{:<28}{:>10.4}", "ROUGE-L", self.rouge_l)?;
        writeln!(
            f,
            "{:<28}{:>10}",
            "Length of reference (chars)", self.len_reference
        )?;
        writeln!(
            f,
            "{:<28}{:>10}",
            "Length of generated (chars)", self.len_generated
        )?;
        writeln!(f, "{:<28}{:>10.4}", "Length ratio", self.length_ratio)?;
        write!(f, "{:<28}{:>10}", "Pairs", self.pairs)
    }
}

struct Scored<'a> {
    pair: &'a EvalPair,
    bleu: [f64; MAX_ORDER],
    rouge: f64,
}

impl Scored<'_> {
    fn average(&self) -> f64 {
        self.bleu.iter().sum::<f64>() / MAX_ORDER as f64
    }
}

/// Picks the best candidate (by BLEU average) per group and macro-averages.
pub fn corpus_report(pairs: &[EvalPair]) -> Result<MetricReport> {
    let mut groups: Vec<(Option<&str>, Vec<&EvalPair>)> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for p in pairs {
        match p.group.as_deref() {
            Some(g) => match index.get(g) {
                Some(&i) => groups[i].1.push(p),
                None => {
                    index.insert(g, groups.len());
                    groups.push((Some(g), vec![p]));
                }
            },
            None => groups.push((None, vec![p])),
        }
    }
    let mut selected: Vec<Scored> = Vec::new();
    for (name, members) in groups {
        let mut best: Option<Scored> = None;
        for p in members {
            let r = metric_tokens(&p.reference);
            if r.is_empty() {
                log::warn!("group {}: empty reference skipped", name.unwrap_or("-"));
                continue;
            }
            let c = metric_tokens(&p.generated);
            let mut bleu = [0.0; MAX_ORDER];
            for (n, slot) in bleu.iter_mut().enumerate() {
                *slot = bleu_tokens(&c, &r, n + 1);
            }
            let scored = Scored {
                pair: p,
                bleu,
                rouge: rouge_tokens(&c, &r),
            };
            if best.as_ref().is_none_or(|b| scored.average() > b.average()) {
                best = Some(scored);
            }
        }
        selected.extend(best);
    }
    if selected.is_empty() {
        return Err(Error::InvalidArgument("no evaluable pairs".into()));
    }
    let k = selected.len() as f64;
    let bleu: BTreeMap<usize, f64> = (0..MAX_ORDER)
        .map(|n| (n + 1, selected.iter().map(|s| s.bleu[n]).sum::<f64>() / k))
        .collect();
    let len_reference: usize = selected
        .iter()
        .map(|s| s.pair.reference.chars().count())
        .sum();
    let len_generated: usize = selected
        .iter()
        .map(|s| s.pair.generated.chars().count())
        .sum();
    Ok(MetricReport {
        pairs: selected.len(),
        bleu_average: bleu.values().sum::<f64>() / MAX_ORDER as f64,
        bleu,
        rouge_l: selected.iter().map(|s| s.rouge).sum::<f64>() / k,
        len_reference,
        len_generated,
        length_ratio: len_generated as f64 / len_reference as f64,
    })
}

/// Ratings per question from a log: latest per rater, skipped ones left out.
pub fn ratings_by_question(log: &[Rating]) -> BTreeMap<String, Vec<f64>> {
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in effective_ratings(log) {
        if let Some(v) = r.value() {
            out.entry(r.question_id.clone()).or_default().push(v);
        }
    }
    out
}

fn irr(ratings: &BTreeMap<String, Vec<f64>>, agreement: impl Fn(f64, f64) -> f64) -> Option<f64> {
    let mut per_question = Vec::new();
    for (q, values) in ratings {
        if values.len() < 2 {
            log::warn!("question {q}: fewer than two ratings, excluded from agreement");
            continue;
        }
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                sum += agreement(values[i], values[j]);
                pairs += 1;
            }
        }
        per_question.push(sum / pairs as f64);
    }
    if per_question.is_empty() {
        return None;
    }
    Some(100.0 * per_question.iter().sum::<f64>() / per_question.len() as f64)
}

/// Percentage of rater pairs giving exactly the same rating, macro-averaged
/// over questions. `None` when no question has two ratings.
pub fn irr_binary(ratings: &BTreeMap<String, Vec<f64>>) -> Option<f64> {
    irr(ratings, |a, b| if a == b { 1.0 } else { 0.0 })
}

/// 100 times one minus the mean squared pairwise rating distance on the
/// unit scale. Squaring keeps full disagreement at 0 and exact agreement at
/// 100 while penalising half-step differences less than full ones.
pub fn irr_numeric(ratings: &BTreeMap<String, Vec<f64>>) -> Option<f64> {
    irr(ratings, |a, b| 1.0 - (a - b) * (a - b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrReport {
    pub questions: usize,
    pub irr_binary: Option<f64>,
    pub irr_numeric: Option<f64>,
}

impl IrrReport {
    pub fn from_log(log: &[Rating]) -> Self {
        let by_q = ratings_by_question(log);
        IrrReport {
            questions: by_q.values().filter(|v| v.len() >= 2).count(),
            irr_binary: irr_binary(&by_q),
            irr_numeric: irr_numeric(&by_q),
        }
    }
}

impl fmt::Display for IrrReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.2}"));
        writeln!(f, "{:<28}{:>10}", "Questions", self.questions)?;
        writeln!(f, "{:<28}{:>10}", "IRRb (%)", show(self.irr_binary))?;
        write!(f, "{:<28}{:>10}", "IRRn (%)", show(self.irr_numeric))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EGYPT: (&str, &str) = (
        "Is Egypt situated in the north?",
        "Is Egypt situated in the north of Africa?",
    );

    fn q(values: &[f64]) -> BTreeMap<String, Vec<f64>> {
        BTreeMap::from([("q".to_string(), values.to_vec())])
    }

    #[test]
    fn egypt_values() {
        let (c, r) = EGYPT;
        let bp = (-2.0f64 / 7.0).exp();
        assert!((bleu_n(c, r, 1) - bp).abs() < 1e-12);
        assert!((bleu_n(c, r, 2) - bp * (5.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert!((bleu_n(c, r, 4) - bp * (0.5f64).powf(0.25)).abs() < 1e-12);
        assert!((bleu_average(c, r) - 0.6815).abs() < 1e-3);
        assert!((rouge_l(c, r) - 0.875).abs() < 1e-12);
    }

    #[test]
    fn identity_disjoint_and_short() {
        let s = "Who is the president of Slovakia?";
        for n in 1..=4 {
            assert_eq!(bleu_n(s, s, n), 1.0);
        }
        assert_eq!(rouge_l(s, s), 1.0);
        assert_eq!(rouge_l("Birds sing", "Fish swim"), 0.0);
        // Two tokens each, equal length: every order is the epsilon floor.
        assert!((bleu_n("Birds sing", "Fish swim", 1) - EPSILON / 2.0).abs() < 1e-12);
        assert_eq!(bleu_n("Birds sing", "Fish swim", 3), 0.0);
    }

    #[test]
    fn corpus_selects_best_in_group() {
        let p = |g: &str, gen: &str, r: &str| EvalPair {
            group: Some(g.into()),
            generated: gen.into(),
            reference: r.into(),
        };
        let report = corpus_report(&[
            p("a", "What is it?", "Who is the president of Slovakia?"),
            p(
                "a",
                "Who is the president of Slovakia?",
                "Who is the president of Slovakia?",
            ),
        ])
        .unwrap();
        assert_eq!(report.pairs, 1);
        assert_eq!(report.bleu_average, 1.0);
        assert_eq!(report.rouge_l, 1.0);
        assert_eq!(report.length_ratio, 1.0);
        assert!(corpus_report(&[p("a", "x?", "")]).is_err());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"bleu\":{\"1\":1.0"));
        assert!(report.to_string().contains("ROUGE-L"));
    }

    #[test]
    fn irr_examples() {
        assert_eq!(irr_binary(&q(&[1.0, 1.0, 1.0])), Some(100.0));
        assert_eq!(irr_numeric(&q(&[0.5, 0.5])), Some(100.0));
        assert_eq!(irr_binary(&q(&[1.0, 0.0])), Some(0.0));
        assert_eq!(irr_numeric(&q(&[1.0, 0.0])), Some(0.0));
        assert!((irr_binary(&q(&[1.0, 1.0, 0.5])).unwrap() - 100.0 / 3.0).abs() < 1e-9);
        assert!((irr_numeric(&q(&[1.0, 1.0, 0.5])).unwrap() - 250.0 / 3.0).abs() < 1e-9);
        assert_eq!(irr_binary(&q(&[1.0])), None);
    }

    fn sentence() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop::sample::select(vec![
                "the", "king", "of", "Egypt", "is", "who", "north", "?",
            ]),
            1..10,
        )
        .prop_map(|w| w.join(" "))
    }

    proptest! {
        #[test]
        fn metrics_bounded(a in sentence(), b in sentence(), n in 1usize..=4) {
            let v = bleu_n(&a, &b, n);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
            let r = rouge_l(&a, &b);
            prop_assert!((0.0..=1.0).contains(&r));
            let want = if metric_tokens(&a).len() >= n { 1.0 } else { 0.0 };
            prop_assert!((bleu_n(&a, &a, n) - want).abs() < 1e-12);
        }

        #[test]
        fn padding_with_reference_tokens_keeps_bleu1(r in sentence(), cut in 1usize..10) {
            let toks = metric_tokens(&r);
            let cut = cut.min(toks.len());
            let shorter = toks[..cut].join(" ");
            let longer = toks[..toks.len()].join(" ");
            prop_assert!(bleu_n(&longer, &r, 1) + 1e-12 >= bleu_n(&shorter, &r, 1));
        }

        #[test]
        fn numeric_agreement_dominates_binary(values in prop::collection::btree_map("[a-e]", prop::collection::vec(prop::sample::select(vec![0.0, 0.5, 1.0]), 0..6), 1..6)) {
            match (irr_binary(&values), irr_numeric(&values)) {
                (Some(b), Some(n)) => prop_assert!(b <= n + 1e-9),
                (None, None) => {}
                other => prop_assert!(false, "{:?}", other),
            }
        }

        #[test]
        fn reference_as_selection_never_lowers(gen in sentence(), r in sentence()) {
            let base = corpus_report(&[EvalPair { group: Some("g".into()), generated: gen.clone(), reference: r.clone() }]).unwrap();
            let with_ref = corpus_report(&[
                EvalPair { group: Some("g".into()), generated: gen, reference: r.clone() },
                EvalPair { group: Some("g".into()), generated: r.clone(), reference: r },
            ]).unwrap();
            prop_assert!(with_ref.bleu_average + 1e-12 >= base.bleu_average);
            prop_assert!(with_ref.rouge_l + 1e-12 >= base.rouge_l);
        }
    }
}
