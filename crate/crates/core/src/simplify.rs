//! Clause splitting for complex sentences.
//!
//! Two rules: coordinated finite clauses are split at the conjunction, and a
//! relative clause hanging off a noun phrase is extracted as its own
//! declarative. Labels are sliced from the original, never recomputed.

use crate::annotate::AnnotatedSentence;

fn is_verb(s: &AnnotatedSentence, i: usize) -> bool {
    let pos = s.pos(i);
    pos.starts_with("VB") || pos == "MD"
}

fn is_relative(pos: &str) -> bool {
    matches!(pos, "WDT" | "WP" | "WP$")
}

fn is_np_part(pos: &str) -> bool {
    pos.starts_with("NN") || matches!(pos, "DT" | "JJ" | "JJR" | "JJS" | "CD" | "PRP$" | "POS")
}

fn is_final_punct(text: &str) -> bool {
    matches!(text, "." | "!" | "?")
}

/// Splits `span` (indices into `s`) at the first conjunction that joins two
/// verb-bearing clauses, recursing into both halves. Returns the leaf clauses.
fn coordination_leaves(s: &AnnotatedSentence, span: &[usize]) -> Vec<Vec<usize>> {
    for (k, &i) in span.iter().enumerate() {
        if s.pos(i) != "CC" || k == 0 || k + 1 >= span.len() {
            continue;
        }
        let mut left: Vec<usize> = span[..k].to_vec();
        while left.last().is_some_and(|&j| s.tokens()[j].text == ",") {
            left.pop();
        }
        let right: Vec<usize> = span[k + 1..].to_vec();
        let content = |part: &[usize]| part.iter().any(|&j| !is_final_punct(&s.tokens()[j].text));
        if left.is_empty() || !content(&right) {
            continue;
        }
        if !left.iter().any(|&j| is_verb(s, j)) || !right.iter().any(|&j| is_verb(s, j)) {
            continue;
        }
        // a bare verb phrase on the right has no subject of its own
        if is_verb(s, right[0]) {
            continue;
        }
        let mut leaves = coordination_leaves(s, &left);
        leaves.extend(coordination_leaves(s, &right));
        return leaves;
    }
    vec![span.to_vec()]
}

/// Extracts the first relative clause of `span`: returns
/// (antecedent + clause, host without the clause).
fn relative_split(s: &AnnotatedSentence, span: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let text = |k: usize| s.tokens()[span[k]].text.as_str();
    for w in 1..span.len() {
        if !is_relative(s.pos(span[w])) {
            continue;
        }
        let comma_before = text(w - 1) == ",";
        let head = if comma_before {
            w.checked_sub(2)?
        } else {
            w - 1
        };
        if !s.pos(span[head]).starts_with("NN") {
            continue;
        }
        let mut np_start = head;
        while np_start > 0 && is_np_part(s.pos(span[np_start - 1])) {
            np_start -= 1;
        }
        let mut end = w + 1;
        while end < span.len() && text(end) != "," && !is_final_punct(text(end)) {
            end += 1;
        }
        let clause = &span[w + 1..end];
        if clause.is_empty() || !clause.iter().any(|&j| is_verb(s, j)) {
            continue;
        }
        let mut extracted: Vec<usize> = span[np_start..=head].to_vec();
        extracted.extend_from_slice(clause);

        let cut_from = if comma_before { w - 1 } else { w };
        let cut_to = if end < span.len() && text(end) == "," {
            end + 1
        } else {
            end
        };
        let mut host: Vec<usize> = span[..cut_from].to_vec();
        host.extend_from_slice(&span[cut_to..]);
        return Some((extracted, host));
    }
    None
}

/// The original sentence followed by any simplified declaratives.
pub fn simplify_sentence(s: &AnnotatedSentence) -> Vec<AnnotatedSentence> {
    let all: Vec<usize> = (0..s.len()).collect();
    let mut spans: Vec<Vec<usize>> = Vec::new();
    let leaves = coordination_leaves(s, &all);
    if leaves.len() > 1 {
        spans.extend(leaves.iter().cloned());
    }
    for base in std::iter::once(&all).chain(if leaves.len() > 1 {
        leaves.iter()
    } else {
        [].iter()
    }) {
        if let Some((extracted, host)) = relative_split(s, base) {
            spans.push(extracted);
            spans.push(host);
        }
    }

    let mut out = vec![s.clone()];
    let mut seen = vec![s.texts()];
    for span in spans {
        let id = format!("{}#s{}", s.source_id, out.len());
        let Ok(piece) = s.slice(id, &span, true) else {
            continue;
        };
        let texts = piece.texts();
        if texts.iter().all(|t| is_final_punct(t)) || seen.contains(&texts) {
            continue;
        }
        seen.push(texts);
        out.push(piece);
    }
    out
}
