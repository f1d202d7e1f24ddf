use std::collections::HashSet;
use std::sync::{Mutex, OnceLock};

const PENN_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS",
    "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG",
    "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", ".", ",", ":", "``", "''", "-LRB-", "-RRB-",
    "#", "$", "HYPH", "NFP",
];

/// Tags produced by [`simplify_pos`] that are not themselves Penn tags.
const SIMPLE_ONLY: &[&str] = &["WH"];

pub fn is_penn_tag(tag: &str) -> bool {
    PENN_TAGS.contains(&tag)
}

/// Maps a Penn tag onto its coarse class: verbs to `VB`, nouns to `NN`,
/// adjectives to `JJ`, adverbs to `RB`, pronouns to `PRP`, wh-words to `WH`.
/// Anything else maps to itself.
pub fn simplify_pos(tag: &str) -> String {
    let simple = match tag {
        t if t.starts_with("VB") => "VB",
        "NN" | "NNS" | "NNP" | "NNPS" => "NN",
        t if t.starts_with("JJ") => "JJ",
        "RB" | "RBR" | "RBS" => "RB",
        "PRP" | "PRP$" => "PRP",
        "WDT" | "WP" | "WP$" | "WRB" => "WH",
        other => {
            if !is_penn_tag(other) && !SIMPLE_ONLY.contains(&other) {
                warn_unknown(other);
            }
            other
        }
    };
    simple.to_string()
}

fn warn_unknown(tag: &str) {
    static SEEN: OnceLock<Mutex<HashSet<String>>> = OnceLock::new();
    let seen = SEEN.get_or_init(|| Mutex::new(HashSet::new()));
    if let Ok(mut seen) = seen.lock() {
        if seen.insert(tag.to_string()) {
            log::warn!("unknown POS tag {tag:?}, kept as is");
        }
    }
}
