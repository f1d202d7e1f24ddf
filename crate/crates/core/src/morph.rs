//! Inflection table (`LEMMA TAG SURFACE`) with regular-rule fallback.

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../data/morphology.tsv");

/// Tags [`change_form`] knows how to produce.
pub const FORM_TAGS: &[&str] = &["VB", "VBP", "VBZ", "VBD", "VBN", "VBG", "NN", "NNS"];

#[derive(Clone, Debug, Default)]
pub struct Morphology {
    forms: HashMap<(String, String), String>,
    analyses: HashMap<String, Vec<(String, String)>>,
}

impl Morphology {
    pub fn bundled() -> &'static Morphology {
        static TABLE: OnceLock<Morphology> = OnceLock::new();
        TABLE.get_or_init(|| {
            Morphology::parse(BUNDLED, "morphology.tsv").expect("bundled morphology table")
        })
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut table = Morphology::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::format(
                    source_name,
                    n + 1,
                    format!(
                        "expected 3 columns (LEMMA TAG SURFACE), found {}",
                        cols.len()
                    ),
                ));
            }
            table.add(cols[0], cols[1], cols[2]);
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Morphology::parse(&text, &path.display().to_string())
    }

    /// Bundled table extended with the entries of `path`; later entries win.
    pub fn bundled_with(path: &Path) -> Result<Self> {
        let mut table = Morphology::bundled().clone();
        let extra = Morphology::load(path)?;
        for ((lemma, tag), surface) in extra.forms {
            table
                .forms
                .insert((lemma.clone(), tag.clone()), surface.clone());
            table.push_analysis(&surface, &lemma, &tag);
        }
        Ok(table)
    }

    fn add(&mut self, lemma: &str, tag: &str, surface: &str) {
        let lemma = lemma.to_lowercase();
        self.forms
            .entry((lemma.clone(), tag.to_string()))
            .or_insert_with(|| surface.to_string());
        self.push_analysis(surface, &lemma, tag);
    }

    fn push_analysis(&mut self, surface: &str, lemma: &str, tag: &str) {
        let entry = self.analyses.entry(surface.to_lowercase()).or_default();
        let analysis = (lemma.to_string(), tag.to_string());
        if !entry.contains(&analysis) {
            entry.push(analysis);
        }
    }

    pub fn form(&self, lemma: &str, tag: &str) -> Option<&str> {
        self.forms
            .get(&(lemma.to_lowercase(), tag.to_string()))
            .map(String::as_str)
    }

    /// All (lemma, tag) readings of a surface form, in table order.
    pub fn analyses(&self, surface: &str) -> &[(String, String)] {
        self.analyses
            .get(&surface.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn knows_lemma(&self, lemma: &str) -> bool {
        self.forms
            .contains_key(&(lemma.to_lowercase(), "VB".to_string()))
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

fn consonant_y(word: &str) -> bool {
    let mut rev = word.chars().rev();
    rev.next() == Some('y') && rev.next().is_some_and(|c| !VOWELS.contains(&c))
}

pub(crate) fn third_person(lemma: &str) -> String {
    if consonant_y(lemma) {
        format!("{}ies", &lemma[..lemma.len() - 1])
    } else if ["s", "x", "z", "ch", "sh", "o"]
        .iter()
        .any(|s| lemma.ends_with(s))
    {
        format!("{lemma}es")
    } else {
        format!("{lemma}s")
    }
}

fn past(lemma: &str) -> String {
    if lemma.ends_with('e') {
        format!("{lemma}d")
    } else if consonant_y(lemma) {
        format!("{}ied", &lemma[..lemma.len() - 1])
    } else {
        format!("{lemma}ed")
    }
}

fn gerund(lemma: &str) -> String {
    if let Some(stem) = lemma.strip_suffix("ie") {
        format!("{stem}ying")
    } else if lemma.ends_with('e') && !lemma.ends_with("ee") && lemma.len() > 2 {
        format!("{}ing", &lemma[..lemma.len() - 1])
    } else {
        format!("{lemma}ing")
    }
}

/// Plural of a common noun by the regular spelling rules.
pub(crate) fn pluralize(noun: &str) -> String {
    third_person(noun)
}

/// Singular of a regular plural; unchanged when it does not look plural.
pub(crate) fn singularize(noun: &str) -> String {
    let lower = noun.to_lowercase();
    if lower.len() > 4 && lower.ends_with("ies") {
        format!("{}y", &noun[..noun.len() - 3])
    } else if lower.len() > 3
        && ["ches", "shes", "xes", "sses", "zes"]
            .iter()
            .any(|s| lower.ends_with(s))
    {
        noun[..noun.len() - 2].to_string()
    } else if lower.len() > 3
        && lower.ends_with('s')
        && !lower.ends_with("ss")
        && !lower.ends_with("us")
    {
        noun[..noun.len() - 1].to_string()
    } else {
        noun.to_string()
    }
}

fn match_case(surface: &str, form: String) -> String {
    if surface.chars().next().is_some_and(char::is_uppercase) {
        let mut chars = form.chars();
        match chars.next() {
            Some(first) => first.to_uppercase().chain(chars).collect(),
            None => form,
        }
    } else {
        form
    }
}

/// Re-inflects `surface` (whose lemma is `lemma`) to `target_tag`.
///
/// Table entries take precedence over the regular rules. Tags outside
/// [`FORM_TAGS`] leave the surface unchanged.
pub fn change_form(morph: &Morphology, surface: &str, lemma: &str, target_tag: &str) -> String {
    if !FORM_TAGS.contains(&target_tag) {
        log::warn!("no inflection rule for tag {target_tag:?}; keeping {surface:?}");
        return surface.to_string();
    }
    let base = lemma.to_lowercase();
    let form = match morph.form(&base, target_tag) {
        Some(form) => form.to_string(),
        None => match target_tag {
            "VB" | "VBP" => base.clone(),
            "VBZ" => third_person(&base),
            "VBD" | "VBN" => past(&base),
            "VBG" => gerund(&base),
            // nouns keep the lemma's own casing (proper nouns)
            "NN" => {
                return if lemma.is_empty() {
                    singularize(surface)
                } else {
                    lemma.to_string()
                }
            }
            "NNS" => {
                if surface.to_lowercase() == base {
                    return pluralize(surface);
                }
                return surface.to_string();
            }
            _ => unreachable!(),
        },
    };
    match_case(surface, form)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_loads() {
        let m = Morphology::bundled();
        assert!(m.len() > 1000);
        assert_eq!(m.form("be", "VBD"), Some("was"));
        assert!(m.analyses("comes").contains(&("come".into(), "VBZ".into())));
    }

    #[test]
    fn change_form_examples() {
        let m = Morphology::bundled();
        assert_eq!(change_form(m, "is", "be", "VBD"), "was");
        assert_eq!(change_form(m, "comes", "come", "VB"), "come");
        assert_eq!(change_form(m, "Slovakia", "Slovakia", "NN"), "Slovakia");
        assert_eq!(change_form(m, "won", "win", "VB"), "win");
        assert_eq!(change_form(m, "Was", "be", "VBZ"), "Is");
    }

    #[test]
    fn regular_fallbacks() {
        let m = Morphology::default();
        assert_eq!(change_form(&m, "carries", "carry", "VBD"), "carried");
        assert_eq!(change_form(&m, "hopes", "hope", "VBG"), "hoping");
        assert_eq!(change_form(&m, "watch", "watch", "VBZ"), "watches");
        assert_eq!(change_form(&m, "cities", "city", "NN"), "city");
        assert_eq!(change_form(&m, "city", "city", "NNS"), "cities");
        assert_eq!(change_form(&m, "quickly", "quickly", "RB"), "quickly");
    }

    #[test]
    fn singular_and_plural() {
        assert_eq!(singularize("countries"), "country");
        assert_eq!(singularize("churches"), "church");
        assert_eq!(singularize("kings"), "king");
        assert_eq!(singularize("status"), "status");
        assert_eq!(pluralize("box"), "boxes");
    }

    #[test]
    fn user_table_overrides_bundled() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("extra.tsv");
        std::fs::write(&path, "# extra\nzork\tVBD\tzorked-ish\n").unwrap();
        let m = Morphology::bundled_with(&path).unwrap();
        assert_eq!(change_form(&m, "zorks", "zork", "VBD"), "zorked-ish");
        assert!(Morphology::parse("a\tb\n", "bad").is_err());
    }
}
