use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use super::{tokenize, AnnotatedSentence, LabelSet, LayerId, Layers, Token};
use crate::error::{Error, Result};
use crate::morph::Morphology;

/// What a provider sees when asked to label one layer of a sentence.
pub struct LabelContext<'a> {
    pub tokens: &'a [Token],
    /// Layers filled so far (Pos and Lemma come first).
    pub layers: &'a Layers,
}

/// A source of labels for one or more layers.
///
/// `label` returns `None` when the provider does not handle `layer`, otherwise
/// one entry per token where `None` marks a per-token failure.
pub trait AnnotationProvider: Send + Sync {
    fn name(&self) -> &str;
    fn label(&self, layer: LayerId, ctx: &LabelContext<'_>) -> Option<Vec<Option<LabelSet>>>;
}

const FILL_ORDER: [LayerId; 6] = [
    LayerId::Pos,
    LayerId::Lemma,
    LayerId::Ner,
    LayerId::Gkg,
    LayerId::Viaf,
    LayerId::Sst,
];

/// Runs `providers` in order over a raw sentence; for each layer the first
/// provider that handles it wins.
pub fn annotate(
    source_id: &str,
    sentence: &str,
    providers: &[Arc<dyn AnnotationProvider>],
) -> Result<AnnotatedSentence> {
    let tokens = tokenize(sentence)?;
    let mut layers = Layers::new();
    for layer in FILL_ORDER {
        let ctx = LabelContext {
            tokens: &tokens,
            layers: &layers,
        };
        let Some((provider, cells)) = providers
            .iter()
            .find_map(|p| p.label(layer, &ctx).map(|cells| (p, cells)))
        else {
            if layer.is_dense() {
                return Err(Error::RequiredLayer {
                    layer,
                    message: "no provider for layer".into(),
                });
            }
            continue;
        };
        if cells.len() != tokens.len() {
            return Err(Error::LayerLength {
                layer,
                found: cells.len(),
                expected: tokens.len(),
            });
        }
        let mut row = Vec::with_capacity(cells.len());
        for (i, cell) in cells.into_iter().enumerate() {
            match cell {
                Some(set) => row.push(set),
                None if layer.is_dense() => {
                    return Err(Error::RequiredLayer {
                        layer,
                        message: format!(
                            "provider {} failed on token {i} ({:?})",
                            provider.name(),
                            tokens[i].text
                        ),
                    })
                }
                None => {
                    log::warn!(
                        "{source_id}: provider {} failed on {layer} for token {i} ({:?})",
                        provider.name(),
                        tokens[i].text
                    );
                    row.push(LabelSet::new());
                }
            }
        }
        layers.insert(layer, row);
    }
    let texts = tokens.into_iter().map(|t| t.text).collect();
    AnnotatedSentence::new(source_id, texts, layers)
}

/// Provider backed by previously annotated sentences, keyed by exact token texts.
#[derive(Default)]
pub struct FileProvider {
    by_tokens: HashMap<Vec<String>, AnnotatedSentence>,
}

impl FileProvider {
    pub fn new(sentences: impl IntoIterator<Item = AnnotatedSentence>) -> Self {
        FileProvider {
            by_tokens: sentences.into_iter().map(|s| (s.texts(), s)).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(FileProvider::new(super::load_annotations(path)?))
    }

    pub fn len(&self) -> usize {
        self.by_tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_tokens.is_empty()
    }
}

impl AnnotationProvider for FileProvider {
    fn name(&self) -> &str {
        "file"
    }

    fn label(&self, layer: LayerId, ctx: &LabelContext<'_>) -> Option<Vec<Option<LabelSet>>> {
        let key: Vec<String> = ctx.tokens.iter().map(|t| t.text.clone()).collect();
        let known = self.by_tokens.get(&key)?;
        Some(known.layer(layer).iter().cloned().map(Some).collect())
    }
}

/// Owns a provider chain; the default chain is the bundled lexicon tagger
/// followed by the bundled gazetteer.
#[derive(Clone)]
pub struct Annotator {
    providers: Vec<Arc<dyn AnnotationProvider>>,
}

impl Default for Annotator {
    fn default() -> Self {
        Annotator::new(vec![
            Arc::new(super::LexiconTagger::bundled()),
            Arc::new(super::Gazetteer::bundled()),
        ])
    }
}

impl Annotator {
    pub fn new(providers: Vec<Arc<dyn AnnotationProvider>>) -> Self {
        Annotator { providers }
    }

    /// Default chain using a custom morphology table for lemmas and verb tags.
    pub fn with_morphology(morph: Arc<Morphology>) -> Self {
        Annotator::new(vec![
            Arc::new(super::LexiconTagger::bundled().with_morphology(morph)),
            Arc::new(super::Gazetteer::bundled()),
        ])
    }

    /// Puts `provider` in front of the chain so it overrides the rest.
    pub fn prepend(mut self, provider: Arc<dyn AnnotationProvider>) -> Self {
        self.providers.insert(0, provider);
        self
    }

    pub fn annotate(&self, source_id: &str, sentence: &str) -> Result<AnnotatedSentence> {
        annotate(source_id, sentence, &self.providers)
    }

    /// Splits `text` into sentences and annotates each, ids `<prefix>-<n>`.
    pub fn annotate_text(&self, prefix: &str, text: &str) -> Result<Vec<AnnotatedSentence>> {
        super::split_sentences(text)
            .iter()
            .enumerate()
            .map(|(i, s)| self.annotate(&format!("{prefix}-{i}"), s))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(s: &AnnotatedSentence, layer: LayerId) -> Vec<String> {
        s.layer(layer).iter().map(LabelSet::render).collect()
    }

    #[test]
    fn default_chain_reproduces_table_two() {
        let s = Annotator::default()
            .annotate("t2", "Peter Sagan comes from Slovakia.")
            .unwrap();
        assert_eq!(
            row(&s, LayerId::Lemma),
            ["Peter", "Sagan", "come", "from", "Slovakia", "."]
        );
        assert_eq!(
            row(&s, LayerId::Pos),
            ["NNP", "NNP", "VBZ", "IN", "NNP", "."]
        );
        assert_eq!(
            row(&s, LayerId::PosSimple),
            ["NN", "NN", "VB", "IN", "NN", "."]
        );
        assert_eq!(
            row(&s, LayerId::Ner),
            ["person", "person", "_", "_", "location", "_"]
        );
    }

    #[test]
    fn no_entities_means_empty_ner() {
        let s = Annotator::default()
            .annotate("x", "It is raining.")
            .unwrap();
        assert!(s.layer(LayerId::Ner).iter().all(LabelSet::is_empty));
    }

    #[test]
    fn kiska_sentence_slovakia_cell() {
        let s = Annotator::default()
            .annotate("k", "The president of Slovakia is Andrej Kiska.")
            .unwrap();
        assert_eq!(s.cell(LayerId::Ner, 3).render(), "location");
        assert_eq!(s.cell(LayerId::Gkg, 3).render(), "country");
    }

    struct Flaky;

    impl AnnotationProvider for Flaky {
        fn name(&self) -> &str {
            "flaky"
        }
        fn label(&self, layer: LayerId, ctx: &LabelContext<'_>) -> Option<Vec<Option<LabelSet>>> {
            match layer {
                LayerId::Sst => Some(vec![None; ctx.tokens.len()]),
                LayerId::Lemma => Some(vec![None; ctx.tokens.len()]),
                _ => None,
            }
        }
    }

    #[test]
    fn semantic_failures_are_soft_dense_failures_are_hard() {
        let mut lexicon_only: Vec<Arc<dyn AnnotationProvider>> =
            vec![Arc::new(super::super::LexiconTagger::bundled())];
        lexicon_only.insert(0, Arc::new(Flaky));
        let err = annotate("f", "It rains.", &lexicon_only).unwrap_err();
        assert!(matches!(
            err,
            Error::RequiredLayer {
                layer: LayerId::Lemma,
                ..
            }
        ));

        struct SstOnly;
        impl AnnotationProvider for SstOnly {
            fn name(&self) -> &str {
                "sst"
            }
            fn label(
                &self,
                layer: LayerId,
                ctx: &LabelContext<'_>,
            ) -> Option<Vec<Option<LabelSet>>> {
                (layer == LayerId::Sst).then(|| vec![None; ctx.tokens.len()])
            }
        }
        let chain = Annotator::default().prepend(Arc::new(SstOnly));
        let s = chain.annotate("f", "It rains.").unwrap();
        assert!(s.layer(LayerId::Sst).iter().all(LabelSet::is_empty));
    }

    #[test]
    fn file_provider_overrides_defaults() {
        let base = Annotator::default()
            .annotate("a", "Andrej Kiska rides.")
            .unwrap();
        let mut layers = base.layers().clone();
        layers.get_mut(&LayerId::Ner).unwrap()[2] = LabelSet::parse("person|location");
        let custom = AnnotatedSentence::new("a", base.texts(), layers).unwrap();
        let chain = Annotator::default().prepend(Arc::new(FileProvider::new([custom])));
        let s = chain.annotate("a", "Andrej Kiska rides.").unwrap();
        assert_eq!(s.cell(LayerId::Ner, 2).len(), 2);
    }
}
