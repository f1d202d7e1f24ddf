use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use qgen_core::metrics::{bleu_average, rouge_l};
use qgen_core::rules::{load_pairs, train, TrainingPair};
use qgen_core::{
    create_cp, generate_ranked, AnnotatedSentence, Annotator, Config, Morphology, RuleStore,
};

fn corpus() -> Vec<TrainingPair> {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/fixtures/wiki_pairs.jsonl");
    load_pairs(&path).expect("training corpus")
}

struct Setup {
    pairs: Vec<TrainingPair>,
    annotator: Annotator,
    store: RuleStore,
    inputs: Vec<AnnotatedSentence>,
}

fn setup() -> Setup {
    let pairs = corpus();
    let annotator = Annotator::default();
    let (store, _) = train(&pairs, &annotator).expect("train");
    let inputs = pairs
        .iter()
        .step_by(40)
        .enumerate()
        .map(|(i, p)| {
            annotator
                .annotate(&format!("b{i}"), &p.sentence)
                .expect("annotate")
        })
        .collect();
    Setup {
        pairs,
        annotator,
        store,
        inputs,
    }
}

fn benches(c: &mut Criterion) {
    let s = setup();

    c.bench_function("annotate_sentence", |b| {
        b.iter(|| {
            s.annotator
                .annotate("x", black_box(&s.pairs[0].sentence))
                .unwrap()
        })
    });

    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    group.bench_function("train_100_pairs", |b| {
        b.iter_batched(
            || s.pairs[..100].to_vec(),
            |p| train(&p, &s.annotator).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();

    let cps: Vec<_> = s.inputs.iter().map(create_cp).collect();
    c.bench_function("lookup", |b| {
        b.iter(|| {
            for cp in &cps {
                black_box(s.store.lookup(cp, 0.5, 8));
            }
        })
    });

    let config = Config::default();
    c.bench_function("generate_ranked", |b| {
        b.iter(|| {
            generate_ranked(
                Morphology::bundled(),
                black_box(&s.inputs),
                &s.store,
                &config,
            )
            .unwrap()
        })
    });

    let (cand, reference) = (
        "Is Egypt situated in the north?",
        "Is Egypt situated in the north of Africa?",
    );
    c.bench_function("bleu_average", |b| {
        b.iter(|| bleu_average(black_box(cand), black_box(reference)))
    });
    c.bench_function("rouge_l", |b| {
        b.iter(|| rouge_l(black_box(cand), black_box(reference)))
    });
}

criterion_group!(pipeline, benches);
criterion_main!(pipeline);
