use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qgen_core::annotate::{load_annotations, write_annotations, AnnotatedSentence, FileProvider};
use qgen_core::metrics::{corpus_report, load_eval_pairs, IrrReport};
use qgen_core::rules::{load_pairs, load_store, train_with, RuleStore};
use qgen_core::score::load_ratings;
use qgen_core::{generate_ranked, Annotator, Config, Morphology};
use qgen_service::{load_questions, Service, ServiceOptions};

/// Learn question transformation rules from examples and generate questions.
#[derive(Parser)]
#[command(name = "qgen", version)]
struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate plain text (or normalise an annotation TSV).
    Annotate {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Pre-computed labels that override the built-in annotators.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
    /// Learn rules from sentence/question pairs.
    Train {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate ranked questions for new sentences.
    Generate {
        #[arg(long)]
        store: PathBuf,
        /// Plain text, or annotation TSV when the extension is .tsv.
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long)]
        min_similarity: Option<f64>,
        #[arg(long)]
        min_score: Option<f64>,
        #[arg(long)]
        max_per_sentence: Option<usize>,
        #[arg(long)]
        dedup_threshold: Option<f64>,
        /// System label written into every question record.
        #[arg(long)]
        system: Option<String>,
    },
    /// Score generated questions against references, or rater agreement.
    Eval {
        #[arg(long, value_enum, default_value = "corpus")]
        mode: EvalMode,
        /// Evaluation pairs (corpus mode) or ratings CSV (irr mode).
        input: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the rating service.
    Serve {
        #[arg(long)]
        questions: PathBuf,
        #[arg(long)]
        ratings: PathBuf,
        /// Rule store that receives the feedback; saved after every rating.
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMode {
    Corpus,
    Irr,
}

/// Marks failures caused by what the user passed in.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<InputError>()
            || cause.is::<toml::de::Error>()
            || cause.is::<serde_json::Error>()
        {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<qgen_core::Error>() {
            return if e.is_input_error() { 2 } else { 1 };
        }
        if let Some(e) = cause.downcast_ref::<std::io::Error>() {
            if matches!(
                e.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::InvalidData
            ) {
                return 2;
            }
        }
    }
    1
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = read(path)?;
    let config: Config =
        toml::from_str(&text).with_context(|| format!("config {}", path.display()))?;
    Ok(config)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        let kind = e.kind();
        let err = anyhow::Error::new(e).context(format!("cannot read {}", path.display()));
        if kind == std::io::ErrorKind::NotFound {
            err.context(InputError(format!("missing input {}", path.display())))
        } else {
            err
        }
    })
}

/// Writes via a temp file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot write to {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn morphology(config: &Config) -> Result<Arc<Morphology>> {
    Ok(Arc::new(match &config.morphology_path {
        Some(path) => Morphology::bundled_with(path)
            .with_context(|| format!("morphology {}", path.display()))?,
        None => Morphology::bundled().clone(),
    }))
}

fn annotator(morph: Arc<Morphology>, annotations: Option<&Path>) -> Result<Annotator> {
    let mut annotator = Annotator::with_morphology(morph);
    if let Some(path) = annotations {
        let provider =
            FileProvider::load(path).with_context(|| format!("annotations {}", path.display()))?;
        annotator = annotator.prepend(Arc::new(provider));
    }
    Ok(annotator)
}

fn is_tsv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("tsv"))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or("doc".to_string(), |s| s.to_string_lossy().into_owned())
}

fn read_sentences(path: &Path, annotator: &Annotator) -> Result<Vec<AnnotatedSentence>> {
    if is_tsv(path) {
        read(path)?;
        return Ok(load_annotations(path)?);
    }
    Ok(annotator.annotate_text(&stem(path), &read(path)?)?)
}

fn cmd_annotate(
    config: &Config,
    input: &Path,
    output: Option<&Path>,
    annotations: Option<&Path>,
) -> Result<()> {
    let annotator = annotator(morphology(config)?, annotations)?;
    let sentences = read_sentences(input, &annotator)?;
    let mut buf = Vec::new();
    write_annotations(&mut buf, &sentences)?;
    emit(output, &buf)?;
    eprintln!("annotated {} sentences", sentences.len());
    Ok(())
}

fn cmd_train(
    config: &Config,
    pairs: &Path,
    annotations: Option<&Path>,
    output: &Path,
) -> Result<()> {
    read(pairs)?;
    let pairs = load_pairs(pairs)?;
    let morph = morphology(config)?;
    let annotator = annotator(morph.clone(), annotations)?;
    let mut store = RuleStore::new();
    let report = train_with(&mut store, &pairs, &annotator, &morph);
    if store.is_empty() {
        return Err(qgen_core::Error::NoRulesExtracted { pairs: pairs.len() }.into());
    }
    write_atomic(output, store.to_json()?.as_bytes())?;
    println!(
        "pairs: {}  rules: {}  duplicates: {}  warnings: {}",
        report.pairs,
        store.len(),
        report.duplicates,
        report.failures.len()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    mut config: Config,
    store: &Path,
    input: &Path,
    output: Option<&Path>,
    annotations: Option<&Path>,
    overrides: (Option<f64>, Option<f64>, Option<usize>, Option<f64>),
    system: Option<String>,
) -> Result<()> {
    let (min_similarity, min_score, max_per_sentence, dedup_threshold) = overrides;
    config.min_similarity = min_similarity.unwrap_or(config.min_similarity);
    config.min_score = min_score.unwrap_or(config.min_score);
    config.max_per_sentence = max_per_sentence.unwrap_or(config.max_per_sentence);
    config.dedup_threshold = dedup_threshold.unwrap_or(config.dedup_threshold);
    config.validate()?;

    read(store)?;
    let store = load_store(store)?;
    if store.is_empty() {
        return Err(qgen_core::Error::EmptyStore.into());
    }
    let morph = morphology(&config)?;
    let annotator = annotator(morph.clone(), annotations)?;
    let sentences = read_sentences(input, &annotator)?;
    let ranked = generate_ranked(&morph, &sentences, &store, &config)?;
    let mut buf = Vec::new();
    for (i, c) in ranked.iter().enumerate() {
        let mut record = c.to_record(format!("q{i}"));
        record.system = system.clone();
        serde_json::to_writer(&mut buf, &record)?;
        buf.push(b'\n');
    }
    emit(output, &buf)?;
    eprintln!(
        "generated {} questions for {} sentences",
        ranked.len(),
        sentences.len()
    );
    Ok(())
}

fn cmd_eval(mode: EvalMode, input: &Path, json: Option<&Path>) -> Result<()> {
    read(input)?;
    let (text, value) = match mode {
        EvalMode::Corpus => {
            let pairs = load_eval_pairs(input)?;
            if pairs.is_empty() {
                bail!(input_error(format!(
                    "{} holds no evaluation pairs",
                    input.display()
                )));
            }
            let report = corpus_report(&pairs)?;
            (report.to_string(), serde_json::to_value(&report)?)
        }
        EvalMode::Irr => {
            let report = IrrReport::from_log(&load_ratings(input)?);
            (report.to_string(), serde_json::to_value(&report)?)
        }
    };
    println!("{text}");
    if let Some(path) = json {
        let mut bytes = serde_json::to_vec_pretty(&value)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)?;
    }
    Ok(())
}

fn cmd_serve(
    config: &Config,
    questions: &Path,
    ratings: &Path,
    store: Option<&Path>,
    port: Option<u16>,
    host: &str,
    seed: Option<u64>,
) -> Result<()> {
    read(questions)?;
    let pool = load_questions(questions)?;
    let rules = match store {
        Some(path) => {
            read(path)?;
            Some(load_store(path)?)
        }
        None => None,
    };
    let mut options = ServiceOptions::new(ratings);
    options.store_path = store.map(Path::to_path_buf);
    options.seed = seed;
    let service = Arc::new(Service::new(pool, rules, options)?);
    let addr: SocketAddr = format!("{host}:{}", port.unwrap_or(config.port))
        .parse()
        .map_err(|e| input_error(format!("bad address: {e}")))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(qgen_service::serve(service, addr))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    config.validate()?;
    match cli.command {
        Command::Annotate {
            input,
            output,
            annotations,
        } => cmd_annotate(&config, &input, output.as_deref(), annotations.as_deref()),
        Command::Train {
            pairs,
            annotations,
            output,
        } => cmd_train(&config, &pairs, annotations.as_deref(), &output),
        Command::Generate {
            store,
            input,
            output,
            annotations,
            min_similarity,
            min_score,
            max_per_sentence,
            dedup_threshold,
            system,
        } => cmd_generate(
            config,
            &store,
            &input,
            output.as_deref(),
            annotations.as_deref(),
            (min_similarity, min_score, max_per_sentence, dedup_threshold),
            system,
        ),
        Command::Eval { mode, input, json } => cmd_eval(mode, &input, json.as_deref()),
        Command::Serve {
            questions,
            ratings,
            store,
            port,
            host,
            seed,
        } => cmd_serve(
            &config,
            &questions,
            &ratings,
            store.as_deref(),
            port,
            &host,
            seed,
        ),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, record| {
            writeln!(
                buf,
                "{}: {}",
                record.level().as_str().to_lowercase(),
                record.args()
            )
        })
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
