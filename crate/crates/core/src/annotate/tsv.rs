//! Token-per-line annotation files:
//! `INDEX TEXT LEMMA POS NER GKG VIAF SST`, blocks headed by `# id=<source_id>`.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::{AnnotatedSentence, LabelSet, LayerId, Layers};
use crate::error::{Error, Result};

const COLUMNS: usize = 8;
const FILE_LAYERS: [LayerId; 6] = [
    LayerId::Lemma,
    LayerId::Pos,
    LayerId::Ner,
    LayerId::Gkg,
    LayerId::Viaf,
    LayerId::Sst,
];

struct Block {
    id: String,
    header_line: usize,
    texts: Vec<String>,
    layers: Layers,
}

impl Block {
    fn new(id: String, header_line: usize) -> Self {
        Block {
            id,
            header_line,
            texts: Vec::new(),
            layers: FILE_LAYERS.iter().map(|&l| (l, Vec::new())).collect(),
        }
    }
}

pub fn parse_annotations(text: &str, source_name: &str) -> Result<Vec<AnnotatedSentence>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<Block> = None;
    let mut finish = |block: Block, out: &mut Vec<AnnotatedSentence>| -> Result<()> {
        if !seen.insert(block.id.clone()) {
            return Err(Error::DuplicateSourceId(block.id));
        }
        let line = block.header_line;
        let sentence = AnnotatedSentence::new(block.id, block.texts, block.layers)
            .map_err(|e| Error::format(source_name, line, e.to_string()))?;
        out.push(sentence);
        Ok(())
    };

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(block) = current.take() {
                finish(block, &mut out)?;
            }
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let header = header.trim();
            let Some(id) = header.strip_prefix("id=") else {
                continue; // free comment
            };
            if let Some(block) = current.take() {
                finish(block, &mut out)?;
            }
            current = Some(Block::new(id.trim().to_string(), line_no));
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(Error::format(
                source_name,
                line_no,
                format!(
                    "expected {COLUMNS} tab-separated columns, found {}",
                    cols.len()
                ),
            ));
        }
        let block =
            current.get_or_insert_with(|| Block::new(format!("{source_name}:{line_no}"), line_no));
        let index: usize = cols[0].parse().map_err(|_| {
            Error::format(
                source_name,
                line_no,
                format!("bad token index {:?}", cols[0]),
            )
        })?;
        if index != block.texts.len() {
            return Err(Error::format(
                source_name,
                line_no,
                format!("token index {index}, expected {}", block.texts.len()),
            ));
        }
        block.texts.push(cols[1].to_string());
        for (layer, cell) in FILE_LAYERS.iter().zip(&cols[2..]) {
            block
                .layers
                .get_mut(layer)
                .unwrap()
                .push(LabelSet::parse(cell));
        }
    }
    if let Some(block) = current.take() {
        finish(block, &mut out)?;
    }
    Ok(out)
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotatedSentence>> {
    let text = std::fs::read_to_string(path)?;
    parse_annotations(&text, &path.display().to_string())
}

pub fn write_annotations<W: Write>(mut out: W, sentences: &[AnnotatedSentence]) -> Result<()> {
    for (k, s) in sentences.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# id={}", s.source_id)?;
        for (i, token) in s.tokens().iter().enumerate() {
            write!(out, "{i}\t{}", token.text)?;
            for layer in FILE_LAYERS {
                write!(out, "\t{}", s.cell(layer, i).render())?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Writes atomically: a temp file in the target directory is renamed over `path`.
pub fn save_annotations(path: &Path, sentences: &[AnnotatedSentence]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write_annotations(std::io::BufWriter::new(tmp.as_file_mut()), sentences)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
