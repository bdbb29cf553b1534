//! On-disk formats: category lists, per-image label files, detector
//! output documents and plain transaction tables.
//!
//! All parsers are pure text-in/value-out and never silently drop a
//! malformed line; every rejection names the offending position.
//! Writers emit LF line endings only.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use sceneminer_core::corpus::{
    to_transaction, Annotation, BoundingBox, CategoryVocabulary, CorpusError, ImageRecord,
    Transaction, TransactionSet,
};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("no categories found")]
    NoCategories,
    #[error("duplicate category {name:?} on lines {first_line} and {second_line}")]
    DuplicateCategory { name: String, first_line: usize, second_line: usize },
    #[error("line {line}: expected 5 fields `classId cx cy w h`, got {fields}")]
    WrongFieldCount { line: usize, fields: usize },
    #[error("line {line}: non-numeric field {field:?}")]
    NonNumericField { line: usize, field: String },
    #[error("line {line}: class id {class_id} out of range for vocabulary of {vocab_size}")]
    ClassOutOfRange { line: usize, class_id: usize, vocab_size: usize },
    #[error("line {line}: {source}")]
    BadBox { line: usize, source: CorpusError },
    #[error("malformed detections document at byte offset {offset}: {message}")]
    MalformedDocument { offset: usize, message: String },
    #[error("duplicate image id {image_id:?}")]
    DuplicateImageId { image_id: String },
    #[error("unknown category {name:?}")]
    UnknownCategory { name: String },
    #[error("detection score {score} outside [0, 1]")]
    ScoreOutOfRange { score: f64 },
    #[error("line {line}: empty item token")]
    EmptyItemToken { line: usize },
    #[error("line {line}: missing TAB separator")]
    MissingSeparator { line: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Input locations for one ingest run.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusManifest {
    pub categories_path: PathBuf,
    pub label_dirs: Vec<PathBuf>,
    #[serde(default)]
    pub detections_path: Option<PathBuf>,
    #[serde(default = "default_score_threshold")]
    pub score_threshold: f64,
}

fn default_score_threshold() -> f64 {
    0.5
}

/// Parses a category list: one name per non-empty line, `#` starts a
/// comment line, blank and comment lines do not consume an index.
pub fn parse_categories(text: &str) -> Result<CategoryVocabulary, IngestError> {
    let mut names: Vec<String> = Vec::new();
    let mut first_seen: BTreeMap<String, usize> = BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(&first_line) = first_seen.get(line) {
            return Err(IngestError::DuplicateCategory {
                name: line.to_string(),
                first_line,
                second_line: line_no + 1,
            });
        }
        first_seen.insert(line.to_string(), line_no + 1);
        names.push(line.to_string());
    }
    if names.is_empty() {
        return Err(IngestError::NoCategories);
    }
    Ok(CategoryVocabulary::new(names)?)
}

/// Parses one label file: each non-empty line is `classId cx cy w h`
/// with normalized float coordinates. Produces ground-truth annotations
/// with score 1.0.
pub fn parse_label_file(
    text: &str,
    vocab: &CategoryVocabulary,
) -> Result<Vec<Annotation>, IngestError> {
    let mut annotations = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let line_no = line_no + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(IngestError::WrongFieldCount { line: line_no, fields: fields.len() });
        }
        let class_id: usize = fields[0]
            .parse()
            .map_err(|_| IngestError::NonNumericField { line: line_no, field: fields[0].into() })?;
        if class_id >= vocab.size() {
            return Err(IngestError::ClassOutOfRange {
                line: line_no,
                class_id,
                vocab_size: vocab.size(),
            });
        }
        let mut coords = [0f64; 4];
        for (i, f) in fields[1..].iter().enumerate() {
            coords[i] = f.parse().map_err(|_| IngestError::NonNumericField {
                line: line_no,
                field: (*f).into(),
            })?;
        }
        let bbox = BoundingBox::new(coords[0], coords[1], coords[2], coords[3])
            .map_err(|source| IngestError::BadBox { line: line_no, source })?;
        annotations.push(Annotation::ground_truth(class_id, bbox));
    }
    Ok(annotations)
}

/// Serializes annotations back to the label-file format with full float
/// round-trip precision; `parse_label_file` inverts it exactly.
pub fn write_label_file(annotations: &[Annotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            a.category, a.bbox.cx, a.bbox.cy, a.bbox.w, a.bbox.h
        ));
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CategoryRef {
    Name(String),
    Index(usize),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DetectionBoxDoc {
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DetectionDoc {
    category: CategoryRef,
    score: f64,
    #[serde(rename = "box")]
    bbox: DetectionBoxDoc,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DetectionRecordDoc {
    image_id: String,
    detections: Vec<DetectionDoc>,
}

/// Parses a detector-output document: a JSON array of
/// `{imageId, detections: [{category, score, box: {cx, cy, w, h}}]}`
/// records. Categories may be names or indices.
pub fn parse_detections(
    text: &str,
    vocab: &CategoryVocabulary,
) -> Result<Vec<ImageRecord>, IngestError> {
    let docs: Vec<DetectionRecordDoc> = serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        IngestError::MalformedDocument { offset, message: e.to_string() }
    })?;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut records = Vec::with_capacity(docs.len());
    for doc in docs {
        if !seen.insert(doc.image_id.clone()) {
            return Err(IngestError::DuplicateImageId { image_id: doc.image_id });
        }
        let mut annotations = Vec::with_capacity(doc.detections.len());
        for det in doc.detections {
            let category = match det.category {
                CategoryRef::Name(name) => vocab
                    .index_of(&name)
                    .ok_or(IngestError::UnknownCategory { name })?,
                CategoryRef::Index(i) if i < vocab.size() => i,
                CategoryRef::Index(i) => {
                    return Err(IngestError::ClassOutOfRange {
                        line: 0,
                        class_id: i,
                        vocab_size: vocab.size(),
                    })
                }
            };
            if !(0.0..=1.0).contains(&det.score) {
                return Err(IngestError::ScoreOutOfRange { score: det.score });
            }
            let bbox = BoundingBox::new(det.bbox.cx, det.bbox.cy, det.bbox.w, det.bbox.h)
                .map_err(IngestError::Corpus)?;
            annotations.push(Annotation::detected(category, bbox, det.score)?);
        }
        records.push(ImageRecord::new(doc.image_id, annotations)?);
    }
    Ok(records)
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.lines().enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len() + 1;
    }
    offset
}

/// Parses a transactions table: one `imageId<TAB>item1,item2,...` line
/// per image. An id with no TAB (or nothing after it) is an empty
/// transaction. When `vocab` is absent a vocabulary is inferred from the
/// file, name-sorted for determinism.
pub fn parse_transactions_table(
    text: &str,
    vocab: Option<&CategoryVocabulary>,
) -> Result<TransactionSet, IngestError> {
    struct RawLine {
        image_id: String,
        items: Vec<String>,
    }
    let mut raw_lines = Vec::new();
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    let mut inferred: BTreeSet<String> = BTreeSet::new();
    for (line_no, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line_no = line_no + 1;
        let (image_id, items_part) = match raw.split_once('\t') {
            Some((id, rest)) => (id.trim(), rest.trim()),
            None => (raw.trim(), ""),
        };
        if image_id.is_empty() {
            return Err(IngestError::MissingSeparator { line: line_no });
        }
        if !seen_ids.insert(image_id.to_string()) {
            return Err(IngestError::DuplicateImageId { image_id: image_id.to_string() });
        }
        let mut items = Vec::new();
        if !items_part.is_empty() {
            for token in items_part.split(',') {
                let token = token.trim();
                if token.is_empty() {
                    return Err(IngestError::EmptyItemToken { line: line_no });
                }
                inferred.insert(token.to_string());
                items.push(token.to_string());
            }
        }
        raw_lines.push(RawLine { image_id: image_id.to_string(), items });
    }

    let vocabulary = match vocab {
        Some(v) => v.clone(),
        None => {
            if inferred.is_empty() && raw_lines.is_empty() {
                // empty file: empty transaction set over a placeholder-free
                // vocabulary is impossible, so use a single unused name
                return Ok(TransactionSet::new(
                    CategoryVocabulary::new(["__empty__"])?,
                    Vec::new(),
                )?);
            }
            if inferred.is_empty() {
                CategoryVocabulary::new(["__empty__"])?
            } else {
                CategoryVocabulary::new(inferred.iter().cloned())?
            }
        }
    };

    let mut transactions = Vec::with_capacity(raw_lines.len());
    for line in raw_lines {
        let mut indices = Vec::with_capacity(line.items.len());
        for name in &line.items {
            let idx = vocabulary
                .index_of(name)
                .ok_or_else(|| IngestError::UnknownCategory { name: name.clone() })?;
            indices.push(idx);
        }
        transactions.push(Transaction::new(line.image_id, indices));
    }
    Ok(TransactionSet::new(vocabulary, transactions)?)
}

/// Writes a transactions table with items name-sorted per line.
/// `parse_transactions_table(write_transactions_table(ts))` reproduces
/// the set exactly (modulo the canonical item ordering).
pub fn write_transactions_table(ts: &TransactionSet) -> String {
    let mut out = String::new();
    for t in ts.transactions() {
        let mut names: Vec<&str> =
            t.items().iter().map(|&i| ts.vocabulary.name(i).unwrap_or("?")).collect();
        names.sort_unstable();
        out.push_str(t.image_id.as_str());
        out.push('\t');
        out.push_str(&names.join(","));
        out.push('\n');
    }
    out
}

/// Full ingest pipeline over in-memory file contents: label files keyed
/// by image id, optional detector records, merge and projection to
/// transactions. Images with zero annotations are kept as empty
/// transactions unless `drop_empty` is set.
pub fn build_transactions(
    vocab: &CategoryVocabulary,
    labels: &[(String, Vec<Annotation>)],
    detections: &[ImageRecord],
    score_threshold: f64,
    drop_empty: bool,
) -> Result<TransactionSet, IngestError> {
    let mut records: BTreeMap<String, ImageRecord> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (image_id, annotations) in labels {
        if records.contains_key(image_id) {
            return Err(IngestError::DuplicateImageId { image_id: image_id.clone() });
        }
        records.insert(
            image_id.clone(),
            ImageRecord::new(image_id.clone(), annotations.clone())?,
        );
        order.push(image_id.clone());
    }
    for det in detections {
        match records.get_mut(&det.image_id) {
            Some(existing) => {
                *existing = sceneminer_core::corpus::merge(existing, det)?;
            }
            None => {
                records.insert(det.image_id.clone(), det.clone());
                order.push(det.image_id.clone());
            }
        }
    }
    let mut transactions = Vec::new();
    for image_id in order {
        let record = &records[&image_id];
        let t = to_transaction(record, vocab, score_threshold)?;
        if drop_empty && t.items().is_empty() {
            continue;
        }
        transactions.push(t);
    }
    Ok(TransactionSet::new(vocab.clone(), transactions)?)
}
