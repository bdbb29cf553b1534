//! Corpus domain types: category vocabularies, annotated images and the
//! market-basket transactions derived from them.
//!
//! A transaction is the *set* of distinct categories present in one
//! image; repeated detections of the same category collapse to a single
//! item. All types are immutable after construction and the operations
//! here are pure functions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rng::SplitMix64;

/// Coordinates within this distance outside [0, 1] are clamped at
/// construction; anything further out is rejected.
pub const BOX_CLAMP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusError {
    EmptyVocabulary,
    EmptyCategoryName,
    DuplicateCategory { name: String },
    InvalidCategoryIndex { image_id: String, index: usize, vocab_size: usize },
    InvalidBox { field: &'static str, value: f64 },
    InvalidScore { value: f64 },
    ImageIdMismatch { left: String, right: String },
    DuplicateImageId { image_id: String },
    EmptyImageId,
    InvalidRatios { sum: f64 },
    InvalidThreshold { value: f64 },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::EmptyVocabulary => write!(f, "vocabulary has no categories"),
            CorpusError::EmptyCategoryName => write!(f, "empty category name"),
            CorpusError::DuplicateCategory { name } => {
                write!(f, "duplicate category name {name:?}")
            }
            CorpusError::InvalidCategoryIndex { image_id, index, vocab_size } => write!(
                f,
                "image {image_id:?}: category index {index} out of range for vocabulary of {vocab_size}"
            ),
            CorpusError::InvalidBox { field, value } => {
                write!(f, "bounding box field {field} = {value} out of range")
            }
            CorpusError::InvalidScore { value } => write!(f, "score {value} outside [0, 1]"),
            CorpusError::ImageIdMismatch { left, right } => {
                write!(f, "image id mismatch: {left:?} vs {right:?}")
            }
            CorpusError::DuplicateImageId { image_id } => {
                write!(f, "duplicate image id {image_id:?}")
            }
            CorpusError::EmptyImageId => write!(f, "empty image id"),
            CorpusError::InvalidRatios { sum } => {
                write!(f, "split ratios must sum to 1.0, got {sum}")
            }
            CorpusError::InvalidThreshold { value } => {
                write!(f, "threshold {value} outside [0, 1]")
            }
        }
    }
}

impl core::error::Error for CorpusError {}

/// Ordered set of category names. Index ↔ name is a bijection with
/// 0-based indices stable in construction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryVocabulary {
    names: Vec<String>,
    by_name: BTreeMap<String, usize>,
}

impl CategoryVocabulary {
    pub fn new<I, S>(names: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(CorpusError::EmptyVocabulary);
        }
        let mut by_name = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(CorpusError::EmptyCategoryName);
            }
            if by_name.insert(name.clone(), i).is_some() {
                return Err(CorpusError::DuplicateCategory { name: name.clone() });
            }
        }
        Ok(CategoryVocabulary { names, by_name })
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Axis-aligned rectangle in normalized image coordinates:
/// center (cx, cy) in [0, 1], extents (w, h) in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

fn clamp_unit(field: &'static str, value: f64) -> Result<f64, CorpusError> {
    if value < -BOX_CLAMP_TOLERANCE || value > 1.0 + BOX_CLAMP_TOLERANCE || !value.is_finite() {
        return Err(CorpusError::InvalidBox { field, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

impl BoundingBox {
    /// Validates and clamps coordinates. Values up to `BOX_CLAMP_TOLERANCE`
    /// outside [0, 1] are pulled back in; beyond that it is an error, as is
    /// a non-positive width or height.
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self, CorpusError> {
        let cx = clamp_unit("cx", cx)?;
        let cy = clamp_unit("cy", cy)?;
        if !(w > 0.0) || w > 1.0 + BOX_CLAMP_TOLERANCE {
            return Err(CorpusError::InvalidBox { field: "w", value: w });
        }
        if !(h > 0.0) || h > 1.0 + BOX_CLAMP_TOLERANCE {
            return Err(CorpusError::InvalidBox { field: "h", value: h });
        }
        Ok(BoundingBox { cx, cy, w: w.min(1.0), h: h.min(1.0) })
    }

    pub fn left(&self) -> f64 {
        self.cx - self.w / 2.0
    }
    pub fn right(&self) -> f64 {
        self.cx + self.w / 2.0
    }
    pub fn top(&self) -> f64 {
        self.cy - self.h / 2.0
    }
    pub fn bottom(&self) -> f64 {
        self.cy + self.h / 2.0
    }
    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Where a label came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    GroundTruth,
    Detector,
}

/// One labeled rectangular region. Ground-truth annotations always carry
/// score 1.0; detector annotations carry the detector's confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub category: usize,
    pub bbox: BoundingBox,
    pub score: f64,
    pub source: Source,
}

impl Annotation {
    pub fn ground_truth(category: usize, bbox: BoundingBox) -> Self {
        Annotation { category, bbox, score: 1.0, source: Source::GroundTruth }
    }

    pub fn detected(category: usize, bbox: BoundingBox, score: f64) -> Result<Self, CorpusError> {
        if !(0.0..=1.0).contains(&score) {
            return Err(CorpusError::InvalidScore { value: score });
        }
        Ok(Annotation { category, bbox, score, source: Source::Detector })
    }
}

/// One image's labels. The image id is an opaque key; pixels are never
/// touched.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub image_id: String,
    pub annotations: Vec<Annotation>,
}

impl ImageRecord {
    pub fn new(image_id: impl Into<String>, annotations: Vec<Annotation>) -> Result<Self, CorpusError> {
        let image_id = image_id.into();
        if image_id.is_empty() {
            return Err(CorpusError::EmptyImageId);
        }
        Ok(ImageRecord { image_id, annotations })
    }
}

/// The distinct categories present in one image, as sorted indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub image_id: String,
    items: Vec<usize>,
}

impl Transaction {
    /// Items are deduplicated and sorted ascending.
    pub fn new(image_id: impl Into<String>, items: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = items.into_iter().collect();
        Transaction { image_id: image_id.into(), items: set.into_iter().collect() }
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn contains(&self, item: usize) -> bool {
        self.items.binary_search(&item).is_ok()
    }
}

/// An ordered list of transactions over one vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionSet {
    pub vocabulary: CategoryVocabulary,
    transactions: Vec<Transaction>,
}

impl TransactionSet {
    pub fn new(
        vocabulary: CategoryVocabulary,
        transactions: Vec<Transaction>,
    ) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for t in &transactions {
            if t.image_id.is_empty() {
                return Err(CorpusError::EmptyImageId);
            }
            if !seen.insert(t.image_id.as_str()) {
                return Err(CorpusError::DuplicateImageId { image_id: t.image_id.clone() });
            }
            for &item in t.items() {
                if item >= vocabulary.size() {
                    return Err(CorpusError::InvalidCategoryIndex {
                        image_id: t.image_id.clone(),
                        index: item,
                        vocab_size: vocabulary.size(),
                    });
                }
            }
        }
        // drop the borrow of transactions before moving
        drop(seen);
        Ok(TransactionSet { vocabulary, transactions })
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }
}

/// Projects one image's annotations onto its transaction: the set of
/// categories whose annotation score meets `score_threshold`.
pub fn to_transaction(
    record: &ImageRecord,
    vocab: &CategoryVocabulary,
    score_threshold: f64,
) -> Result<Transaction, CorpusError> {
    if !(0.0..=1.0).contains(&score_threshold) {
        return Err(CorpusError::InvalidThreshold { value: score_threshold });
    }
    let mut items = BTreeSet::new();
    for a in &record.annotations {
        if a.category >= vocab.size() {
            return Err(CorpusError::InvalidCategoryIndex {
                image_id: record.image_id.clone(),
                index: a.category,
                vocab_size: vocab.size(),
            });
        }
        if a.score >= score_threshold {
            items.insert(a.category);
        }
    }
    Ok(Transaction::new(record.image_id.clone(), items))
}

/// Concatenates ground-truth and detector labels for the same image,
/// ground truth first. No annotation-level dedup: duplicates collapse
/// later at the transaction level.
pub fn merge(ground_truth: &ImageRecord, detected: &ImageRecord) -> Result<ImageRecord, CorpusError> {
    if ground_truth.image_id != detected.image_id {
        return Err(CorpusError::ImageIdMismatch {
            left: ground_truth.image_id.clone(),
            right: detected.image_id.clone(),
        });
    }
    let mut annotations = ground_truth.annotations.clone();
    annotations.extend(detected.annotations.iter().cloned());
    ImageRecord::new(ground_truth.image_id.clone(), annotations)
}

/// Deterministic train/validation/test partition.
///
/// The ids are shuffled by a Fisher-Yates walk driven by SplitMix64 (see
/// [`crate::rng`]) seeded with `seed`. Bucket sizes are
/// `|val| = round(n·valFrac)`, `|test| = round(n·testFrac)` (round half
/// up) with the remainder going to the training bucket.
pub fn split(
    ids: &[String],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<(Vec<String>, Vec<String>, Vec<String>), CorpusError> {
    let (train_frac, val_frac, test_frac) = ratios;
    let sum = train_frac + val_frac + test_frac;
    if !(sum - 1.0 <= 1e-9 && 1.0 - sum <= 1e-9)
        || train_frac < 0.0
        || val_frac < 0.0
        || test_frac < 0.0
    {
        return Err(CorpusError::InvalidRatios { sum });
    }
    let n = ids.len();
    let mut shuffled: Vec<String> = ids.to_vec();
    SplitMix64::new(seed).shuffle(&mut shuffled);

    // round half up; values are nonnegative so the cast truncates toward zero
    let n_val = (n as f64 * val_frac + 0.5) as usize;
    let n_test = (n as f64 * test_frac + 0.5) as usize;
    let n_val = n_val.min(n);
    let n_test = n_test.min(n - n_val);
    let n_train = n - n_val - n_test;

    let test = shuffled.split_off(n_train + n_val);
    let val = shuffled.split_off(n_train);
    Ok((shuffled, val, test))
}
