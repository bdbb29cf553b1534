//! Core types and algorithms for mining object co-occurrence rules from
//! labeled image corpora.
//!
//! The crate is `no_std` (with `alloc`) and fully deterministic: every
//! operation that consumes randomness takes an explicit 64-bit seed and
//! runs the [`rng::SplitMix64`] generator documented in that module, so
//! identical seeds produce identical output on every platform.
//!
//! Modules:
//!
//! - [`corpus`] — vocabularies, annotations, transactions, corpus split
//!   and ground-truth/detector merge.
//! - [`miner`] — Apriori frequent-itemset mining and association rules
//!   with support, confidence and lift.
//! - [`analysis`] — frequency tables, rule graphs, parallel-coordinates
//!   rows, IoU and detection evaluation.
//! - [`synth`] — synthetic transaction corpora with planted rules.

#![no_std]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod analysis;
pub mod corpus;
pub mod miner;
pub mod rng;
pub mod synth;

pub use corpus::{
    Annotation, BoundingBox, CategoryVocabulary, CorpusError, ImageRecord, Source, Transaction,
    TransactionSet,
};
pub use miner::{AssociationRule, Itemset, MinerError, MiningParams};
