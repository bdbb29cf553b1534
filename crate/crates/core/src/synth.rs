//! Synthetic transaction corpora with planted association rules.
//!
//! Generation is single-threaded and the PRNG stream order is part of
//! the contract, so a seed pins the corpus bit for bit:
//!
//! For transaction `t` (ids `t000000`, `t000001`, ...):
//!
//! 1. one uniform draw per vocabulary item, in index order; item `i`
//!    joins the transaction when the draw is below `base_rates[i]`;
//! 2. per planted rule, in list order, exactly two uniform draws: the
//!    first injects the full LHS when below `lhs_rate`; the second adds
//!    the RHS when the complete LHS is present in the transaction (from
//!    any route) and the draw is below `conditional`.
//!
//! Because injection only ever adds items, the expected support of an
//! isolated rule's LHS is `lhs_rate + (1 − lhs_rate)·∏ base_rates[i]`
//! for i in the LHS, and a rule with `conditional = 1.0` yields mined
//! confidence exactly 1.0 whenever its LHS occurs.

use alloc::collections::BTreeSet;

use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{CategoryVocabulary, CorpusError, Transaction, TransactionSet};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    InvalidRate { field: &'static str, value: f64 },
    EmptySide { side: &'static str },
    OverlappingSides,
    InvalidItem { item: usize, vocab_size: usize },
    ZeroTransactions,
    RateCountMismatch { rates: usize, vocab_size: usize },
    Corpus(CorpusError),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::InvalidRate { field, value } => {
                write!(f, "rate {field} = {value} outside [0, 1]")
            }
            SynthError::EmptySide { side } => write!(f, "planted rule {side} must be non-empty"),
            SynthError::OverlappingSides => write!(f, "planted rule LHS and RHS overlap"),
            SynthError::InvalidItem { item, vocab_size } => {
                write!(f, "item index {item} out of range for vocabulary of {vocab_size}")
            }
            SynthError::ZeroTransactions => write!(f, "transaction count must be >= 1"),
            SynthError::RateCountMismatch { rates, vocab_size } => {
                write!(f, "{rates} base rates for vocabulary of {vocab_size}")
            }
            SynthError::Corpus(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SynthError {}

impl From<CorpusError> for SynthError {
    fn from(e: CorpusError) -> Self {
        SynthError::Corpus(e)
    }
}

/// A rule planted into the corpus: the full LHS is injected with
/// probability `lhs_rate` per transaction, and the RHS follows with
/// probability `conditional` whenever the LHS is present.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedRule {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
    pub lhs_rate: f64,
    pub conditional: f64,
}

/// Full description of a synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub vocabulary: CategoryVocabulary,
    pub n: usize,
    pub base_rates: Vec<f64>,
    pub planted: Vec<PlantedRule>,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n == 0 {
            return Err(SynthError::ZeroTransactions);
        }
        let vocab_size = self.vocabulary.size();
        if self.base_rates.len() != vocab_size {
            return Err(SynthError::RateCountMismatch {
                rates: self.base_rates.len(),
                vocab_size,
            });
        }
        for &rate in &self.base_rates {
            if !(0.0..=1.0).contains(&rate) {
                return Err(SynthError::InvalidRate { field: "base_rate", value: rate });
            }
        }
        for rule in &self.planted {
            if rule.lhs.is_empty() {
                return Err(SynthError::EmptySide { side: "LHS" });
            }
            if rule.rhs.is_empty() {
                return Err(SynthError::EmptySide { side: "RHS" });
            }
            let lhs: BTreeSet<usize> = rule.lhs.iter().copied().collect();
            if rule.rhs.iter().any(|i| lhs.contains(i)) {
                return Err(SynthError::OverlappingSides);
            }
            for &item in rule.lhs.iter().chain(rule.rhs.iter()) {
                if item >= vocab_size {
                    return Err(SynthError::InvalidItem { item, vocab_size });
                }
            }
            if !(rule.lhs_rate > 0.0 && rule.lhs_rate <= 1.0) {
                return Err(SynthError::InvalidRate { field: "lhs_rate", value: rule.lhs_rate });
            }
            if !(rule.conditional > 0.0 && rule.conditional <= 1.0) {
                return Err(SynthError::InvalidRate {
                    field: "conditional",
                    value: rule.conditional,
                });
            }
        }
        Ok(())
    }
}

/// Generates the corpus described by `spec`. Deterministic given the
/// spec's seed; see the module docs for the exact draw order.
pub fn generate(spec: &SynthSpec) -> Result<TransactionSet, SynthError> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let vocab_size = spec.vocabulary.size();
    let mut transactions = Vec::with_capacity(spec.n);
    for t_idx in 0..spec.n {
        let mut items: BTreeSet<usize> = BTreeSet::new();
        for item in 0..vocab_size {
            if rng.next_f64() < spec.base_rates[item] {
                items.insert(item);
            }
        }
        for rule in &spec.planted {
            let inject = rng.next_f64() < rule.lhs_rate;
            if inject {
                items.extend(rule.lhs.iter().copied());
            }
            let follow = rng.next_f64() < rule.conditional;
            if rule.lhs.iter().all(|i| items.contains(i)) && follow {
                items.extend(rule.rhs.iter().copied());
            }
        }
        transactions.push(Transaction::new(alloc::format!("t{t_idx:06}"), items));
    }
    Ok(TransactionSet::new(spec.vocabulary.clone(), transactions)?)
}
