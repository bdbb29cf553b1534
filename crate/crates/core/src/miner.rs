//! Apriori frequent-itemset mining and association-rule generation.
//!
//! Support counting runs over per-item transaction bitmaps: each item
//! owns one bit row of `ceil(n/64)` words, and the support of an itemset
//! is the popcount of the AND of its rows. Counts are exact integers;
//! support, confidence and lift are computed in double precision only at
//! the reporting boundary.
//!
//! Mining is level-wise: frequent 1-itemsets by direct count, then for
//! each level a candidate join of frequent (k-1)-itemsets sharing a
//! (k-2)-prefix, pruning of candidates with any infrequent (k-1)-subset,
//! and a bitmap counting pass. The level primitives
//! ([`SupportCounter`], [`generate_candidates`], [`filter_frequent`])
//! are public so callers can distribute the counting pass; output is
//! defined to be identical however the counting is scheduled.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{CategoryVocabulary, TransactionSet};

#[derive(Debug, Clone, PartialEq)]
pub enum MinerError {
    EmptyItemset,
    InvalidItem { item: usize, vocab_size: usize },
    InvalidParams { reason: &'static str },
    InconsistentFrequents { reason: String },
}

impl fmt::Display for MinerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinerError::EmptyItemset => write!(f, "itemset must be non-empty"),
            MinerError::InvalidItem { item, vocab_size } => {
                write!(f, "item index {item} out of range for vocabulary of {vocab_size}")
            }
            MinerError::InvalidParams { reason } => write!(f, "invalid mining parameters: {reason}"),
            MinerError::InconsistentFrequents { reason } => {
                write!(f, "frequent itemsets inconsistent with transaction set: {reason}")
            }
        }
    }
}

impl core::error::Error for MinerError {}

/// A sorted, duplicate-free set of item indices with its exact support
/// count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Itemset {
    pub items: Vec<usize>,
    pub count: u64,
}

/// An association rule LHS → RHS with its three metrics. The exact
/// transaction counts behind the metrics are kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRule {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
    pub union_count: u64,
    pub lhs_count: u64,
    pub rhs_count: u64,
}

/// Mining thresholds. Defaults reproduce a reporting regime of
/// min support 0.01, min confidence 0.9 and single-item consequents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    pub min_support: f64,
    pub min_confidence: f64,
    pub max_itemset_len: usize,
    pub max_rhs_len: usize,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            min_support: 0.01,
            min_confidence: 0.9,
            max_itemset_len: usize::MAX,
            max_rhs_len: 1,
        }
    }
}

impl MiningParams {
    pub fn validate(&self) -> Result<(), MinerError> {
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(MinerError::InvalidParams { reason: "min_support must be in (0, 1]" });
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(MinerError::InvalidParams { reason: "min_confidence must be in [0, 1]" });
        }
        if self.max_itemset_len < 1 {
            return Err(MinerError::InvalidParams { reason: "max_itemset_len must be >= 1" });
        }
        if self.max_rhs_len < 1 {
            return Err(MinerError::InvalidParams { reason: "max_rhs_len must be >= 1" });
        }
        Ok(())
    }
}

/// Per-item transaction bitmaps for exact support counting.
pub struct SupportCounter {
    words_per_item: usize,
    bits: Vec<u64>,
    num_items: usize,
    num_transactions: usize,
}

impl SupportCounter {
    pub fn new(ts: &TransactionSet) -> Self {
        let n = ts.len();
        let num_items = ts.vocabulary.size();
        let words_per_item = n.div_ceil(64);
        let mut bits = alloc::vec![0u64; words_per_item * num_items];
        for (t_idx, t) in ts.transactions().iter().enumerate() {
            let word = t_idx / 64;
            let mask = 1u64 << (t_idx % 64);
            for &item in t.items() {
                bits[item * words_per_item + word] |= mask;
            }
        }
        SupportCounter { words_per_item, bits, num_items, num_transactions: n }
    }

    pub fn num_transactions(&self) -> usize {
        self.num_transactions
    }

    fn row(&self, item: usize) -> &[u64] {
        &self.bits[item * self.words_per_item..(item + 1) * self.words_per_item]
    }

    /// Exact number of transactions containing every item of `items`.
    pub fn count(&self, items: &[usize]) -> Result<u64, MinerError> {
        let (&first, rest) = items.split_first().ok_or(MinerError::EmptyItemset)?;
        for &item in items {
            if item >= self.num_items {
                return Err(MinerError::InvalidItem { item, vocab_size: self.num_items });
            }
        }
        let first_row = self.row(first);
        let mut total = 0u64;
        for w in 0..self.words_per_item {
            let mut acc = first_row[w];
            for &item in rest {
                acc &= self.row(item)[w];
            }
            total += acc.count_ones() as u64;
        }
        Ok(total)
    }
}

/// Number of transactions in `ts` containing the whole itemset.
pub fn support_count(items: &[usize], ts: &TransactionSet) -> Result<u64, MinerError> {
    SupportCounter::new(ts).count(items)
}

/// Candidate join + prune for one Apriori level. `prev` must be the
/// sorted frequent (k-1)-itemsets; the result is the sorted list of
/// k-candidates whose (k-1)-subsets are all frequent.
pub fn generate_candidates(prev: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let prev_set: BTreeSet<&[usize]> = prev.iter().map(Vec::as_slice).collect();
    let mut candidates = Vec::new();
    for (i, a) in prev.iter().enumerate() {
        let (a_last, a_prefix) = a.split_last().unwrap();
        for b in &prev[i + 1..] {
            let (b_last, b_prefix) = b.split_last().unwrap();
            if a_prefix != b_prefix {
                // prev is sorted, so no later b shares this prefix either
                break;
            }
            debug_assert!(a_last < b_last);
            let mut cand = a.clone();
            cand.push(*b_last);
            // prune: every (k-1)-subset must be frequent
            let mut keep = true;
            for drop_idx in 0..cand.len() {
                let mut sub = cand.clone();
                sub.remove(drop_idx);
                if !prev_set.contains(sub.as_slice()) {
                    keep = false;
                    break;
                }
            }
            if keep {
                candidates.push(cand);
            }
        }
    }
    candidates
}

/// Keeps the candidates whose support meets `min_support`, pairing each
/// with its count. `counts` must align with `candidates`.
pub fn filter_frequent(
    candidates: Vec<Vec<usize>>,
    counts: &[u64],
    n: usize,
    min_support: f64,
) -> Vec<Itemset> {
    candidates
        .into_iter()
        .zip(counts)
        .filter(|(_, &c)| c as f64 / n as f64 >= min_support)
        .map(|(items, &count)| Itemset { items, count })
        .collect()
}

/// Level-wise Apriori. Output is sorted by (length ascending, then
/// lexicographic item order) and is fully deterministic.
pub fn frequent_itemsets(
    ts: &TransactionSet,
    params: &MiningParams,
) -> Result<Vec<Itemset>, MinerError> {
    params.validate()?;
    let n = ts.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let counter = SupportCounter::new(ts);
    let mut out: Vec<Itemset> = Vec::new();

    // L1 by direct scan
    let mut level: Vec<Itemset> = Vec::new();
    for item in 0..ts.vocabulary.size() {
        let count = counter.count(&[item])?;
        if count as f64 / n as f64 >= params.min_support {
            level.push(Itemset { items: alloc::vec![item], count });
        }
    }

    let mut k = 1;
    while !level.is_empty() {
        out.extend(level.iter().cloned());
        k += 1;
        if k > params.max_itemset_len {
            break;
        }
        let prev: Vec<Vec<usize>> = level.iter().map(|s| s.items.clone()).collect();
        let candidates = generate_candidates(&prev);
        let counts: Vec<u64> = candidates
            .iter()
            .map(|c| counter.count(c))
            .collect::<Result<_, _>>()?;
        level = filter_frequent(candidates, &counts, n, params.min_support);
    }
    Ok(out)
}

/// Emits every rule X → Y over the frequent itemsets: for each frequent
/// Z with |Z| ≥ 2 and each partition Z = X ⊎ Y with 1 ≤ |Y| ≤
/// `max_rhs_len`, the rule is kept iff its confidence meets
/// `min_confidence`. Lift denominators use the directly counted
/// consequent support even when the consequent alone is infrequent.
pub fn generate_rules(
    frequents: &[Itemset],
    ts: &TransactionSet,
    params: &MiningParams,
) -> Result<Vec<AssociationRule>, MinerError> {
    params.validate()?;
    let n = ts.len() as u64;
    let vocab_size = ts.vocabulary.size();
    let mut count_of: BTreeMap<&[usize], u64> = BTreeMap::new();
    for s in frequents {
        if s.items.is_empty() {
            return Err(MinerError::EmptyItemset);
        }
        for &item in &s.items {
            if item >= vocab_size {
                return Err(MinerError::InconsistentFrequents {
                    reason: alloc::format!("item index {item} out of vocabulary range"),
                });
            }
        }
        if s.count > n {
            return Err(MinerError::InconsistentFrequents {
                reason: alloc::format!("count {} exceeds transaction count {n}", s.count),
            });
        }
        count_of.insert(&s.items, s.count);
    }

    let counter = SupportCounter::new(ts);
    let lookup = |items: &[usize]| -> Result<u64, MinerError> {
        match count_of.get(items) {
            Some(&c) => Ok(c),
            None => counter.count(items),
        }
    };

    let mut rules = Vec::new();
    for z in frequents.iter().filter(|z| z.items.len() >= 2) {
        let k = z.items.len();
        // enumerate non-empty proper subsets of z as RHS via bitmask
        for mask in 1u64..(1u64 << k) - 1 {
            let rhs_len = mask.count_ones() as usize;
            if rhs_len > params.max_rhs_len {
                continue;
            }
            let mut lhs = Vec::with_capacity(k - rhs_len);
            let mut rhs = Vec::with_capacity(rhs_len);
            for (bit, &item) in z.items.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    rhs.push(item);
                } else {
                    lhs.push(item);
                }
            }
            let lhs_count = lookup(&lhs)?;
            let confidence = z.count as f64 / lhs_count as f64;
            if confidence >= params.min_confidence {
                let rhs_count = lookup(&rhs)?;
                let support = z.count as f64 / n as f64;
                let lift = confidence / (rhs_count as f64 / n as f64);
                rules.push(AssociationRule {
                    lhs,
                    rhs,
                    support,
                    confidence,
                    lift,
                    union_count: z.count,
                    lhs_count,
                    rhs_count,
                });
            }
        }
    }
    Ok(rules)
}

/// Sorts rules by confidence descending, then lift descending, then
/// support descending, then lexicographic (lhs, rhs). The order is total,
/// so ranking is stable and deterministic.
pub fn rank_rules(rules: &mut [AssociationRule]) {
    rules.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then_with(|| b.lift.total_cmp(&a.lift))
            .then_with(|| b.support.total_cmp(&a.support))
            .then_with(|| a.lhs.cmp(&b.lhs))
            .then_with(|| a.rhs.cmp(&b.rhs))
    });
}

/// Rounds half up to `decimals` places and renders with exactly that many
/// digits, e.g. `format_fraction(11.0/916.0, 4)` = `"0.0120"`.
pub fn format_fraction(value: f64, decimals: u32) -> String {
    let scale = 10u64.pow(decimals);
    let scaled = (value * scale as f64 + 0.5) as u64;
    if decimals == 0 {
        return alloc::format!("{scaled}");
    }
    let int_part = scaled / scale;
    let frac_part = scaled % scale;
    alloc::format!("{int_part}.{frac_part:0width$}", width = decimals as usize)
}

/// `{a,b}` rendering of an itemset's names.
pub fn format_itemset(items: &[usize], vocab: &CategoryVocabulary) -> String {
    let mut out = String::from("{");
    for (i, &item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(vocab.name(item).unwrap_or("?"));
    }
    out.push('}');
    out
}

/// One tab-separated rule row: LHS, RHS, support, confidence (rounded
/// half-up to `decimals` places) and lift (to `decimals - 1`).
pub fn format_rule_row(rule: &AssociationRule, vocab: &CategoryVocabulary, decimals: u32) -> String {
    alloc::format!(
        "{}\t{}\t{}\t{}\t{}",
        format_itemset(&rule.lhs, vocab),
        format_itemset(&rule.rhs, vocab),
        format_fraction(rule.support, decimals),
        format_fraction(rule.confidence, decimals),
        format_fraction(rule.lift, decimals.saturating_sub(1))
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Transaction;
    use alloc::vec;

    fn ts(items: &[&str], rows: &[&[usize]]) -> TransactionSet {
        let vocab = CategoryVocabulary::new(items.iter().copied()).unwrap();
        let transactions = rows
            .iter()
            .enumerate()
            .map(|(i, row)| Transaction::new(alloc::format!("t{i}"), row.iter().copied()))
            .collect();
        TransactionSet::new(vocab, transactions).unwrap()
    }

    #[test]
    fn support_count_examples() {
        let ts = ts(&["person", "mask"], &[&[0, 1], &[0], &[1]]);
        assert_eq!(support_count(&[0], &ts).unwrap(), 2);
        assert_eq!(support_count(&[0, 1], &ts).unwrap(), 1);
        assert!(matches!(support_count(&[], &ts), Err(MinerError::EmptyItemset)));
        assert!(matches!(support_count(&[9], &ts), Err(MinerError::InvalidItem { .. })));
    }

    #[test]
    fn frequent_itemsets_small_fixture() {
        // {a,b},{a,b},{a},{b,c} at min support 0.5 -> {a}(3), {b}(3), {a,b}(2)
        let ts = ts(&["a", "b", "c"], &[&[0, 1], &[0, 1], &[0], &[1, 2]]);
        let params = MiningParams { min_support: 0.5, ..MiningParams::default() };
        let out = frequent_itemsets(&ts, &params).unwrap();
        let got: Vec<(Vec<usize>, u64)> =
            out.iter().map(|s| (s.items.clone(), s.count)).collect();
        assert_eq!(got, vec![(vec![0], 3), (vec![1], 3), (vec![0, 1], 2)]);
    }

    #[test]
    fn frequent_itemsets_boundaries() {
        let t = ts(&["x"], &[&[0]]);
        let params = MiningParams { min_support: 0.5, ..MiningParams::default() };
        let out = frequent_itemsets(&t, &params).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].items, vec![0]);
        assert_eq!(out[0].count, 1);

        // min support 1.0 keeps only itemsets present in every transaction
        let t = ts(&["a", "b"], &[&[0, 1], &[0]]);
        let params = MiningParams { min_support: 1.0, ..MiningParams::default() };
        let out = frequent_itemsets(&t, &params).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].items, vec![0]);

        // empty transaction set -> empty result
        let empty = ts(&["a"], &[]);
        assert!(frequent_itemsets(&empty, &MiningParams::default()).unwrap().is_empty());
    }

    #[test]
    fn generate_rules_hand_arithmetic() {
        // Z={a,b} count 2, count(a)=3, count(b)=3, N=4
        let t = ts(&["a", "b"], &[&[0, 1], &[0, 1], &[0], &[1]]);
        let params = MiningParams {
            min_support: 0.25,
            min_confidence: 0.0,
            max_rhs_len: 1,
            ..MiningParams::default()
        };
        let freq = frequent_itemsets(&t, &params).unwrap();
        let rules = generate_rules(&freq, &t, &params).unwrap();
        let ab = rules
            .iter()
            .find(|r| r.lhs == vec![0] && r.rhs == vec![1])
            .expect("a->b emitted");
        assert!((ab.support - 0.5).abs() < 1e-12);
        assert!((ab.confidence - 2.0 / 3.0).abs() < 1e-12);
        assert!((ab.lift - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn generate_rules_confidence_one_fixture() {
        // 14 transactions with {buildings,street,outside}; many without.
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for _ in 0..14 {
            rows.push(vec![0, 1, 2]);
        }
        for _ in 0..100 {
            rows.push(vec![2]); // outside alone
        }
        let row_refs: Vec<&[usize]> = rows.iter().map(Vec::as_slice).collect();
        let t = ts(&["buildings", "street", "outside"], &row_refs);
        let params = MiningParams { min_support: 0.05, min_confidence: 0.9, ..MiningParams::default() };
        let freq = frequent_itemsets(&t, &params).unwrap();
        let rules = generate_rules(&freq, &t, &params).unwrap();
        let r = rules
            .iter()
            .find(|r| r.lhs == vec![0, 1] && r.rhs == vec![2])
            .expect("{buildings,street}->{outside} emitted");
        assert_eq!(r.confidence, 1.0);
    }

    #[test]
    fn max_rhs_len_limits_consequents() {
        let t = ts(&["a", "b", "c"], &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]]);
        let params = MiningParams {
            min_support: 0.5,
            min_confidence: 0.0,
            max_rhs_len: 1,
            ..MiningParams::default()
        };
        let freq = frequent_itemsets(&t, &params).unwrap();
        let rules = generate_rules(&freq, &t, &params).unwrap();
        assert!(!rules.is_empty());
        assert!(rules.iter().all(|r| r.rhs.len() == 1));
    }

    #[test]
    fn rank_rules_ordering() {
        let mk = |conf: f64, lift: f64, sup: f64, lhs: Vec<usize>| AssociationRule {
            lhs,
            rhs: vec![9],
            support: sup,
            confidence: conf,
            lift,
            union_count: 0,
            lhs_count: 0,
            rhs_count: 0,
        };
        let mut rules = vec![
            mk(0.9, 1.0, 0.1, vec![1]),
            mk(1.0, 3.427, 0.1, vec![2]),
            mk(1.0, 11.731, 0.1, vec![3]),
            mk(1.0, 11.731, 0.1, vec![0]),
        ];
        rank_rules(&mut rules);
        assert_eq!(rules[0].lhs, vec![0]);
        assert_eq!(rules[1].lhs, vec![3]);
        assert_eq!(rules[2].lhs, vec![2]);
        assert_eq!(rules[3].lhs, vec![1]);
    }

    #[test]
    fn format_fraction_half_up() {
        assert_eq!(format_fraction(11.0 / 916.0, 4), "0.0120");
        assert_eq!(format_fraction(1.0, 4), "1.0000");
        assert_eq!(format_fraction(1.59686, 3), "1.597");
        assert_eq!(format_fraction(0.00005, 4), "0.0001");
    }

    #[test]
    fn format_rule_row_braces() {
        let vocab = CategoryVocabulary::new(["buildings", "street", "outside"]).unwrap();
        let rule = AssociationRule {
            lhs: vec![0, 1],
            rhs: vec![2],
            support: 14.0 / 916.0,
            confidence: 1.0,
            lift: 3.427,
            union_count: 14,
            lhs_count: 14,
            rhs_count: 267,
        };
        let row = format_rule_row(&rule, &vocab, 4);
        assert_eq!(row, "{buildings,street}\t{outside}\t0.0153\t1.0000\t3.427");
    }
}
