//! Exhaustive-enumeration oracle for frequent itemsets and rules.
//!
//! Deliberately naive: every non-empty subset of the item universe is
//! counted by scanning the raw transaction lists, with no candidate
//! generation, pruning or bitmaps shared with the implementation under
//! test. Only usable at toy scale.

#![allow(dead_code)]

use sceneminer_core::corpus::TransactionSet;
use sceneminer_core::miner::MiningParams;

pub struct OracleRule {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

fn naive_count(items: &[usize], ts: &TransactionSet) -> u64 {
    ts.transactions()
        .iter()
        .filter(|t| items.iter().all(|&i| t.items().contains(&i)))
        .count() as u64
}

fn all_subsets(universe: usize) -> Vec<Vec<usize>> {
    let mut subsets = Vec::new();
    for mask in 1u64..(1u64 << universe) {
        let items: Vec<usize> = (0..universe).filter(|&i| mask & (1 << i) != 0).collect();
        subsets.push(items);
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// All frequent itemsets as (items, count), sorted by (length, lex).
pub fn brute_force_frequent(ts: &TransactionSet, params: &MiningParams) -> Vec<(Vec<usize>, u64)> {
    let n = ts.len();
    if n == 0 {
        return Vec::new();
    }
    all_subsets(ts.vocabulary.size())
        .into_iter()
        .filter(|items| items.len() <= params.max_itemset_len)
        .map(|items| {
            let count = naive_count(&items, ts);
            (items, count)
        })
        .filter(|(_, count)| *count as f64 / n as f64 >= params.min_support)
        .collect()
}

/// All rules over the frequent itemsets, in the same enumeration order
/// the miner uses: per frequent Z (length >= 2) in (length, lex) order,
/// RHS subsets by increasing bitmask over Z's sorted items.
pub fn brute_force_rules(ts: &TransactionSet, params: &MiningParams) -> Vec<OracleRule> {
    let n = ts.len() as f64;
    let mut rules = Vec::new();
    for (z, z_count) in brute_force_frequent(ts, params) {
        let k = z.len();
        if k < 2 {
            continue;
        }
        for mask in 1u64..(1u64 << k) - 1 {
            let rhs: Vec<usize> =
                (0..k).filter(|&b| mask & (1 << b) != 0).map(|b| z[b]).collect();
            if rhs.len() > params.max_rhs_len {
                continue;
            }
            let lhs: Vec<usize> =
                (0..k).filter(|&b| mask & (1 << b) == 0).map(|b| z[b]).collect();
            let lhs_count = naive_count(&lhs, ts);
            let rhs_count = naive_count(&rhs, ts);
            let confidence = z_count as f64 / lhs_count as f64;
            if confidence >= params.min_confidence {
                rules.push(OracleRule {
                    lhs,
                    rhs,
                    support: z_count as f64 / n,
                    confidence,
                    lift: confidence / (rhs_count as f64 / n),
                });
            }
        }
    }
    rules
}
