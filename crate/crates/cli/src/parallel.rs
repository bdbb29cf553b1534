//! Multi-worker frequent-itemset mining.
//!
//! Each Apriori level's candidate list is split into contiguous chunks,
//! one per worker; workers count their chunk against the shared bitmap
//! counter and the results are stitched back together in chunk order.
//! Counting is exact, so the output is bit-identical for any worker
//! count and equal to the single-threaded
//! [`sceneminer_core::miner::frequent_itemsets`].

use sceneminer_core::corpus::TransactionSet;
use sceneminer_core::miner::{
    filter_frequent, generate_candidates, Itemset, MinerError, MiningParams, SupportCounter,
};

pub fn frequent_itemsets_parallel(
    ts: &TransactionSet,
    params: &MiningParams,
    workers: usize,
) -> Result<Vec<Itemset>, MinerError> {
    params.validate()?;
    let workers = workers.max(1);
    let n = ts.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let counter = SupportCounter::new(ts);
    let mut out: Vec<Itemset> = Vec::new();

    let count_all = |candidates: &[Vec<usize>]| -> Result<Vec<u64>, MinerError> {
        if candidates.is_empty() {
            return Ok(Vec::new());
        }
        let chunk_size = candidates.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = candidates
                .chunks(chunk_size)
                .map(|chunk| {
                    let counter = &counter;
                    scope.spawn(move || {
                        chunk
                            .iter()
                            .map(|c| counter.count(c))
                            .collect::<Result<Vec<u64>, MinerError>>()
                    })
                })
                .collect();
            let mut counts = Vec::with_capacity(candidates.len());
            for handle in handles {
                counts.extend(handle.join().expect("worker panicked")?);
            }
            Ok(counts)
        })
    };

    let singletons: Vec<Vec<usize>> = (0..ts.vocabulary.size()).map(|i| vec![i]).collect();
    let counts = count_all(&singletons)?;
    let mut level = filter_frequent(singletons, &counts, n, params.min_support);

    let mut k = 1;
    while !level.is_empty() {
        out.extend(level.iter().cloned());
        k += 1;
        if k > params.max_itemset_len {
            break;
        }
        let prev: Vec<Vec<usize>> = level.iter().map(|s| s.items.clone()).collect();
        let candidates = generate_candidates(&prev);
        let counts = count_all(&candidates)?;
        level = filter_frequent(candidates, &counts, n, params.min_support);
    }
    Ok(out)
}
