//! Derived views over transactions and rules: frequency tables, rule
//! graphs, parallel-coordinates rows, IoU and detection evaluation.
//!
//! Everything here is a pure derivation over immutable inputs; the row
//! and edge orders are total, so repeated runs produce identical output.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Annotation, BoundingBox, CategoryVocabulary, ImageRecord, TransactionSet};
use crate::miner::{AssociationRule, MinerError, SupportCounter};

/// Per-category presence counts, sorted by count descending then name.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub rows: Vec<FrequencyRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyRow {
    pub name: String,
    pub count: u64,
    pub fraction: f64,
}

/// Counts, per category, the transactions containing it (presence, not
/// instance count). Categories absent from every transaction get no row.
pub fn frequency_table(ts: &TransactionSet) -> FrequencyTable {
    let n = ts.len();
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for t in ts.transactions() {
        for &item in t.items() {
            *counts.entry(item).or_insert(0) += 1;
        }
    }
    let mut rows: Vec<FrequencyRow> = counts
        .into_iter()
        .map(|(item, count)| FrequencyRow {
            name: ts.vocabulary.name(item).unwrap_or("?").into(),
            count,
            fraction: count as f64 / n as f64,
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.name.cmp(&b.name)));
    FrequencyTable { rows }
}

/// Co-occurrence rule graph: one node per item appearing in any rule,
/// one edge per distinct (lhs, rhs) pair. The node `frequency` is the
/// item's singleton support in the transaction set; renderers are meant
/// to map edge `support` to node radius and `lift` to color intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub name: String,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEdge {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

/// Builds the rule graph. Duplicate (lhs, rhs) pairs are rejected: the
/// first occurrence wins and later ones leave the graph unchanged.
pub fn build_rule_graph(
    rules: &[AssociationRule],
    ts: &TransactionSet,
) -> Result<RuleGraph, MinerError> {
    let n = ts.len();
    let counter = SupportCounter::new(ts);
    let mut items: BTreeSet<usize> = BTreeSet::new();
    let mut seen: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    let mut edges = Vec::new();
    let name = |item: usize| -> String { ts.vocabulary.name(item).unwrap_or("?").into() };
    for rule in rules {
        if !seen.insert((rule.lhs.clone(), rule.rhs.clone())) {
            continue;
        }
        items.extend(rule.lhs.iter().copied());
        items.extend(rule.rhs.iter().copied());
        edges.push(GraphEdge {
            lhs: rule.lhs.iter().map(|&i| name(i)).collect(),
            rhs: rule.rhs.iter().map(|&i| name(i)).collect(),
            support: rule.support,
            confidence: rule.confidence,
            lift: rule.lift,
        });
    }
    let mut nodes = Vec::with_capacity(items.len());
    for item in items {
        let count = counter.count(&[item])?;
        nodes.push(GraphNode {
            name: name(item),
            frequency: if n == 0 { 0.0 } else { count as f64 / n as f64 },
        });
    }
    Ok(RuleGraph { nodes, edges })
}

/// Ranks items by the number of rules they touch on the antecedent side
/// and on the consequent side. Ties break lexicographically by name.
pub fn top_endpoints(
    rules: &[AssociationRule],
    vocab: &CategoryVocabulary,
    k: usize,
) -> (Vec<(String, usize)>, Vec<(String, usize)>) {
    let mut lhs_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rhs_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for rule in rules {
        for &item in &rule.lhs {
            *lhs_counts.entry(item).or_insert(0) += 1;
        }
        for &item in &rule.rhs {
            *rhs_counts.entry(item).or_insert(0) += 1;
        }
    }
    let rank = |counts: BTreeMap<usize, usize>| -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = counts
            .into_iter()
            .map(|(item, c)| (String::from(vocab.name(item).unwrap_or("?")), c))
            .collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out.truncate(k);
        out
    };
    (rank(lhs_counts), rank(rhs_counts))
}

/// Parallel-coordinates rows, one per rule: LHS items on ordered
/// position axes, then the RHS, then the metrics. `width` is the number
/// of position cells (max LHS length across rules plus one for the RHS);
/// shorter rows are padded with `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParacoordTable {
    pub width: usize,
    pub rows: Vec<ParacoordRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParacoordRow {
    /// LHS cells (padded with `None`) followed by the RHS cell.
    pub cells: Vec<Option<String>>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

/// LHS items are placed in descending item frequency over `ts`, ties by
/// index, so the layout is deterministic.
pub fn paracoord(rules: &[AssociationRule], ts: &TransactionSet) -> Result<ParacoordTable, MinerError> {
    let counter = SupportCounter::new(ts);
    let mut freq_of: BTreeMap<usize, u64> = BTreeMap::new();
    for rule in rules {
        for &item in rule.lhs.iter().chain(rule.rhs.iter()) {
            if let alloc::collections::btree_map::Entry::Vacant(e) = freq_of.entry(item) {
                e.insert(counter.count(&[item])?);
            }
        }
    }
    let max_lhs = rules.iter().map(|r| r.lhs.len()).max().unwrap_or(0);
    let width = max_lhs + 1;
    let name = |item: usize| -> String { ts.vocabulary.name(item).unwrap_or("?").into() };
    let mut rows = Vec::with_capacity(rules.len());
    for rule in rules {
        let mut lhs = rule.lhs.clone();
        lhs.sort_by(|a, b| freq_of[b].cmp(&freq_of[a]).then_with(|| a.cmp(b)));
        let mut cells: Vec<Option<String>> = lhs.into_iter().map(|i| Some(name(i))).collect();
        cells.resize(max_lhs, None);
        // multi-item consequents render joined with '+'
        let rhs_names: Vec<String> = rule.rhs.iter().map(|&i| name(i)).collect();
        cells.push(Some(rhs_names.join("+")));
        rows.push(ParacoordRow {
            cells,
            support: rule.support,
            confidence: rule.confidence,
            lift: rule.lift,
        });
    }
    Ok(ParacoordTable { width, rows })
}

/// Intersection-over-union of two normalized boxes, in [0, 1].
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let x_left = a.left().max(b.left());
    let x_right = a.right().min(b.right());
    let y_top = a.top().max(b.top());
    let y_bottom = a.bottom().min(b.bottom());
    let iw = x_right - x_left;
    let ih = y_bottom - y_top;
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    inter / union
}

/// Per-category detection quality at one IoU threshold. `precision` and
/// `recall` are `None` when their denominator is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionEvalReport {
    pub iou_threshold: f64,
    pub per_category: Vec<CategoryEval>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryEval {
    pub category: usize,
    pub name: String,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

/// Greedy per-image, per-category matching: detections in descending
/// score order claim the best still-unmatched ground-truth box, a pair
/// matches iff IoU meets the threshold, and each ground-truth box is
/// consumed at most once. Detections for images absent from the ground
/// truth all count as false positives.
pub fn evaluate_detections(
    ground_truth: &[ImageRecord],
    detections: &[ImageRecord],
    vocab: &CategoryVocabulary,
    iou_threshold: f64,
) -> Result<DetectionEvalReport, MinerError> {
    let mut tp: BTreeMap<usize, u64> = BTreeMap::new();
    let mut fp: BTreeMap<usize, u64> = BTreeMap::new();
    let mut fnn: BTreeMap<usize, u64> = BTreeMap::new();

    let check = |a: &Annotation| -> Result<(), MinerError> {
        if a.category >= vocab.size() {
            return Err(MinerError::InvalidItem { item: a.category, vocab_size: vocab.size() });
        }
        Ok(())
    };

    let gt_by_id: BTreeMap<&str, &ImageRecord> =
        ground_truth.iter().map(|r| (r.image_id.as_str(), r)).collect();
    let det_ids: BTreeSet<&str> = detections.iter().map(|r| r.image_id.as_str()).collect();

    for det_record in detections {
        let empty = Vec::new();
        let gt_annotations = gt_by_id
            .get(det_record.image_id.as_str())
            .map(|r| &r.annotations)
            .unwrap_or(&empty);
        // group per category
        let mut categories: BTreeSet<usize> = BTreeSet::new();
        for a in det_record.annotations.iter().chain(gt_annotations.iter()) {
            check(a)?;
            categories.insert(a.category);
        }
        for cat in categories {
            let gt_boxes: Vec<&Annotation> =
                gt_annotations.iter().filter(|a| a.category == cat).collect();
            let mut dets: Vec<&Annotation> =
                det_record.annotations.iter().filter(|a| a.category == cat).collect();
            dets.sort_by(|a, b| b.score.total_cmp(&a.score));

            let mut claimed = alloc::vec![false; gt_boxes.len()];
            for d in dets {
                let mut best: Option<(usize, f64)> = None;
                for (gi, g) in gt_boxes.iter().enumerate() {
                    if claimed[gi] {
                        continue;
                    }
                    let overlap = iou(&d.bbox, &g.bbox);
                    if overlap >= iou_threshold
                        && best.map_or(true, |(_, b)| overlap > b)
                    {
                        best = Some((gi, overlap));
                    }
                }
                match best {
                    Some((gi, _)) => {
                        claimed[gi] = true;
                        *tp.entry(cat).or_insert(0) += 1;
                    }
                    None => {
                        *fp.entry(cat).or_insert(0) += 1;
                    }
                }
            }
            let unmatched = claimed.iter().filter(|&&c| !c).count() as u64;
            if unmatched > 0 {
                *fnn.entry(cat).or_insert(0) += unmatched;
            }
        }
    }

    // ground-truth images the detector never reported on: all boxes missed
    for gt_record in ground_truth {
        if det_ids.contains(gt_record.image_id.as_str()) {
            continue;
        }
        for a in &gt_record.annotations {
            check(a)?;
            *fnn.entry(a.category).or_insert(0) += 1;
        }
    }

    let mut all_cats: BTreeSet<usize> = BTreeSet::new();
    all_cats.extend(tp.keys());
    all_cats.extend(fp.keys());
    all_cats.extend(fnn.keys());
    let per_category = all_cats
        .into_iter()
        .map(|cat| {
            let t = tp.get(&cat).copied().unwrap_or(0);
            let p = fp.get(&cat).copied().unwrap_or(0);
            let n = fnn.get(&cat).copied().unwrap_or(0);
            CategoryEval {
                category: cat,
                name: vocab.name(cat).unwrap_or("?").into(),
                true_positives: t,
                false_positives: p,
                false_negatives: n,
                precision: (t + p > 0).then(|| t as f64 / (t + p) as f64),
                recall: (t + n > 0).then(|| t as f64 / (t + n) as f64),
            }
        })
        .collect();
    Ok(DetectionEvalReport { iou_threshold, per_category })
}
