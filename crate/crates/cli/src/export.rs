//! Export writers: rule and itemset tables, frequency and
//! parallel-coordinates tables, DOT and JSON rule graphs, and the
//! detection evaluation report.
//!
//! All tables are tab-separated with LF endings; fractions are rendered
//! half-up to 4 decimals (lift to 3), mirroring the rule-table layout
//! ID, LHS, RHS, SUPPORT, CONFIDENCE, LIFT.

use sceneminer_core::analysis::{DetectionEvalReport, FrequencyTable, ParacoordTable, RuleGraph};
use sceneminer_core::corpus::CategoryVocabulary;
use sceneminer_core::miner::{format_fraction, format_itemset, AssociationRule, Itemset};

pub const RULES_HEADER: &str = "ID\tLHS\tRHS\tSUPPORT\tCONFIDENCE\tLIFT";

/// Ranked rules as a table in Table-layout column order.
pub fn rules_table(rules: &[AssociationRule], vocab: &CategoryVocabulary) -> String {
    let mut out = String::from(RULES_HEADER);
    out.push('\n');
    for (i, rule) in rules.iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            i + 1,
            format_itemset(&rule.lhs, vocab),
            format_itemset(&rule.rhs, vocab),
            format_fraction(rule.support, 4),
            format_fraction(rule.confidence, 4),
            format_fraction(rule.lift, 3),
        ));
    }
    out
}

/// Frequent itemsets with exact counts and 4-decimal supports.
pub fn itemsets_table(itemsets: &[Itemset], vocab: &CategoryVocabulary, n: usize) -> String {
    let mut out = String::from("ITEMSET\tCOUNT\tSUPPORT\n");
    for s in itemsets {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            format_itemset(&s.items, vocab),
            s.count,
            format_fraction(s.count as f64 / n.max(1) as f64, 4),
        ));
    }
    out
}

pub fn frequency_tsv(table: &FrequencyTable) -> String {
    let mut out = String::from("CATEGORY\tCOUNT\tFRACTION\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            row.name,
            row.count,
            format_fraction(row.fraction, 4)
        ));
    }
    out
}

pub fn paracoord_tsv(table: &ParacoordTable) -> String {
    let mut out = String::new();
    for i in 1..table.width {
        out.push_str(&format!("P{i}\t"));
    }
    out.push_str("RHS\tSUPPORT\tCONFIDENCE\tLIFT\n");
    for row in &table.rows {
        for cell in &row.cells {
            out.push_str(cell.as_deref().unwrap_or(""));
            out.push('\t');
        }
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            format_fraction(row.support, 4),
            format_fraction(row.confidence, 4),
            format_fraction(row.lift, 3),
        ));
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

/// Graphviz DOT export. Node `width` is proportional to the item's
/// corpus frequency, edge `penwidth` and gray level come from lift, and
/// hyperedges (multi-item sides) are joined node lists on both ends.
pub fn graph_dot(graph: &RuleGraph) -> String {
    let mut out = String::from("digraph rules {\n");
    out.push_str("  node [shape=circle style=filled fillcolor=lightgray];\n");
    for node in &graph.nodes {
        out.push_str(&format!(
            "  \"{}\" [width={}];\n",
            dot_escape(&node.name),
            format_fraction(0.3 + node.frequency, 3),
        ));
    }
    let max_lift = graph
        .edges
        .iter()
        .map(|e| e.lift)
        .fold(1.0f64, f64::max);
    for edge in &graph.edges {
        let intensity = (edge.lift / max_lift).clamp(0.0, 1.0);
        // darker gray for stronger lift
        let gray = 90 - (intensity * 70.0) as i32;
        for lhs in &edge.lhs {
            for rhs in &edge.rhs {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [penwidth={} color=\"gray{}\" label=\"{}\"];\n",
                    dot_escape(lhs),
                    dot_escape(rhs),
                    format_fraction(0.5 + 2.0 * intensity, 2),
                    gray,
                    format_fraction(edge.support, 4),
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Structured JSON export with the documented field names `nodeId`,
/// `frequency`, `lhs`, `rhs`, `support`, `confidence`, `lift`.
pub fn graph_json(graph: &RuleGraph) -> String {
    use serde_json::{json, Value};
    let nodes: Vec<Value> = graph
        .nodes
        .iter()
        .map(|n| json!({ "nodeId": n.name, "frequency": n.frequency }))
        .collect();
    let edges: Vec<Value> = graph
        .edges
        .iter()
        .map(|e| {
            json!({
                "lhs": e.lhs,
                "rhs": e.rhs,
                "support": e.support,
                "confidence": e.confidence,
                "lift": e.lift,
            })
        })
        .collect();
    let doc = json!({ "nodes": nodes, "edges": edges });
    let mut text = serde_json::to_string_pretty(&doc).expect("graph document serializes");
    text.push('\n');
    text
}

pub fn eval_report_tsv(report: &DetectionEvalReport) -> String {
    let mut out = format!(
        "# iouThreshold={}\nCATEGORY\tTP\tFP\tFN\tPRECISION\tRECALL\n",
        format_fraction(report.iou_threshold, 2)
    );
    let cell = |v: Option<f64>| match v {
        Some(x) => format_fraction(x, 4),
        None => "undefined".to_string(),
    };
    for row in &report.per_category {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            row.name,
            row.true_positives,
            row.false_positives,
            row.false_negatives,
            cell(row.precision),
            cell(row.recall),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sceneminer_core::analysis::{build_rule_graph, frequency_table, paracoord};
    use sceneminer_core::corpus::{Transaction, TransactionSet};

    fn fixture() -> (TransactionSet, Vec<AssociationRule>) {
        let vocab = CategoryVocabulary::new(["a", "b", "c"]).unwrap();
        let ts = TransactionSet::new(
            vocab,
            vec![
                Transaction::new("t0", [0, 1, 2]),
                Transaction::new("t1", [0, 1]),
                Transaction::new("t2", [0]),
            ],
        )
        .unwrap();
        let rules = vec![AssociationRule {
            lhs: vec![1],
            rhs: vec![0],
            support: 2.0 / 3.0,
            confidence: 1.0,
            lift: 1.0,
            union_count: 2,
            lhs_count: 2,
            rhs_count: 3,
        }];
        (ts, rules)
    }

    #[test]
    fn rules_table_layout() {
        let (ts, rules) = fixture();
        let text = rules_table(&rules, &ts.vocabulary);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RULES_HEADER);
        assert_eq!(lines.next().unwrap(), "1\t{b}\t{a}\t0.6667\t1.0000\t1.000");
    }

    #[test]
    fn dot_has_one_arrow_per_singleton_edge() {
        let (ts, rules) = fixture();
        let graph = build_rule_graph(&rules, &ts).unwrap();
        let dot = graph_dot(&graph);
        assert_eq!(dot.matches(" -> ").count(), 1);
        assert!(dot.starts_with("digraph rules {"));
    }

    #[test]
    fn json_graph_field_names() {
        let (ts, rules) = fixture();
        let graph = build_rule_graph(&rules, &ts).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&graph_json(&graph)).unwrap();
        assert!(doc["nodes"][0]["nodeId"].is_string());
        assert!(doc["nodes"][0]["frequency"].is_number());
        assert!(doc["edges"][0]["lift"].is_number());
        assert_eq!(doc["edges"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn empty_rule_set_exports_are_valid() {
        let (ts, _) = fixture();
        let graph = build_rule_graph(&[], &ts).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&graph_json(&graph)).unwrap();
        assert_eq!(doc["edges"].as_array().unwrap().len(), 0);
        assert!(graph_dot(&graph).contains("digraph rules"));
        let table = paracoord(&[], &ts).unwrap();
        assert!(paracoord_tsv(&table).ends_with("LIFT\n"));
    }

    #[test]
    fn frequency_tsv_rows() {
        let (ts, _) = fixture();
        let text = frequency_tsv(&frequency_table(&ts));
        assert_eq!(text, "CATEGORY\tCOUNT\tFRACTION\na\t3\t1.0000\nb\t2\t0.6667\nc\t1\t0.3333\n");
    }
}
