//! JSON description of a synthetic corpus.
//!
//! Schema:
//!
//! ```json
//! {
//!   "categories": ["person", "kiss", "mask"],
//!   "n": 10000,
//!   "seed": 7,
//!   "baseRates": { "person": 0.6, "mask": 0.3 },
//!   "planted": [
//!     { "lhs": ["kiss"], "rhs": ["person"], "lhsRate": 0.012, "conditional": 1.0 }
//!   ]
//! }
//! ```
//!
//! Categories missing from `baseRates` default to 0. The `seed` field is
//! optional and falls back to the CLI seed.

use std::collections::BTreeMap;

use sceneminer_core::corpus::CategoryVocabulary;
use sceneminer_core::synth::{PlantedRule, SynthSpec};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthSpecError {
    #[error("malformed synth spec: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unknown category {name:?} in {place}")]
    UnknownCategory { name: String, place: &'static str },
    #[error(transparent)]
    Corpus(#[from] sceneminer_core::corpus::CorpusError),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PlantedRuleDoc {
    lhs: Vec<String>,
    rhs: Vec<String>,
    lhs_rate: f64,
    conditional: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SynthSpecDoc {
    categories: Vec<String>,
    n: usize,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    base_rates: BTreeMap<String, f64>,
    #[serde(default)]
    planted: Vec<PlantedRuleDoc>,
}

/// Parses a synth spec document. `default_seed` applies when the file
/// has no `seed` field.
pub fn parse_synth_spec(text: &str, default_seed: u64) -> Result<SynthSpec, SynthSpecError> {
    let doc: SynthSpecDoc = serde_json::from_str(text)?;
    let vocabulary = CategoryVocabulary::new(doc.categories.iter().cloned())?;
    let mut base_rates = vec![0.0; vocabulary.size()];
    for (name, rate) in &doc.base_rates {
        let idx = vocabulary
            .index_of(name)
            .ok_or_else(|| SynthSpecError::UnknownCategory { name: name.clone(), place: "baseRates" })?;
        base_rates[idx] = *rate;
    }
    let to_indices = |names: &[String], place: &'static str| -> Result<Vec<usize>, SynthSpecError> {
        names
            .iter()
            .map(|name| {
                vocabulary
                    .index_of(name)
                    .ok_or_else(|| SynthSpecError::UnknownCategory { name: name.clone(), place })
            })
            .collect()
    };
    let planted = doc
        .planted
        .iter()
        .map(|r| {
            Ok(PlantedRule {
                lhs: to_indices(&r.lhs, "planted.lhs")?,
                rhs: to_indices(&r.rhs, "planted.rhs")?,
                lhs_rate: r.lhs_rate,
                conditional: r.conditional,
            })
        })
        .collect::<Result<Vec<_>, SynthSpecError>>()?;
    Ok(SynthSpec {
        vocabulary,
        n: doc.n,
        base_rates,
        planted,
        seed: doc.seed.unwrap_or(default_seed),
    })
}
