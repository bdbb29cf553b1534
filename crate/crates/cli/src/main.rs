//! `sceneminer` — mine association rules from per-image object labels.
//!
//! Exit codes: 0 success, 2 usage/config/parse error, 3 internal
//! invariant violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sceneminer::config::{FileConfig, MiningFlags, RunConfig};
use sceneminer::export;
use sceneminer::ingest;
use sceneminer::parallel::frequent_itemsets_parallel;
use sceneminer::synthspec::parse_synth_spec;
use sceneminer_core::analysis;
use sceneminer_core::corpus;
use sceneminer_core::miner;

#[derive(Parser)]
#[command(name = "sceneminer", version, about = "Association-rule mining over image object annotations")]
struct Cli {
    /// Optional TOML config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Obj,
}

#[derive(clap::Args)]
struct MiningArgs {
    /// Minimum rule/itemset support in (0, 1]
    #[arg(long)]
    min_support: Option<f64>,
    /// Minimum rule confidence in [0, 1]
    #[arg(long)]
    min_confidence: Option<f64>,
    /// Maximum frequent itemset length
    #[arg(long)]
    max_len: Option<usize>,
    /// Maximum consequent (RHS) length
    #[arg(long)]
    max_rhs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse labels and detections into a canonical transactions table
    Ingest {
        /// Category list, one name per line
        #[arg(long)]
        categories: PathBuf,
        /// Directory of `<imageId>.txt` label files (repeatable)
        #[arg(long = "labels")]
        label_dirs: Vec<PathBuf>,
        /// Detector output JSON document
        #[arg(long)]
        detections: Option<PathBuf>,
        /// Minimum detector score for an annotation to count
        #[arg(long)]
        score_threshold: Option<f64>,
        /// Drop images whose transaction would be empty
        #[arg(long)]
        drop_empty: bool,
        /// Output transactions table ("-" for stdout)
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Mine frequent itemsets and ranked association rules from a table
    Mine {
        /// Input transactions table
        input: PathBuf,
        #[command(flatten)]
        mining: MiningArgs,
        /// Worker threads for candidate counting
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Directory receiving rules.tsv and itemsets.tsv
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Export the rule graph of a transactions table
    Graph {
        input: PathBuf,
        #[command(flatten)]
        mining: MiningArgs,
        /// Output format: `dot` or `obj` (structured JSON)
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Category frequency table of a transactions table
    Freq {
        input: PathBuf,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Parallel-coordinates rows for the mined rules
    Paracoord {
        input: PathBuf,
        #[command(flatten)]
        mining: MiningArgs,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Deterministic train/validation/test split of an id list
    Split {
        /// File with one id per line
        ids: PathBuf,
        /// Comma-separated fractions, e.g. 0.7,0.2,0.1
        #[arg(long, default_value = "0.7,0.2,0.1")]
        ratios: String,
        #[arg(long, env = "NM_SEED")]
        seed: Option<u64>,
        /// Directory receiving train.txt, val.txt, test.txt
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate a synthetic transactions table from a spec file
    Synth {
        /// Synth spec JSON document
        spec: PathBuf,
        #[arg(long, env = "NM_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Evaluate detector output against ground-truth label files
    Eval {
        #[arg(long)]
        categories: PathBuf,
        /// Directory of ground-truth label files
        #[arg(long)]
        gt_dir: PathBuf,
        /// Detector output JSON document
        #[arg(long)]
        detections: PathBuf,
        /// IoU threshold for a detection to match a ground-truth box
        #[arg(long)]
        iou: Option<f64>,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
}

enum AppError {
    /// Bad input or configuration: exit 2
    Usage(String),
    /// Broken internal invariant: exit 3
    Internal(String),
}

impl AppError {
    fn usage(e: impl std::fmt::Display) -> Self {
        AppError::Usage(e.to_string())
    }
}

type AppResult<T> = Result<T, AppError>;

fn read_file(path: &Path) -> AppResult<String> {
    fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, content: &str) -> AppResult<()> {
    if path.as_os_str() == "-" {
        std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| AppError::Internal(format!("stdout: {e}")))
    } else {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)
                    .map_err(|e| AppError::Usage(format!("cannot create {}: {e}", parent.display())))?;
            }
        }
        fs::write(path, content)
            .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display())))
    }
}

/// Reads every `*.txt` file of `dir` in filename order; the stem is the
/// image id.
fn read_label_dir(
    dir: &Path,
    vocab: &corpus::CategoryVocabulary,
) -> AppResult<Vec<(String, Vec<corpus::Annotation>)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let image_id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| AppError::Usage(format!("bad label filename {}", path.display())))?
            .to_string();
        let text = read_file(&path)?;
        let annotations = ingest::parse_label_file(&text, vocab)
            .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
        out.push((image_id, annotations));
    }
    Ok(out)
}

fn load_table(path: &Path) -> AppResult<corpus::TransactionSet> {
    let text = read_file(path)?;
    ingest::parse_transactions_table(&text, None)
        .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))
}

fn mine_rules(
    ts: &corpus::TransactionSet,
    params: &miner::MiningParams,
    workers: usize,
) -> AppResult<(Vec<miner::Itemset>, Vec<miner::AssociationRule>)> {
    params.validate().map_err(AppError::usage)?;
    let frequents = frequent_itemsets_parallel(ts, params, workers)
        .map_err(|e| AppError::Internal(e.to_string()))?;
    let mut rules = miner::generate_rules(&frequents, ts, params)
        .map_err(|e| AppError::Internal(e.to_string()))?;
    miner::rank_rules(&mut rules);
    Ok((frequents, rules))
}

fn parse_ratios(text: &str) -> AppResult<(f64, f64, f64)> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| AppError::Usage(format!("bad ratios {text:?}: {e}")))?;
    if parts.len() != 3 {
        return Err(AppError::Usage(format!("ratios need 3 comma-separated values, got {}", parts.len())));
    }
    Ok((parts[0], parts[1], parts[2]))
}

fn run(cli: Cli) -> AppResult<()> {
    let file_config = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(AppError::usage)?,
        None => FileConfig::default(),
    };
    let resolve = |mining: MiningFlags,
                   score_threshold: Option<f64>,
                   iou: Option<f64>,
                   seed: Option<u64>,
                   out_dir: Option<PathBuf>| {
        RunConfig::resolve(&file_config, mining, score_threshold, iou, seed, out_dir)
    };
    let no_mining_flags =
        || MiningFlags { min_support: None, min_confidence: None, max_len: None, max_rhs: None };
    let mining_flags = |m: &MiningArgs| MiningFlags {
        min_support: m.min_support,
        min_confidence: m.min_confidence,
        max_len: m.max_len,
        max_rhs: m.max_rhs,
    };

    match cli.command {
        Command::Ingest { categories, label_dirs, detections, score_threshold, drop_empty, out } => {
            let cfg = resolve(no_mining_flags(), score_threshold, None, None, None);
            let vocab = ingest::parse_categories(&read_file(&categories)?)
                .map_err(|e| AppError::Usage(format!("{}: {e}", categories.display())))?;
            let mut labels = Vec::new();
            for dir in &label_dirs {
                labels.extend(read_label_dir(dir, &vocab)?);
            }
            let detected = match &detections {
                Some(path) => ingest::parse_detections(&read_file(path)?, &vocab)
                    .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?,
                None => Vec::new(),
            };
            let ts = ingest::build_transactions(&vocab, &labels, &detected, cfg.score_threshold, drop_empty)
                .map_err(AppError::usage)?;
            write_output(&out, &ingest::write_transactions_table(&ts))?;
            eprintln!("transactions: {}  categories: {}", ts.len(), vocab.size());
            Ok(())
        }
        Command::Mine { input, mining, workers, out_dir } => {
            let cfg = resolve(mining_flags(&mining), None, None, None, out_dir);
            let ts = load_table(&input)?;
            if ts.is_empty() {
                eprintln!("warning: empty transactions table, writing empty outputs");
            }
            let (frequents, rules) = mine_rules(&ts, &cfg.mining, workers)?;
            write_output(
                &cfg.out_dir.join("rules.tsv"),
                &export::rules_table(&rules, &ts.vocabulary),
            )?;
            write_output(
                &cfg.out_dir.join("itemsets.tsv"),
                &export::itemsets_table(&frequents, &ts.vocabulary, ts.len()),
            )?;
            eprintln!("frequent itemsets: {}  rules: {}", frequents.len(), rules.len());
            Ok(())
        }
        Command::Graph { input, mining, format, out } => {
            let cfg = resolve(mining_flags(&mining), None, None, None, None);
            let ts = load_table(&input)?;
            let (_, rules) = mine_rules(&ts, &cfg.mining, 1)?;
            let graph = analysis::build_rule_graph(&rules, &ts)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            let text = match format {
                GraphFormat::Dot => export::graph_dot(&graph),
                GraphFormat::Obj => export::graph_json(&graph),
            };
            write_output(&out, &text)
        }
        Command::Freq { input, out } => {
            let ts = load_table(&input)?;
            write_output(&out, &export::frequency_tsv(&analysis::frequency_table(&ts)))
        }
        Command::Paracoord { input, mining, out } => {
            let cfg = resolve(mining_flags(&mining), None, None, None, None);
            let ts = load_table(&input)?;
            let (_, rules) = mine_rules(&ts, &cfg.mining, 1)?;
            let table = analysis::paracoord(&rules, &ts)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            write_output(&out, &export::paracoord_tsv(&table))
        }
        Command::Split { ids, ratios, seed, out_dir } => {
            let cfg = resolve(no_mining_flags(), None, None, seed, out_dir);
            let text = read_file(&ids)?;
            let id_list: Vec<String> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect();
            let ratios = parse_ratios(&ratios)?;
            let (train, val, test) =
                corpus::split(&id_list, ratios, cfg.seed).map_err(AppError::usage)?;
            for (name, ids) in [("train.txt", &train), ("val.txt", &val), ("test.txt", &test)] {
                let mut content = ids.join("\n");
                if !content.is_empty() {
                    content.push('\n');
                }
                write_output(&cfg.out_dir.join(name), &content)?;
            }
            eprintln!("train: {}  val: {}  test: {}", train.len(), val.len(), test.len());
            Ok(())
        }
        Command::Synth { spec, seed, out } => {
            let cfg = resolve(no_mining_flags(), None, None, seed, None);
            let spec = parse_synth_spec(&read_file(&spec)?, cfg.seed).map_err(AppError::usage)?;
            let ts = sceneminer_core::synth::generate(&spec).map_err(AppError::usage)?;
            write_output(&out, &ingest::write_transactions_table(&ts))
        }
        Command::Eval { categories, gt_dir, detections, iou, out } => {
            let cfg = resolve(no_mining_flags(), None, iou, None, None);
            let vocab = ingest::parse_categories(&read_file(&categories)?)
                .map_err(|e| AppError::Usage(format!("{}: {e}", categories.display())))?;
            let gt: Vec<corpus::ImageRecord> = read_label_dir(&gt_dir, &vocab)?
                .into_iter()
                .map(|(image_id, annotations)| corpus::ImageRecord::new(image_id, annotations))
                .collect::<Result<_, _>>()
                .map_err(AppError::usage)?;
            let det = ingest::parse_detections(&read_file(&detections)?, &vocab)
                .map_err(|e| AppError::Usage(format!("{}: {e}", detections.display())))?;
            let report = analysis::evaluate_detections(&gt, &det, &vocab, cfg.iou_threshold)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            write_output(&out, &export::eval_report_tsv(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(AppError::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::from(3)
        }
    }
}
