//! `motif-rules` command line: mine shape rules from CSV series, evaluate
//! them on held-out data, and generate synthetic series with planted rules.
//!
//! Exit codes: 0 success (mining found at least one rule), 1 input or
//! validation failure, 2 mining finished but found zero rules.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use motif_rules::{
    evaluate_rule, find_top_rules, gen_synthetic, load_csv, ColumnSelector, ConfigRecord,
    DistanceMode, Error as CoreError, EvalReport, FiringRecord, MinerConfigF64, RuleEvalRecord,
    RuleRecord, RulesFile, SyntheticConfig, SyntheticF64, TimeSeriesF64, TruthFile,
};

use manifest::{sha256_file, InputDigest, Manifest};

const EXIT_OK: i32 = 0;
const EXIT_ERROR: i32 = 1;
const EXIT_NO_RULES: i32 = 2;

#[derive(Parser)]
#[command(
    name = "motif-rules",
    version,
    about = "Mine and evaluate predictive shape rules in real-valued time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover top-scoring rules from one or two series (or a directory of
    /// series, pairwise).
    Mine(MineArgs),
    /// Evaluate a mined rule file on held-out series and report Q per rule.
    Eval(EvalArgs),
    /// Generate a synthetic series pair with a planted rule.
    Synth(SynthArgs),
}

#[derive(Args)]
struct MineArgs {
    /// CSV holding the antecedent series (also the consequent series unless
    /// --series-b is given).
    #[arg(long, conflicts_with = "pairs_dir")]
    series_a: Option<PathBuf>,
    /// CSV holding the consequent series.
    #[arg(long, requires = "series_a")]
    series_b: Option<PathBuf>,
    /// Directory of CSVs; rules are mined for every ordered pair.
    #[arg(long)]
    pairs_dir: Option<PathBuf>,
    /// Value column, by zero-based index or header name.
    #[arg(long, default_value = "0")]
    column: String,
    /// Optional timestamp column, by index or header name.
    #[arg(long)]
    timestamp_column: Option<String>,
    /// Motif lengths to search, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "50,30")]
    motif_lengths: Vec<usize>,
    /// Motifs kept per series after roughness ranking.
    #[arg(long, default_value_t = 5)]
    k_motifs: usize,
    /// Closest pairs extracted per length before ranking (default: 4x k-motifs).
    #[arg(long)]
    motif_candidates: Option<usize>,
    /// Rules to output.
    #[arg(long, default_value_t = 5)]
    k_rules: usize,
    /// Max gap in seconds between antecedent end and consequent start.
    #[arg(long, default_value_t = 300.0)]
    tau: f64,
    /// Trigger threshold on antecedent distance.
    #[arg(long, default_value_t = 5.0)]
    theta: f64,
    /// Distinct threshold for consequent-like occurrences (default: theta).
    #[arg(long)]
    consequent_theta: Option<f64>,
    /// Digitization cardinality in bits.
    #[arg(long, default_value_t = 6)]
    bits: u8,
    /// Compare windows z-normalized instead of raw.
    #[arg(long)]
    normalize: bool,
    /// Worker threads for pair scoring (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for rules JSON and the manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Rules JSON produced by `mine`.
    #[arg(long)]
    rules: PathBuf,
    /// CSV with the held-out antecedent series.
    #[arg(long)]
    test_a: PathBuf,
    /// CSV with the held-out consequent series (required when the rules pair
    /// two distinct series).
    #[arg(long)]
    test_b: Option<PathBuf>,
    /// Value column, by zero-based index or header name.
    #[arg(long, default_value = "0")]
    column: String,
    /// Optional timestamp column.
    #[arg(long)]
    timestamp_column: Option<String>,
    /// Random baseline redraws per rule.
    #[arg(long, default_value_t = 1000)]
    repetitions: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write plot-ready CSVs (index, actual, predicted_overlay) per rule.
    #[arg(long)]
    plot: bool,
    /// Output directory for the report.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Samples per series.
    #[arg(long, default_value_t = 10_000)]
    length: usize,
    /// Planted episodes.
    #[arg(long, default_value_t = 20)]
    instances: usize,
    /// Smallest gap, in samples, between antecedent end and consequent start.
    #[arg(long, default_value_t = 10)]
    gap_lo: usize,
    /// Largest gap, in samples.
    #[arg(long, default_value_t = 100)]
    gap_hi: usize,
    /// Noise standard deviation added to planted windows.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory for T_A.csv, T_B.csv and truth.json.
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep exit code 2 reserved for "zero rules found".
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Mine(args) => cmd_mine(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(EXIT_ERROR);
        }
    }
}

fn parse_column(spec: &str) -> ColumnSelector {
    spec.parse().expect("column selectors parse from any string")
}

fn load_series(
    path: &Path,
    column: &str,
    timestamp_column: Option<&str>,
    flag: &str,
) -> Result<TimeSeriesF64> {
    let column = parse_column(column);
    let ts_column = timestamp_column.map(parse_column);
    load_csv(path, &column, ts_column.as_ref())
        .with_context(|| format!("{flag} {}", path.display()))
}

fn miner_config(args: &MineArgs) -> Result<MinerConfigF64> {
    let cfg = MinerConfigF64 {
        motif_lengths: args.motif_lengths.clone(),
        k_motifs: args.k_motifs,
        motif_candidates: args
            .motif_candidates
            .unwrap_or_else(|| 4 * args.k_motifs.max(1)),
        k_rules: args.k_rules,
        tau: args.tau,
        theta: args.theta,
        consequent_theta: args.consequent_theta,
        bits: args.bits,
        normalize: args.normalize,
    };
    if let Err(e) = cfg.validate() {
        bail!("{e} (check --motif-lengths/--k-motifs/--tau/--theta/--bits)");
    }
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn mine_one_pair(
    series_a: &TimeSeriesF64,
    series_b: &TimeSeriesF64,
    cfg: &MinerConfigF64,
    manifest_id: &str,
) -> Result<RulesFile> {
    let (lo, hi) = motif_rules::digitize_range(series_a, series_b);
    let rules = find_top_rules(series_a, series_b, cfg)?;
    Ok(RulesFile {
        manifest: Some(manifest_id.to_string()),
        series_a: series_a.name().to_string(),
        series_b: series_b.name().to_string(),
        config: ConfigRecord::from_config(cfg),
        digitize_lo: lo,
        digitize_hi: hi,
        rules: rules.iter().map(RuleRecord::from_scored).collect(),
    })
}

fn cmd_mine(args: MineArgs) -> Result<i32> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let cfg = miner_config(&args)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("--out {}", args.out.display()))?;

    let mut input_paths: Vec<(String, PathBuf)> = Vec::new();
    enum Plan {
        Single(PathBuf, Option<PathBuf>),
        Pairwise(Vec<PathBuf>),
    }
    let plan = if let Some(dir) = &args.pairs_dir {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("--pairs-dir {}", dir.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "csv"))
            .collect();
        files.sort();
        if files.len() < 2 {
            bail!("--pairs-dir {}: need at least two CSV files", dir.display());
        }
        Plan::Pairwise(files)
    } else {
        let a = args
            .series_a
            .clone()
            .ok_or_else(|| anyhow!("one of --series-a or --pairs-dir is required"))?;
        Plan::Single(a, args.series_b.clone())
    };

    let t_load = Instant::now();
    let column = args.column.as_str();
    let ts_column = args.timestamp_column.as_deref();
    let loaded: Vec<(String, TimeSeriesF64)> = match &plan {
        Plan::Single(a, b) => {
            let series_a = load_series(a, column, ts_column, "--series-a")?;
            input_paths.push(("--series-a".into(), a.clone()));
            let mut out = vec![(series_a.name().to_string(), series_a)];
            if let Some(b) = b {
                let series_b = load_series(b, column, ts_column, "--series-b")?;
                input_paths.push(("--series-b".into(), b.clone()));
                out.push((series_b.name().to_string(), series_b));
            }
            out
        }
        Plan::Pairwise(files) => {
            let mut out = Vec::new();
            for f in files {
                let s = load_series(f, column, ts_column, "--pairs-dir")?;
                input_paths.push(("--pairs-dir".into(), f.clone()));
                out.push((s.name().to_string(), s));
            }
            out
        }
    };
    let load_ms = t_load.elapsed().as_millis() as u64;

    let digests: Vec<InputDigest> = input_paths
        .iter()
        .map(|(_, p)| {
            Ok(InputDigest {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut manifest = Manifest::new(
        "mine",
        serde_json::to_value(ConfigRecord::from_config(&cfg))?,
        digests,
        None,
    );
    manifest.record_timing("load", load_ms);

    let t_mine = Instant::now();
    let mut total_rules = 0usize;
    match &plan {
        Plan::Single(..) => {
            let series_a = &loaded[0].1;
            let series_b = if loaded.len() > 1 { &loaded[1].1 } else { series_a };
            let file = mine_one_pair(series_a, series_b, &cfg, &manifest.id)?;
            total_rules += file.rules.len();
            write_json(&args.out.join("rules.json"), &file)?;
        }
        Plan::Pairwise(_) => {
            for (i, (name_a, series_a)) in loaded.iter().enumerate() {
                for (j, (name_b, series_b)) in loaded.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let file = mine_one_pair(series_a, series_b, &cfg, &manifest.id)?;
                    total_rules += file.rules.len();
                    let out = args.out.join(format!("rules_{name_a}__{name_b}.json"));
                    write_json(&out, &file)?;
                }
            }
        }
    }
    manifest.record_timing("mine", t_mine.elapsed().as_millis() as u64);
    manifest.write(&args.out.join("manifest.json"))?;

    eprintln!(
        "mined {total_rules} rule(s) into {} in {} ms",
        args.out.display(),
        load_ms + t_mine.elapsed().as_millis() as u64
    );
    Ok(if total_rules > 0 { EXIT_OK } else { EXIT_NO_RULES })
}

fn cmd_eval(args: EvalArgs) -> Result<i32> {
    let raw = fs::read_to_string(&args.rules)
        .with_context(|| format!("--rules {}", args.rules.display()))?;
    let rules_file: RulesFile = serde_json::from_str(&raw)
        .with_context(|| format!("--rules {}: not a rules file", args.rules.display()))?;
    for rule in &rules_file.rules {
        let known = [rules_file.series_a.as_str(), rules_file.series_b.as_str()];
        for name in [&rule.antecedent.series, &rule.consequent.series] {
            if !known.contains(&name.as_str()) {
                bail!(
                    "--rules {}: rule references series {name:?} absent from the file header",
                    args.rules.display()
                );
            }
        }
    }

    let column = args.column.as_str();
    let ts_column = args.timestamp_column.as_deref();
    let test_a = load_series(&args.test_a, column, ts_column, "--test-a")?;
    let two_series = rules_file.series_a != rules_file.series_b;
    let test_b = match (&args.test_b, two_series) {
        (Some(path), _) => load_series(path, column, ts_column, "--test-b")?,
        (None, false) => test_a.clone(),
        (None, true) => bail!(
            "rules pair series {:?} with {:?}; provide --test-b for the consequent series",
            rules_file.series_a,
            rules_file.series_b
        ),
    };

    fs::create_dir_all(&args.out).with_context(|| format!("--out {}", args.out.display()))?;
    let mode = if rules_file.config.normalize {
        DistanceMode::ZNormalized
    } else {
        DistanceMode::Raw
    };

    let mut per_rule = Vec::new();
    for (index, record) in rules_file.rules.iter().enumerate() {
        let rule = record.to_rule::<f64>();
        match evaluate_rule(&rule, &test_a, &test_b, args.repetitions, args.seed, mode) {
            Ok(evaluation) => {
                if args.plot {
                    write_plot_csv(&args.out, index, &rule, &test_b, &evaluation)?;
                }
                per_rule.push(RuleEvalRecord {
                    rule_index: index,
                    q: Some(evaluation.q),
                    n_firings: evaluation.firings.len(),
                    error: None,
                    firings: evaluation
                        .firings
                        .iter()
                        .map(|f| FiringRecord {
                            fire_index: f.fire_index,
                            predicted_index: f.predicted_index,
                            dist: f.predicted_dist,
                        })
                        .collect(),
                });
            }
            Err(e @ (CoreError::NoFirings | CoreError::ZeroDenominator)) => {
                per_rule.push(RuleEvalRecord {
                    rule_index: index,
                    q: None,
                    n_firings: 0,
                    error: Some(e.to_string()),
                    firings: vec![],
                });
            }
            Err(e) => return Err(e).with_context(|| format!("evaluating rule {index}")),
        }
    }

    let report = EvalReport {
        rules_manifest: rules_file.manifest.clone(),
        repetitions: args.repetitions,
        seed: args.seed,
        top5_mean_q: EvalReport::mean_q_of_top(&per_rule, 5),
        per_rule,
    };
    write_json(&args.out.join("report.json"), &report)?;
    match report.top5_mean_q {
        Some(q) => eprintln!("evaluated {} rule(s); top-5 mean Q = {q:.3}", report.per_rule.len()),
        None => eprintln!("evaluated {} rule(s); no rule produced a Q", report.per_rule.len()),
    }
    Ok(EXIT_OK)
}

/// Plot-ready CSV: the test consequent series with the rule's consequent
/// template overlaid at each predicted position.
fn write_plot_csv(
    out_dir: &Path,
    rule_index: usize,
    rule: &motif_rules::RuleF64,
    test_b: &TimeSeriesF64,
    evaluation: &motif_rules::RuleEvaluation<f64>,
) -> Result<()> {
    let mut overlay: Vec<Option<f64>> = vec![None; test_b.len()];
    for firing in &evaluation.firings {
        for (offset, &v) in rule.consequent.values.iter().enumerate() {
            overlay[firing.predicted_index + offset] = Some(v);
        }
    }
    let mut text = String::from("index,actual,predicted_overlay\n");
    for (i, &actual) in test_b.values().iter().enumerate() {
        match overlay[i] {
            Some(v) => text.push_str(&format!("{i},{actual},{v}\n")),
            None => text.push_str(&format!("{i},{actual},\n")),
        }
    }
    let path = out_dir.join(format!("plot_rule{rule_index}.csv"));
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_series_csv(path: &Path, series: &TimeSeriesF64) -> Result<()> {
    let mut text = String::from("time,value\n");
    for (i, v) in series.values().iter().enumerate() {
        text.push_str(&format!("{},{v}\n", series.time_at(i)));
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<i32> {
    let cfg = SyntheticConfig {
        length: args.length,
        instances: args.instances,
        gap_range: (args.gap_lo, args.gap_hi),
        noise_sd: args.noise,
        seed: args.seed,
    };
    let data: SyntheticF64 = gen_synthetic(&cfg)
        .with_context(|| "check --length/--instances/--gap-lo/--gap-hi".to_string())?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("--out-dir {}", args.out_dir.display()))?;
    write_series_csv(&args.out_dir.join("T_A.csv"), &data.series_a)?;
    write_series_csv(&args.out_dir.join("T_B.csv"), &data.series_b)?;
    let truth = TruthFile::from_synthetic(&data, cfg.length, cfg.gap_range, cfg.noise_sd, cfg.seed);
    write_json(&args.out_dir.join("truth.json"), &truth)?;
    eprintln!(
        "wrote T_A.csv, T_B.csv, truth.json ({} instances) into {}",
        truth.planted.len(),
        args.out_dir.display()
    );
    Ok(EXIT_OK)
}
