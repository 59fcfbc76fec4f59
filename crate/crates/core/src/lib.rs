//! Shape-rule discovery for real-valued time series.
//!
//! A rule pairs a recurring antecedent shape with a consequent shape expected
//! within a bounded interval: observe something within `theta` of the
//! antecedent and the consequent should follow within `tau` seconds. Mining
//! proceeds in stages:
//!
//! 1. [`motif::find_motifs`] extracts recurring shapes (closest pairs of
//!    non-overlapping windows) per series; [`motif::sort_top_k`] ranks them
//!    by roughness so flat, meaningless shapes drop out.
//! 2. [`scan::scan_similar`] finds all non-overlapping occurrences of each
//!    candidate shape.
//! 3. [`matching::match_noncrossing`] pairs antecedent and consequent
//!    occurrences into instances, maximizing the instance count and then
//!    minimizing the total gap, without ever crossing two instances in time.
//! 4. [`mdl`] scores each rule by the description-length bits its instances
//!    save, discounted by the fraction of antecedents matched.
//! 5. [`eval`] fires rules on held-out data and reports the Q metric
//!    (0 = perfect prediction, ~1 = random guessing).
//!
//! Everything is generic over the sample scalar (`f32`/`f64` via
//! `num-traits`); the `*F64`/`*F32` aliases below pin the common choices.
//! All types are immutable after construction and safe to share across
//! threads; the pair-scoring loop in [`miner::find_top_rules`] runs in
//! parallel.

pub mod error;
pub mod eval;
pub mod export;
pub mod matching;
pub mod mdl;
pub mod miner;
pub mod motif;
pub mod scalar;
pub mod scan;
pub mod series;

pub use error::{Error, Result};
pub use eval::{
    best_match_position, evaluate_rule, fire_rule, gen_synthetic, q_metric, Firing, PlantedInstance,
    RuleEvaluation, Synthetic, SyntheticConfig,
};
pub use export::{
    ConfigRecord, EvalReport, FiringRecord, InstanceRecord, RuleEvalRecord, RuleRecord, RulesFile,
    ShapeRecord, TruthFile, TruthInstance,
};
pub use matching::{brute_force_match, build_graph, match_noncrossing, MatchEdge, MatchGraph, MatchResult};
pub use mdl::{bit_saved, digitize, dl, dl_conditional, rule_score, DigitalSeq, Score};
pub use miner::{
    digitize_range, find_top_rules, score_pair, score_pair_with_range, MatchedInstance, MinerConfig,
    Rule, ScoredRule, Shape,
};
pub use motif::{find_motifs, roughness, sort_top_k, Motif};
pub use scalar::Scalar;
pub use scan::{remove_overlaps, scan_similar, Occurrence};
pub use series::{
    distance, load_csv, window_distance, znormalize, ColumnSelector, DistanceMode, Subsequence,
    TimeSeries,
};

/// Double-precision aliases; this is what the CLI uses.
pub type TimeSeriesF64 = series::TimeSeries<f64>;
pub type SubsequenceF64 = series::Subsequence<f64>;
pub type MotifF64 = motif::Motif<f64>;
pub type OccurrenceF64 = scan::Occurrence<f64>;
pub type MatchGraphF64 = matching::MatchGraph<f64>;
pub type RuleF64 = miner::Rule<f64>;
pub type ShapeF64 = miner::Shape<f64>;
pub type ScoredRuleF64 = miner::ScoredRule<f64>;
pub type MinerConfigF64 = miner::MinerConfig<f64>;
pub type SyntheticF64 = eval::Synthetic<f64>;

/// Single-precision aliases.
pub type TimeSeriesF32 = series::TimeSeries<f32>;
pub type SubsequenceF32 = series::Subsequence<f32>;
pub type MotifF32 = motif::Motif<f32>;
pub type RuleF32 = miner::Rule<f32>;
pub type MinerConfigF32 = miner::MinerConfig<f32>;
