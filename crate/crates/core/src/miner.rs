//! Rule mining orchestration: motifs per series, occurrence scans per motif
//! pair, non-crossing matching, description-length scoring, top-K selection.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matching::{build_graph, match_noncrossing, MatchResult};
use crate::mdl::{bit_saved, digitize, dl, rule_score, Score};
use crate::motif::{find_motifs, sort_top_k, Motif};
use crate::scalar::{from_f64, Scalar};
use crate::scan::scan_similar;
use crate::series::{DistanceMode, Subsequence, TimeSeries};

/// Owned snapshot of a subsequence: enough to fire and evaluate a rule
/// without the originating series.
#[derive(Debug, Clone)]
pub struct Shape<T> {
    /// Name of the series the shape was cut from.
    pub series: String,
    /// Start index in that series.
    pub start: usize,
    /// The shape's samples.
    pub values: Vec<T>,
}

impl<T: Scalar> Shape<T> {
    pub fn from_subsequence(sub: &Subsequence<T>) -> Self {
        Shape {
            series: sub.series().name().to_string(),
            start: sub.start(),
            values: sub.values().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A predictive rule: observing the antecedent within distance `theta`
/// promises the consequent within `tau` seconds.
#[derive(Debug, Clone)]
pub struct Rule<T> {
    pub antecedent: Shape<T>,
    pub consequent: Shape<T>,
    /// Max gap, in seconds, between antecedent end and consequent start.
    pub tau: f64,
    /// Trigger threshold on the antecedent distance.
    pub theta: T,
}

/// One matched instance of a rule, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedInstance {
    pub a_start: usize,
    pub b_start: usize,
    /// Gap in seconds between antecedent end and consequent start.
    pub gap: f64,
}

/// A rule together with its matching evidence and score.
#[derive(Debug, Clone)]
pub struct ScoredRule<T> {
    pub rule: Rule<T>,
    pub match_result: MatchResult,
    pub instances: Vec<MatchedInstance>,
    /// Count of antecedent-like occurrences in the training series.
    pub n_antecedents: usize,
    pub score: Score,
}

impl<T: Scalar> ScoredRule<T> {
    /// Number of matched instances.
    pub fn cardinality(&self) -> usize {
        self.match_result.cardinality()
    }

    pub fn score_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.score.to_f64().unwrap_or(f64::NAN)
    }
}

/// Mining parameters.
#[derive(Debug, Clone)]
pub struct MinerConfig<T> {
    /// Motif lengths to search, one discovery pass each.
    pub motif_lengths: Vec<usize>,
    /// Motifs kept per series after roughness ranking.
    pub k_motifs: usize,
    /// Closest pairs extracted per length before ranking; must be at least
    /// `k_motifs` so ranking has something to discard.
    pub motif_candidates: usize,
    /// Rules returned; zero is allowed and yields an empty result.
    pub k_rules: usize,
    /// Max instance gap in seconds.
    pub tau: f64,
    /// Trigger threshold for antecedent-like occurrences.
    pub theta: T,
    /// Optional distinct threshold for consequent-like occurrences; defaults
    /// to `theta`.
    pub consequent_theta: Option<T>,
    /// Digitization cardinality in bits.
    pub bits: u8,
    /// Compare windows z-normalized instead of raw.
    pub normalize: bool,
}

impl<T: Scalar> Default for MinerConfig<T> {
    fn default() -> Self {
        MinerConfig {
            motif_lengths: vec![50, 30],
            k_motifs: 5,
            motif_candidates: 20,
            k_rules: 5,
            tau: 300.0,
            theta: from_f64(5.0),
            consequent_theta: None,
            bits: 6,
            normalize: false,
        }
    }
}

impl<T: Scalar> MinerConfig<T> {
    pub fn mode(&self) -> DistanceMode {
        if self.normalize {
            DistanceMode::ZNormalized
        } else {
            DistanceMode::Raw
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.motif_lengths.is_empty() {
            return Err(Error::InvalidConfig("motif_lengths must not be empty".into()));
        }
        if let Some(&len) = self.motif_lengths.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidConfig(format!(
                "motif length {len} is too small; need at least 2"
            )));
        }
        if self.k_motifs == 0 {
            return Err(Error::InvalidConfig("k_motifs must be positive".into()));
        }
        if self.motif_candidates < self.k_motifs {
            return Err(Error::InvalidConfig(format!(
                "motif_candidates ({}) must be at least k_motifs ({})",
                self.motif_candidates, self.k_motifs
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidConfig("tau must be positive".into()));
        }
        if !(self.theta > T::zero()) {
            return Err(Error::InvalidConfig("theta must be positive".into()));
        }
        if let Some(ct) = self.consequent_theta {
            if !(ct > T::zero()) {
                return Err(Error::InvalidConfig("consequent theta must be positive".into()));
            }
        }
        if !(2..=16).contains(&self.bits) {
            return Err(Error::InvalidConfig(format!(
                "bits must lie in [2, 16], got {}",
                self.bits
            )));
        }
        Ok(())
    }
}

/// The shared digitization range for one run: the min and max over both
/// training series, so bit counts are comparable across every candidate rule.
pub fn digitize_range<T: Scalar>(a: &TimeSeries<T>, b: &TimeSeries<T>) -> (T, T) {
    let (a_lo, a_hi) = a.value_range();
    let (b_lo, b_hi) = b.value_range();
    (a_lo.min(b_lo), a_hi.max(b_hi))
}

/// Scores one motif pair as a rule candidate, computing the digitization
/// range from the two series. Prefer [`find_top_rules`] for whole runs, which
/// fixes the range once.
pub fn score_pair<T: Scalar>(
    antecedent_motif: &Motif<T>,
    consequent_motif: &Motif<T>,
    series_a: &TimeSeries<T>,
    series_b: &TimeSeries<T>,
    cfg: &MinerConfig<T>,
) -> Result<ScoredRule<T>> {
    let (lo, hi) = digitize_range(series_a, series_b);
    score_pair_with_range(antecedent_motif, consequent_motif, series_a, series_b, cfg, lo, hi)
}

/// Scores one motif pair against a fixed digitization range.
///
/// Runs the occurrence scans on both series, builds the feasible-instance
/// graph, matches it, and scores the matched instances. A pair with zero
/// antecedent occurrences scores zero.
pub fn score_pair_with_range<T: Scalar>(
    antecedent_motif: &Motif<T>,
    consequent_motif: &Motif<T>,
    series_a: &TimeSeries<T>,
    series_b: &TimeSeries<T>,
    cfg: &MinerConfig<T>,
    lo: T,
    hi: T,
) -> Result<ScoredRule<T>> {
    cfg.validate()?;
    let mode = cfg.mode();
    let antecedents = scan_similar(series_a, &antecedent_motif.template, cfg.theta, mode)?;
    let consequent_theta = cfg.consequent_theta.unwrap_or(cfg.theta);
    let consequents = scan_similar(series_b, &consequent_motif.template, consequent_theta, mode)?;
    let n_antecedents = antecedents.len();

    let rule = Rule {
        antecedent: Shape::from_subsequence(&antecedent_motif.template),
        consequent: Shape::from_subsequence(&consequent_motif.template),
        tau: cfg.tau,
        theta: cfg.theta,
    };

    let graph = build_graph(antecedents, consequents, cfg.tau)?;
    let match_result = match_noncrossing(&graph);
    let instances: Vec<MatchedInstance> = match_result
        .selected
        .iter()
        .map(|e| MatchedInstance {
            a_start: graph.antecedents[e.antecedent].start,
            b_start: graph.consequents[e.consequent].start,
            gap: e.weight,
        })
        .collect();

    let score = if n_antecedents == 0 {
        Score::from_integer(0)
    } else {
        let template_digital = digitize(&rule.consequent.values, cfg.bits, lo, hi)?;
        let savings = match_result
            .selected
            .iter()
            .map(|e| {
                let occ = &graph.consequents[e.consequent];
                let window = &series_b.values()[occ.start..occ.start + occ.length];
                let instance_digital = digitize(window, cfg.bits, lo, hi)?;
                bit_saved(&instance_digital, &template_digital)
            })
            .collect::<Result<Vec<i64>>>()?;
        rule_score(&savings, dl(&template_digital), n_antecedents)?
    };

    Ok(ScoredRule {
        rule,
        match_result,
        instances,
        n_antecedents,
        score,
    })
}

/// Mines the top `k_rules` rules from a series pair (pass the same series
/// twice for single-series mode).
///
/// Per series and per configured length, the closest-pair extraction yields
/// `motif_candidates` motifs; roughness ranking keeps `k_motifs`. Every
/// antecedentxconsequent motif pair is scored independently (in parallel) and
/// the result is ordered by descending score with deterministic tie-breaks.
pub fn find_top_rules<T: Scalar>(
    series_a: &TimeSeries<T>,
    series_b: &TimeSeries<T>,
    cfg: &MinerConfig<T>,
) -> Result<Vec<ScoredRule<T>>> {
    cfg.validate()?;
    let mode = cfg.mode();
    let max_len = *cfg.motif_lengths.iter().max().expect("validated non-empty");
    for series in [series_a, series_b] {
        if series.len() < 2 * max_len {
            return Err(Error::SeriesTooShortForMotifs {
                length: max_len,
                min: 2 * max_len,
                len: series.len(),
            });
        }
    }

    let discover = |series: &TimeSeries<T>| -> Result<Vec<Motif<T>>> {
        let mut pool = Vec::new();
        for &length in &cfg.motif_lengths {
            pool.extend(find_motifs(series, length, cfg.motif_candidates, mode)?);
        }
        Ok(sort_top_k(pool, cfg.k_motifs))
    };
    let motifs_a = discover(series_a)?;
    let motifs_b = if series_a.same_instance(series_b) {
        motifs_a.clone()
    } else {
        discover(series_b)?
    };

    let (lo, hi) = digitize_range(series_a, series_b);
    let pairs: Vec<(&Motif<T>, &Motif<T>)> = motifs_a
        .iter()
        .flat_map(|ma| motifs_b.iter().map(move |mb| (ma, mb)))
        .collect();
    let mut scored: Vec<ScoredRule<T>> = pairs
        .into_par_iter()
        .map(|(ma, mb)| score_pair_with_range(ma, mb, series_a, series_b, cfg, lo, hi))
        .collect::<Result<Vec<_>>>()?;

    scored.sort_by(|a, b| {
        b.score
            .cmp(&a.score)
            .then(a.rule.antecedent.start.cmp(&b.rule.antecedent.start))
            .then(a.rule.consequent.start.cmp(&b.rule.consequent.start))
            .then(a.rule.antecedent.len().cmp(&b.rule.antecedent.len()))
            .then(a.rule.consequent.len().cmp(&b.rule.consequent.len()))
    });
    scored.truncate(cfg.k_rules);
    Ok(scored)
}
