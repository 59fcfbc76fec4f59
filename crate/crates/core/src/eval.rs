//! Held-out evaluation: rule firing, best-match prediction inside the rule's
//! interval, the Q prediction metric against a random baseline, and a
//! synthetic generator with planted rules.
//!
//! Q is the ratio of summed prediction distances to summed random-position
//! distances, re-drawn `repetitions` times and averaged: 0 means perfect
//! prediction, values near 1 mean the rule does no better than chance.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::miner::{Rule, Shape};
use crate::scalar::{from_f64, Scalar};
use crate::series::{window_distance, DistanceMode, TimeSeries};

/// One firing of a rule on test data, with its best prediction.
#[derive(Debug, Clone)]
pub struct Firing<T> {
    /// Window start in the antecedent test series.
    pub fire_index: usize,
    /// Distance of that window to the antecedent template (below theta).
    pub fire_dist: T,
    /// Best-matching consequent start inside the interval after the firing.
    pub predicted_index: usize,
    /// Distance of that window to the consequent template.
    pub predicted_dist: T,
}

/// Evaluation of a single rule on held-out data.
#[derive(Debug, Clone)]
pub struct RuleEvaluation<T> {
    pub q: f64,
    pub firings: Vec<Firing<T>>,
}

/// Scans the test series and returns every firing start index.
///
/// A firing occurs at each window whose distance to the antecedent is
/// strictly below theta; scanning then resumes one antecedent length later,
/// so firings never overlap.
pub fn fire_rule<T: Scalar>(
    rule: &Rule<T>,
    test_antecedent: &TimeSeries<T>,
    mode: DistanceMode,
) -> Result<Vec<usize>> {
    let m = rule.antecedent.len();
    let n = test_antecedent.len();
    if m > n {
        return Err(Error::TemplateTooLong {
            template: m,
            series: n,
        });
    }
    let values = test_antecedent.values();
    let mut fires = Vec::new();
    let mut start = 0;
    while start + m <= n {
        let d = window_distance(&rule.antecedent.values, &values[start..start + m], mode)?;
        if d < rule.theta {
            fires.push(start);
            start += m;
        } else {
            start += 1;
        }
    }
    Ok(fires)
}

/// Best-matching consequent window in the interval after a firing.
///
/// Considers every full window whose start time lies strictly between
/// `fire_end_time` (timestamp of the antecedent's last sample) and
/// `fire_end_time + tau`; windows past the series end shrink the range.
/// Returns the earliest window of minimum distance, or an error when the
/// interval holds no window at all.
pub fn best_match_position<T: Scalar>(
    rule: &Rule<T>,
    test_consequent: &TimeSeries<T>,
    fire_end_time: f64,
    mode: DistanceMode,
) -> Result<(usize, T)> {
    let m = rule.consequent.len();
    let n = test_consequent.len();
    if m > n {
        return Err(Error::TemplateTooLong {
            template: m,
            series: n,
        });
    }
    let period = test_consequent.period();
    let start_time = test_consequent.start_time();
    // Loose index bounds, then the exact time predicate per candidate.
    let lo = ((fire_end_time - start_time) / period).floor().max(0.0) as usize;
    let hi_time = fire_end_time + rule.tau;
    let hi = (((hi_time - start_time) / period).ceil().max(0.0) as usize + 1).min(n - m + 1);
    let mut best: Option<(usize, T)> = None;
    for j in lo.saturating_sub(1)..hi {
        let t = test_consequent.time_at(j);
        let gap = t - fire_end_time;
        if !(gap > 0.0 && gap < rule.tau) {
            continue;
        }
        let d = window_distance(
            &rule.consequent.values,
            &test_consequent.values()[j..j + m],
            mode,
        )?;
        let improves = match best {
            None => true,
            Some((_, bd)) => d < bd,
        };
        if improves {
            best = Some((j, d));
        }
    }
    best.ok_or(Error::EmptyPredictionWindow {
        fire_end: fire_end_time,
    })
}

/// Fires the rule on the test pair and computes Q.
///
/// Firings whose prediction interval is empty (too close to the series end)
/// are dropped; if none remain the rule is reported as never firing. The
/// random baseline draws one uniform consequent start per firing per
/// repetition from a stream split by repetition index, so a fixed seed gives
/// a fixed Q.
pub fn evaluate_rule<T: Scalar>(
    rule: &Rule<T>,
    test_antecedent: &TimeSeries<T>,
    test_consequent: &TimeSeries<T>,
    repetitions: usize,
    seed: u64,
    mode: DistanceMode,
) -> Result<RuleEvaluation<T>> {
    if repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be positive".into()));
    }
    let fires = fire_rule(rule, test_antecedent, mode)?;
    if fires.is_empty() {
        return Err(Error::NoFirings);
    }
    let len_a = rule.antecedent.len();
    let len_b = rule.consequent.len();
    let mut firings: Vec<Firing<T>> = Vec::new();
    for f in fires {
        let fire_end_time = test_antecedent.time_at(f + len_a - 1);
        match best_match_position(rule, test_consequent, fire_end_time, mode) {
            Ok((idx, d)) => {
                let window = &test_antecedent.values()[f..f + len_a];
                let fire_dist = window_distance(&rule.antecedent.values, window, mode)?;
                firings.push(Firing {
                    fire_index: f,
                    fire_dist,
                    predicted_index: idx,
                    predicted_dist: d,
                });
            }
            Err(Error::EmptyPredictionWindow { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if firings.is_empty() {
        return Err(Error::NoFirings);
    }

    let numerator: f64 = firings.iter().map(|f| f.predicted_dist.as_f64()).sum();
    let valid_starts = test_consequent.len() - len_b + 1;
    let consequent_values = test_consequent.values();
    let mut q_sum = 0.0;
    for rep in 0..repetitions {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep as u64);
        let mut denominator = 0.0;
        for _ in 0..firings.len() {
            let v = rng.gen_range(0..valid_starts);
            let d = window_distance(
                &rule.consequent.values,
                &consequent_values[v..v + len_b],
                mode,
            )?;
            denominator += d.as_f64();
        }
        if denominator == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        q_sum += numerator / denominator;
    }
    Ok(RuleEvaluation {
        q: q_sum / repetitions as f64,
        firings,
    })
}

/// Q metric alone; see [`evaluate_rule`].
pub fn q_metric<T: Scalar>(
    rule: &Rule<T>,
    test_antecedent: &TimeSeries<T>,
    test_consequent: &TimeSeries<T>,
    repetitions: usize,
    seed: u64,
    mode: DistanceMode,
) -> Result<f64> {
    evaluate_rule(rule, test_antecedent, test_consequent, repetitions, seed, mode).map(|e| e.q)
}

/// Length of the shapes planted by [`gen_synthetic`].
pub const SYNTH_SHAPE_LEN: usize = 30;
/// Peak amplitude of the planted shapes.
pub const SYNTH_AMPLITUDE: f64 = 10.0;
/// Random-walk step standard deviation of the background.
pub const SYNTH_WALK_STEP_SD: f64 = 1.0;

/// Parameters for the synthetic planted-rule generator.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    /// Samples per series.
    pub length: usize,
    /// Episodes planted.
    pub instances: usize,
    /// Inclusive bounds on the per-episode gap, in samples, between
    /// antecedent end and consequent start.
    pub gap_range: (usize, usize),
    /// Standard deviation of the noise added to planted windows.
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            length: 10_000,
            instances: 20,
            gap_range: (10, 100),
            noise_sd: 0.05 * SYNTH_AMPLITUDE,
            seed: 7,
        }
    }
}

/// One planted episode's ground-truth positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantedInstance {
    pub a_start: usize,
    pub b_start: usize,
    /// Samples between antecedent end and consequent start.
    pub gap: usize,
}

/// A generated series pair with its planted rule and ground truth.
#[derive(Debug, Clone)]
pub struct Synthetic<T> {
    pub series_a: TimeSeries<T>,
    pub series_b: TimeSeries<T>,
    pub rule: Rule<T>,
    pub instances: Vec<PlantedInstance>,
}

/// The spiky antecedent template: three narrow triangular pulses.
pub fn synthetic_antecedent_shape<T: Scalar>() -> Vec<T> {
    let tri = |i: f64, center: f64, width: f64| (1.0 - (i - center).abs() / width).max(0.0);
    (0..SYNTH_SHAPE_LEN)
        .map(|i| {
            let x = i as f64;
            let v = tri(x, 4.0, 3.0) + 0.8 * tri(x, 14.0, 3.0) + 0.9 * tri(x, 24.0, 3.0);
            from_f64(SYNTH_AMPLITUDE * v)
        })
        .collect()
}

/// The blocky consequent template: three rectangular pulses.
pub fn synthetic_consequent_shape<T: Scalar>() -> Vec<T> {
    (0..SYNTH_SHAPE_LEN)
        .map(|i| {
            let v = match i {
                3..=7 => 1.0,
                13..=17 => 0.75,
                22..=26 => 0.9,
                _ => 0.0,
            };
            from_f64(SYNTH_AMPLITUDE * v)
        })
        .collect()
}

/// Generates a pair of random-walk series with `instances` planted
/// antecedent->consequent episodes and per-episode gaps drawn uniformly from
/// `gap_range`. Planted windows replace the background and carry additive
/// Gaussian noise of `noise_sd`; with zero noise they equal the templates
/// exactly. Fully deterministic for a fixed seed.
pub fn gen_synthetic<T: Scalar>(cfg: &SyntheticConfig) -> Result<Synthetic<T>> {
    let (gap_lo, gap_hi) = cfg.gap_range;
    if gap_hi < gap_lo {
        return Err(Error::InvalidConfig(format!(
            "gap range is inverted: ({gap_lo}, {gap_hi})"
        )));
    }
    if cfg.instances == 0 {
        return Err(Error::InvalidConfig("need at least one instance".into()));
    }
    let span = 2 * SYNTH_SHAPE_LEN + gap_hi;
    let slot = cfg.length / cfg.instances;
    if slot < span + 1 {
        return Err(Error::InfeasiblePlacement {
            instances: cfg.instances,
            span,
            length: cfg.length,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let step = Normal::new(0.0, SYNTH_WALK_STEP_SD).expect("valid sd");
    let walk = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut v = Vec::with_capacity(cfg.length);
        let mut level = 0.0;
        for _ in 0..cfg.length {
            level += step.sample(rng);
            v.push(level);
        }
        v
    };
    let mut a = walk(&mut rng);
    let mut b = walk(&mut rng);

    let antecedent: Vec<f64> = synthetic_antecedent_shape();
    let consequent: Vec<f64> = synthetic_consequent_shape();
    let noise = Normal::new(0.0, cfg.noise_sd.max(0.0)).expect("valid sd");
    let mut instances = Vec::with_capacity(cfg.instances);
    for k in 0..cfg.instances {
        let slot_start = k * slot;
        let a_start = slot_start + rng.gen_range(0..slot - span);
        let gap = rng.gen_range(gap_lo..=gap_hi);
        let b_start = a_start + SYNTH_SHAPE_LEN + gap;
        for (i, &v) in antecedent.iter().enumerate() {
            a[a_start + i] = v + if cfg.noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
        }
        for (i, &v) in consequent.iter().enumerate() {
            b[b_start + i] = v + if cfg.noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
        }
        instances.push(PlantedInstance {
            a_start,
            b_start,
            gap,
        });
    }

    let to_t = |v: Vec<f64>| -> Vec<T> { v.into_iter().map(from_f64).collect() };
    let series_a = TimeSeries::new("T_A", to_t(a), 0.0, 1.0)?;
    let series_b = TimeSeries::new("T_B", to_t(b), 0.0, 1.0)?;
    let rule = Rule {
        antecedent: Shape {
            series: "T_A".to_string(),
            start: instances[0].a_start,
            values: antecedent.iter().map(|&v| from_f64(v)).collect(),
        },
        consequent: Shape {
            series: "T_B".to_string(),
            start: instances[0].b_start,
            values: consequent.iter().map(|&v| from_f64(v)).collect(),
        },
        // Gap g samples means a start-to-end interval of (g + 1) periods.
        tau: (gap_hi + 2) as f64,
        theta: from_f64(0.8 * SYNTH_AMPLITUDE),
    };
    Ok(Synthetic {
        series_a,
        series_b,
        rule,
        instances,
    })
}
