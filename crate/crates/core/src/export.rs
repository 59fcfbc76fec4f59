//! JSON file schemas shared by the library, the CLI and the tests: mined
//! rule files, evaluation reports and synthetic ground truth. Rule files
//! embed shape values so they are self-contained for evaluation.

use serde::{Deserialize, Serialize};

use crate::eval::{PlantedInstance, Synthetic};
use crate::miner::{MinerConfig, Rule, ScoredRule, Shape};
use crate::scalar::{from_f64, Scalar};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub series: String,
    pub start: usize,
    pub length: usize,
    pub values: Vec<f64>,
}

impl ShapeRecord {
    fn from_shape<T: Scalar>(shape: &Shape<T>) -> Self {
        ShapeRecord {
            series: shape.series.clone(),
            start: shape.start,
            length: shape.len(),
            values: shape.values.iter().map(|v| v.as_f64()).collect(),
        }
    }

    fn to_shape<T: Scalar>(&self) -> Shape<T> {
        Shape {
            series: self.series.clone(),
            start: self.start,
            values: self.values.iter().map(|&v| from_f64(v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub a_start: usize,
    pub b_start: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleRecord {
    pub antecedent: ShapeRecord,
    pub consequent: ShapeRecord,
    pub tau: f64,
    pub theta: f64,
    pub score: f64,
    pub s: usize,
    pub n_antecedents: usize,
    pub matched_instances: Vec<InstanceRecord>,
}

impl RuleRecord {
    pub fn from_scored<T: Scalar>(scored: &ScoredRule<T>) -> Self {
        RuleRecord {
            antecedent: ShapeRecord::from_shape(&scored.rule.antecedent),
            consequent: ShapeRecord::from_shape(&scored.rule.consequent),
            tau: scored.rule.tau,
            theta: scored.rule.theta.as_f64(),
            score: scored.score_f64(),
            s: scored.cardinality(),
            n_antecedents: scored.n_antecedents,
            matched_instances: scored
                .instances
                .iter()
                .map(|i| InstanceRecord {
                    a_start: i.a_start,
                    b_start: i.b_start,
                    gap: i.gap,
                })
                .collect(),
        }
    }

    pub fn to_rule<T: Scalar>(&self) -> Rule<T> {
        Rule {
            antecedent: self.antecedent.to_shape(),
            consequent: self.consequent.to_shape(),
            tau: self.tau,
            theta: from_f64(self.theta),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub motif_lengths: Vec<usize>,
    pub k_motifs: usize,
    pub motif_candidates: usize,
    pub k_rules: usize,
    pub tau: f64,
    pub theta: f64,
    pub consequent_theta: Option<f64>,
    pub bits: u8,
    pub normalize: bool,
}

impl ConfigRecord {
    pub fn from_config<T: Scalar>(cfg: &MinerConfig<T>) -> Self {
        ConfigRecord {
            motif_lengths: cfg.motif_lengths.clone(),
            k_motifs: cfg.k_motifs,
            motif_candidates: cfg.motif_candidates,
            k_rules: cfg.k_rules,
            tau: cfg.tau,
            theta: cfg.theta.as_f64(),
            consequent_theta: cfg.consequent_theta.map(|t| t.as_f64()),
            bits: cfg.bits,
            normalize: cfg.normalize,
        }
    }

    pub fn to_config<T: Scalar>(&self) -> MinerConfig<T> {
        MinerConfig {
            motif_lengths: self.motif_lengths.clone(),
            k_motifs: self.k_motifs,
            motif_candidates: self.motif_candidates,
            k_rules: self.k_rules,
            tau: self.tau,
            theta: from_f64(self.theta),
            consequent_theta: self.consequent_theta.map(from_f64),
            bits: self.bits,
            normalize: self.normalize,
        }
    }
}

/// A mined rule set, self-contained for later evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RulesFile {
    /// Id of the manifest describing the producing run, when written by the CLI.
    pub manifest: Option<String>,
    pub series_a: String,
    pub series_b: String,
    pub config: ConfigRecord,
    pub digitize_lo: f64,
    pub digitize_hi: f64,
    pub rules: Vec<RuleRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiringRecord {
    pub fire_index: usize,
    pub predicted_index: usize,
    pub dist: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleEvalRecord {
    pub rule_index: usize,
    /// Absent when the rule could not be scored (see `error`).
    pub q: Option<f64>,
    pub n_firings: usize,
    pub error: Option<String>,
    pub firings: Vec<FiringRecord>,
}

/// Per-rule Q report plus the mean over the top five scorable rules.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub rules_manifest: Option<String>,
    pub repetitions: usize,
    pub seed: u64,
    pub per_rule: Vec<RuleEvalRecord>,
    pub top5_mean_q: Option<f64>,
}

impl EvalReport {
    /// Mean Q over the first `limit` rules that produced one.
    pub fn mean_q_of_top(per_rule: &[RuleEvalRecord], limit: usize) -> Option<f64> {
        let qs: Vec<f64> = per_rule.iter().take(limit).filter_map(|r| r.q).collect();
        if qs.is_empty() {
            None
        } else {
            Some(qs.iter().sum::<f64>() / qs.len() as f64)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthInstance {
    pub a_start: usize,
    pub b_start: usize,
    pub gap: usize,
}

/// Ground truth written next to generated synthetic series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthFile {
    pub seed: u64,
    pub length: usize,
    pub instances: usize,
    pub gap_lo: usize,
    pub gap_hi: usize,
    pub noise_sd: f64,
    pub theta: f64,
    pub tau: f64,
    pub antecedent: Vec<f64>,
    pub consequent: Vec<f64>,
    pub planted: Vec<TruthInstance>,
}

impl TruthFile {
    pub fn from_synthetic<T: Scalar>(
        data: &Synthetic<T>,
        length: usize,
        gap_range: (usize, usize),
        noise_sd: f64,
        seed: u64,
    ) -> Self {
        TruthFile {
            seed,
            length,
            instances: data.instances.len(),
            gap_lo: gap_range.0,
            gap_hi: gap_range.1,
            noise_sd,
            theta: data.rule.theta.as_f64(),
            tau: data.rule.tau,
            antecedent: data.rule.antecedent.values.iter().map(|v| v.as_f64()).collect(),
            consequent: data.rule.consequent.values.iter().map(|v| v.as_f64()).collect(),
            planted: data
                .instances
                .iter()
                .map(|&PlantedInstance { a_start, b_start, gap }| TruthInstance {
                    a_start,
                    b_start,
                    gap,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::q_metric;
    use crate::eval::{gen_synthetic, SyntheticConfig};
    use crate::miner::{find_top_rules, MinerConfig};
    use crate::series::DistanceMode;

    #[test]
    fn rules_file_round_trips_through_json() {
        let cfg = SyntheticConfig {
            length: 2500,
            instances: 6,
            gap_range: (5, 25),
            noise_sd: 0.2,
            seed: 11,
        };
        let data = gen_synthetic::<f64>(&cfg).unwrap();
        let miner_cfg = MinerConfig {
            motif_lengths: vec![30],
            k_motifs: 2,
            motif_candidates: 8,
            k_rules: 3,
            tau: 30.0,
            theta: 8.0,
            consequent_theta: None,
            bits: 6,
            normalize: false,
        };
        let rules = find_top_rules(&data.series_a, &data.series_b, &miner_cfg).unwrap();
        assert!(!rules.is_empty());
        let file = RulesFile {
            manifest: Some("test".into()),
            series_a: data.series_a.name().into(),
            series_b: data.series_b.name().into(),
            config: ConfigRecord::from_config(&miner_cfg),
            digitize_lo: 0.0,
            digitize_hi: 1.0,
            rules: rules.iter().map(RuleRecord::from_scored).collect(),
        };
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: RulesFile = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.rules.len(), rules.len());

        // A rule restored from JSON is usable for evaluation on fresh data.
        let test = gen_synthetic::<f64>(&SyntheticConfig { seed: 12, ..cfg }).unwrap();
        let rule = parsed.rules[0].to_rule::<f64>();
        let q = q_metric(&rule, &test.series_a, &test.series_b, 50, 1, DistanceMode::Raw).unwrap();
        assert!(q.is_finite() && q >= 0.0);

        let roundtrip_cfg: MinerConfig<f64> = parsed.config.to_config();
        assert_eq!(roundtrip_cfg.motif_lengths, miner_cfg.motif_lengths);
        assert_eq!(roundtrip_cfg.tau, miner_cfg.tau);
    }

    #[test]
    fn top5_mean_skips_failed_rules() {
        let rec = |idx: usize, q: Option<f64>| RuleEvalRecord {
            rule_index: idx,
            q,
            n_firings: 0,
            error: q.is_none().then(|| "rule never fired".to_string()),
            firings: vec![],
        };
        let rows = vec![
            rec(0, Some(0.2)),
            rec(1, None),
            rec(2, Some(0.4)),
            rec(3, None),
            rec(4, None),
            rec(5, Some(99.0)), // beyond the top five
        ];
        let mean = EvalReport::mean_q_of_top(&rows, 5).unwrap();
        assert!((mean - 0.3).abs() < 1e-12);
        assert_eq!(EvalReport::mean_q_of_top(&rows[1..2], 5), None);
    }
}
