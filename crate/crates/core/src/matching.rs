//! Instance matching: pair antecedent and consequent occurrences under the
//! order-preserving (non-crossing) constraint.
//!
//! Feasible pairs form a bipartite graph whose edge weights are the time gaps
//! between an antecedent's last sample and a consequent's first sample. The
//! selected instance set maximizes cardinality first and minimizes total gap
//! second. Because selected edges must be strictly increasing on both sides,
//! the optimum is found exactly by a dynamic program over the two sorted
//! occurrence lists; [`brute_force_match`] keeps the defining enumeration for
//! conformance checks.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scan::Occurrence;

/// A feasible instance: antecedent occurrence `antecedent` (index into the
/// graph's antecedent list) followed by consequent occurrence `consequent`
/// within the allowed interval. `weight` is the gap in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchEdge {
    pub antecedent: usize,
    pub consequent: usize,
    pub weight: f64,
}

/// Weighted bipartite graph of feasible instances.
#[derive(Debug, Clone)]
pub struct MatchGraph<T> {
    /// Antecedent occurrences, sorted by time.
    pub antecedents: Vec<Occurrence<T>>,
    /// Consequent occurrences, sorted by time.
    pub consequents: Vec<Occurrence<T>>,
    /// Feasible edges in lexicographic (antecedent, consequent) order.
    pub edges: Vec<MatchEdge>,
    /// Upper bound (exclusive) on the gap.
    pub tau: f64,
}

/// The selected instance set.
#[derive(Debug, Clone, Default)]
pub struct MatchResult {
    /// Selected edges, ascending on both endpoints.
    pub selected: Vec<MatchEdge>,
    /// Total gap of the selection.
    pub total_weight: f64,
}

impl MatchResult {
    pub fn cardinality(&self) -> usize {
        self.selected.len()
    }

    /// Selected (antecedent, consequent) index pairs.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.selected
            .iter()
            .map(|e| (e.antecedent, e.consequent))
            .collect()
    }
}

/// Builds the feasible-instance graph: an edge (i, j) exists iff the gap
/// between antecedent i's last sample and consequent j's first sample lies
/// strictly inside (0, tau).
pub fn build_graph<T: Scalar>(
    antecedents: Vec<Occurrence<T>>,
    consequents: Vec<Occurrence<T>>,
    tau: f64,
) -> Result<MatchGraph<T>> {
    if !(tau > 0.0) {
        return Err(Error::NonPositiveTau(tau));
    }
    debug_assert!(antecedents.windows(2).all(|w| w[0].time <= w[1].time));
    debug_assert!(consequents.windows(2).all(|w| w[0].time <= w[1].time));
    let mut edges = Vec::new();
    for (i, a) in antecedents.iter().enumerate() {
        for (j, c) in consequents.iter().enumerate() {
            let gap = c.time - a.end_time;
            if gap > 0.0 && gap < tau {
                edges.push(MatchEdge {
                    antecedent: i,
                    consequent: j,
                    weight: gap,
                });
            }
        }
    }
    Ok(MatchGraph {
        antecedents,
        consequents,
        edges,
        tau,
    })
}

#[derive(Clone, Copy, PartialEq)]
struct Value {
    count: usize,
    weight: f64,
}

impl Value {
    const EMPTY: Value = Value {
        count: 0,
        weight: 0.0,
    };

    fn beats(self, other: Value) -> bool {
        self.count > other.count || (self.count == other.count && self.weight < other.weight)
    }
}

/// Exact lexicographic optimum (max cardinality, then min total weight) under
/// the non-crossing and degree-one constraints.
///
/// Suffix dynamic program over (antecedent prefix, consequent prefix); the
/// traceback picks, at every step, the lexicographically smallest edge that
/// still reaches the optimum, so ties on (cardinality, weight) resolve to the
/// smallest sorted edge list. Runs in O(p*q + s*|E|).
pub fn match_noncrossing<T: Scalar>(graph: &MatchGraph<T>) -> MatchResult {
    let p = graph.antecedents.len();
    let q = graph.consequents.len();
    let mut weight_at: Vec<Option<f64>> = vec![None; p * q];
    for e in &graph.edges {
        weight_at[e.antecedent * q + e.consequent] = Some(e.weight);
    }

    // best[i][j] = optimum over antecedents i.. and consequents j..
    let stride = q + 1;
    let mut best = vec![Value::EMPTY; (p + 1) * (q + 1)];
    for i in (0..p).rev() {
        for j in (0..q).rev() {
            let mut v = best[(i + 1) * stride + j];
            let skip_consequent = best[i * stride + j + 1];
            if skip_consequent.beats(v) {
                v = skip_consequent;
            }
            if let Some(w) = weight_at[i * q + j] {
                let rest = best[(i + 1) * stride + j + 1];
                let take = Value {
                    count: rest.count + 1,
                    weight: w + rest.weight,
                };
                if take.beats(v) {
                    v = take;
                }
            }
            best[i * stride + j] = v;
        }
    }

    let optimum = best[0];
    let mut selected = Vec::with_capacity(optimum.count);
    let (mut i, mut j) = (0usize, 0usize);
    let mut target = optimum;
    while target.count > 0 {
        let mut advanced = false;
        for e in &graph.edges {
            if e.antecedent < i || e.consequent < j {
                continue;
            }
            let rest = best[(e.antecedent + 1) * stride + e.consequent + 1];
            // Weight sums are folded in the same order here and in the DP, so
            // this equality is exact whenever the edge attains the optimum.
            if rest.count + 1 == target.count && e.weight + rest.weight == target.weight {
                selected.push(e.clone());
                i = e.antecedent + 1;
                j = e.consequent + 1;
                target = rest;
                advanced = true;
                break;
            }
        }
        assert!(advanced, "traceback failed to reach the computed optimum");
    }
    MatchResult {
        selected,
        total_weight: optimum.weight,
    }
}

/// Reference matcher: enumerates every order-increasing edge chain (these are
/// exactly the subsets satisfying the degree and non-crossing constraints)
/// and keeps the lexicographic optimum. Guarded to small graphs.
pub fn brute_force_match<T: Scalar>(graph: &MatchGraph<T>) -> Result<MatchResult> {
    let p = graph.antecedents.len();
    let q = graph.consequents.len();
    if p > 8 || q > 8 {
        return Err(Error::GraphTooLarge { p, q });
    }
    let edges = &graph.edges;

    // Total gap folded from the back, matching the suffix DP exactly.
    fn chain_weight(edges: &[MatchEdge], chain: &[usize]) -> f64 {
        chain
            .iter()
            .rev()
            .fold(0.0, |acc, &idx| edges[idx].weight + acc)
    }

    let mut best_value = Value::EMPTY;
    let mut best_chain: Vec<usize> = Vec::new();
    // Depth-first over edge indices in increasing order enumerates chains in
    // lexicographic order, so keeping only strict improvements leaves the
    // lexicographically smallest optimal chain in place.
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(chain) = stack.pop() {
        let value = Value {
            count: chain.len(),
            weight: chain_weight(edges, &chain),
        };
        if value.beats(best_value) {
            best_value = value;
            best_chain = chain.clone();
        }
        let next_from = chain.last().map_or(0, |&idx| idx + 1);
        // Push in reverse so the stack explores smaller indices first.
        for idx in (next_from..edges.len()).rev() {
            let ok = chain.last().is_none_or(|&last| {
                edges[idx].antecedent > edges[last].antecedent
                    && edges[idx].consequent > edges[last].consequent
            });
            if ok {
                let mut extended = chain.clone();
                extended.push(idx);
                stack.push(extended);
            }
        }
    }

    Ok(MatchResult {
        selected: best_chain.iter().map(|&i| edges[i].clone()).collect(),
        total_weight: best_value.weight,
    })
}
