//! Exact motif discovery: repeated extraction of the closest non-overlapping
//! subsequence pair, plus roughness-based ranking.
//!
//! The search is exact - its result is defined to equal an exhaustive scan
//! over all non-overlapping window pairs - but it prunes with the triangle
//! inequality against a fixed reference window and abandons partial distance
//! sums early, which is what makes 10k-sample series practical.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{
    bounded_squared_distance, distance, znormalize_into, DistanceMode, Subsequence, TimeSeries,
};

/// A recurring shape: the closest pair of non-overlapping windows found at
/// one extraction step.
#[derive(Debug, Clone)]
pub struct Motif<T> {
    /// Pair member with the smaller start index; later stages measure
    /// distances against this one.
    pub template: Subsequence<T>,
    /// The pair's second member.
    pub partner: Subsequence<T>,
    /// Distance between the two members, in the discovery distance mode.
    pub pair_distance: T,
    /// Total variation of the raw template values.
    pub roughness: T,
}

impl<T: Scalar> Motif<T> {
    pub fn length(&self) -> usize {
        self.template.len()
    }
}

/// Total variation of a slice: the sum of absolute successive differences.
///
/// Flat segments (for example the all-zero stretches of a power meter) score
/// zero, which is what lets ranking demote them.
pub fn roughness<T: Scalar>(values: &[T]) -> Result<T> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            len: values.len(),
            min: 2,
        });
    }
    Ok(values
        .windows(2)
        .fold(T::zero(), |acc, w| acc + (w[1] - w[0]).abs()))
}

/// Orders motifs by descending roughness (ties: ascending pair distance,
/// then ascending template start) and keeps the best `k`.
pub fn sort_top_k<T: Scalar>(mut motifs: Vec<Motif<T>>, k: usize) -> Vec<Motif<T>> {
    motifs.sort_by(|a, b| {
        b.roughness
            .partial_cmp(&a.roughness)
            .unwrap()
            .then(a.pair_distance.partial_cmp(&b.pair_distance).unwrap())
            .then(a.template.start().cmp(&b.template.start()))
            .then(a.length().cmp(&b.length()))
    });
    motifs.truncate(k);
    motifs
}

/// Finds up to `count` motifs of the given length, in ascending pair
/// distance.
///
/// Each extraction returns the closest pair among windows that do not overlap
/// any previously returned template or partner; ties break on the smaller
/// `(start1, start2)`. Stops early when no non-overlapping pair is left.
pub fn find_motifs<T: Scalar>(
    series: &TimeSeries<T>,
    length: usize,
    count: usize,
    mode: DistanceMode,
) -> Result<Vec<Motif<T>>> {
    if length < 2 {
        return Err(Error::MotifLengthTooSmall(length));
    }
    let n = series.len();
    if length > n {
        return Err(Error::TemplateTooLong {
            template: length,
            series: n,
        });
    }
    if n < 2 * length {
        return Err(Error::SeriesTooShortForMotifs {
            length,
            min: 2 * length,
            len: n,
        });
    }

    let window_count = n - length + 1;
    let windows = WindowView::new(series.values(), length, mode)?;
    let reference: Vec<T> = windows.get(0).to_vec();
    let ref_dist: Vec<T> = (0..window_count)
        .map(|i| distance(windows.get(i), &reference).expect("windows share one length"))
        .collect();

    let mut chosen: Vec<usize> = Vec::new();
    let mut found = Vec::new();
    while found.len() < count {
        let mut order: Vec<usize> = (0..window_count)
            .filter(|&i| chosen.iter().all(|&c| i.abs_diff(c) >= length))
            .collect();
        if order.len() < 2 {
            break;
        }
        order.sort_by(|&a, &b| {
            ref_dist[a]
                .partial_cmp(&ref_dist[b])
                .unwrap()
                .then(a.cmp(&b))
        });
        let Some(best) = closest_pair(&windows, &order, &ref_dist, length) else {
            break;
        };
        let template = series.subsequence(best.pair.0, length)?;
        let partner = series.subsequence(best.pair.1, length)?;
        let rough = roughness(template.values())?;
        chosen.push(best.pair.0);
        chosen.push(best.pair.1);
        found.push(Motif {
            template,
            partner,
            pair_distance: best.sq.sqrt(),
            roughness: rough,
        });
    }
    Ok(found)
}

struct Best<T> {
    sq: T,
    dist: T,
    pair: (usize, usize),
}

/// Closest non-overlapping pair among the windows listed in `order`, which
/// must be sorted by reference distance.
fn closest_pair<T: Scalar>(
    windows: &WindowView<'_, T>,
    order: &[usize],
    ref_dist: &[T],
    length: usize,
) -> Option<Best<T>> {
    let mut best: Option<Best<T>> = None;
    for offset in 1..order.len() {
        let mut candidates_remain = false;
        for k in 0..order.len() - offset {
            let (a, b) = (order[k], order[k + offset]);
            // |d(a,x) - d(b,x)| <= d(a,b): once every pair at this offset is
            // ruled out by that bound, larger offsets can only be worse.
            if let Some(cur) = &best {
                if ref_dist[b] - ref_dist[a] > cur.dist {
                    continue;
                }
            }
            candidates_remain = true;
            if a.abs_diff(b) < length {
                continue;
            }
            let pair = (a.min(b), a.max(b));
            let cutoff = best.as_ref().map(|cur| (cur.sq, pair > cur.pair));
            let Some(sq) = bounded_squared_distance(windows.get(a), windows.get(b), cutoff) else {
                continue;
            };
            let improves = match &best {
                None => true,
                Some(cur) => sq < cur.sq || (sq == cur.sq && pair < cur.pair),
            };
            if improves {
                best = Some(Best {
                    sq,
                    dist: sq.sqrt(),
                    pair,
                });
            }
        }
        if best.is_some() && !candidates_remain {
            break;
        }
    }
    best
}

/// Window accessor that serves raw slices or a pre-normalized copy, so the
/// search code is mode-agnostic.
enum WindowView<'a, T> {
    Raw { values: &'a [T], length: usize },
    Normalized { flat: Vec<T>, length: usize },
}

impl<'a, T: Scalar> WindowView<'a, T> {
    fn new(values: &'a [T], length: usize, mode: DistanceMode) -> Result<Self> {
        match mode {
            DistanceMode::Raw => Ok(WindowView::Raw { values, length }),
            DistanceMode::ZNormalized => {
                let window_count = values.len() - length + 1;
                let mut flat = Vec::with_capacity(window_count * length);
                let mut scratch = Vec::with_capacity(length);
                for i in 0..window_count {
                    znormalize_into(&values[i..i + length], &mut scratch)?;
                    flat.extend_from_slice(&scratch);
                }
                Ok(WindowView::Normalized { flat, length })
            }
        }
    }

    fn get(&self, i: usize) -> &[T] {
        match self {
            WindowView::Raw { values, length } => &values[i..i + length],
            WindowView::Normalized { flat, length } => &flat[i * length..(i + 1) * length],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TimeSeries;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(values: Vec<f64>) -> TimeSeries<f64> {
        TimeSeries::new("t", values, 0.0, 1.0).unwrap()
    }

    /// Exhaustive reference: repeated closest-pair extraction by brute force.
    fn exhaustive_motifs(
        values: &[f64],
        length: usize,
        count: usize,
        mode: DistanceMode,
    ) -> Vec<(usize, usize, f64)> {
        let space: Vec<Vec<f64>> = match mode {
            DistanceMode::Raw => (0..=values.len() - length)
                .map(|i| values[i..i + length].to_vec())
                .collect(),
            DistanceMode::ZNormalized => (0..=values.len() - length)
                .map(|i| crate::series::znormalize(&values[i..i + length]).unwrap())
                .collect(),
        };
        let mut chosen: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for _ in 0..count {
            let free: Vec<usize> = (0..space.len())
                .filter(|&i| chosen.iter().all(|&c| i.abs_diff(c) >= length))
                .collect();
            let mut best: Option<(f64, usize, usize)> = None;
            for (pos, &i) in free.iter().enumerate() {
                for &j in &free[pos + 1..] {
                    if j - i < length {
                        continue;
                    }
                    let d = crate::series::squared_distance(&space[i], &space[j]);
                    let better = match best {
                        None => true,
                        Some((bd, bi, bj)) => d < bd || (d == bd && (i, j) < (bi, bj)),
                    };
                    if better {
                        best = Some((d, i, j));
                    }
                }
            }
            let Some((d, i, j)) = best else { break };
            chosen.push(i);
            chosen.push(j);
            out.push((i, j, d.sqrt()));
        }
        out
    }

    #[test]
    fn roughness_cases() {
        assert_eq!(roughness(&[0.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(roughness(&[0.0, 1.0, 0.0, 1.0]).unwrap(), 3.0);
        assert!(roughness(&[1.0]).is_err());
    }

    #[test]
    fn roughness_matches_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..20).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mut manual = 0.0;
        for i in 1..v.len() {
            manual += (v[i] - v[i - 1]).abs();
        }
        assert!((roughness(&v).unwrap() - manual).abs() < 1e-12);
    }

    #[test]
    fn finds_planted_identical_bursts() {
        // Identical bursts on a background of non-repeating noise: the
        // planted pair is the unique zero-distance pair.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut values: Vec<f64> = (0..700).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let burst: Vec<f64> = (0..40).map(|i| (i as f64 * 0.5).sin() * 8.0).collect();
        for (k, &b) in burst.iter().enumerate() {
            values[100 + k] = b;
            values[500 + k] = b;
        }
        let ts = series(values);
        let motifs = find_motifs(&ts, 40, 1, DistanceMode::Raw).unwrap();
        assert_eq!(motifs[0].template.start(), 100);
        assert_eq!(motifs[0].partner.start(), 500);
        assert!(motifs[0].pair_distance < 0.1);
    }

    #[test]
    fn ramp_matches_exhaustive_search() {
        let values: Vec<f64> = (0..60).map(|i| i as f64).collect();
        let ts = series(values.clone());
        let motifs = find_motifs(&ts, 10, 1, DistanceMode::Raw).unwrap();
        let oracle = exhaustive_motifs(&values, 10, 1, DistanceMode::Raw);
        assert_eq!(motifs[0].template.start(), oracle[0].0);
        assert_eq!(motifs[0].partner.start(), oracle[0].1);
        assert_eq!(motifs[0].pair_distance, oracle[0].2);
    }

    #[test]
    fn constant_series_ties_break_on_indices() {
        let ts = series(vec![2.5; 50]);
        let motifs = find_motifs(&ts, 10, 2, DistanceMode::Raw).unwrap();
        assert_eq!(motifs[0].template.start(), 0);
        assert_eq!(motifs[0].partner.start(), 10);
        assert_eq!(motifs[0].pair_distance, 0.0);
        // Second extraction must avoid the first pair's windows.
        assert_eq!(motifs[1].template.start(), 20);
        assert_eq!(motifs[1].partner.start(), 30);
    }

    #[test]
    fn errors_on_degenerate_input() {
        let ts = series(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            find_motifs(&ts, 5, 1, DistanceMode::Raw),
            Err(Error::TemplateTooLong { .. })
        ));
        assert!(matches!(
            find_motifs(&ts, 2, 1, DistanceMode::Raw),
            Err(Error::SeriesTooShortForMotifs { .. })
        ));
        assert!(matches!(
            find_motifs(&ts, 1, 1, DistanceMode::Raw),
            Err(Error::MotifLengthTooSmall(1))
        ));
    }

    #[test]
    fn returned_motifs_never_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..240).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let ts = series(values);
        let motifs = find_motifs(&ts, 12, 5, DistanceMode::Raw).unwrap();
        let mut starts: Vec<usize> = Vec::new();
        for m in &motifs {
            starts.push(m.template.start());
            starts.push(m.partner.start());
        }
        for (i, &a) in starts.iter().enumerate() {
            for &b in &starts[i + 1..] {
                assert!(a.abs_diff(b) >= 12);
            }
        }
        // Invariant: stored distance equals a recomputation.
        for m in &motifs {
            assert_eq!(
                m.pair_distance,
                distance(m.template.values(), m.partner.values()).unwrap()
            );
        }
    }

    #[test]
    fn sort_top_k_orders_by_roughness() {
        let ts = series(vec![0.0; 40]);
        let base = find_motifs(&ts, 4, 1, DistanceMode::Raw).unwrap().remove(0);
        let with = |rough: f64, dist: f64| Motif {
            roughness: rough,
            pair_distance: dist,
            ..base.clone()
        };
        let motifs = vec![with(5.0, 1.0), with(2.0, 0.5), with(9.0, 2.0)];
        let top = sort_top_k(motifs, 2);
        assert_eq!(top[0].roughness, 9.0);
        assert_eq!(top[1].roughness, 5.0);

        // Saturation: k beyond the list returns everything, reordered.
        let motifs = vec![with(1.0, 0.0), with(3.0, 0.0)];
        let all = sort_top_k(motifs, 10);
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].roughness, 3.0);
    }

    #[test]
    fn sort_top_k_selects_without_fabricating() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let values: Vec<f64> = (0..200).map(|_| rng.gen_range(-8.0..8.0)).collect();
        let ts = series(values);
        let motifs = find_motifs(&ts, 8, 6, DistanceMode::Raw).unwrap();
        let key = |m: &Motif<f64>| (m.template.start(), m.partner.start(), m.pair_distance.to_bits());
        let input_keys: Vec<_> = motifs.iter().map(key).collect();
        let top = sort_top_k(motifs, 4);
        assert_eq!(top.len(), 4);
        for m in &top {
            assert!(input_keys.contains(&key(m)), "motif not from the input set");
        }
        for pair in top.windows(2) {
            assert!(pair[0].roughness >= pair[1].roughness);
        }
    }

    #[test]
    fn zero_series_motif_ranks_last() {
        // A flat "appliance off" motif loses to anything with activity.
        let ts = series(vec![0.0; 40]);
        let flat = find_motifs(&ts, 4, 1, DistanceMode::Raw).unwrap().remove(0);
        let spiky_source = series(vec![0.0, 7.0, 0.0, 7.0, 0.0, 7.0, 0.0, 7.0]);
        let spiky = find_motifs(&spiky_source, 4, 1, DistanceMode::Raw)
            .unwrap()
            .remove(0);
        let top = sort_top_k(vec![flat, spiky], 1);
        assert!(top[0].roughness > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn matches_exhaustive_oracle(
            values in proptest::collection::vec(-100.0f64..100.0, 24..300),
            length in 3usize..21,
            count in 1usize..4,
            normalized in proptest::bool::ANY,
        ) {
            prop_assume!(values.len() >= 2 * length);
            let mode = if normalized { DistanceMode::ZNormalized } else { DistanceMode::Raw };
            let ts = series(values.clone());
            let got = find_motifs(&ts, length, count, mode).unwrap();
            let want = exhaustive_motifs(&values, length, count, mode);
            prop_assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                prop_assert_eq!(g.template.start(), w.0);
                prop_assert_eq!(g.partner.start(), w.1);
                prop_assert_eq!(g.pair_distance, w.2);
            }
        }
    }
}
