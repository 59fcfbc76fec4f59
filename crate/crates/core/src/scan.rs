//! Sliding-window occurrence scanning: score every window against a
//! template, keep the ones under the threshold, drop overlaps.

use std::borrow::Cow;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{
    bounded_squared_distance, znormalize_into, DistanceMode, Subsequence, TimeSeries,
};

/// One template-like window found by a scan.
#[derive(Debug, Clone)]
pub struct Occurrence<T> {
    pub start: usize,
    pub length: usize,
    /// Distance to the template at scan time (strictly below the threshold).
    pub dist: T,
    /// Timestamp of the window's first sample.
    pub time: f64,
    /// Timestamp of the window's last sample.
    pub end_time: f64,
}

impl<T: Scalar> Occurrence<T> {
    pub fn from_window(series: &TimeSeries<T>, start: usize, length: usize, dist: T) -> Self {
        Occurrence {
            start,
            length,
            dist,
            time: series.time_at(start),
            end_time: series.time_at(start + length - 1),
        }
    }
}

/// Finds all non-overlapping template-like windows with distance strictly
/// below `threshold`, sorted by start index.
///
/// Every window of the template's length is scored (O(|template|*|series|)),
/// windows at or above the threshold are discarded, and [`remove_overlaps`]
/// keeps the closest window of each overlapping cluster. The template may
/// come from a different series than the one being scanned.
pub fn scan_similar<T: Scalar>(
    series: &TimeSeries<T>,
    template: &Subsequence<T>,
    threshold: T,
    mode: DistanceMode,
) -> Result<Vec<Occurrence<T>>> {
    let m = template.len();
    let n = series.len();
    if m > n {
        return Err(Error::TemplateTooLong {
            template: m,
            series: n,
        });
    }
    let template_values: Cow<'_, [T]> = match mode {
        DistanceMode::Raw => Cow::Borrowed(template.values()),
        DistanceMode::ZNormalized => Cow::Owned(crate::series::znormalize(template.values())?),
    };
    let threshold_sq = if threshold.is_finite() {
        Some((threshold * threshold, true))
    } else {
        None
    };
    let values = series.values();
    let mut scratch: Vec<T> = Vec::with_capacity(m);
    let mut candidates = Vec::new();
    for start in 0..=n - m {
        let window = &values[start..start + m];
        let sq = match mode {
            DistanceMode::Raw => bounded_squared_distance(&template_values, window, threshold_sq),
            DistanceMode::ZNormalized => {
                znormalize_into(window, &mut scratch)?;
                bounded_squared_distance(&template_values, &scratch, threshold_sq)
            }
        };
        if let Some(sq) = sq {
            let dist = sq.sqrt();
            if dist < threshold {
                candidates.push(Occurrence::from_window(series, start, m, dist));
            }
        }
    }
    Ok(remove_overlaps(candidates))
}

/// Greedy overlap removal: candidates are claimed in ascending distance
/// (ties: ascending start) and one is kept only if it overlaps no previously
/// kept window. Two windows overlap when their starts differ by less than the
/// window length; touching is not overlapping. All candidates must share one
/// length. The result is sorted by start index.
pub fn remove_overlaps<T: Scalar>(mut candidates: Vec<Occurrence<T>>) -> Vec<Occurrence<T>> {
    if candidates.is_empty() {
        return candidates;
    }
    let length = candidates[0].length;
    debug_assert!(candidates.iter().all(|c| c.length == length));
    candidates.sort_by(|a, b| {
        a.dist
            .partial_cmp(&b.dist)
            .unwrap()
            .then(a.start.cmp(&b.start))
    });
    let mut taken_starts: BTreeSet<usize> = BTreeSet::new();
    let mut kept = Vec::new();
    for cand in candidates {
        let lo = (cand.start + 1).saturating_sub(length);
        let hi = cand.start + length - 1;
        if taken_starts.range(lo..=hi).next().is_none() {
            taken_starts.insert(cand.start);
            kept.push(cand);
        }
    }
    kept.sort_by_key(|o| o.start);
    kept
}
