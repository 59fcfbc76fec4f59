//! Time-series container, CSV ingestion, resampling and distances.
//!
//! A [`TimeSeries`] is an immutable, uniformly sampled sequence of finite
//! values with a time base (`start_time` seconds since epoch, `period`
//! seconds per sample). Cloning is cheap; the sample buffer is shared, so a
//! series can be handed to concurrent workers freely.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{from_f64, Scalar};

#[derive(Debug)]
struct SeriesData<T> {
    name: String,
    values: Vec<T>,
    start_time: f64,
    period: f64,
}

/// Uniformly sampled real-valued sequence.
#[derive(Debug, Clone)]
pub struct TimeSeries<T> {
    shared: Arc<SeriesData<T>>,
}

impl<T: Scalar> TimeSeries<T> {
    /// Builds a series, validating that it is non-empty, finite and has a
    /// positive period.
    pub fn new(
        name: impl Into<String>,
        values: Vec<T>,
        start_time: f64,
        period: f64,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(period > 0.0) {
            return Err(Error::NonPositivePeriod(period));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self {
            shared: Arc::new(SeriesData {
                name: name.into(),
                values,
                start_time,
                period,
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.shared.name
    }

    pub fn values(&self) -> &[T] {
        &self.shared.values
    }

    pub fn len(&self) -> usize {
        self.shared.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shared.values.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.shared.start_time
    }

    pub fn period(&self) -> f64 {
        self.shared.period
    }

    /// Timestamp of sample `index`.
    pub fn time_at(&self, index: usize) -> f64 {
        self.shared.start_time + index as f64 * self.shared.period
    }

    /// True when both handles share one underlying buffer (single-series mode).
    pub fn same_instance(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.shared, &other.shared)
    }

    /// Bounds-checked view of `length` samples starting at `start`.
    pub fn subsequence(&self, start: usize, length: usize) -> Result<Subsequence<T>> {
        if length == 0 || start + length > self.len() {
            return Err(Error::SubsequenceOutOfBounds {
                start,
                length,
                series_len: self.len(),
            });
        }
        Ok(Subsequence {
            series: self.clone(),
            start,
            length,
        })
    }

    /// Downsamples by bucket means. Samples are assigned to buckets by time,
    /// the trailing partial bucket is dropped, and the output keeps the input
    /// start time under the new period.
    pub fn resample(&self, new_period: f64) -> Result<TimeSeries<T>> {
        if !(new_period > 0.0) {
            return Err(Error::NonPositivePeriod(new_period));
        }
        if new_period < self.period() {
            return Err(Error::UpsamplingUnsupported {
                from: self.period(),
                to: new_period,
            });
        }
        let ratio = new_period / self.period();
        // The epsilon keeps exact integer multiples from landing a hair below
        // their bucket boundary.
        let bucket_of = |i: usize| (i as f64 / ratio + 1e-9).floor() as usize;
        let out_len = (self.len() as f64 / ratio + 1e-9).floor() as usize;
        if out_len == 0 {
            return Err(Error::TooShort {
                len: self.len(),
                min: ratio.ceil() as usize,
            });
        }
        let mut sums = vec![0.0f64; out_len];
        let mut counts = vec![0usize; out_len];
        for (i, v) in self.values().iter().enumerate() {
            let b = bucket_of(i);
            if b >= out_len {
                break;
            }
            sums[b] += v.as_f64();
            counts[b] += 1;
        }
        let means = sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| from_f64(s / c as f64))
            .collect();
        TimeSeries::new(self.name(), means, self.start_time(), new_period)
    }

    /// Minimum and maximum sample value.
    pub fn value_range(&self) -> (T, T) {
        let mut lo = self.values()[0];
        let mut hi = lo;
        for &v in self.values() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Borrowed view of `length` consecutive samples of a series.
#[derive(Debug, Clone)]
pub struct Subsequence<T> {
    series: TimeSeries<T>,
    start: usize,
    length: usize,
}

impl<T: Scalar> Subsequence<T> {
    pub fn series(&self) -> &TimeSeries<T> {
        &self.series
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn values(&self) -> &[T] {
        &self.series.values()[self.start..self.start + self.length]
    }

    /// Timestamp of the first sample.
    pub fn start_time(&self) -> f64 {
        self.series.time_at(self.start)
    }

    /// Timestamp of the last sample.
    pub fn end_time(&self) -> f64 {
        self.series.time_at(self.start + self.length - 1)
    }
}

/// How window distances are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Plain Euclidean distance on raw values (the default).
    #[default]
    Raw,
    /// Both template and candidate are z-normalized before comparing.
    ZNormalized,
}

/// Euclidean distance between two equal-length slices.
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(squared_distance(a, b).sqrt())
}

pub(crate) fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Squared distance with early abandoning against `cutoff`.
///
/// Returns `None` as soon as the running sum exceeds the cutoff (or reaches
/// it, when `abandon_on_equal` says a tie cannot win either).
pub(crate) fn bounded_squared_distance<T: Scalar>(
    a: &[T],
    b: &[T],
    cutoff: Option<(T, bool)>,
) -> Option<T> {
    let Some((limit, abandon_on_equal)) = cutoff else {
        return Some(squared_distance(a, b));
    };
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc = acc + d * d;
        if acc > limit || (abandon_on_equal && acc == limit) {
            return None;
        }
    }
    Some(acc)
}

/// Z-normalizes a slice to mean 0 and population standard deviation 1.
///
/// A slice whose standard deviation falls below `1e-12` is mapped to all
/// zeros rather than amplifying noise.
pub fn znormalize<T: Scalar>(values: &[T]) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(values.len());
    znormalize_into(values, &mut out)?;
    Ok(out)
}

pub(crate) fn znormalize_into<T: Scalar>(values: &[T], out: &mut Vec<T>) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            len: values.len(),
            min: 2,
        });
    }
    let n = from_f64::<T>(values.len() as f64);
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / n;
    let var = values.iter().fold(T::zero(), |a, &v| {
        let d = v - mean;
        a + d * d
    }) / n;
    let sd = var.sqrt();
    out.clear();
    if sd < from_f64(1e-12) {
        out.extend(std::iter::repeat_n(T::zero(), values.len()));
    } else {
        out.extend(values.iter().map(|&v| (v - mean) / sd));
    }
    Ok(())
}

/// Distance between a template and a window under the given mode.
pub fn window_distance<T: Scalar>(template: &[T], window: &[T], mode: DistanceMode) -> Result<T> {
    match mode {
        DistanceMode::Raw => distance(template, window),
        DistanceMode::ZNormalized => {
            let t = znormalize(template)?;
            let w = znormalize(window)?;
            distance(&t, &w)
        }
    }
}

/// Picks a CSV column by zero-based index or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Name(n) => write!(f, "{n}"),
        }
    }
}

/// Loads one value column (and optionally a timestamp column) from a CSV file.
///
/// The file may or may not carry a header row; a header is assumed whenever a
/// column is selected by name, or when the first row does not parse as
/// numbers. With a timestamp column the period is the median timestamp delta
/// and deltas must stay within 1% of it; without one the period defaults to
/// 1.0 and the start time to 0. Missing or non-numeric cells are rejected
/// with their row number.
pub fn load_csv<T: Scalar>(
    path: &Path,
    column: &ColumnSelector,
    timestamp_column: Option<&ColumnSelector>,
) -> Result<TimeSeries<T>> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        rows.push(record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?);
    }
    if rows.is_empty() {
        return Err(Error::EmptySeries);
    }

    let by_name = matches!(column, ColumnSelector::Name(_))
        || matches!(timestamp_column, Some(ColumnSelector::Name(_)));
    let first_is_numeric = {
        let probe = |sel: &ColumnSelector| match sel {
            ColumnSelector::Index(i) => rows[0]
                .get(*i)
                .map(|c| c.parse::<f64>().is_ok())
                .unwrap_or(false),
            ColumnSelector::Name(_) => false,
        };
        probe(column) && timestamp_column.is_none_or(probe)
    };
    let has_header = by_name || !first_is_numeric;

    let resolve = |sel: &ColumnSelector| -> Result<usize> {
        match sel {
            ColumnSelector::Index(i) => Ok(*i),
            ColumnSelector::Name(n) => rows[0]
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::ColumnNotFound {
                    path: path.to_path_buf(),
                    column: n.clone(),
                }),
        }
    };
    let value_idx = resolve(column)?;
    let time_idx = timestamp_column.map(resolve).transpose()?;

    let data_rows = if has_header { &rows[1..] } else { &rows[..] };
    let first_row_number = if has_header { 2 } else { 1 };
    let parse_cell = |record: &csv::StringRecord, idx: usize, row: usize| -> Result<f64> {
        let cell = record.get(idx).unwrap_or("");
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::BadCell {
                path: path.to_path_buf(),
                row,
                cell: cell.to_string(),
            }),
        }
    };

    let mut values: Vec<T> = Vec::with_capacity(data_rows.len());
    let mut timestamps: Vec<f64> = Vec::new();
    for (offset, record) in data_rows.iter().enumerate() {
        let row = first_row_number + offset;
        values.push(from_f64(parse_cell(record, value_idx, row)?));
        if let Some(t_idx) = time_idx {
            timestamps.push(parse_cell(record, t_idx, row)?);
        }
    }

    let (start_time, period) = if timestamps.is_empty() {
        (0.0, 1.0)
    } else if timestamps.len() == 1 {
        (timestamps[0], 1.0)
    } else {
        let mut deltas = Vec::with_capacity(timestamps.len() - 1);
        for (i, pair) in timestamps.windows(2).enumerate() {
            let delta = pair[1] - pair[0];
            if !(delta > 0.0) {
                return Err(Error::NonIncreasingTimestamps {
                    path: path.to_path_buf(),
                    row: first_row_number + i + 1,
                });
            }
            deltas.push(delta);
        }
        let mut sorted = deltas.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        for (i, &delta) in deltas.iter().enumerate() {
            if (delta - median).abs() > 0.01 * median {
                return Err(Error::UnevenSampling {
                    path: path.to_path_buf(),
                    row: first_row_number + i + 1,
                    delta,
                    median,
                });
            }
        }
        (timestamps[0], median)
    };

    TimeSeries::new(name, values, start_time, period)
}
