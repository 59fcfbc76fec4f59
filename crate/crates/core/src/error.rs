//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path} row {row}: cannot parse {cell:?} as a finite number")]
    BadCell {
        path: PathBuf,
        row: usize,
        cell: String,
    },
    #[error("{path}: column {column:?} not found")]
    ColumnNotFound { path: PathBuf, column: String },
    #[error("{path} row {row}: timestamps must be strictly increasing")]
    NonIncreasingTimestamps { path: PathBuf, row: usize },
    #[error(
        "{path} row {row}: sample interval {delta} deviates more than 1% from the median {median}"
    )]
    UnevenSampling {
        path: PathBuf,
        row: usize,
        delta: f64,
        median: f64,
    },
    #[error("time series must contain at least one sample")]
    EmptySeries,
    #[error("sample period must be positive, got {0}")]
    NonPositivePeriod(f64),
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("subsequence [{start}, {start}+{length}) lies outside a series of length {series_len}")]
    SubsequenceOutOfBounds {
        start: usize,
        length: usize,
        series_len: usize,
    },
    #[error("cannot resample from period {from} down to {to}; upsampling is unsupported")]
    UpsamplingUnsupported { from: f64, to: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {min} samples, got {len}")]
    TooShort { len: usize, min: usize },
    #[error("motif length must be at least 2, got {0}")]
    MotifLengthTooSmall(usize),
    #[error("motif length {length} needs at least {min} samples, series has {len}")]
    SeriesTooShortForMotifs {
        length: usize,
        min: usize,
        len: usize,
    },
    #[error("template length {template} exceeds series length {series}")]
    TemplateTooLong { template: usize, series: usize },
    #[error("max interval tau must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("brute-force matching is limited to 8x8 occurrence lists, got {p}x{q}")]
    GraphTooLarge { p: usize, q: usize },
    #[error("symbol cardinality must lie in [2, 16] bits, got {0}")]
    BitsOutOfRange(u8),
    #[error("digitization range requires lo <= hi, got lo={lo}, hi={hi}")]
    InvalidDigitizeRange { lo: f64, hi: f64 },
    #[error("digital sequences disagree in {what}: {left} vs {right}")]
    DigitalMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("rule scoring requires at least one antecedent occurrence")]
    NoAntecedents,
    #[error("matched instances ({matched}) exceed antecedent occurrences ({antecedents})")]
    MoreMatchesThanAntecedents { matched: usize, antecedents: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("rule never fired on the test series")]
    NoFirings,
    #[error("no prediction window after the firing at time {fire_end}")]
    EmptyPredictionWindow { fire_end: f64 },
    #[error("random-baseline distance sum is zero; the test series offers no contrast")]
    ZeroDenominator,
    #[error("cannot place {instances} episodes of span {span} into {length} samples")]
    InfeasiblePlacement {
        instances: usize,
        span: usize,
        length: usize,
    },
}
