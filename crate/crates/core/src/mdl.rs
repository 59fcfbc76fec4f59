//! Description-length scoring.
//!
//! Shapes are digitized onto a `2^b`-symbol alphabet over a shared affine
//! range, stated literally at `b` bits per symbol, or conditionally on a
//! reference shape by Huffman-coding the pointwise residuals. The bits saved
//! by the conditional encoding, summed over a rule's matched instances and
//! discounted by the fraction of antecedents actually matched, give the
//! rule's score.
//!
//! All lengths are whole bits; the final score is kept as an exact rational
//! so equal-scoring rules compare deterministically.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rule score in bits: exact ratio, may be negative.
pub type Score = Ratio<i64>;

/// A digitized shape: symbols in `[0, 2^bits - 1]` over the range `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalSeq {
    pub symbols: Vec<u16>,
    pub bits: u8,
    pub lo: f64,
    pub hi: f64,
}

impl DigitalSeq {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Quantizes values onto the `[lo, hi]` range with `bits`-bit symbols.
///
/// Values are mapped affinely, rounded to the nearest level and clamped, so
/// out-of-range values saturate. A degenerate range (`lo == hi`) maps
/// everything to symbol 0.
pub fn digitize<T: Scalar>(values: &[T], bits: u8, lo: T, hi: T) -> Result<DigitalSeq> {
    if !(2..=16).contains(&bits) {
        return Err(Error::BitsOutOfRange(bits));
    }
    let lo_f = lo.as_f64();
    let hi_f = hi.as_f64();
    if !(lo_f <= hi_f) {
        return Err(Error::InvalidDigitizeRange { lo: lo_f, hi: hi_f });
    }
    let levels = ((1u32 << bits) - 1) as f64;
    let span = hi_f - lo_f;
    let symbols = values
        .iter()
        .map(|v| {
            if span > 0.0 {
                let scaled = ((v.as_f64() - lo_f) / span * levels).round();
                scaled.clamp(0.0, levels) as u16
            } else {
                0
            }
        })
        .collect();
    Ok(DigitalSeq {
        symbols,
        bits,
        lo: lo_f,
        hi: hi_f,
    })
}

/// Literal description length: `len * bits` bits.
pub fn dl(seq: &DigitalSeq) -> u64 {
    seq.len() as u64 * seq.bits as u64
}

/// Description length of `x` given `y`: the pointwise residuals `x - y` are
/// Huffman-coded, plus `D * (bits + 2)` codebook bits for the `D` distinct
/// residual values. A single distinct residual costs only its codebook entry.
///
/// Depends only on the residual multiset.
pub fn dl_conditional(x: &DigitalSeq, y: &DigitalSeq) -> Result<u64> {
    if x.len() != y.len() {
        return Err(Error::DigitalMismatch {
            what: "length",
            left: x.len(),
            right: y.len(),
        });
    }
    if x.bits != y.bits {
        return Err(Error::DigitalMismatch {
            what: "cardinality bits",
            left: x.bits as usize,
            right: y.bits as usize,
        });
    }
    let mut counts: BTreeMap<i32, u64> = BTreeMap::new();
    for (&a, &b) in x.symbols.iter().zip(&y.symbols) {
        *counts.entry(a as i32 - b as i32).or_insert(0) += 1;
    }
    let codebook = counts.len() as u64 * (x.bits as u64 + 2);
    Ok(huffman_coded_bits(counts.values().copied()) + codebook)
}

/// Total Huffman-coded size of a frequency multiset: the sum of merge weights
/// equals the sum of `frequency * code length` over all symbols. Zero for a
/// single distinct symbol.
fn huffman_coded_bits(frequencies: impl IntoIterator<Item = u64>) -> u64 {
    let mut heap: BinaryHeap<Reverse<u64>> = frequencies.into_iter().map(Reverse).collect();
    let mut total = 0;
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().unwrap();
        let Reverse(b) = heap.pop().unwrap();
        total += a + b;
        heap.push(Reverse(a + b));
    }
    total
}

/// Bits saved by encoding `instance` relative to `template` instead of
/// literally. Negative for dissimilar shapes.
pub fn bit_saved(instance: &DigitalSeq, template: &DigitalSeq) -> Result<i64> {
    Ok(dl(instance) as i64 - dl_conditional(instance, template)? as i64)
}

/// Final rule score: `(s / n_antecedents) * (sum of bit savings - literal
/// cost of the consequent template)`, as an exact rational.
///
/// `savings` holds one [`bit_saved`] value per matched instance; an empty
/// slice yields score zero regardless of the template cost.
pub fn rule_score(savings: &[i64], consequent_dl: u64, n_antecedents: usize) -> Result<Score> {
    if n_antecedents == 0 {
        return Err(Error::NoAntecedents);
    }
    if savings.len() > n_antecedents {
        return Err(Error::MoreMatchesThanAntecedents {
            matched: savings.len(),
            antecedents: n_antecedents,
        });
    }
    let total: i64 = savings.iter().sum::<i64>() - consequent_dl as i64;
    Ok(Ratio::new(savings.len() as i64, n_antecedents as i64) * Ratio::from_integer(total))
}
