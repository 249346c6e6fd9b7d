//! Brute-force reference constructions.
//!
//! These are deliberately simple and quadratic in the worst case. Every
//! distributed construction in this crate is tested against them.

use std::cmp::Ordering;

use thiserror::Error;

use crate::text::{BwtResult, CharOrder, SuffixArray, Text};

/// Compare the suffixes starting at `a` and `b` under the text's order.
pub fn suffix_cmp(text: &Text, a: usize, b: usize) -> Ordering {
    let codes = text.codes();
    codes[a..].cmp(&codes[b..])
}

/// Last column of the sorted rotation matrix, and the row of the original.
pub fn naive_bwt(text: &Text) -> BwtResult {
    let codes = text.codes();
    let n = codes.len();
    let rotation = |i: usize| codes[i..].iter().chain(&codes[..i]);
    let mut rows: Vec<usize> = (0..n).collect();
    rows.sort_by(|&a, &b| rotation(a).cmp(rotation(b)));

    let transformed = rows
        .iter()
        .map(|&r| text.byte_at((r + n - 1) % n))
        .collect();
    let row_index = rows.iter().position(|&r| r == 0).expect("rotation 0 is a row");
    BwtResult {
        transformed,
        row_index,
    }
}

/// Suffix array by comparison-sorting all suffixes.
pub fn naive_sa(text: &Text) -> SuffixArray {
    let codes = text.codes();
    let mut sa: Vec<usize> = (0..codes.len()).collect();
    sa.sort_by(|&a, &b| codes[a..].cmp(&codes[b..]));
    SuffixArray::new(sa).expect("sorting 0..n yields a permutation")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("row index {row_index} out of range for length {len}")]
    RowIndexOutOfRange { row_index: usize, len: usize },
    #[error("expected exactly one sentinel in the transformed text, found {found}")]
    SentinelCount { found: usize },
    #[error("reconstruction revisited row {row} after {steps} steps")]
    Revisited { row: usize, steps: usize },
}

/// Invert a BWT by LF-mapping. Returns the text with its sentinel.
pub fn inverse_bwt(result: &BwtResult, order: CharOrder) -> Result<Vec<u8>, DecodeError> {
    let last = &result.transformed;
    let n = last.len();
    if result.row_index >= n {
        return Err(DecodeError::RowIndexOutOfRange {
            row_index: result.row_index,
            len: n,
        });
    }
    let sentinels = last.iter().filter(|&&b| b == order.sentinel()).count();
    if sentinels != 1 {
        return Err(DecodeError::SentinelCount { found: sentinels });
    }

    let codes: Vec<u8> = last.iter().map(|&b| order.code(b)).collect();
    let mut counts = [0usize; 256];
    for &c in &codes {
        counts[c as usize] += 1;
    }
    // first[c] = number of characters strictly smaller than c
    let mut first = [0usize; 256];
    let mut acc = 0;
    for c in 0..256 {
        first[c] = acc;
        acc += counts[c];
    }

    let mut seen = [0usize; 256];
    let lf: Vec<usize> = codes
        .iter()
        .map(|&c| {
            let c = c as usize;
            let row = first[c] + seen[c];
            seen[c] += 1;
            row
        })
        .collect();

    let mut out = vec![0u8; n];
    let mut visited = vec![false; n];
    let mut row = result.row_index;
    for (steps, slot) in out.iter_mut().rev().enumerate() {
        if std::mem::replace(&mut visited[row], true) {
            return Err(DecodeError::Revisited { row, steps });
        }
        *slot = last[row];
        row = lf[row];
    }
    Ok(out)
}
