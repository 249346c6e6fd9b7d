//! Texts, suffix arrays and BWT results.
//!
//! A [`Text`] is a user payload with a logically appended sentinel. All
//! construction algorithms work on *order codes*: a per-text relabelling of
//! bytes into `u8` values whose natural order is the text's character order
//! (sentinel first or last, payload bytes by unsigned value). Because the
//! sentinel never occurs in the payload, at most 256 distinct symbols are in
//! play and the relabelling is a bijection onto `0..=255`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Where the sentinel sits in the character order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SentinelOrder {
    /// The sentinel precedes every payload byte (the usual convention).
    #[default]
    Smallest,
    /// The sentinel follows every payload byte.
    Largest,
}

impl fmt::Display for SentinelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SentinelOrder::Smallest => f.write_str("smallest"),
            SentinelOrder::Largest => f.write_str("largest"),
        }
    }
}

/// The character order of a text: which byte is the sentinel and where it
/// sorts. Converts between raw bytes and order codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharOrder {
    sentinel: u8,
    order: SentinelOrder,
}

impl CharOrder {
    pub const fn new(sentinel: u8, order: SentinelOrder) -> Self {
        Self { sentinel, order }
    }

    pub fn sentinel(&self) -> u8 {
        self.sentinel
    }

    pub fn order(&self) -> SentinelOrder {
        self.order
    }

    #[inline]
    pub fn sentinel_code(&self) -> u8 {
        match self.order {
            SentinelOrder::Smallest => 0,
            SentinelOrder::Largest => u8::MAX,
        }
    }

    /// Order code of a raw byte.
    #[inline]
    pub fn code(&self, byte: u8) -> u8 {
        let s = self.sentinel;
        match self.order {
            SentinelOrder::Smallest => {
                if byte == s {
                    0
                } else if byte < s {
                    byte + 1
                } else {
                    byte
                }
            }
            SentinelOrder::Largest => {
                if byte == s {
                    u8::MAX
                } else if byte < s {
                    byte
                } else {
                    byte - 1
                }
            }
        }
    }

    /// Raw byte for an order code (inverse of [`CharOrder::code`]).
    #[inline]
    pub fn byte(&self, code: u8) -> u8 {
        let s = self.sentinel;
        match self.order {
            SentinelOrder::Smallest => {
                if code == 0 {
                    s
                } else if code <= s {
                    code - 1
                } else {
                    code
                }
            }
            SentinelOrder::Largest => {
                if code == u8::MAX {
                    s
                } else if code < s {
                    code
                } else {
                    code + 1
                }
            }
        }
    }
}

impl Default for CharOrder {
    fn default() -> Self {
        Self::new(Text::DEFAULT_SENTINEL, SentinelOrder::Smallest)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("sentinel byte 0x{byte:02x} occurs in the payload at offset {offset}")]
    SentinelInPayload { offset: usize, byte: u8 },
}

/// Input string plus its sentinel.
///
/// Positions `0..payload.len()` hold the payload; position `payload.len()`
/// (and any position past it) reads as the sentinel. Cloning is cheap.
#[derive(Clone, PartialEq, Eq)]
pub struct Text {
    payload: Arc<[u8]>,
    codes: Arc<[u8]>,
    order: CharOrder,
}

impl Text {
    pub const DEFAULT_SENTINEL: u8 = 0x00;

    /// Text with the default sentinel (0x00) sorting smallest.
    pub fn new(payload: impl Into<Vec<u8>>) -> Result<Self, TextError> {
        Self::with_order(payload, CharOrder::default())
    }

    pub fn with_sentinel(
        payload: impl Into<Vec<u8>>,
        sentinel: u8,
        order: SentinelOrder,
    ) -> Result<Self, TextError> {
        Self::with_order(payload, CharOrder::new(sentinel, order))
    }

    pub fn with_order(payload: impl Into<Vec<u8>>, order: CharOrder) -> Result<Self, TextError> {
        let payload: Vec<u8> = payload.into();
        if let Some(offset) = payload.iter().position(|&b| b == order.sentinel) {
            return Err(TextError::SentinelInPayload {
                offset,
                byte: order.sentinel,
            });
        }
        let mut codes = Vec::with_capacity(payload.len() + 1);
        codes.extend(payload.iter().map(|&b| order.code(b)));
        codes.push(order.sentinel_code());
        Ok(Self {
            payload: payload.into(),
            codes: codes.into(),
            order,
        })
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Effective length, sentinel included.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn char_order(&self) -> CharOrder {
        self.order
    }

    pub fn sentinel(&self) -> u8 {
        self.order.sentinel
    }

    pub fn sentinel_order(&self) -> SentinelOrder {
        self.order.order
    }

    /// Order codes of the full text, sentinel last.
    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    /// Raw byte at `i`; the sentinel for any `i >= payload.len()`.
    #[inline]
    pub fn byte_at(&self, i: usize) -> u8 {
        self.payload.get(i).copied().unwrap_or(self.order.sentinel)
    }

    /// Order code at `i`; the sentinel code for any `i >= payload.len()`.
    #[inline]
    pub fn code_at(&self, i: usize) -> u8 {
        self.codes
            .get(i)
            .copied()
            .unwrap_or_else(|| self.order.sentinel_code())
    }

    /// Payload followed by the sentinel byte.
    pub fn to_bytes_with_sentinel(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.payload);
        out.push(self.order.sentinel);
        out
    }
}

impl fmt::Debug for Text {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Text")
            .field("payload", &String::from_utf8_lossy(&self.payload))
            .field("sentinel", &self.order.sentinel)
            .field("order", &self.order.order)
            .finish()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermutationError {
    #[error("entry {value} at index {index} is out of range for length {len}")]
    OutOfRange { index: usize, value: usize, len: usize },
    #[error("entry {value} occurs more than once")]
    Duplicate { value: usize },
}

fn check_permutation(values: &[usize]) -> Result<(), PermutationError> {
    let len = values.len();
    let mut seen = vec![false; len];
    for (index, &value) in values.iter().enumerate() {
        if value >= len {
            return Err(PermutationError::OutOfRange { index, value, len });
        }
        if std::mem::replace(&mut seen[value], true) {
            return Err(PermutationError::Duplicate { value });
        }
    }
    Ok(())
}

fn invert(values: &[usize]) -> Vec<usize> {
    let mut out = vec![0; values.len()];
    for (j, &v) in values.iter().enumerate() {
        out[v] = j;
    }
    out
}

/// Suffix start positions in increasing suffix order.
///
/// Construction only checks that the entries form a permutation; whether
/// they are sorted is a property of the algorithm that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuffixArray(Vec<usize>);

impl SuffixArray {
    pub fn new(entries: Vec<usize>) -> Result<Self, PermutationError> {
        check_permutation(&entries)?;
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_inverse(&self) -> InverseSuffixArray {
        InverseSuffixArray(invert(&self.0))
    }
}

/// Rank of every suffix, indexed by suffix position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InverseSuffixArray(Vec<usize>);

impl InverseSuffixArray {
    pub fn new(ranks: Vec<usize>) -> Result<Self, PermutationError> {
        check_permutation(&ranks)?;
        Ok(Self(ranks))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_suffix_array(&self) -> SuffixArray {
        SuffixArray(invert(&self.0))
    }
}

pub fn sa_to_isa(sa: &SuffixArray) -> InverseSuffixArray {
    sa.to_inverse()
}

pub fn isa_to_sa(isa: &InverseSuffixArray) -> SuffixArray {
    isa.to_suffix_array()
}

/// Output of the Burrows-Wheeler transform.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BwtResult {
    /// Last column of the sorted rotation matrix, sentinel included.
    pub transformed: Vec<u8>,
    /// 0-based row holding the original text.
    pub row_index: usize,
}
