//! BWT from a suffix array, and the end-to-end construction pipeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Engine, EngineError};
use crate::oracle::naive_sa;
use crate::pda::{self, PdaError};
use crate::smr::{self, BlockSorter, SmrConfig, SmrError};
use crate::text::{BwtResult, PermutationError, SuffixArray, Text};

#[derive(Debug, Error)]
pub enum BwtError {
    #[error("suffix array has {actual} entries, text has length {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("suffix array is not a permutation: {0}")]
    NotPermutation(#[from] PermutationError),
    #[error("suffix array has no entry for position 0")]
    MissingRowZero,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Pda(#[from] PdaError),
    #[error(transparent)]
    Smr(#[from] SmrError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "pda")]
    Pda,
    #[serde(rename = "smr-r")]
    SmrRadix,
    #[serde(rename = "smr-t")]
    SmrTimsort,
    #[serde(rename = "naive")]
    Naive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Pda,
        Algorithm::SmrRadix,
        Algorithm::SmrTimsort,
        Algorithm::Naive,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Pda => "pda",
            Algorithm::SmrRadix => "smr-r",
            Algorithm::SmrTimsort => "smr-t",
            Algorithm::Naive => "naive",
        }
    }

    pub fn is_smr(&self) -> bool {
        matches!(self, Algorithm::SmrRadix | Algorithm::SmrTimsort)
    }

    fn sorter(&self) -> Option<BlockSorter> {
        match self {
            Algorithm::SmrRadix => Some(BlockSorter::RadixLsd),
            Algorithm::SmrTimsort => Some(BlockSorter::StableComparison),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected pda, smr-r, smr-t or naive)"))
    }
}

/// A suffix array together with what it took to build it.
#[derive(Debug, Clone)]
pub struct Construction {
    pub sa: SuffixArray,
    pub algorithm: Algorithm,
    /// Re-rank rounds, for prefix doubling.
    pub rounds: Option<usize>,
    /// Partition count used by the sorting-based builder.
    pub partitions: Option<usize>,
}

/// Build the suffix array with the chosen algorithm. `k` and `partitions`
/// only apply to the sorting-based variants.
pub fn suffix_array(
    engine: &Engine,
    text: &Text,
    algorithm: Algorithm,
    k: usize,
    partitions: usize,
) -> Result<Construction, BwtError> {
    let mut out = Construction {
        sa: SuffixArray::new(Vec::new())?,
        algorithm,
        rounds: None,
        partitions: None,
    };
    match algorithm {
        Algorithm::Pda => {
            let run = pda::compute_isa_traced(engine, text, false)?;
            out.sa = run.isa.to_suffix_array();
            out.rounds = Some(run.rounds);
        }
        Algorithm::SmrRadix | Algorithm::SmrTimsort => {
            let sorter = algorithm.sorter().expect("smr variant");
            let config = SmrConfig::new(k, partitions, sorter);
            out.sa = smr::smr_sa(engine, text, &config)?;
            out.partitions = Some(partitions);
        }
        Algorithm::Naive => out.sa = naive_sa(text),
    }
    Ok(out)
}

/// BWT from suffix array entries: row `j` ends with the character preceding
/// suffix `sa[j]` cyclically. Built as a join of `(predecessor, row)` with
/// `(position, character)`, then sorted by row.
pub fn sa_to_bwt(engine: &Engine, sa: &[usize], text: &Text) -> Result<BwtResult, BwtError> {
    let n = text.len();
    if sa.len() != n {
        return Err(BwtError::LengthMismatch {
            expected: n,
            actual: sa.len(),
        });
    }
    SuffixArray::new(sa.to_vec())?;
    let row_index = sa.iter().position(|&p| p == 0).ok_or(BwtError::MissingRowZero)?;

    let rows = engine.generate(n, |j| (((sa[j] + n - 1) % n) as u64, j as u64));
    let chars = engine.generate(n, |i| (i as u64, text.byte_at(i)));
    let joined = engine.join(rows, chars)?;
    let by_row = engine.map(&joined, |_, &(row, c)| (row, c));
    drop(joined);
    let sorted = engine.range_partition_and_sort(by_row, engine.config().num_partitions)?;
    let transformed = sorted.collect().into_iter().map(|(_, c)| c).collect();
    Ok(BwtResult {
        transformed,
        row_index,
    })
}

/// Suffix array construction followed by [`sa_to_bwt`].
pub fn bwt_pipeline(
    engine: &Engine,
    text: &Text,
    algorithm: Algorithm,
    k: usize,
    partitions: usize,
) -> Result<BwtResult, BwtError> {
    let built = suffix_array(engine, text, algorithm, k, partitions)?;
    sa_to_bwt(engine, built.sa.as_slice(), text)
}
