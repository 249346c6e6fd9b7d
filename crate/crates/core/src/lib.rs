//! Burrows-Wheeler transform and suffix array construction on an embedded
//! partitioned-dataset engine.
//!
//! Two suffix-array builders run on the [`engine`]:
//!
//! * [`pda`] ranks suffixes by prefix doubling (shift, pair, re-rank).
//! * [`smr`] range-partitions suffixes by their leading k-mer and sorts each
//!   partition independently.
//!
//! [`bwt`] turns a suffix array into a BWT with a join, and [`oracle`] holds
//! the brute-force constructions everything is checked against.

pub mod bwt;
pub mod cli;
pub mod engine;
pub mod oracle;
pub mod pda;
pub mod smr;
pub mod text;

pub use bwt::{bwt_pipeline, sa_to_bwt, suffix_array, Algorithm, BwtError, Construction};
pub use engine::{Engine, EngineConfig, EngineError, KeyedDataset, Partitioner};
pub use oracle::{inverse_bwt, naive_bwt, naive_sa, DecodeError};
pub use text::{
    isa_to_sa, sa_to_isa, BwtResult, CharOrder, InverseSuffixArray, PermutationError,
    SentinelOrder, SuffixArray, Text, TextError,
};
