//! Prefix doubling on the dataset engine.
//!
//! Every suffix starts ranked by its first character (`Occ`). Each round
//! pairs the rank of suffix `i` with the rank of suffix `i + 2^k`, sorts the
//! pairs, and re-ranks: a suffix's new rank is the number of suffixes whose
//! pair is strictly smaller. After round `k` ranks order suffixes by their
//! first `2^(k+1)` characters.

use thiserror::Error;

use crate::engine::{Engine, EngineError, KeyedDataset};
use crate::text::{CharOrder, InverseSuffixArray, PermutationError, Text};

#[derive(Debug, Error)]
pub enum PdaError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("ranks did not converge to a permutation: {0}")]
    NotPermutation(#[from] PermutationError),
    #[error("rank set is incomplete: expected {expected} positions, got {actual}")]
    Incomplete { expected: usize, actual: usize },
}

/// `(position, rank)` records.
pub type IsaDataset = KeyedDataset<u64, u64>;

/// Marks whether a rank was emitted at its own position or shifted left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Original,
    Shifted,
}

/// Value of a shift record. Ordering puts the original rank first so the
/// pairing reducer sees `[original, shifted]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftedRank {
    pub origin: Origin,
    pub rank: u64,
}

/// Rank of suffix `i` and of suffix `i + 2^k` (0 when that overflows).
/// Compares lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankPair {
    pub first: u64,
    pub second: u64,
}

impl RankPair {
    pub const fn new(first: u64, second: u64) -> Self {
        Self { first, second }
    }
}

/// `Occ(c)`: how many characters of the text sort strictly before `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccTable {
    order: CharOrder,
    /// Indexed by order code; `None` for characters absent from the text.
    by_code: Vec<Option<u64>>,
}

impl OccTable {
    pub fn get(&self, byte: u8) -> Option<u64> {
        self.by_code[self.order.code(byte) as usize]
    }

    /// `(byte, Occ)` for every character present, in character order.
    pub fn entries(&self) -> Vec<(u8, u64)> {
        self.by_code
            .iter()
            .enumerate()
            .filter_map(|(code, occ)| occ.map(|o| (self.order.byte(code as u8), o)))
            .collect()
    }

    pub fn distinct(&self) -> usize {
        self.by_code.iter().flatten().count()
    }

    #[inline]
    fn rank_of_code(&self, code: u8) -> u64 {
        self.by_code[code as usize].expect("code present in text")
    }
}

/// `(position, order code)` for every position of the text.
pub fn text_dataset(engine: &Engine, text: &Text) -> KeyedDataset<u64, u8> {
    let codes = text.codes();
    engine.generate(codes.len(), |i| (i as u64, codes[i]))
}

/// Count characters with a map/reduce, then accumulate the counts locally in
/// character order.
pub fn compute_occ(engine: &Engine, text: &Text) -> OccTable {
    let input = text_dataset(engine, text);
    let ones = engine.map(&input, |_, &c| (c, 1u64));
    let mut counts = engine.reduce_by_key(ones, |a, b| a + b).collect();
    counts.sort_unstable();

    let mut by_code = vec![None; 256];
    let mut acc = 0;
    for (code, count) in counts {
        by_code[code as usize] = Some(acc);
        acc += count;
    }
    OccTable {
        order: text.char_order(),
        by_code,
    }
}

/// Initial ranks: suffix `i` gets `Occ(S[i])`.
pub fn init_isa(engine: &Engine, text: &Text, occ: &OccTable) -> IsaDataset {
    let input = text_dataset(engine, text);
    engine.map(&input, |&i, &c| (i, occ.rank_of_code(c)))
}

fn shift_amount(k: u32) -> i64 {
    1i64.checked_shl(k).filter(|s| *s > 0).unwrap_or(i64::MAX)
}

/// The union of the original ranks `(i, r)` and the ranks shifted left by
/// `2^k`, before negative keys are discarded.
pub fn shift(engine: &Engine, isa: &IsaDataset, k: u32) -> KeyedDataset<i64, ShiftedRank> {
    let amount = shift_amount(k);
    let original = engine.map(isa, |&i, &rank| {
        (
            i as i64,
            ShiftedRank {
                origin: Origin::Original,
                rank,
            },
        )
    });
    let shifted = engine.map(isa, |&i, &rank| {
        (
            i as i64 - amount,
            ShiftedRank {
                origin: Origin::Shifted,
                rank,
            },
        )
    });
    engine.union(original, shifted)
}

/// Drop negative keys and pair each original rank with the shifted rank that
/// landed on the same position.
pub fn pair(
    engine: &Engine,
    shifted: KeyedDataset<i64, ShiftedRank>,
) -> Result<KeyedDataset<u64, RankPair>, PdaError> {
    let kept = engine.filter(shifted, |&i, _| i >= 0);
    let kept = engine.map(&kept, |&i, v| (i as u64, *v));
    let pairs = engine.reduce_groups(kept, |_, values| match values {
        [ShiftedRank {
            origin: Origin::Original,
            rank,
        }] => Ok(RankPair::new(*rank, 0)),
        [ShiftedRank {
            origin: Origin::Original,
            rank: first,
        }, ShiftedRank {
            origin: Origin::Shifted,
            rank: second,
        }] => Ok(RankPair::new(*first, *second)),
        other => Err(format!(
            "expected one original rank and at most one shifted rank, got {other:?}"
        )),
    })?;
    Ok(pairs)
}

pub fn shift_and_pair(
    engine: &Engine,
    isa: &IsaDataset,
    k: u32,
) -> Result<KeyedDataset<u64, RankPair>, PdaError> {
    pair(engine, shift(engine, isa, k))
}

struct LocalRanks {
    records: Vec<(u64, u64)>,
    leading_run: usize,
    first: Option<RankPair>,
    last: Option<(RankPair, u64)>,
    groups: usize,
}

/// Assign new ranks from sorted pairs. Returns the new ranks and the number
/// of distinct ranks.
pub fn rerank_counted(
    engine: &Engine,
    pairs: KeyedDataset<u64, RankPair>,
) -> Result<(IsaDataset, usize), PdaError> {
    let by_pair = engine.map(&pairs, |&i, &p| (p, i));
    drop(pairs);
    let partitions = engine.config().num_partitions;
    let sorted = engine.range_partition_and_sort(by_pair, partitions)?;
    Ok(rank_sorted(engine, sorted))
}

/// Rank records whose partitions, concatenated, are sorted by pair. Each
/// partition is ranked locally from its offset; a run of equal pairs that
/// continues from the previous partition then takes that run's rank.
pub fn rank_sorted(engine: &Engine, sorted: KeyedDataset<RankPair, u64>) -> (IsaDataset, usize) {
    let mut offsets = Vec::with_capacity(sorted.num_partitions());
    let mut acc = 0u64;
    for p in sorted.partitions() {
        offsets.push(acc);
        acc += p.len() as u64;
    }

    let mut locals = engine.run_partitions(&sorted, |idx, part| {
        let offset = offsets[idx];
        let mut records = Vec::with_capacity(part.len());
        let mut groups = 0;
        let mut prev: Option<(RankPair, u64)> = None;
        for (j, &(pair, i)) in part.iter().enumerate() {
            let rank = match prev {
                Some((p, r)) if p == pair => r,
                _ => {
                    groups += 1;
                    offset + j as u64
                }
            };
            records.push((i, rank));
            prev = Some((pair, rank));
        }
        let first = part.first().map(|r| r.0);
        let leading_run = first.map_or(0, |f| part.iter().take_while(|r| r.0 == f).count());
        LocalRanks {
            records,
            leading_run,
            first,
            last: prev,
            groups,
        }
    });
    drop(sorted);

    let mut carry: Option<(RankPair, u64)> = None;
    let mut distinct = 0;
    for local in &mut locals {
        let Some(first) = local.first else { continue };
        distinct += local.groups;
        if let Some((pair, rank)) = carry {
            if pair == first {
                distinct -= 1;
                for rec in &mut local.records[..local.leading_run] {
                    rec.1 = rank;
                }
                if local.leading_run == local.records.len() {
                    local.last = Some((pair, rank));
                }
            }
        }
        carry = local.last;
    }

    let isa = KeyedDataset::from_partitions(locals.into_iter().map(|l| l.records).collect());
    (isa, distinct)
}

/// New ranks: sort pairs, then each pair takes its sorted position unless it
/// equals its predecessor, in which case it copies the predecessor's rank.
pub fn rerank(engine: &Engine, pairs: KeyedDataset<u64, RankPair>) -> Result<IsaDataset, PdaError> {
    rerank_counted(engine, pairs).map(|(isa, _)| isa)
}

/// `⌈log₂ n⌉`, with 0 for `n ≤ 1`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Upper bound on the number of re-rank rounds for a text of length `n`.
pub fn max_rounds(n: usize) -> usize {
    ceil_log2(n) as usize + 1
}

#[derive(Debug, Clone)]
pub struct PdaRun {
    pub isa: InverseSuffixArray,
    /// Re-rank rounds executed.
    pub rounds: usize,
    /// Ranks by position after initialisation and after every round; empty
    /// unless tracing was requested.
    pub trace: Vec<Vec<u64>>,
}

fn ranks_by_position(isa: &IsaDataset, n: usize) -> Result<Vec<u64>, PdaError> {
    if isa.len() != n {
        return Err(PdaError::Incomplete {
            expected: n,
            actual: isa.len(),
        });
    }
    let mut ranks = vec![0u64; n];
    for &(i, r) in isa.iter() {
        ranks[i as usize] = r;
    }
    Ok(ranks)
}

pub fn compute_isa(engine: &Engine, text: &Text) -> Result<InverseSuffixArray, PdaError> {
    compute_isa_traced(engine, text, false).map(|run| run.isa)
}

/// Full prefix-doubling loop. Stops as soon as all ranks are distinct, and
/// never runs more than [`max_rounds`] rounds.
pub fn compute_isa_traced(engine: &Engine, text: &Text, trace: bool) -> Result<PdaRun, PdaError> {
    let n = text.len();
    let occ = compute_occ(engine, text);
    let mut isa = init_isa(engine, text, &occ);
    let mut distinct = occ.distinct();
    let mut history = Vec::new();
    if trace {
        history.push(ranks_by_position(&isa, n)?);
    }

    let mut rounds = 0;
    for k in 0..=ceil_log2(n) {
        if distinct == n {
            break;
        }
        let pairs = shift_and_pair(engine, &isa, k)?;
        drop(isa);
        let (next, count) = rerank_counted(engine, pairs)?;
        isa = next;
        distinct = count;
        rounds += 1;
        if trace {
            history.push(ranks_by_position(&isa, n)?);
        }
    }

    let ranks = ranks_by_position(&isa, n)?;
    drop(isa);
    let isa = InverseSuffixArray::new(ranks.into_iter().map(|r| r as usize).collect())?;
    Ok(PdaRun {
        isa,
        rounds,
        trace: history,
    })
}
