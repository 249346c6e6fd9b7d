//! Sorting-based suffix array construction.
//!
//! Every suffix is keyed by its first `k` characters, the keys are range
//! partitioned so that partitions hold disjoint, ordered key ranges, and each
//! partition computes its *partial* suffix array on its own. Concatenating
//! the partial arrays in partition order gives the suffix array.
//!
//! A partition with positions `p` is sorted by the fixed-length blocks
//! `S[p_i .. p_i + l_max]`, where `l_max` is the largest gap between
//! consecutive positions (counting the gap to the end of the text). Blocks
//! are sorted either with an LSD radix sort or a stable comparison sort.
//! Positions whose blocks are identical are ordered by comparing the full
//! suffixes.

use smallvec::SmallVec;
use thiserror::Error;

use crate::engine::{Engine, EngineError, KeyedDataset};
use crate::text::{CharOrder, PermutationError, SuffixArray, Text};

pub const DEFAULT_KMER: usize = 8;

#[derive(Debug, Error)]
pub enum SmrError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("block {index} has length {found}, expected {expected}")]
    UnequalBlockLengths {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("partial suffix arrays do not form a permutation: {0}")]
    NotPermutation(#[from] PermutationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockSorter {
    /// Byte-wise least-significant-digit radix sort.
    RadixLsd,
    /// Stable merge-based comparison sort.
    StableComparison,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmrConfig {
    pub k: usize,
    pub partitions: usize,
    pub sorter: BlockSorter,
}

impl SmrConfig {
    pub fn new(k: usize, partitions: usize, sorter: BlockSorter) -> Self {
        Self {
            k,
            partitions,
            sorter,
        }
    }

    pub fn validate(&self) -> Result<(), SmrError> {
        if self.k == 0 {
            return Err(SmrError::Config("k-mer length must be at least 1".into()));
        }
        if self.partitions == 0 {
            return Err(SmrError::Config("partition count must be at least 1".into()));
        }
        Ok(())
    }
}

/// The first `k` order codes of a suffix, sentinel-padded past the end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KmerKey(SmallVec<[u8; 16]>);

impl KmerKey {
    pub fn of(text: &Text, start: usize, k: usize) -> Self {
        Self((start..start + k).map(|i| text.code_at(i)).collect())
    }

    pub fn codes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_bytes(&self, order: CharOrder) -> Vec<u8> {
        self.0.iter().map(|&c| order.byte(c)).collect()
    }
}

/// One `(k-mer, position)` tuple per suffix.
pub fn kmer_map(engine: &Engine, text: &Text, k: usize) -> KeyedDataset<KmerKey, u64> {
    engine.generate(text.len(), |i| (KmerKey::of(text, i, k), i as u64))
}

/// Range-partition the tuples into `r` ordered partitions, each sorted by
/// k-mer.
pub fn partition_suffixes(
    engine: &Engine,
    tuples: KeyedDataset<KmerKey, u64>,
    r: usize,
) -> Result<KeyedDataset<KmerKey, u64>, SmrError> {
    Ok(engine.range_partition_and_sort(tuples, r)?)
}

/// Positions of one partition and the block length used to sort them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionBlock {
    positions: Vec<usize>,
    l_max: usize,
}

impl PartitionBlock {
    /// `text_len` is the text length including the sentinel.
    pub fn new(mut positions: Vec<usize>, text_len: usize) -> Self {
        positions.sort_unstable();
        let gaps = positions.windows(2).map(|w| w[1] - w[0]);
        let tail = positions.last().map(|&p| text_len - p);
        let l_max = gaps.chain(tail).max().unwrap_or(0);
        Self { positions, l_max }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Raw bytes of the `idx`-th block, sentinel-padded.
    pub fn block(&self, text: &Text, idx: usize) -> Vec<u8> {
        let p = self.positions[idx];
        (p..p + self.l_max).map(|i| text.byte_at(i)).collect()
    }
}

/// Stable LSD radix sort of `count` items of `width` bytes. Returns the
/// sorted item indices.
fn lsd_order(count: usize, width: usize, byte: impl Fn(usize, usize) -> u8) -> Vec<usize> {
    let mut order: Vec<usize> = (0..count).collect();
    let mut next = vec![0usize; count];
    let mut digits = vec![0u8; count];
    for d in (0..width).rev() {
        let mut buckets = [0usize; 256];
        for (slot, &item) in digits.iter_mut().zip(&order) {
            *slot = byte(item, d);
            buckets[*slot as usize] += 1;
        }
        let mut acc = 0;
        for b in buckets.iter_mut() {
            let c = *b;
            *b = acc;
            acc += c;
        }
        for (&digit, &item) in digits.iter().zip(&order) {
            next[buckets[digit as usize]] = item;
            buckets[digit as usize] += 1;
        }
        std::mem::swap(&mut order, &mut next);
    }
    order
}

/// Stable LSD radix sort of equal-length blocks, carrying their positions.
pub fn radix_sort_blocks(blocks: Vec<(Vec<u8>, usize)>) -> Result<Vec<(Vec<u8>, usize)>, SmrError> {
    let Some(width) = blocks.first().map(|b| b.0.len()) else {
        return Ok(blocks);
    };
    if let Some((index, b)) = blocks.iter().enumerate().find(|(_, b)| b.0.len() != width) {
        return Err(SmrError::UnequalBlockLengths {
            index,
            expected: width,
            found: b.0.len(),
        });
    }
    let order = lsd_order(blocks.len(), width, |i, d| blocks[i].0[d]);
    let mut slots: Vec<Option<(Vec<u8>, usize)>> = blocks.into_iter().map(Some).collect();
    Ok(order
        .into_iter()
        .map(|i| slots[i].take().expect("each index used once"))
        .collect())
}

/// Suffix order of the positions in `block`.
pub fn partial_sa(block: &PartitionBlock, text: &Text, sorter: BlockSorter) -> Vec<usize> {
    let positions = block.positions();
    if positions.len() <= 1 {
        return positions.to_vec();
    }
    let codes = text.codes();
    let n = codes.len();
    let l_max = block.l_max();
    // Truncating at the text end orders blocks exactly like sentinel padding,
    // since the sentinel occurs once.
    let window = |p: usize| &codes[p..(p + l_max).min(n)];

    let mut sorted = match sorter {
        BlockSorter::RadixLsd => lsd_order(positions.len(), l_max, |i, d| text.code_at(positions[i] + d))
            .into_iter()
            .map(|i| positions[i])
            .collect::<Vec<_>>(),
        BlockSorter::StableComparison => {
            let mut v = positions.to_vec();
            v.sort_by(|&a, &b| window(a).cmp(window(b)));
            v
        }
    };

    let mut start = 0;
    while start < sorted.len() {
        let head = window(sorted[start]);
        let end = start
            + sorted[start..]
                .iter()
                .take_while(|&&p| window(p) == head)
                .count();
        if end - start > 1 {
            sorted[start..end].sort_by(|&a, &b| codes[a..].cmp(&codes[b..]));
        }
        start = end;
    }
    sorted
}

#[derive(Debug, Clone)]
pub struct SmrRun {
    pub sa: SuffixArray,
    pub partition_sizes: Vec<usize>,
    pub block_lengths: Vec<usize>,
}

pub fn smr_sa(engine: &Engine, text: &Text, config: &SmrConfig) -> Result<SuffixArray, SmrError> {
    smr_sa_with_stats(engine, text, config).map(|run| run.sa)
}

pub fn smr_sa_with_stats(
    engine: &Engine,
    text: &Text,
    config: &SmrConfig,
) -> Result<SmrRun, SmrError> {
    config.validate()?;
    let tuples = kmer_map(engine, text, config.k);
    let partitioned = partition_suffixes(engine, tuples, config.partitions)?;
    let n = text.len();
    let partials = engine.run_partitions(&partitioned, |_, part| {
        let positions = part.iter().map(|(_, i)| *i as usize).collect();
        let block = PartitionBlock::new(positions, n);
        (partial_sa(&block, text, config.sorter), block.l_max())
    });
    drop(partitioned);

    let mut entries = Vec::with_capacity(n);
    let mut partition_sizes = Vec::with_capacity(partials.len());
    let mut block_lengths = Vec::with_capacity(partials.len());
    for (sa_p, l_max) in partials {
        partition_sizes.push(sa_p.len());
        block_lengths.push(l_max);
        entries.extend(sa_p);
    }
    Ok(SmrRun {
        sa: SuffixArray::new(entries)?,
        partition_sizes,
        block_lengths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;
    use crate::oracle::naive_sa;
    use crate::text::SentinelOrder;
    use proptest::prelude::*;

    fn engine() -> Engine {
        Engine::new(EngineConfig::new(2, 4)).unwrap()
    }

    fn cattattagga() -> Text {
        Text::with_sentinel("CATTATTAGGA", b'$', SentinelOrder::Smallest).unwrap()
    }

    fn show(ds: &[(KmerKey, u64)], order: CharOrder) -> Vec<(String, u64)> {
        ds.iter()
            .map(|(k, i)| (String::from_utf8(k.to_bytes(order)).unwrap(), *i))
            .collect()
    }

    #[test]
    fn kmers_of_cattattagga() {
        let t = cattattagga();
        let tuples = kmer_map(&engine(), &t, 3).collect();
        let expected = [
            "CAT", "ATT", "TTA", "TAT", "ATT", "TTA", "TAG", "AGG", "GGA", "GA$", "A$$", "$$$",
        ];
        let got = show(&tuples, t.char_order());
        let want: Vec<(String, u64)> = expected
            .iter()
            .enumerate()
            .map(|(i, s)| (s.to_string(), i as u64))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn kmers_k1_and_long_k() {
        let e = engine();
        let t = Text::with_sentinel("BANANA", b'$', SentinelOrder::Smallest).unwrap();
        let mut ones: Vec<u8> = kmer_map(&e, &t, 1)
            .collect()
            .into_iter()
            .map(|(k, _)| k.to_bytes(t.char_order())[0])
            .collect();
        ones.sort();
        assert_eq!(ones, b"$AAABNN");

        let long = kmer_map(&e, &t, 8).collect();
        let mut keys: Vec<&KmerKey> = long.iter().map(|r| &r.0).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 7);
        assert_eq!(long[4].0.to_bytes(t.char_order()), b"NA$$$$$$");
    }

    #[test]
    fn partitions_single_and_constant() {
        let e = engine();
        let t = cattattagga();
        let one = partition_suffixes(&e, kmer_map(&e, &t, 3), 1).unwrap();
        assert_eq!(one.num_partitions(), 1);
        let keys: Vec<_> = one.partitions()[0].iter().map(|r| r.0.clone()).collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));

        let t = Text::with_sentinel("AAAA", b'$', SentinelOrder::Largest).unwrap();
        let tuples = e.filter(kmer_map(&e, &t, 2), |k, _| k.codes()[1] != u8::MAX);
        let parts = partition_suffixes(&e, tuples, 4).unwrap();
        assert_eq!(parts.partitions().iter().filter(|p| !p.is_empty()).count(), 1);
    }

    #[test]
    fn block_of_cattattagga_partition() {
        let t = cattattagga();
        let block = PartitionBlock::new(vec![5, 2, 3], t.len());
        assert_eq!(block.positions(), &[2, 3, 5]);
        assert_eq!(block.l_max(), 7);
        let blocks: Vec<Vec<u8>> = (0..3).map(|i| block.block(&t, i)).collect();
        assert_eq!(blocks, vec![b"TTATTAG".to_vec(), b"TATTAGG".to_vec(), b"TTAGGA$".to_vec()]);
        for sorter in [BlockSorter::RadixLsd, BlockSorter::StableComparison] {
            assert_eq!(partial_sa(&block, &t, sorter), vec![3, 5, 2]);
        }
    }

    #[test]
    fn singleton_partition() {
        let t = cattattagga();
        let block = PartitionBlock::new(vec![4], t.len());
        assert_eq!(partial_sa(&block, &t, BlockSorter::RadixLsd), vec![4]);
        let empty = PartitionBlock::new(vec![], t.len());
        assert!(partial_sa(&empty, &t, BlockSorter::StableComparison).is_empty());
    }

    #[test]
    fn short_periodic_partition() {
        // l_max covers the sentinel here, so the two blocks differ.
        let t = Text::with_sentinel("ABABAB", b'$', SentinelOrder::Smallest).unwrap();
        let block = PartitionBlock::new(vec![0, 2], t.len());
        assert_eq!(block.l_max(), 5);
        assert_eq!(block.block(&t, 0), b"ABABA");
        assert_eq!(block.block(&t, 1), b"ABAB$");
        for sorter in [BlockSorter::RadixLsd, BlockSorter::StableComparison] {
            assert_eq!(partial_sa(&block, &t, sorter), vec![2, 0]);
        }
    }

    #[test]
    fn identical_blocks_fall_back_to_full_suffixes() {
        let t = Text::with_sentinel("ABABABABAB", b'$', SentinelOrder::Smallest).unwrap();
        let block = PartitionBlock::new(vec![0, 2, 8], t.len());
        assert_eq!(block.l_max(), 6);
        assert_eq!(block.block(&t, 0), b"ABABAB");
        assert_eq!(block.block(&t, 1), b"ABABAB");
        let sa = naive_sa(&t);
        let expected: Vec<usize> = sa.as_slice().iter().copied().filter(|p| [0, 2, 8].contains(p)).collect();
        for sorter in [BlockSorter::RadixLsd, BlockSorter::StableComparison] {
            assert_eq!(partial_sa(&block, &t, sorter), expected);
        }
    }

    #[test]
    fn radix_sort_examples() {
        let blocks = vec![
            (b"TTATTAG".to_vec(), 2),
            (b"TATTAGG".to_vec(), 3),
            (b"TTAGGA$".to_vec(), 5),
        ];
        let sorted = radix_sort_blocks(blocks).unwrap();
        let pos: Vec<usize> = sorted.iter().map(|b| b.1).collect();
        assert_eq!(pos, vec![3, 5, 2]);

        let already = vec![(b"AA".to_vec(), 0), (b"AB".to_vec(), 1), (b"BA".to_vec(), 2)];
        assert_eq!(radix_sort_blocks(already.clone()).unwrap(), already);

        let dups = vec![(b"BB".to_vec(), 0), (b"AA".to_vec(), 1), (b"BB".to_vec(), 2), (b"AA".to_vec(), 3)];
        let pos: Vec<usize> = radix_sort_blocks(dups).unwrap().iter().map(|b| b.1).collect();
        assert_eq!(pos, vec![1, 3, 0, 2]);

        let err = radix_sort_blocks(vec![(b"AB".to_vec(), 0), (b"A".to_vec(), 1)]).unwrap_err();
        assert!(matches!(err, SmrError::UnequalBlockLengths { index: 1, expected: 2, found: 1 }));
    }

    #[test]
    fn smr_small_examples() {
        let e = engine();
        let t = Text::with_sentinel("BANANA", b'$', SentinelOrder::Smallest).unwrap();
        for sorter in [BlockSorter::RadixLsd, BlockSorter::StableComparison] {
            let sa = smr_sa(&e, &t, &SmrConfig::new(2, 2, sorter)).unwrap();
            assert_eq!(sa.as_slice(), &[6, 5, 3, 1, 0, 4, 2]);
            let t = cattattagga();
            let sa = smr_sa(&e, &t, &SmrConfig::new(3, 4, sorter)).unwrap();
            assert_eq!(sa, naive_sa(&t));
        }
        assert!(smr_sa(&e, &t, &SmrConfig::new(0, 2, BlockSorter::RadixLsd)).is_err());
        assert!(smr_sa(&e, &t, &SmrConfig::new(2, 0, BlockSorter::RadixLsd)).is_err());
    }

    proptest! {
        #[test]
        fn sorters_agree(blocks in prop::collection::vec(prop::collection::vec(0u8..4, 5), 0..40)) {
            let tagged: Vec<(Vec<u8>, usize)> = blocks.into_iter().enumerate().map(|(i, b)| (b, i)).collect();
            let mut stable = tagged.clone();
            stable.sort_by(|a, b| a.0.cmp(&b.0));
            prop_assert_eq!(radix_sort_blocks(tagged).unwrap(), stable);
        }

        #[test]
        fn property_one_holds_on_full_suffixes(
            payload in prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), 0..200),
            k in 1usize..6,
            r in 1usize..6,
        ) {
            let e = engine();
            let t = Text::with_sentinel(payload, b'$', SentinelOrder::Smallest).unwrap();
            let parts = partition_suffixes(&e, kmer_map(&e, &t, k), r).unwrap();
            let non_empty: Vec<_> = parts.partitions().iter().filter(|p| !p.is_empty()).collect();
            for w in non_empty.windows(2) {
                prop_assert!(w[0].last().unwrap().0 < w[1].first().unwrap().0);
                let max_prev = w[0].iter().map(|r| r.1 as usize).max_by(|&a, &b| t.codes()[a..].cmp(&t.codes()[b..])).unwrap();
                let min_next = w[1].iter().map(|r| r.1 as usize).min_by(|&a, &b| t.codes()[a..].cmp(&t.codes()[b..])).unwrap();
                prop_assert!(t.codes()[max_prev..] < t.codes()[min_next..]);
            }
        }
    }
}
