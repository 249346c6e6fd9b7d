//! Embedded partitioned-dataset engine.
//!
//! A [`KeyedDataset`] is an ordered list of partitions of `(key, value)`
//! records. The [`Engine`] runs per-partition work on a bounded worker pool
//! and moves records between partitions only at shuffle boundaries
//! (reduce-by-key, range partitioning, join).
//!
//! Results never depend on the number of workers: partition counts come from
//! [`EngineConfig::num_partitions`], shuffles concatenate buckets in input
//! partition order, and reducers see their values in sorted order.

use std::collections::hash_map::DefaultHasher;
use std::fmt::Debug;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("partition count must be positive")]
    ZeroPartitions,
    #[error("reducer failed for key {key}: {message}")]
    Reducer { key: String, message: String },
    #[error("duplicate key {key} in join input")]
    DuplicateKey { key: String },
    #[error("failed to build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Size of the worker pool.
    pub num_workers: usize,
    /// Partition count used by shuffles.
    pub num_partitions: usize,
    /// Number of keys sampled when computing range boundaries.
    pub sample_size: usize,
    pub rng_seed: u64,
}

impl EngineConfig {
    pub fn new(num_workers: usize, num_partitions: usize) -> Self {
        Self {
            num_workers,
            num_partitions,
            sample_size: 100 * num_partitions.max(1),
            rng_seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_sample_size(mut self, sample_size: usize) -> Self {
        self.sample_size = sample_size;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.num_workers == 0 {
            return Err(EngineError::Config("num_workers must be at least 1".into()));
        }
        if self.num_partitions == 0 {
            return Err(EngineError::Config(
                "num_partitions must be at least 1".into(),
            ));
        }
        if self.sample_size < self.num_partitions {
            return Err(EngineError::Config(format!(
                "sample_size {} is smaller than num_partitions {}",
                self.sample_size, self.num_partitions
            )));
        }
        Ok(())
    }
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self::new(1, 8)
    }
}

/// How the records of a dataset are laid out across partitions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Partitioner<K> {
    #[default]
    None,
    /// Partition `i` holds keys `k` with `bounds[i-1] <= k < bounds[i]`.
    Range(Vec<K>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyedDataset<K, V> {
    partitions: Vec<Vec<(K, V)>>,
    partitioner: Partitioner<K>,
}

impl<K, V> KeyedDataset<K, V> {
    pub fn from_partitions(partitions: Vec<Vec<(K, V)>>) -> Self {
        Self {
            partitions,
            partitioner: Partitioner::None,
        }
    }

    pub fn empty() -> Self {
        Self::from_partitions(Vec::new())
    }

    pub fn partitions(&self) -> &[Vec<(K, V)>] {
        &self.partitions
    }

    pub fn into_partitions(self) -> Vec<Vec<(K, V)>> {
        self.partitions
    }

    pub fn partitioner(&self) -> &Partitioner<K> {
        &self.partitioner
    }

    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    pub fn len(&self) -> usize {
        self.partitions.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.iter().all(Vec::is_empty)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(K, V)> {
        self.partitions.iter().flatten()
    }

    /// All records, partitions concatenated in order.
    pub fn collect(self) -> Vec<(K, V)> {
        let mut out = Vec::with_capacity(self.len());
        for p in self.partitions {
            out.extend(p);
        }
        out
    }
}

fn hash_route<K: Hash>(key: &K, n: usize) -> usize {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    (h.finish() % n as u64) as usize
}

pub struct Engine {
    config: EngineConfig,
    pool: rayon::ThreadPool,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self, EngineError> {
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.num_workers)
            .thread_name(|i| format!("dbwt-worker-{i}"))
            .build()
            .map_err(|e| EngineError::Pool(e.to_string()))?;
        Ok(Self { config, pool })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Split records into `num_partitions` contiguous chunks.
    pub fn parallelize<K, V>(&self, records: Vec<(K, V)>) -> KeyedDataset<K, V> {
        let parts = self.config.num_partitions;
        let chunk = records.len().div_ceil(parts).max(1);
        let mut partitions = Vec::with_capacity(parts);
        let mut rest = records;
        for _ in 0..parts {
            let tail = rest.split_off(chunk.min(rest.len()));
            partitions.push(rest);
            rest = tail;
        }
        KeyedDataset::from_partitions(partitions)
    }

    /// Build a dataset with `num_partitions` contiguous index ranges over
    /// `0..len`, generating each record from its index.
    pub fn generate<K, V, F>(&self, len: usize, f: F) -> KeyedDataset<K, V>
    where
        K: Send,
        V: Send,
        F: Fn(usize) -> (K, V) + Sync,
    {
        let parts = self.config.num_partitions;
        let chunk = len.div_ceil(parts).max(1);
        let partitions = self.pool.install(|| {
            (0..parts)
                .into_par_iter()
                .map(|p| {
                    let start = (p * chunk).min(len);
                    let end = ((p + 1) * chunk).min(len);
                    (start..end).map(&f).collect()
                })
                .collect()
        });
        KeyedDataset::from_partitions(partitions)
    }

    /// Run `f` once per partition and gather the results in partition order.
    pub fn run_partitions<K, V, T, F>(&self, ds: &KeyedDataset<K, V>, f: F) -> Vec<T>
    where
        K: Sync,
        V: Sync,
        T: Send,
        F: Fn(usize, &[(K, V)]) -> T + Sync,
    {
        self.pool.install(|| {
            ds.partitions
                .par_iter()
                .enumerate()
                .map(|(i, p)| f(i, p))
                .collect()
        })
    }

    /// Element-wise transform. Partition layout is kept; the partitioner
    /// descriptor is dropped since keys may change.
    pub fn map<K, V, K2, V2, F>(&self, ds: &KeyedDataset<K, V>, f: F) -> KeyedDataset<K2, V2>
    where
        K: Sync,
        V: Sync,
        K2: Send,
        V2: Send,
        F: Fn(&K, &V) -> (K2, V2) + Sync,
    {
        let partitions = self.run_partitions(ds, |_, p| p.iter().map(|(k, v)| f(k, v)).collect());
        KeyedDataset::from_partitions(partitions)
    }

    pub fn filter<K, V, F>(&self, ds: KeyedDataset<K, V>, pred: F) -> KeyedDataset<K, V>
    where
        K: Send,
        V: Send,
        F: Fn(&K, &V) -> bool + Sync,
    {
        let KeyedDataset {
            partitions,
            partitioner,
        } = ds;
        let partitions = self.pool.install(|| {
            partitions
                .into_par_iter()
                .map(|mut p| {
                    p.retain(|(k, v)| pred(k, v));
                    p
                })
                .collect()
        });
        KeyedDataset {
            partitions,
            partitioner,
        }
    }

    /// Multiset union: the partitions of `a` followed by those of `b`.
    pub fn union<K, V>(&self, a: KeyedDataset<K, V>, b: KeyedDataset<K, V>) -> KeyedDataset<K, V> {
        let mut partitions = a.partitions;
        partitions.extend(b.partitions);
        KeyedDataset::from_partitions(partitions)
    }

    /// Move every record to the output partition chosen by `route`. Buckets
    /// are concatenated in input partition order.
    fn shuffle<K, V, R>(&self, partitions: Vec<Vec<(K, V)>>, outputs: usize, route: R) -> Vec<Vec<(K, V)>>
    where
        K: Send,
        V: Send,
        R: Fn(&K) -> usize + Sync,
    {
        let bucketed: Vec<Vec<Vec<(K, V)>>> = self.pool.install(|| {
            partitions
                .into_par_iter()
                .map(|p| {
                    let mut buckets: Vec<Vec<(K, V)>> = (0..outputs).map(|_| Vec::new()).collect();
                    for (k, v) in p {
                        let dest = route(&k);
                        buckets[dest].push((k, v));
                    }
                    buckets
                })
                .collect()
        });
        let mut gathered: Vec<Vec<Vec<(K, V)>>> = (0..outputs).map(|_| Vec::new()).collect();
        for buckets in bucketed {
            for (dest, bucket) in buckets.into_iter().enumerate() {
                if !bucket.is_empty() {
                    gathered[dest].push(bucket);
                }
            }
        }
        self.pool.install(|| {
            gathered
                .into_par_iter()
                .map(|chunks| {
                    let mut it = chunks.into_iter();
                    let mut out = it.next().unwrap_or_default();
                    for c in it {
                        out.extend(c);
                    }
                    out
                })
                .collect()
        })
    }

    /// Combine all values of each key with an associative, commutative
    /// `combine`. Values are combined map-side first, then again after the
    /// shuffle; each side folds values in sorted order.
    pub fn reduce_by_key<K, V, F>(&self, ds: KeyedDataset<K, V>, combine: F) -> KeyedDataset<K, V>
    where
        K: Ord + Hash + Send,
        V: Ord + Send,
        F: Fn(V, V) -> V + Sync,
    {
        let fold = |mut p: Vec<(K, V)>| -> Vec<(K, V)> {
            p.sort_unstable();
            let mut out: Vec<(K, V)> = Vec::new();
            let mut current: Option<(K, V)> = None;
            for (k, v) in p {
                current = match current.take() {
                    Some((ck, cv)) if ck == k => Some((ck, combine(cv, v))),
                    Some(done) => {
                        out.push(done);
                        Some((k, v))
                    }
                    None => Some((k, v)),
                };
            }
            out.extend(current);
            out
        };
        let combined: Vec<Vec<(K, V)>> =
            self.pool.install(|| ds.partitions.into_par_iter().map(fold).collect());
        let n = self.config.num_partitions;
        let shuffled = self.shuffle(combined, n, |k| hash_route(k, n));
        let partitions = self.pool.install(|| shuffled.into_par_iter().map(fold).collect());
        KeyedDataset::from_partitions(partitions)
    }

    /// Group all values of each key and hand them, sorted, to `reducer`.
    /// Exactly one output record is produced per distinct key.
    pub fn reduce_groups<K, V, V2, F>(
        &self,
        ds: KeyedDataset<K, V>,
        reducer: F,
    ) -> Result<KeyedDataset<K, V2>, EngineError>
    where
        K: Ord + Hash + Debug + Send,
        V: Ord + Send,
        V2: Send,
        F: Fn(&K, &[V]) -> Result<V2, String> + Sync,
    {
        let n = self.config.num_partitions;
        let shuffled = self.shuffle(ds.partitions, n, |k| hash_route(k, n));
        let reduce_partition = |mut p: Vec<(K, V)>| -> Result<Vec<(K, V2)>, EngineError> {
            p.sort_unstable();
            let mut out = Vec::new();
            let mut values = Vec::new();
            let mut iter = p.into_iter().peekable();
            while let Some((key, first)) = iter.next() {
                values.clear();
                values.push(first);
                while let Some((_, v)) = iter.next_if(|(k, _)| *k == key) {
                    values.push(v);
                }
                let reduced = reducer(&key, &values).map_err(|message| EngineError::Reducer {
                    key: format!("{key:?}"),
                    message,
                })?;
                out.push((key, reduced));
            }
            Ok(out)
        };
        let partitions = self.pool.install(|| {
            shuffled
                .into_par_iter()
                .map(reduce_partition)
                .collect::<Result<Vec<_>, _>>()
        })?;
        Ok(KeyedDataset::from_partitions(partitions))
    }

    /// Seeded reservoir sample of keys, read in partition order.
    pub fn sample_keys<K, V>(&self, ds: &KeyedDataset<K, V>) -> Vec<K>
    where
        K: Clone,
    {
        let size = self.config.sample_size;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.rng_seed);
        let mut reservoir: Vec<K> = Vec::with_capacity(size.min(ds.len()));
        for (seen, (k, _)) in ds.iter().enumerate() {
            if seen < size {
                reservoir.push(k.clone());
            } else {
                let j = rng.gen_range(0..=seen);
                if j < size {
                    reservoir[j] = k.clone();
                }
            }
        }
        reservoir
    }

    /// Range boundaries for `r` partitions: sort the key sample and cut it
    /// into `r` runs of (roughly) equal size. Duplicate boundaries are
    /// skipped, so fewer than `r - 1` bounds may come back.
    pub fn range_bounds<K, V>(&self, ds: &KeyedDataset<K, V>, r: usize) -> Result<Vec<K>, EngineError>
    where
        K: Ord + Clone,
    {
        if r == 0 {
            return Err(EngineError::ZeroPartitions);
        }
        let mut sample = self.sample_keys(ds);
        sample.sort();
        Ok(bounds_from_sorted_sample(sample, r))
    }

    /// Range-partition into `r` partitions and sort each partition by key.
    ///
    /// The concatenation of the output partitions is sorted by key and equal
    /// keys never straddle a partition boundary. Records with equal keys keep
    /// their input order.
    pub fn range_partition_and_sort<K, V>(
        &self,
        ds: KeyedDataset<K, V>,
        r: usize,
    ) -> Result<KeyedDataset<K, V>, EngineError>
    where
        K: Ord + Clone + Send + Sync,
        V: Send,
    {
        let bounds = self.range_bounds(&ds, r)?;
        let shuffled = self.shuffle(ds.partitions, r, |k| {
            bounds.partition_point(|b| b <= k)
        });
        let partitions = self.pool.install(|| {
            shuffled
                .into_par_iter()
                .map(|mut p| {
                    p.sort_by(|a, b| a.0.cmp(&b.0));
                    p
                })
                .collect()
        });
        Ok(KeyedDataset {
            partitions,
            partitioner: Partitioner::Range(bounds),
        })
    }

    /// Inner join on keys. Each key may appear at most once per side.
    pub fn join<K, V, W>(
        &self,
        a: KeyedDataset<K, V>,
        b: KeyedDataset<K, W>,
    ) -> Result<KeyedDataset<K, (V, W)>, EngineError>
    where
        K: Ord + Hash + Debug + Send,
        V: Send,
        W: Send,
    {
        let n = self.config.num_partitions;
        let left = self.shuffle(a.partitions, n, |k| hash_route(k, n));
        let right = self.shuffle(b.partitions, n, |k| hash_route(k, n));
        let pairs: Vec<_> = left.into_iter().zip(right).collect();
        let partitions = self.pool.install(|| {
            pairs
                .into_par_iter()
                .map(|(mut l, mut r)| {
                    l.sort_by(|x, y| x.0.cmp(&y.0));
                    r.sort_by(|x, y| x.0.cmp(&y.0));
                    check_unique_keys(&l)?;
                    check_unique_keys(&r)?;
                    let mut out = Vec::with_capacity(l.len().min(r.len()));
                    let mut r = r.into_iter().peekable();
                    for (k, v) in l {
                        while r.next_if(|(rk, _)| *rk < k).is_some() {}
                        if let Some((_, w)) = r.next_if(|(rk, _)| *rk == k) {
                            out.push((k, (v, w)));
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>, EngineError>>()
        })?;
        Ok(KeyedDataset::from_partitions(partitions))
    }
}

fn check_unique_keys<K: Ord + Debug, V>(sorted: &[(K, V)]) -> Result<(), EngineError> {
    match sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        Some(w) => Err(EngineError::DuplicateKey {
            key: format!("{:?}", w[0].0),
        }),
        None => Ok(()),
    }
}

/// Pick up to `r - 1` boundaries from a sorted sample. Boundary `i` is the
/// first sample key at which the cumulative count reaches `i * m / r`; a
/// key equal to a boundary belongs to the partition that boundary opens.
pub fn bounds_from_sorted_sample<K: Ord>(sample: Vec<K>, r: usize) -> Vec<K> {
    let m = sample.len();
    let mut bounds: Vec<K> = Vec::with_capacity(r.saturating_sub(1));
    if r <= 1 || m == 0 {
        return bounds;
    }
    let mut target = 1;
    for (idx, key) in sample.into_iter().enumerate() {
        if target >= r {
            break;
        }
        // cumulative count (idx + 1) reached target * m / r
        if (idx + 1) * r >= target * m {
            if bounds.last().map_or(true, |b| key > *b) {
                bounds.push(key);
            }
            target += 1;
        }
    }
    bounds
}
