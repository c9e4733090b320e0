//! Bounded enumeration of determinant values.
//!
//! Boxes `[lo, hi]^dim` are swept exhaustively or sampled with a seeded
//! ChaCha stream per chunk. Chunks run in parallel and are merged in index
//! order, so output is independent of the worker count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characterization::{classify_z2d8, classify_z2q8};
use crate::factored::{det_pack, pack_total_i128, theorem1_eval, PackGroup, QuartetPack};
use crate::groupring::{det_naive, GroupRingElement};
use crate::groups::{direct_product, make_cyclic, FiniteGroup};

/// Exhaustive sweeps are capped at this many vectors.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000_000;

const CHUNK: u64 = 1 << 16;
const CHUNKS_PER_BATCH: u64 = 64;

#[derive(Debug, Clone)]
pub enum SearchTarget {
    /// Closed-form `i128` evaluation of a 16-coefficient pack.
    Pack(PackGroup),
    /// Any group, evaluated through the group matrix.
    Group(Arc<FiniteGroup>),
}

impl SearchTarget {
    pub fn dim(&self) -> usize {
        match self {
            SearchTarget::Pack(_) => 16,
            SearchTarget::Group(g) => g.order(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            SearchTarget::Pack(v) => v.name().to_string(),
            SearchTarget::Group(g) => g.name().to_string(),
        }
    }

    fn eval(&self, v: &[i64]) -> Option<i128> {
        match self {
            SearchTarget::Pack(variant) => {
                pack_total_i128(&QuartetPack::from_vector(v).ok()?, *variant)
            }
            SearchTarget::Group(g) => {
                let x = GroupRingElement::from_i64s(Arc::clone(g), v).ok()?;
                i128::try_from(det_naive(&x)).ok()
            }
        }
    }

    /// Independent big-integer evaluation used to re-check records.
    fn eval_exact(&self, v: &[i64]) -> Option<BigInt> {
        match self {
            SearchTarget::Pack(variant) => {
                Some(det_pack(&QuartetPack::from_vector(v).ok()?, *variant).total)
            }
            SearchTarget::Group(g) => Some(det_naive(
                &GroupRingElement::from_i64s(Arc::clone(g), v).ok()?,
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SearchJob {
    pub target: SearchTarget,
    pub lo: i64,
    pub hi: i64,
    pub mode: SearchMode,
    /// JSON-lines destination; a `.summary.csv` sibling is written next to it.
    pub output: Option<PathBuf>,
    /// Worker threads, `0` for the rayon default.
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub value: i128,
    pub vector: Vec<i64>,
    /// Occurrences, saturating.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Sorted by value.
    pub records: Vec<SearchRecord>,
    pub evaluated: u64,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("empty coefficient range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("exhaustive box has {size} vectors, above the limit of {EXHAUSTIVE_LIMIT}")]
    BoxTooLarge { size: u128 },
    #[error("determinant overflows i128 at {0:?}")]
    Overflow(Vec<i64>),
    #[error("stored vector {vector:?} does not reproduce {value}")]
    Unverified { value: i128, vector: Vec<i64> },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

type ChunkMap = BTreeMap<i128, (Vec<i64>, u64)>;

fn box_size(width: u128, dim: usize) -> u128 {
    (0..dim).fold(1u128, |acc, _| acc.saturating_mul(width))
}

/// Coordinate 0 varies fastest.
fn decode(mut index: u64, lo: i64, width: u64, out: &mut [i64]) {
    for c in out.iter_mut() {
        *c = lo + (index % width) as i64;
        index /= width;
    }
}

fn run_chunk(job: &SearchJob, chunk: u64, total: u64, width: u64) -> Result<ChunkMap, SearchError> {
    let dim = job.target.dim();
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(total);
    let mut map = ChunkMap::new();
    let mut v = vec![0i64; dim];
    let mut rng = match job.mode {
        SearchMode::Sample { seed, .. } => {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(chunk);
            Some(r)
        }
        SearchMode::Exhaustive => None,
    };
    for index in start..end {
        match rng.as_mut() {
            Some(r) => v.iter_mut().for_each(|c| *c = r.gen_range(job.lo..=job.hi)),
            None => decode(index, job.lo, width, &mut v),
        }
        let value = job
            .target
            .eval(&v)
            .ok_or_else(|| SearchError::Overflow(v.clone()))?;
        map.entry(value)
            .and_modify(|e| e.1 = e.1.saturating_add(1))
            .or_insert_with(|| (v.clone(), 1));
    }
    Ok(map)
}

fn merge(into: &mut ChunkMap, from: ChunkMap) {
    for (value, (vector, count)) in from {
        into.entry(value)
            .and_modify(|e| e.1 = e.1.saturating_add(count))
            .or_insert((vector, count));
    }
}

/// Runs the job, re-verifies every record and writes the output files.
pub fn run_search(job: &SearchJob) -> Result<SearchOutcome, SearchError> {
    if job.lo > job.hi {
        return Err(SearchError::EmptyRange {
            lo: job.lo,
            hi: job.hi,
        });
    }
    let span = (job.hi as i128 - job.lo as i128 + 1) as u128;
    let (total, width) = match job.mode {
        SearchMode::Exhaustive => {
            let size = box_size(span, job.target.dim());
            if size > EXHAUSTIVE_LIMIT {
                return Err(SearchError::BoxTooLarge { size });
            }
            (size as u64, span as u64)
        }
        SearchMode::Sample { count, .. } => (count, 0),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.threads)
        .build()
        .map_err(|e| SearchError::Pool(e.to_string()))?;
    let chunks = total.div_ceil(CHUNK);
    let mut merged = ChunkMap::new();
    let mut first = 0;
    while first < chunks {
        let last = (first + CHUNKS_PER_BATCH).min(chunks);
        let maps: Vec<Result<ChunkMap, SearchError>> = pool.install(|| {
            (first..last)
                .into_par_iter()
                .map(|c| run_chunk(job, c, total, width))
                .collect()
        });
        for m in maps {
            merge(&mut merged, m?);
        }
        first = last;
    }
    let records: Vec<SearchRecord> = merged
        .into_iter()
        .map(|(value, (vector, count))| SearchRecord {
            value,
            vector,
            count,
        })
        .collect();
    for r in &records {
        if job.target.eval_exact(&r.vector) != Some(BigInt::from(r.value)) {
            return Err(SearchError::Unverified {
                value: r.value,
                vector: r.vector.clone(),
            });
        }
    }
    if let Some(path) = &job.output {
        write_jsonl(path, &records)?;
        write_summary(&summary_path(path), &records)?;
    }
    Ok(SearchOutcome {
        records,
        evaluated: total,
    })
}

/// `<out>.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.csv");
    PathBuf::from(name)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SearchError + '_ {
    move |source| SearchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_jsonl(path: &Path, records: &[SearchRecord]) -> Result<(), SearchError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| io_err(path)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Histogram rows `(kind, bucket, distinct values, occurrences)`.
pub fn histograms(records: &[SearchRecord]) -> Vec<(String, String, u64, u64)> {
    let mut mod16: BTreeMap<i128, (u64, u64)> = BTreeMap::new();
    let mut v2: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    const ZERO: u32 = u32::MAX;
    for r in records {
        let bump = |e: &mut (u64, u64)| {
            e.0 += 1;
            e.1 = e.1.saturating_add(r.count);
        };
        bump(mod16.entry(r.value.rem_euclid(16)).or_default());
        let bucket = if r.value == 0 {
            ZERO
        } else {
            r.value.trailing_zeros().min(20)
        };
        bump(v2.entry(bucket).or_default());
    }
    let mut rows = Vec::new();
    for (r, (d, c)) in mod16 {
        rows.push(("mod16".to_string(), r.to_string(), d, c));
    }
    for (b, (d, c)) in v2 {
        let label = match b {
            ZERO => "zero".to_string(),
            20 => "20+".to_string(),
            b => b.to_string(),
        };
        rows.push(("v2".to_string(), label, d, c));
    }
    rows
}

fn write_summary(path: &Path, records: &[SearchRecord]) -> Result<(), SearchError> {
    let csv_err = |e: csv::Error| io_err(path)(std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["kind", "bucket", "distinct_values", "occurrences"])
        .map_err(csv_err)?;
    for (kind, bucket, d, c) in histograms(records) {
        w.write_record([kind, bucket, d.to_string(), c.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Values whose classification says "not a member".
pub fn classification_violations(variant: PackGroup, records: &[SearchRecord]) -> Vec<i128> {
    records
        .iter()
        .map(|r| r.value)
        .filter(|&n| {
            let verdict = match variant {
                PackGroup::Z2xD8 => classify_z2d8(n),
                PackGroup::Z2xQ8 => classify_z2q8(n),
            };
            !verdict.is_ok_and(|v| v.member)
        })
        .collect()
}

/// Fast evaluator paired with `det_naive` in [`cross_check`].
#[derive(Debug, Clone)]
pub enum CrossTarget {
    /// Closed form on a pack.
    Pack(PackGroup),
    /// Root-of-unity factorisation on `Z_n x H`.
    Theorem1 { n: usize, h: Arc<FiniteGroup> },
}

impl CrossTarget {
    pub fn name(&self) -> String {
        match self {
            CrossTarget::Pack(v) => v.name().to_string(),
            CrossTarget::Theorem1 { n, h } => format!("z{n}x{}", h.name().to_lowercase()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub vector: Vec<i64>,
    #[serde(with = "crate::decimal")]
    pub fast: BigInt,
    #[serde(with = "crate::decimal")]
    pub naive: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub target: String,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Compares the fast evaluator with `det_naive` on `count` random vectors
/// with coordinates in `[-bound, bound]`.
pub fn cross_check(target: &CrossTarget, count: usize, seed: u64, bound: i64) -> CrossCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (group, dim) = match target {
        CrossTarget::Pack(v) => (v.group(), 16),
        CrossTarget::Theorem1 { n, h } => {
            let zn = make_cyclic(*n).expect("cyclic order within limits");
            let g = Arc::new(direct_product(&zn, h).expect("product within limits"));
            let dim = g.order();
            (g, dim)
        }
    };
    let mut mismatches = Vec::new();
    for _ in 0..count {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        let fast = match target {
            CrossTarget::Pack(variant) => {
                det_pack(&QuartetPack::from_vector(&v).expect("16 entries"), *variant).total
            }
            CrossTarget::Theorem1 { n, h } => {
                let big: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
                theorem1_eval(*n, h, &big).expect("valid shape").total
            }
        };
        let naive = det_naive(&GroupRingElement::from_i64s(Arc::clone(&group), &v).expect("dim"));
        if fast != naive {
            mismatches.push(Mismatch {
                vector: v,
                fast,
                naive,
            });
        }
    }
    CrossCheckReport {
        target: target.name(),
        checked: count,
        mismatches,
    }
}
