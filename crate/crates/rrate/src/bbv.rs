//! Basic-block-vector phase analysis: parsing SimPoint-style frequency
//! traces, per-interval L1 normalization, and the pairwise Euclidean
//! self-similarity matrix behind recurrence plots.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_INTERVAL_INSTRUCTIONS: u64 = 10_000_000;

/// Execution counts of basic blocks over one interval, keyed by block id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BBVector {
    pub counts: BTreeMap<u64, u64>,
}

impl BBVector {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// An ordered series of interval vectors from one program run.
#[derive(Debug, Clone, PartialEq)]
pub struct BBVTrace {
    pub intervals: Vec<BBVector>,
    /// Nominal instructions per interval (the sampling quantum).
    pub interval_instructions: u64,
    pub source: String,
}

impl BBVTrace {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Parses a `.bb` trace: one interval per line, a leading `T`, then
/// whitespace-separated `:<block-id>:<count>` groups.
pub fn parse_bb(path: &Path, interval_instructions: u64) -> Result<BBVTrace> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_bb_str(&text, &file, interval_instructions)
}

pub fn parse_bb_str(text: &str, source: &str, interval_instructions: u64) -> Result<BBVTrace> {
    if interval_instructions == 0 {
        return Err(Error::Config("interval instructions must be positive".into()));
    }
    let mut intervals = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix('T')
            .ok_or_else(|| Error::parse(source, lineno, "interval line must start with 'T'"))?;
        let mut vector = BBVector::default();
        for group in rest.split_whitespace() {
            let body = group.strip_prefix(':').ok_or_else(|| {
                Error::parse(source, lineno, format!("group \"{group}\" must start with ':'"))
            })?;
            let (id_str, count_str) = body.split_once(':').ok_or_else(|| {
                Error::parse(source, lineno, format!("group \"{group}\" must be :<id>:<count>"))
            })?;
            let id: u64 = id_str.parse().map_err(|_| {
                Error::parse(source, lineno, format!("invalid block id \"{id_str}\""))
            })?;
            let count: u64 = count_str.parse().map_err(|_| {
                Error::parse(source, lineno, format!("invalid block count \"{count_str}\""))
            })?;
            if vector.counts.insert(id, count).is_some() {
                return Err(Error::parse(source, lineno, format!("block id {id} repeated")));
            }
        }
        if vector.total() == 0 {
            return Err(Error::parse(source, lineno, "interval has zero total count"));
        }
        intervals.push(vector);
    }
    if intervals.is_empty() {
        return Err(Error::parse(source, 1, "trace has no intervals"));
    }
    Ok(BBVTrace {
        intervals,
        interval_instructions,
        source: source.to_string(),
    })
}

/// A trace whose per-interval vectors have been scaled to sum to one.
/// Vectors are kept as sorted sparse (block id, frequency) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTrace {
    pub intervals: Vec<Vec<(u64, f64)>>,
    pub interval_instructions: u64,
}

impl NormalizedTrace {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Converts counts to per-interval proportions (L1 normalization).
pub fn normalize_l1(trace: &BBVTrace) -> Result<NormalizedTrace> {
    let mut intervals = Vec::with_capacity(trace.len());
    for (i, v) in trace.intervals.iter().enumerate() {
        let total = v.total();
        if total == 0 {
            return Err(Error::Metric(format!("interval {i} has zero total count")));
        }
        let total = total as f64;
        intervals.push(
            v.counts
                .iter()
                .map(|(&id, &c)| (id, c as f64 / total))
                .collect(),
        );
    }
    Ok(NormalizedTrace {
        intervals,
        interval_instructions: trace.interval_instructions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixNorm {
    Raw,
    UnitMax,
}

/// T x T self-similarity matrix of pairwise distances. Symmetric with a zero
/// diagonal by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub dim: usize,
    values: Vec<f64>,
    pub normalization: MatrixNorm,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Euclidean distance between two sorted sparse vectors over the union of
/// their block ids.
fn sparse_distance(a: &[(u64, f64)], b: &[(u64, f64)]) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let d = match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Equal => {
                let d = a[i].1 - b[j].1;
                i += 1;
                j += 1;
                d
            }
            std::cmp::Ordering::Less => {
                let d = a[i].1;
                i += 1;
                d
            }
            std::cmp::Ordering::Greater => {
                let d = b[j].1;
                j += 1;
                d
            }
        };
        sum += d * d;
    }
    for &(_, v) in &a[i..] {
        sum += v * v;
    }
    for &(_, v) in &b[j..] {
        sum += v * v;
    }
    sum.sqrt()
}

/// Pairwise distances between every interval of a normalized trace. Each
/// pair is computed once and mirrored, so symmetry is exact.
pub fn distance_matrix(trace: &NormalizedTrace) -> DistanceMatrix {
    let t = trace.len();
    let mut values = vec![0.0; t * t];
    for i in 0..t {
        for j in (i + 1)..t {
            let d = sparse_distance(&trace.intervals[i], &trace.intervals[j]);
            values[i * t + j] = d;
            values[j * t + i] = d;
        }
    }
    DistanceMatrix {
        dim: t,
        values,
        normalization: MatrixNorm::Raw,
    }
}

/// Scales all entries so the maximum becomes 1. An all-zero matrix is
/// returned unchanged.
pub fn to_unit_max(d: &DistanceMatrix) -> DistanceMatrix {
    let max = d.max_value();
    if max <= 0.0 {
        return DistanceMatrix {
            dim: d.dim,
            values: d.values.clone(),
            normalization: MatrixNorm::UnitMax,
        };
    }
    DistanceMatrix {
        dim: d.dim,
        values: d.values.iter().map(|v| v / max).collect(),
        normalization: MatrixNorm::UnitMax,
    }
}
