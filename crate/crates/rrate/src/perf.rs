//! Performance-counter series: ingestion of cumulative counter samples,
//! top-down level-1 category accounting, and resampling onto a fixed
//! instruction axis so the series lines up with BBV intervals.
//!
//! The backend fraction is always the residual of the other three
//! categories, so the four fractions tile the window exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on raw category fractions before input is rejected;
/// two-decimal rounding of published data motivates the 0.02.
pub const FRACTION_SLACK: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotCounts {
    pub total: u64,
    pub retiring: u64,
    pub frontend: u64,
    pub badspec: u64,
}

/// One cumulative counter reading. The pipeline-slot group is optional but
/// all-or-nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterSample {
    pub instructions: u64,
    pub cycles: u64,
    pub slots: Option<SlotCounts>,
}

/// Parses a counter CSV with header `instructions,cycles` and optionally the
/// four slot columns. Cumulative columns must be non-decreasing.
pub fn parse_samples(path: &Path) -> Result<Vec<CounterSample>> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_samples_str(&text, &file)
}

pub fn parse_samples_str(text: &str, source: &str) -> Result<Vec<CounterSample>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(source, 1, "empty file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| cols.iter().position(|c| *c == name);
    let ci = col("instructions")
        .ok_or_else(|| Error::parse(source, 1, "missing column \"instructions\""))?;
    let cc = col("cycles").ok_or_else(|| Error::parse(source, 1, "missing column \"cycles\""))?;
    let slot_cols = [
        col("slots_total"),
        col("slots_retiring"),
        col("slots_frontend"),
        col("slots_badspec"),
    ];
    let has_slots = match slot_cols.iter().filter(|c| c.is_some()).count() {
        0 => false,
        4 => true,
        _ => {
            return Err(Error::parse(
                source,
                1,
                "slot columns must be present together or absent",
            ))
        }
    };

    let mut samples: Vec<CounterSample> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::parse(
                source,
                lineno,
                format!("expected {} fields, got {}", cols.len(), fields.len()),
            ));
        }
        let num = |idx: usize, what: &str| -> Result<u64> {
            fields[idx].parse().map_err(|_| {
                Error::parse(source, lineno, format!("bad {what} \"{}\"", fields[idx]))
            })
        };
        let sample = CounterSample {
            instructions: num(ci, "instructions")?,
            cycles: num(cc, "cycles")?,
            slots: if has_slots {
                let s = SlotCounts {
                    total: num(slot_cols[0].unwrap(), "slots_total")?,
                    retiring: num(slot_cols[1].unwrap(), "slots_retiring")?,
                    frontend: num(slot_cols[2].unwrap(), "slots_frontend")?,
                    badspec: num(slot_cols[3].unwrap(), "slots_badspec")?,
                };
                if s.retiring > s.total || s.frontend > s.total || s.badspec > s.total {
                    return Err(Error::parse(
                        source,
                        lineno,
                        "slot category exceeds slots_total",
                    ));
                }
                Some(s)
            } else {
                None
            },
        };
        if let Some(prev) = samples.last() {
            let non_decreasing = sample.instructions >= prev.instructions
                && sample.cycles >= prev.cycles
                && match (prev.slots, sample.slots) {
                    (Some(a), Some(b)) => {
                        b.total >= a.total
                            && b.retiring >= a.retiring
                            && b.frontend >= a.frontend
                            && b.badspec >= a.badspec
                    }
                    (None, None) => true,
                    _ => false,
                };
            if !non_decreasing {
                return Err(Error::parse(
                    source,
                    lineno,
                    "cumulative counters must be non-decreasing",
                ));
            }
        }
        samples.push(sample);
    }
    if samples.len() < 2 {
        return Err(Error::parse(source, 1, "need at least 2 samples"));
    }
    Ok(samples)
}

/// Level-1 category fractions of a window. `backend` is the residual, so
/// the four always sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopDownFractions {
    pub frontend: f64,
    pub badspec: f64,
    pub retiring: f64,
    pub backend: f64,
}

impl TopDownFractions {
    /// Builds from the three measured fractions, computing `backend` as the
    /// residual. Fractions may undershoot or overshoot the unit interval by
    /// at most [`FRACTION_SLACK`].
    pub fn from_categories(frontend: f64, badspec: f64, retiring: f64) -> Result<Self> {
        let backend = 1.0 - frontend - badspec - retiring;
        for (name, v) in [
            ("frontend", frontend),
            ("badspec", badspec),
            ("retiring", retiring),
            ("backend", backend),
        ] {
            if !v.is_finite() || !(-FRACTION_SLACK..=1.0 + FRACTION_SLACK).contains(&v) {
                return Err(Error::Metric(format!(
                    "{name} fraction {v} outside [{:.2}, {:.2}]",
                    -FRACTION_SLACK,
                    1.0 + FRACTION_SLACK
                )));
            }
        }
        Ok(TopDownFractions {
            frontend,
            badspec,
            retiring,
            backend,
        })
    }

    /// Display form with each category clamped to [0, 1].
    pub fn clamped(&self) -> [f64; 4] {
        [self.frontend, self.badspec, self.retiring, self.backend]
            .map(|v| v.clamp(0.0, 1.0))
    }
}

/// IPC plus, when slot counters are available, the level-1 breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopDownBreakdown {
    pub ipc: f64,
    pub fractions: Option<TopDownFractions>,
}

/// Deltas of the cumulative counters over one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleDelta {
    pub instructions: u64,
    pub cycles: u64,
    pub slots: Option<SlotCounts>,
}

/// Level-1 accounting over one window of deltas: IPC plus category fractions
/// of total slots, with backend as the residual.
pub fn topdown_level1(delta: &SampleDelta) -> Result<TopDownBreakdown> {
    if delta.cycles == 0 {
        return Err(Error::Metric("window has zero cycle delta".into()));
    }
    let ipc = delta.instructions as f64 / delta.cycles as f64;
    let fractions = match &delta.slots {
        None => None,
        Some(s) => {
            if s.total == 0 {
                return Err(Error::Metric("window has zero slot delta".into()));
            }
            let total = s.total as f64;
            Some(TopDownFractions::from_categories(
                s.frontend as f64 / total,
                s.badspec as f64 / total,
                s.retiring as f64 / total,
            )?)
        }
    };
    Ok(TopDownBreakdown { ipc, fractions })
}

/// A counter series resampled onto instruction-count boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSeries {
    pub interval_instructions: u64,
    /// Cumulative instruction count at the start of the series.
    pub first_instructions: u64,
    pub points: Vec<TopDownBreakdown>,
    /// Raw per-interval counter deltas, parallel to `points`.
    pub deltas: Vec<SampleDelta>,
}

impl AlignedSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_topdown(&self) -> bool {
        self.points.iter().all(|p| p.fractions.is_some())
    }

    /// CSV rows `interval,ipc,frontend,badspec,retiring,backend`; the four
    /// fraction fields stay empty in IPC-only mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("interval,ipc,frontend,badspec,retiring,backend\n");
        for (k, p) in self.points.iter().enumerate() {
            match &p.fractions {
                Some(f) => out.push_str(&format!(
                    "{k},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                    p.ipc, f.frontend, f.badspec, f.retiring, f.backend
                )),
                None => out.push_str(&format!("{k},{:.6},,,,\n", p.ipc)),
            }
        }
        out
    }
}

/// Linear interpolation of a cumulative counter at instruction boundary `b`,
/// rounded back to an integral count (counters are integers; rounding keeps
/// interval deltas exactly conservative).
fn interp_at(samples: &[CounterSample], seg: usize, b: u64, value: impl Fn(&CounterSample) -> u64) -> u64 {
    let (lo, hi) = (&samples[seg], &samples[seg + 1]);
    let (x0, x1) = (lo.instructions, hi.instructions);
    if x1 == x0 || b <= x0 {
        return value(lo);
    }
    if b >= x1 {
        return value(hi);
    }
    let (y0, y1) = (value(lo) as f64, value(hi) as f64);
    let t = (b - x0) as f64 / (x1 - x0) as f64;
    (y0 + t * (y1 - y0)).round() as u64
}

/// Resamples cumulative counters at `k * interval_instructions` boundaries
/// (relative to the first sample) and runs level-1 accounting per interval.
/// Totals are conserved exactly: per-interval deltas of every counter sum to
/// the stream totals.
pub fn resample_to_instructions(
    samples: &[CounterSample],
    interval_instructions: u64,
) -> Result<AlignedSeries> {
    if samples.len() < 2 {
        return Err(Error::Metric("resampling needs at least 2 samples".into()));
    }
    if interval_instructions == 0 {
        return Err(Error::Metric("interval must be positive".into()));
    }
    let first = samples[0];
    let last = samples[samples.len() - 1];
    let total = last.instructions - first.instructions;
    if total == 0 {
        return Err(Error::Metric("stream retires no instructions".into()));
    }
    let intervals = total.div_ceil(interval_instructions) as usize;

    // cumulative values at each boundary, walking a segment cursor
    let mut boundary_vals: Vec<CounterSample> = Vec::with_capacity(intervals + 1);
    let mut seg = 0usize;
    for k in 0..=intervals {
        let b = first
            .instructions
            .saturating_add((k as u64).saturating_mul(interval_instructions))
            .min(last.instructions);
        while seg + 2 < samples.len() && samples[seg + 1].instructions < b {
            seg += 1;
        }
        let slots = first.slots.map(|_| SlotCounts {
            total: interp_at(samples, seg, b, |s| s.slots.unwrap().total),
            retiring: interp_at(samples, seg, b, |s| s.slots.unwrap().retiring),
            frontend: interp_at(samples, seg, b, |s| s.slots.unwrap().frontend),
            badspec: interp_at(samples, seg, b, |s| s.slots.unwrap().badspec),
        });
        boundary_vals.push(CounterSample {
            instructions: b,
            cycles: interp_at(samples, seg, b, |s| s.cycles),
            slots,
        });
    }

    let mut points = Vec::with_capacity(intervals);
    let mut deltas = Vec::with_capacity(intervals);
    for w in boundary_vals.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let delta = SampleDelta {
            instructions: b.instructions - a.instructions,
            cycles: b.cycles - a.cycles,
            slots: match (a.slots, b.slots) {
                (Some(x), Some(y)) => Some(SlotCounts {
                    total: y.total - x.total,
                    retiring: y.retiring - x.retiring,
                    frontend: y.frontend - x.frontend,
                    badspec: y.badspec - x.badspec,
                }),
                _ => None,
            },
        };
        points.push(topdown_level1(&delta)?);
        deltas.push(delta);
    }
    Ok(AlignedSeries {
        interval_instructions,
        first_instructions: first.instructions,
        points,
        deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(instr: u64, cycles: u64) -> CounterSample {
        CounterSample {
            instructions: instr,
            cycles,
            slots: None,
        }
    }

    #[test]
    fn parse_two_rows() {
        let text = "instructions,cycles\n0,0\n1000000000,500000000\n";
        let s = parse_samples_str(text, "t").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].instructions, 1_000_000_000);
        assert!(s[0].slots.is_none());
    }

    #[test]
    fn parse_rejects_decreasing_instructions() {
        let text = "instructions,cycles\n100,50\n90,60\n";
        let err = parse_samples_str(text, "t").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parse_requires_mandatory_columns() {
        assert!(parse_samples_str("cycles\n1\n2\n", "t").is_err());
        assert!(parse_samples_str("instructions,cycles,slots_total\n1,1,1\n", "t").is_err());
    }

    #[test]
    fn slots_absent_gives_ipc_only_series() {
        let text = "instructions,cycles\n0,0\n1000,250\n2000,500\n";
        let samples = parse_samples_str(text, "t").unwrap();
        let series = resample_to_instructions(&samples, 1000).unwrap();
        assert_eq!(series.len(), 2);
        assert!(!series.has_topdown());
        assert!(series.to_csv().contains(",,,,"));
    }

    #[test]
    fn stockfish_row_backend_residual() {
        // fe 34, badspec 5, retiring 37 of 100 slots -> backend 0.24
        let delta = SampleDelta {
            instructions: 312,
            cycles: 100,
            slots: Some(SlotCounts {
                total: 100,
                retiring: 37,
                frontend: 34,
                badspec: 5,
            }),
        };
        let b = topdown_level1(&delta).unwrap();
        let f = b.fractions.unwrap();
        assert!((f.backend - 0.24).abs() < 1e-12);
        assert!((f.frontend + f.badspec + f.retiring + f.backend - 1.0).abs() < 1e-15);
        assert!((b.ipc - 3.12).abs() < 1e-12);
    }

    #[test]
    fn perfect_retirement() {
        let delta = SampleDelta {
            instructions: 800,
            cycles: 100,
            slots: Some(SlotCounts {
                total: 100,
                retiring: 100,
                frontend: 0,
                badspec: 0,
            }),
        };
        let f = topdown_level1(&delta).unwrap().fractions.unwrap();
        assert_eq!(f.retiring, 1.0);
        assert_eq!(f.frontend, 0.0);
        assert_eq!(f.badspec, 0.0);
        assert_eq!(f.backend, 0.0);
        // 8-wide dispatch ceiling: 8 instructions per cycle
        assert_eq!(topdown_level1(&delta).unwrap().ipc, 8.0);
    }

    #[test]
    fn zero_denominators_rejected() {
        let delta = SampleDelta {
            instructions: 10,
            cycles: 0,
            slots: None,
        };
        assert!(topdown_level1(&delta).is_err());
        let delta2 = SampleDelta {
            instructions: 10,
            cycles: 10,
            slots: Some(SlotCounts {
                total: 0,
                retiring: 0,
                frontend: 0,
                badspec: 0,
            }),
        };
        assert!(topdown_level1(&delta2).is_err());
    }

    #[test]
    fn uniform_stream_gives_identical_intervals() {
        let samples: Vec<CounterSample> =
            (0..=10).map(|k| sample(k * 1000, k * 500)).collect();
        let series = resample_to_instructions(&samples, 2500).unwrap();
        assert_eq!(series.len(), 4);
        for p in &series.points {
            assert!((p.ipc - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_phase_stream_steps_down() {
        // first half IPC 4, second half IPC 1, equal instruction halves
        let mut samples = vec![sample(0, 0)];
        for k in 1..=10u64 {
            samples.push(sample(k * 1000, k * 250));
        }
        for k in 1..=10u64 {
            samples.push(sample(10_000 + k * 1000, 2500 + k * 1000));
        }
        let series = resample_to_instructions(&samples, 1000).unwrap();
        assert_eq!(series.len(), 20);
        for p in &series.points[..10] {
            assert!((p.ipc - 4.0).abs() / 4.0 < 0.02, "ipc {}", p.ipc);
        }
        for p in &series.points[10..] {
            assert!((p.ipc - 1.0).abs() < 0.02, "ipc {}", p.ipc);
        }
    }

    #[test]
    fn boundary_interval_blends_phases() {
        // same two-phase stream, but intervals straddling the phase change
        let samples = vec![sample(0, 0), sample(1000, 250), sample(2000, 1250)];
        let series = resample_to_instructions(&samples, 800).unwrap();
        assert_eq!(series.len(), 3);
        assert!(series.points[0].ipc > 3.9);
        assert!(series.points[2].ipc < 1.1);
        let mid = series.points[1].ipc;
        assert!(mid > 1.0 && mid < 4.0, "boundary interval ipc {mid}");
    }

    #[test]
    fn conservation_is_exact() {
        let samples = vec![
            sample(17, 23),
            sample(1017, 523),
            sample(1020, 600),
            sample(5000, 2600),
            sample(5003, 2601),
        ];
        let series = resample_to_instructions(&samples, 700).unwrap();
        let sum_i: u64 = series.deltas.iter().map(|d| d.instructions).sum();
        let sum_c: u64 = series.deltas.iter().map(|d| d.cycles).sum();
        assert_eq!(sum_i, 5003 - 17);
        assert_eq!(sum_c, 2601 - 23);
    }

    #[test]
    fn oversized_interval_yields_single_point() {
        let samples = vec![sample(0, 0), sample(500, 250)];
        let series = resample_to_instructions(&samples, 10_000).unwrap();
        assert_eq!(series.len(), 1);
        assert!((series.points[0].ipc - 2.0).abs() < 1e-12);
    }
}
