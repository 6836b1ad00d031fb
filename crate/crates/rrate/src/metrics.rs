//! Scoring and statistics: normalized ratios against the reference baseline,
//! geometric-mean suite scores, per-copy population statistics, candidate
//! multiprogram metrics for round-robin runs, and energy integration.
//!
//! Conventions (echoed in every report header): the selected time is the
//! lower median of the iteration times; the standard deviation is the sample
//! estimator (n-1); quartiles interpolate linearly between order statistics.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{RunEvent, RunLog};
use crate::schedule::ScheduleMode;
use crate::suite::SuiteConfig;

/// Which normalization formula applies: rate runs scale by copy count,
/// single-copy (speed-style) runs do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    Rate,
    Speed,
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Geometric mean of positive ratios.
pub fn geomean(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::Metric("geomean of empty list".into()));
    }
    let mut sum = 0.0;
    for &r in ratios {
        if !positive(r) {
            return Err(Error::Metric(format!("geomean requires positive ratios, got {r}")));
        }
        sum += r.ln();
    }
    Ok((sum / ratios.len() as f64).exp())
}

/// Normalized ratio: `copies * ref / selected` in rate mode, `ref / selected`
/// in speed mode. The reference machine scores 1.0 by construction.
pub fn spec_ratio(ref_s: f64, selected_s: f64, copies: u32, mode: ScoreMode) -> Result<f64> {
    if !positive(ref_s) || !positive(selected_s) || copies == 0 {
        return Err(Error::Metric(format!(
            "ratio requires positive inputs (ref {ref_s}, selected {selected_s}, copies {copies})"
        )));
    }
    Ok(match mode {
        ScoreMode::Rate => copies as f64 * ref_s / selected_s,
        ScoreMode::Speed => ref_s / selected_s,
    })
}

/// Lower median: the middle element, or the lower of the two middles for an
/// even count.
pub fn median_lower(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Metric("median of empty list".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[(sorted.len() - 1) / 2])
}

/// Across-copies population statistics for one benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyStats {
    pub min_s: f64,
    pub max_s: f64,
    pub mean_s: f64,
    pub stddev_s: f64,
    /// Coefficient of variation, stddev/mean.
    pub cv: f64,
    pub q1_s: f64,
    pub median_s: f64,
    pub q3_s: f64,
}

fn quantile_interpolated(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

/// Sample statistics over per-copy times: min/max/mean, sample standard
/// deviation (0 for a single copy), coefficient of variation, and linearly
/// interpolated quartiles.
pub fn copy_stats(times_s: &[f64]) -> Result<CopyStats> {
    if times_s.is_empty() {
        return Err(Error::Metric("copy stats of empty list".into()));
    }
    let n = times_s.len();
    let mut sorted = times_s.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let stddev = if n > 1 {
        let ss: f64 = sorted.iter().map(|t| (t - mean) * (t - mean)).sum();
        (ss / (n as f64 - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(CopyStats {
        min_s: sorted[0],
        max_s: sorted[n - 1],
        mean_s: mean,
        stddev_s: stddev,
        cv: if mean != 0.0 { stddev / mean } else { 0.0 },
        q1_s: quantile_interpolated(&sorted, 0.25),
        median_s: quantile_interpolated(&sorted, 0.5),
        q3_s: quantile_interpolated(&sorted, 0.75),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkScore {
    pub bench_id: String,
    /// Whole-benchmark elapsed per iteration: latest end minus earliest start
    /// over all copies and workloads of that iteration.
    pub iteration_times_s: Vec<f64>,
    pub selected_time_s: f64,
    pub ratio: f64,
    pub copy_stats: CopyStats,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteScore {
    pub suite_name: String,
    pub mode: ScheduleMode,
    pub copies: u32,
    pub iterations: u32,
    pub benchmarks: Vec<BenchmarkScore>,
    /// Geometric mean of the per-benchmark ratios.
    pub overall: f64,
    /// True when every event validated and every roster entry ran.
    pub compliant: bool,
}

/// Candidate multiprogram metrics for round-robin runs. These are offered
/// for analysis, not as a compliant score.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiprogramReport {
    pub bench_ids: Vec<String>,
    /// slowdown[b][c]: contended elapsed of benchmark b on copy c divided by
    /// its solo time.
    pub slowdown: Vec<Vec<f64>>,
    /// Average normalized turnaround time: mean slowdown.
    pub antt: f64,
    /// System throughput: reciprocal slowdowns of resident programs, weighted
    /// by residency within each rotation's wall span, averaged over rotations.
    pub stp: f64,
    /// Harmonic mean of the reciprocal slowdowns.
    pub hmean_speedup: f64,
    /// min(slowdown) / max(slowdown).
    pub fairness: f64,
}

impl MultiprogramReport {
    pub fn slowdown_csv(&self, copies: u32) -> String {
        let mut out = String::from("bench_id");
        for c in 0..copies {
            out.push_str(&format!(",copy{c}"));
        }
        out.push('\n');
        for (b, id) in self.bench_ids.iter().enumerate() {
            out.push_str(id);
            for v in &self.slowdown[b] {
                out.push_str(&format!(",{v:.6}"));
            }
            out.push('\n');
        }
        out
    }
}

fn group_events<'a>(
    log: &'a RunLog,
    cfg: &SuiteConfig,
) -> Result<BTreeMap<&'a str, Vec<&'a RunEvent>>> {
    let mut by_bench: BTreeMap<&str, Vec<&RunEvent>> = BTreeMap::new();
    for e in &log.events {
        by_bench.entry(e.bench_id.as_str()).or_default().push(e);
    }
    for id in by_bench.keys() {
        if cfg.roster_index(id).is_err() {
            return Err(Error::Metric(format!(
                "log contains benchmark \"{id}\" that is not in the suite roster"
            )));
        }
    }
    for bench in &cfg.roster {
        if !by_bench.contains_key(bench.id.as_str()) {
            return Err(Error::Metric(format!(
                "benchmark \"{}\" missing from the run log",
                bench.id
            )));
        }
    }
    Ok(by_bench)
}

/// Per-copy elapsed for one benchmark and iteration: the sum of its workload
/// process lifetimes on that copy.
fn per_copy_elapsed(events: &[&RunEvent], copy: u32, iteration: u32) -> Option<f64> {
    let mut total = 0.0;
    let mut any = false;
    for e in events
        .iter()
        .filter(|e| e.copy == copy && e.iteration == iteration)
    {
        total += e.duration_s();
        any = true;
    }
    any.then_some(total)
}

/// Scores a run log against its suite: per-benchmark ratios from the lower
/// median of the iteration times, per-copy statistics, overall geomean and
/// the compliance flag.
pub fn score_suite(log: &RunLog, cfg: &SuiteConfig) -> Result<SuiteScore> {
    let by_bench = group_events(log, cfg)?;
    let mut benchmarks = Vec::new();
    let mut ratios = Vec::new();
    for bench in &cfg.roster {
        let events = &by_bench[bench.id.as_str()];
        let mut iteration_times = Vec::new();
        for iter in 1..=log.iterations {
            let phase: Vec<&&RunEvent> =
                events.iter().filter(|e| e.iteration == iter).collect();
            if phase.is_empty() {
                return Err(Error::Metric(format!(
                    "benchmark \"{}\" has no events for iteration {iter}",
                    bench.id
                )));
            }
            let start = phase.iter().map(|e| e.start_ns).min().unwrap();
            let end = phase.iter().map(|e| e.end_ns).max().unwrap();
            iteration_times.push((end - start) as f64 / 1e9);
        }
        let selected = median_lower(&iteration_times)?;
        if !positive(selected) {
            return Err(Error::Metric(format!(
                "benchmark \"{}\" has zero elapsed time",
                bench.id
            )));
        }
        let ratio = spec_ratio(bench.reference_time_s, selected, log.copies, ScoreMode::Rate)?;

        let mut per_copy = Vec::new();
        for copy in 0..log.copies {
            let iters: Vec<f64> = (1..=log.iterations)
                .filter_map(|it| per_copy_elapsed(events, copy, it))
                .collect();
            if iters.is_empty() {
                return Err(Error::Metric(format!(
                    "benchmark \"{}\" has no events on copy {copy}",
                    bench.id
                )));
            }
            per_copy.push(median_lower(&iters)?);
        }

        ratios.push(ratio);
        benchmarks.push(BenchmarkScore {
            bench_id: bench.id.clone(),
            iteration_times_s: iteration_times,
            selected_time_s: selected,
            ratio,
            copy_stats: copy_stats(&per_copy)?,
        });
    }
    Ok(SuiteScore {
        suite_name: log.suite_name.clone(),
        mode: log.mode,
        copies: log.copies,
        iterations: log.iterations,
        overall: geomean(&ratios)?,
        compliant: log.all_validated(),
        benchmarks,
    })
}

/// Slowdown matrix and candidate aggregates for a round-robin log.
pub fn rrr_metrics(log: &RunLog, cfg: &SuiteConfig) -> Result<MultiprogramReport> {
    if log.mode != ScheduleMode::Rrr {
        return Err(Error::Metric(
            "multiprogram metrics require a round-robin run log".into(),
        ));
    }
    let by_bench = group_events(log, cfg)?;

    let mut slowdown = Vec::new();
    for bench in &cfg.roster {
        let events = &by_bench[bench.id.as_str()];
        let solo = bench.solo_time_s();
        let mut row = Vec::new();
        for copy in 0..log.copies {
            let per_rotation: Vec<f64> = (1..=log.iterations)
                .filter_map(|it| per_copy_elapsed(events, copy, it))
                .collect();
            if per_rotation.is_empty() {
                return Err(Error::Metric(format!(
                    "benchmark \"{}\" has no events on copy {copy}",
                    bench.id
                )));
            }
            let contended = median_lower(&per_rotation)?;
            if !positive(contended) {
                return Err(Error::Metric(format!(
                    "benchmark \"{}\" copy {copy}: zero elapsed",
                    bench.id
                )));
            }
            row.push(contended / solo);
        }
        slowdown.push(row);
    }

    let entries: Vec<f64> = slowdown.iter().flatten().copied().collect();
    let antt = entries.iter().sum::<f64>() / entries.len() as f64;
    let min = entries.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = entries.iter().cloned().fold(0.0f64, f64::max);
    let fairness = min / max;
    let hmean_speedup = entries.len() as f64 / entries.iter().sum::<f64>();

    // STP per rotation: each resident program contributes its reciprocal
    // slowdown weighted by the fraction of the rotation span it occupies.
    let mut stp_sum = 0.0;
    let mut rotations = 0usize;
    for iter in 1..=log.iterations {
        let rot: Vec<&RunEvent> = log.events.iter().filter(|e| e.iteration == iter).collect();
        if rot.is_empty() {
            continue;
        }
        let span_start = rot.iter().map(|e| e.start_ns).min().unwrap();
        let span_end = rot.iter().map(|e| e.end_ns).max().unwrap();
        let span_s = (span_end - span_start) as f64 / 1e9;
        if span_s <= 0.0 {
            return Err(Error::Metric(format!("rotation {iter} has zero span")));
        }
        let mut stp_r = 0.0;
        for bench in &cfg.roster {
            let solo = bench.solo_time_s();
            for copy in 0..log.copies {
                if let Some(dur) = per_copy_elapsed(&by_bench[bench.id.as_str()], copy, iter) {
                    if dur > 0.0 {
                        let s = dur / solo;
                        stp_r += (1.0 / s) * (dur / span_s);
                    }
                }
            }
        }
        stp_sum += stp_r;
        rotations += 1;
    }
    let stp = stp_sum / rotations as f64;

    Ok(MultiprogramReport {
        bench_ids: cfg.roster_ids(),
        slowdown,
        antt,
        stp,
        hmean_speedup,
        fairness,
    })
}

/// One power-meter reading: seconds from run start, instantaneous watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub t_s: f64,
    pub watts: f64,
}

/// Reads a `t_s,watts` CSV of power samples.
pub fn parse_power_csv(path: &Path) -> Result<Vec<PowerSample>> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t_s,watts" => {}
        _ => return Err(Error::parse(&file, 1, "expected header \"t_s,watts\"")),
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let mut parts = line.split(',');
        let t_s: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(&file, lineno, "bad timestamp"))?;
        let watts: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(&file, lineno, "bad watts"))?;
        if let Some(prev) = samples.last() {
            let prev: &PowerSample = prev;
            if t_s <= prev.t_s {
                return Err(Error::parse(&file, lineno, "timestamps must be strictly increasing"));
            }
        }
        samples.push(PowerSample { t_s, watts });
    }
    Ok(samples)
}

fn power_at(samples: &[PowerSample], t: f64) -> f64 {
    // callers guarantee t within sample range
    let i = samples.partition_point(|s| s.t_s <= t);
    if i == 0 {
        return samples[0].watts;
    }
    if i >= samples.len() {
        return samples[samples.len() - 1].watts;
    }
    let (a, b) = (samples[i - 1], samples[i]);
    a.watts + (b.watts - a.watts) * (t - a.t_s) / (b.t_s - a.t_s)
}

/// Trapezoidal integral of power over `span`, in joules. The span must lie
/// within the sampled range and timestamps must be strictly increasing.
pub fn integrate_energy(samples: &[PowerSample], span: (f64, f64)) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Metric("energy integration needs at least 2 samples".into()));
    }
    for w in samples.windows(2) {
        if w[1].t_s <= w[0].t_s {
            return Err(Error::Metric("power timestamps must be strictly increasing".into()));
        }
    }
    let (t0, t1) = span;
    if t0 > t1 {
        return Err(Error::Metric("energy span start is after its end".into()));
    }
    let (first, last) = (samples[0].t_s, samples[samples.len() - 1].t_s);
    if t0 < first || t1 > last {
        return Err(Error::Metric(format!(
            "span ({t0}, {t1}) outside sampled range ({first}, {last})"
        )));
    }
    // knots: clipped span endpoints plus every sample strictly inside
    let mut knots = vec![(t0, power_at(samples, t0))];
    for s in samples {
        if s.t_s > t0 && s.t_s < t1 {
            knots.push((s.t_s, s.watts));
        }
    }
    knots.push((t1, power_at(samples, t1)));
    let mut joules = 0.0;
    for w in knots.windows(2) {
        let ((ta, wa), (tb, wb)) = (w[0], w[1]);
        joules += (wa + wb) / 2.0 * (tb - ta);
    }
    Ok(joules)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy_j: f64,
    /// Suite reference energy over measured energy; present when every
    /// roster entry carries a reference energy.
    pub energy_ratio: Option<f64>,
    /// Overall ratio divided by average power.
    pub perf_per_watt: Option<f64>,
}

/// Integrates measured power over the full run span and relates it to the
/// suite's reference energy and overall score.
pub fn energy_report(
    samples: &[PowerSample],
    wall_span_s: f64,
    cfg: &SuiteConfig,
    overall_ratio: f64,
) -> Result<EnergyReport> {
    let energy_j = integrate_energy(samples, (0.0, wall_span_s))?;
    let ref_energy: Option<f64> = cfg
        .roster
        .iter()
        .map(|b| b.reference_energy_j)
        .sum::<Option<f64>>();
    let energy_ratio = match ref_energy {
        Some(r) if energy_j > 0.0 => Some(r / energy_j),
        _ => None,
    };
    let perf_per_watt = if energy_j > 0.0 && wall_span_s > 0.0 {
        Some(overall_ratio / (energy_j / wall_span_s))
    } else {
        None
    };
    Ok(EnergyReport {
        energy_j,
        energy_ratio,
        perf_per_watt,
    })
}
