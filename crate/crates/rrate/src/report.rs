//! The raw run report: a deterministic plain-text rendering of scores and
//! statistics, plus a machine-readable JSON twin.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exec::RunLog;
use crate::metrics::{EnergyReport, MultiprogramReport, SuiteScore};

pub const REPORT_TAG: &str = "rrate-report/1";

const CONVENTIONS: &str = "selected time = lower median of iteration times; \
ratio = copies * reference_time / selected_time; \
stddev = sample estimator (n-1); \
quartiles = linear interpolation between order statistics; \
per-copy time = lower median across iterations of summed workload times";

/// How many mismatch lines the text report shows before truncating.
const MISMATCH_LINES: usize = 50;

/// Renders the human-readable report. Same inputs, same bytes.
pub fn render_raw_report(
    score: &SuiteScore,
    rrr: Option<&MultiprogramReport>,
    energy: Option<&EnergyReport>,
    log: &RunLog,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "==== rrate raw report (format {REPORT_TAG}) ====");
    let _ = writeln!(out, "suite:      {}", score.suite_name);
    let _ = writeln!(out, "mode:       {}", score.mode);
    let _ = writeln!(out, "copies:     {}", score.copies);
    let _ = writeln!(out, "iterations: {}", score.iterations);
    let _ = writeln!(out, "host os:    {}", log.host.os);
    let _ = writeln!(out, "host cpu:   {}", log.host.cpu);
    if log.affinity_warning {
        let _ = writeln!(out, "warning:    pinning unavailable; run proceeded unpinned");
    }
    let _ = writeln!(out, "conventions: {CONVENTIONS}");
    let _ = writeln!(out);

    for b in &score.benchmarks {
        let _ = writeln!(out, "benchmark {}", b.bench_id);
        let times: Vec<String> = b
            .iteration_times_s
            .iter()
            .map(|t| format!("{t:.6}"))
            .collect();
        let _ = writeln!(out, "  iteration times (s): {}", times.join(" "));
        let _ = writeln!(out, "  selected time (s):   {:.6}", b.selected_time_s);
        let _ = writeln!(out, "  ratio:               {:.3}", b.ratio);
        let s = &b.copy_stats;
        let _ = writeln!(
            out,
            "  copies: min {:.6}  q1 {:.6}  median {:.6}  q3 {:.6}  max {:.6}",
            s.min_s, s.q1_s, s.median_s, s.q3_s, s.max_s
        );
        let _ = writeln!(
            out,
            "          mean {:.6}  stddev {:.6}  cv {:.4}",
            s.mean_s, s.stddev_s, s.cv
        );
        let _ = writeln!(out);
    }

    let _ = writeln!(out, "overall geomean: {:.3}", score.overall);
    let _ = writeln!(
        out,
        "compliant:       {}",
        if score.compliant { "yes" } else { "no (validation failures)" }
    );

    if !log.validation_failures.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "validation mismatches:");
        let mut lines = 0usize;
        'outer: for ev in &log.validation_failures {
            for m in &ev.mismatches {
                if lines >= MISMATCH_LINES {
                    let _ = writeln!(out, "  ... (truncated)");
                    break 'outer;
                }
                let _ = writeln!(
                    out,
                    "  copy {} {} {} i{}: {} line {} token {}: expected \"{}\" got \"{}\" ({})",
                    ev.copy,
                    ev.bench_id,
                    ev.workload,
                    ev.iteration,
                    m.file,
                    m.line,
                    m.token,
                    m.expected,
                    m.actual,
                    m.reason
                );
                lines += 1;
            }
        }
    }

    if let Some(r) = rrr {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "multiprogram candidate metrics (exhibition — not a compliant score):"
        );
        let _ = writeln!(out, "  antt:          {:.4}", r.antt);
        let _ = writeln!(out, "  stp:           {:.4}", r.stp);
        let _ = writeln!(out, "  hmean speedup: {:.4}", r.hmean_speedup);
        let _ = writeln!(out, "  fairness:      {:.4}", r.fairness);
    }

    if let Some(e) = energy {
        let _ = writeln!(out);
        let _ = writeln!(out, "energy:");
        let _ = writeln!(out, "  measured (J): {:.3}", e.energy_j);
        if let Some(ratio) = e.energy_ratio {
            let _ = writeln!(out, "  energy ratio: {ratio:.4}");
        }
        if let Some(ppw) = e.perf_per_watt {
            let _ = writeln!(out, "  perf per watt: {ppw:.4}");
        }
    }
    out
}

pub fn write_raw_report(
    score: &SuiteScore,
    rrr: Option<&MultiprogramReport>,
    energy: Option<&EnergyReport>,
    log: &RunLog,
    out: &Path,
) -> Result<()> {
    let text = render_raw_report(score, rrr, energy, log);
    std::fs::write(out, text).map_err(|e| Error::io(out, e))
}

/// JSON twin of the report.
pub fn scores_json(
    score: &SuiteScore,
    rrr: Option<&MultiprogramReport>,
    energy: Option<&EnergyReport>,
) -> String {
    let value = serde_json::json!({
        "format": "rrate-scores/1",
        "score": score,
        "rrr_exhibition": rrr,
        "energy": energy,
    });
    format!("{value:#}\n")
}

pub fn write_scores_json(
    score: &SuiteScore,
    rrr: Option<&MultiprogramReport>,
    energy: Option<&EnergyReport>,
    out: &Path,
) -> Result<()> {
    std::fs::write(out, scores_json(score, rrr, energy)).map_err(|e| Error::io(out, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{EventMismatches, HostInfo};
    use crate::metrics::{copy_stats, BenchmarkScore};
    use crate::schedule::ScheduleMode;
    use crate::validate::Mismatch;

    fn one_bench_score() -> SuiteScore {
        SuiteScore {
            suite_name: "mini".into(),
            mode: ScheduleMode::Rate,
            copies: 1,
            iterations: 3,
            benchmarks: vec![BenchmarkScore {
                bench_id: "syn.spin".into(),
                iteration_times_s: vec![1.0, 1.0, 1.0],
                selected_time_s: 1.0,
                ratio: 1.0,
                copy_stats: copy_stats(&[1.0]).unwrap(),
            }],
            overall: 1.0,
            compliant: true,
        }
    }

    fn log_meta() -> RunLog {
        RunLog {
            suite_name: "mini".into(),
            mode: ScheduleMode::Rate,
            copies: 1,
            iterations: 3,
            roster: vec!["syn.spin".into()],
            host: HostInfo {
                os: "linux test".into(),
                cpu: "test cpu".into(),
            },
            affinity_warning: false,
            events: vec![],
            validation_failures: vec![],
        }
    }

    #[test]
    fn unit_run_reports_geomean_one() {
        let text = render_raw_report(&one_bench_score(), None, None, &log_meta());
        assert!(text.contains("overall geomean: 1.000"), "{text}");
        assert!(text.contains("compliant:       yes"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let score = one_bench_score();
        let log = log_meta();
        let a = render_raw_report(&score, None, None, &log);
        let b = render_raw_report(&score, None, None, &log);
        assert_eq!(a, b);
        assert_eq!(
            scores_json(&score, None, None),
            scores_json(&score, None, None)
        );
    }

    #[test]
    fn rrr_block_is_labeled_exhibition() {
        let rrr = MultiprogramReport {
            bench_ids: vec!["a".into()],
            slowdown: vec![vec![1.0]],
            antt: 1.0,
            stp: 1.0,
            hmean_speedup: 1.0,
            fairness: 1.0,
        };
        let text = render_raw_report(&one_bench_score(), Some(&rrr), None, &log_meta());
        assert!(text.contains("exhibition — not a compliant score"));
        assert!(text.contains("antt"));
        assert!(text.contains("fairness"));
    }

    #[test]
    fn mismatch_details_rendered() {
        let mut log = log_meta();
        log.affinity_warning = true;
        log.validation_failures.push(EventMismatches {
            copy: 0,
            bench_id: "syn.spin".into(),
            workload: "w0".into(),
            iteration: 2,
            mismatches: vec![Mismatch {
                file: "out.txt".into(),
                line: 4,
                token: 1,
                expected: "1.5".into(),
                actual: "9.9".into(),
                reason: "numeric".into(),
            }],
        });
        let text = render_raw_report(&one_bench_score(), None, None, &log);
        assert!(text.contains("validation mismatches:"), "{text}");
        assert!(text.contains("out.txt line 4 token 1"));
        assert!(text.contains("pinning unavailable"));
    }
}
