//! Schedule execution: one worker per copy drives child processes through
//! its assigned benchmark sequence, with a rendezvous barrier between
//! positions in homogeneous mode. Events are timestamped with a monotonic
//! clock and streamed to a single coordinator that assembles the run log.

use std::path::{Path, PathBuf};
use std::process::Stdio;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Barrier};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{Schedule, ScheduleMode};
use crate::suite::{BenchmarkSpec, SuiteConfig, WorkloadSpec};
use crate::validate::{compare_outputs, Mismatch, ValidationStatus};

/// One child-process execution: (copy, bench, workload, iteration).
/// Timestamps are monotonic nanoseconds from harness start and span the
/// child's lifetime only; staging and validation happen outside them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunEvent {
    pub copy: u32,
    pub bench_id: String,
    pub workload: String,
    pub iteration: u32,
    pub start_ns: u64,
    pub end_ns: u64,
    pub exit_ok: bool,
    pub validation: ValidationStatus,
    pub output_dir: PathBuf,
}

impl RunEvent {
    pub fn duration_s(&self) -> f64 {
        (self.end_ns - self.start_ns) as f64 / 1e9
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HostInfo {
    pub os: String,
    pub cpu: String,
}

impl HostInfo {
    pub fn detect() -> HostInfo {
        let os = format!("{} {}", std::env::consts::OS, std::env::consts::ARCH);
        let cpu = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|text| {
                text.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|s| s.trim().to_string())
            })
            .unwrap_or_else(|| "unknown".to_string());
        HostInfo { os, cpu }
    }
}

/// Mismatch details of one failed event, kept in the log sidecar so reports
/// can be regenerated without the run directories.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventMismatches {
    pub copy: u32,
    pub bench_id: String,
    pub workload: String,
    pub iteration: u32,
    pub mismatches: Vec<Mismatch>,
}

/// Mismatches recorded per failed event; long tails are truncated.
const MISMATCH_CAP: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunLog {
    pub suite_name: String,
    pub mode: ScheduleMode,
    pub copies: u32,
    pub iterations: u32,
    /// Roster ids in schedule order, so logs are scoreable on their own.
    pub roster: Vec<String>,
    pub host: HostInfo,
    /// Set when a pin request could not be honored; the run proceeded unpinned.
    pub affinity_warning: bool,
    pub events: Vec<RunEvent>,
    /// Mismatch details for events whose validation failed.
    #[serde(default)]
    pub validation_failures: Vec<EventMismatches>,
}

impl RunLog {
    pub fn wall_span_ns(&self) -> u64 {
        let start = self.events.iter().map(|e| e.start_ns).min().unwrap_or(0);
        let end = self.events.iter().map(|e| e.end_ns).max().unwrap_or(0);
        end - start
    }

    pub fn all_validated(&self) -> bool {
        self.events
            .iter()
            .all(|e| e.exit_ok && e.validation == ValidationStatus::Pass)
    }

    /// Barrier soundness for homogeneous logs: within an iteration, no event
    /// of a later sequence position starts before every event of the earlier
    /// position has ended.
    pub fn barrier_invariant_holds(&self) -> bool {
        if self.mode != ScheduleMode::Rate {
            return true;
        }
        let seq_of = |id: &str| self.roster.iter().position(|r| r == id);
        for iter in 1..=self.iterations {
            let mut spans: Vec<(u64, u64)> = vec![(u64::MAX, 0); self.roster.len()];
            for e in self.events.iter().filter(|e| e.iteration == iter) {
                if let Some(s) = seq_of(&e.bench_id) {
                    spans[s].0 = spans[s].0.min(e.start_ns);
                    spans[s].1 = spans[s].1.max(e.end_ns);
                }
            }
            for w in spans.windows(2) {
                let ((_, prev_end), (next_start, _)) = (w[0], w[1]);
                if next_start < prev_end {
                    return false;
                }
            }
        }
        true
    }

    const CSV_HEADER: &'static str =
        "copy,bench_id,workload,iteration,start_ns,end_ns,exit_ok,validation";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                e.copy,
                e.bench_id,
                e.workload,
                e.iteration,
                e.start_ns,
                e.end_ns,
                e.exit_ok,
                e.validation
            ));
        }
        out
    }

    fn sidecar_path(csv_path: &Path) -> PathBuf {
        let mut name = csv_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "runlog".to_string());
        name.push_str(".meta.json");
        csv_path.with_file_name(name)
    }

    /// Writes the event CSV plus a JSON sidecar carrying everything the CSV
    /// rows do not (mode, roster, host, mismatch details, ...).
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv()).map_err(|e| Error::io(csv_path, e))?;
        let sidecar = Self::sidecar_path(csv_path);
        let meta = serde_json::json!({
            "format": "rrate-runlog/1",
            "suite_name": self.suite_name,
            "mode": self.mode,
            "copies": self.copies,
            "iterations": self.iterations,
            "roster": self.roster,
            "host": { "os": self.host.os, "cpu": self.host.cpu },
            "affinity_warning": self.affinity_warning,
            "wall_span_ns": self.wall_span_ns(),
            "validation_failures": self.validation_failures,
        });
        std::fs::write(&sidecar, format!("{:#}\n", meta)).map_err(|e| Error::io(&sidecar, e))
    }

    /// Reads a log written by [`RunLog::write`]. The log, not any suite
    /// config, is authoritative for M, R and the roster.
    pub fn read(csv_path: &Path) -> Result<RunLog> {
        let file = csv_path.display().to_string();
        let text = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == Self::CSV_HEADER => {}
            _ => return Err(Error::parse(&file, 1, "missing run log header")),
        }
        let mut events = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(Error::parse(&file, lineno, "expected 8 fields"));
            }
            let num = |s: &str, what: &str| -> Result<u64> {
                s.parse()
                    .map_err(|_| Error::parse(&file, lineno, format!("bad {what} \"{s}\"")))
            };
            let validation = match f[7] {
                "pass" => ValidationStatus::Pass,
                "fail" => ValidationStatus::Fail,
                "skipped" => ValidationStatus::Skipped,
                other => {
                    return Err(Error::parse(
                        &file,
                        lineno,
                        format!("bad validation \"{other}\""),
                    ))
                }
            };
            let start_ns = num(f[4], "start_ns")?;
            let end_ns = num(f[5], "end_ns")?;
            if end_ns < start_ns {
                return Err(Error::parse(&file, lineno, "end_ns before start_ns"));
            }
            events.push(RunEvent {
                copy: num(f[0], "copy")? as u32,
                bench_id: f[1].to_string(),
                workload: f[2].to_string(),
                iteration: num(f[3], "iteration")? as u32,
                start_ns,
                end_ns,
                exit_ok: match f[6] {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::parse(
                            &file,
                            lineno,
                            format!("bad exit_ok \"{other}\""),
                        ))
                    }
                },
                validation,
                output_dir: PathBuf::new(),
            });
        }
        if events.is_empty() {
            return Err(Error::parse(&file, 1, "run log has no events"));
        }

        let sidecar = Self::sidecar_path(csv_path);
        let meta_text = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let meta: serde_json::Value = serde_json::from_str(&meta_text)
            .map_err(|e| Error::parse(sidecar.display().to_string(), 1, e.to_string()))?;
        let roster: Vec<String> = meta["roster"]
            .as_array()
            .ok_or_else(|| Error::parse(sidecar.display().to_string(), 1, "missing roster"))?
            .iter()
            .filter_map(|v| v.as_str().map(String::from))
            .collect();
        let mode: ScheduleMode = serde_json::from_value(meta["mode"].clone())
            .map_err(|e| Error::parse(sidecar.display().to_string(), 1, e.to_string()))?;
        let validation_failures: Vec<EventMismatches> = meta
            .get("validation_failures")
            .cloned()
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| Error::parse(sidecar.display().to_string(), 1, e.to_string()))?
            .unwrap_or_default();
        Ok(RunLog {
            suite_name: meta["suite_name"].as_str().unwrap_or("unknown").to_string(),
            mode,
            copies: meta["copies"].as_u64().unwrap_or(0) as u32,
            iterations: meta["iterations"].as_u64().unwrap_or(0) as u32,
            roster,
            host: HostInfo {
                os: meta["host"]["os"].as_str().unwrap_or("unknown").to_string(),
                cpu: meta["host"]["cpu"].as_str().unwrap_or("unknown").to_string(),
            },
            affinity_warning: meta["affinity_warning"].as_bool().unwrap_or(false),
            events,
            validation_failures,
        })
    }
}

/// Copy-to-core placement. Pinning is best effort: an unsupported request is
/// recorded in the log and the run proceeds unpinned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffinityPolicy {
    None,
    /// core_of_copy[c] is the logical core for copy c.
    Pin(Vec<usize>),
}

impl AffinityPolicy {
    fn validate(&self, copies: u32) -> Result<()> {
        if let AffinityPolicy::Pin(cores) = self {
            if cores.len() != copies as usize {
                return Err(Error::Config(format!(
                    "pin list has {} cores for {} copies",
                    cores.len(),
                    copies
                )));
            }
            let mut sorted = cores.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cores.len() {
                return Err(Error::Config("pin list repeats a core".into()));
            }
        }
        Ok(())
    }
}

#[cfg(target_os = "linux")]
fn pin_current_thread(core: usize) -> bool {
    // Children inherit the spawning thread's mask, so pinning the worker
    // covers every process it forks.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_ZERO(&mut set);
        libc::CPU_SET(core, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_current_thread(_core: usize) -> bool {
    false
}

/// Searches PATH when the command has no path separator; otherwise checks
/// the (already resolved) path directly.
pub fn resolve_executable(cmd: &str) -> Result<PathBuf> {
    let p = Path::new(cmd);
    if cmd.contains('/') {
        if p.is_file() {
            return Ok(p.to_path_buf());
        }
        return Err(Error::Exec(format!("executable {cmd} not found")));
    }
    if let Some(paths) = std::env::var_os("PATH") {
        for dir in std::env::split_paths(&paths) {
            let cand = dir.join(cmd);
            if cand.is_file() {
                return Ok(cand);
            }
        }
    }
    Err(Error::Exec(format!("executable \"{cmd}\" not found in PATH")))
}

fn run_dir(out_root: &Path, copy: u32, bench: &str, workload: &str, iteration: u32) -> PathBuf {
    out_root
        .join("runs")
        .join(format!("c{copy:02}"))
        .join(bench)
        .join(workload)
        .join(format!("i{iteration}"))
}

fn stage_run_dir(dir: &Path, workload: &WorkloadSpec) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for input in &workload.input_files {
        let name = input
            .file_name()
            .ok_or_else(|| Error::Exec(format!("input file {} has no name", input.display())))?;
        let dest = dir.join(name);
        std::fs::copy(input, &dest).map_err(|e| Error::io(input, e))?;
    }
    Ok(())
}

fn argv_for(bench: &BenchmarkSpec, workload: &WorkloadSpec) -> Vec<String> {
    let mut argv: Vec<String> = bench
        .command
        .iter()
        .map(|tok| tok.replace("{workload}", &workload.name))
        .collect();
    argv.extend(workload.args.iter().cloned());
    argv
}

/// Runs one (copy, benchmark, workload, iteration) in an already staged
/// directory: spawn, monotonic timing over the child's lifetime, output
/// capture. Never fails: spawn problems come back as an event with
/// `exit_ok = false`. Validation happens in the caller.
pub fn run_one(
    copy: u32,
    bench: &BenchmarkSpec,
    workload: &WorkloadSpec,
    iteration: u32,
    dir: &Path,
    origin: Instant,
) -> RunEvent {
    let argv = argv_for(bench, workload);
    let mut event = RunEvent {
        copy,
        bench_id: bench.id.clone(),
        workload: workload.name.clone(),
        iteration,
        start_ns: 0,
        end_ns: 0,
        exit_ok: false,
        validation: ValidationStatus::Skipped,
        output_dir: dir.to_path_buf(),
    };

    let stdio = |name: &str| -> Stdio {
        match std::fs::File::create(dir.join(name)) {
            Ok(f) => Stdio::from(f),
            Err(_) => Stdio::null(),
        }
    };

    let mut cmd = std::process::Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(stdio("stdout.log"))
        .stderr(stdio("stderr.log"));

    event.start_ns = origin.elapsed().as_nanos() as u64;
    match cmd.spawn() {
        Ok(mut child) => {
            let status = child.wait();
            event.end_ns = origin.elapsed().as_nanos() as u64;
            event.exit_ok = matches!(status, Ok(s) if s.success());
        }
        Err(_) => {
            event.end_ns = origin.elapsed().as_nanos() as u64;
        }
    }
    event
}

/// Executes a schedule against a suite config: R iterations of every slot,
/// with per-copy workers, optional pinning, and full output validation. One
/// failing child never aborts the others.
pub fn execute(
    sched: &Schedule,
    cfg: &SuiteConfig,
    iterations: u32,
    affinity: &AffinityPolicy,
    out_root: &Path,
) -> Result<RunLog> {
    if sched.roster_len as usize != cfg.len() {
        return Err(Error::Exec(format!(
            "schedule is for {} benchmarks but suite has {}",
            sched.roster_len,
            cfg.len()
        )));
    }
    if iterations == 0 {
        return Err(Error::Exec("iterations must be at least 1".into()));
    }
    affinity.validate(sched.copies)?;

    // Fail fast on unresolvable commands, before any spawn or staging.
    for bench in &cfg.roster {
        resolve_executable(&bench.command[0])?;
    }

    std::fs::create_dir_all(out_root).map_err(|e| Error::io(out_root, e))?;

    // Stage every run directory up front so mid-run staging I/O cannot
    // desynchronize the barrier.
    for copy in 0..sched.copies {
        for seq in 0..sched.roster_len {
            let bench = &cfg.roster[sched.slot(copy, seq).bench_index as usize];
            for workload in &bench.workloads {
                for iter in 1..=iterations {
                    let dir = run_dir(out_root, copy, &bench.id, &workload.name, iter);
                    stage_run_dir(&dir, workload)?;
                }
            }
        }
    }

    let origin = Instant::now();
    let barrier = Barrier::new(sched.copies as usize);
    let affinity_warning = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(RunEvent, Option<EventMismatches>)>();

    std::thread::scope(|scope| {
        for copy in 0..sched.copies {
            let tx = tx.clone();
            let barrier = &barrier;
            let affinity_warning = &affinity_warning;
            scope.spawn(move || {
                if let AffinityPolicy::Pin(cores) = affinity {
                    if !pin_current_thread(cores[copy as usize]) {
                        affinity_warning.store(true, Ordering::Relaxed);
                    }
                }
                let run_slot = |seq: u32, iter: u32| {
                    let bench = &cfg.roster[sched.slot(copy, seq).bench_index as usize];
                    for workload in &bench.workloads {
                        let dir = run_dir(out_root, copy, &bench.id, &workload.name, iter);
                        let mut event = run_one(copy, bench, workload, iter, &dir, origin);
                        let mut details = None;
                        if event.exit_ok {
                            let report =
                                compare_outputs(&dir, &workload.golden_outputs, &bench.validation);
                            event.validation = report.status();
                            if !report.passed() {
                                // machine-readable mismatch list next to the outputs
                                if let Ok(json) = serde_json::to_string_pretty(&report) {
                                    let _ = std::fs::write(dir.join("validation.json"), json);
                                }
                                let mut mismatches = report.mismatches;
                                mismatches.truncate(MISMATCH_CAP);
                                details = Some(EventMismatches {
                                    copy,
                                    bench_id: bench.id.clone(),
                                    workload: workload.name.clone(),
                                    iteration: iter,
                                    mismatches,
                                });
                            }
                        }
                        let _ = tx.send((event, details));
                    }
                };
                match sched.mode {
                    ScheduleMode::Rate => {
                        // R phases per position; all copies rendezvous after
                        // each phase.
                        for seq in 0..sched.roster_len {
                            for iter in 1..=iterations {
                                run_slot(seq, iter);
                                barrier.wait();
                            }
                        }
                    }
                    ScheduleMode::Rrr => {
                        // R full rotations, free running; the start offset of
                        // every rotation is the copy's own.
                        for iter in 1..=iterations {
                            for seq in 0..sched.roster_len {
                                run_slot(seq, iter);
                            }
                        }
                    }
                }
            });
        }
        drop(tx);
    });

    let mut events = Vec::new();
    let mut validation_failures = Vec::new();
    for (event, details) in rx {
        events.push(event);
        validation_failures.extend(details);
    }
    events.sort_by(|a, b| {
        (a.copy, a.iteration, a.start_ns, &a.bench_id, &a.workload).cmp(&(
            b.copy,
            b.iteration,
            b.start_ns,
            &b.bench_id,
            &b.workload,
        ))
    });
    validation_failures.sort_by(|a, b| {
        (a.copy, &a.bench_id, &a.workload, a.iteration).cmp(&(
            b.copy,
            &b.bench_id,
            &b.workload,
            b.iteration,
        ))
    });

    Ok(RunLog {
        suite_name: cfg.suite_name.clone(),
        mode: sched.mode,
        copies: sched.copies,
        iterations,
        roster: cfg.roster_ids(),
        host: HostInfo::detect(),
        affinity_warning: affinity_warning.load(Ordering::Relaxed),
        events,
        validation_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{make_homogeneous_schedule, make_rrr_schedule, RrrParams};
    use crate::suite::{GoldenOutput, ToleranceRule};

    /// Tiny suite whose benchmarks are shell one-liners; enough to exercise
    /// staging, capture, validation and scheduling without the synth binary.
    fn script_suite(dir: &Path, n: usize) -> SuiteConfig {
        let mut roster = Vec::new();
        for i in 0..n {
            let golden = dir.join(format!("golden_{i}.txt"));
            std::fs::write(&golden, format!("bench {i}\n")).unwrap();
            roster.push(BenchmarkSpec {
                id: format!("sh.b{i}"),
                command: vec![
                    "/bin/sh".into(),
                    "-c".into(),
                    format!("echo 'bench {i}' > out.txt"),
                ],
                reference_time_s: 0.01,
                solo_time_s: None,
                reference_energy_j: None,
                validation: ToleranceRule::exact(),
                workloads: vec![WorkloadSpec {
                    name: "w0".into(),
                    args: vec![],
                    input_files: vec![],
                    golden_outputs: vec![GoldenOutput {
                        file: "out.txt".into(),
                        golden,
                    }],
                }],
            });
        }
        SuiteConfig {
            suite_name: "scripts".into(),
            roster,
        }
    }

    #[test]
    fn homogeneous_run_produces_expected_events() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = script_suite(dir.path(), 2);
        let sched = make_homogeneous_schedule(2, 2).unwrap();
        let log = execute(
            &sched,
            &cfg,
            1,
            &AffinityPolicy::None,
            &dir.path().join("out"),
        )
        .unwrap();
        assert_eq!(log.events.len(), 4);
        assert!(log.all_validated());
        assert!(log.barrier_invariant_holds());
    }

    #[test]
    fn rrr_rotation_offsets_first_events() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = script_suite(dir.path(), 2);
        let sched = make_rrr_schedule(2, 2, RrrParams::default()).unwrap();
        let log = execute(
            &sched,
            &cfg,
            1,
            &AffinityPolicy::None,
            &dir.path().join("out"),
        )
        .unwrap();
        assert_eq!(log.events.len(), 4);
        for copy in 0..2u32 {
            let first = log
                .events
                .iter()
                .filter(|e| e.copy == copy)
                .min_by_key(|e| e.start_ns)
                .unwrap();
            assert_eq!(first.bench_id, format!("sh.b{copy}"));
        }
    }

    #[test]
    fn corrupted_output_fails_validation_but_run_completes() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = script_suite(dir.path(), 2);
        // second benchmark writes the wrong content
        cfg.roster[1].command = vec![
            "/bin/sh".into(),
            "-c".into(),
            "echo corrupted > out.txt".into(),
        ];
        let sched = make_homogeneous_schedule(2, 1).unwrap();
        let log = execute(
            &sched,
            &cfg,
            1,
            &AffinityPolicy::None,
            &dir.path().join("out"),
        )
        .unwrap();
        assert_eq!(log.events.len(), 2);
        let by_id = |id: &str| log.events.iter().find(|e| e.bench_id == id).unwrap();
        assert_eq!(by_id("sh.b0").validation, ValidationStatus::Pass);
        assert_eq!(by_id("sh.b1").validation, ValidationStatus::Fail);
        assert!(!log.all_validated());
        // mismatch details captured for the report and next to the outputs
        assert_eq!(log.validation_failures.len(), 1);
        assert_eq!(log.validation_failures[0].bench_id, "sh.b1");
        assert!(by_id("sh.b1").output_dir.join("validation.json").is_file());
    }

    #[test]
    fn crash_isolation() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = script_suite(dir.path(), 2);
        cfg.roster[1].command = vec!["/bin/sh".into(), "-c".into(), "exit 3".into()];
        let sched = make_rrr_schedule(2, 2, RrrParams::default()).unwrap();
        let log = execute(
            &sched,
            &cfg,
            1,
            &AffinityPolicy::None,
            &dir.path().join("out"),
        )
        .unwrap();
        assert_eq!(log.events.len(), 4);
        for e in &log.events {
            if e.bench_id == "sh.b0" {
                assert!(e.exit_ok);
                assert_eq!(e.validation, ValidationStatus::Pass);
            } else {
                assert!(!e.exit_ok);
                assert_eq!(e.validation, ValidationStatus::Skipped);
            }
        }
    }

    #[test]
    fn unresolvable_executable_fails_before_any_spawn() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = script_suite(dir.path(), 1);
        cfg.roster[0].command[0] = "/no/such/binary".into();
        let sched = make_homogeneous_schedule(1, 1).unwrap();
        let out = dir.path().join("out");
        let err = execute(&sched, &cfg, 1, &AffinityPolicy::None, &out).unwrap_err();
        assert!(matches!(err, Error::Exec(_)));
        assert!(!out.join("runs").exists(), "nothing should be staged");
    }

    #[test]
    fn input_files_are_staged() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("data.txt");
        std::fs::write(&input, "payload\n").unwrap();
        let golden = dir.path().join("golden.txt");
        std::fs::write(&golden, "payload\n").unwrap();
        let cfg = SuiteConfig {
            suite_name: "staged".into(),
            roster: vec![BenchmarkSpec {
                id: "sh.copy".into(),
                command: vec!["/bin/sh".into(), "-c".into(), "cat data.txt > out.txt".into()],
                reference_time_s: 0.01,
                solo_time_s: None,
                reference_energy_j: None,
                validation: ToleranceRule::exact(),
                workloads: vec![WorkloadSpec {
                    name: "w0".into(),
                    args: vec![],
                    input_files: vec![input],
                    golden_outputs: vec![GoldenOutput {
                        file: "out.txt".into(),
                        golden,
                    }],
                }],
            }],
        };
        let sched = make_homogeneous_schedule(1, 1).unwrap();
        let log = execute(
            &sched,
            &cfg,
            2,
            &AffinityPolicy::None,
            &dir.path().join("out"),
        )
        .unwrap();
        assert_eq!(log.events.len(), 2);
        assert!(log.all_validated());
    }

    #[test]
    fn run_twice_determinism_of_outputs() {
        // The same stream workload must leave byte-identical checksum files.
        let content_a = crate::synth::run_synth(crate::synth::SynthKind::Stream, 5_000, 1).unwrap();
        let content_b = crate::synth::run_synth(crate::synth::SynthKind::Stream, 5_000, 1).unwrap();
        assert_eq!(content_a, content_b);
    }

    #[test]
    fn log_round_trips_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = script_suite(dir.path(), 2);
        let sched = make_rrr_schedule(2, 2, RrrParams::default()).unwrap();
        let log = execute(
            &sched,
            &cfg,
            2,
            &AffinityPolicy::None,
            &dir.path().join("out"),
        )
        .unwrap();
        let csv = dir.path().join("runlog.csv");
        log.write(&csv).unwrap();
        let reread = RunLog::read(&csv).unwrap();
        assert_eq!(reread.events.len(), log.events.len());
        assert_eq!(reread.mode, log.mode);
        assert_eq!(reread.roster, log.roster);
        assert_eq!(reread.copies, 2);
        assert_eq!(reread.iterations, 2);
        for (a, b) in reread.events.iter().zip(&log.events) {
            assert_eq!(a.start_ns, b.start_ns);
            assert_eq!(a.end_ns, b.end_ns);
            assert_eq!(a.bench_id, b.bench_id);
            assert_eq!(a.validation, b.validation);
        }
    }

    #[test]
    fn truncated_log_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("runlog.csv");
        std::fs::write(&csv, "copy,bench_id,workload\n0,a,w0\n").unwrap();
        assert!(RunLog::read(&csv).is_err());
    }

    #[test]
    fn pin_list_must_cover_copies_with_distinct_cores() {
        assert!(AffinityPolicy::Pin(vec![0, 1]).validate(2).is_ok());
        assert!(AffinityPolicy::Pin(vec![0]).validate(2).is_err());
        assert!(AffinityPolicy::Pin(vec![0, 0]).validate(2).is_err());
    }
}
