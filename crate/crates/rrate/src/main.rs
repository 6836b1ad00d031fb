//! `rrate` — drive multi-copy benchmark runs (homogeneous rate or rolling
//! round-robin), re-score stored logs, and generate phase-analysis plots.
//!
//! Exit codes: 0 success and compliant, 1 ran but non-compliant, 2 usage or
//! config error, 3 execution failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rrate::bbv;
use rrate::error::Error;
use rrate::exec::{self, AffinityPolicy, RunLog};
use rrate::metrics;
use rrate::perf;
use rrate::plot;
use rrate::report;
use rrate::schedule::{self, RrrParams, ScheduleMode};
use rrate::suite;
use rrate::synth::{self, SynthKind};

const EXIT_OK: u8 = 0;
const EXIT_NONCOMPLIANT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EXEC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rrate",
    version,
    about = "Multi-copy CPU benchmark harness: homogeneous rate and rolling round-robin schedules, scoring, validation, and phase-analysis plots"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a suite under a schedule and emit log, report, scores and timeplot
    Run(RunArgs),
    /// Re-score a stored run log without re-running
    Score(ScoreArgs),
    /// Compute a BBV self-similarity matrix from a .bb trace
    Bbv(BbvArgs),
    /// Resample a counter CSV onto an instruction axis and plot it
    Perfplot(PerfplotArgs),
    /// Run one built-in synthetic workload (used as a suite benchmark)
    Synth(SynthArgs),
    /// Write the bundled synthetic mini-suite (config + golden files)
    Mksuite(MksuiteArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Suite config TOML
    #[arg(long)]
    suite: PathBuf,
    /// Schedule style: rate or rrr
    #[arg(long)]
    mode: String,
    /// Copy count M
    #[arg(long)]
    copies: u32,
    /// Start-offset stride between copies (rrr only, default 1)
    #[arg(long)]
    inc: Option<u32>,
    /// Within-copy increment through the roster (rrr only, default 1)
    #[arg(long)]
    step: Option<u32>,
    /// Timed iterations per slot
    #[arg(long, default_value_t = 3)]
    iterations: u32,
    /// Comma-separated logical core per copy, e.g. 0,1,2,3
    #[arg(long)]
    pin: Option<String>,
    /// Comma-separated benchmark ids; restricts the roster
    #[arg(long)]
    benchmarks: Option<String>,
    /// Output directory for all artifacts
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Run log CSV (with its .meta.json sidecar next to it)
    #[arg(long)]
    log: PathBuf,
    /// Suite config TOML the log was produced from
    #[arg(long)]
    suite: PathBuf,
    /// Power samples CSV (t_s,watts) to integrate over the run span
    #[arg(long)]
    power: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BbvArgs {
    /// SimPoint-style .bb trace
    #[arg(long)]
    trace: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// pgm, svg or csv
    #[arg(long, default_value = "pgm")]
    format: String,
    /// Instructions per interval (label only; .bb files carry counts)
    #[arg(long, default_value_t = bbv::DEFAULT_INTERVAL_INSTRUCTIONS)]
    interval: u64,
}

#[derive(Args)]
struct PerfplotArgs {
    /// Counter samples CSV (cumulative instructions,cycles[,slots...])
    #[arg(long)]
    samples: PathBuf,
    /// Instructions per resampled interval
    #[arg(long)]
    interval: u64,
    /// Optional .bb trace rendered above the series; interval counts must match
    #[arg(long)]
    bbv: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// spin, stream or mixed
    #[arg(long)]
    kind: String,
    /// Deterministic work units to execute
    #[arg(long)]
    units: u64,
    /// Buffer size in MiB for stream/mixed kinds
    #[arg(long, default_value_t = synth::DEFAULT_BUFFER_MIB)]
    mib: u32,
    /// Checksum output file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MksuiteArgs {
    /// Directory to create the suite in
    #[arg(long)]
    out: PathBuf,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Schedule(_) | Error::Parse { .. } | Error::Metric(_) => {
            EXIT_USAGE
        }
        Error::Exec(_) | Error::Io { .. } => EXIT_EXEC,
    }
}

fn fail(err: Error) -> u8 {
    eprintln!("rrate: {err}");
    exit_code_for(&err)
}

fn parse_pin_list(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad core id \"{tok}\" in pin list")))
        })
        .collect()
}

fn cmd_run(args: RunArgs) -> u8 {
    let mode = match args.mode.parse::<ScheduleMode>() {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    if mode == ScheduleMode::Rate && (args.inc.is_some() || args.step.is_some()) {
        return fail(Error::Config(
            "--inc/--step apply to rrr mode only".into(),
        ));
    }

    let mut cfg = match suite::load_suite(&args.suite) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(list) = &args.benchmarks {
        let ids: Vec<String> = list.split(',').map(|s| s.trim().to_string()).collect();
        cfg = match cfg.subset(&ids) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
    }

    let sched = match mode {
        ScheduleMode::Rate => schedule::make_homogeneous_schedule(cfg.len() as u32, args.copies),
        ScheduleMode::Rrr => schedule::make_rrr_schedule(
            cfg.len() as u32,
            args.copies,
            RrrParams {
                inc: args.inc.unwrap_or(1),
                step: args.step.unwrap_or(1),
            },
        ),
    };
    let sched = match sched {
        Ok(s) => s,
        Err(e) => return fail(e),
    };

    let affinity = match &args.pin {
        None => AffinityPolicy::None,
        Some(list) => match parse_pin_list(list) {
            Ok(cores) => AffinityPolicy::Pin(cores),
            Err(e) => return fail(e),
        },
    };

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        return fail(Error::io(&args.out, e));
    }
    let sched_csv = args.out.join("schedule.csv");
    if let Err(e) = std::fs::write(&sched_csv, sched.to_csv(&cfg.roster_ids())) {
        return fail(Error::io(&sched_csv, e));
    }

    let log = match exec::execute(&sched, &cfg, args.iterations, &affinity, &args.out) {
        Ok(l) => l,
        Err(e) => return fail(e),
    };
    if let Err(e) = log.write(&args.out.join("runlog.csv")) {
        return fail(e);
    }
    match emit_scoring_artifacts(&log, &cfg, None, &args.out) {
        Ok(compliant) => {
            if compliant {
                EXIT_OK
            } else {
                eprintln!("rrate: run completed with validation failures (non-compliant)");
                EXIT_NONCOMPLIANT
            }
        }
        Err(e) => fail(e),
    }
}

/// Scores a log and writes report.txt, scores.json, timeplot.svg and (for
/// round-robin logs) the slowdown matrix CSV. Returns the compliance flag.
fn emit_scoring_artifacts(
    log: &RunLog,
    cfg: &suite::SuiteConfig,
    power: Option<&[metrics::PowerSample]>,
    out: &std::path::Path,
) -> Result<bool, Error> {
    let score = metrics::score_suite(log, cfg)?;
    let rrr = if log.mode == ScheduleMode::Rrr {
        Some(metrics::rrr_metrics(log, cfg)?)
    } else {
        None
    };
    let energy = match power {
        Some(samples) => Some(metrics::energy_report(
            samples,
            log.wall_span_ns() as f64 / 1e9,
            cfg,
            score.overall,
        )?),
        None => None,
    };

    report::write_raw_report(
        &score,
        rrr.as_ref(),
        energy.as_ref(),
        log,
        &out.join("report.txt"),
    )?;
    report::write_scores_json(&score, rrr.as_ref(), energy.as_ref(), &out.join("scores.json"))?;
    plot::write_timeplot_svg(log, &out.join("timeplot.svg"))?;
    if let Some(r) = &rrr {
        let path = out.join("rrr_slowdown.csv");
        std::fs::write(&path, r.slowdown_csv(log.copies)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(score.compliant)
}

fn cmd_score(args: ScoreArgs) -> u8 {
    let log = match RunLog::read(&args.log) {
        Ok(l) => l,
        Err(e) => return fail(e),
    };
    let cfg = match suite::load_suite(&args.suite) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    // The log is authoritative for M, R and the roster; the config supplies
    // baselines. A log roster that is not a subset of the config is a
    // mismatch.
    let cfg = match cfg.subset(&log.roster) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let power = match &args.power {
        None => None,
        Some(p) => match metrics::parse_power_csv(p) {
            Ok(samples) => Some(samples),
            Err(e) => return fail(e),
        },
    };
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        return fail(Error::io(&args.out, e));
    }
    match emit_scoring_artifacts(&log, &cfg, power.as_deref(), &args.out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NONCOMPLIANT,
        Err(e) => fail(e),
    }
}

fn cmd_bbv(args: BbvArgs) -> u8 {
    let trace = match bbv::parse_bb(&args.trace, args.interval) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let normalized = match bbv::normalize_l1(&trace) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let matrix = bbv::distance_matrix(&normalized);
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        return fail(Error::io(&args.out, e));
    }
    let result = match args.format.as_str() {
        "csv" => {
            let path = args.out.join("matrix.csv");
            std::fs::write(&path, matrix.to_csv()).map_err(|e| Error::io(&path, e))
        }
        "pgm" => plot::write_recurrence_pgm(&matrix, &args.out.join("recurrence.pgm")),
        "svg" => plot::write_recurrence_svg(&matrix, &args.out.join("recurrence.svg")),
        other => Err(Error::Config(format!(
            "unknown format \"{other}\" (expected pgm, svg or csv)"
        ))),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e),
    }
}

fn cmd_perfplot(args: PerfplotArgs) -> u8 {
    let samples = match perf::parse_samples(&args.samples) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let series = match perf::resample_to_instructions(&samples, args.interval) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let matrix = match &args.bbv {
        None => None,
        Some(path) => {
            let trace = match bbv::parse_bb(path, args.interval) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            match bbv::normalize_l1(&trace) {
                Ok(n) => Some(bbv::distance_matrix(&n)),
                Err(e) => return fail(e),
            }
        }
    };
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        return fail(Error::io(&args.out, e));
    }
    let csv_path = args.out.join("perf_series.csv");
    if let Err(e) = std::fs::write(&csv_path, series.to_csv()) {
        return fail(Error::io(&csv_path, e));
    }
    match plot::write_perf_overlay_svg(&series, matrix.as_ref(), &args.out.join("perf_overlay.svg"))
    {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e),
    }
}

fn cmd_synth(args: SynthArgs) -> u8 {
    let kind = match args.kind.parse::<SynthKind>() {
        Ok(k) => k,
        Err(e) => return fail(e),
    };
    match synth::synth_main(kind, args.units, args.mib, &args.out) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e),
    }
}

fn cmd_mksuite(args: MksuiteArgs) -> u8 {
    let exe = match std::env::current_exe() {
        Ok(p) => p,
        Err(e) => return fail(Error::Exec(format!("cannot locate own executable: {e}"))),
    };
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        return fail(Error::io(&args.out, e));
    }
    match synth::write_mini_suite(&args.out, &exe) {
        Ok(path) => {
            println!("{}", path.display());
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Score(args) => cmd_score(args),
        Cmd::Bbv(args) => cmd_bbv(args),
        Cmd::Perfplot(args) => cmd_perfplot(args),
        Cmd::Synth(args) => cmd_synth(args),
        Cmd::Mksuite(args) => cmd_mksuite(args),
    };
    ExitCode::from(code)
}
