//! Built-in synthetic benchmarks: a deterministic, host-independent quantum
//! of work per invocation. Each run writes a small checksum file; identical
//! parameters produce byte-identical files on any machine, which makes exact
//! golden validation possible without shipping a workload corpus.
//!
//! Three kinds:
//! - `spin`: integer mixing plus IEEE f64 accumulation, no memory pressure.
//! - `stream`: strided read-modify-write touches over a fixed buffer.
//! - `mixed`: alternating spin and stream phases.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::suite::{
    BenchmarkSpec, GoldenOutput, SuiteConfig, ToleranceRule, WorkloadSpec,
};

pub const SYNTH_FORMAT_TAG: &str = "# rrate-synth/1";
pub const DEFAULT_BUFFER_MIB: u32 = 8;

const MUL: u64 = 6364136223846793005;
const ADD: u64 = 1442695040888963407;
const SEED: u64 = 0x243F_6A88_85A3_08D3;
const INV_2_53: f64 = 1.110_223_024_625_156_5e-16; // 2^-53

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Spin,
    Stream,
    Mixed,
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthKind::Spin => write!(f, "spin"),
            SynthKind::Stream => write!(f, "stream"),
            SynthKind::Mixed => write!(f, "mixed"),
        }
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(SynthKind::Spin),
            "stream" => Ok(SynthKind::Stream),
            "mixed" => Ok(SynthKind::Mixed),
            other => Err(Error::Config(format!(
                "unknown synthetic kind \"{other}\" (expected spin, stream or mixed)"
            ))),
        }
    }
}

struct SpinState {
    x: u64,
    acc: f64,
}

fn spin_units(state: &mut SpinState, units: u64) {
    for _ in 0..units {
        state.x = state.x.wrapping_mul(MUL).wrapping_add(ADD);
        state.x ^= state.x >> 31;
        state.acc += (state.x >> 11) as f64 * INV_2_53;
        if state.acc >= 1.0 {
            state.acc -= 1.0;
        }
    }
}

struct StreamState {
    buf: Vec<u64>,
    idx: usize,
    x: u64,
}

impl StreamState {
    fn new(buffer_mib: u32) -> Self {
        let len = (buffer_mib as usize * 1024 * 1024) / 8;
        let mut buf = vec![0u64; len];
        for (i, v) in buf.iter_mut().enumerate() {
            *v = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
        StreamState { buf, idx: 0, x: SEED }
    }

    fn touch_units(&mut self, units: u64) {
        // Large prime stride defeats the hardware prefetcher while staying
        // fully deterministic.
        const STRIDE: usize = 1_000_003;
        let len = self.buf.len();
        for _ in 0..units {
            self.idx = (self.idx + STRIDE) % len;
            let v = self.buf[self.idx].rotate_left(7) ^ self.x;
            self.buf[self.idx] = v;
            self.x = self.x.wrapping_add(v | 1);
        }
    }

    fn checksum(&self) -> u64 {
        let mut h = self.x ^ self.idx as u64;
        let mut i = 0;
        while i < self.buf.len() {
            h = h.rotate_left(13) ^ self.buf[i];
            i += 4096;
        }
        h
    }
}

/// Runs `units` deterministic operations and renders the checksum file
/// content. Rejects zero units.
pub fn run_synth(kind: SynthKind, units: u64, buffer_mib: u32) -> Result<String> {
    if units == 0 {
        return Err(Error::Config("work units must be positive".into()));
    }
    if buffer_mib == 0 {
        return Err(Error::Config("buffer size must be positive".into()));
    }
    let mut out = String::new();
    out.push_str(SYNTH_FORMAT_TAG);
    out.push('\n');
    out.push_str(&format!("kind {kind}\nunits {units}\n"));
    match kind {
        SynthKind::Spin => {
            let mut s = SpinState { x: SEED, acc: 0.0 };
            spin_units(&mut s, units);
            out.push_str(&format!("checksum {:016x}\n", s.x ^ s.acc.to_bits()));
            out.push_str(&format!("facc {}\n", s.acc));
        }
        SynthKind::Stream => {
            let mut s = StreamState::new(buffer_mib);
            s.touch_units(units);
            out.push_str(&format!("checksum {:016x}\n", s.checksum()));
        }
        SynthKind::Mixed => {
            // Eight alternating phases, spin first; stream gets a quarter of
            // the units since a touch costs several times a spin iteration.
            let mut spin = SpinState { x: SEED, acc: 0.0 };
            let mut stream = StreamState::new(buffer_mib);
            let phases = 8u64;
            let per_phase = (units / phases).max(1);
            for p in 0..phases {
                if p % 2 == 0 {
                    spin_units(&mut spin, per_phase);
                } else {
                    stream.touch_units(per_phase / 4 + 1);
                }
            }
            let checksum = spin.x ^ spin.acc.to_bits() ^ stream.checksum();
            out.push_str(&format!("checksum {checksum:016x}\n"));
            out.push_str(&format!("facc {}\n", spin.acc));
        }
    }
    Ok(out)
}

/// CLI entry point: run one synthetic workload and write its checksum file.
pub fn synth_main(kind: SynthKind, units: u64, buffer_mib: u32, out_file: &Path) -> Result<()> {
    let content = run_synth(kind, units, buffer_mib)?;
    std::fs::write(out_file, content).map_err(|e| Error::io(out_file, e))
}

struct MiniBench {
    id: &'static str,
    kind: SynthKind,
    reference_time_s: f64,
    solo_time_s: Option<f64>,
    reference_energy_j: Option<f64>,
    numeric: bool,
    workloads: &'static [(&'static str, u64)],
}

const MINI_SUITE: &[MiniBench] = &[
    MiniBench {
        id: "syn.spin",
        kind: SynthKind::Spin,
        reference_time_s: 0.25,
        solo_time_s: None,
        reference_energy_j: None,
        numeric: false,
        workloads: &[("w0", 4_000_000), ("w1", 6_000_000)],
    },
    MiniBench {
        id: "syn.stream",
        kind: SynthKind::Stream,
        reference_time_s: 0.12,
        solo_time_s: Some(0.11),
        reference_energy_j: Some(9.0),
        numeric: false,
        workloads: &[("w0", 1_200_000)],
    },
    MiniBench {
        id: "syn.mixed",
        kind: SynthKind::Mixed,
        reference_time_s: 0.16,
        solo_time_s: None,
        reference_energy_j: Some(12.0),
        numeric: true,
        workloads: &[("w0", 5_000_000)],
    },
    MiniBench {
        id: "syn.spinhi",
        kind: SynthKind::Spin,
        reference_time_s: 0.5,
        solo_time_s: Some(0.48),
        reference_energy_j: None,
        numeric: false,
        workloads: &[("w0", 12_000_000)],
    },
];

/// Materializes the bundled four-benchmark synthetic mini-suite under `dir`:
/// golden checksum files plus a suite TOML whose commands invoke
/// `harness_exe synth ...`. Returns the config path.
pub fn write_mini_suite(dir: &Path, harness_exe: &Path) -> Result<PathBuf> {
    let exe = harness_exe.to_string_lossy().into_owned();
    let mut roster = Vec::new();
    for mb in MINI_SUITE {
        let mut workloads = Vec::new();
        for (wname, units) in mb.workloads {
            let out_name = format!("{}.{}.out", mb.id, wname);
            let golden_rel = PathBuf::from(format!("golden/{}/{}/{}", mb.id, wname, out_name));
            let golden_abs = dir.join(&golden_rel);
            if let Some(parent) = golden_abs.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            let content = run_synth(mb.kind, *units, DEFAULT_BUFFER_MIB)?;
            std::fs::write(&golden_abs, content).map_err(|e| Error::io(&golden_abs, e))?;
            workloads.push(WorkloadSpec {
                name: (*wname).to_string(),
                args: vec![
                    "--units".into(),
                    units.to_string(),
                    "--out".into(),
                    out_name,
                ],
                input_files: vec![],
                golden_outputs: vec![GoldenOutput {
                    file: format!("{}.{}.out", mb.id, wname),
                    golden: golden_rel,
                }],
            });
        }
        let mut validation = if mb.numeric {
            ToleranceRule::numeric(0.0, 1e-9)
        } else {
            ToleranceRule::exact()
        };
        validation.skip_line_prefixes = vec!["#".to_string()];
        roster.push(BenchmarkSpec {
            id: mb.id.to_string(),
            command: vec![
                exe.clone(),
                "synth".into(),
                "--kind".into(),
                mb.kind.to_string(),
            ],
            reference_time_s: mb.reference_time_s,
            solo_time_s: mb.solo_time_s,
            reference_energy_j: mb.reference_energy_j,
            validation,
            workloads,
        });
    }
    let cfg = SuiteConfig {
        suite_name: "synmini".to_string(),
        roster,
    };
    let path = dir.join("synth-suite.toml");
    std::fs::write(&path, cfg.to_toml_string()?).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_units_rejected() {
        assert!(run_synth(SynthKind::Spin, 0, 8).is_err());
    }

    #[test]
    fn output_is_reproducible() {
        for kind in [SynthKind::Spin, SynthKind::Stream, SynthKind::Mixed] {
            let a = run_synth(kind, 10_000, 1).unwrap();
            let b = run_synth(kind, 10_000, 1).unwrap();
            assert_eq!(a, b, "{kind} output must be deterministic");
            assert!(a.starts_with(SYNTH_FORMAT_TAG));
        }
    }

    #[test]
    fn different_units_change_checksum() {
        let a = run_synth(SynthKind::Spin, 10_000, 1).unwrap();
        let b = run_synth(SynthKind::Spin, 20_000, 1).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn spin_runtime_scales_with_units() {
        // Double the units, roughly double the time. Generous 25% band and
        // median-of-three to ride out scheduler noise.
        let units = 6_000_000u64;
        let time = |w: u64| {
            let mut samples: Vec<f64> = (0..3)
                .map(|_| {
                    let t = std::time::Instant::now();
                    run_synth(SynthKind::Spin, w, 1).unwrap();
                    t.elapsed().as_secs_f64()
                })
                .collect();
            samples.sort_by(f64::total_cmp);
            samples[1]
        };
        let t1 = time(units);
        let t2 = time(units * 2);
        let ratio = t2 / t1;
        assert!(
            (1.5..=2.5).contains(&ratio),
            "2x units took {ratio:.2}x the time (t1={t1:.4}s t2={t2:.4}s)"
        );
    }

    #[test]
    fn mini_suite_loads_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_mini_suite(dir.path(), Path::new("/bin/true")).unwrap();
        let cfg = crate::suite::load_suite(&cfg_path).unwrap();
        assert_eq!(cfg.len(), 4);
        assert_eq!(cfg.suite_name, "synmini");
        // spin has two workloads, the others one
        assert_eq!(cfg.benchmark("syn.spin").unwrap().workloads.len(), 2);
    }
}
