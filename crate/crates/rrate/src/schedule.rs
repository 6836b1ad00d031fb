//! Deterministic schedule construction for the two multi-copy run styles:
//! homogeneous rate (all copies run the same benchmark between barriers) and
//! rolling round-robin rate (each copy walks the whole roster from a rotated
//! start offset, with no barriers).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    /// Homogeneous multi-copy rate with a barrier after every position.
    Rate,
    /// Rolling round-robin rate; free-running copies.
    Rrr,
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleMode::Rate => write!(f, "rate"),
            ScheduleMode::Rrr => write!(f, "rrr"),
        }
    }
}

impl FromStr for ScheduleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rate" => Ok(ScheduleMode::Rate),
            "rrr" => Ok(ScheduleMode::Rrr),
            other => Err(Error::Schedule(format!(
                "unknown mode \"{other}\" (expected rate or rrr)"
            ))),
        }
    }
}

/// One cell of a schedule: copy `copy` runs roster entry `bench_index` as its
/// `seq`-th benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleSlot {
    pub copy: u32,
    pub seq: u32,
    pub bench_index: u32,
}

/// Rotation knobs for round-robin schedules.
///
/// `inc` is the start-offset stride between adjacent copies; `step` is the
/// within-copy increment through the roster. Copy c's seq-s slot is
/// `(c*inc + s*step) mod N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RrrParams {
    pub inc: u32,
    pub step: u32,
}

impl Default for RrrParams {
    fn default() -> Self {
        RrrParams { inc: 1, step: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub mode: ScheduleMode,
    /// Copy count M.
    pub copies: u32,
    /// Roster size N.
    pub roster_len: u32,
    /// M*N slots, copy-major then seq.
    pub slots: Vec<ScheduleSlot>,
    /// Whether workers rendezvous after each sequence position.
    pub barrier_after_seq: bool,
}

impl Schedule {
    pub fn slot(&self, copy: u32, seq: u32) -> ScheduleSlot {
        self.slots[(copy * self.roster_len + seq) as usize]
    }

    /// The bench indices copy `copy` visits, in order.
    pub fn copy_sequence(&self, copy: u32) -> Vec<u32> {
        (0..self.roster_len)
            .map(|s| self.slot(copy, s).bench_index)
            .collect()
    }

    /// CSV rendering (copy, seq, bench_id) for inspection and plotting.
    pub fn to_csv(&self, roster_ids: &[String]) -> String {
        let mut out = String::from("copy,seq,bench_id\n");
        for slot in &self.slots {
            out.push_str(&format!(
                "{},{},{}\n",
                slot.copy, slot.seq, roster_ids[slot.bench_index as usize]
            ));
        }
        out
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn check_dims(roster_len: u32, copies: u32) -> Result<()> {
    if roster_len == 0 {
        return Err(Error::Schedule("roster size must be at least 1".into()));
    }
    if copies == 0 {
        return Err(Error::Schedule("copy count must be at least 1".into()));
    }
    Ok(())
}

/// Homogeneous rate schedule: at sequence position s every copy runs roster
/// entry s, with a barrier between positions.
pub fn make_homogeneous_schedule(roster_len: u32, copies: u32) -> Result<Schedule> {
    check_dims(roster_len, copies)?;
    let mut slots = Vec::with_capacity((roster_len * copies) as usize);
    for copy in 0..copies {
        for seq in 0..roster_len {
            slots.push(ScheduleSlot {
                copy,
                seq,
                bench_index: seq,
            });
        }
    }
    Ok(Schedule {
        mode: ScheduleMode::Rate,
        copies,
        roster_len,
        slots,
        barrier_after_seq: true,
    })
}

/// Round-robin schedule: copy c's sequence position s holds roster entry
/// `(c*inc + s*step) mod N`. Requires gcd(step, N) = 1 so every copy visits
/// every benchmark exactly once.
pub fn make_rrr_schedule(roster_len: u32, copies: u32, params: RrrParams) -> Result<Schedule> {
    check_dims(roster_len, copies)?;
    if params.inc == 0 || params.step == 0 {
        return Err(Error::Schedule("inc and step must be positive".into()));
    }
    let g = gcd(params.step % roster_len.max(1), roster_len);
    let g = if g == 0 { roster_len } else { g };
    if g != 1 {
        return Err(Error::Schedule(format!(
            "step {} shares factor {} with roster size {}: each copy would visit only {} of {} benchmarks",
            params.step,
            g,
            roster_len,
            roster_len / g,
            roster_len
        )));
    }
    let n = roster_len as u64;
    let mut slots = Vec::with_capacity((roster_len * copies) as usize);
    for copy in 0..copies {
        for seq in 0..roster_len {
            let idx = (copy as u64 * params.inc as u64 + seq as u64 * params.step as u64) % n;
            slots.push(ScheduleSlot {
                copy,
                seq,
                bench_index: idx as u32,
            });
        }
    }
    Ok(Schedule {
        mode: ScheduleMode::Rrr,
        copies,
        roster_len,
        slots,
        barrier_after_seq: false,
    })
}

/// Per-sequence-position count of distinct bench indices across copies: 1
/// everywhere for homogeneous schedules, up to N for round-robin ones.
pub fn schedule_diversity(sched: &Schedule) -> Vec<usize> {
    (0..sched.roster_len)
        .map(|seq| {
            let mut seen = vec![false; sched.roster_len as usize];
            let mut count = 0;
            for copy in 0..sched.copies {
                let b = sched.slot(copy, seq).bench_index as usize;
                if !seen[b] {
                    seen[b] = true;
                    count += 1;
                }
            }
            count
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_definition() {
        let s = make_homogeneous_schedule(2, 2).unwrap();
        assert_eq!(s.copy_sequence(0), vec![0, 1]);
        assert_eq!(s.copy_sequence(1), vec![0, 1]);
        assert!(s.barrier_after_seq);
        assert_eq!(s.slots.len(), 4);
    }

    #[test]
    fn homogeneous_degenerate_roster() {
        let s = make_homogeneous_schedule(1, 4).unwrap();
        for c in 0..4 {
            assert_eq!(s.copy_sequence(c), vec![0]);
        }
    }

    #[test]
    fn homogeneous_refrate_shape() {
        // 14 benchmarks on 48 copies: per position all copies share one entry.
        let s = make_homogeneous_schedule(14, 48).unwrap();
        assert_eq!(s.slots.len(), 672);
        assert_eq!(schedule_diversity(&s), vec![1; 14]);
    }

    #[test]
    fn rrr_worked_rotation() {
        // Copy 0 starts the roster at entry 0, copy 1 at entry 1, and so on.
        let s = make_rrr_schedule(3, 3, RrrParams { inc: 1, step: 1 }).unwrap();
        assert_eq!(s.copy_sequence(0), vec![0, 1, 2]);
        assert_eq!(s.copy_sequence(1), vec![1, 2, 0]);
        assert_eq!(s.copy_sequence(2), vec![2, 0, 1]);
        assert!(!s.barrier_after_seq);
    }

    #[test]
    fn rrr_rejects_step_sharing_factor() {
        let err = make_rrr_schedule(4, 2, RrrParams { inc: 1, step: 2 }).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("factor 2"), "{msg}");
    }

    #[test]
    fn rrr_start_offsets_match_enumeration() {
        // Independent enumeration of (5c mod 14) for c in 0..48.
        let s = make_rrr_schedule(14, 48, RrrParams { inc: 5, step: 1 }).unwrap();
        let mut expected = Vec::new();
        let mut acc: u32 = 0;
        for _ in 0..48 {
            expected.push(acc);
            acc += 5;
            while acc >= 14 {
                acc -= 14;
            }
        }
        let starts: Vec<u32> = (0..48).map(|c| s.slot(c, 0).bench_index).collect();
        assert_eq!(starts, expected);
        // copies 0 and 14 wrap to the same start: 5*14 mod 14 = 0
        assert_eq!(starts[0], starts[14]);
    }

    #[test]
    fn diversity_histograms() {
        let homog = make_homogeneous_schedule(2, 2).unwrap();
        assert_eq!(schedule_diversity(&homog), vec![1, 1]);

        let rrr = make_rrr_schedule(3, 3, RrrParams::default()).unwrap();
        assert_eq!(schedule_diversity(&rrr), vec![3, 3, 3]);

        let single = make_rrr_schedule(3, 1, RrrParams::default()).unwrap();
        assert_eq!(schedule_diversity(&single), vec![1, 1, 1]);
    }

    #[test]
    fn full_diversity_when_inc_coprime_and_enough_copies() {
        // with gcd(inc, N) = 1 and M >= N every position sees all N entries
        for (n, m, inc) in [(5u32, 5u32, 2u32), (7, 9, 3), (4, 12, 1)] {
            let s = make_rrr_schedule(n, m, RrrParams { inc, step: 1 }).unwrap();
            assert_eq!(schedule_diversity(&s), vec![n as usize; n as usize]);
        }
    }

    #[test]
    fn latin_rectangle_property() {
        for (n, m, inc, step) in [(5u32, 7u32, 2u32, 3u32), (6, 6, 5, 5), (9, 4, 3, 2)] {
            let s = make_rrr_schedule(n, m, RrrParams { inc, step }).unwrap();
            let mut per_bench = vec![0u32; n as usize];
            for c in 0..m {
                let mut seen = vec![false; n as usize];
                for b in s.copy_sequence(c) {
                    assert!(!seen[b as usize], "copy {c} repeats bench {b}");
                    seen[b as usize] = true;
                    per_bench[b as usize] += 1;
                }
            }
            assert!(per_bench.iter().all(|&k| k == m));
        }
    }

    #[test]
    fn deterministic_construction() {
        let a = make_rrr_schedule(7, 5, RrrParams { inc: 3, step: 2 }).unwrap();
        let b = make_rrr_schedule(7, 5, RrrParams { inc: 3, step: 2 }).unwrap();
        let ids: Vec<String> = (0..7).map(|i| format!("b{i}")).collect();
        assert_eq!(a.to_csv(&ids), b.to_csv(&ids));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_dims_rejected() {
        assert!(make_homogeneous_schedule(0, 1).is_err());
        assert!(make_homogeneous_schedule(1, 0).is_err());
        assert!(make_rrr_schedule(0, 1, RrrParams::default()).is_err());
    }
}
