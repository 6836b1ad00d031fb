//! Suite configuration: the benchmark roster, workloads, golden outputs,
//! reference baselines, and tolerance rules.
//!
//! A suite is described by a single TOML file. Relative paths inside the
//! file (golden outputs, input files, command executables containing a
//! path separator) resolve against the directory containing the file, so
//! suites are relocatable as a directory tree.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How produced outputs are compared against their golden references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceMode {
    /// Byte-wise line comparison after skip-prefix filtering.
    Exact,
    /// Token-by-token; numeric tokens compare under abstol/reltol.
    Numeric,
}

impl fmt::Display for ToleranceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToleranceMode::Exact => write!(f, "exact"),
            ToleranceMode::Numeric => write!(f, "numeric"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceRule {
    pub mode: ToleranceMode,
    #[serde(default)]
    pub abstol: f64,
    #[serde(default)]
    pub reltol: f64,
    /// Lines starting with any of these prefixes are ignored on both sides.
    #[serde(default)]
    pub skip_line_prefixes: Vec<String>,
}

impl Default for ToleranceRule {
    fn default() -> Self {
        ToleranceRule {
            mode: ToleranceMode::Exact,
            abstol: 0.0,
            reltol: 0.0,
            skip_line_prefixes: Vec::new(),
        }
    }
}

impl ToleranceRule {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn numeric(abstol: f64, reltol: f64) -> Self {
        ToleranceRule {
            mode: ToleranceMode::Numeric,
            abstol,
            reltol,
            skip_line_prefixes: Vec::new(),
        }
    }

    fn validate(&self, ctx: &str) -> Result<()> {
        if !self.abstol.is_finite() || !self.reltol.is_finite() {
            return Err(Error::Config(format!("{ctx}: tolerances must be finite")));
        }
        if self.abstol < 0.0 || self.reltol < 0.0 {
            return Err(Error::Config(format!(
                "{ctx}: tolerances must be non-negative"
            )));
        }
        if self.mode == ToleranceMode::Exact && (self.abstol != 0.0 || self.reltol != 0.0) {
            return Err(Error::Config(format!(
                "{ctx}: exact mode requires abstol = reltol = 0"
            )));
        }
        Ok(())
    }
}

/// One produced file and the golden copy it is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenOutput {
    /// Filename the benchmark writes into its run directory.
    pub file: String,
    /// Path to the golden copy.
    pub golden: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub name: String,
    #[serde(default)]
    pub args: Vec<String>,
    /// Files staged into the run directory before the child is spawned.
    #[serde(default)]
    pub input_files: Vec<PathBuf>,
    #[serde(default)]
    pub golden_outputs: Vec<GoldenOutput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    /// Short unique name, e.g. "syn.spin".
    pub id: String,
    /// Executable plus fixed argument template. Tokens of the form
    /// `{workload}` are substituted with the workload name; the workload's
    /// own args are appended after the template.
    pub command: Vec<String>,
    /// Seconds measured on the reference machine (sum over workloads).
    pub reference_time_s: f64,
    /// Standalone contention-free runtime; defaults to reference_time_s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solo_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_energy_j: Option<f64>,
    #[serde(default)]
    pub validation: ToleranceRule,
    pub workloads: Vec<WorkloadSpec>,
}

impl BenchmarkSpec {
    /// Contention-free baseline used for slowdown matrices.
    pub fn solo_time_s(&self) -> f64 {
        self.solo_time_s.unwrap_or(self.reference_time_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite_name: String,
    /// The roster. File order is the round-robin rotation order.
    #[serde(rename = "benchmarks")]
    pub roster: Vec<BenchmarkSpec>,
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

impl SuiteConfig {
    /// Roster size N.
    pub fn len(&self) -> usize {
        self.roster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty()
    }

    /// 0-based roster position of a benchmark id.
    pub fn roster_index(&self, id: &str) -> Result<usize> {
        self.roster
            .iter()
            .position(|b| b.id == id)
            .ok_or_else(|| Error::Config(format!("unknown benchmark id \"{id}\"")))
    }

    pub fn benchmark(&self, id: &str) -> Result<&BenchmarkSpec> {
        Ok(&self.roster[self.roster_index(id)?])
    }

    pub fn roster_ids(&self) -> Vec<String> {
        self.roster.iter().map(|b| b.id.clone()).collect()
    }

    /// Restricts the roster to the given ids, preserving roster order.
    pub fn subset(&self, ids: &[String]) -> Result<SuiteConfig> {
        for id in ids {
            self.roster_index(id)?;
        }
        let roster: Vec<BenchmarkSpec> = self
            .roster
            .iter()
            .filter(|b| ids.contains(&b.id))
            .cloned()
            .collect();
        if roster.is_empty() {
            return Err(Error::Config("benchmark subset is empty".into()));
        }
        Ok(SuiteConfig {
            suite_name: self.suite_name.clone(),
            roster,
        })
    }

    /// Structural validation; `check_files` additionally requires golden and
    /// input files to exist (paths must already be resolved).
    pub fn validate(&self, check_files: bool) -> Result<()> {
        if self.roster.is_empty() {
            return Err(Error::Config("roster is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for bench in &self.roster {
            let id = &bench.id;
            if !valid_name(id) {
                return Err(Error::Config(format!(
                    "benchmark id \"{id}\" must match [A-Za-z0-9._-]+"
                )));
            }
            if !seen.insert(id.clone()) {
                return Err(Error::Config(format!("duplicate benchmark id \"{id}\"")));
            }
            if bench.command.is_empty() {
                return Err(Error::Config(format!("benchmark \"{id}\": empty command")));
            }
            if !positive(bench.reference_time_s) {
                return Err(Error::Config(format!(
                    "benchmark \"{id}\": reference_time_s must be positive"
                )));
            }
            if let Some(t) = bench.solo_time_s {
                if !positive(t) {
                    return Err(Error::Config(format!(
                        "benchmark \"{id}\": solo_time_s must be positive"
                    )));
                }
            }
            if let Some(e) = bench.reference_energy_j {
                if !positive(e) {
                    return Err(Error::Config(format!(
                        "benchmark \"{id}\": reference_energy_j must be positive"
                    )));
                }
            }
            bench
                .validation
                .validate(&format!("benchmark \"{id}\" validation"))?;
            if bench.workloads.is_empty() {
                return Err(Error::Config(format!(
                    "benchmark \"{id}\": workloads must be non-empty"
                )));
            }
            let mut wl_seen = BTreeSet::new();
            for wl in &bench.workloads {
                if !valid_name(&wl.name) {
                    return Err(Error::Config(format!(
                        "benchmark \"{id}\": workload name \"{}\" must match [A-Za-z0-9._-]+",
                        wl.name
                    )));
                }
                if !wl_seen.insert(wl.name.clone()) {
                    return Err(Error::Config(format!(
                        "benchmark \"{id}\": duplicate workload name \"{}\"",
                        wl.name
                    )));
                }
                let mut files = BTreeSet::new();
                for g in &wl.golden_outputs {
                    if !files.insert(g.file.clone()) {
                        return Err(Error::Config(format!(
                            "benchmark \"{id}\" workload \"{}\": duplicate golden output \"{}\"",
                            wl.name, g.file
                        )));
                    }
                    if check_files && !g.golden.is_file() {
                        return Err(Error::Config(format!(
                            "benchmark \"{id}\" workload \"{}\": golden file {} not found",
                            wl.name,
                            g.golden.display()
                        )));
                    }
                }
                if check_files {
                    for f in &wl.input_files {
                        if !f.is_file() {
                            return Err(Error::Config(format!(
                                "benchmark \"{id}\" workload \"{}\": input file {} not found",
                                wl.name,
                                f.display()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("serialize: {e}")))
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Loads and validates a suite configuration file. Relative paths are
/// resolved against the file's directory.
pub fn load_suite(path: &Path) -> Result<SuiteConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg: SuiteConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for bench in &mut cfg.roster {
        // A command whose executable token contains a path separator is
        // suite-relative; bare names go through PATH lookup at run time.
        if let Some(exe) = bench.command.first_mut() {
            if exe.contains('/') && !Path::new(exe).is_absolute() {
                *exe = base.join(&*exe).to_string_lossy().into_owned();
            }
        }
        for wl in &mut bench.workloads {
            for f in &mut wl.input_files {
                *f = resolve(base, f);
            }
            for g in &mut wl.golden_outputs {
                g.golden = resolve(base, &g.golden);
            }
        }
    }
    cfg.validate(true)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
        let p = dir.join(name);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent).unwrap();
        }
        std::fs::write(&p, content).unwrap();
        p
    }

    fn minimal_toml() -> &'static str {
        r#"
suite_name = "mini"

[[benchmarks]]
id = "syn.spin"
command = ["/bin/true"]
reference_time_s = 100.0

[[benchmarks.workloads]]
name = "w0"
args = []
"#
    }

    #[test]
    fn load_minimal_suite() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "suite.toml", minimal_toml());
        let cfg = load_suite(&p).unwrap();
        assert_eq!(cfg.len(), 1);
        assert_eq!(cfg.roster[0].id, "syn.spin");
        assert_eq!(cfg.roster[0].reference_time_s, 100.0);
        assert_eq!(cfg.roster[0].solo_time_s(), 100.0);
    }

    #[test]
    fn duplicate_id_names_offender() {
        let dir = tempfile::tempdir().unwrap();
        let doubled = format!(
            "{}{}",
            minimal_toml(),
            r#"
[[benchmarks]]
id = "syn.spin"
command = ["/bin/true"]
reference_time_s = 5.0

[[benchmarks.workloads]]
name = "w0"
"#
        );
        let p = write(dir.path(), "suite.toml", &doubled);
        let err = load_suite(&p).unwrap_err().to_string();
        assert!(err.contains("syn.spin"), "error should name the id: {err}");
    }

    #[test]
    fn missing_golden_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let toml = r#"
suite_name = "mini"

[[benchmarks]]
id = "a"
command = ["/bin/true"]
reference_time_s = 1.0

[[benchmarks.workloads]]
name = "w0"
golden_outputs = [{ file = "out.txt", golden = "golden/out.txt" }]
"#;
        let p = write(dir.path(), "suite.toml", toml);
        let err = load_suite(&p).unwrap_err().to_string();
        assert!(err.contains("golden"), "{err}");
    }

    #[test]
    fn non_positive_reference_time_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let toml = minimal_toml().replace("100.0", "0.0");
        let p = write(dir.path(), "suite.toml", &toml);
        let err = load_suite(&p).unwrap_err().to_string();
        assert!(err.contains("reference_time_s"), "{err}");
    }

    #[test]
    fn roster_index_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut toml = String::from("suite_name = \"abc\"\n");
        for id in ["a", "b", "c"] {
            toml.push_str(&format!(
                "\n[[benchmarks]]\nid = \"{id}\"\ncommand = [\"/bin/true\"]\nreference_time_s = 1.0\n\n[[benchmarks.workloads]]\nname = \"w0\"\n"
            ));
        }
        let p = write(dir.path(), "suite.toml", &toml);
        let cfg = load_suite(&p).unwrap();
        assert_eq!(cfg.roster_index("b").unwrap(), 1);
        assert_eq!(cfg.roster_index("a").unwrap(), 0);
        assert!(cfg.roster_index("z").is_err());
        for (i, bench) in cfg.roster.iter().enumerate() {
            assert_eq!(cfg.roster_index(&bench.id).unwrap(), i);
        }
    }

    #[test]
    fn serialize_reload_round_trip() {
        // 14-entry roster: reload of the serialized form must compare equal
        // field-for-field and preserve order.
        let dir = tempfile::tempdir().unwrap();
        let golden = write(dir.path(), "golden/ref.txt", "42\n");
        let mut cfg = SuiteConfig {
            suite_name: "roundtrip".into(),
            roster: Vec::new(),
        };
        for i in 0..14 {
            cfg.roster.push(BenchmarkSpec {
                id: format!("syn.b{i:02}"),
                command: vec!["/bin/true".into(), "{workload}".into()],
                reference_time_s: 10.0 + i as f64,
                solo_time_s: if i % 2 == 0 { Some(9.5 + i as f64) } else { None },
                reference_energy_j: if i % 3 == 0 { Some(100.0) } else { None },
                validation: if i % 2 == 0 {
                    ToleranceRule::exact()
                } else {
                    ToleranceRule::numeric(1e-6, 1e-9)
                },
                workloads: vec![WorkloadSpec {
                    name: "w0".into(),
                    args: vec!["--n".into(), i.to_string()],
                    input_files: vec![],
                    golden_outputs: vec![GoldenOutput {
                        file: "out.txt".into(),
                        golden: golden.clone(),
                    }],
                }],
            });
        }
        let p = dir.path().join("suite.toml");
        std::fs::write(&p, cfg.to_toml_string().unwrap()).unwrap();
        let reloaded = load_suite(&p).unwrap();
        assert_eq!(reloaded, cfg);
        assert_eq!(reloaded.len(), 14);
        let order: Vec<_> = reloaded.roster.iter().map(|b| b.id.clone()).collect();
        let expect: Vec<_> = (0..14).map(|i| format!("syn.b{i:02}")).collect();
        assert_eq!(order, expect);
    }

    #[test]
    fn subset_preserves_roster_order() {
        let cfg = SuiteConfig {
            suite_name: "s".into(),
            roster: ["a", "b", "c"]
                .iter()
                .map(|id| BenchmarkSpec {
                    id: (*id).into(),
                    command: vec!["/bin/true".into()],
                    reference_time_s: 1.0,
                    solo_time_s: None,
                    reference_energy_j: None,
                    validation: ToleranceRule::exact(),
                    workloads: vec![WorkloadSpec {
                        name: "w0".into(),
                        args: vec![],
                        input_files: vec![],
                        golden_outputs: vec![],
                    }],
                })
                .collect(),
        };
        let sub = cfg.subset(&["c".into(), "a".into()]).unwrap();
        assert_eq!(sub.roster_ids(), vec!["a".to_string(), "c".to_string()]);
        assert!(cfg.subset(&["nope".into()]).is_err());
    }

    #[test]
    fn exact_mode_rejects_nonzero_tolerance() {
        let mut rule = ToleranceRule::exact();
        rule.abstol = 0.5;
        assert!(rule.validate("t").is_err());
    }
}
