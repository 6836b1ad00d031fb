//! Output validation against golden references, within per-benchmark
//! tolerance rules. Exact mode compares lines byte-wise; numeric mode
//! compares token-by-token, admitting a numeric difference when either the
//! absolute or the relative tolerance allows it.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::suite::{GoldenOutput, ToleranceMode, ToleranceRule};

/// Outcome of validating one event's outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for ValidationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationStatus::Pass => write!(f, "pass"),
            ValidationStatus::Fail => write!(f, "fail"),
            ValidationStatus::Skipped => write!(f, "skipped"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mismatch {
    pub file: String,
    /// 1-based line number; 0 when the whole file is the problem.
    pub line: usize,
    /// 0-based token index within the line.
    pub token: usize,
    pub expected: String,
    pub actual: String,
    /// "numeric", "string", "line-count", "token-count", "missing-file", "io".
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub mismatches: Vec<Mismatch>,
    pub compared_files: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn status(&self) -> ValidationStatus {
        if self.passed() {
            ValidationStatus::Pass
        } else {
            ValidationStatus::Fail
        }
    }
}

/// One whitespace-delimited token; `value` is set when the token fully
/// parses as a finite real. "NaN" and infinities stay string tokens so
/// accidental NaN production fails validation.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericToken {
    pub text: String,
    pub value: Option<f64>,
}

pub fn tokenize_numeric_line(line: &str) -> Vec<NumericToken> {
    line.split_whitespace()
        .map(|tok| {
            let value = tok.parse::<f64>().ok().filter(|v| v.is_finite());
            NumericToken {
                text: tok.to_string(),
                value,
            }
        })
        .collect()
}

fn numeric_close(actual: f64, golden: f64, rule: &ToleranceRule) -> bool {
    let diff = (actual - golden).abs();
    diff <= rule.abstol || diff <= rule.reltol * golden.abs()
}

fn filtered_lines<'a>(text: &'a str, rule: &ToleranceRule) -> Vec<&'a str> {
    text.lines()
        .filter(|l| !rule.skip_line_prefixes.iter().any(|p| l.starts_with(p)))
        .collect()
}

fn compare_file(
    name: &str,
    actual: &str,
    golden: &str,
    rule: &ToleranceRule,
    mismatches: &mut Vec<Mismatch>,
) {
    let actual_lines = filtered_lines(actual, rule);
    let golden_lines = filtered_lines(golden, rule);

    if actual_lines.len() != golden_lines.len() {
        mismatches.push(Mismatch {
            file: name.to_string(),
            line: actual_lines.len().min(golden_lines.len()) + 1,
            token: 0,
            expected: format!("{} lines", golden_lines.len()),
            actual: format!("{} lines", actual_lines.len()),
            reason: "line-count".to_string(),
        });
        return;
    }

    for (i, (a_line, g_line)) in actual_lines.iter().zip(&golden_lines).enumerate() {
        let lineno = i + 1;
        match rule.mode {
            ToleranceMode::Exact => {
                if a_line != g_line {
                    mismatches.push(Mismatch {
                        file: name.to_string(),
                        line: lineno,
                        token: 0,
                        expected: (*g_line).to_string(),
                        actual: (*a_line).to_string(),
                        reason: "string".to_string(),
                    });
                }
            }
            ToleranceMode::Numeric => {
                let a_toks = tokenize_numeric_line(a_line);
                let g_toks = tokenize_numeric_line(g_line);
                if a_toks.len() != g_toks.len() {
                    mismatches.push(Mismatch {
                        file: name.to_string(),
                        line: lineno,
                        token: 0,
                        expected: format!("{} tokens", g_toks.len()),
                        actual: format!("{} tokens", a_toks.len()),
                        reason: "token-count".to_string(),
                    });
                    continue;
                }
                for (t, (a, g)) in a_toks.iter().zip(&g_toks).enumerate() {
                    let ok = match (a.value, g.value) {
                        (Some(av), Some(gv)) => numeric_close(av, gv, rule),
                        _ => a.text == g.text,
                    };
                    if !ok {
                        mismatches.push(Mismatch {
                            file: name.to_string(),
                            line: lineno,
                            token: t,
                            expected: g.text.clone(),
                            actual: a.text.clone(),
                            reason: if a.value.is_some() && g.value.is_some() {
                                "numeric".to_string()
                            } else {
                                "string".to_string()
                            },
                        });
                    }
                }
            }
        }
    }
}

/// Compares each produced file in `actual_dir` against its golden copy under
/// `rule`. Missing or unreadable files become mismatches, never panics.
pub fn compare_outputs(
    actual_dir: &Path,
    golden: &[GoldenOutput],
    rule: &ToleranceRule,
) -> ValidationReport {
    let mut mismatches = Vec::new();
    for g in golden {
        let golden_text = match std::fs::read_to_string(&g.golden) {
            Ok(t) => t,
            Err(e) => {
                mismatches.push(Mismatch {
                    file: g.file.clone(),
                    line: 0,
                    token: 0,
                    expected: g.golden.display().to_string(),
                    actual: e.to_string(),
                    reason: "io".to_string(),
                });
                continue;
            }
        };
        let actual_path = actual_dir.join(&g.file);
        let actual_text = match std::fs::read_to_string(&actual_path) {
            Ok(t) => t,
            Err(e) => {
                let reason = if actual_path.exists() { "io" } else { "missing-file" };
                mismatches.push(Mismatch {
                    file: g.file.clone(),
                    line: 0,
                    token: 0,
                    expected: "readable output file".to_string(),
                    actual: e.to_string(),
                    reason: reason.to_string(),
                });
                continue;
            }
        };
        compare_file(&g.file, &actual_text, &golden_text, rule, &mut mismatches);
    }
    ValidationReport {
        mismatches,
        compared_files: golden.len(),
    }
}
