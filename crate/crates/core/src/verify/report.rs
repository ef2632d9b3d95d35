//! Check outcomes and the assembled report.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// Holds, but with margin below ten times the enclosure width.
    PassWithWarning,
    Fail,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::PassWithWarning => "PASS (warning)",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }

    pub fn is_failure(self) -> bool {
        self == Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    /// Signed slack at the tightest point; negative when violated.
    pub margin: Option<f64>,
    pub lhs: String,
    pub rhs: String,
    pub detail: String,
}

impl CheckResult {
    pub fn skipped(name: &str, detail: impl Into<String>) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            status: Status::Skipped,
            margin: None,
            lhs: String::new(),
            rhs: String::new(),
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub precision_bits: u32,
    pub sweep_bits: u32,
    #[serde(rename = "M")]
    pub m: u64,
    pub k_max: u64,
    pub timestamp: String,
    pub version: String,
}

impl Metadata {
    pub fn new(precision_bits: u32, sweep_bits: u32, m: u64, k_max: u64) -> Metadata {
        Metadata {
            precision_bits,
            sweep_bits,
            m,
            k_max,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub metadata: Metadata,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|c| c.status.is_failure())
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status.is_failure())
    }

    pub fn to_text(&self) -> String {
        let m = &self.metadata;
        let mut out = format!(
            "sterr {} verification at {}: {} bits, sweep {} bits, M = {}, k_max = {}\n",
            m.version, m.timestamp, m.precision_bits, m.sweep_bits, m.m, m.k_max
        );
        for c in &self.checks {
            let margin = c
                .margin
                .map_or_else(|| "-".to_string(), |v| format!("{v:+.3e}"));
            let _ = writeln!(
                out,
                "{:<14} {:<28} margin {:>11}  {}",
                c.status.label(),
                c.name,
                margin,
                c.detail
            );
            if c.status.is_failure() {
                let _ = writeln!(out, "{:<14} lhs = {}  rhs = {}", "", c.lhs, c.rhs);
            }
        }
        let failed = self.failures().count();
        let skipped = self
            .checks
            .iter()
            .filter(|c| c.status == Status::Skipped)
            .count();
        let _ = writeln!(
            out,
            "{} checks: {} failed, {} skipped",
            self.checks.len(),
            failed,
            skipped
        );
        out
    }

    /// One JSON object per line: the metadata, then one per check.
    pub fn to_json_lines(&self) -> String {
        let mut out = serde_json::json!({ "metadata": self.metadata }).to_string();
        out.push('\n');
        for c in &self.checks {
            out.push_str(&serde_json::to_string(c).expect("check serializes"));
            out.push('\n');
        }
        out
    }
}

/// Running worst case over the points of one check.
pub(crate) struct Tally {
    name: &'static str,
    what: String,
    total: usize,
    failures: usize,
    worst: Option<Worst>,
}

struct Worst {
    ok: bool,
    margin: f64,
    width: f64,
    lhs: String,
    rhs: String,
    at: String,
}

impl Tally {
    /// `what` names the inequality in the report detail.
    pub(crate) fn new(name: &'static str, what: impl Into<String>) -> Tally {
        Tally {
            name,
            what: what.into(),
            total: 0,
            failures: 0,
            worst: None,
        }
    }

    /// Records one point. `ok` is the exact verdict; `margin` its slack.
    pub(crate) fn observe(
        &mut self,
        ok: bool,
        margin: f64,
        width: f64,
        describe: impl FnOnce() -> (String, String, String),
    ) {
        self.total += 1;
        if !ok {
            self.failures += 1;
        }
        let replace = match &self.worst {
            None => true,
            Some(w) => (!ok && w.ok) || (ok == w.ok && margin < w.margin),
        };
        if replace {
            let (lhs, rhs, at) = describe();
            self.worst = Some(Worst {
                ok,
                margin,
                width,
                lhs,
                rhs,
                at,
            });
        }
    }

    pub(crate) fn finish(self) -> CheckResult {
        let Some(w) = self.worst else {
            return CheckResult::skipped(self.name, format!("{}: empty range", self.what));
        };
        let status = if self.failures > 0 {
            Status::Fail
        } else if w.margin < 10.0 * w.width {
            Status::PassWithWarning
        } else {
            Status::Pass
        };
        let detail = if self.failures > 0 {
            format!(
                "{}: violated at {} of {} points, worst at {}",
                self.what, self.failures, self.total, w.at
            )
        } else {
            format!(
                "{}: holds at {} points, tightest at {}",
                self.what, self.total, w.at
            )
        };
        CheckResult {
            name: self.name.to_string(),
            status,
            margin: Some(w.margin),
            lhs: w.lhs,
            rhs: w.rhs,
            detail,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_tally_is_skipped() {
        let r = Tally::new("x", "a ≤ b").finish();
        assert_eq!(r.status, Status::Skipped);
    }

    #[test]
    fn failure_dominates_smaller_passing_margin() {
        let mut t = Tally::new("x", "a ≤ b");
        t.observe(true, -1.0, 0.0, || ("1".into(), "2".into(), "p".into()));
        t.observe(false, 0.5, 0.0, || ("3".into(), "4".into(), "q".into()));
        let r = t.finish();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.lhs, "3");
        assert!(r.detail.contains("1 of 2"));
    }

    #[test]
    fn thin_margin_warns() {
        let mut t = Tally::new("x", "a ≤ b");
        t.observe(true, 1e-9, 1e-9, Default::default);
        assert_eq!(t.finish().status, Status::PassWithWarning);
        let mut t = Tally::new("x", "a ≤ b");
        t.observe(true, 0.0, 0.0, Default::default);
        assert_eq!(t.finish().status, Status::Pass);
    }

    #[test]
    fn json_lines_have_one_record_per_check() {
        let report = VerificationReport {
            metadata: Metadata::new(192, 53, 10, 5),
            checks: vec![
                CheckResult::skipped("a", "not selected"),
                CheckResult::skipped("b", "not selected"),
            ],
        };
        let text = report.to_json_lines();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["name"], "a");
        assert_eq!(v["status"], "skipped");
        assert!(v["margin"].is_null());
        assert!(report.passed());
    }
}
