//! Report rows, their checks, and the two output files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::Experiment;

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    /// Exact identity of the model (flat surface, exact arithmetic).
    ClosedForm,
    /// Exponent or bound predicted by the analysis.
    Analytic,
    /// Tolerance fixed by a calibrated measurement of this harness.
    Measured,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed-form",
            Self::Analytic => "analytic",
            Self::Measured => "measured",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    Equal { expected: f64, tol: f64 },
    AtMost(f64),
    AtLeast(f64),
    Positive,
    Within { lo: f64, hi: f64 },
    /// Recorded, not asserted.
    Report,
}

impl Check {
    pub fn passes(self, value: f64) -> Option<bool> {
        match self {
            Self::Equal { expected, tol } => Some((value - expected).abs() <= tol),
            Self::AtMost(b) => Some(value <= b),
            Self::AtLeast(b) => Some(value >= b),
            Self::Positive => Some(value > 0.0),
            Self::Within { lo, hi } => Some(lo <= value && value <= hi),
            Self::Report => None,
        }
    }

    fn expected(self) -> String {
        self.expected_with(num)
    }

    fn expected_with(self, f: fn(f64) -> String) -> String {
        match self {
            Self::Equal { expected, .. } => f(expected),
            Self::AtMost(b) => format!("<={}", f(b)),
            Self::AtLeast(b) => format!(">={}", f(b)),
            Self::Positive => ">0".to_string(),
            Self::Within { lo, hi } => format!("{}..{}", f(lo), f(hi)),
            Self::Report => String::new(),
        }
    }

    fn tolerance(self) -> String {
        match self {
            Self::Equal { tol, .. } => num(tol),
            _ => String::new(),
        }
    }
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRecord {
    pub experiment: Experiment,
    pub j: Option<u32>,
    pub quantity: String,
    pub value: f64,
    pub check: Check,
    pub provenance: Provenance,
}

impl ReportRecord {
    pub fn new(experiment: Experiment, j: Option<u32>, quantity: impl Into<String>, value: f64, check: Check, provenance: Provenance) -> Self {
        Self { experiment, j, quantity: quantity.into(), value, check, provenance }
    }

    pub fn passed(&self) -> Option<bool> {
        self.check.passes(self.value)
    }

    fn key(&self) -> (Experiment, Option<u32>, &str) {
        (self.experiment, self.j, &self.quantity)
    }
}

/// An experiment that stopped on a module error, keeping what it had finished.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub experiment: Experiment,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub records: Vec<ReportRecord>,
    pub truncation: Option<Truncation>,
}

pub const CSV_HEADER: &str = "experiment,j,quantity,value,expected,tolerance,pass,provenance";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.key().cmp(&b.key()));
    }

    pub fn asserted(&self) -> impl Iterator<Item = (&ReportRecord, bool)> {
        self.records.iter().filter_map(|r| r.passed().map(|p| (r, p)))
    }

    pub fn all_pass(&self) -> bool {
        self.asserted().all(|(_, p)| p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let pass = match r.passed() {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "",
            };
            let j = r.j.map(|j| j.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{j},{},{},{},{},{pass},{}",
                r.experiment,
                csv_field(&r.quantity),
                num(r.value),
                r.check.expected(),
                r.check.tolerance(),
                r.provenance.as_str()
            );
        }
        if let Some(t) = &self.truncation {
            let _ = writeln!(out, "{},,TRUNCATED,,{},,fail,", t.experiment, csv_field(&t.message));
        }
        out
    }

    pub fn to_summary(&self) -> String {
        let mut out = String::new();
        let (mut total, mut passed) = (0, 0);
        for (r, ok) in self.asserted() {
            total += 1;
            passed += ok as usize;
            let j = r.j.map(|j| format!(" j={j}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{} {}{j} {} = {:.6e} (expected {})",
                if ok { "PASS" } else { "FAIL" },
                r.experiment,
                r.quantity,
                r.value,
                r.check.expected_with(|v| format!("{v}"))
            );
        }
        let status = match (&self.truncation, passed == total) {
            (Some(t), _) => format!("ABORTED in {}: {}", t.experiment, t.message),
            (None, true) => "PASS".to_string(),
            (None, false) => "FAIL".to_string(),
        };
        let _ = writeln!(out, "overall: {status} ({passed}/{total} checks passed)");
        out
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.csv"), self.to_csv())?;
        fs::write(dir.join("summary.txt"), self.to_summary())
    }
}
