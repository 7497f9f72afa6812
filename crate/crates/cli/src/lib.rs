//! Experiment runner: reads a flat key/value config, runs the named pipelines and
//! writes `report.csv` plus `summary.txt`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use report::{Check, Provenance, Report, ReportRecord, Truncation};

/// Environment variable that overrides the output directory of the config.
pub const OUTPUT_ENV: &str = "WAVESTRICH_OUT";
pub const DEFAULT_OUTPUT: &str = "wavestrich-out";

/// `--out`, then [`OUTPUT_ENV`], then `output.dir`, then [`DEFAULT_OUTPUT`].
pub fn resolve_output(flag: Option<&Path>, env: Option<OsString>, config: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| env.filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

/// Runs every experiment the config names, stopping at the first module error.
pub fn execute(cfg: &ExperimentConfig) -> Report {
    let mut report = Report::default();
    for e in cfg.experiment.expand() {
        if let Err(err) = experiments::run_experiment(e, cfg, &mut report.records) {
            report.truncation = Some(Truncation { experiment: e, message: err.to_string() });
            break;
        }
    }
    report.sort();
    report
}

/// Process exit status for a finished report.
pub fn exit_code(report: &Report) -> i32 {
    if report.truncation.is_some() {
        3
    } else if report.all_pass() {
        0
    } else {
        1
    }
}

/// Runs `cfg` on a pool of `jobs` threads (rayon's default when `None`), then writes
/// both output files into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path, jobs: Option<usize>) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::field("--jobs", "must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::field("--jobs", e.to_string()))?;
    let report = pool.install(|| execute(cfg));
    report.write(out)?;
    Ok(report)
}

pub fn presets_text() -> String {
    "\
Surface presets (surface = ...):
  flat                           η = 0
  bump(amplitude[, width[, center]])
                                 periodic Gaussian of height `amplitude`; width is the
                                 standard deviation (default 0.5), center defaults to
                                 the box midpoint
  cosine(amplitude[, k])         amplitude·cos(2πkx/L), k whole cycles per box (default 1)
  random(seed, s)                seeded field with spectrum (1+|ξ|²)^(−s/2−d/4), cut at
                                 half the Nyquist wavenumber, scaled to max|η| = 0.1

Velocity presets (velocity = ..., one-dimensional only):
  zero                           V = 0
  constant(c)                    V = c
  sine(A[, k])                   V = A·sin(kx), k a positive integer (default 1)
"
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_precedence() {
        let (f, c) = (Path::new("flag"), Path::new("cfg"));
        assert_eq!(resolve_output(Some(f), Some("env".into()), Some(c)), PathBuf::from("flag"));
        assert_eq!(resolve_output(None, Some("env".into()), Some(c)), PathBuf::from("env"));
        assert_eq!(resolve_output(None, Some("".into()), Some(c)), PathBuf::from("cfg"));
        assert_eq!(resolve_output(None, None, None), PathBuf::from(DEFAULT_OUTPUT));
    }

    #[test]
    fn exit_codes() {
        let mut r = Report::default();
        assert_eq!(exit_code(&r), 0);
        r.records.push(ReportRecord::new(Experiment::Glue, None, "x", 2.0, Check::AtMost(1.0), Provenance::Measured));
        assert_eq!(exit_code(&r), 1);
        r.truncation = Some(Truncation { experiment: Experiment::Glue, message: "stop".into() });
        assert_eq!(exit_code(&r), 3);
    }

    #[test]
    fn presets_document_parameters() {
        let t = presets_text();
        assert!(t.contains("flat") && t.contains("bump(amplitude[, width[, center]])"));
        assert!(t.contains("sine(A[, k])"));
    }
}
