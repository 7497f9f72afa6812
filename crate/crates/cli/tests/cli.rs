use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wavestrich"))
}

fn write_config(dir: &std::path::Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn presets_lists_the_catalog() {
    let out = bin().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("flat"));
    assert!(text.contains("bump(amplitude[, width[, center]])"));
}

#[test]
fn flat_symbols_pass_and_reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = symbols\nsurface = flat\ngrid.N = 256\n");
    let mut csv = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).args(["--jobs", "1"]).status().unwrap();
        assert_eq!(status.code(), Some(0));
        csv.push(fs::read(out.join("report.csv")).unwrap());
        let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
        assert!(summary.lines().last().unwrap().starts_with("overall: PASS"));
    }
    assert_eq!(csv[0], csv[1]);
    let text = String::from_utf8(csv.swap_remove(0)).unwrap();
    assert!(text.starts_with("experiment,j,quantity,value,expected,tolerance,pass,provenance\n"));
    assert!(text.contains("symbols,,gamma_radial_second_derivative,7.5000000000000000e-1,"));
}

#[test]
fn environment_overrides_config_output() {
    let tmp = tempfile::tempdir().unwrap();
    let from_cfg = tmp.path().join("from-config");
    let from_env = tmp.path().join("from-env");
    let text = format!("experiment = glue\nparams.j_list = 5\noutput.dir = {}\n", from_cfg.display());
    let cfg = write_config(tmp.path(), &text);
    let status = bin().args(["run", "--config"]).arg(&cfg).env("WAVESTRICH_OUT", &from_env).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(from_env.join("report.csv").exists());
    assert!(!from_cfg.exists());
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = glue\nparams.nu = 0.9\n");
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.nu"));

    let cfg = write_config(tmp.path(), "experiment = glue\nbogus = 1\n");
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = bin().args(["run", "--config", "/nonexistent/x.cfg"]).status().unwrap();
    assert_eq!(missing.code(), Some(2));
}

#[test]
fn runtime_abort_flushes_a_truncated_report() {
    // j = 4 leaves too few kernel separations in [8h, h^δ]
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = dispersive\nparams.j_list = 4\n");
    let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(tmp.path()).status().unwrap();
    assert_eq!(status.code(), Some(3));
    let csv = fs::read_to_string(tmp.path().join("report.csv")).unwrap();
    assert!(csv.lines().last().unwrap().starts_with("dispersive,,TRUNCATED,"));
}
