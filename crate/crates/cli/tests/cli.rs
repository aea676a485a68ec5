//! End-to-end runs of the `mottlobe` binary: artifact layout, exit codes,
//! and byte-level determinism of the CSV outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mottlobe"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mottlobe-it-{name}-{}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Flags for a pair of single sites: the smallest system the protocol runs
/// on, fast enough to sweep in milliseconds.
fn tiny_point_flags(cmd: &mut Command) -> &mut Command {
    cmd.args([
        "--sites",
        "1",
        "--n-max",
        "2",
        "--n-total-max",
        "2",
        "--min-periods",
        "2",
    ])
}

fn run_sweep_grid(dir: &Path, mu: &str, kappa: &str, extra: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.arg("sweep");
    tiny_point_flags(&mut cmd);
    cmd.args([
        "--mu-over-u",
        mu,
        "--kappa-over-u",
        kappa,
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    cmd.args(extra);
    cmd.output().unwrap()
}

fn run_tiny_sweep(dir: &Path, extra: &[&str]) -> Output {
    run_sweep_grid(dir, "0.4:0.6:2", "0.05:0.1:2", extra)
}

#[test]
fn validate_accepts_the_default_config() {
    let out = bin().arg("validate").output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("configuration ok"), "{text}");
    assert!(text.contains("pair basis dimension"), "{text}");
}

#[test]
fn validate_reports_the_weak_coupling_advisory() {
    let out = bin().args(["validate", "--g", "2.0"]).output().unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("weak-coupling"), "{}", stdout(&out));
}

#[test]
fn sweep_writes_deterministic_artifacts() {
    let d1 = tmp("sweep1");
    let d2 = tmp("sweep2");
    let out = run_tiny_sweep(&d1, &["--formats", "csv,svg"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv1 = std::fs::read(d1.join("phase_diagram.csv")).unwrap();
    let svg = std::fs::read_to_string(d1.join("phase_diagram.svg")).unwrap();
    let meta = std::fs::read_to_string(d1.join("run.meta")).unwrap();
    assert!(svg.starts_with("<?xml version=\"1.0\""));
    assert!(meta.contains("command = \"sweep\""));
    assert!(meta.contains("[config.params]"));

    let out2 = run_tiny_sweep(&d2, &["--formats", "csv,svg"]);
    assert!(out2.status.success());
    let csv2 = std::fs::read(d2.join("phase_diagram.csv")).unwrap();
    assert_eq!(csv1, csv2, "identical configs must give identical CSV bytes");

    let text = String::from_utf8(csv1).unwrap();
    assert!(text.starts_with("mu_over_u,kappa_over_u,psi,source,flags\n"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains(",josephson,"));
    std::fs::remove_dir_all(&d1).ok();
    std::fs::remove_dir_all(&d2).ok();
}

#[test]
fn u_slice_mode_writes_slice_csv() {
    let dir = tmp("slice");
    let mut cmd = bin();
    cmd.arg("sweep");
    tiny_point_flags(&mut cmd);
    cmd.args([
        "--mode",
        "u-slice",
        "--u-range",
        "0.5:20:3",
        "--mu-over-u-fixed",
        "0.5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.join("slice.csv")).unwrap();
    assert!(text.starts_with("u,mu_over_u,j_m,omega_star,psi_a,psi_b,flags\n"));
    assert_eq!(text.lines().count(), 4);
    // Geometric spacing by default: the middle point is the geometric mean.
    let mid: f64 = text.lines().nth(2).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((mid - (0.5f64 * 20.0).sqrt()).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_grid_is_a_config_error() {
    let dir = tmp("badgrid");
    let out = run_sweep_grid(&dir, "1:0:5", "0.05:0.1:2", &[]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("stop"), "{}", stderr(&out));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn clap_usage_errors_share_the_config_exit_code() {
    let unknown = bin().args(["sweep", "--no-such-flag"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(1));
    let malformed = bin().args(["sweep", "--mu-over-u", "0:1"]).output().unwrap();
    assert_eq!(malformed.status.code(), Some(1));
    assert!(stderr(&malformed).contains("start:stop:steps"), "{}", stderr(&malformed));
    let help = bin().args(["--help"]).output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("sweep"));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tmp("badkey");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "[params]\ncoupling = 0.1\n").unwrap();
    let out = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tmp("override");
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        "[params]\ng = 5.0\nkappa = 1.0\n",
    )
    .unwrap();
    // File alone: g = 5 trips the weak-coupling advisory; the flag restores
    // the default regime and the advisory disappears.
    let noisy = bin().args(["validate", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert!(stdout(&noisy).contains("weak-coupling"));
    let quiet = bin()
        .args(["validate", "--config", cfg.to_str().unwrap(), "--g", "0.1"])
        .output()
        .unwrap();
    assert!(!stdout(&quiet).contains("weak-coupling"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn all_points_failing_exits_2() {
    let dir = tmp("allfail");
    let out = run_tiny_sweep(&dir, &["--dim-cap", "1"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("all 4 grid points failed"), "{}", stderr(&out));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unwritable_output_directory_exits_3() {
    let out = run_tiny_sweep(Path::new("/proc/mottlobe-cannot-exist"), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn compare_of_a_map_with_itself_is_unity() {
    let dir = tmp("compare");
    let out = run_tiny_sweep(&dir, &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = dir.join("phase_diagram.csv");
    let overlay = dir.join("overlay.svg");
    let out = bin()
        .args([
            "compare",
            "--a",
            csv.to_str().unwrap(),
            "--b",
            csv.to_str().unwrap(),
            "--svg-out",
            overlay.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("spearman = 1"), "{}", stdout(&out));
    assert!(std::fs::read_to_string(&overlay).unwrap().contains("<svg"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn compare_rejects_mismatched_grids() {
    let d1 = tmp("cmp-a");
    let d2 = tmp("cmp-b");
    assert!(run_tiny_sweep(&d1, &[]).status.success());
    assert!(run_sweep_grid(&d2, "0.4:0.6:2", "0.05:0.2:3", &[]).status.success());
    let out = bin()
        .args([
            "compare",
            "--a",
            d1.join("phase_diagram.csv").to_str().unwrap(),
            "--b",
            d2.join("phase_diagram.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    std::fs::remove_dir_all(&d1).ok();
    std::fs::remove_dir_all(&d2).ok();
}

#[test]
fn gutzwiller_map_carries_its_source() {
    let dir = tmp("gutz");
    let out = bin()
        .args([
            "gutzwiller",
            "--mu-over-u",
            "0.2:0.8:3",
            "--kappa-over-u",
            "0.01:0.2:3",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.join("phase_diagram.csv")).unwrap();
    assert!(text.contains(",gutzwiller,"));
    // Deep Mott corner is pinned at zero; the superfluid corner is not.
    assert!(text.contains(",0,gutzwiller,ok"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gutzwiller_zkappa_reads_the_axis_prescaled() {
    // z = 2 for a chain: κ/U = 0.1 equals zκ/U = 0.2, so a --zkappa run at
    // 0.2 must match a plain run at 0.1.
    let d1 = tmp("zk-plain");
    let d2 = tmp("zk-scaled");
    let run = |dir: &Path, axis: &str, scaled: bool| {
        let mut cmd = bin();
        cmd.args([
            "gutzwiller",
            "--mu-over-u",
            "0.4:0.6:2",
            "--kappa-over-u",
            axis,
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        if scaled {
            cmd.arg("--zkappa");
        }
        cmd.output().unwrap()
    };
    assert!(run(&d1, "0.05:0.1:2", false).status.success());
    assert!(run(&d2, "0.1:0.2:2", true).status.success());
    let psi = |dir: &Path| -> Vec<String> {
        std::fs::read_to_string(dir.join("phase_diagram.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().to_owned())
            .collect()
    };
    assert_eq!(psi(&d1), psi(&d2));
    std::fs::remove_dir_all(&d1).ok();
    std::fs::remove_dir_all(&d2).ok();
}

#[test]
fn auxfield_map_carries_its_source() {
    let dir = tmp("aux");
    let mut cmd = bin();
    cmd.arg("auxfield");
    tiny_point_flags(&mut cmd);
    cmd.args([
        "--mu-over-u",
        "0.4:0.6:2",
        "--kappa-over-u",
        "0.05:0.1:2",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.join("phase_diagram.csv")).unwrap();
    assert!(text.contains(",auxfield,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn current_then_spectrum_from_the_written_trace() {
    let dir = tmp("trace");
    let mut cmd = bin();
    cmd.arg("current");
    tiny_point_flags(&mut cmd);
    cmd.args(["--out-dir", dir.to_str().unwrap()]);
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("J_m = "), "{}", stdout(&out));
    let trace = dir.join("trace.csv");
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("t,J\n"));

    let spec_dir = tmp("spec-out");
    let out = bin()
        .args([
            "spectrum",
            "--trace",
            trace.to_str().unwrap(),
            "--out-dir",
            spec_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("dominant omega"), "{}", stdout(&out));
    let text = std::fs::read_to_string(spec_dir.join("spectrum.csv")).unwrap();
    assert!(text.starts_with("omega,J_omega\n"));
    assert_eq!(text.lines().count(), 82);
    std::fs::remove_dir_all(&dir).ok();
    std::fs::remove_dir_all(&spec_dir).ok();
}

#[test]
fn twomode_writes_a_trace_and_reports_the_reduction() {
    let dir = tmp("twomode");
    let out = bin()
        .args([
            "twomode",
            "--periods",
            "2",
            "--steps-per-period",
            "100",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    // Chain defaults: e_a = -2κ = -2, e_b = μ - 2κ + Δμ = 98.5.
    assert!(text.contains("e_a = -2"), "{text}");
    assert!(text.contains("e_b = 98.5"), "{text}");
    assert!(std::fs::read_to_string(dir.join("trace.csv")).unwrap().starts_with("t,J\n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn map_cavity_prints_the_hubbard_parameters() {
    let out = bin()
        .args([
            "map-cavity",
            "--s",
            "2",
            "--g13",
            "1",
            "--g24",
            "3",
            "--omega",
            "10",
            "--delta",
            "2",
            "--epsilon",
            "5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("u = 0.09"), "{text}");
    assert!(text.contains("mu = 0.1"), "{text}");

    let degenerate = bin()
        .args(["map-cavity", "--s", "1", "--g13", "1", "--g24", "1", "--omega", "10"])
        .output()
        .unwrap();
    assert_eq!(degenerate.status.code(), Some(1));
}
