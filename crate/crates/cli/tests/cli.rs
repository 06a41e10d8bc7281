// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spinlink::lindblad::{evolve, DensityMatrix, TripartiteParams};
use spinlink_cli::RunConfig;
use tempfile::TempDir;

fn spinlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinlink"))
        .args(args)
        .env_remove("SPINLINK_OUT")
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full = vec!["--out", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    spinlink(&full)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'), "CRLF in {}", path.display());
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn rates_for_one_case() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["rates", "--case", "B"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("B 17.9 kHz"), "{}", stdout(&o));
    let (header, rows) = read_csv(&tmp.path().join("rates.csv"));
    assert_eq!(header.first().map(String::as_str), Some("case"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "B");
}

#[test]
fn all_cases_match_the_golden_table() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["rates", "--all-cases"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = fs::read_to_string(tmp.path().join("rates.csv")).unwrap();
    let want = include_str!("fixtures/rates_all_cases.csv");
    assert_eq!(got, want);
}

#[test]
fn transfer_trajectory_peaks_near_one_half() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["transfer"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&tmp.path().join("transfer.csv"));
    assert_eq!(header, ["t_s", "pop_mw", "pop_m", "pop_e"]);
    let peak = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!((peak - 0.5).abs() < 0.05, "{peak}");
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("transfer.json")).unwrap()).unwrap();
    assert!(meta["dissipator"].as_str().unwrap().contains("gamma_k"));
}

#[test]
fn emitted_numbers_parse_back_to_twelve_digits() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["transfer", "--t-end", "5e-8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&tmp.path().join("transfer.csv"));

    let p = TripartiteParams::default();
    let traj = evolve(&DensityMatrix::single_photon(&p).unwrap(), &p, 5e-8, 1e-9).unwrap();
    assert_eq!(rows.len(), traj.len());
    let close = |text: &str, exact: f64| {
        let x: f64 = text.parse().unwrap();
        (x - exact).abs() <= 5e-12 * exact.abs()
    };
    for (k, row) in rows.iter().enumerate() {
        assert!(close(&row[0], traj.times[k]), "{row:?}");
        assert!(close(&row[1], traj.pop_mw[k]), "{row:?}");
        assert!(close(&row[2], traj.pop_m[k]), "{row:?}");
        assert!(close(&row[3], traj.pop_e[k]), "{row:?}");
    }
}

#[test]
fn empty_grid_gives_header_only_csv() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["herald", "--points", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(tmp.path().join("herald.csv")).unwrap(),
        "theta_rad,protocol,fidelity,p_herald\n"
    );
}

#[test]
fn herald_reports_both_protocols() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["herald", "--points", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&tmp.path().join("herald.csv"));
    assert_eq!(rows.len(), 6);
    for row in rows.iter().filter(|r| r[1] == "two-photon") {
        assert!((row[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
        assert!((row[3].parse::<f64>().unwrap() - 0.5).abs() < 1e-9);
    }
    let (_, patterns) = read_csv(&tmp.path().join("herald_patterns.csv"));
    assert_eq!(patterns.len(), 12);
    assert!(patterns.iter().any(|r| r[3] == "-1"));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let runs: Vec<TempDir> = ["1", "3"]
        .iter()
        .map(|threads| {
            let tmp = TempDir::new().unwrap();
            for args in [
                &["--threads", threads, "--seed", "9", "protocol-mc", "--trials", "30000", "--parallel", "2"][..],
                &["--threads", threads, "sweep-transfer", "--g-points", "3", "--q-points", "2"][..],
            ] {
                let o = run_in(tmp.path(), args);
                assert!(o.status.success(), "{}", stderr(&o));
            }
            tmp
        })
        .collect();
    for name in ["protocol_mc.json", "protocol_mc_histograms.csv", "sweep.csv", "sweep.json"] {
        let a = fs::read(runs[0].path().join(name)).unwrap();
        let b = fs::read(runs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn seed_changes_the_sample() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run_in(a.path(), &["--seed", "1", "protocol-mc", "--trials", "5000"]);
    run_in(b.path(), &["--seed", "2", "protocol-mc", "--trials", "5000"]);
    assert_ne!(
        fs::read(a.path().join("protocol_mc.json")).unwrap(),
        fs::read(b.path().join("protocol_mc.json")).unwrap()
    );
}

#[test]
fn unknown_flag_is_a_usage_error_with_no_output() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run_in(&out, &["rates", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error[usage]"));
    assert!(!out.exists());
}

#[test]
fn invalid_config_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[efficiencies]\neta_e_mw = 2.0\n").unwrap();
    let out = tmp.path().join("out");
    let o = run_in(&out, &["--config", cfg.to_str().unwrap(), "rates"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error[config]"), "{}", stderr(&o));
    assert!(!out.exists());

    fs::write(&cfg, "[tripartite]\nmystery = 1\n").unwrap();
    let o = run_in(&out, &["--config", cfg.to_str().unwrap(), "transfer"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn integration_blow_up_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run_in(&out, &["transfer", "--q-mw", "10"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("error[numerical]"));
    assert!(!out.exists());
}

#[test]
fn io_failures_exit_4() {
    let tmp = TempDir::new().unwrap();
    let o = spinlink(&["--config", tmp.path().join("missing.toml").to_str().unwrap(), "rates"]);
    assert_eq!(o.status.code(), Some(4));

    let file = tmp.path().join("plain");
    fs::write(&file, "").unwrap();
    let o = run_in(&file.join("sub"), &["rates"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("error[io]"));
}

#[test]
fn environment_sets_the_default_output_directory() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_spinlink"))
        .args(["efficiency"])
        .env("SPINLINK_OUT", tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let (header, rows) = read_csv(&tmp.path().join("efficiency.csv"));
    assert_eq!(header.len(), 6);
    assert_eq!(rows.len(), 1);
}

#[test]
fn heat_flags_override_the_scenario() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["heat", "--duty-cycle", "0.2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("heat.json")).unwrap()).unwrap();
    let w = v["microwave_dissipated_w"].as_f64().unwrap();
    assert!((w - 69.0e-9).abs() < 0.1e-9, "{w}");
}

#[test]
fn levels_columns() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["levels", "--b-z", "0.1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&tmp.path().join("levels.csv"));
    assert_eq!(header, ["eigenvalue_hz", "orbit_character", "spin_character"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn guide_config_example_is_valid() {
    let chapter = include_str!("../../../book/src/cli.md");
    let start = chapter.find("```toml\n").expect("toml block") + "```toml\n".len();
    let len = chapter[start..].find("```").unwrap();
    let cfg = RunConfig::from_toml(&chapter[start..start + len]).unwrap();
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.sweep.g_hz.points, 11);
}
