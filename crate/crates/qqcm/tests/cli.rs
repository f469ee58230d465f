//! End-to-end runs of the `qqcm` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qqcm::config::ExperimentConfig;
use qqcm::output::read_table;

fn qqcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qqcm")).args(args).output().unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn every_checked_in_config_loads() {
    let mut count = 0;
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 10);
}

#[test]
fn simulate_writes_the_trajectory_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"queue":"md1","r":0.5,"interaction":{"kind":"partial_swap","g":"pi/12"},
            "idle_dephasing":{"gamma":0.05,"convention":"closed_form"},"n_ancillas":10000}"#,
    );
    let out = dir.path().join("t.csv");
    let queue = dir.path().join("q.csv");
    let res = qqcm(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        &s(&out),
        "--queue-out",
        &s(&queue),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let t = read_table(&out).unwrap();
    assert_eq!(
        t.headers,
        ["n", "t_depart", "C", "rho_re_00", "rho_re_01", "rho_im_01", "rho_re_11"]
    );
    assert_eq!(t.rows.len(), 10_000);
    for c in t.column("C").unwrap() {
        assert!((0.0..=0.5 + 1e-12).contains(&c));
    }
    let q = read_table(&queue).unwrap();
    assert_eq!(q.headers, ["n", "T", "S", "Wq", "I", "t_arrive", "t_depart"]);
    let (w, i) = (q.column("Wq").unwrap(), q.column("I").unwrap());
    assert!(w.iter().zip(&i).all(|(a, b)| a * b == 0.0));
    assert_eq!(q.column("t_depart").unwrap(), t.column("t_depart").unwrap());
}

#[test]
fn overloaded_xxz_queue_loses_its_coherence() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::load(&configs().join("trajectory_md1.json")).unwrap();
    cfg.r = 1.5;
    let path = write_config(dir.path(), "c.json", &serde_json::to_string(&cfg).unwrap());
    let out = dir.path().join("t.csv");
    assert!(qqcm(&["simulate", "--config", &path, "--out", &s(&out)])
        .status
        .success());
    let c = read_table(&out).unwrap().column("C").unwrap();
    let tail = &c[c.len() - c.len() / 10..];
    assert!(tail.iter().sum::<f64>() / tail.len() as f64 <= 0.01);
}

#[test]
fn threads_do_not_change_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"queue":"mm1","r":0.5,"interaction":{"kind":"xxz","g":"pi/12","g_delta":0.1,"gamma":0.05},
            "idle_dephasing":{"gamma":0.05},"waiting_dephasing":{"gamma":0.05},
            "n_ancillas":2000,"n_runs":3,"sweep":{"axis":"r","values":[0.9,0.2,0.5]}}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(qqcm(&["sweep", "--config", &cfg, "--out", &s(&a), "--threads", "1"])
        .status
        .success());
    assert!(qqcm(&["sweep", "--config", &cfg, "--out", &s(&b), "--threads", "3"])
        .status
        .success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let t = read_table(&a).unwrap();
    assert_eq!(t.headers, ["r", "E_C", "Var_C", "stderr"]);
    assert_eq!(t.column("r").unwrap(), [0.9, 0.2, 0.5]);
}

#[test]
fn seed_flag_changes_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = s(&configs().join("trajectory_md1.json"));
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(qqcm(&["simulate", "--config", &cfg, "--out", &s(&a), "--seed", "1"])
        .status
        .success());
    assert!(qqcm(&["simulate", "--config", &cfg, "--out", &s(&b), "--seed", "2"])
        .status
        .success());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn unstable_lindley_run_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"queue":"md1","r":1.2,"interaction":{"kind":"partial_swap","g":"pi/12"}}"#,
    );
    let out = dir.path().join("cdf.csv");
    let res = qqcm(&["lindley", "--config", &cfg, "--out", &s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("no stationary distribution"));
    assert!(!out.exists());
}

#[test]
fn transient_lindley_run_works_when_overloaded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cdf.csv");
    let cfg = s(&configs().join("lindley_md1_transient_r12.json"));
    assert!(qqcm(&["lindley", "--config", &cfg, "--out", &s(&out)]).status.success());
    let f = read_table(&out).unwrap();
    let g = read_table(&dir.path().join("cdf_idle.csv")).unwrap();
    assert_eq!(f.headers, ["x", "F"]);
    let fv = f.column("F").unwrap();
    assert!(fv.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    let g0 = g.column("F").unwrap()[0];
    let f0 = fv[0];
    assert!((f0 + g0 - 1.0).abs() <= 1e-9, "F(0) = {f0}, G(0) = {g0}");
}

#[test]
fn stable_lindley_run_writes_both_comparisons() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::load(&configs().join("lindley_mm1_r5.json")).unwrap();
    cfg.lindley.samples = 20_000;
    let path = write_config(dir.path(), "c.json", &serde_json::to_string(&cfg).unwrap());
    let out = dir.path().join("w.csv");
    assert!(qqcm(&["lindley", "--config", &path, "--out", &s(&out)])
        .status
        .success());
    for file in ["w.csv", "w_idle.csv"] {
        let t = read_table(&dir.path().join(file)).unwrap();
        assert_eq!(t.headers, ["x", "F_numeric", "F_empirical", "abs_diff"]);
        let worst = t.column("abs_diff").unwrap().into_iter().fold(0.0, f64::max);
        assert!(worst <= 0.03, "{file}: {worst}");
    }
}

#[test]
fn plot_refuses_empty_input_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "r,E_C,Var_C,stderr\n").unwrap();
    let out = dir.path().join("p.svg");
    let res = qqcm(&["plot", "--input", &s(&input), "--out", &s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!out.exists());

    fs::write(&input, "").unwrap();
    assert_eq!(
        qqcm(&["plot", "--input", &s(&input), "--out", &s(&out)]).status.code(),
        Some(1)
    );
    assert!(!out.exists());
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    fs::write(
        &input,
        "r,E_C,Var_C,stderr\n0.1,0.07,1e-4,1e-5\n0.5,0.14,2e-4,1e-5\n0.9,0.13,3e-4,2e-5\n",
    )
    .unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    assert!(qqcm(&["plot", "--input", &s(&input), "--out", &s(&a)]).status.success());
    assert!(
        qqcm(&["plot", "--input", &s(&input), "--kind", "sweep", "--out", &s(&b)])
            .status
            .success()
    );
    let svg = fs::read_to_string(&a).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<svg"));
    assert_eq!(svg.as_bytes(), fs::read(&b).unwrap());
}

fn fixed_point_row(dir: &Path, json: &str) -> Vec<String> {
    let cfg = write_config(dir, "fp.json", json);
    let out = dir.join("fp.csv");
    let res = qqcm(&["fixed-point", "--config", &cfg, "--out", &s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mode,rho_re_00,rho_re_01,rho_im_01,rho_re_11,C,residual"
    );
    lines.next().unwrap().split(',').map(str::to_owned).collect()
}

#[test]
fn mixed_ancilla_fixed_point_is_maximally_mixed() {
    let dir = tempfile::tempdir().unwrap();
    let json = fs::read_to_string(configs().join("fixed_point_mixed_ancilla.json")).unwrap();
    let row = fixed_point_row(dir.path(), &json);
    assert_eq!(row[0], "mixed_ancilla");
    let v: Vec<f64> = row[1..].iter().map(|x| x.parse().unwrap()).collect();
    assert!((v[0] - 0.5).abs() <= 1e-10 && (v[3] - 0.5).abs() <= 1e-10);
    assert!(v[1].abs() <= 1e-10 && v[2].abs() <= 1e-10 && v[4].abs() <= 1e-10);
}

#[test]
fn full_swap_fixed_point_is_the_ancilla() {
    let dir = tempfile::tempdir().unwrap();
    let row = fixed_point_row(
        dir.path(),
        r#"{"queue":"md1","r":0.5,"interaction":{"kind":"partial_swap","g":"pi/2"}}"#,
    );
    assert_eq!(row[0], "deterministic_limit");
    let c: f64 = row[5].parse().unwrap();
    assert!((c - 0.5).abs() <= 1e-10, "C = {c}");
}

#[test]
fn bad_input_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(&dir.path().join("x.csv"));
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"queue":"md1","r":0.5,"interaction":{"kind":"partial_swap","g":"pi/12"},"bogus":1}"#,
    );
    assert_eq!(
        qqcm(&["simulate", "--config", &cfg, "--out", &out]).status.code(),
        Some(1)
    );
    assert_eq!(
        qqcm(&["simulate", "--config", "/nonexistent.json", "--out", &out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(qqcm(&["frobnicate"]).status.code(), Some(1));
    let sweep_without_axis = write_config(
        dir.path(),
        "d.json",
        r#"{"queue":"md1","r":0.5,"interaction":{"kind":"partial_swap","g":"pi/12"}}"#,
    );
    assert_eq!(
        qqcm(&["sweep", "--config", &sweep_without_axis, "--out", &out])
            .status
            .code(),
        Some(1)
    );
    assert!(!Path::new(&out).exists());
}
