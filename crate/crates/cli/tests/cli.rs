use std::path::Path;
use std::process::{Command, Output};

fn syncmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syncmem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_fig4(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "fig4",
        "--out",
        out.to_str().unwrap(),
        "--n-collisions",
        "300",
        "--set",
        "x_values=[0.95, 1.05]",
        "--set",
        "y_values=[0.1]",
        "--set",
        "panel_values=[0.0]",
    ];
    args.extend_from_slice(extra);
    syncmem(&args)
}

#[test]
fn grid_run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_fig4(dir.path(), &["--heatmap"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("fig4_c12_swap_gamma-0.csv")).unwrap();
    assert!(csv.starts_with("# metric=pearson\nlambda\\omega1,0.95,1.05\n0.1,"));
    assert!(dir.path().join("fig4_nm_swap_gamma-0.png").exists());
    let manifest = std::fs::read_to_string(dir.path().join("fig4_manifest.toml")).unwrap();
    assert!(manifest.contains("n_collisions = 300"));
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("r.toml");
    std::fs::write(&cfg, "n_collisions = 10000\nlambda = 0.1\n").unwrap();
    let o = small_fig4(&dir.path().join("o"), &["--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = std::fs::read_to_string(dir.path().join("o/fig4_manifest.toml")).unwrap();
    assert!(manifest.contains("n_collisions = 300"));
}

#[test]
fn serial_and_parallel_outputs_match() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(small_fig4(a.path(), &["--serial"]).status.success());
    assert!(small_fig4(b.path(), &["--workers", "2"]).status.success());
    for f in ["fig4_c12_swap_gamma-0.csv", "fig4_nm_swap_gamma-0.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn manifest_replays() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(small_fig4(a.path(), &[]).status.success());
    let m = a.path().join("fig4_manifest.toml");
    let o = syncmem(&[
        "fig4",
        "--config",
        m.to_str().unwrap(),
        "--out",
        b.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f = "fig4_nm_raw_swap_gamma-0.csv";
    assert_eq!(
        std::fs::read(a.path().join(f)).unwrap(),
        std::fs::read(b.path().join(f)).unwrap()
    );
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = syncmem(&[
        "fig1",
        "--set",
        "gamma=-0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`gamma`"), "{}", stderr(&o));
    let o = syncmem(&["fig1", "--set", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`bogus`"));
}

#[test]
fn missing_config_file_exits_4() {
    let o = syncmem(&["fig1", "--config", "/nonexistent/recipe.toml"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn numerical_abort_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = syncmem(&[
        "me-run",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "omega1=1.0",
        "--set",
        "lambda=0.05",
        "--set",
        "gamma=50",
        "--set",
        "step=0.5",
        "--set",
        "me_window=4",
        "--set",
        "me_overlap=2",
        "--t-end",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn cm_run_series_starts_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = syncmem(&[
        "cm-run",
        "--n-collisions",
        "300",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = std::fs::read_to_string(dir.path().join("cm-run_series.csv")).unwrap();
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("n,sx1,sx2,D,NM"));
    assert!(lines.next().unwrap().starts_with("1,"));
}
