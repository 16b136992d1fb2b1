use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nhskin-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn nhskin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhskin")).args(args).output().unwrap()
}

fn run_config(name: &str, out: &Path) -> serde_json::Value {
    let cfg = configs().join(format!("{name}.json"));
    let o = nhskin(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&fs::read_to_string(out.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn hn_winding_is_minus_one() {
    let out = scratch("winding");
    let side = run_config("hn_winding", &out);
    assert_eq!(side["w"], -1);
    assert_eq!(side["validation"]["pass"], true);
    let csv = fs::read_to_string(out.join("hn_winding.csv")).unwrap();
    assert!(csv.starts_with("delta,j,re,im,provenance\n"));
}

#[test]
fn stacked_ssh_case7_is_tagged() {
    let out = scratch("case7");
    assert_eq!(run_config("stacked_ssh_case7", &out)["balance"], "case7");
}

#[test]
fn stacked_ssh_unbalanced_is_tagged() {
    let out = scratch("unbalanced");
    assert_eq!(run_config("stacked_ssh_unbalanced", &out)["balance"], "unbalanced");
}

#[test]
fn impossible_tolerance_fails_validation() {
    let out = scratch("tolerance");
    let cfg = configs().join("hn_unbalanced_sweep.json");
    let o = nhskin(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--tolerance",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("validation failure"));
    assert!(!out.join("hn_unbalanced_sweep.csv").exists());
}

#[test]
fn unknown_parameter_is_reported() {
    let dir = scratch("badparam");
    let cfg = dir.join("bad.json");
    fs::write(
        &cfg,
        r#"{"model": "hn", "task": "spectrum", "params": {"t_l": [1, 0], "t_q": [2, 0]}, "sizes": [10]}"#,
    )
    .unwrap();
    let o = nhskin(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("t_q"));
}

#[test]
fn subcommand_overrides_the_task() {
    let out = scratch("override");
    let cfg = configs().join("hn_winding.json");
    let o = nhskin(&["gap", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("hn_winding.json")).unwrap()).unwrap();
    assert_eq!(side["task"], "gap");
}
