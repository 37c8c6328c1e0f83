use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gm(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gm"));
    cmd.args(args).env_remove("GM_SEED");
    if let Some(s) = seed_env {
        cmd.env("GM_SEED", s);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, seed: &str, seed_env: Option<&str>) -> Output {
    gm(
        &["generate", "--count", "3", "--seed", seed, "--n-min", "11", "--n-max", "30", "--out", path(dir)],
        seed_env,
    )
}

fn graph_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "graph"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = path(tmp.path());
    assert_eq!(code(&gm(&["generate", "--count", "0", "--out", out], None)), 2);
    let args = ["analyze", "--results", "r.csv", "--features", "f.csv", "--mode", "zones", "--sigma", "-1", "--out", out];
    assert_eq!(code(&gm(&args, None)), 2);
    assert_eq!(code(&gm(&["bench", "--graphs", out, "--out", "r.csv", "--workers", "0"], None)), 2);
    assert_eq!(code(&gm(&["frobnicate"], None)), 2);
}

#[test]
fn runtime_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let results = tmp.path().join("results.csv");
    fs::write(&results, "not,the,right,header\n").unwrap();
    let features = tmp.path().join("features.csv");
    fs::write(&features, "graph_id,n,tau1,tau2,log_avg_degree,gt_modularity\n").unwrap();
    let args = [
        "analyze", "--results", path(&results), "--features", path(&features),
        "--mode", "leaderboard", "--out", path(tmp.path()),
    ];
    let out = gm(&args, None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let missing = tmp.path().join("missing");
    let bench = gm(&["bench", "--graphs", path(&missing), "--out", path(&results)], None);
    assert_eq!(code(&bench), 1);
}

#[test]
fn gm_seed_overrides_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(code(&generate(&a, "1", Some("7"))), 0);
    assert_eq!(code(&generate(&b, "7", None)), 0);
    assert_eq!(code(&generate(&c, "1", None)), 0);
    assert_eq!(graph_bytes(&a), graph_bytes(&b));
    assert_ne!(graph_bytes(&a), graph_bytes(&c));
    let config = fs::read_to_string(a.join("run_config.json")).unwrap();
    assert!(config.contains("\"seed\": 7"), "{config}");
}

#[test]
fn bench_resumes_from_existing_results() {
    let tmp = tempfile::tempdir().unwrap();
    let graphs = tmp.path().join("graphs");
    assert_eq!(code(&generate(&graphs, "3", None)), 0);
    let results = tmp.path().join("out").join("results.csv");
    let args = ["bench", "--graphs", path(&graphs), "--measures", "For,Heat", "--out", path(&results)];

    let first = gm(&args, None);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    assert!(String::from_utf8_lossy(&first.stderr).contains("computed 6 records, skipped 0"));
    let bytes = fs::read(&results).unwrap();

    let second = gm(&args, None);
    assert_eq!(code(&second), 0);
    assert!(String::from_utf8_lossy(&second.stderr).contains("computed 0 records, skipped 6"));
    assert_eq!(fs::read(&results).unwrap(), bytes);
    assert!(tmp.path().join("out").join("features.csv").exists());
    assert!(tmp.path().join("out").join("bench_run_config.json").exists());
}

#[test]
fn sigmoid_sign_is_selectable_and_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let graphs = tmp.path().join("graphs");
    assert_eq!(code(&generate(&graphs, "4", None)), 0);
    for sign in ["negative", "positive"] {
        let dir = tmp.path().join(sign);
        let results = dir.join("results.csv");
        let args = [
            "bench", "--graphs", path(&graphs), "--measures", "SCT", "--sigmoid-sign", sign,
            "--out", path(&results),
        ];
        assert_eq!(code(&gm(&args, None)), 0);
        let config = fs::read_to_string(dir.join("bench_run_config.json")).unwrap();
        assert!(config.contains(&format!("\"sigmoid_sign\": \"{sign}\"")), "{config}");
    }
    let bad = gm(&["bench", "--graphs", path(&graphs), "--sigmoid-sign", "sideways", "--out", "x.csv"], None);
    assert_eq!(code(&bad), 2);
}
