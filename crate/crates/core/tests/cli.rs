use std::path::Path;
use std::process::{Command, Output};

use msc3::io::{load_tensor, save_tensor, TensorFormat};
use msc3::report::ClustersJson;
use msc3::synth::TruthJson;
use msc3::Tensor3;

fn msc3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msc3"))
        .args(args)
        .output()
        .expect("spawn msc3")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_writes_tensor_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let (d, t) = (dir.path().join("d.t3b"), dir.path().join("t.json"));
    let out = msc3(&[
        "synth",
        "--dims",
        "50,50,50",
        "--rank",
        "2",
        "--gamma",
        "80,80",
        "--cluster-size",
        "10",
        "--seed",
        "1",
        "-o",
        p(&d),
        "--truth",
        p(&t),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let tensor = load_tensor(&d, TensorFormat::T3b).unwrap();
    assert_eq!(tensor.dims(), [50, 50, 50]);
    let truth: TruthJson = serde_json::from_slice(&std::fs::read(&t).unwrap()).unwrap();
    assert_eq!(truth.gammas, vec![80.0, 80.0]);
    assert!(truth.modes.iter().all(|m| m.clusters.len() == 2));
}

#[test]
fn synth_noiseless_entries() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.csv");
    let out = msc3(&[
        "synth",
        "--dims",
        "10,10,10",
        "--rank",
        "1",
        "--gamma",
        "30",
        "--cluster-size",
        "4",
        "--noise",
        "0",
        "-o",
        p(&d),
    ]);
    assert_eq!(code(&out), 0);
    let t = load_tensor(&d, TensorFormat::Csv).unwrap();
    let inside = 30.0 / 64f64.sqrt();
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let want = if i < 4 && j < 4 && k < 4 { inside } else { 0.0 };
                assert!((t.get(i, j, k) - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn synth_explicit_members() {
    let dir = tempfile::tempdir().unwrap();
    let (d, t) = (dir.path().join("d.t3b"), dir.path().join("t.json"));
    let out = msc3(&[
        "synth",
        "--dims",
        "6,5,4",
        "--rank",
        "1",
        "--gamma",
        "9",
        "--members",
        "1,3|0,4|2",
        "--noise",
        "0",
        "-o",
        p(&d),
        "--truth",
        p(&t),
    ]);
    assert_eq!(code(&out), 0);
    let truth: TruthJson = serde_json::from_slice(&std::fs::read(&t).unwrap()).unwrap();
    let labels = truth.labels().unwrap();
    assert_eq!(labels[0], vec![-1, 0, -1, 0, -1, -1]);
    assert_eq!(labels[2], vec![-1, -1, 0, -1]);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.t3b");
    assert_eq!(code(&msc3(&["synth", "-o", p(&d)])), 2);
    assert_eq!(code(&msc3(&["synth", "--dims", "5,5", "-o", p(&d)])), 2);
    assert_eq!(
        code(&msc3(&[
            "synth",
            "--dims",
            "5,5,5",
            "--rank",
            "2",
            "--gamma",
            "1,2,3",
            "-o",
            p(&d)
        ])),
        2
    );
    assert_eq!(code(&msc3(&["sweep", "--gamma", "9:1:1", "-o", p(&d)])), 2);
    assert_eq!(code(&msc3(&["frobnicate"])), 2);
}

#[test]
fn missing_input_exit_1_names_path() {
    let out = msc3(&["cluster", "/nonexistent/tensor.t3b"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/tensor.t3b"));
}

#[test]
fn corrupt_input_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("bad.t3b");
    std::fs::write(&d, b"T3B1\x02\0\0\0").unwrap();
    assert_eq!(code(&msc3(&["cluster", p(&d)])), 1);
}

#[test]
fn degenerate_tensor_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("zero.t3b");
    save_tensor(&Tensor3::zeros([5, 5, 5]).unwrap(), &d, TensorFormat::T3b).unwrap();
    let out = msc3(&["cluster", p(&d)]);
    assert_eq!(code(&out), 3);
    assert!(!out.stderr.is_empty());
}

#[test]
fn cluster_and_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (d, t) = (dir.path().join("d.t3b"), dir.path().join("t.json"));
    let (c, csv) = (dir.path().join("c.json"), dir.path().join("e.csv"));
    assert_eq!(
        code(&msc3(&[
            "synth",
            "--dims",
            "30,30,30",
            "--rank",
            "1",
            "--gamma",
            "200",
            "--cluster-size",
            "8",
            "--seed",
            "4",
            "-o",
            p(&d),
            "--truth",
            p(&t),
        ])),
        0
    );
    assert_eq!(
        code(&msc3(&[
            "cluster",
            "--method",
            "msc-dbscan",
            "--epsilon",
            "0.001",
            p(&d),
            "-o",
            p(&c)
        ])),
        0
    );
    let doc = ClustersJson::read(&c).unwrap();
    assert_eq!(doc.method, "msc-dbscan");
    assert_eq!(doc.modes.len(), 3);
    assert_eq!(doc.triclusters.len(), 1);
    for m in &doc.modes {
        assert_eq!(m.clusters, vec![(0..8).collect::<Vec<usize>>()]);
    }
    let out = msc3(&["eval", p(&c), "--truth", p(&t), "--tensor", p(&d), "--csv", p(&csv)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ari mean: 1.000000"));
    let report = std::fs::read_to_string(&csv).unwrap();
    assert!(report.starts_with("metric,target,value\n"));
}

#[test]
fn cluster_to_stdout_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.t3b");
    assert_eq!(
        code(&msc3(&[
            "synth",
            "--dims",
            "12,12,12",
            "--gamma",
            "60",
            "--cluster-size",
            "4",
            "-o",
            p(&d)
        ])),
        0
    );
    let out = msc3(&["cluster", "--method", "msc", p(&d)]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["method"], "msc");
}

#[test]
fn eval_dimension_mismatch_is_validation() {
    let dir = tempfile::tempdir().unwrap();
    let (d, c) = (dir.path().join("d.t3b"), dir.path().join("c.json"));
    let t = dir.path().join("t.json");
    assert_eq!(
        code(&msc3(&[
            "synth",
            "--dims",
            "12,12,12",
            "--cluster-size",
            "4",
            "-o",
            p(&d)
        ])),
        0
    );
    assert_eq!(code(&msc3(&["cluster", p(&d), "-o", p(&c)])), 0);
    assert_eq!(
        code(&msc3(&[
            "synth",
            "--dims",
            "10,12,12",
            "--cluster-size",
            "4",
            "-o",
            p(&d),
            "--truth",
            p(&t)
        ])),
        0
    );
    assert_eq!(code(&msc3(&["eval", p(&c), "--truth", p(&t)])), 2);
}

#[test]
fn sweep_row_count_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = msc3(&[
            "sweep",
            "--gamma",
            "100:100:1",
            "--runs",
            "2",
            "--seed",
            "3",
            "-o",
            p(path),
        ]);
        assert_eq!(code(&out), 0);
    }
    let rows = std::fs::read(&a).unwrap();
    assert_eq!(rows, std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a_agg.csv")).unwrap(),
        std::fs::read(dir.path().join("b_agg.csv")).unwrap()
    );
    let text = String::from_utf8(rows).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), msc3::cli::sweep::ROWS_HEADER);
    assert_eq!(lines.count(), 4);
}

#[test]
fn jobs_env_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_msc3"))
        .args(["sweep", "--gamma", "70", "--runs", "1", "-o", p(&a)])
        .env("MSC3_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}
