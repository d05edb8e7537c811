use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_merge-trees"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = run(args, cwd);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn matrix(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn example1(dir: &Path) {
    ok(&["simulate", "--scenario", "example1", "--out", "data"], dir);
    ok(&["build-trees", "--input", "data/functions.csv", "--out", "trees.json"], dir);
}

#[test]
fn example1_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    example1(dir);
    ok(&["dist", "--input", "trees.json", "--out", "edit.csv", "--certificate", "cert.json"], dir);
    let d = matrix(&dir.join("edit.csv"));
    assert_eq!(d.len(), 10);
    assert!(d[0][9].abs() < 1e-9);
    assert_eq!(d[0][4], 8.0);
    for (i, row) in d.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, d[j][i]);
        }
    }
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("cert.json")).unwrap()).unwrap();
    assert_eq!(cert.as_array().unwrap().len(), 45);
    assert!(dir.join("edit.csv.meta.json").exists());
    assert!(dir.join("data/metadata.json").exists());
}

#[test]
fn mixed_with_unit_weight_is_the_first_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    example1(dir);
    ok(&["dist", "--input", "trees.json", "--out", "edit.csv"], dir);
    ok(&["dist", "--metric", "wasserstein", "--input", "trees.json", "--out", "w.csv"], dir);
    ok(&["dist", "--metric", "mixed", "--dc", "edit.csv", "--dr", "w.csv", "--w", "1", "--out", "m1.csv"], dir);
    ok(&["dist", "--metric", "mixed", "--dc", "edit.csv", "--dr", "w.csv", "--w", "0", "--out", "m0.csv"], dir);
    assert_eq!(matrix(&dir.join("m1.csv")), matrix(&dir.join("edit.csv")));
    assert_eq!(matrix(&dir.join("m0.csv")), matrix(&dir.join("w.csv")));
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        ok(&["simulate", "--scenario", "example2", "--seed", "7", "--per-cluster", "6", "--out", "data"], dir);
        ok(&["build-trees", "--input", "data/functions.csv", "--out", "trees.json"], dir);
        ok(&["prune", "--input", "trees.json", "--prune-frac", "0.05", "--out", "pruned.json"], dir);
        ok(&["dist", "--input", "pruned.json", "--out", "edit.csv", "--jobs", "3"], dir);
        ok(&["mds", "--input", "edit.csv", "--out", "mds.csv"], dir);
        ok(&["stats", "--input", "trees.json", "--labels", "data/labels.csv", "--bands", "bands.csv", "--out", "curves.csv"], dir);
    }
    for f in ["data/functions.csv", "data/labels.csv", "trees.json", "pruned.json", "edit.csv", "mds.csv", "curves.csv", "bands.csv", "edit.csv.meta.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn qda_loocv_report_is_consistent() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(&["simulate", "--scenario", "example2", "--seed", "2", "--per-cluster", "10", "--out", "data"], dir);
    ok(&["build-trees", "--input", "data/functions.csv", "--out", "trees.json"], dir);
    ok(&["dist", "--input", "trees.json", "--out", "edit.csv"], dir);
    ok(&["dist", "--metric", "wasserstein", "--input", "trees.json", "--out", "w.csv"], dir);
    let read = |name: &str| -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
    };
    let stdout = ok(
        &["qda-loocv", "--input", "edit.csv", "--labels", "data/labels.csv", "--m", "2", "--out", "fixed.json"],
        dir,
    );
    assert!(stdout.contains("m = 2") && stdout.contains("confusion"), "{stdout}");
    let fixed = read("fixed.json");
    let confusion: Vec<Vec<u64>> = serde_json::from_value(fixed["confusion"].clone()).unwrap();
    let total: u64 = confusion.iter().flatten().sum::<u64>() + fixed["failed_folds"].as_u64().unwrap();
    assert_eq!(total, 20);
    let hits: u64 = (0..confusion.len()).map(|i| confusion[i][i]).sum();
    assert_eq!(fixed["accuracy"].as_f64().unwrap(), hits as f64 / 20.0);

    ok(
        &["qda-loocv", "--input", "edit.csv", "--dr", "w.csv", "--labels", "data/labels.csv", "--grid-w", "--grid-m", "--out", "grid.json"],
        dir,
    );
    let grid = read("grid.json");
    assert_eq!(grid["table"].as_array().unwrap().len(), 21 * 15);
    let best = grid["accuracy"].as_f64().unwrap();
    let row = grid["table"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["w"] == 1.0 && r["m"] == 2)
        .unwrap();
    assert_eq!(row["accuracy"], fixed["accuracy"]);
    assert!(best >= fixed["accuracy"].as_f64().unwrap());
}

#[test]
fn hclust_and_pd_write_their_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    example1(dir);
    ok(&["dist", "--input", "trees.json", "--out", "edit.csv"], dir);
    ok(&["hclust", "--input", "edit.csv", "--linkage", "single", "--out", "dend.csv", "--heights", "h.csv"], dir);
    assert_eq!(fs::read_to_string(dir.join("dend.csv")).unwrap().lines().count(), 10);
    ok(&["pd", "--input", "trees.json", "--out", "pd"], dir);
    assert!(dir.join("pd/f0.csv").exists() && dir.join("pd/metadata.json").exists());
    ok(&["elbow", "--input", "trees.json", "--out", "elbow.csv", "--points", "5"], dir);
    assert_eq!(fs::read_to_string(dir.join("elbow.csv")).unwrap().lines().count(), 6);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    example1(dir);
    // Usage and parameter problems.
    assert_eq!(run(&["dist", "--bogus"], dir).status.code(), Some(2));
    let out = run(&["prune", "--input", "trees.json", "--eps", "-1", "--prune-frac", "0.1", "--out", "x.json"], dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("exactly one") && err.contains("nonnegative"), "{err}");
    // Data problems.
    assert_eq!(run(&["build-trees", "--input", "missing.csv", "--out", "x.json"], dir).status.code(), Some(3));
    fs::write(dir.join("bad.csv"), "id,x,y\na,0,1\na,0,2\n").unwrap();
    assert_eq!(run(&["build-trees", "--input", "bad.csv", "--out", "x.json"], dir).status.code(), Some(3));
    fs::write(dir.join("asym.csv"), "id,a,b\na,0,1\nb,2,0\n").unwrap();
    assert_eq!(run(&["mds", "--input", "asym.csv", "--out", "x.json"], dir).status.code(), Some(3));
    // Fit problems: a single class.
    ok(&["dist", "--input", "trees.json", "--out", "edit.csv"], dir);
    let out = run(&["qda-loocv", "--input", "edit.csv", "--labels", "data/labels.csv", "--m", "1", "--out", "q.json"], dir);
    assert_eq!(out.status.code(), Some(4));
    for f in ["x.json", "x.json.meta.json", "q.json"] {
        assert!(!dir.join(f).exists(), "{f} left behind");
    }
}

#[test]
fn failure_leaves_previous_output_intact() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    example1(dir);
    let before = fs::read(dir.join("trees.json")).unwrap();
    fs::write(dir.join("bad.csv"), "id,x,y\na,1,1\na,0,2\n").unwrap();
    assert_eq!(run(&["build-trees", "--input", "bad.csv", "--out", "trees.json"], dir).status.code(), Some(3));
    assert_eq!(fs::read(dir.join("trees.json")).unwrap(), before);
    let leftovers: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}
