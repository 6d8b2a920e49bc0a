use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pinoise(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinoise"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn gen_data_then_estimate_mi() {
    let dir = tempfile::tempdir().unwrap();
    let out = pinoise(&["gen-data", "--preset", "toy", "--seed", "3", "--out", "data"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("data/toy.csv")).unwrap();
    assert!(csv.starts_with("x0,x1,label\n"));
    assert_eq!(csv.lines().count(), 201);

    let out = pinoise(
        &[
            "estimate-mi", "--input", "data/toy.csv", "--label-column", "2", "--header", "--columns", "0,1",
            "--out", "mi", "--format", "json,csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("mi/mi.json")).unwrap()).unwrap();
    assert_eq!(v["classification"]["verdict"], "pi-noise");
    assert!(v["estimate"]["value"].as_f64().unwrap() > 0.5);
    assert!(dir.path().join("mi/mi.csv").exists());
}

#[test]
fn inject_noise_writes_a_noisy_copy() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pinoise(&["gen-data", "--preset", "toy", "--out", "."], dir.path())), 0);
    fs::write(
        dir.path().join("noise.json"),
        r#"{"kind": "gaussian", "mu": 0.0, "sigma": 0.2, "ratio": 0.5, "range": {"min_value": 0.0, "max_value": 1.0}}"#,
    )
    .unwrap();
    let args = [
        "inject-noise", "--input", "toy.csv", "--label-column", "2", "--header", "--config", "noise.json", "--seed",
        "4", "--out", "noisy",
    ];
    let out = pinoise(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let clean = fs::read_to_string(dir.path().join("toy.csv")).unwrap();
    let noisy = fs::read_to_string(dir.path().join("noisy/toy_gaussian.csv")).unwrap();
    assert_eq!(clean.lines().count(), noisy.lines().count());
    let changed = clean.lines().zip(noisy.lines()).filter(|(a, b)| a != b).count();
    assert_eq!(changed, 100);

    // same seed, same bytes
    let again = pinoise(&[&args[..11], &["again"]].concat(), dir.path());
    assert_eq!(code(&again), 0);
    assert_eq!(noisy, fs::read_to_string(dir.path().join("again/toy_gaussian.csv")).unwrap());
}

#[test]
fn sr_sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = pinoise(
        &["sr-sweep", "--signal", "sine", "--level", "0.6", "--amplitude", "0.3", "--draws", "200", "--sigmas", "0,0.5,1", "--out", "sr"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["cells.csv", "report.json", "sr_sweep.csv", "entropy_vs_sigma.svg"] {
        assert!(dir.path().join("sr").join(f).exists(), "{f} missing");
    }
    let rows = fs::read_to_string(dir.path().join("sr/sr_sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), 4);
    assert!(rows.lines().nth(1).unwrap().ends_with("pure-noise"));
}

#[test]
fn run_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "experiment": "rectified",
        "seeds": [1, 2],
        "datasets": [{"source": "synthetic", "preset": "toy"}],
        "rectified": {
            "learner": {"kind": "svm"},
            "noise_blob": {"mean": [0.5, 0.8], "covariance": [[0.001, 0.0], [0.0, 0.001]], "count": 20, "label": 0},
            "rectify_blob": {"mean": [0.8, 0.2], "covariance": [[0.001, 0.0], [0.0, 0.001]], "count": 20, "label": 1}
        }
    }"#;
    fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let out = pinoise(&["run", "--config", "cfg.json", "--out", "a"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stages = fs::read_dir(dir.path().join("a/stages")).unwrap().count();
    assert_eq!(stages, 8);

    let out = pinoise(&["run", "--config", "cfg.json", "--out", "b", "--format", "csv,json"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read(dir.path().join("a/cells.csv")).unwrap(),
        fs::read(dir.path().join("b/cells.csv")).unwrap()
    );
    assert!(!dir.path().join("b/stages_svm.svg").exists());

    let out = pinoise(&["report", "--input", "a/report.json", "--out", "c", "--format", "csv,svg"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(dir.path().join("a/cells.csv")).unwrap(),
        fs::read(dir.path().join("c/cells.csv")).unwrap()
    );

    let out = pinoise(&["run", "--config", "cfg.json", "--seed", "9", "--out", "d", "--format", "json"], dir.path());
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("d/report.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["seeds"], serde_json::json!([9]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();

    fs::write(p.join("bad_kind.json"), r#"{"experiment": "bogus", "seeds": [1]}"#).unwrap();
    assert_eq!(code(&pinoise(&["run", "--config", "bad_kind.json"], p)), 2);

    fs::write(p.join("no_seeds.json"), r#"{"experiment": "sr-sweep", "seeds": []}"#).unwrap();
    assert_eq!(code(&pinoise(&["run", "--config", "no_seeds.json"], p)), 2);

    assert_eq!(code(&pinoise(&["run", "--config", "missing.json"], p)), 2);
    assert_eq!(code(&pinoise(&["sr-sweep", "--format", "pdf"], p)), 2);
    assert_eq!(code(&pinoise(&["estimate-mi", "--input", "x.csv"], p)), 2);

    assert_eq!(code(&pinoise(&["estimate-mi", "--input", "nope.csv", "--label-column", "0"], p)), 3);
    fs::write(p.join("ragged.csv"), "1,2,0\n3,0\n").unwrap();
    assert_eq!(code(&pinoise(&["estimate-mi", "--input", "ragged.csv", "--label-column", "2"], p)), 3);
    fs::write(p.join("text.csv"), "1,abc,0\n").unwrap();
    assert_eq!(code(&pinoise(&["estimate-mi", "--input", "text.csv", "--label-column", "2"], p)), 3);

    let missing_data = r#"{"experiment": "dimension-table", "seeds": [1], "dimension_widths": [0, 4],
        "learners": [{"kind": "svm"}],
        "datasets": [{"source": "csv", "path": "absent.csv", "label_column": 0}]}"#;
    fs::write(p.join("missing_data.json"), missing_data).unwrap();
    assert_eq!(code(&pinoise(&["run", "--config", "missing_data.json"], p)), 3);
}
