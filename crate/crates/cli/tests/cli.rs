use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use manrec::geometry::write_container;
use manrec::{bounds, kmeans, Dataset, FitConfig, RngSeed};

fn manrec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_manrec"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn two_points(dir: &Path) {
    let data = Dataset::from_rows_unrestricted(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
    write_container(&data, dir.join("two.mrc")).unwrap();
    fs::write(dir.join("two.csv"), "x,y\n0,0\n2,0\n").unwrap();
}

#[test]
fn centroid_of_two_points() {
    let dir = tempfile::tempdir().unwrap();
    two_points(dir.path());
    for file in ["two.mrc", "two.csv"] {
        let out = manrec(
            dir.path(),
            &[
                "fit-kmeans",
                "--data",
                file,
                "--ball",
                "ignore",
                "--k",
                "1",
                "--out",
                "m",
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert_eq!(stdout.lines().count(), 1);
        let model = json(dir.path().join("m/model.json"));
        assert_eq!(model["objective"].as_f64(), Some(1.0));
        assert_eq!(model["centers"][0][0].as_f64(), Some(1.0));
    }
}

#[test]
fn out_of_ball_data_is_rejected_by_default() {
    let dir = tempfile::tempdir().unwrap();
    two_points(dir.path());
    for file in ["two.mrc", "two.csv"] {
        let out = manrec(dir.path(), &["fit-kmeans", "--data", file, "--k", "1"]);
        assert_eq!(out.status.code(), Some(3), "{file}");
    }
}

#[test]
fn fit_output_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = manrec(
        dir.path(),
        &[
            "sample",
            "--manifold",
            "sphere",
            "--d",
            "2",
            "--n",
            "300",
            "--seed",
            "4",
            "--csv",
        ],
    );
    assert!(out.status.success());
    assert!(dir.path().join("data.csv").exists());
    let data: Dataset = manrec::ManifoldSpec::sphere(2, 3)
        .unwrap()
        .sample(300, RngSeed(4))
        .unwrap();
    let stored: Dataset = manrec::geometry::read_container(dir.path().join("data.mrc")).unwrap();
    assert_eq!(stored, data);

    let args = [
        "fit-kmeans",
        "--data",
        "data.mrc",
        "--k",
        "6",
        "--restarts",
        "4",
        "--seed",
        "9",
    ];
    assert!(manrec(dir.path(), &args).status.success());
    let first = fs::read(dir.path().join("model.json")).unwrap();
    let cfg = FitConfig::default().with_restarts(4);
    let model = kmeans::fit(&data, 6, &cfg, RngSeed(9)).unwrap();
    let expected = serde_json::to_string_pretty(&model).unwrap() + "\n";
    assert_eq!(String::from_utf8(first.clone()).unwrap(), expected);
    assert!(manrec(dir.path(), &args).status.success());
    assert_eq!(fs::read(dir.path().join("model.json")).unwrap(), first);

    let out = manrec(
        dir.path(),
        &[
            "fit-kflats",
            "--data",
            "data.mrc",
            "--k",
            "4",
            "--d",
            "2",
            "--out",
            "f",
        ],
    );
    assert!(out.status.success());
    let flats = json(dir.path().join("f/model.json"));
    assert_eq!(flats["d"].as_u64(), Some(2));
    assert_eq!(flats["flats"].as_array().unwrap().len(), 4);
}

#[test]
fn bounds_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = manrec(
        dir.path(),
        &[
            "bounds", "--preset", "sphere", "--d", "2", "--n", "10000", "--k", "16", "--delta",
            "0.05",
        ],
    );
    assert!(out.status.success());
    let report = json(dir.path().join("bounds.json"));
    assert_eq!(
        report["statistical"].as_f64(),
        Some(bounds::stat_kmeans(10_000, 16, 0.05).unwrap())
    );
    assert_eq!(report["family"], "kmeans");
}

#[test]
fn example1_reports_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = manrec(dir.path(), &["example1", "--seed", "7"]);
    assert!(out.status.success());
    let v = json(dir.path().join("example1.json"));
    let (e1, e2) = (v["e_k1"].as_f64().unwrap(), v["e_k2"].as_f64().unwrap());
    assert_eq!(v["one_beats_two"].as_bool(), Some(e1 < e2));
    let lib = manrec::harness::example1(RngSeed(7)).unwrap();
    let text = fs::read_to_string(dir.path().join("example1.json")).unwrap();
    for value in [lib.e_k1, lib.e_k2] {
        let literal = serde_json::to_string(&value).unwrap();
        assert!(text.contains(&literal), "{literal} not in {text}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    two_points(dir.path());
    fs::write(
        dir.path().join("run.toml"),
        "out = \"cfg-out\"\nseed = 5\n[fit-kmeans]\ndata = \"two.csv\"\nball = \"ignore\"\nk = 2\n",
    )
    .unwrap();
    let out = manrec(
        dir.path(),
        &["--config", "run.toml", "fit-kmeans", "--k", "1"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let model = json(dir.path().join("cfg-out/model.json"));
    assert_eq!(model["k"].as_u64(), Some(1));
    assert_eq!(model["seed"].as_u64(), Some(5));

    fs::write(dir.path().join("bad.toml"), "[fit-kmeans]\nkay = 2\n").unwrap();
    let out = manrec(dir.path(), &["--config", "bad.toml", "fit-kmeans"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kay"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    two_points(dir.path());
    let code = |args: &[&str]| manrec(dir.path(), args).status.code();
    assert_eq!(code(&["fit-kmeans", "--k", "1"]), Some(2));
    assert_eq!(
        code(&["fit-kmeans", "--data", "missing.mrc", "--k", "1"]),
        Some(3)
    );
    assert_eq!(code(&["--config", "missing.toml", "example1"]), Some(3));
    assert_eq!(code(&["no-such-command"]), Some(2));
    assert_eq!(
        code(&[
            "fit-kmeans",
            "--data",
            "two.mrc",
            "--ball",
            "ignore",
            "--k",
            "3"
        ]),
        Some(2)
    );
    fs::write(dir.path().join("bad.mrc"), b"MRC0").unwrap();
    assert_eq!(
        code(&["fit-kmeans", "--data", "bad.mrc", "--k", "1"]),
        Some(3)
    );
}

#[test]
fn small_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let out = manrec(
        dir.path(),
        &[
            "tradeoff",
            "--manifold",
            "sphere",
            "--d",
            "2",
            "--train-sizes",
            "30,60",
            "--ks",
            "1..4",
            "--holdout",
            "1000",
            "--repeats",
            "2",
            "--restarts",
            "2",
            "--curves",
            "--out",
            "t",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("t/report.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("n,k,repeat,empirical,holdout,seconds")
    );
    assert_eq!(csv.lines().count(), 1 + 2 * 4 * 2);
    assert!(dir.path().join("t/curve_n30.dat").exists());
    assert!(dir.path().join("t/loglog.dat").exists());
    assert_eq!(
        json(dir.path().join("t/report.json"))["bound_rows"]
            .as_array()
            .unwrap()
            .len(),
        8
    );

    let out = manrec(
        dir.path(),
        &[
            "rates",
            "--train-sizes",
            "20,200,600,2000",
            "--holdout",
            "1000",
            "--repeats",
            "1",
            "--restarts",
            "2",
            "--out",
            "r",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(dir.path().join("r/rates_kmeans.json"));
    assert!(r["fit"]["slope"].is_number());
    assert!(dir.path().join("r/rates_kflats.csv").exists());

    assert!(manrec(
        dir.path(),
        &["sample", "--manifold", "circle", "--n", "10", "--seed", "1"]
    )
    .status
    .success());
    let out = manrec(
        dir.path(),
        &["oracle-check", "--data", "data.mrc", "--k", "2", "--d", "1"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = json(dir.path().join("oracle.json"));
    for row in rows.as_array().unwrap() {
        assert!(row["excess"].as_f64().unwrap() >= -1e-9);
    }
    let out = manrec(
        dir.path(),
        &["select-k", "--data", "data.mrc", "--ks", "1..3"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sel = json(dir.path().join("selection.json"));
    assert_eq!(sel["errors"].as_array().unwrap().len(), 3);
}
