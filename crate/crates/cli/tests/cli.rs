use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cmv_spectra::cmv::VerblunskyWord;
use cmv_spectra::construction::{plan_refinement, RefineOptions};
use cmv_spectra::spectral::Spectrum;
use num_complex::Complex64;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmv-spectra"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .env_remove("CMV_SPECTRA_THREADS")
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn constant(a: f64) -> VerblunskyWord {
    VerblunskyWord::constant(2, Complex64::new(a, 0.0), 0.0).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_of_free_word_is_full_circle() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "free.json", &VerblunskyWord::free(2).unwrap().to_json());
    let o = run(d.path(), &["spectrum", "--config", "free.json", "--out", "o"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("o/bands.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "tau_left,tau_right");
    assert_eq!(rows.len(), 2);
    let v: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((v[1] - v[0] - std::f64::consts::TAU).abs() < 1e-12);
    let m = json(d.path().join("o/manifest.json"));
    assert_eq!(m["command"], "spectrum");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["artifacts"].as_array().unwrap().len(), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "half.json", &constant(0.5).to_json());
    for cmd in ["spectrum", "dos", "lyapunov", "schur"] {
        let a = run(
            d.path(),
            &[cmd, "--config", "half.json", "--out", "a", "--grid", "2048"],
        );
        let b = run(
            d.path(),
            &[cmd, "--config", "half.json", "--out", "b", "--grid", "2048"],
        );
        assert_eq!(code(&a), 0);
        assert_eq!(code(&b), 0);
        let (ma, mb) = (
            json(d.path().join("a/manifest.json")),
            json(d.path().join("b/manifest.json")),
        );
        assert_eq!(ma["inputs_sha256"], mb["inputs_sha256"]);
        assert_eq!(ma["artifacts"], mb["artifacts"]);
        for f in ma["artifacts"].as_array().unwrap() {
            let name = f["file"].as_str().unwrap();
            assert_eq!(
                fs::read(d.path().join("a").join(name)).unwrap(),
                fs::read(d.path().join("b").join(name)).unwrap()
            );
        }
    }
}

#[test]
fn csv_values_round_trip() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "half.json", &constant(0.5).to_json());
    assert_eq!(
        code(&run(d.path(), &["spectrum", "--config", "half.json", "--out", "o"])),
        0
    );
    let csv = fs::read_to_string(d.path().join("o/bands.csv")).unwrap();
    let left: f64 = csv.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    let lib = Spectrum::from_word(&constant(0.5)).unwrap();
    assert_eq!(left, lib.bands().bands[0].left);
    let lyap = run(
        d.path(),
        &["lyapunov", "--config", "half.json", "--out", "l", "--grid", "8"],
    );
    assert_eq!(code(&lyap), 0);
    let csv = fs::read_to_string(d.path().join("l/lyapunov.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    // tau = 0 sits in the gap, where L > 0.
    let l0: f64 = csv.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(l0 > 0.1);
}

#[test]
fn config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "half.json", &constant(0.5).to_json());
    write(d.path(), "bad.json", "{\"q\": 3}");
    assert_eq!(code(&run(d.path(), &["spectrum", "--config", "missing.json"])), 2);
    assert_eq!(code(&run(d.path(), &["spectrum"])), 2);
    assert_eq!(code(&run(d.path(), &["spectrum", "--config", "bad.json"])), 2);
    assert_eq!(
        code(&run(d.path(), &["spectrum", "--config", "half.json", "--tol", "-1"])),
        2
    );
    assert_eq!(
        code(&run(d.path(), &["spectrum", "--config", "half.json", "--grid", "4"])),
        2
    );
    assert_eq!(
        code(&run(d.path(), &["spectrum", "--config", "half.json", "--threads", "0"])),
        2
    );
    assert_eq!(code(&run(d.path(), &["verify", "--criteria", "99"])), 2);
    write(
        d.path(),
        "thin.json",
        "{\"seed\": \"half.json\", \"delta\": 0.1, \"extra\": 1}",
    );
    assert_eq!(code(&run(d.path(), &["thin", "--config", "thin.json"])), 2);
}

#[test]
fn thin_reproduces_library_certificate() {
    let d = tempfile::tempdir().unwrap();
    let seed = constant(0.9);
    write(d.path(), "seed.json", &seed.to_json());
    write(d.path(), "thin.json", "{\"seed\": \"seed.json\", \"delta\": 5.0}");
    let o = run(d.path(), &["thin", "--config", "thin.json", "--out", "o"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let plan = plan_refinement(&seed, 5.0, RefineOptions::default()).unwrap();
    let cert = plan.finish(plan.n_min).unwrap();
    let got = json(d.path().join("o/certificate.json"));
    assert_eq!(got["certificate"]["q"], cert.q);
    assert_eq!(got["certificate"]["log_leb"].as_f64().unwrap(), cert.log_leb);
    assert_eq!(got["certificate"]["bound_holds"], true);
    let word = VerblunskyWord::from_json(&fs::read_to_string(d.path().join("o/word.json")).unwrap()).unwrap();
    assert!(word == cert.word);
}

#[test]
fn infeasible_thin_exits_3_with_manifest() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "half.json", &constant(0.5).to_json());
    write(
        d.path(),
        "thin.json",
        "{\"seed\": \"half.json\", \"delta\": 0.1, \"n\": 10}",
    );
    let o = run(d.path(), &["thin", "--config", "thin.json", "--out", "o"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule infeasible"));
    let m = json(d.path().join("o/manifest.json"));
    assert_eq!(m["exit_code"], 3);
}

#[test]
fn tower_rejects_slow_modulus() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "seed.json", &constant(0.9).to_json());
    write(
        d.path(),
        "tower.json",
        r#"{"seed": "seed.json", "mode": "olhc", "eps0": 10.0, "depth": 2, "h": {"kind": "inverse-log-power", "power": 0.5}}"#,
    );
    assert_eq!(
        code(&run(d.path(), &["tower", "--config", "tower.json", "--out", "o"])),
        2
    );
    write(
        d.path(),
        "mode.json",
        r#"{"seed": "seed.json", "mode": "fast", "eps0": 1.0, "depth": 1}"#,
    );
    assert_eq!(
        code(&run(d.path(), &["tower", "--config", "mode.json", "--out", "o"])),
        2
    );
}

#[test]
fn tower_writes_levels_and_reports_stop() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "seed.json", &constant(0.9).to_json());
    write(
        d.path(),
        "tower.json",
        r#"{"seed": "seed.json", "mode": "zero_measure", "eps0": 10.0, "depth": 2, "qcap": 50000}"#,
    );
    let o = run(d.path(), &["tower", "--config", "tower.json", "--out", "o"]);
    assert_eq!(code(&o), 3);
    assert!(d.path().join("o/level_1.json").exists());
    let t = json(d.path().join("o/tower.json"));
    assert_eq!(t["levels"].as_array().unwrap().len(), 1);
    assert_eq!(t["levels"][0]["q"], 1602);
    assert!(t["stopped"].as_str().unwrap().contains("level 2"));
}

fn coin_file(coins: &[[[f64; 2]; 4]]) -> String {
    serde_json::json!({ "period": coins.len(), "coins": coins }).to_string()
}

#[test]
fn walk_shift_survival_and_checkpoints() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "shift.json",
        &coin_file(&[[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]),
    );
    let o = run(
        d.path(),
        &[
            "walk",
            "--config",
            "shift.json",
            "--out",
            "o",
            "--horizon",
            "40",
            "--j",
            "3",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("o/walk.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(csv.lines().next().unwrap(), "n,survival,cesaro,wiener");
    let ns: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(ns, vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 40.0]);
    for r in &rows {
        assert_eq!(r[1], if r[0] <= 3.0 { 1.0 } else { 0.0 });
        assert!((0.0..=1.0).contains(&r[2]) && (0.0..=1.0).contains(&r[3]));
    }
    // Seven times in [-3, 3] carry the mass out of 81.
    assert!((rows[6][2] - 7.0 / 81.0).abs() < 1e-15);
    let w = VerblunskyWord::from_json(&fs::read_to_string(d.path().join("o/walk_word.json")).unwrap()).unwrap();
    assert_eq!(w.max_alpha(), 0.0);
}

#[test]
fn walk_rejects_non_unitary_coins() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "bad.json",
        &coin_file(&[[[1.0, 0.0], [0.5, 0.0], [0.0, 0.0], [1.0, 0.0]]]),
    );
    assert_eq!(code(&run(d.path(), &["walk", "--config", "bad.json", "--out", "o"])), 2);
    write(
        d.path(),
        "mismatch.json",
        r#"{"period": 2, "coins": [[[1,0],[0,0],[0,0],[1,0]]]}"#,
    );
    assert_eq!(
        code(&run(d.path(), &["walk", "--config", "mismatch.json", "--out", "o"])),
        2
    );
}

#[test]
fn verify_reports_counts() {
    let d = tempfile::tempdir().unwrap();
    let o = bin()
        .current_dir(d.path())
        .env("CMV_SPECTRA_THREADS", "1")
        .args(["verify", "--criteria", "1,2,3", "--out", "o"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("AC1 PASS") && stdout.contains("AC3 PASS"));
    assert!(stdout.contains("3 passed, 0 failed, 0 infeasible"));
    let v = json(d.path().join("o/verify.json"));
    assert_eq!(v["passed"], 3);
    assert_eq!(v["criteria"][1]["status"], "pass");
}
