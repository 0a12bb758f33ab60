use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;
use tempfile::TempDir;

use unimetric::linalg::random::haar_random_unitary;
use unimetric::metrics::sup_distance;
use unimetric::ComplexMatrix;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_unimetric"));
    c.env_remove("UNIMETRIC_SEED");
    c
}

fn write(dir: &TempDir, name: &str, m: &ComplexMatrix) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, m.to_json_string()).unwrap();
    p
}

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).unwrap()
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    bin()
        .args(args.iter().map(|a| a.as_ref()))
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn identity(dir: &TempDir, n: usize) -> PathBuf {
    write(dir, &format!("id{n}.json"), &ComplexMatrix::identity(n))
}

#[test]
fn dist_quarter_turn() {
    let dir = TempDir::new().unwrap();
    let i = identity(&dir, 2);
    let s = write(
        &dir,
        "s.json",
        &ComplexMatrix::from_phases(&[0.0, FRAC_PI_2]),
    );
    let v = json(&run(&[&"dist", &i, &s]));
    assert!((v["value"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["method"], "closed_form");
    assert!((v["alpha"].as_f64().unwrap() - FRAC_PI_2).abs() < 1e-12);
    assert_eq!(v["eigen_angles"].as_array().unwrap().len(), 2);
    assert_eq!(v["maximizer"]["rows"], 2);
}

#[test]
fn dist_self_is_zero_and_matches_library() {
    let dir = TempDir::new().unwrap();
    let u = haar_random_unitary(3, 5);
    let w = haar_random_unitary(3, 6);
    let up = write(&dir, "u.json", u.matrix());
    let wp = write(&dir, "w.json", w.matrix());
    let v = json(&run(&[&"dist", &up, &up]));
    assert!(v["value"].as_f64().unwrap() < 1e-7);
    let v = json(&run(&[&"dist", &up, &wp]));
    // matrices round-trip bit-exactly, so the values agree exactly
    let u2 = unimetric::UnitaryOperator::new(
        ComplexMatrix::from_json_str(&u.matrix().to_json_string()).unwrap(),
    )
    .unwrap();
    let w2 = unimetric::UnitaryOperator::new(
        ComplexMatrix::from_json_str(&w.matrix().to_json_string()).unwrap(),
    )
    .unwrap();
    assert_eq!(
        v["value"].as_f64().unwrap(),
        sup_distance(&u2, &w2).unwrap().value
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let i2 = identity(&dir, 2);
    let i3 = identity(&dir, 3);
    let out = run(&[&"dist", &i2, &i3]);
    assert_eq!(code(&out), 3);
    assert!(!out.stderr.is_empty());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"rows\": 2").unwrap();
    assert_eq!(code(&run(&[&"dist", &i2, &bad])), 2);

    let nu = write(&dir, "nu.json", &real(&[&[1.0, 1.0], &[0.0, 1.0]]));
    assert_eq!(code(&run(&[&"dist", &i2, &nu])), 4);

    assert_eq!(
        code(&run(&[&"dist", &i2, &dir.path().join("missing.json")])),
        5
    );
    assert_eq!(code(&run(&[&"dist"])), 2);
    assert_eq!(code(&run(&[&"tensor", &"--d1", &"1.5", &"--d2", &"0"])), 5);
    assert_eq!(code(&run(&[&"stabilizer", &"--gens", &"+ZQ"])), 2);
    assert_eq!(code(&run(&[&"stabilizer", &"--gens", &"+ZZ,+X"])), 3);
}

#[test]
fn help_documents_exit_codes() {
    let out = run(&[&"--help"]);
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("Exit codes"));
    assert!(s.contains("not unitary"));
}

#[test]
fn distinguish_verdicts() {
    let dir = TempDir::new().unwrap();
    let i4 = identity(&dir, 4);
    let cnot = write(
        &dir,
        "cnot.json",
        &real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]),
    );
    let v = json(&run(&[&"distinguish", &i4, &cnot]));
    assert_eq!(v["distinguishable"], true);
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["witness"]["rows"], 4);

    let i2 = identity(&dir, 2);
    let t = write(
        &dir,
        "t.json",
        &ComplexMatrix::from_phases(&[0.0, FRAC_PI_4]),
    );
    let v = json(&run(&[&"distinguish", &i2, &t]));
    assert_eq!(v["distinguishable"], false);
    assert!((v["overlap_bound"].as_f64().unwrap() - FRAC_PI_8.cos()).abs() < 1e-10);

    let u = haar_random_unitary(3, 9);
    let cu = u.with_phase(Complex64::from_polar(1.0, 0.7)).unwrap();
    let up = write(&dir, "u.json", u.matrix());
    let cp = write(&dir, "cu.json", cu.matrix());
    let v = json(&run(&[&"distinguish", &up, &cp]));
    assert_eq!(v["distinguishable"], false);
    assert!((v["overlap_bound"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn tensor_rule() {
    let v = json(&run(&[&"tensor", &"--d1", &"0.6", &"--d2", &"0.6"]));
    assert!((v["value"].as_f64().unwrap() - 0.96).abs() < 1e-12);
    let v = json(&run(&[&"tensor", &"--d1", &"0.9", &"--d2", &"0.8"]));
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn face_distance_on_a_line() {
    let dir = TempDir::new().unwrap();
    let i = identity(&dir, 3);
    let d = write(
        &dir,
        "d.json",
        &ComplexMatrix::from_phases(&[0.0, 1.0, 2.0]),
    );
    let b = write(
        &dir,
        "b.json",
        &real(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]),
    );
    let v = json(&run(&[&"face-dist", &i, &d, &"--basis", &b]));
    assert!((v["value"].as_f64().unwrap() - 0.5f64.sin()).abs() < 1e-6);
    let nb = write(
        &dir,
        "nb.json",
        &real(&[&[1.0, 1.0], &[0.0, 1.0], &[0.0, 0.0]]),
    );
    assert_eq!(code(&run(&[&"face-dist", &i, &d, &"--basis", &nb])), 5);
}

#[test]
fn sep_dist_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let i = identity(&dir, 4);
    let swap = write(
        &dir,
        "swap.json",
        &real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
    );
    let v = json(&run(&[
        &"sep-dist",
        &i,
        &swap,
        &"--dims",
        &"2,2",
        &"--seed",
        &"3",
    ]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let u = write(&dir, "u.json", haar_random_unitary(4, 1).matrix());
    let a = run(&[
        &"sep-dist",
        &i,
        &u,
        &"--dims",
        &"2,2",
        &"--seed",
        &"11",
        &"--restarts",
        &"4",
    ]);
    let b = run(&[
        &"sep-dist",
        &i,
        &u,
        &"--dims",
        &"2,2",
        &"--seed",
        &"11",
        &"--restarts",
        &"4",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let env = bin()
        .env("UNIMETRIC_SEED", "11")
        .args([
            "sep-dist".as_ref(),
            i.as_os_str(),
            u.as_os_str(),
            "--dims".as_ref(),
            "2,2".as_ref(),
            "--restarts".as_ref(),
            "4".as_ref(),
        ])
        .output()
        .unwrap();
    assert_eq!(a.stdout, env.stdout);
    assert_eq!(json(&env)["seed"], 11);

    assert_eq!(code(&run(&[&"sep-dist", &i, &u, &"--dims", &"2,3"])), 3);
    assert_eq!(code(&run(&[&"sep-dist", &i, &u, &"--dims", &"2x2"])), 2);
}

#[test]
fn nullspace_of_commuting_diagonals() {
    let dir = TempDir::new().unwrap();
    let z1 = write(
        &dir,
        "z1.json",
        &real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, -1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
        ]),
    );
    let z2 = write(
        &dir,
        "z2.json",
        &real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
        ]),
    );
    let gens = format!("{},{}", z1.display(), z2.display());
    let v = json(&run(&[&"nullspace", &"--gens", &gens]));
    assert_eq!(v["blocks"].as_array().unwrap().len(), 4);
    assert_eq!(v["basis"]["rows"], 4);

    let x = write(&dir, "x.json", &real(&[&[0.0, 1.0], &[1.0, 0.0]]));
    let z = write(&dir, "z.json", &real(&[&[1.0, 0.0], &[0.0, -1.0]]));
    let gens = format!("{},{}", x.display(), z.display());
    assert_eq!(code(&run(&[&"nullspace", &"--gens", &gens])), 5);
}

#[test]
fn stabilizer_bell_basis() {
    let v = json(&run(&[&"stabilizer", &"--gens", &"+ZZ,+XX"]));
    assert_eq!(v["non_abelian"], false);
    let faces = v["faces"].as_array().unwrap();
    assert_eq!(faces.len(), 4);
    for f in faces {
        assert_eq!(f["basis"]["cols"], 1);
    }
    let v = json(&run(&[&"stabilizer", &"--gens", &"X,Z"]));
    assert_eq!(v["non_abelian"], true);
    assert!(v["faces"].as_array().unwrap().is_empty());
}

#[test]
fn search_steps() {
    let v = json(&run(&[&"search", &"--N", &"1024", &"--epsilon", &"0.1"]));
    assert_eq!(v["k"], 47);
    assert_eq!(v["bound_sqrtN"], 51);
    assert!(v["achieved"].as_f64().unwrap() <= 0.1);

    let a = std::f64::consts::FRAC_PI_6.to_string();
    let v = json(&run(&[&"search", &"--alpha", &a, &"--epsilon", &"0.01"]));
    assert_eq!(v["k"], 2);
    assert!(v["achieved"].as_f64().unwrap() < 1e-12);
    assert!(v["bound_sqrtN"].is_null());

    let out = run(&[
        &"search",
        &"--alpha",
        &"0.3",
        &"--gamma",
        &"1.2",
        &"--epsilon",
        &"0.01",
    ]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("best k = 1"));
    assert_eq!(code(&run(&[&"search", &"--epsilon", &"0.1"])), 2);
}

#[test]
fn numrange_emits_polygon() {
    let dir = TempDir::new().unwrap();
    let i = identity(&dir, 3);
    let d = write(
        &dir,
        "d.json",
        &ComplexMatrix::from_phases(&[0.0, 2.0, 4.0]),
    );
    let csv = dir.path().join("polygon.csv");
    let v = json(&run(&[&"numrange", &i, &d, &"--emit", &csv]));
    assert!(v["distance"].as_f64().unwrap() < 1e-6);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,re,im,multiplicity"));
    assert_eq!(lines.count(), 3);

    let out = run(&[&"numrange", &d, &"--format", &"csv"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("theta,re,im,multiplicity"));

    let m = write(&dir, "m.json", &real(&[&[2.0, 1.0], &[0.0, 3.0]]));
    let v = json(&run(&[&"numrange", &m]));
    assert!(v["distance"].as_f64().unwrap() > 1.0);
    assert_eq!(code(&run(&[&"numrange", &m, &"--emit", &csv])), 4);
    assert_eq!(code(&run(&[&"dist", &i, &d, &"--format", &"csv"])), 2);
}

#[test]
fn output_flag_and_text_format() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        &"tensor",
        &"--d1",
        &"0.1",
        &"--d2",
        &"0.2",
        &"--output",
        &out_path,
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(v["value"].is_number());
    let out = run(&[
        &"tensor",
        &"--d1",
        &"0.1",
        &"--d2",
        &"0.2",
        &"--format",
        &"text",
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("d = "));
}

#[test]
fn selftest_reports_every_criterion() {
    let out = run(&[&"selftest"]);
    let s = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        s.lines()
            .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
            .count(),
        13
    );
    assert!(s.contains(" ms "));
    // the semicircle criterion cannot pass, so the suite exits 1
    assert!(s.lines().any(|l| l.starts_with("FAIL  2")));
    assert_eq!(code(&out), 1);
}

#[test]
fn selftest_corrupted_tolerance_fails() {
    let out = run(&[
        &"selftest",
        &"--tolerance-scale",
        &"-1",
        &"--format",
        &"json",
    ]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert!(v["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == false));
}
