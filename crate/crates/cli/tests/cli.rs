use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodgelim"))
        .args(args)
        .env_remove("HODGELIM_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn edited(name: &str, f: impl FnOnce(&mut serde_json::Value)) -> tempfile::NamedTempFile {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    f(&mut v);
    let file = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    std::fs::write(file.path(), serde_json::to_string_pretty(&v).unwrap()).unwrap();
    file
}

#[test]
fn validate_accepts_every_fixture() {
    for name in [
        "sl2_pure",
        "rank4_mixed",
        "nf_acceptance",
        "diagonal_locus",
        "split_extension",
        "analyzer_counter",
        "pure_hs",
    ] {
        let o = run(&["validate", fixture(name).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("verdict: valid"), "{name}");
    }
}

#[test]
fn constant_term_in_gamma_is_a_semantic_failure() {
    let f = edited("diagonal_locus", |v| {
        v["gamma"].as_array_mut().unwrap().push(serde_json::json!({
            "exponents": [0, 0],
            "matrix": [["0", "0", "0"], ["1", "0", "0"], ["0", "0", "0"]]
        }));
    });
    let o = run(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("constant term"), "{}", stdout(&o));
}

#[test]
fn malformed_scalar_is_an_input_error_with_location() {
    let f = edited("sl2_pure", |v| {
        v["N"][0][0][1] = serde_json::json!("1/0x");
    });
    let o = run(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn missing_file_is_an_input_error() {
    let o = run(&["validate", "/nonexistent/scenario.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn limit_of_the_acceptance_sequence_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a1.csv");
    let f = fixture("nf_acceptance");
    let o = run(&["limit", f.to_str().unwrap(), "--sequence", "a1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,y1,y2,t1,t2,error,norm"));
    assert_eq!(lines.count(), 40);
}

#[test]
fn limit_with_zero_tolerance_fails() {
    let f = fixture("nf_acceptance");
    let o = run(&["limit", f.to_str().unwrap(), "--sequence", "a1", "--tol", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn limit_requires_a_sequence() {
    let f = fixture("nf_acceptance");
    let o = run(&["limit", f.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unavailable_splitting_exits_with_three() {
    let f = fixture("rank4_mixed");
    let o = run(&["limit", f.to_str().unwrap(), "--sequence", "m; x = 0.1", "--m-max", "5", "--provider", "zero"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = run(&["limit", f.to_str().unwrap(), "--sequence", "m; x = 0.1", "--m-max", "5", "--provider", "cks"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn zero_locus_on_a_pure_structure_is_rejected() {
    let o = run(&["zero-locus", fixture("pure_hs").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn zero_locus_verdicts() {
    let o = run(&["zero-locus", fixture("split_extension").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: dense-suspect"));

    let o = run(&[
        "zero-locus",
        fixture("diagonal_locus").to_str().unwrap(),
        "--certify",
        "--radii",
        "0.1:0.5:3",
        "--angles",
        "6",
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("verdict: curve-suspect"), "{s}");
    assert!(s.contains("certified root"), "{s}");
}

#[test]
fn analyzer_verdicts() {
    let o = run(&["analyze", fixture("split_extension").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: zero locus = S"));

    let o = run(&[
        "analyze",
        fixture("analyzer_counter").to_str().unwrap(),
        "--grading",
        r#"[["0","0","0"],["0","-1","0"],["0","0","-1"]]"#,
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("density refuted"), "{s}");
    assert!(s.contains("Ω = [1]"), "{s}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let f = fixture("nf_acceptance");
    let args = ["validate", f.to_str().unwrap(), "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["census", f.to_str().unwrap(), "--size", "12"]);
    let d = Command::new(env!("CARGO_BIN_EXE_hodgelim"))
        .args(["census", f.to_str().unwrap(), "--size", "12"])
        .env("HODGELIM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&d), 0);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn thread_count_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_hodgelim"))
        .args(["validate", fixture("sl2_pure").to_str().unwrap()])
        .env("HODGELIM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn fixtures_are_canonically_formatted() {
    for name in ["sl2_pure", "nf_acceptance", "diagonal_locus"] {
        let o = run(&["fmt", "--check", fixture(name).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
    }
    let f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    let compact: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("sl2_pure")).unwrap()).unwrap();
    std::fs::write(f.path(), serde_json::to_string(&compact).unwrap()).unwrap();
    let p = f.path().to_str().unwrap();
    assert_eq!(code(&run(&["fmt", "--check", p])), 1);
    assert_eq!(code(&run(&["fmt", "--write", p])), 0);
    assert_eq!(code(&run(&["fmt", "--check", p])), 0);
}
