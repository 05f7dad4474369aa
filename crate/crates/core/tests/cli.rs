use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use braidqp::mutation::QP;
use braidqp::Quiver;

const TRIANGLE: &str = "1 2 3 1 2 3 1 2 3 3~ 2~ 1~ 3~ 2~ 1~";

fn braidqp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidqp"))
        .args(args)
        .current_dir(cwd)
        .env_remove("BRAIDQP_TRUNCATION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_writes_json_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let o = braidqp(
        &["build", "--gamma", "a2", "--word", "1 2 1 2 1 2", "--cyclic", "--out", "q.json", "--dot", "q.dot"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("q.json")).unwrap();
    let q = Quiver::from_json(&text).unwrap();
    assert_eq!(q.len(), 6);
    assert_eq!(q.to_json(), text);
    assert!(fs::read_to_string(dir.path().join("q.dot")).unwrap().starts_with("digraph"));
}

#[test]
fn gamma_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "# triangle\nvertices: 1 2 3\nedge: 1 2\nedge: 2 3\nedge: 3 1\n").unwrap();
    let o = braidqp(&["classify", "--gamma", "g.txt", "--word", TRIANGLE], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("basis size: 1"));
}

#[test]
fn malformed_gamma_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "vertices: 1 2\nedge: 1 9\n").unwrap();
    let o = braidqp(&["build", "--gamma", "g.txt", "--word", "1 2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("g.txt") && err.contains('2'), "{err}");
}

#[test]
fn move_output_round_trips_and_mutates_back() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "move", "--gamma", "a2", "--word", "1 2 1 2 1 2 1 2", "--move", "aba@2", "--seeding", "powers-of-two", "--seed",
        "5", "--out", "m.json",
    ];
    assert_eq!(braidqp(&args, dir.path()).status.code(), Some(0));
    let first = fs::read_to_string(dir.path().join("m.json")).unwrap();
    assert_eq!(braidqp(&args, dir.path()).status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("m.json")).unwrap(), first, "same seed, same output");

    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["seed"], 5);
    let qp_text = serde_json::to_string_pretty(&v["qp"]).unwrap();
    fs::write(dir.path().join("qp.json"), &qp_text).unwrap();
    let qp = QP::from_json(&qp_text).unwrap();
    assert_eq!(qp.to_json().unwrap().trim_end(), qp_text.trim_end());

    let vertex = v["vertex"].as_str().unwrap().trim_matches(|c| c == '(' || c == ')').to_string();
    let o = braidqp(&["mutate", "--in", "qp.json", "--vertex", &vertex, "--out", "back.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let back = QP::from_json(&fs::read_to_string(dir.path().join("back.json")).unwrap()).unwrap();
    assert_eq!(back.quiver.vertices().count(), qp.quiver.vertices().count());
}

#[test]
fn equiv_with_coefficient_files() {
    let dir = tempfile::tempdir().unwrap();
    let ones: Vec<String> = vec!["1".into(); 30];
    let mut twice = ones.clone();
    twice[0] = "2".into();
    fs::write(dir.path().join("a.json"), serde_json::to_string(&ones).unwrap()).unwrap();
    fs::write(dir.path().join("b.json"), serde_json::to_string(&twice).unwrap()).unwrap();
    let o = braidqp(&["equiv", "--gamma", "cycle3", "--word", TRIANGLE, "--qp1", "a.json", "--qp2", "b.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict: not equivalent"), "{out}");
    assert!(out.contains("oracle: not equivalent"), "{out}");
}

#[test]
fn verify_move_reports_three_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = braidqp(&["verify-move", "--gamma", "cycle3", "--word", TRIANGLE, "--move", "mixed@9"], dir.path());
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}{}", String::from_utf8_lossy(&o.stderr));
    for tag in ["(i) complexes: ok", "(ii) primitive: ok", "(iii) twisted class: ok"] {
        assert!(out.contains(tag), "{out}");
    }
}

#[test]
fn verify_move_linear_on_the_longest_word_of_a3() {
    let dir = tempfile::tempdir().unwrap();
    let o = braidqp(
        &["verify-move", "--gamma", "a3", "--word", "1 2 3 1 2 1", "--move", "aba@4", "--linear"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("quiver: ok"));
}

#[test]
fn fuzz_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fuzz", "--gamma", "a2", "--count", "10", "--max-len", "10", "--seed", "3"];
    let a = braidqp(&args, dir.path());
    let b = braidqp(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(braidqp(&["--version"], dir.path()).status.code(), Some(0));
    assert_eq!(braidqp(&["build"], dir.path()).status.code(), Some(1));
    assert_eq!(braidqp(&["build", "--gamma", "nope", "--word", "1"], dir.path()).status.code(), Some(1));
    let o = braidqp(&["build", "--gamma", "a2", "--word", "1 1 2 2 2", "--cyclic"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = braidqp(&["verify-move", "--gamma", "a2", "--word", "1 2 1 2", "--move", "commute@1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
