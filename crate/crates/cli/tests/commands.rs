use std::fs;
use std::path::Path;

use tempfile::TempDir;
use toeplitz_cli::{generate_paper_example, run_command, serialize_tower};

fn run(args: &[&str]) -> (i32, String) {
    run_command(std::iter::once("toeplitz").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn has_line(out: &str, line: &str) -> bool {
    out.lines().any(|l| l == line)
}

#[test]
fn compare_reports_reflexive_certificate() {
    let dir = TempDir::new().unwrap();
    let gen = write(dir.path(), "gen.tw", &serialize_tower(&generate_paper_example(2)));
    let (code, out) = run(&["compare", &gen, &gen]);
    assert_eq!(code, 0, "{out}");
    assert!(has_line(&out, "verdict = conjugate-certified"));
    assert!(has_line(&out, "stage = 5"));
    assert!(has_line(&out, "shift = 0"));
}

#[test]
fn compare_reports_scale_mismatch() {
    let dir = TempDir::new().unwrap();
    let gen = write(dir.path(), "gen.tw", &serialize_tower(&generate_paper_example(1)));
    let triadic = write(
        dir.path(),
        "triadic.tw",
        "alphabet = 0 1\nscale = 3^inf\nperiod 3 = 0 1 _\nperiod 9 = 0 1 0 0 1 _ 0 1 1\n",
    );
    let (code, out) = run(&["compare", &gen, &triadic]);
    assert_eq!(code, 1, "{out}");
    assert!(has_line(&out, "verdict = not-conjugate"));
    assert!(has_line(&out, "reason = scale"));
}

#[test]
fn analyze_reports_scale_truncation() {
    let dir = TempDir::new().unwrap();
    let gen3 = write(dir.path(), "gen3.tw", &serialize_tower(&generate_paper_example(3)));
    let (code, out) = run(&["analyze", &gen3]);
    assert_eq!(code, 0, "{out}");
    assert!(has_line(&out, "scale.certified = 2^2 * 5"), "{out}");
    assert!(has_line(&out, "scale.pending = 40"), "{out}");
    assert!(has_line(&out, "period.5.skeleton = 0___0"), "{out}");
    assert!(has_line(&out, "growth.block_trend = not-monotone"), "{out}");
    let (_, json) = run(&["analyze", &gen3, "--format", "json", "--report-depth", "1"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["scale"]["certified"], "2^2 * 5");
    assert_eq!(v["period"]["5"]["in"], 2);
    assert!(v["period"].get("10").is_none());
}

#[test]
fn factor_and_generate() {
    let (code, out) = run(&["factor", "--scale", "2^inf * 5", "--count", "4"]);
    assert_eq!(code, 0);
    assert!(has_line(&out, "factorization = 2, 4, 40, 80"), "{out}");

    let (code, out) = run(&["generate", "paper-example", "--stages", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "alphabet = 0 1\nscale = 2^inf * 5\nperiod 5 = 0 _ _ _ 0\nperiod 10 = 0 _ 1 _ 0 0 _ _ _ 0\n");

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.tw");
    let path = path.to_str().unwrap();
    let (code, out) = run(&["generate", "random", "--seed", "5", "-o", path]);
    assert_eq!(code, 0, "{out}");
    let (again, _) = run(&["generate", "random", "--seed", "5"]);
    assert_eq!(again, 0);
    assert_eq!(run(&["generate", "random", "--seed", "5"]).1, fs::read_to_string(path).unwrap());
    assert_eq!(run(&["validate", path]).0, 0);
}

#[test]
fn transforms_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let gen = write(dir.path(), "gen.tw", &serialize_tower(&generate_paper_example(1)));
    let permuted = dir.path().join("perm.tw").to_str().unwrap().to_string();
    let (code, out) = run(&["permute", &gen, "--period", "5", "--perms", "1,0;id;id;id;1,0", "-o", &permuted]);
    assert_eq!(code, 0, "{out}");
    assert!(fs::read_to_string(&permuted).unwrap().contains("period 10 = 1 _ 1 _ 1 1 _ _ _ 1"));
    let (code, out) = run(&["compare", &gen, &permuted]);
    assert_eq!(code, 0, "{out}");

    let rotated = dir.path().join("rot.tw").to_str().unwrap().to_string();
    assert_eq!(run(&["rotate", &gen, "-k", "-10", "-o", &rotated]).0, 0);
    assert_eq!(fs::read_to_string(&rotated).unwrap(), fs::read_to_string(&gen).unwrap());

    let code_file = write(dir.path(), "swap.code", "len = 0\n0 -> 1\n1 -> 0\n");
    let coded = dir.path().join("coded.tw").to_str().unwrap().to_string();
    let (code, out) = run(&["apply-code", &gen, "--code", &code_file, "-o", &coded]);
    assert_eq!(code, 0, "{out}");
    assert!(has_line(&out, "code.radius = 0"));
}

#[test]
fn invariant_of_a_tower_with_itself() {
    let dir = TempDir::new().unwrap();
    let gen = write(dir.path(), "gen.tw", &serialize_tower(&generate_paper_example(3)));
    let (code, out) = run(&["invariant", &gen, &gen, "--stages", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(has_line(&out, "factorization = 2, 4, 40"), "{out}");
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["compare"]).0, 3);
    assert_eq!(run(&["no-such-command"]).0, 3);
    assert_eq!(run(&["--help"]).0, 0);
    let bad = write(dir.path(), "bad.tw", "alphabet = 0 1\nperiod 10 = 0 _ 1 _ 0 0 _ _ _ 0\nperiod 5 = 0 _ _ _ 0\n");
    let (code, out) = run(&["validate", &bad]);
    assert_eq!(code, 4);
    assert!(out.contains("line 3, column 8: periods must increase"), "{out}");
    let invalid = write(dir.path(), "invalid.tw", "alphabet = 0 1\nperiod 2 = 0 _\nperiod 4 = 1 _ 0 _\n");
    assert_eq!(run(&["validate", &invalid]).0, 5);
    let missing = dir.path().join("missing.tw");
    assert_eq!(run(&["validate", missing.to_str().unwrap()]).0, 6);
    assert_eq!(run(&["factor", "--scale", "4"]).0, 4);
}

#[test]
fn corpus_matrix_is_sorted_by_name() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "b.tw", &serialize_tower(&generate_paper_example(1)));
    write(dir.path(), "a.tw", &serialize_tower(&generate_paper_example(2)));
    write(dir.path(), "notes.txt", "ignored");
    let (code, out) = run(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(has_line(&out, "file.0 = a.tw"));
    assert!(has_line(&out, "file.1 = b.tw"));
    assert!(has_line(&out, "pair.0.0 = conjugate-certified"));
}
