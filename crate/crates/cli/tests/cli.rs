use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lzsi_core::index::{build_index, IndexConfig, Variant};
use lzsi_core::parsing::Flavor;
use tempfile::TempDir;

const E: &[u8] = b"alabar_a_la_alabarda$";

fn lzsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lzsi")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    index: PathBuf,
}

fn fixture(text: &[u8], extra: &[&str]) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("text");
    let index = dir.path().join("text.lzsi");
    std::fs::write(&input, text).unwrap();
    let mut args = vec!["build", p(&input), p(&index)];
    args.extend_from_slice(extra);
    let out = lzsi(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    Fixture { dir, index }
}

#[test]
fn build_reports_and_loads() {
    let f = fixture(E, &["--flavor", "lz77", "--variant", "1"]);
    let out = lzsi(&["stats", p(&f.index)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("n' 9\n"), "{text}");
    assert!(text.contains("h 3\n") && text.contains("delta 1\n"));
    let json: serde_json::Value = serde_json::from_slice(&lzsi(&["stats", "--json", p(&f.index)]).stdout).unwrap();
    assert_eq!(json["n_prime"], 9);
    assert_eq!(json["variant"], 1);
    assert_eq!(json["lz_bits"], 117);
}

#[test]
fn build_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::write(&empty, b"").unwrap();
    let out = lzsi(&["build", p(&empty), p(&dir.path().join("x"))]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty input"));

    let input = dir.path().join("e");
    std::fs::write(&input, E).unwrap();
    let out = lzsi(&["build", p(&input), p(&dir.path().join("x")), "--variant", "9"]);
    assert_eq!(code(&out), 1);
    let out = lzsi(&["build", p(&dir.path().join("missing")), p(&dir.path().join("x"))]);
    assert_eq!(code(&out), 2);
    let out = lzsi(&["build", p(&input), p(&dir.path().join("no/such/dir/x"))]);
    assert_eq!(code(&out), 2);
    let out = lzsi(&["frobnicate"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sample_rate_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("e");
    std::fs::write(&input, E).unwrap();
    let index = dir.path().join("e.lzsi");
    let run = |rate: &str| {
        Command::new(env!("CARGO_BIN_EXE_lzsi"))
            .args(["build", p(&input), p(&index)])
            .env("LZSI_SAMPLE_RATE", rate)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(stdout(&lzsi(&["locate", p(&index), "la"])), "2\n10\n14\n");
    assert_eq!(code(&run("0")), 1);
}

#[test]
fn locate_count_exists() {
    let f = fixture(E, &[]);
    let idx = p(&f.index);
    assert_eq!(stdout(&lzsi(&["locate", idx, "la"])), "2\n10\n14\n");
    let none = lzsi(&["locate", idx, "zz"]);
    assert_eq!((code(&none), stdout(&none)), (0, String::new()));
    let pat = f.dir.path().join("pat");
    std::fs::write(&pat, b"la").unwrap();
    assert_eq!(stdout(&lzsi(&["locate", idx, &format!("@{}", p(&pat))])), "2\n10\n14\n");
    assert_eq!(stdout(&lzsi(&["count", idx, "a"])), "9\n");
    assert_eq!(stdout(&lzsi(&["exists", idx, "alabarda"])), "true\n");
    assert_eq!(stdout(&lzsi(&["exists", idx, "bb"])), "false\n");
    assert_eq!(code(&lzsi(&["locate", idx, ""])), 1);
}

#[test]
fn locate_json_matches_library() {
    let text: Vec<u8> = b"abracadabra ".iter().cycle().take(600).copied().collect();
    let f = fixture(&text, &["--flavor", "lzend", "--variant", "3"]);
    let lib = build_index(&text, IndexConfig::new(Flavor::LzEnd, Variant::TrieRevIds)).unwrap();
    for pat in ["abra", "a", "ra a", "cad", "zzz"] {
        let occ = lib.locate(pat.as_bytes()).unwrap();
        let out = stdout(&lzsi(&["locate", "--json", p(&f.index), pat]));
        let want = format!(
            "{}\n",
            serde_json::json!({
                "positions": occ.positions,
                "primary": occ.primary_count,
                "secondary": occ.secondary_count,
            })
        );
        assert_eq!(out, want);
        let lines: String = occ.positions.iter().map(|x| format!("{x}\n")).collect();
        assert_eq!(stdout(&lzsi(&["locate", p(&f.index), pat])), lines);
    }
}

#[test]
fn extract_ranges() {
    let f = fixture(E, &["--variant", "4"]);
    let idx = p(&f.index);
    assert_eq!(lzsi(&["extract", idx, "13", "7"]).stdout, b"alabard");
    assert_eq!(lzsi(&["extract", idx, "1", "21"]).stdout, E);
    assert_eq!(code(&lzsi(&["extract", idx, "22", "1"])), 1);
    assert_eq!(code(&lzsi(&["extract", idx, "20", "5"])), 1);
    assert_eq!(code(&lzsi(&["extract", idx, "1", "0"])), 1);
}

#[test]
fn load_errors() {
    let f = fixture(E, &[]);
    let missing = f.dir.path().join("missing");
    assert_eq!(code(&lzsi(&["locate", p(&missing), "a"])), 2);
    let bytes = std::fs::read(&f.index).unwrap();
    let bad = f.dir.path().join("bad");
    std::fs::write(&bad, &bytes[..bytes.len() / 2]).unwrap();
    let out = lzsi(&["locate", p(&bad), "a"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncated"));
    std::fs::write(&bad, b"not an index at all").unwrap();
    assert_eq!(code(&lzsi(&["stats", p(&bad)])), 3);
}

#[test]
fn parse_lists_phrases() {
    let f = fixture(E, &[]);
    let input = f.dir.path().join("text");
    let out = stdout(&lzsi(&["parse", p(&input)]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "flavor lz77 n 21 phrases 9");
    assert_eq!(lines[8], "8\t13\t1\t6\talabard");
    assert_eq!(lines[10], "h 3 delta 1 avg_c 1.714");
    let out = stdout(&lzsi(&["parse", "--flavor", "lzend", p(&input)]));
    assert!(out.starts_with("flavor lzend n 21"));
}

#[test]
fn bench_reports_json() {
    let text: Vec<u8> = (0..3000u32).map(|i| b"acgt"[(i * i % 7 % 4) as usize]).collect();
    let f = fixture(&text, &[]);
    let idx = p(&f.index);
    let run = |extra: &[&str]| {
        let mut args = vec!["bench", "--json", idx];
        args.extend_from_slice(extra);
        lzsi(&args)
    };
    let out = run(&["--queries", "20", "--pattern-len", "5", "--extract-len", "100", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let text_out = stdout(&out);
    assert!(text_out.ends_with('\n') && text_out.lines().count() == 1);
    let v: serde_json::Value = serde_json::from_str(&text_out).unwrap();
    for key in ["extract_chars_per_sec", "usec_per_occurrence", "n", "n_prime", "variant"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["n"], 3000);
    assert_eq!(v["variant"], 5);
    assert!(v["extract_chars_per_sec"].as_f64().unwrap() > 0.0);
    let again: serde_json::Value = serde_json::from_slice(
        &run(&["--queries", "20", "--pattern-len", "5", "--extract-len", "100", "--seed", "3"]).stdout,
    )
    .unwrap();
    assert_eq!(v["occurrences"], again["occurrences"]);

    let empty = run(&["--queries", "0"]);
    assert_eq!(code(&empty), 0);
    let v: serde_json::Value = serde_json::from_slice(&empty.stdout).unwrap();
    assert!(v["extract_chars_per_sec"].is_null() && v["usec_per_occurrence"].is_null());

    assert_eq!(code(&run(&["--pattern-len", "3001"])), 1);
    assert_eq!(code(&run(&["--extract-len", "0"])), 1);
    let human = stdout(&lzsi(&["bench", idx, "--queries", "5"]));
    assert!(human.contains("chars/s"));
}

#[test]
fn selftest_passes() {
    let all_bytes: Vec<u8> = (0..=255).collect();
    for text in [E, &[b'x'; 300][..], &all_bytes] {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("t");
        std::fs::write(&input, text).unwrap();
        let out = lzsi(&["selftest", p(&input), "--patterns", "10"]);
        let report = stdout(&out);
        assert_eq!(code(&out), 0, "{report}");
        assert!(report.lines().all(|l| l.starts_with("PASS ")), "{report}");
        assert!(report.contains("PASS locate"));
    }
}
