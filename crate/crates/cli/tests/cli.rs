use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dramsey_cli::schema::{
    BuildOutput, DeriveOutput, FieldInfo, ScanOutput, SearchOutput, TablesOutput, VerifyOutput,
};
use dramsey_cli::CliError;
use dramsey_core::ttsearch::{ResultCache, SearchValue};
use dramsey_core::verifier::CheckStatus;
use serde::de::DeserializeOwned;

fn dramsey(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dramsey"))
        .arg("--cache")
        .arg(cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(cache: &Path, args: &[&str]) -> String {
    let out = dramsey(cache, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json<T: DeserializeOwned>(cache: &Path, args: &[&str]) -> T {
    let text = ok(cache, &[&["--format", "json"], args].concat());
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"))
}

fn scratch() -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    (dir, cache)
}

#[test]
fn field_info_json() {
    let (_d, cache) = scratch();
    let info: FieldInfo = json(&cache, &["field", "info", "27"]);
    assert_eq!(
        (info.p, info.n, info.modulus_text.as_str()),
        (3, 3, "x^3 + 2x + 1")
    );
    assert_eq!(info.admissible_k, vec![2]);
}

#[test]
fn usage_errors_exit_2() {
    let (_d, cache) = scratch();
    let out = dramsey(&cache, &["field", "info", "12"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a prime power"));

    let out = dramsey(
        &cache,
        &["search", "exists", "--k", "4", "--q", "11", "--m", "3"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q ≡ k+1 (mod 2k)"));

    assert_eq!(dramsey(&cache, &["bogus"]).status.code(), Some(2));
    assert_eq!(
        dramsey(
            &cache,
            &["verify", "theorem", "--k", "4", "--q", "13", "--m", "3"]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn exit_codes() {
    assert_eq!(CliError::CheckFailed.exit_code(), 1);
    assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
    assert_eq!(CliError::Runtime(String::new()).exit_code(), 2);
}

#[test]
fn build_mathon_file() {
    let (dir, cache) = scratch();
    let path = dir.path().join("m.txt");
    let b: BuildOutput = json(
        &cache,
        &[
            "build",
            "mathon",
            "--k",
            "2",
            "--q",
            "7",
            "--out",
            path.to_str().unwrap(),
        ],
    );
    assert_eq!((b.n, b.digon_pairs, b.file), (16, 8, None));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("digraph mathon k=2 q=7 n=16"));
    assert_eq!(text.lines().filter(|l| l.ends_with(" 0")).count(), 16);

    let seeded: BuildOutput = json(
        &cache,
        &["build", "mathon", "--k", "2", "--q", "7", "--seed", "3"],
    );
    assert_eq!((seeded.seed, seeded.digon_pairs), (Some(3), 0));
    assert!(!seeded.file.unwrap().lines().any(|l| l.ends_with(" 0")));
}

#[test]
fn build_paley_text() {
    let (_d, cache) = scratch();
    let text = ok(&cache, &["build", "paley", "--k", "2", "--q", "7"]);
    assert_eq!(text.lines().next(), Some("digraph paley k=2 q=7 n=7"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 21);
}

#[test]
fn search_max_q27_is_5() {
    let (_d, cache) = scratch();
    let text = ok(&cache, &["search", "max", "--k", "2", "--q", "27"]);
    assert!(
        text.starts_with("largest TT in paley k=2 q=27 color 1: order 5"),
        "{text}"
    );
    let s: SearchOutput = json(&cache, &["search", "max", "--k", "2", "--q", "27"]);
    assert_eq!(s.value, SearchValue::Max(5));
    assert!(s.cached && s.complete);
    assert_eq!(s.witness.map(|w| w.len()), Some(5));
}

#[test]
fn search_count_and_exists() {
    let (_d, cache) = scratch();
    let s: SearchOutput = json(
        &cache,
        &[
            "--no-cache",
            "search",
            "count",
            "--k",
            "2",
            "--q",
            "7",
            "--m",
            "3",
        ],
    );
    assert_eq!(s.value, SearchValue::Count(21));
    let brute: SearchOutput = json(
        &cache,
        &[
            "--no-cache",
            "search",
            "count",
            "--k",
            "2",
            "--q",
            "7",
            "--m",
            "3",
            "--method",
            "brute",
        ],
    );
    assert_eq!(brute.value, s.value);
    let e: SearchOutput = json(
        &cache,
        &[
            "--no-cache",
            "search",
            "exists",
            "--k",
            "2",
            "--q",
            "27",
            "--m",
            "6",
        ],
    );
    assert_eq!((e.value, e.witness), (SearchValue::Exists(false), None));
    assert!(!cache.exists());
}

#[test]
fn search_other_graphs() {
    let (_d, cache) = scratch();
    let m: SearchOutput = json(
        &cache,
        &[
            "search", "exists", "--k", "2", "--q", "3", "--m", "3", "--graph", "mathon",
        ],
    );
    assert_eq!(m.value, SearchValue::Exists(true));
    let c: SearchOutput = json(
        &cache,
        &[
            "search",
            "exists",
            "--k",
            "2",
            "--q",
            "3",
            "--m",
            "5",
            "--graph",
            "completion",
            "--seed",
            "9",
        ],
    );
    assert_eq!((c.value, c.seed), (SearchValue::Exists(false), Some(9)));
}

#[test]
fn scan_writes_records() {
    let (_d, cache) = scratch();
    let text = ok(&cache, &["scan", "--k", "4", "--m", "3", "--q-max", "100"]);
    assert!(
        text.trim_end()
            .ends_with("largest q <= 100 with no TT_3 for k=4: 13"),
        "{text}"
    );
    assert!(!ResultCache::open(&cache).unwrap().records().is_empty());
    let s: ScanOutput = json(&cache, &["scan", "--k", "4", "--m", "3", "--q-max", "100"]);
    assert_eq!(s.outcome.largest, Some(13));
}

#[test]
fn verify_json_and_records() {
    let (_d, cache) = scratch();
    let v: VerifyOutput = json(&cache, &["verify", "structure", "--k", "4", "--q", "13"]);
    assert!(v.passed);
    assert_eq!(v.reports.len(), 6);
    let t: VerifyOutput = json(
        &cache,
        &[
            "verify", "theorem", "--k", "2", "--q", "7", "--m", "4", "--trials", "5",
        ],
    );
    assert_eq!(t.reports[0].status, CheckStatus::Pass);
    assert_eq!(ResultCache::open(&cache).unwrap().records().len(), 7);
    let text = ok(
        &cache,
        &[
            "verify", "theorem", "--k", "2", "--q", "3", "--m", "3", "--trials", "2",
        ],
    );
    assert_eq!(
        text,
        "PASS theorem k=2 q=3 m=3: 4 completions of order 8 have no monochromatic TT_5\n"
    );
}

#[test]
fn bounds_json() {
    let (_d, cache) = scratch();
    let d: DeriveOutput = json(
        &cache,
        &["bounds", "derive", "--t-max", "2", "--m-max", "8"],
    );
    assert_eq!(d.table.value(1, 8), Some(57));
    assert_eq!(d.table.value(2, 8), Some(3321));
    let t: TablesOutput = json(&cache, &["bounds", "tables"]);
    assert_eq!(t.text, ok(&cache, &["bounds", "tables"]));
    assert_eq!(t.tables.table1.len(), 14);
}

#[test]
fn facts_override() {
    let (dir, cache) = scratch();
    let bad = dir.path().join("facts.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = dramsey(
        &cache,
        &["--facts", bad.to_str().unwrap(), "bounds", "tables"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budget_records_partial_result() {
    let (_d, cache) = scratch();
    let args = [
        "--budget", "0", "search", "count", "--k", "2", "--q", "199", "--m", "9", "--method",
        "brute",
    ];
    let text = ok(&cache, &args);
    assert!(text.ends_with("partial: time budget exhausted\n"), "{text}");
    let records = ResultCache::open(&cache).unwrap().records().to_vec();
    assert_eq!(records.len(), 1);
    assert!(records[0].at_limit);
    let again: SearchOutput = json(&cache, &args);
    assert!(!again.cached && !again.complete);
}

#[test]
fn output_independent_of_worker_count() {
    let (_d, cache) = scratch();
    for args in [
        &["search", "count", "--k", "2", "--q", "43", "--m", "5"][..],
        &["search", "max", "--k", "2", "--q", "47"],
        &["bounds", "tables"],
    ] {
        let one = ok(&cache, &[args, &["--no-cache", "--threads", "1"]].concat());
        let eight = ok(&cache, &[args, &["--no-cache", "--threads", "8"]].concat());
        assert_eq!(one, eight, "{args:?}");
    }
}
