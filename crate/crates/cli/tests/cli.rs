use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sterr(cache: &Path, args: &[&str]) -> Run {
    let Output {
        status,
        stdout,
        stderr,
    } = Command::new(env!("CARGO_BIN_EXE_sterr"))
        .arg("--cache")
        .arg(cache)
        .args(args)
        .env_remove("STERR_CACHE")
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn scratch() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cache.csv");
    (dir, path)
}

#[test]
fn eval_prints_known_values() {
    let (_d, cache) = scratch();
    let run = sterr(&cache, &["eval", "epsilon", "--x-exp", "1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(
        run.stdout.starts_with("0.823164012103108479"),
        "{}",
        run.stdout
    );
    // ⌈192·log₁₀2⌉ = 58 digits after the point.
    assert_eq!(run.stdout.trim().len(), "0.".len() + 58);

    let run = sterr(&cache, &["eval", "li", "--x", "2"]);
    assert!(
        run.stdout
            .starts_with("1.04516378011749278484458888919461313652261557815"),
        "{}",
        run.stdout
    );

    let run = sterr(&cache, &["eval", "li_star", "--x-exp", "1"]);
    assert!(
        run.stdout.starts_with("2.71828182845904523536028747135"),
        "{}",
        run.stdout
    );

    let run = sterr(
        &cache,
        &[
            "--precision",
            "53",
            "eval",
            "li_n",
            "--x",
            "1000",
            "--n",
            "3",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.starts_with("171.789313579"), "{}", run.stdout);
}

#[test]
fn eval_delta_prints_an_ordered_pair() {
    let (_d, cache) = scratch();
    let run = sterr(&cache, &["eval", "delta", "--k", "2", "--M", "1000"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v: Vec<f64> = run.stdout.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(v.len(), 2);
    assert!(v[0] < v[1] && v[0] > 0.0);
    assert!((v[0] - 0.2356).abs() < 1e-3);
}

#[test]
fn usage_and_domain_errors_exit_2() {
    let (_d, cache) = scratch();
    assert_eq!(sterr(&cache, &["eval", "epsilon", "--x", "0.5"]).code, 2);
    assert_eq!(sterr(&cache, &["eval", "li_n", "--x", "10"]).code, 2);
    assert_eq!(sterr(&cache, &["eval", "li"]).code, 2);
    assert_eq!(sterr(&cache, &["sweep", "--k-max", "0"]).code, 2);
    assert_eq!(
        sterr(&cache, &["sweep", "--k-max", "5", "--only", "7"]).code,
        2
    );
    assert_eq!(
        sterr(&cache, &["--precision", "8", "eval", "li", "--x", "2"]).code,
        2
    );
    assert_eq!(sterr(&cache, &["table", "5"]).code, 2);
    assert_eq!(sterr(&cache, &["verify", "--check", "nonsense"]).code, 2);
}

#[test]
fn sweep_is_idempotent() {
    let (_d, cache) = scratch();
    let first = sterr(
        &cache,
        &["--precision", "53", "sweep", "--k-max", "12", "--M", "500"],
    );
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert!(
        first.stdout.starts_with("11 new records"),
        "{}",
        first.stdout
    );
    let text = fs::read_to_string(&cache).unwrap();
    let second = sterr(
        &cache,
        &["--precision", "53", "sweep", "--k-max", "12", "--M", "500"],
    );
    assert!(
        second.stdout.starts_with("0 new records"),
        "{}",
        second.stdout
    );
    assert_eq!(fs::read_to_string(&cache).unwrap(), text);
    let a = first.stdout.rsplit('=').next().unwrap();
    let b = second.stdout.rsplit('=').next().unwrap();
    assert_eq!(a, b);
}

#[test]
fn corrupt_cache_names_the_line_and_exits_3() {
    let (_d, cache) = scratch();
    sterr(
        &cache,
        &["--precision", "53", "sweep", "--k-max", "4", "--M", "200"],
    );
    let mut lines: Vec<String> = fs::read_to_string(&cache)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    let target = lines.iter().position(|l| !l.starts_with('#')).unwrap() + 1;
    lines[target] = "3,200,53,not-a-number,1,0.5,0.1".into();
    fs::write(&cache, lines.join("\n")).unwrap();
    let run = sterr(&cache, &["cache", "inspect"]);
    assert_eq!(run.code, 3);
    assert!(
        run.stderr.contains(&format!("line {}", target + 1)),
        "{}",
        run.stderr
    );
}

#[test]
fn missing_records_are_a_dependency_error() {
    let (_d, cache) = scratch();
    let run = sterr(&cache, &["table", "2"]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("sweep"), "{}", run.stderr);
}

/// Records computed cheaply at small `M` and relabelled as `M = 10^6`, so
/// the table layouts can be exercised without the full sweep.
fn synthetic_table_cache(cache: &Path) {
    let fast = sterr(
        cache,
        &["--precision", "53", "sweep", "--k-max", "1000", "--M", "64"],
    );
    assert_eq!(fast.code, 0, "{}", fast.stderr);
    let rows = "2,5,10,50,100,200,500,1000";
    let wide = sterr(
        cache,
        &["sweep", "--k-max", "1000", "--M", "64", "--only", rows],
    );
    assert_eq!(wide.code, 0, "{}", wide.stderr);
    let text = fs::read_to_string(cache).unwrap();
    let relabelled: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with('#') {
                return l.to_string();
            }
            let mut f: Vec<&str> = l.split(',').collect();
            f[1] = "1000000";
            f.join(",")
        })
        .collect();
    fs::write(cache, relabelled.join("\n") + "\n").unwrap();
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn table_formats_agree() {
    let (_d, cache) = scratch();
    synthetic_table_cache(&cache);
    for id in ["1", "2", "3", "4"] {
        let csv = sterr(&cache, &["table", id, "--format", "csv"]);
        assert_eq!(csv.code, 0, "table {id}: {}", csv.stderr);
        let md = sterr(&cache, &["table", id, "--format", "md"]);
        let json = sterr(&cache, &["table", id, "--format", "json"]);
        let header: Vec<String> = csv
            .stdout
            .lines()
            .next()
            .unwrap()
            .split(',')
            .map(String::from)
            .collect();
        let rows = csv_rows(&csv.stdout);
        assert_eq!(rows.len(), if id == "1" { 9 } else { 8 });

        let md_rows: Vec<Vec<String>> = md
            .stdout
            .lines()
            .skip(2)
            .map(|l| {
                l.trim_matches('|')
                    .split('|')
                    .map(|c| c.trim().to_string())
                    .collect()
            })
            .collect();
        assert_eq!(md_rows, rows, "table {id}");

        let parsed: Value = serde_json::from_str(&json.stdout).unwrap();
        for (obj, row) in parsed.as_array().unwrap().iter().zip(&rows) {
            let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
            assert_eq!(keys, header.iter().collect::<Vec<_>>());
            assert_eq!(obj[&header[0]].to_string(), row[0]);
            for (name, cell) in header.iter().zip(row).skip(1) {
                assert_eq!(obj[name].as_str().unwrap(), cell);
            }
        }
    }
}

#[test]
fn verify_selected_checks() {
    let (_d, cache) = scratch();
    let args = [
        "verify",
        "--check",
        "positivity",
        "--check",
        "robbins",
        "--k-max",
        "30",
        "--M",
        "500",
    ];
    let run = sterr(&cache, &args);
    assert_eq!(run.code, 0, "{}{}", run.stdout, run.stderr);
    assert!(run
        .stdout
        .lines()
        .any(|l| l.starts_with("PASS") && l.contains("positivity")));
    assert!(run
        .stdout
        .lines()
        .any(|l| l.starts_with("SKIP") && l.contains("table-2")));
    assert!(
        run.stdout
            .trim_end()
            .ends_with("19 checks: 0 failed, 17 skipped"),
        "{}",
        run.stdout
    );

    let mut json_args = args.to_vec();
    json_args.push("--json");
    let run = sterr(&cache, &json_args);
    let lines: Vec<Value> = run
        .stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 20);
    assert_eq!(lines[0]["metadata"]["M"], 500);
    assert_eq!(lines[8]["name"], "positivity");
    assert_eq!(lines[8]["status"], "pass");

    let run = sterr(
        &cache,
        &["verify", "--check", "appendix-a", "--grid-density", "10"],
    );
    assert_eq!(run.code, 1);
    assert!(run
        .stdout
        .lines()
        .any(|l| l.starts_with("FAIL") && l.contains("appendix-a")));
}

#[test]
fn cache_inspect_and_prune() {
    let (_d, cache) = scratch();
    sterr(
        &cache,
        &["--precision", "53", "sweep", "--k-max", "10", "--M", "300"],
    );
    sterr(
        &cache,
        &["--precision", "80", "sweep", "--k-max", "5", "--M", "300"],
    );
    let run = sterr(&cache, &["cache", "inspect"]);
    assert!(run.stdout.contains("13 records"), "{}", run.stdout);
    assert!(
        run.stdout
            .contains("53 bits (18 digits), M = 300: 9 records, k in 2..=10"),
        "{}",
        run.stdout
    );

    let run = sterr(&cache, &["cache", "prune"]);
    assert_eq!(run.code, 2);
    let run = sterr(
        &cache,
        &["cache", "prune", "--bits", "53", "--k-above", "6"],
    );
    assert!(
        run.stdout.starts_with("removed 4 records, 9 remain"),
        "{}",
        run.stdout
    );
    let run = sterr(&cache, &["cache", "prune", "--all"]);
    assert!(
        run.stdout.starts_with("removed 9 records, 0 remain"),
        "{}",
        run.stdout
    );
}
