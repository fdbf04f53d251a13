use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use balance_lab::balance::{detect_two_faction, is_triad_wise_balanced};
use balance_lab::chordal::check_equivalence_conditions;
use balance_lab::graph::parse_edge_list;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_balance-lab"));
    c.env_remove("BALANCE_LAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn sym_file(n: usize, pairs: &[(usize, usize, i8)]) -> String {
    let mut s = format!("n {n}\n");
    for &(a, b, v) in pairs {
        s += &format!("{a} {b} {v}\n{b} {a} {v}\n");
    }
    s
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn analyze_positive_triangle() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "t.txt",
        &sym_file(3, &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]),
    );
    let out = run(&["analyze", "--input", p(&f), "--all-cycles"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["triad_wise_balanced"], true);
    assert_eq!(v["two_faction"]["kind"], "no-negative-links");
    assert_eq!(v["all_ego_networks_two_faction"], true);
    assert_eq!(v["all_cycles_positive"], true);
    assert_eq!(v["triad_count"], 1);
    assert_eq!(v["conflict_ratio"], 0.0);
}

#[test]
fn analyze_matches_library() {
    let dir = TempDir::new().unwrap();
    let text = sym_file(3, &[(1, 2, -1), (2, 3, 1), (1, 3, 1)]);
    let f = write(&dir, "t.txt", &text);
    let v = json(&run(&["analyze", "--input", p(&f)]));
    let x = parse_edge_list(&text).unwrap();
    let lib = is_triad_wise_balanced(&x);
    assert_eq!(v["triad_wise_balanced"], lib.balanced);
    assert_eq!(
        v["violations"].as_array().unwrap().len(),
        lib.violations.len()
    );
    assert_eq!(v["violations"][0]["kind"], "negative-triad");
    assert_eq!(v["violations"][0]["nodes"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["two_faction"].is_null(), detect_two_faction(&x).is_none());
}

#[test]
fn analyze_guard_and_parse_errors() {
    let dir = TempDir::new().unwrap();
    let path: Vec<_> = (1..20).map(|i| (i, i + 1, 1)).collect();
    let f = write(&dir, "path.txt", &sym_file(20, &path));
    let out = run(&["analyze", "--input", p(&f), "--all-cycles"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("force"));
    let out = run(&["analyze", "--input", p(&f), "--all-cycles", "--force"]);
    assert_eq!(out.status.code(), Some(0));

    let bad = write(&dir, "bad.txt", "n 3\n1 2 1\n2 2 1\n");
    let out = run(&["analyze", "--input", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = run(&["analyze", "--input", p(&dir.path().join("missing.txt"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn equivalence_reports() {
    let dir = TempDir::new().unwrap();
    let tri = write(
        &dir,
        "tri.txt",
        &sym_file(3, &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]),
    );
    let v = json(&run(&["equivalence", "--input", p(&tri)]));
    assert_eq!(v["holds"], true);

    let sq = write(
        &dir,
        "sq.txt",
        &sym_file(4, &[(1, 2, 1), (2, 3, 1), (3, 4, 1), (1, 4, 1)]),
    );
    let v = json(&run(&[
        "equivalence",
        "--input",
        p(&sq),
        "--verify-exhaustive",
    ]));
    assert_eq!(v["holds"], false);
    assert_eq!(v["exhaustive"]["holds"], false);
    assert_eq!(
        v["exhaustive"]["counterexample"].as_array().unwrap().len(),
        8
    );

    // Node set {3..7} of the subchordal example, relabelled 1..5.
    let text = sym_file(
        5,
        &[
            (1, 2, 1),
            (2, 3, 1),
            (3, 4, 1),
            (4, 5, 1),
            (5, 1, 1),
            (1, 4, 1),
            (2, 5, 1),
            (3, 5, 1),
        ],
    );
    let f = write(&dir, "g2.txt", &text);
    let v = json(&run(&["equivalence", "--input", p(&f)]));
    let lib =
        check_equivalence_conditions(&parse_edge_list(&text).unwrap().skeleton(), false).unwrap();
    assert_eq!(v["holds"], lib.holds);
    assert_eq!(
        v["subgraphs"].as_array().unwrap().len(),
        lib.subgraphs.len()
    );

    let split = write(&dir, "split.txt", &sym_file(4, &[(1, 2, 1), (3, 4, 1)]));
    assert_eq!(
        run(&["equivalence", "--input", p(&split)]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_outcomes() {
    let dir = TempDir::new().unwrap();
    let bal = write(
        &dir,
        "bal.txt",
        &sym_file(3, &[(1, 2, 1), (2, 3, -1), (1, 3, -1)]),
    );
    let out = run(&["simulate", "--input", p(&bal)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["steps"], 0);

    let neg = write(
        &dir,
        "neg.txt",
        &sym_file(3, &[(1, 2, -1), (2, 3, -1), (1, 3, -1)]),
    );
    let log = dir.path().join("log.jsonl");
    let fin = dir.path().join("final.txt");
    let out = run(&[
        "simulate",
        "--input",
        p(&neg),
        "--engine",
        "constructive",
        "--log",
        p(&log),
        "--out",
        p(&fin),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["absorbed"], true);
    // Every logged flip raises a negative entry, so h falls at each line.
    let mut h = v["initial_h"].as_u64().unwrap();
    for line in std::fs::read_to_string(&log).unwrap().lines() {
        let e: Value = serde_json::from_str(line).unwrap();
        assert_eq!((e["old"].as_i64(), e["new"].as_i64()), (Some(-1), Some(1)));
        h -= 1;
    }
    assert_eq!(h, v["final_h"].as_u64().unwrap());
    let x = parse_edge_list(&std::fs::read_to_string(&fin).unwrap()).unwrap();
    assert!(is_triad_wise_balanced(&x).balanced);

    let out = run(&[
        "simulate",
        "--input",
        p(&neg),
        "--max-steps",
        "1",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simulate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let go = |tag: &str| {
        let log = dir.path().join(format!("{tag}.jsonl"));
        let out = run(&[
            "simulate",
            "--n",
            "8",
            "--p",
            "0.5",
            "--p-neg",
            "0.4",
            "--seed",
            "11",
            "--engine",
            "sioh",
            "--log",
            p(&log),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, std::fs::read(&log).unwrap())
    };
    assert_eq!(go("a"), go("b"));
}

#[test]
fn probability_flags() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "t.txt",
        &sym_file(3, &[(1, 2, -1), (2, 3, 1), (1, 3, 1)]),
    );
    let third = "0.3333333333";
    let ok = run(&[
        "simulate",
        "--input",
        p(&f),
        "--p1",
        third,
        "--p2",
        third,
        "--p3",
        third,
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&[
        "simulate",
        "--input",
        p(&f),
        "--p1",
        "0.5",
        "--p2",
        "0.3",
        "--p3",
        "0.3",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let bad = run(&[
        "simulate",
        "--input",
        p(&f),
        "--engine",
        "sioh",
        "--q1",
        "0.9",
        "--q2",
        "0.3",
        "--q3",
        "0.1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let bad = run(&[
        "simulate",
        "--input",
        p(&f),
        "--engine",
        "sioh",
        "--opinions",
        "1,-1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let good = run(&[
        "simulate",
        "--input",
        p(&f),
        "--engine",
        "constructive-sioh",
        "--opinions",
        "1,-1,1",
    ]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(json(&good)["balanced"], true);
}

#[test]
fn experiment_outputs() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("a.csv");
    assert_eq!(
        run(&[
            "experiment",
            "--study",
            "c0",
            "--p",
            "0.2",
            "--trials",
            "0",
            "--out",
            p(&csv)
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "experiment",
            "--study",
            "c0",
            "--trials",
            "5",
            "--out",
            p(&csv)
        ])
        .status
        .code(),
        Some(1)
    );

    let go = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args([
                "experiment",
                "--study",
                "triads",
                "--p",
                "0.4",
                "--p-neg",
                "0.3",
                "--trials",
                "40",
                "--seed",
                "9",
            ])
            .args(["--out", p(&path)])
            .env("BALANCE_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        (out.stdout, std::fs::read(&path).unwrap())
    };
    let (summary, a) = go("a.csv", "1");
    let (_, b) = go("b.csv", "4");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("trial,seed,n,p,p_neg,c0,c_inf,rho_link,n_triad,steps,absorbed\n"));
    assert_eq!(text.lines().count(), 41);
    let v: Value = serde_json::from_slice(&summary).unwrap();
    assert_eq!(v["study"], "triads");
    assert_eq!(v["trials"], 40);
    assert_eq!(v["absorbed_fraction"], 1.0);

    let unwritable = dir.path().join("no/such/dir.csv");
    let out = run(&[
        "experiment",
        "--study",
        "density",
        "--p-neg",
        "0.1",
        "--trials",
        "3",
        "--out",
        p(&unwritable),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
