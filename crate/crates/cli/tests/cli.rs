use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsion-bounds"))
        .args(args)
        .env_remove("TORSION_BOUNDS_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn lie_rank_csv_matches_known_ranks() {
    let text = stdout(&["lie-rank", "--degrees", "2:1,3:1", "--upto", "10"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,rank");
    let ranks: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ranks, ["0", "1", "1", "0", "1", "1", "1", "1", "1", "2"]);
}

#[test]
fn lie_rank_json_rows_carry_windows() {
    let text = stdout(&["lie-rank", "--degrees", "2:1,4:1", "--upto", "12", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for row in rows {
        let degree = row["degree"].as_u64().unwrap();
        let theorem = row["theorem"].as_str().unwrap();
        assert_eq!(theorem, if degree % 2 == 0 { "rank-window" } else { "exact-zero" });
        let bound: f64 = row["bound"].as_str().unwrap().parse().unwrap();
        let rank: f64 = row["exact_rank"].as_str().unwrap().parse().unwrap();
        assert!(bound <= rank + 1e-6);
    }
}

#[test]
fn homology_bounds_are_negative_at_small_degree() {
    let text = stdout(&["bound", "--homology", "--q", "2", "--upto", "20"]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 19);
    assert!(rows.iter().all(|r| r.contains(",homology-boundary,true,")));
}

#[test]
fn homology_bound_turns_positive_at_96() {
    let text = stdout(&["bound", "--homology", "--q", "2", "--from", "95", "--upto", "96"]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows[0].starts_with("95,-"));
    assert!(rows[1].starts_with("96,") && rows[1].ends_with(",false,128"));
}

#[test]
fn ktheory_rows_come_in_pairs() {
    let text = stdout(&["bound", "--ktheory", "--degrees", "2:1,4:1", "--conn", "1", "--dim", "4", "--upto", "12"]);
    let theorems: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(theorems.len() % 2, 0);
    for pair in theorems.chunks(2) {
        assert!(pair[0].starts_with("ktheory-strong") || pair[0] == "ktheory-below-threshold");
        assert_eq!(pair[1], "ktheory-weak");
    }
}

#[test]
fn roots_report_plastic_number() {
    let text = stdout(&["roots", "--degrees", "2:1,3:1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["polynomial"], "z^3 - z - 1");
    assert!(v["phi"].as_str().unwrap().starts_with("1.3247179572447460259609"));
    assert_eq!(v["roots"].as_array().unwrap().len(), 3);
}

#[test]
fn bezout_witnesses_decompose_their_values() {
    let text = stdout(&[
        "bezout",
        "--alpha",
        "3",
        "--beta",
        "4",
        "--a",
        "1/2",
        "--b",
        "0",
        "--n",
        "1",
        "--cap",
        "200",
        "--witnesses",
    ]);
    let mut count = 0;
    for line in text.lines().skip(1) {
        let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[0], 3 * f[1] + 4 * f[2]);
        assert!(2 * f[2] > f[1]);
        count += 1;
    }
    assert!(count > 0);
}

#[test]
fn dgl_table_has_rank_nullity() {
    let text = stdout(&["dgl", "--q", "3", "--upto", "12"]);
    let rows: Vec<Vec<String>> = text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 12);
    for w in rows.windows(2) {
        let dim: usize = w[1][1].parse().unwrap();
        let cycles: usize = w[1][2].parse().unwrap();
        let boundaries: usize = w[0][3].parse().unwrap();
        assert_eq!(dim, cycles + boundaries);
    }
}

#[test]
fn report_writes_to_out_file() {
    let dir = std::env::temp_dir().join(format!("torsion-bounds-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("moore.csv");
    let args = ["report", "--space", "moore", "--q", "2", "--p", "3", "--r", "1", "--upto", "10", "--format", "csv"];
    let direct = stdout(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(stdout(&with_out), "");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn precision_env_raises_bits() {
    let out = Command::new(env!("CARGO_BIN_EXE_torsion-bounds"))
        .args(["bound", "--homology", "--q", "2", "--upto", "3"])
        .env("TORSION_BOUNDS_PRECISION", "256")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",256")), "{text}");
}

#[test]
fn invalid_input_exits_with_one() {
    let cases: [&[&str]; 7] = [
        &["frobnicate"],
        &["lie-rank", "--degrees", "2:1", "--upto", "5", "--bogus"],
        &["lie-rank", "--degrees", "0:1", "--upto", "5"],
        &["bound", "--homology", "--upto", "5"],
        &["report", "--space", "moore", "--upto", "5"],
        &["dgl", "--q", "2", "--upto", "15"],
        &["verify", "--suite", "nope"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }
    let bad_env = Command::new(env!("CARGO_BIN_EXE_torsion-bounds"))
        .args(["roots", "--degrees", "2:1"])
        .env("TORSION_BOUNDS_PRECISION", "ten")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_single_suite_passes() {
    let text = stdout(&["verify", "--suite", "cmn,bezout"]);
    assert!(text.contains("2/2 suites passed"));
}
