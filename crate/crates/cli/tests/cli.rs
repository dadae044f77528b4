use std::fs;
use std::path::PathBuf;
use std::process::Command;

use cycle_lists::{ColourScheme, CyclePower, RngStream, SchemeParams};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["cycle-lists"];
    argv.extend_from_slice(args);
    let code = cycle_lists_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cycle-lists-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn chi_prints_the_rule() {
    let (code, out, _) = run(&["chi", "--n", "12", "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "chi=4 consistent=true\n");
    let (_, out, _) = run(&["chi", "--n", "13", "--k", "3"]);
    assert_eq!(out, "chi=5 consistent=true\n");
    let (code, _, err) = run(&["chi", "--n", "10", "--k", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("k(k+1)"));
}

#[test]
fn solve_odd_cycle_with_two_colours() {
    let path = scratch("c5.txt", "5 1 2 2\n1 2\n1 2\n1 2\n1 2\n1 2\n");
    let (code, out, _) = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, "NOT_COLOURABLE\n");
}

#[test]
fn solve_prints_least_witness() {
    let path = scratch(
        "c6.txt",
        "6 2 3 3\n1 2 3\n1 2 3\n1 2 3\n1 2 3\n1 2 3\n1 2 3\n",
    );
    let (code, out, _) = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, "COLOURABLE 1 2 3 1 2 3\n");
}

#[test]
fn malformed_scheme_reports_line() {
    let path = scratch("bad.txt", "5 1 2 3\n1 2\n1 2\n1 x\n1 2\n1 2\n");
    let (code, out, err) = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("line 4"), "{err}");

    let (code, _, err) = run(&["solve", "/nonexistent/scheme.txt"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"));
}

#[test]
fn seed_is_required() {
    let (code, out, err) = run(&[
        "simulate", "--n", "4", "--k", "1", "--c", "1", "--s", "2", "--trials", "10",
    ]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("--seed"));
    let (code, _, _) = run(&[
        "poisson", "--n", "40", "--k", "2", "--c", "2", "--s", "5", "--trials", "10",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&[
        "sweep", "--n", "40", "--k", "2", "--c", "2", "--s", "5", "--trials", "10",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn s_and_t_are_exclusive() {
    let base = [
        "simulate", "--n", "40", "--k", "2", "--c", "2", "--trials", "10", "--seed", "1",
    ];
    let mut both = base.to_vec();
    both.extend_from_slice(&["--s", "5", "--t", "2"]);
    assert_eq!(run(&both).0, 1);
    assert_eq!(run(&base).0, 1);
    let mut t = base.to_vec();
    t.extend_from_slice(&["--t", "2"]);
    let (code, out, _) = run(&t);
    assert_eq!(code, 0);
    // s = round(2 * 40^(1/4)) = 5
    assert!(
        out.lines().nth(1).unwrap().starts_with("40,2,2,5,2,10,"),
        "{out}"
    );
}

#[test]
fn simulate_tiny_case() {
    let (code, out, err) = run(&[
        "simulate", "--n", "4", "--k", "1", "--c", "1", "--s", "2", "--trials", "100000", "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    assert!(!err.is_empty(), "progress goes to stderr");
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,k,c,s,t,trials,successes,p_hat,ci_low,ci_high,mu_finite,mu_limit,p_predicted,master_seed"
    );
    let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lo: f64 = cells[8].parse().unwrap();
    let hi: f64 = cells[9].parse().unwrap();
    assert!(lo <= 0.125 && 0.125 <= hi);
    assert_eq!(cells[13], "7");
    assert!(lines.next().is_none());
}

#[test]
fn json_and_file_output() {
    let path = std::env::temp_dir().join(format!("cycle-lists-sweep-{}.json", std::process::id()));
    let (code, out, _) = run(&[
        "sweep",
        "--n",
        "30,40",
        "--k",
        "2",
        "--c",
        "2",
        "--s",
        "4,6",
        "--trials",
        "50",
        "--seed",
        "3",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["n"], 30);
    assert_eq!(rows[1]["s"], 6);
    assert!(rows[0]["t"].is_null());
    fs::remove_file(path).unwrap();
}

#[test]
fn poisson_report() {
    let (code, out, _) = run(&[
        "poisson", "--n", "300", "--k", "2", "--c", "2", "--s", "5", "--trials", "400", "--seed",
        "9",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let hist: u64 = v["histogram"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .sum();
    assert_eq!(hist, 400);
    assert!((v["mu_finite"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn check_good_and_colour() {
    // all lists pairwise disjoint: every run is isolated
    let n = 12;
    let mut text = format!("{n} 2 2 24\n");
    for v in 0..n {
        text.push_str(&format!("{} {}\n", 2 * v + 1, 2 * v + 2));
    }
    let path = scratch("disjoint.txt", &text);
    let (code, out, _) = run(&["check-good", path.to_str().unwrap(), "--d", "1"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["is_good"], true);

    let (code, out, _) = run(&["colour", path.to_str().unwrap(), "--d", "1"]);
    assert_eq!(code, 0);
    let colours: Vec<u32> = out
        .strip_prefix("COLOURED ")
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(colours.len(), n);
    for (v, &x) in colours.iter().enumerate() {
        assert!(x == 2 * v as u32 + 1 || x == 2 * v as u32 + 2);
    }

    // identical lists: Condition 1 fails, nothing is constructed
    let path = scratch("same.txt", &format!("12 2 2 2\n{}", "1 2\n".repeat(12)));
    let (code, out, _) = run(&["colour", path.to_str().unwrap(), "--d", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "NO_CONSTRUCTION\n");
    let (_, out, _) = run(&["check-good", path.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["condition1_ok"], false);
}

#[test]
fn colour_with_gadget_regime() {
    let g = CyclePower::new(40, 1).unwrap();
    let scheme =
        cycle_lists::sample_scheme(&g, SchemeParams::new(2, 3).unwrap(), &RngStream::new(1, 0));
    let path = scratch("gadget.txt", &scheme.to_text(&g));
    let (code, out, _) = run(&["colour", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out == "NO_CONSTRUCTION\n" || out.starts_with("COLOURED "));

    let path = scratch("high.txt", &format!("10 1 3 5\n{}", "1 2 3\n".repeat(10)));
    let (code, _, err) = run(&["colour", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("solve"));
}

#[test]
fn scheme_text_round_trip_through_solve() {
    let g = CyclePower::new(9, 2).unwrap();
    let scheme =
        cycle_lists::sample_scheme(&g, SchemeParams::new(3, 5).unwrap(), &RngStream::new(2, 1));
    let text = scheme.to_text(&g);
    let (g2, back) = ColourScheme::parse_text(&text).unwrap();
    assert_eq!((g2, &back), (g, &scheme));
    let path = scratch("rt.txt", &text);
    let (code, out, _) = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("COLOURABLE") || out == "NOT_COLOURABLE\n");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cycle-lists");
    let ok = Command::new(bin)
        .args(["chi", "--n", "6", "--k", "1"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&ok.stdout),
        "chi=2 consistent=true\n"
    );
    let bad = Command::new(bin)
        .args(["chi", "--n", "x"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(bad.stdout.is_empty());
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
