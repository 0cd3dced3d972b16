use std::io::Write;
use std::process::{Command, Output, Stdio};

fn simplesel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplesel")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = simplesel(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn rng_classic_seed_12345() {
    let out = stdout(&["rng", "--seed", "12345", "--count", "5"]);
    let four: Vec<String> = out.lines().map(|l| format!("{:.4}", l.parse::<f64>().unwrap())).collect();
    assert_eq!(four, ["0.9296", "0.3164", "0.1839", "0.2046", "0.5677"]);
    assert_eq!(out.lines().next().unwrap(), "0.92961609281714785");
}

#[test]
fn rng_r_mode_matches_runif() {
    // set.seed(42); runif(3)
    let out = stdout(&["rng", "--mode", "r", "--seed", "42", "--count", "3"]);
    let v: Vec<f64> = out.lines().map(|l| l.parse().unwrap()).collect();
    for (a, b) in v.iter().zip([0.914806043496355, 0.937075413297862, 0.286139534786344]) {
        assert!((a - b).abs() < 1e-14);
    }
    let dice = stdout(&["rng", "--mode", "r", "--seed", "42", "--count", "50", "--dist", "int:6"]);
    assert!(dice.lines().all(|l| (1..=6).contains(&l.parse::<u32>().unwrap())));
}

#[test]
fn select_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_simplesel"))
        .args(["select", "--k", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"9 4\n-1 7\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "4\n");
}

#[test]
fn select_reports_worst_case_counts() {
    // [2, 3, 4, 5, 1] with k = n: total (n^2 + 5n) / 2 = 25, data (n^2 + n) / 2 = 15
    let out = stdout(&["select", "--values", "2,3,4,5,1", "--k", "max", "--counts"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "5");
    let f: Vec<u64> = lines[2].split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(f[1], 15);
    assert_eq!(f[4], 25);
}

#[test]
fn wselect_and_medcouple() {
    let out = stdout(&["wselect", "--values", "1,2,3", "--weights", "1,1,5", "--p", "0.5"]);
    assert_eq!(out.lines().next().unwrap(), "3");
    for m in ["fast", "naive"] {
        assert_eq!(stdout(&["medcouple", "--method", m, "--values", "1,2,3,12,20"]).trim(), "0.78947368421052633");
    }
    assert_eq!(stdout(&["medcouple", "--values", "-2,-1,0,1,2"]).trim(), "0");
}

#[test]
fn vervaat_dickman_head() {
    let out = stdout(&["vervaat", "cdf", "--beta", "1", "--x", "1"]);
    let f: f64 = out.trim().parse().unwrap();
    assert!((f - (-0.577_215_664_901_532_9f64).exp()).abs() < 1e-6);
    let draws = stdout(&["vervaat", "rnd", "--count", "4", "--seed", "9"]);
    assert_eq!(draws, stdout(&["vervaat", "rnd", "--count", "4", "--seed", "9"]));
    assert_eq!(draws.lines().count(), 4);
}

#[test]
fn bench_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let s = dir.path().join("s.csv");
    let args = |p: &std::path::Path| {
        vec![
            "bench".to_string(),
            "--n".into(),
            "50,100".into(),
            "--k".into(),
            "median,max".into(),
            "--replicates".into(),
            "20".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |v: Vec<String>| assert!(Command::new(env!("CARGO_BIN_EXE_simplesel")).args(&v).status().unwrap().success());
    run(args(&a));
    let mut with_summary = args(&b);
    with_summary.extend(["--summary".to_string(), s.to_str().unwrap().into()]);
    run(with_summary);
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("n,k,rep,exit,data,branch,incr,total\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 20);
    let summary = std::fs::read_to_string(&s).unwrap();
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn bench_empty_n_set_is_header_only() {
    let out = stdout(&["bench", "--n", "", "--replicates", "3"]);
    assert_eq!(out, "n,k,rep,exit,data,branch,incr,total\n");
}

#[test]
fn robust_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mcd.csv");
    stdout(&["robust", "mcd", "--n", "40", "--replicates", "3", "--contamination", "0.2", "--backend", "select-oracle", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    let fs = stdout(&["robust", "fs", "--n", "12", "--seed", "3"]);
    let ms: Vec<usize> = fs.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ms, (3..=12).collect::<Vec<_>>());
}

#[test]
fn filter_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in.pgm");
    let dst = dir.path().join("out.pgm");
    let mut pgm = b"P5\n8 6\n255\n".to_vec();
    pgm.extend((0..48).map(|i| if i == 19 { 255 } else { 100 }));
    std::fs::write(&src, &pgm).unwrap();
    stdout(&["filter", "--in", src.to_str().unwrap(), "--out", dst.to_str().unwrap()]);
    let out = std::fs::read(&dst).unwrap();
    assert!(out.starts_with(b"P5"));
    assert!(out[out.len() - 48..].iter().all(|&v| v == 100));

    stdout(&[
        "filter", "--in", src.to_str().unwrap(), "--out", dst.to_str().unwrap(),
        "--noise", "0.2", "--seed", "1", "--mask", "1,1,1,1,1,1,1,1,1",
    ]);
}

#[test]
fn exit_codes() {
    assert_eq!(simplesel(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(simplesel(&["rng", "--dist", "int:0"]).status.code(), Some(2));
    assert_eq!(simplesel(&["filter", "--in", "x.pgm", "--out", "y.pgm", "--mask", "1,2"]).status.code(), Some(2));
    assert_eq!(simplesel(&["vervaat", "pdf", "--beta", "-1", "--x", "1"]).status.code(), Some(1));
    assert_eq!(simplesel(&["select", "--values", "1,2", "--k", "3"]).status.code(), Some(1));
    assert_eq!(simplesel(&["filter", "--in", "/nonexistent.pgm", "--out", "y.pgm"]).status.code(), Some(1));
}
