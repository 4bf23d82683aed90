use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sbmtest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbmtest")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bounds_prints_one_row() {
    let out = sbmtest(&["bounds", "--n", "1000", "--a", "15", "--b", "5", "--s", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    assert!(lines[1].starts_with("1000,100,15,5,"));
    let bare = sbmtest(&["bounds", "--n", "1000", "--a", "15", "--b", "5", "--s", "100", "--no-header"]);
    assert_eq!(String::from_utf8(bare.stdout).unwrap(), format!("{}\n", lines[1]));
}

#[test]
fn gof_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    let labels = dir.path().join("x.txt");
    let shifted = dir.path().join("y.txt");
    let run = |args: &[&str]| sbmtest(args);
    assert!(run(&[
        "sample",
        "--n",
        "600",
        "--a",
        "30",
        "--b",
        "5",
        "--seed",
        "3",
        "--out",
        p(&edges),
        "--labels-out",
        p(&labels)
    ])
    .status
    .success());
    let null = run(&["gof", "--edges", p(&edges), "--labels", p(&labels), "--a", "30", "--b", "5"]);
    assert_eq!(null.status.code(), Some(0));
    let text = String::from_utf8(null.stdout).unwrap();
    assert!(text.starts_with("statistic="));
    assert!(text.contains("\nreject=false\n"));

    // Labels of a graph drawn with 200 shifted nodes.
    let g2 = dir.path().join("g2.txt");
    run(&[
        "sample",
        "--n",
        "600",
        "--a",
        "30",
        "--b",
        "5",
        "--s",
        "200",
        "--seed",
        "4",
        "--out",
        p(&g2),
        "--labels-out",
        p(&shifted),
    ]);
    let alt = run(&["gof", "--edges", p(&edges), "--labels", p(&shifted), "--a", "30", "--b", "5"]);
    assert_eq!(alt.status.code(), Some(1));
    let naive = run(&["naive-gof", "--edges", p(&edges), "--labels", p(&shifted), "--s", "200"]);
    assert_eq!(naive.status.code(), Some(1));
    let estimated = run(&["gof", "--edges", p(&edges), "--labels", p(&labels)]);
    assert!(String::from_utf8(estimated.stdout).unwrap().contains("estimated=1"));
}

#[test]
fn errors_exit_with_two() {
    let missing = sbmtest(&["gof", "--edges", "/nonexistent/e", "--labels", "/nonexistent/l"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    assert_eq!(sbmtest(&["gof"]).status.code(), Some(2));
    assert_eq!(sbmtest(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(sbmtest(&["sample", "--n", "10", "--snr", "100"]).status.code(), Some(2));
}

#[test]
fn two_sample_commands() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let g2 = dir.path().join("g2.txt");
    let h = dir.path().join("h.txt");
    sbmtest(&["sample", "--n", "500", "--a", "24", "--b", "8", "--seed", "1", "--out", p(&g)]);
    sbmtest(&["sample", "--n", "500", "--a", "24", "--b", "8", "--seed", "3", "--out", p(&g2)]);
    sbmtest(&["sample", "--n", "500", "--a", "24", "--b", "8", "--s", "200", "--seed", "2", "--out", p(&h)]);
    let same = sbmtest(&["tst", "--g", p(&g), "--h", p(&g2), "--seed", "5"]);
    assert_eq!(same.status.code(), Some(0), "{}", String::from_utf8_lossy(&same.stdout));
    let changed = sbmtest(&["tst", "--g", p(&g), "--h", p(&h), "--a", "24", "--b", "8", "--delta", "0.1"]);
    assert_eq!(changed.status.code(), Some(1));
    assert!(String::from_utf8(changed.stdout).unwrap().contains("delta=0.1"));
    assert_eq!(sbmtest(&["naive-tst", "--g", p(&g), "--h", p(&g2), "--s", "40"]).status.code(), Some(0));
    assert_eq!(sbmtest(&["naive-tst", "--g", p(&g), "--h", p(&h), "--s", "100"]).status.code(), Some(1));
}

#[test]
fn sweep_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("grid.toml");
    fs::write(&spec, "n = 200\nratio = 0.25\nalphas = [2, 4]\ns = [20]\ntrials = 4\nschemes = [\"gof\", \"tst\"]\n")
        .unwrap();
    let out = sbmtest(&["sweep", "--spec", p(&spec), "--seed", "7", "--out", p(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("gof.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("scheme,n,a,b,alpha,snr,s,M,fa,md,risk,seed"));
    assert_eq!(csv.lines().count(), 3);
    assert!(dir.path().join("tst.csv").exists());
    fs::write(&spec, "n = 200\nratio = 0.25\nwhat = 1\ntrials = 4\n").unwrap();
    assert_eq!(sbmtest(&["sweep", "--spec", p(&spec), "--out", p(dir.path())]).status.code(), Some(2));
}
