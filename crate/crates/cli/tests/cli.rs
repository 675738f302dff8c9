use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use op3m_core::fixtures::{RUNNING_EXAMPLE_PROFITS, RUNNING_EXAMPLE_TX};

fn op3m(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_op3m")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Example {
    dir: tempfile::TempDir,
}

impl Example {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("tx.tsv"), RUNNING_EXAMPLE_TX).unwrap();
        fs::write(dir.path().join("profits.tsv"), RUNNING_EXAMPLE_PROFITS).unwrap();
        Example { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn mine_running_example() {
    let ex = Example::new();
    let out = ex.path("out.tsv");
    let res = op3m(&[
        "mine",
        "-t",
        s(&ex.path("tx.tsv")),
        "-p",
        s(&ex.path("profits.tsv")),
        "--minfre",
        "0.5",
        "--minpro",
        "0.4",
        "-o",
        s(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l == "5\t56\t0.478632\t1,2,3\t1,2,3"), "{text}");
    assert!(String::from_utf8_lossy(&res.stderr).contains("patterns"));
}

#[test]
fn mine_with_unreachable_minpro_writes_empty_file() {
    let ex = Example::new();
    let out = ex.path("out.tsv");
    let res = op3m(&[
        "mine",
        "-t",
        s(&ex.path("tx.tsv")),
        "-p",
        s(&ex.path("profits.tsv")),
        "--minfre",
        "0.5",
        "--minpro",
        "2.0",
        "-o",
        s(&out),
    ]);
    assert!(res.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn missing_profit_table_is_a_usage_error() {
    let ex = Example::new();
    let res = op3m(&["mine", "-t", s(&ex.path("tx.tsv")), "--minfre", "0.5", "--minpro", "0.4"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("profit table required"));
}

#[test]
fn malformed_input_reports_the_line() {
    let ex = Example::new();
    fs::write(ex.path("bad.tsv"), "1\t1\t1:2\n2\t1\t9:1\n").unwrap();
    let res = op3m(&[
        "mine",
        "-t",
        s(&ex.path("bad.tsv")),
        "-p",
        s(&ex.path("profits.tsv")),
        "--minfre",
        "0",
        "--minpro",
        "0",
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 2"));
}

#[test]
fn minfre_above_one_is_rejected() {
    let ex = Example::new();
    let res = op3m(&[
        "mine",
        "-t",
        s(&ex.path("tx.tsv")),
        "-p",
        s(&ex.path("profits.tsv")),
        "--minfre",
        "1.5",
        "--minpro",
        "0",
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn spmf_period_input() {
    let ex = Example::new();
    fs::write(ex.path("spmf.txt"), "1 2:10:4 6:2\n1:5:5:1\n2:-3:-3:2\n").unwrap();
    let res = op3m(&[
        "mine",
        "-t",
        s(&ex.path("spmf.txt")),
        "--format",
        "spmf-period",
        "--minfre",
        "0",
        "--minpro",
        "0",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("1\t9\t")), "{text}");
}

#[test]
fn oracle_check_on_running_example_and_fuzz() {
    let ex = Example::new();
    let res = op3m(&["oracle-check", "-t", s(&ex.path("tx.tsv")), "-p", s(&ex.path("profits.tsv"))]);
    assert_eq!(res.status.code(), Some(0));
    let res = op3m(&["oracle-check", "--fuzz", "100", "--max-items", "12"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
}

#[test]
fn oracle_check_catches_a_corrupted_miner() {
    let res = op3m(&["oracle-check", "--fuzz", "3", "--corrupt-miner"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stdout).contains("only in right"));
}

#[test]
fn oracle_check_refuses_over_cap() {
    let ex = Example::new();
    let res =
        op3m(&["oracle-check", "-t", s(&ex.path("tx.tsv")), "-p", s(&ex.path("profits.tsv")), "--cap", "4"]);
    assert_eq!(res.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&res.stderr).contains("cap is 4"));
}

fn gen(dir: &Path, tag: &str, extra: &[&str]) -> (PathBuf, PathBuf) {
    let tx = dir.join(format!("{tag}-tx.tsv"));
    let pt = dir.join(format!("{tag}-profits.tsv"));
    let mut args = vec!["gen", "-t", s(&tx), "-p", s(&pt), "--n-transactions", "300", "--n-items", "40"];
    args.extend_from_slice(extra);
    let res = op3m(&args);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    (tx, pt)
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, p1) = gen(dir.path(), "a", &["--seed", "42"]);
    let (t2, p2) = gen(dir.path(), "b", &["--seed", "42"]);
    assert_eq!(fs::read(&t1).unwrap(), fs::read(&t2).unwrap());
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    let (t3, _) = gen(dir.path(), "c", &["--seed", "43"]);
    assert_ne!(fs::read(&t1).unwrap(), fs::read(&t3).unwrap());
}

#[test]
fn gen_without_negative_items() {
    let dir = tempfile::tempdir().unwrap();
    let (_, pt) = gen(dir.path(), "pos", &["--negative-fraction", "0"]);
    let text = fs::read_to_string(pt).unwrap();
    assert!(text.lines().all(|l| !l.split('\t').nth(1).unwrap().starts_with('-')));
}

#[test]
fn gen_rejects_invalid_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let res = op3m(&[
        "gen",
        "-t",
        s(&dir.path().join("t")),
        "-p",
        s(&dir.path().join("p")),
        "--negative-fraction",
        "1.5",
    ]);
    assert_eq!(res.status.code(), Some(2));
}

fn column(line: &str, idx: usize) -> &str {
    line.split('\t').nth(idx).unwrap()
}

#[test]
fn regroup_changes_only_periods() {
    let dir = tempfile::tempdir().unwrap();
    let (tx, pt) = gen(dir.path(), "g", &["--periods", "5"]);
    let out1 = dir.path().join("r1.tsv");
    let out2 = dir.path().join("r2.tsv");
    for out in [&out1, &out2] {
        let res =
            op3m(&["regroup", "-t", s(&tx), "-p", s(&pt), "--periods", "50", "--seed", "7", "-o", s(out)]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let a = fs::read_to_string(&tx).unwrap();
    let b = fs::read_to_string(&out1).unwrap();
    assert_eq!(b, fs::read_to_string(&out2).unwrap());
    let mut periods = std::collections::BTreeSet::new();
    for (x, y) in a.lines().zip(b.lines()) {
        assert_eq!(column(x, 0), column(y, 0));
        assert_eq!(column(x, 2), column(y, 2));
        periods.insert(column(y, 1).parse::<u32>().unwrap());
    }
    assert_eq!(a.lines().count(), b.lines().count());
    assert!(periods.len() > 5 && periods.iter().all(|&p| (1..=50).contains(&p)));
}

#[test]
fn bench_with_empty_sweep_writes_header_only() {
    let ex = Example::new();
    let out = ex.path("bench.csv");
    let res = op3m(&["bench", "-t", s(&ex.path("tx.tsv")), "-p", s(&ex.path("profits.tsv")), "-o", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("dataset,transactions,periods,"));
}

#[test]
fn bench_prefix_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let (tx, pt) = gen(dir.path(), "b", &[]);
    let res = op3m(&[
        "bench",
        "-t",
        s(&tx),
        "-p",
        s(&pt),
        "--minfre",
        "0.1",
        "--minpro",
        "0.05,0.1",
        "--prefixes",
        "100,200,300",
        "--dataset",
        "gen",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let mut reader = csv::Reader::from_reader(res.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.len(), op3m_core::bench::BenchRecord::HEADER.len());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    let tx_col = headers.iter().position(|h| h == "transactions").unwrap();
    let counts: Vec<usize> = rows.iter().map(|r| r[tx_col].parse().unwrap()).collect();
    assert_eq!(counts, vec![100, 100, 200, 200, 300, 300]);
    assert!(rows.iter().all(|r| &r[0] == "gen" && r.len() == headers.len()));
}

#[test]
fn dump_list_of_c() {
    let ex = Example::new();
    let res =
        op3m(&["dump-list", "-t", s(&ex.path("tx.tsv")), "-p", s(&ex.path("profits.tsv")), "--items", "3"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert_eq!(
        text,
        "tid\tpp\tnp\trpp\tperiod\n1\t4\t0\t21\t1\n2\t8\t0\t0\t1\n3\t16\t0\t7\t2\n4\t12\t0\t7\t2\n"
    );
    let res =
        op3m(&["dump-list", "-t", s(&ex.path("tx.tsv")), "-p", s(&ex.path("profits.tsv")), "--items", "3,5"]);
    let text = String::from_utf8(res.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}
