use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TOY: &str = "A\ta\tX1\nA\tb\tX2\nA\tq\tX3\nB\ta\tX4\nB\tb\tX5\nC\ta\tX6\n";

fn ctxpool(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxpool"))
        .current_dir(dir)
        .env_remove("CONTEXT_POOL_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn toy_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("train.txt"), TOY).unwrap();
    dir
}

fn train(dir: &Path, out: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec!["train", "--graph", "train.txt", "--out", out];
    args.extend_from_slice(extra);
    let o = ctxpool(dir, &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    dir.join(out)
}

#[test]
fn query_lists_selected_neighbors() {
    let dir = toy_dir();
    train(
        dir.path(),
        "toy.cnf",
        &["--metric", "precision", "--threshold-pre", "0.4"],
    );
    let o = ctxpool(
        dir.path(),
        &[
            "query",
            "--graph",
            "train.txt",
            "--cnf",
            "toy.cnf",
            "--head",
            "A",
            "--relation",
            "q",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect();
    assert_eq!(rows, ["relation\tprecision\trecall", "b\t1/2\t1/1"]);
}

#[test]
fn pool_exports_layered_edges() {
    let dir = toy_dir();
    train(
        dir.path(),
        "toy.cnf",
        &["--metric", "precision", "--threshold-pre", "0.4"],
    );
    let o = ctxpool(
        dir.path(),
        &[
            "pool",
            "--graph",
            "train.txt",
            "--cnf",
            "toy.cnf",
            "--head",
            "A",
            "--relation",
            "q",
            "--hops",
            "1",
            "--out",
            "ctx.tsv",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("ctx.tsv")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["hop\thead\trelation\ttail", "1\tA\tb\tX2"]);
    assert!(text.contains("# input train.txt sha256:"));
    assert!(text.contains("hops=1"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = toy_dir();
    let first = fs::read(train(dir.path(), "one.cnf", &[])).unwrap();
    let second = fs::read(train(dir.path(), "two.cnf", &[])).unwrap();
    assert_eq!(first, second);
    let args = [
        "pool",
        "--graph",
        "train.txt",
        "--cnf",
        "one.cnf",
        "--head",
        "A",
        "--relation",
        "q",
        "--hops",
        "3",
    ];
    assert_eq!(
        stdout(&ctxpool(dir.path(), &args)),
        stdout(&ctxpool(dir.path(), &args))
    );
}

#[test]
fn tail_direction_uses_the_inverse_relation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "A\tr\tB\nB\ts\tC\nD\tr\tE\n").unwrap();
    let o = ctxpool(
        dir.path(),
        &[
            "train",
            "--graph",
            "g.txt",
            "--out",
            "g.cnf",
            "--metric",
            "recall",
            "--threshold-rec",
            "0.5",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = ctxpool(
        dir.path(),
        &[
            "pool",
            "--graph",
            "g.txt",
            "--cnf",
            "g.cnf",
            "--head",
            "B",
            "--relation",
            "s",
            "--direction",
            "head",
            "--hops",
            "1",
        ],
    );
    assert!(stdout(&o).contains("1\tB\tr^-1\tA"), "{}", stdout(&o));

    let body = |args: &[&str]| -> Vec<String> {
        let o = ctxpool(dir.path(), args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(str::to_owned)
            .collect()
    };
    body(&[
        "train",
        "--graph",
        "g.txt",
        "--out",
        "g4.cnf",
        "--metric",
        "recall",
        "--threshold-rec",
        "0.4",
    ]);
    let base = [
        "pool", "--graph", "g.txt", "--cnf", "g4.cnf", "--head", "B", "--hops", "2",
    ];
    let tail = body(&[&base[..], &["--relation", "r", "--direction", "tail"]].concat());
    let inverse = body(&[&base[..], &["--relation", "r^-1"]].concat());
    assert_eq!(tail, inverse);
    assert!(tail.len() > 1);
}

#[test]
fn zero_hops_is_a_usage_error() {
    let dir = toy_dir();
    train(dir.path(), "toy.cnf", &[]);
    let o = ctxpool(
        dir.path(),
        &[
            "pool",
            "--graph",
            "train.txt",
            "--cnf",
            "toy.cnf",
            "--head",
            "A",
            "--relation",
            "q",
            "--hops",
            "0",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn set_sizes_need_the_exhaustive_trainer() {
    let dir = toy_dir();
    let o = ctxpool(
        dir.path(),
        &[
            "train",
            "--graph",
            "train.txt",
            "--out",
            "x.cnf",
            "--set-sizes",
            "1:3",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("x.cnf").exists());
}

#[test]
fn unknown_relation_suggests_neighbors() {
    let dir = toy_dir();
    train(dir.path(), "toy.cnf", &[]);
    let o = ctxpool(
        dir.path(),
        &[
            "query",
            "--graph",
            "train.txt",
            "--cnf",
            "toy.cnf",
            "--head",
            "A",
            "--relation",
            "qq",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("nearest matches: q"), "{}", stderr(&o));
}

#[test]
fn missing_input_is_a_data_error() {
    let dir = toy_dir();
    let o = ctxpool(
        dir.path(),
        &["train", "--graph", "nope.txt", "--out", "x.cnf"],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn truncated_cnf_is_rejected() {
    let dir = toy_dir();
    let path = train(dir.path(), "toy.cnf", &[]);
    let text = fs::read_to_string(&path).unwrap();
    let cut: String = text
        .lines()
        .filter(|l| !l.starts_with("#end"))
        .map(|l| format!("{l}\n"))
        .collect();
    fs::write(&path, cut).unwrap();
    let o = ctxpool(
        dir.path(),
        &[
            "query",
            "--graph",
            "train.txt",
            "--cnf",
            "toy.cnf",
            "--head",
            "A",
            "--relation",
            "q",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn stats_on_an_empty_directory_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ctxpool(dir.path(), &["stats", "."]).status.code(), Some(2));
}

#[test]
fn stats_counts_each_file() {
    let dir = toy_dir();
    fs::write(dir.path().join("test.txt"), "C\tb\tX9\n").unwrap();
    let o = ctxpool(dir.path(), &["stats", "."]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("train.txt\t3\t9\t6\n"), "{out}");
    assert!(out.contains("test.txt\t1\t2\t1\n"), "{out}");
    assert!(out.contains("all\t3\t10\t7\n"), "{out}");
}

#[test]
fn wide_neighborhood_without_size_range_hits_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = (0..22).map(|i| format!("hub\tr{i}\tt{i}\n")).collect();
    fs::write(dir.path().join("wide.txt"), text).unwrap();
    let o = ctxpool(
        dir.path(),
        &[
            "train",
            "--graph",
            "wide.txt",
            "--out",
            "w.cnf",
            "--algorithm",
            "exhaustive",
        ],
    );
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("--set-sizes"));
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = toy_dir();
    fs::write(
        dir.path().join("run.conf"),
        "metric = precision\nthreshold_pre = 0.5\nhops = 1\n",
    )
    .unwrap();
    let o = ctxpool(
        dir.path(),
        &[
            "--config",
            "run.conf",
            "train",
            "--graph",
            "train.txt",
            "--out",
            "c.cnf",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cnf = fs::read_to_string(dir.path().join("c.cnf")).unwrap();
    assert!(cnf.contains("#metric precision"));
    assert!(cnf.contains("#threshold_pre 0.5"));

    fs::write(dir.path().join("bad.conf"), "hopz = 1\n").unwrap();
    let o = ctxpool(
        dir.path(),
        &[
            "--config",
            "bad.conf",
            "train",
            "--graph",
            "train.txt",
            "--out",
            "c.cnf",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("hops"));
}

#[test]
fn inductive_expansion_uses_the_training_family() {
    let dir = toy_dir();
    train(
        dir.path(),
        "toy.cnf",
        &["--metric", "precision", "--threshold-pre", "0.4"],
    );
    fs::write(dir.path().join("ind.txt"), "N\tb\tM\nN\ta\tK\nM\tb\tL\n").unwrap();
    let o = ctxpool(
        dir.path(),
        &[
            "pool",
            "--cnf-graph",
            "train.txt",
            "--expand-graph",
            "ind.txt",
            "--cnf",
            "toy.cnf",
            "--head",
            "N",
            "--relation",
            "q",
            "--hops",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect();
    assert_eq!(body, ["hop\thead\trelation\ttail", "1\tN\tb\tM"]);
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "metrics", "--seeds", "10", "--queries", "100"][..],
        &["verify", "cnf", "--seeds", "5"],
        &["verify", "theorem", "--tsv", "dev.tsv"],
        &["verify", "theorem", "--set-size", "3", "--relations", "6"],
    ] {
        let o = ctxpool(dir.path(), args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}{}",
            stdout(&o),
            stderr(&o)
        );
        assert!(stdout(&o).ends_with("PASS\n"));
    }
    assert!(
        fs::read_to_string(dir.path().join("dev.tsv"))
            .unwrap()
            .lines()
            .count()
            > 1
    );
}

#[test]
fn verify_reports_failure_with_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = ctxpool(
        dir.path(),
        &["verify", "theorem", "--entities", "50", "--tolerance", "0"],
    );
    assert_eq!(o.status.code(), Some(5), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("FAIL\n"));
}

#[test]
fn zero_threads_is_a_usage_error() {
    let dir = toy_dir();
    let o = ctxpool(dir.path(), &["--threads", "0", "stats", "."]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_prints_report() {
    let dir = toy_dir();
    let o = ctxpool(dir.path(), &["bench", "--graph", "train.txt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("set_sizes=4:6"));
    assert!(stdout(&o).contains("speedup:"));
}
