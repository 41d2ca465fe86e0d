mod common;

use std::path::Path;
use std::process::{Command, Output};

fn drr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drr")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn iris() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv").display().to_string()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(drr(&[]).status.code(), Some(1));
    assert_eq!(drr(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(drr(&["optimize", "x.csv", "--algo", "grid", "--budget", "3"]).status.code(), Some(1));
    assert_eq!(drr(&["id", "x.csv", "--radii", "many"]).status.code(), Some(1));
    assert_eq!(drr(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "A,B-\n1,2\n3\n").unwrap();
    let bad = bad.display().to_string();
    assert_eq!(drr(&["id", &bad]).status.code(), Some(2));
    assert_eq!(drr(&["id", "/no/such/file.csv"]).status.code(), Some(2));
    // iris has no goal column
    assert_eq!(drr(&["optimize", &iris(), "--algo", "lite", "--budget", "10"]).status.code(), Some(2));
    let out = dir.path().join("pool.csv").display().to_string();
    assert_eq!(drr(&["gen", "rf-pool", "--rows", "2000000", "--out", &out]).status.code(), Some(2));
}

#[test]
fn id_reports_the_gate() {
    let o = drr(&["id", &iris()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("R\t4\nI\t"), "{s}");
    assert!(s.contains("drr_gate\t") && s.contains("agrawal_gate\t"));
}

#[test]
fn optimize_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.csv");
    std::fs::write(&t, common::random_problem_table(100, 3, 2, 1).emit()).unwrap();
    let t = t.display().to_string();
    let o = drr(&["optimize", &t, "--algo", "random", "--budget", "100", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("d2h\t0.00000\nlabels\t100\n"));
    let o = drr(&["optimize", &t, "--algo", "lite", "--budget", "20", "--q", "adapt"]);
    assert_eq!(o.status.code(), Some(0));

    let p = dir.path().join("pred.csv");
    std::fs::write(&p, "actual,predicted\n10,15\n10,10\n10,14\n").unwrap();
    let o = drr(&["metrics", &p.display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("pred(40)\t0.66667"), "{s}");
    assert!(s.contains("mae\t3.00000"), "{s}");
}

#[test]
fn bench_is_repeatable_and_stats_rereads_it() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("pool.csv");
    let g = drr(&["gen", "rf-pool", "--rows", "300", "--seed", "2", "--out", &gen.display().to_string()]);
    assert_eq!(g.status.code(), Some(0));
    let data = gen.display().to_string();
    let run = |out: &str| {
        let o = drr(&[
            "bench", &data, "--repeats", "3", "--seed", "5", "--out", out,
            "--treatments", "lite:20,random:20,dehb:100,baseline",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(Path::new(out).join("results.csv")).unwrap();
        text.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>()
    };
    let a = dir.path().join("a").display().to_string();
    let b = dir.path().join("b").display().to_string();
    assert_eq!(run(&a), run(&b));

    let o = drr(&["stats", &format!("{a}/results.csv")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("| dehb:100 |"));
}
