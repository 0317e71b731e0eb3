use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn dynwidth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynwidth"))
        .args(args)
        .env_remove("DYNWIDTH_ALPHA")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_square_writes_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("square.csv");
    let trace = data("square.trace");
    let o = dynwidth(&["run", "--trace", path_str(&trace), "--out", path_str(&out), "--no-timing"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let expected = "\
op_index,op_kind,width_sq_num,width_sq_den,width_float,k,corners_added,corners_removed,sides_added,sides_removed,time_ns
0,I,0,1,0.0,0,0,0,0,0,0
1,I,0,1,0.0,0,0,0,0,0,0
2,I,2,1,1.4142135623730951,6,3,0,3,0,0
3,I,4,1,2.0,8,3,2,2,1,0
4,I,4,1,2.0,0,0,0,0,0,0
";
    assert_eq!(csv, expected);
}

#[test]
fn run_is_byte_reproducible_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("mixed.trace");
    let o = dynwidth(&["gen", "--mode", "mixed", "--n", "300", "--seed", "9", "--out", path_str(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = dynwidth(&["run", "--trace", path_str(&trace), "--out", path_str(out), "--no-timing"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn timed_run_fills_time_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = dynwidth(&["run", "--trace", path_str(&data("triangle.trace")), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    let times: Vec<u64> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(times.len(), 4);
    assert!(times.iter().any(|&t| t > 0));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = dynwidth(&["run", "--trace", path_str(&data("unknown_delete.trace")), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(3));
    let o = dynwidth(&["run", "--trace", path_str(&data("malformed.trace")), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = dynwidth(&["verify", "--trace", path_str(&data("malformed.trace"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = dynwidth(&["gen", "--mode", "sideways", "--n", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_golden_traces_and_fault_injection() {
    for name in ["square.trace", "triangle.trace"] {
        let o = dynwidth(&["verify", "--trace", path_str(&data(name))]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = dynwidth(&["verify", "--trace", path_str(&data("square.trace")), "--fault-inject"]);
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("mismatch at operation 2"), "{err}");
}

#[test]
fn gen_is_deterministic_on_stdout() {
    let a = dynwidth(&["gen", "--mode", "incremental", "--n", "10", "--seed", "42"]);
    let b = dynwidth(&["gen", "--mode", "incremental", "--n", "10", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 10);
}

#[test]
fn alpha_from_environment() {
    let trace = data("triangle.trace");
    let run = |alpha: &str| {
        Command::new(env!("CARGO_BIN_EXE_dynwidth"))
            .args(["verify", "--trace", path_str(&trace)])
            .env("DYNWIDTH_ALPHA", alpha)
            .output()
            .unwrap()
    };
    assert_eq!(run("0.2").status.code(), Some(0));
    assert_eq!(run("0.9").status.code(), Some(2));
}

#[test]
fn bench_writes_rows_with_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let o = dynwidth(&[
        "bench", "--mode", "incremental", "--sizes", "256,512,1024", "--repeats", "1", "--out", path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().ends_with(",slope"));
    assert_eq!(lines.count(), 3);
    let o = dynwidth(&["bench", "--mode", "incremental", "--sizes", "512,256", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
}
