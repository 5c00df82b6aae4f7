use std::process::{Command, Output};

fn paircorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paircorr")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn energy_of_interval() {
    let out = paircorr(&["energy", "--gallery", "interval", "--X", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# tool: paircorr"));
    // N = 100 is past the brute-force limit, so three routes report.
    assert_eq!(text.matches("666700").count(), 3, "{text}");
}

#[test]
fn corr_reports_exact_fraction() {
    let out = paircorr(&["corr", "--gallery", "squares", "--X", "10000", "--alpha", "239/169"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l.starts_with("10000,100,180,9/5,")));
}

#[test]
fn json_output_wraps_result() {
    let out = paircorr(&["--format", "json", "cf", "--alpha", "13/29"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["provenance"]["command"], "cf");
    assert!(v["result"].to_string().contains('4'));
}

#[test]
fn exit_codes() {
    assert_eq!(paircorr(&["corr", "--gallery", "interval", "--X", "10", "--alpha", "1/3", "--s", "0"]).status.code(), Some(1));
    assert_eq!(paircorr(&["energy", "--gallery", "interval", "--random", "--X", "10"]).status.code(), Some(1));
    assert_eq!(paircorr(&["energy", "--X", "10"]).status.code(), Some(1));
    assert_eq!(paircorr(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(paircorr(&["--help"]).status.code(), Some(0));
    assert_eq!(paircorr(&["audit-avg-overlap", "--X", "20000", "--T", "4"]).status.code(), Some(3));
    assert_eq!(paircorr(&["divergence", "--gallery", "interval", "--alpha", "0.3"]).status.code(), Some(1));
    assert_eq!(paircorr(&["corr", "--gallery", "squares", "--X", "3", "--alpha", "1/3"]).status.code(), Some(2));
}

#[test]
fn guard_can_be_forced() {
    let out = paircorr(&["audit-avg-overlap", "--X", "10001", "--T", "2", "--force"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["audit-variance", "--gallery", "squares", "--X", "400", "--T", "3", "--samples", "2000", "--seed", "5"];
    let a = paircorr(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_paircorr")).args(args).env("PAIRCORR_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("paircorr-cli-test-{}.csv", std::process::id()));
    let out = paircorr(&["scan", "--gallery", "interval", "--alpha", "1/2", "--X-grid", "4,8,16", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.contains("X,N,count,F,deviation"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}
