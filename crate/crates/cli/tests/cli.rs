use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use tokio_tungstenite::tungstenite::{self, Message};

fn intentnav() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_intentnav"));
    cmd.env_remove("INTENTNAV_LOG_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    intentnav().args(args).output().unwrap()
}

fn jsonl_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    v.sort();
    v
}

#[test]
fn run_writes_one_log_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("logs");
    let o = run(&[
        "run", "--scenario", "s2", "--methods", "boir,rbii1,ecf", "--trials", "20", "--seed", "7",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let files = jsonl_files(&out);
    assert_eq!(files.len(), 20);
    assert!(files[0].file_name().unwrap().to_str().unwrap().ends_with("trial0000-seed7.jsonl"));
    assert!(files[19].file_name().unwrap().to_str().unwrap().ends_with("trial0019-seed26.jsonl"));
}

#[test]
fn runs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = run(&[
            "run", "--scenario", "s4", "--trials", "3", "--seed", "11", "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    for (x, y) in jsonl_files(a.path()).iter().zip(jsonl_files(b.path())) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn log_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = intentnav()
        .args(["run", "--scenario", "s1", "--trials", "2"])
        .env("INTENTNAV_LOG_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(jsonl_files(dir.path()).len(), 2);
}

#[test]
fn usage_errors_exit_2() {
    let o = run(&["run", "--scenario", "s2", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials must be ≥ 1"));

    let o = run(&["run", "--scenario", "/no/such/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["run", "--scenario", "s2", "--methods", "boir,oracle"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["run", "--scenario", "s2", "--set", "estimator.delta=2"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["serve", "--scenario", "s3", "--port", "99999"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[estimator]\nlambda = 3\n").unwrap();
    let o = run(&["run", "--scenario", "s2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    std::fs::write(&cfg, "[simulator]\ntick_budget = 15\n").unwrap();
    let out = dir.path().join("logs");
    let o = run(&[
        "run", "--scenario", "s1", "--config", cfg.to_str().unwrap(), "--set",
        "estimator.delta=0.1", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&jsonl_files(&out)[0]).unwrap();
    assert_eq!(text.lines().count(), 15 + 2);
    assert!(text.lines().next().unwrap().contains("\"delta\":0.1"));
}

fn eval_report(dir: &Path) -> (Output, String) {
    let report = dir.join("report.csv");
    let o = run(&["eval", dir.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    let text = std::fs::read_to_string(&report).unwrap_or_default();
    (o, text)
}

#[test]
fn eval_groups_by_scenario_and_method() {
    let dir = tempfile::tempdir().unwrap();
    for (scenario, methods) in [("s2", "boir,rbii1,ecf"), ("s3", "boir,boir-airm")] {
        let o = run(&[
            "run", "--scenario", scenario, "--methods", methods, "--trials", "2", "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let (o, report) = eval_report(dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<&str> = report.lines().collect();
    assert!(rows[0].starts_with("scenario,method,trials,accuracy_mean"));
    assert_eq!(rows.len(), 1 + 3 + 2);
    assert!(rows[1].starts_with("s2,boir,2,"));
    assert!(rows[5].starts_with("s3,boir-airm,2,"));
}

#[test]
fn eval_skips_corrupt_logs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "--scenario", "s2", "--trials", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let files = jsonl_files(dir.path());
    // one log with a damaged tick line, one that is garbage throughout
    let text = std::fs::read_to_string(&files[0]).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[3] = "{\"record\":\"tick\",".into();
    std::fs::write(&files[0], lines.join("\n")).unwrap();
    std::fs::write(&files[1], "not json\nstill not\n").unwrap();

    let (o, report) = eval_report(dir.path());
    assert!(o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("corrupt lines [4]"), "{stderr}");
    assert!(stderr.contains("skipping"), "{stderr}");
    assert!(report.lines().nth(1).unwrap().starts_with("s2,boir,2,"));

    std::fs::write(&files[0], "garbage\n").unwrap();
    std::fs::write(&files[2], "").unwrap();
    let (o, _) = eval_report(dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn serve_flushes_session_log_on_sigint() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = intentnav()
        .args(["serve", "--scenario", "s3", "--port", "0", "--log-dir"])
        .arg(dir.path())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    let url = line.trim().strip_prefix("listening on ").unwrap().to_string();

    let (mut socket, _) = tungstenite::connect(&url).unwrap();
    let mut ticks = 0;
    while ticks < 5 {
        if let Message::Text(t) = socket.read().unwrap() {
            if t.as_str().contains("\"type\":\"tick_state\"") {
                ticks += 1;
            }
        }
    }
    // a second console is turned away while this one is connected
    match tungstenite::connect(&url) {
        Err(tungstenite::Error::Http(resp)) => assert_eq!(resp.status().as_u16(), 409),
        other => panic!("expected 409, got {:?}", other.map(|(_, r)| r.status())),
    }

    let pid = child.id().to_string();
    assert!(Command::new("kill").args(["-INT", &pid]).status().unwrap().success());
    let status = wait(&mut child, Duration::from_secs(20));
    assert!(status.success());
    let logs = jsonl_files(dir.path());
    assert_eq!(logs.len(), 1);
    let text = std::fs::read_to_string(&logs[0]).unwrap();
    assert!(text.lines().last().unwrap().contains("\"reason\":\"interrupted\""));
    assert!(text.lines().count() >= 5 + 2);
}

#[test]
fn serve_reports_busy_port() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = run(&["serve", "--scenario", "s3", "--port", &port]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot listen"));
}

fn wait(child: &mut std::process::Child, limit: Duration) -> std::process::ExitStatus {
    let start = std::time::Instant::now();
    loop {
        if let Some(status) = child.try_wait().unwrap() {
            return status;
        }
        if start.elapsed() > limit {
            let _ = child.kill();
            panic!("server did not stop after SIGINT");
        }
        std::thread::sleep(Duration::from_millis(50));
    }
}
