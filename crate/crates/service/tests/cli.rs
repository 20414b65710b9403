use std::fs;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use serde_json::Value;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn burt() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_burt"));
    c.env_remove("BURT_PORT").env_remove("BURT_MODELS_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    burt().args(args).output().expect("burt runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn model_path() -> String {
    fixtures().join("models/mileage/model.json").display().to_string()
}

fn replay(script: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "replay".to_string(),
        "--model".into(),
        model_path(),
        "--script".into(),
        script.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    burt().args(&args).output().unwrap()
}

#[test]
fn golden_transcripts_match() {
    let bless = std::env::var_os("BURT_BLESS").is_some();
    let mut scripts: Vec<_> = fs::read_dir(fixtures().join("scripts"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    scripts.sort();
    assert!(scripts.len() >= 6);
    for script in scripts {
        let name = script.file_stem().unwrap().to_string_lossy().into_owned();
        let out = replay(&script, &[]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        let golden = fixtures().join("golden").join(format!("{name}.jsonl"));
        if bless {
            fs::write(&golden, &out.stdout).unwrap();
            continue;
        }
        let expected = fs::read(&golden).unwrap_or_else(|_| panic!("missing golden for {name}"));
        assert!(
            out.stdout == expected,
            "{name}: transcript differs from {}",
            golden.display()
        );
    }
}

#[test]
fn replay_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let out = replay(
        &fixtures().join("scripts/happy_path.yaml"),
        &["--report-dir", dir.path().to_str().unwrap(), "--session-id", "hp"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("hp.json")).unwrap()).unwrap();
    assert_eq!(json["session_id"], "hp");
    assert_eq!(json["app_id"], "mileage");
    assert_eq!(json["steps"].as_array().unwrap().len(), 3);
    assert!(dir.path().join("hp.html").is_file());
}

#[test]
fn replay_stops_on_a_rejected_message() {
    let dir = TempDir::new().unwrap();
    let script = dir.path().join("bad.json");
    fs::write(
        &script,
        r#"[{"kind": "TEXT", "text": "The app crashed"}, {"kind": "CONFIRM_YES"}]"#,
    )
    .unwrap();
    let out = replay(&script, &[]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("message 1 (CONFIRM_YES)"), "{}", stderr(&out));
    let lines = String::from_utf8(out.stdout).unwrap();
    assert!(lines.lines().count() >= 4);
}

#[test]
fn replay_rejects_malformed_scripts() {
    let dir = TempDir::new().unwrap();
    let script = dir.path().join("bad.yaml");
    fs::write(&script, "- kind: DANCE\n").unwrap();
    let out = replay(&script, &[]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("bad.yaml"));
}

#[test]
fn build_model_reproduces_the_fixture() {
    let dir = TempDir::new().unwrap();
    let out_file = dir.path().join("nested/model.json");
    let traces = fixtures().join("traces/mileage");
    let out = run(&[
        "build-model",
        "--traces",
        traces.to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(out_file).unwrap(),
        fs::read_to_string(fixtures().join("models/mileage/model.json")).unwrap()
    );
}

#[test]
fn build_model_rejects_discontinuous_traces() {
    let dir = TempDir::new().unwrap();
    let src = fixtures().join("traces/mileage/h02_browse_history.json");
    let mut trace: Value = serde_json::from_str(&fs::read_to_string(src).unwrap()).unwrap();
    // The BACK from the detail screen now claims to start on the fillup screen.
    let fillup = trace["events"][0]["result_screen"].clone();
    trace["events"][3]["source_screen"] = fillup;
    fs::write(dir.path().join("broken.json"), trace.to_string()).unwrap();
    let out_file = dir.path().join("model.json");
    let out = run(&[
        "build-model",
        "--traces",
        dir.path().to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(
        stderr(&out).contains("does not match the next event's source screen"),
        "{}",
        stderr(&out)
    );
    assert!(!out_file.exists());
}

#[test]
fn serve_refuses_a_bad_port() {
    for (port, expect) in [("99999", "invalid port"), ("eighty", "invalid port")] {
        let out = burt()
            .args(["serve"])
            .env("BURT_PORT", port)
            .env("BURT_MODELS_DIR", fixtures().join("models"))
            .output()
            .unwrap();
        assert!(!out.status.success());
        assert!(stderr(&out).contains(expect), "{}", stderr(&out));
    }
}

#[test]
fn serve_refuses_a_missing_models_dir() {
    let out = burt()
        .args(["serve"])
        .env("BURT_PORT", "1")
        .env("BURT_MODELS_DIR", "/nonexistent/models")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn http_get(port: u16, path: &str) -> Option<String> {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).ok()?;
    write!(
        stream,
        "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
    )
    .ok()?;
    let mut body = String::new();
    stream.read_to_string(&mut body).ok()?;
    Some(body)
}

#[test]
fn serve_answers_over_tcp() {
    let out = TempDir::new().unwrap();
    let config = out.path().join("config.json");
    fs::write(
        &config,
        serde_json::json!({ "output_dir": out.path().join("output") }).to_string(),
    )
    .unwrap();
    let port = free_port();
    let mut child = burt()
        .args(["serve", "--config", config.to_str().unwrap()])
        .env("BURT_PORT", port.to_string())
        .env("BURT_MODELS_DIR", fixtures().join("models"))
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    let mut response = None;
    while Instant::now() < deadline {
        if let Some(r) = http_get(port, "/api/apps") {
            response = Some(r);
            break;
        }
        sleep(Duration::from_millis(50));
    }
    child.kill().unwrap();
    child.wait().unwrap();
    let response = response.expect("server came up");
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"id\":\"mileage\""));
}
