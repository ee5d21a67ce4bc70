use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).args(args).output().expect("spawn forge")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn construct_demo(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("demo.json");
    let out = forge(&[
        "construct",
        "--mode",
        "demo",
        "--seq",
        "preset:poly:0",
        "--depth",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn threegap_writes_at_most_three_lengths() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("gaps.csv");
    let out = forge(&["threegap", "--n", "700", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("three-gap: pass"));
    let text = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!((1..=3).contains(&rows.len()));
    let total: u64 = rows.iter().map(|r| r.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 700);
}

#[test]
fn sturmian_reports_complexity() {
    let out = forge(&["sturmian", "--alpha-cf", "0;1,1,1,1,1,1,1,1,1,1,1,1", "--len", "30", "--complexity-max", "20"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("P(n) = n + 1 for n <= 20: pass"));
    assert!(text.lines().any(|l| l.starts_with("prefix: ") && l.len() == "prefix: ".len() + 30));
}

#[test]
fn malformed_rotation_exits_2() {
    assert_eq!(code(&forge(&["threegap", "--alpha-cf", "0;2,0,3"])), 2);
    assert_eq!(code(&forge(&["sturmian", "--alpha-cf", "banana"])), 2);
}

#[test]
fn strict_depth_two_hits_the_word_cap() {
    let dir = TempDir::new().unwrap();
    let out = forge(&["construct", "--depth", "2", "--out", dir.path().join("s.json").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(!dir.path().join("s.json").exists());
}

#[test]
fn word_cap_override_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(["construct", "--mode", "demo", "--seq", "preset:poly:0", "--out"])
        .arg(dir.path().join("x.json"))
        .env("FORGE_MAX_WORD_LEN", "1000")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn unknown_sequence_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = forge(&["construct", "--seq", "preset:factorial", "--out", dir.path().join("x.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn construct_verify_and_tamper() {
    let dir = TempDir::new().unwrap();
    let path = construct_demo(dir.path());

    let out = forge(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("verified"));

    // flip one letter of s inside its last x, where the marker xxxy starts in ss and st
    let text = std::fs::read_to_string(&path).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let s = json["seeds"][0]["s"].as_str().unwrap().to_string();
    let x_len = json["seeds"][0]["x_len"].as_u64().unwrap() as usize;
    let mut bytes = s.into_bytes();
    let i = 4 * x_len + x_len / 2;
    bytes[i] = if bytes[i] == b'0' { b'1' } else { b'0' };
    json["seeds"][0]["s"] = serde_json::Value::String(String::from_utf8(bytes).unwrap());
    let flipped = dir.path().join("flipped.json");
    std::fs::write(&flipped, serde_json::to_string(&json).unwrap()).unwrap();
    let out = forge(&["verify", flipped.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL seed_1_marker_once_in_ss"), "{}", stdout(&out));

    // a stored measurement that no longer matches the recomputation
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let r = json["levels"][0]["ratio_measurements"][0]["ratio"].as_f64().unwrap();
    json["levels"][0]["ratio_measurements"][0]["ratio"] = serde_json::json!(r + 0.001);
    let edited = dir.path().join("edited.json");
    std::fs::write(&edited, serde_json::to_string(&json).unwrap()).unwrap();
    assert_eq!(code(&forge(&["verify", edited.to_str().unwrap()])), 1);

    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 3]).unwrap();
    assert_eq!(code(&forge(&["verify", truncated.to_str().unwrap()])), 2);
}

#[test]
fn spectrum_from_artifact_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = construct_demo(dir.path());
    let mut csvs = Vec::new();
    for run in 0..2 {
        let prefix = dir.path().join(format!("run{run}"));
        let out = forge(&[
            "spectrum",
            "--input",
            path.to_str().unwrap(),
            "--sizes",
            "31,61",
            "--csv",
            prefix.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).starts_with("HEURISTIC"));
        let ev = std::fs::read_to_string(format!("{}_eigenvalues.csv", prefix.display())).unwrap();
        assert_eq!(ev.lines().count(), 1 + 31 + 61);
        assert!(ev.starts_with("size,index,eigenvalue"));
        csvs.push(ev);
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn spectrum_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let raw = dir.path().join("word.txt");
    std::fs::write(&raw, "0101101011\n").unwrap();
    let p = raw.to_str().unwrap();
    assert_eq!(code(&forge(&["spectrum", "--input", p, "--sizes", "5,10"])), 0);
    assert_eq!(code(&forge(&["spectrum", "--input", p, "--sizes", "5,10", "--tol", "0"])), 2);
    assert_eq!(code(&forge(&["spectrum", "--input", p, "--sizes", "5,20"])), 2);
    std::fs::write(&raw, "0102").unwrap();
    assert_eq!(code(&forge(&["spectrum", "--input", p, "--sizes", "3"])), 2);
}

#[test]
fn construct_is_deterministic_apart_from_the_timestamp() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let read = |p: std::path::PathBuf| {
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["provenance"]["timestamp"] = serde_json::Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(read(construct_demo(a.path())), read(construct_demo(b.path())));
}
