use std::process::{Command, Output};

fn doodle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doodle"))
        .args(args)
        .env_remove("DOODLE_STORE")
        .env_remove("DOODLE_BUDGET_SECS")
        .env_remove("DOODLE_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hopf_has_genus_one() {
    let o = doodle(&["genus", "family:hopf"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn different_d4_fixtures_are_unequal() {
    let o = doodle(&["eq", "fixture:d4.1", "fixture:d4.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "unequal");
    assert_eq!(doodle(&["eq", "fixture:d4.1", "fixture:d4.1", "--detour-only"]).status.code(), Some(0));
}

#[test]
fn curl_reduces_to_a_circle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curl.pd");
    std::fs::write(&path, "# one kink\nX(a,b,b,a)\n").unwrap();
    let o = doodle(&["reduce", path.to_str().unwrap(), "--out", "gauss"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("H1-"), "{text}");
    assert!(text.lines().any(|l| l.trim() == "O"), "{text}");
    assert_eq!(stdout(&doodle(&["eq", path.to_str().unwrap(), "family:trivial:1"])).trim(), "equal");
}

#[test]
fn exit_codes() {
    assert_eq!(doodle(&["genus"]).status.code(), Some(2));
    assert_eq!(doodle(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pd");
    std::fs::write(&bad, "X(a,b,c").unwrap();
    assert_eq!(doodle(&["genus", bad.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(doodle(&["genus", "family:nonsense"]).status.code(), Some(2));
}

#[test]
fn census_store_budget_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("census.jsonl");
    let cp = dir.path().join("cp.json");
    let s = store.to_str().unwrap();
    let c = cp.to_str().unwrap();
    let o = doodle(&["census", "6", "--genus", "0", "--store", s, "--budget", "0", "--checkpoint", c]);
    assert_eq!(o.status.code(), Some(4));
    assert!(cp.exists());
    let o = doodle(&["census", "6", "--genus", "0", "--store", s, "--checkpoint", c, "--resume"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let q = doodle(&["query", "--store", s, "--n", "6", "--face", "3=8"]);
    assert_eq!(stdout(&q).lines().count(), 1);
}

#[test]
fn census_output_does_not_depend_on_workers() {
    let one = doodle(&["census", "4", "--workers", "1"]);
    let four = doodle(&["census", "4", "--workers", "4"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one).lines().count(), 84);
}

#[test]
fn store_from_environment_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = dir.path().join("env.jsonl");
    let from_file = dir.path().join("file.jsonl");
    let config = dir.path().join("doodle.toml");
    std::fs::write(&config, format!("store = {:?}\n", from_file.to_str().unwrap())).unwrap();
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_doodle"));
        cmd.args(["--config", config.to_str().unwrap(), "census", "2"]).env_remove("DOODLE_STORE");
        if let Some(e) = env {
            cmd.env("DOODLE_STORE", e);
        }
        cmd.output().unwrap()
    };
    assert!(run(None).status.success());
    assert!(from_file.exists());
    assert!(run(Some(from_env.to_str().unwrap())).status.success());
    assert!(from_env.exists());
}

#[test]
fn planarize_and_render() {
    let o = doodle(&["planarize", "family:hopf"]);
    let text = stdout(&o);
    assert!(text.starts_with("# virtual crossings: 1"), "{text}");
    assert!(stdout(&doodle(&["render", "fixture:fig20", "--svg"])).contains("<svg"));
    assert!(stdout(&doodle(&["render", "family:poppy", "--dot"])).contains("graph"));
    assert_eq!(stdout(&doodle(&["va", "fixture:fig20"])).trim(), "1");
}

#[test]
fn canon_modes_and_identities() {
    let a = stdout(&doodle(&["canon", "family:b:3"]));
    let b = stdout(&doodle(&["canon", "family:b:3", "--mode", "oriented,ordered"]));
    assert_ne!(a, b);
    assert_eq!(doodle(&["canon", "family:hopf", "--mode", "sideways"]).status.code(), Some(2));
    let report = stdout(&doodle(&["identities", "family:poppy"]));
    assert_eq!(report.matches("pass").count(), 3, "{report}");
}

#[test]
fn confluence_lab_reports() {
    let o = doodle(&["confluence", "--random", "50", "--seed", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ldc without urp 0"));
    let o = doodle(&["confluence", "--doodle-seed", "family:b:3", "--depth", "3", "--seed", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("roots 1"));
}

#[test]
fn verify_claims_passes() {
    let o = doodle(&["verify-claims"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
