use std::path::Path;
use std::process::{Command, Output};

fn gonal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gonal"))
        .args(args)
        .env_remove("GONAL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn construct(dir: &Path, name: &str, extra: &[&str]) -> (Output, std::path::PathBuf) {
    let path = dir.join(name);
    let mut args = vec!["construct", "--p", "3", "--e", "1", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    (gonal(&args), path)
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (o, cert) = construct(dir.path(), "c9.json", &["--gamma", "2", "--genus", "9", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("N1=8 genus=9 r=9 d=[3,5,1]"), "{}", stdout(&o));
    let v = gonal(&["verify", "--cert", cert.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
}

#[test]
fn certificates_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--gamma", "3", "--genus", "28", "--seed", "3"];
    let (_, a) = construct(dir.path(), "a.json", &args);
    let (_, b) = construct(dir.path(), "b.json", &args);
    let mut c_args = vec!["--jobs", "1"];
    c_args.extend_from_slice(&args);
    let (_, c) = construct(dir.path(), "c.json", &c_args);
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    assert_eq!(a, std::fs::read(c).unwrap());
    assert!(a.ends_with(b"\n"));
}

#[test]
fn certificate_to_stdout() {
    let o = gonal(&["construct", "--p", "3", "--gamma", "2", "--genus", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["version"], "v1");
    assert!(stderr(&o).contains("N1=8"));
}

#[test]
fn infeasible_genus_exit_code() {
    let o = gonal(&["construct", "--p", "3", "--e", "1", "--gamma", "3", "--genus", "12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d_3 = -8"), "{}", stderr(&o));
}

#[test]
fn char2_budget_exhaustion() {
    let o = gonal(&["construct", "--p", "2", "--e", "1", "--gamma", "2", "--genus", "20", "--budget", "128"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("advisory: characteristic 2"), "{}", stderr(&o));
}

#[test]
fn tampered_certificate_fails_with_named_check() {
    let dir = tempfile::tempdir().unwrap();
    let (_, cert) = construct(dir.path(), "c.json", &["--gamma", "2", "--genus", "9"]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let c = &mut v["f"]["f"][1][0];
    *c = serde_json::json!((c.as_u64().unwrap() + 1) % 3);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = gonal(&["verify", "--cert", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("check `f` failed"), "{}", stderr(&o));
}

#[test]
fn schema_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (_, cert) = construct(dir.path(), "c.json", &["--gamma", "2", "--genus", "9"]);
    let text = std::fs::read_to_string(&cert).unwrap();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    assert_eq!(gonal(&["verify", "--cert", cut.to_str().unwrap()]).status.code(), Some(65));

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["version"] = "v2".into();
    let old = dir.path().join("old.json");
    std::fs::write(&old, v.to_string()).unwrap();
    assert_eq!(gonal(&["verify", "--cert", old.to_str().unwrap()]).status.code(), Some(65));

    assert_eq!(gonal(&["construct", "--p", "3"]).status.code(), Some(64));
    assert_eq!(gonal(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(gonal(&["construct", "--p", "6", "--gamma", "2", "--genus", "9"]).status.code(), Some(64));
    assert_eq!(gonal(&["--help"]).status.code(), Some(0));
}

#[test]
fn count_and_cap() {
    let dir = tempfile::tempdir().unwrap();
    let (_, cert) = construct(dir.path(), "c.json", &["--gamma", "2", "--genus", "9"]);
    let c = cert.to_str().unwrap();
    let o = gonal(&["count", "--cert", c, "--ext", "1"]);
    assert_eq!(stdout(&o).trim(), "N_1=8");
    let o = gonal(&["count", "--cert", c, "--ext", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("N_2="));
    let o = gonal(&["count", "--cert", c, "--ext", "12", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn zeta_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (_, cert) = construct(dir.path(), "c8.json", &["--gamma", "2", "--genus", "8"]);
    let c = cert.to_str().unwrap();
    let o = gonal(&["zeta", "--cert", c]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("consistent, genus 8"));
    let o = gonal(&["zeta", "--cert", c, "--genus", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("inconsistent"));
    let o = gonal(&["zeta", "--cert", c, "--cap", "100"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn density_table_and_json() {
    let o = gonal(&[
        "density", "--p", "3", "--e", "1", "--gamma", "2", "--d", "3,5,1", "--trials", "100", "--max-prime-degree", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("truncated product (deg p <= 1): 1 "), "{out}");
    assert!(out.contains("|empirical - truncated|"));
    let o = gonal(&["density", "--p", "3", "--gamma", "2", "--max-prime-degree", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["perPrime"].as_array().unwrap().len(), 3);
    let o = gonal(&["density", "--p", "3", "--gamma", "3", "--max-prime-degree", "2", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(4));
    let o = gonal(&["density", "--p", "3", "--gamma", "2", "--d", "1,2", "--max-prime-degree", "1"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn cache_dir_is_populated_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let (_, cert) = construct(dir.path(), "c.json", &["--gamma", "2", "--genus", "9"]);
    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gonal"))
            .args(["count", "--cert", cert.to_str().unwrap(), "--ext", "3"])
            .env("GONAL_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(cache.join("irreducible-p3-e1-d3.json").exists());
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&first), stdout(&gonal(&["count", "--cert", cert.to_str().unwrap(), "--ext", "3"])));
}
