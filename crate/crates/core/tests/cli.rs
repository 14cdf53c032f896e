use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
id = "cli"
seed = 11
shape = [[2, 1.0], [1, 0.5]]
kernel = { kind = "random", family = "pinching" }
[budgets]
n_max = 3
bound = 10.0
"#;

fn ncerg(args: &[&str], cfg: &Path, seed_env: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ncerg"));
    c.args(args).arg("--config").arg(cfg).env_remove("NCERG_SEED");
    if let Some(s) = seed_env {
        c.env("NCERG_SEED", s);
    }
    c.output().unwrap()
}

fn setup(text: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, text).unwrap();
    (dir, cfg)
}

#[test]
fn success_prints_csv() {
    let (_d, cfg) = setup(CONFIG);
    let out = ncerg(&["prop1"], &cfg, None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("experiment,command,level,metric,value,verdict\n"));
}

#[test]
fn strict_mode_exits_one_on_failing_rows() {
    let (_d, cfg) = setup(&CONFIG.replace("bound = 10.0", "bound = 1e-6").replace("pinching", "convex"));
    assert_eq!(ncerg(&["dsae"], &cfg, None).status.code(), Some(0));
    assert_eq!(ncerg(&["dsae", "--strict"], &cfg, None).status.code(), Some(1));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let (_d, cfg) = setup(CONFIG);
    assert_eq!(ncerg(&["frobnicate"], &cfg, None).status.code(), Some(2));
    let (_d2, bad) = setup("id = 3");
    let out = ncerg(&["norms"], &bad, None);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let missing = Command::new(env!("CARGO_BIN_EXE_ncerg")).arg("norms").output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn seed_flag_beats_environment_beats_config() {
    let (_d, cfg) = setup(CONFIG);
    let base = ncerg(&["norms"], &cfg, None).stdout;
    let env = ncerg(&["norms"], &cfg, Some("77")).stdout;
    let flag = ncerg(&["norms", "--seed", "77"], &cfg, None).stdout;
    let both = ncerg(&["norms", "--seed", "11"], &cfg, Some("77")).stdout;
    assert_ne!(base, env);
    assert_eq!(env, flag);
    assert_eq!(both, base);
}

#[test]
fn reruns_are_byte_identical_and_out_file_matches_stdout() {
    let (d, cfg) = setup(CONFIG);
    let a = ncerg(&["cesaro", "--format", "json"], &cfg, None).stdout;
    let b = ncerg(&["cesaro", "--format", "json"], &cfg, None).stdout;
    assert_eq!(a, b);
    let file = d.path().join("rows.json");
    let out = ncerg(&["cesaro", "--format", "json", "--out", file.to_str().unwrap()], &cfg, None);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(file).unwrap(), a);
}
