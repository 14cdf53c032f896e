use ncerg::expcli::{
    dump, from_csv, from_json, parse_config, render, replay_dump, run, to_csv, Command, Format, RowVerdict,
};
use ncerg::Error;

const CONFIG: &str = r#"
id = "it"
seed = 5
shape = [[2, 1.0], [2, 0.5]]
norms = ["L1", "L1plusLinf", "orlicz:power:3"]
schedule = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
kernel = { kind = "random", family = "unitary_mixture" }
[budgets]
n_max = 4
epsilon = 0.2
bound = 10.0
trials = 5
"#;

#[test]
fn every_command_runs_and_is_deterministic() {
    let c = parse_config(CONFIG).unwrap();
    for cmd in Command::ALL {
        let a = run(&c, cmd).unwrap();
        let b = run(&c, cmd).unwrap();
        assert!(!a.rows.is_empty(), "{}", cmd.name());
        assert_eq!(to_csv(&a.rows).unwrap(), to_csv(&b.rows).unwrap());
        assert!(a.rows.iter().all(|r| r.command == cmd.name() && r.experiment == "it"));
    }
}

#[test]
fn theorem_on_a_small_algebra_reports_infeasibility() {
    let c = parse_config(CONFIG).unwrap();
    let out = run(&c, Command::Theorem).unwrap();
    assert!(out.any_fail());
    assert!(out.rows.iter().any(|r| r.metric.starts_with("infeasible_budget") && r.verdict == RowVerdict::Fail));
}

#[test]
fn rows_round_trip_through_both_formats() {
    let c = parse_config(CONFIG).unwrap();
    let rows = run(&c, Command::Norms).unwrap().rows;
    assert_eq!(from_csv(&render(&rows, Format::Csv).unwrap()).unwrap(), rows);
    assert_eq!(from_json(&render(&rows, Format::Json).unwrap()).unwrap(), rows);
}

#[test]
fn dump_replays_from_artifacts_alone() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse_config(CONFIG).unwrap();
    for cmd in [Command::Prop1, Command::Dsae, Command::Certify] {
        let sub = dir.path().join(cmd.name());
        let out = run(&c, cmd).unwrap();
        dump(&sub, &c, cmd, &out).unwrap();
        assert!(sub.join("config.toml").exists() && sub.join("rows.csv").exists());
        assert_eq!(replay_dump(&sub).unwrap(), out.rows);
    }
}

#[test]
fn resolved_config_does_not_depend_on_the_seed() {
    let c = parse_config(CONFIG).unwrap();
    let mut r = c.resolved().unwrap();
    let before = run(&r, Command::Cesaro).unwrap().rows;
    r.seed = 999;
    assert_eq!(run(&r, Command::Cesaro).unwrap().rows, before);
    assert_eq!(before, run(&c, Command::Cesaro).unwrap().rows);
}

#[test]
fn bad_configs_list_every_problem() {
    let text = CONFIG.replace("epsilon = 0.2", "epsilon = 50.0").replace("\"L1\",", "\"L9\",");
    match parse_config(&text) {
        Err(Error::Config(v)) => assert_eq!(v.len(), 2, "{v:?}"),
        other => panic!("{other:?}"),
    }
    assert!(parse_config("id = \"x\"\nseed = 1\nshape = [[2, 1.0]]\nkernel = { kind = \"warp\" }\n").is_err());
    assert!(parse_config(&format!("{CONFIG}\nunknown = 1\n")).is_err());
}

#[test]
fn bundled_configs_parse() {
    for name in ["pinch.toml", "heavy_theorem.toml"] {
        let path = format!("{}/examples/configs/{name}", env!("CARGO_MANIFEST_DIR"));
        parse_config(&std::fs::read_to_string(path).unwrap()).unwrap();
    }
}
