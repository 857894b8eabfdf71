use std::path::Path;
use std::process::{Command, Output};

fn geoblock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoblock")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn count_csv_on_the_unit_torus() {
    let out = geoblock(&["count", "--t-grid", "0.4,1", "--set", "pairs=0 0 1/2 0"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "pair,x1,x2,y1,y2,t,n,m,status,seed\n0,0,0,0.5,0,0.4,0,0,ok,42\n0,0,0,0.5,0,1,2,2,ok,42\n"
    );
}

#[test]
fn outputs_do_not_depend_on_the_worker_count() {
    for command in ["count", "verify"] {
        let run = |w: &str| {
            let out = geoblock(&[command, "--t-grid", "1:3:1/2", "--workers", w, "--format", "json"]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            out.stdout
        };
        let one = run("1");
        assert_eq!(one, run("2"), "{command}");
        assert_eq!(one, run("8"), "{command}");
    }
}

#[test]
fn empty_grid_gives_a_header() {
    let out = geoblock(&["count", "--t-grid", "[]"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "pair,x1,x2,y1,y2,t,n,m,status,seed\n");
}

#[test]
fn exit_codes() {
    assert_eq!(geoblock(&["count", "--t-grid", "0:1:1/2"]).status.code(), Some(2));
    assert_eq!(geoblock(&["block", "--geometry", "schottky"]).status.code(), Some(2));
    assert_eq!(geoblock(&["block", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(geoblock(&["count", "--set", "no_such_key=1"]).status.code(), Some(2));
    assert_eq!(geoblock(&["frobnicate"]).status.code(), Some(2));
    let capped = geoblock(&[
        "count",
        "--geometry",
        "genus2-octagon",
        "--t-grid",
        "1:6:1",
        "--set",
        "orbit_budget.max_elements=10",
    ]);
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn out_directory_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "t_grid = 1,2\nseed = 7\npairs = 0 0 1/2 0\n").unwrap();
    let target = dir.path().join("out");
    let out = geoblock(&[
        "block",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target.join("block.json")).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
    let pairs = Path::new(dir.path()).join("pairs.txt");
    std::fs::write(&pairs, "# x1 x2 y1 y2\n0 0 1/4 1/4\n").unwrap();
    let out = geoblock(&["count", "--pairs", pairs.to_str().unwrap(), "--t-grid", "1"]);
    assert!(stdout(&out).lines().nth(1).unwrap().starts_with("0,0,0,0.25,0.25,1,"));
}

#[test]
fn report_and_transform() {
    let out = geoblock(&["report", "--t-grid", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "insufficient data");
    let out = geoblock(&["transform", "--t-grid", "1,2,4", "--set", "transform.function=const:2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().next(), Some("t,kappa,value,ln_value,seed"));
}
