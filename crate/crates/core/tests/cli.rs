use std::path::Path;
use std::process::{Command, Output};

fn fade(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fade")).args(args).current_dir(cwd).env_remove("FADE_SEED").output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn faults_list_json_has_the_catalog() {
    let d = tempfile::tempdir().unwrap();
    let out = fade(&["faults", "list", "--format", "json"], d.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let models = v["models"].as_array().unwrap();
    assert_eq!(models.len(), 24);
    let defl = models.iter().find(|m| m["id"] == "lidar.deflection").unwrap();
    assert_eq!(defl["category"], "active");
    assert_eq!(defl["pre"], "bumpy_road");
    for m in models {
        for p in m["params"].as_array().unwrap() {
            assert!(p["lo"].as_f64().unwrap() < p["hi"].as_f64().unwrap());
        }
    }
}

#[test]
fn generate_zero_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let out = fade(&["generate", "--num", "0"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--num"));
}

#[test]
fn generate_is_reproducible_and_reloadable() {
    let d = tempfile::tempdir().unwrap();
    for o in ["a", "b"] {
        let out = fade(&["generate", "--num", "4", "--seed", "9", "--out", o, "--campaign", "c"], d.path());
        assert!(out.status.success(), "{}", text(&out.stderr));
    }
    let a = d.path().join("a/scenarios/c");
    let b = d.path().join("b/scenarios/c");
    let loaded = fade::harness::load_scenarios(&a).unwrap();
    assert_eq!(loaded.len(), 4);
    for i in 0..4 {
        let f = fade::harness::io::scenario_file(Path::new(""), i);
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap());
    }
}

#[test]
fn unknown_fault_in_config_names_the_id() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.toml"), "[scenarios]\nobstacle_ahead = 1\n[faults]\nids = [\"lidar.wobble\"]\n").unwrap();
    let out = fade(&["campaign", "--config", "c.toml"], d.path());
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("lidar.wobble"));
}

const MINI: &str = r#"
name = "mini"
seed = 4
output = "out"
[scenarios]
obstacle_ahead = 2
[faults]
ids = ["lidar.deflection"]
[fuzz]
budget = 5
"#;

#[test]
fn campaign_report_matches_verdict_files_and_replays() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.toml"), MINI).unwrap();
    let out = fade(&["campaign", "--config", "c.toml"], d.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let root = d.path().join("out");
    let rows = fade::harness::io::read_report(&root.join("report.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let dir = root.join("runs/mini").join(&r.scenario).join(&r.fault);
        let v = fade::harness::load_verdict(&dir.join("verdict.json")).unwrap();
        assert_eq!(v.results.len(), r.evaluations);
        assert_eq!(v.results.iter().filter(|x| x.svf).count(), r.sv_count);
        assert_eq!(r.evaluations, 5);
        let baseline = root.join("runs/mini").join(&r.scenario).join("baseline/trace.jsonl");
        assert!(baseline.exists());
        if let Some(b) = v.best {
            assert_eq!(Some(v.results[b].objectives.i), r.best_i);
        }
    }

    let trace = root.join("runs/mini").join(&rows[0].scenario).join("baseline/trace.jsonl");
    let steps = std::fs::read_to_string(&trace).unwrap().lines().count() - 1;
    let out = fade(&["replay", trace.to_str().unwrap(), "--out", "frames"], d.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert_eq!(std::fs::read_dir(d.path().join("frames")).unwrap().count(), steps);
}

#[test]
fn seed_env_overrides_config() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.toml"), MINI.replace("obstacle_ahead = 2", "obstacle_ahead = 1").replace("budget = 5", "budget = 1")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fade"))
        .args(["campaign", "--config", "c.toml"])
        .current_dir(d.path())
        .env("FADE_SEED", "77")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", text(&out.stderr));
    let cfg = fade::harness::CampaignConfig::load(&d.path().join("out/config.toml")).unwrap();
    assert_eq!(cfg.seed, 77);
}

#[test]
fn truncated_trace_reports_the_line() {
    let d = tempfile::tempdir().unwrap();
    let scen = d.path().join("s.json");
    std::fs::write(&scen, {
        let mut s = fade::scenario::obstacle_ahead(0);
        s.steps = 10;
        s.to_json()
    })
    .unwrap();
    let out = fade(&["run", "--scenario", "s.json", "--ads", "reference", "--fault", "lidar.deflection", "--values", "0,0.05", "--out", "r"], d.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["fault"], "lidar.deflection");

    let full = std::fs::read_to_string(d.path().join("r/baseline.jsonl")).unwrap();
    let cut = &full[..full.len() - 40];
    std::fs::write(d.path().join("cut.jsonl"), cut).unwrap();
    let out = fade(&["replay", "cut.jsonl", "--out", "f"], d.path());
    assert!(!out.status.success());
    let lines = cut.lines().count();
    assert!(text(&out.stderr).contains(&format!("cut.jsonl:{lines}:")), "{}", text(&out.stderr));
}

#[test]
fn repeat_aggregates_per_fault() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.toml"), MINI.replace("obstacle_ahead = 2", "obstacle_ahead = 1").replace("budget = 5", "budget = 2")).unwrap();
    let out = fade(&["campaign", "--config", "c.toml", "--repeat", "3"], d.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(d.path().join("out/repeat.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("fault,runs,avg,min,median,max"));
    assert!(lines.next().unwrap().starts_with("lidar.deflection,3,"));
    for i in 0..3 {
        assert!(d.path().join(format!("out/repeat-{i:02}/report.csv")).exists());
    }
}
