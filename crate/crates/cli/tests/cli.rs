use std::process::{Command, Output};

fn zerotemp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerotemp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn listed() -> Vec<serde_json::Value> {
    let o = zerotemp(&["list", "--json"]);
    assert!(o.status.success());
    serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap().as_array().unwrap().clone()
}

#[test]
fn list_names_the_claims() {
    let text = stdout(&zerotemp(&["list"]));
    let even = text.lines().find(|l| l.starts_with("evenTree-tie")).unwrap();
    assert!(even.contains("even-regular trees do not freeze"));
    let weak = text.lines().find(|l| l.starts_with("loop-terminal-gsp")).unwrap();
    assert!(weak.contains("weak limits of loop dynamics"));
    assert_eq!(text.lines().count(), listed().len());
}

#[test]
fn every_listed_experiment_runs() {
    for e in listed() {
        let name = e["name"].as_str().unwrap();
        let takes_replicas = e["keys"].as_array().unwrap().iter().any(|k| k == "run.replicas");
        let mut args = vec!["run", name];
        if takes_replicas {
            args.extend(["--set", "run.replicas=3"]);
        }
        let o = zerotemp(&args);
        // 0 and 1 are verdicts; 2 is an error
        assert!(matches!(o.status.code(), Some(0 | 1)), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["experiment"], name);
        assert_eq!(v["passed"], o.status.success());
    }
}

#[test]
fn same_config_same_bytes() {
    let dir = std::env::temp_dir().join(format!("zerotemp-cli-{}", std::process::id()));
    let cfg = dir.join("cfg.txt");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&cfg, "experiment.name = nonfreezing-cylinder\n[run]\nseed = 11\nreplicas = 30\n").unwrap();
    let mut outs = Vec::new();
    for (i, jobs) in ["1", "4"].iter().enumerate() {
        let out = dir.join(format!("out{i}"));
        let o = zerotemp(&["run", "--config", cfg.to_str().unwrap(), "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        outs.push((
            std::fs::read(out.join("summary.json")).unwrap(),
            std::fs::read(out.join("replicas.csv")).unwrap(),
            stdout(&o),
        ));
    }
    assert_eq!(outs[0], outs[1]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn nonfreezing_summary_fields() {
    let o = zerotemp(&["run", "nonfreezing-cylinder", "--seed", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["other_flips"], 0);
    let mean = v["summary"]["mean_shared_flips"].as_f64().unwrap();
    assert!((40.0..=60.0).contains(&mean), "{mean}");
}

#[test]
fn bad_input_is_an_error() {
    assert_eq!(zerotemp(&["run", "no-such-experiment"]).status.code(), Some(2));
    assert_eq!(zerotemp(&["run", "torus-uniform", "--set", "graph.bogus=1"]).status.code(), Some(2));
    assert_eq!(zerotemp(&["graph", "hexagon:3"]).status.code(), Some(2));
}

#[test]
fn graph_and_gsp_subcommands() {
    let g = stdout(&zerotemp(&["graph", "clique-pair:4"]));
    assert!(g.starts_with("graph shared-clique-pair n=4\nvertices 7 edges 12\n"));
    let o = zerotemp(&["gsp", "window:3:3:periodic", "--law", "constant"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["energy"], -18.0);
    let o = zerotemp(&["gsp", "window:3:3", "--seed", "5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["unsatisfied_dual_forest"], true);
}

#[test]
fn geometry_round_trip() {
    let dir = std::env::temp_dir().join(format!("zerotemp-geo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("forest.txt");
    std::fs::write(&f, stdout(&zerotemp(&["geometry", "forest", "21", "21", "--p", "1", "--seed", "3"]))).unwrap();
    let o = zerotemp(&["geometry", "mt", f.to_str().unwrap(), "--mass", "le:3", "--margin", "5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lhs"], v["rhs"]);
    let en = stdout(&zerotemp(&["geometry", "en", f.to_str().unwrap(), "--sizes", "2,4"]));
    assert_eq!(en.lines().count(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}
