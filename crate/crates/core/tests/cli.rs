use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use igsim::experiments::sweep::RECORDS_HEADER;

fn igsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igsim")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = igsim(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_metrics_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let (g, a, traj) = (dir.path().join("g.txt"), dir.path().join("a.txt"), dir.path().join("t.csv"));
    ok(&[
        "generate", "--cliques", "4", "--clique-size", "5", "--p0", "0.4", "--h", "0.6", "--party", "red=12",
        "--party", "blue=8", "--seed", "3", "--graph-out", path(&g), "--assignment-out", path(&a),
    ]);
    let graph = fs::read_to_string(&g).unwrap();
    assert!(graph.starts_with("nodes=20 cliques=4\n"));
    let assignment = fs::read_to_string(&a).unwrap();
    assert_eq!(assignment.lines().count(), 20);
    assert_eq!(assignment.lines().filter(|l| l.ends_with(" red")).count(), 12);

    let json: serde_json::Value =
        serde_json::from_str(&ok(&["metrics", "--graph", path(&g), "--assignment", path(&a)])).unwrap();
    assert_eq!(json["parties"], serde_json::json!(["red", "blue"]));
    let csv = ok(&["metrics", "--graph", path(&g), "--assignment", path(&a), "--format", "csv"]);
    assert_eq!(csv.lines().count(), 3);

    let args = ["simulate", "--graph", path(&g), "--assignment", path(&a), "--seed", "9", "--trajectory", path(&traj)];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let summary: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(summary["ticks"], 72);
    let trajectory = fs::read_to_string(&traj).unwrap();
    assert!(trajectory.starts_with("tick,t_seconds,share_red,share_blue\n"));
    assert_eq!(trajectory.lines().count(), 74);
}

#[test]
fn generate_rejects_odd_default_split() {
    let dir = tempfile::tempdir().unwrap();
    let out = igsim(&[
        "generate", "--cliques", "3", "--clique-size", "3", "--seed", "1", "--graph-out",
        path(&dir.path().join("g")), "--assignment-out", path(&dir.path().join("a")),
    ]);
    assert!(!out.status.success());
}

#[test]
fn sweep_requires_seed() {
    let out = igsim(&["sweep", "--elections-per-cell", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn sweep_config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(&cfg, "p0_grid = [0.4]\nh_grid = [0.6, 0.7]\nelections_per_cell = 50\n").unwrap();
    let records = dir.path().join("r.csv");
    ok(&[
        "sweep", "--seed", "5", "--config", path(&cfg), "--elections-per-cell", "4", "--output", path(&records),
    ]);
    let text = fs::read_to_string(&records).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(RECORDS_HEADER));
    assert_eq!(lines.count(), 8);

    let three = ok(&["sweep", "--seed", "5", "--parties", "3", "--p0-grid", "0", "--h-grid", "0.5", "--elections-per-cell", "2"]);
    let row = three.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 18);
    assert_eq!((fields[11], fields[12], fields[13]), ("", "", ""));

    fs::write(&cfg, "seed = 1\n").unwrap();
    assert!(!igsim(&["sweep", "--seed", "5", "--config", path(&cfg)]).status.success());
}

#[test]
fn regress_and_pcc_read_sweep_output() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("r.csv");
    ok(&[
        "sweep", "--seed", "8", "--p0-grid", "0.4", "--h-grid", "0.2,0.8", "--elections-per-cell", "60",
        "--output", path(&records),
    ]);
    let fits: serde_json::Value = serde_json::from_str(&ok(&["regress", "--records", path(&records)])).unwrap();
    let models: Vec<&str> = fits.as_array().unwrap().iter().map(|f| f["model"].as_str().unwrap()).collect();
    assert_eq!(models, ["joint", "majority", "influence-gap"]);
    for f in fits.as_array().unwrap() {
        assert!(f["r_squared"].as_f64().unwrap() <= 1.0);
    }
    let pcc = ok(&["pcc", "--records", path(&records), "--metrics", "majority,influence-gap"]);
    assert_eq!(pcc.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn surface_is_deterministic() {
    let args = ["surface", "--seed", "2", "--p0-grid", "0,1", "--h-grid", "0.5", "--samples", "5", "--cliques", "3", "--clique-size", "4"];
    let a = ok(&args);
    assert_eq!(a.lines().count(), 3);
    let mut seq = args.to_vec();
    seq.extend(["--workers", "1"]);
    assert_eq!(a, ok(&seq));
    assert!(!igsim(&["surface", "--samples", "5"]).status.success());
}
