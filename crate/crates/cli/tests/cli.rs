use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aggconc"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("aggconc-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TRIANGLE: &str = "sum u . sum v . sum w . mul(E(u,v), E(v,w), E(u,w))";

#[test]
fn eval_with_inline_term_and_assignment() {
    let dir = scratch("eval");
    let g = dir.join("k4.txt");
    std::fs::write(&g, "# K4\nn=4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let gs = g.to_str().unwrap();
    assert_eq!(stdout(&run(&["eval", "--term", TRIANGLE, "--graph", gs])).trim(), "24");
    let o = run(&["eval", "--term", "mean v . E(u,v)", "--graph", gs, "--assign", "u=0"]);
    assert_eq!(stdout(&o).trim(), "0.75");
    let term_file = dir.join("t.term");
    std::fs::write(&term_file, "max u . sum v . E(u,v)\n").unwrap();
    assert_eq!(stdout(&run(&["eval", "--term", term_file.to_str().unwrap(), "--graph", gs])).trim(), "3");
    let bad = run(&["eval", "--term", "sum v . E(u,v)", "--graph", gs]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unbound"));
}

#[test]
fn sample_is_seeded() {
    let a = stdout(&run(&["sample", "--n", "30", "--regime", "sparse:alpha=0.5", "--seed", "4"]));
    let b = stdout(&run(&["sample", "--n", "30", "--regime", "sparse:alpha=0.5", "--seed", "4"]));
    assert_eq!(a, b);
    assert!(a.lines().any(|l| l == "n=30"));
    assert_eq!(run(&["sample", "--n", "3", "--regime", "dense:p=2"]).status.code(), Some(2));
}

#[test]
fn analyze_prints_leading_order() {
    assert_eq!(stdout(&run(&["analyze", "--term", TRIANGLE, "--alpha", "0.7"])).trim(), "c=1 gamma=0.9");
    assert_eq!(stdout(&run(&["analyze", "--term", TRIANGLE, "--regime", "dense:p=0.5"])).trim(), "c=0.125 gamma=3");
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["analyze", "--term", TRIANGLE, "--alpha", "0.7", "--json"]))).unwrap();
    assert!((json["value"]["gamma"].as_f64().unwrap() - 0.9).abs() < 1e-9);
    assert!(json["tables"].as_array().unwrap().len() >= 4);
}

#[test]
fn lipcheck_fixtures_and_registry() {
    let o: serde_json::Value = serde_json::from_str(&stdout(&run(&["lipcheck", "--fn", "(x1-x2)^2"]))).unwrap();
    assert_eq!(o["verdict"], "fail");
    assert!(o["witness"].is_object());
    let o: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["lipcheck", "--fn", "log1p", "--samples", "3000"]))).unwrap();
    assert_eq!(o["verdict"], "pass");
    let cat: serde_json::Value = serde_json::from_str(&stdout(&run(&["registry", "catalog"]))).unwrap();
    assert!(cat["connectives"]["sigmoid"].is_object());
}

#[test]
fn closure_extcount_chain() {
    let dir = scratch("types");
    let g = dir.join("cherry.txt");
    std::fs::write(&g, "n=3\n0 2\n1 2\n").unwrap();
    let pair = dir.join("cherry.pair");
    std::fs::write(&pair, "n=2\n---\nn=3\n0 2\n1 2\nbase=0,1\n").unwrap();
    let gs = g.to_str().unwrap();
    let c: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["closure", "--graph", gs, "--tuple", "0,1", "--s", "1", "--alpha", "0.6"])))
            .unwrap();
    assert_eq!(c["added"], serde_json::json!([2]));
    let e: serde_json::Value = serde_json::from_str(&stdout(&run(&[
        "extcount",
        "--graph",
        gs,
        "--tuple",
        "0,1",
        "--pattern",
        pair.to_str().unwrap(),
    ])))
    .unwrap();
    assert_eq!(e["extensions"], 1);
    let ch: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["chain", "--pair", pair.to_str().unwrap()]))).unwrap();
    assert_eq!(ch["densities"], serde_json::json!(["2"]));
}

#[test]
fn experiment_and_plot() {
    let dir = scratch("exp");
    let cfg = dir.join("exp.toml");
    std::fs::write(
        &cfg,
        "term = \"sum u . sum v . E(u,v)\"\nregime = \"dense:p=0.5\"\nn_ladder = [40, 80]\nreplicates = 6\nseed = 2\n",
    )
    .unwrap();
    let out = dir.join("r.json");
    let csv = dir.join("r.csv");
    let o = run(&[
        "experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("slope_gap"));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
    let plot = dir.join("p.dat");
    let o = run(&["report", "plot", "--input", out.to_str().unwrap(), "--out", plot.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(rows.lines().filter(|l| !l.starts_with('#')).count(), 2);
    std::fs::write(&cfg, "term = \"sum v . 1\"\nregime = \"dense:p=0.5\"\nn_ladder = [10]\nreplicates = 1\nseed = 0\n")
        .unwrap();
    assert_eq!(run(&["experiment", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "unknown = 1\n").unwrap();
    assert_eq!(run(&["experiment", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
