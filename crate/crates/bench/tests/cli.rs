use std::path::Path;
use std::process::Command;

use rpd_bench::read_rows;

const TOY: &str = r#"{
  "label": "toy",
  "n": 2,
  "m": 1,
  "k": 2,
  "matrix": [[0, 10, 12], [10, 0, 5], [12, 5, 0]],
  "processing_times": [20, 20]
}"#;

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_vrp-rpd")).args(args).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(out.status.success(), "{args:?}\n{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    stdout
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_verify_oracle_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("toy.json");
    std::fs::write(&inst, TOY).unwrap();
    let sol = dir.path().join("sol.json");
    let params = dir.path().join("params.toml");
    std::fs::write(&params, "[alns]\nmax_iter = 200\nworkers_per_pool = 1\n[brkga]\npopulation = 20\ngenerations = 5\n").unwrap();
    run(&["solve", s(&inst), "--method", "pipeline", "--params", s(&params), "--out", s(&sol)]);
    let report = run(&["verify", s(&inst), s(&sol)]);
    assert!(report.contains("makespan 47"), "{report}");
    let oracle = run(&["oracle", s(&inst)]);
    assert!(oracle.contains("47"), "{oracle}");
    let lp = dir.path().join("toy.lp");
    run(&["export-milp", s(&inst), "--out", s(&lp)]);
    assert!(std::fs::read_to_string(&lp).unwrap().contains("Minimize\n obj: T\n"));
}

#[test]
fn bench_writes_rows_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/tsplib/gr17.tsp");
    let cfg = dir.path().join("tiny.toml");
    std::fs::write(
        &cfg,
        format!(
            "instances = [{:?}]\nkinds = [\"base\", \"5x\"]\nseeds = [3]\n[alns]\nmax_iter = 300\nworkers_per_pool = 1\n[brkga]\npopulation = 30\ngenerations = 5\n",
            root.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    run(&["bench", "--config", s(&cfg), "--out", s(&out)]);
    let rows = read_rows(std::fs::File::open(out.join("results.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ok() && r.makespan > 0.0));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("(2) ALNS+BRKGA"));
    let stats = run(&["stats", "--rows", s(&out.join("results.csv"))]);
    assert!(stats.contains("cross_agent"), "{stats}");
    let vdir = dir.path().join("variants");
    run(&["variants", s(&root), "--kinds", "base,1r10", "--replicates", "2", "--out", s(&vdir)]);
    assert_eq!(std::fs::read_dir(&vdir).unwrap().count(), 3);
}
