use std::path::Path;
use std::process::{Command, Output};

use nnmf_game::Mat;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnmf-game"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn error_line(out: &Output) -> String {
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().last().unwrap().to_string();
    assert!(line.starts_with("error: kind="), "{line}");
    assert!(line.contains(" message="), "{line}");
    line
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn gen_then_fit_every_algorithm() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["gen", "--i", "12", "--j", "6", "--k", "2", "--seed", "4", "--out-dir", "data"]);
    let x = Mat::load(d.join("data/x_syn.mat")).unwrap();
    assert_eq!(x.shape(), (12, 6));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("data/meta.json")).unwrap()).unwrap();
    assert_eq!(meta["I"], 12);
    assert_eq!(meta["seed"], 4);
    assert_eq!(meta["kernel"].as_array().unwrap().len(), 3);

    for algo in ["mu", "pg", "nals", "game", "game-jmin", "game-jmax"] {
        let prefix = format!("out/{algo}");
        std::fs::create_dir_all(d.join("out")).unwrap();
        ok(d, &["fit", "--algo", algo, "--in", "data/x_syn.mat", "--k", "2", "--iters", "15", "--out-prefix", &prefix]);
        let w = Mat::load(d.join(format!("{prefix}.W.mat"))).unwrap();
        let h = Mat::load(d.join(format!("{prefix}.H.mat"))).unwrap();
        assert_eq!((w.shape(), h.shape()), ((12, 2), (2, 6)));
        let (header, rows) = csv_rows(&d.join(format!("{prefix}.trace.csv")));
        assert_eq!(header, ["iter", "error", "wall_ms"]);
        assert_eq!(rows.len(), 15);
        assert_eq!(rows[14][0], "15");
        let last: f64 = rows[14][1].parse().unwrap();
        let direct = nnmf_game::reconstruction_error(&x, &w, &h).unwrap();
        assert_eq!(last, direct);
    }
}

#[test]
fn fit_snapshots_and_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["gen", "--i", "10", "--j", "5", "--k", "2", "--out-dir", "."]);
    std::fs::write(d.join("fit.cfg"), "# game run\nalgo = game\nself-game = jmax\nk = 2\niters = 1000\nin = x_syn.mat\n").unwrap();
    // the flag overrides the file's iters
    ok(d, &["fit", "--config", "fit.cfg", "--iters", "9", "--snapshot-every", "4", "--out-prefix", "g"]);
    let (header, rows) = csv_rows(&d.join("g.traj.csv"));
    assert_eq!(header.len(), 2 + 5);
    let iters: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(iters, ["0", "0", "4", "4", "8", "8", "9", "9"]);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("g.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["algo"], "game-jmax");
    assert_eq!(meta["config"]["solver"]["iters"], 9);
}

#[test]
fn bench_outputs_agree_with_recomputation() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let args = [
        "bench", "--datasets", "2", "--seeds", "3", "--algos", "mu,game-jmin", "--i", "10", "--j", "6", "--k", "2",
        "--iters", "20", "--master-seed", "11", "--out-dir",
    ];
    let mut a = args.to_vec();
    a.push("a");
    ok(d, &a);
    let (header, runs) = csv_rows(&d.join("a/bench.csv"));
    assert_eq!(header, ["dataset", "algo", "seed", "final_error", "wall_ms"]);
    assert_eq!(runs.len(), 2 * 2 * 3);
    let (header, summary) = csv_rows(&d.join("a/bench_summary.csv"));
    assert_eq!(header, ["dataset", "algo", "mean", "sd"]);
    for s in &summary {
        let errs: Vec<f64> = runs
            .iter()
            .filter(|r| r[0] == s[0] && r[1] == s[1])
            .map(|r| r[3].parse().unwrap())
            .collect();
        assert_eq!(errs.len(), 3);
        let m = errs.iter().sum::<f64>() / 3.0;
        let sd = (errs.iter().map(|e| (e - m).powi(2)).sum::<f64>() / 3.0).sqrt();
        assert!((s[2].parse::<f64>().unwrap() - m).abs() <= 1e-12);
        assert!((s[3].parse::<f64>().unwrap() - sd).abs() <= 1e-12);
    }

    let mut b = args.to_vec();
    b.push("b");
    ok(d, &b);
    let read = |p: &str| std::fs::read_to_string(d.join(p)).unwrap();
    assert_eq!(read("a/bench_summary.csv"), read("b/bench_summary.csv"));
    let errors = |p: &str| csv_rows(&d.join(p)).1.into_iter().map(|r| r[..4].to_vec()).collect::<Vec<_>>();
    assert_eq!(errors("a/bench.csv"), errors("b/bench.csv"));
    let meta: serde_json::Value = serde_json::from_str(&read("a/meta.json")).unwrap();
    assert_eq!(meta["master_seed"], 11);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn traj_pca_and_cost() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["traj", "--i", "15", "--j", "6", "--k", "3", "--iters", "12", "--snapshot-every", "5", "--algos", "mu,game", "--out-dir", "t"]);
    let (header, rows) = csv_rows(&d.join("t/traj_projected.csv"));
    assert_eq!(header, ["algo", "iter", "row_index", "pc1", "pc2", "pc3"]);
    // iterations 0, 5, 10, 12 x 3 rows x 2 algorithms
    assert_eq!(rows.len(), 4 * 3 * 2);
    assert!(d.join("t/traj.csv").exists() && d.join("t/traj_ratios.csv").exists());

    ok(d, &["gen", "--i", "20", "--j", "5", "--k", "3", "--out-dir", "."]);
    ok(d, &["pca", "--in", "x_syn.mat", "--k", "2", "--out-dir", "p"]);
    assert_eq!(Mat::load(d.join("p/components.mat")).unwrap().shape(), (2, 5));
    let (header, rows) = csv_rows(&d.join("p/ratios.csv"));
    assert_eq!(header, ["component", "explained_variance", "ratio"]);
    assert_eq!(rows.len(), 2);

    let out = ok(d, &["cost", "--i", "100", "--j", "20", "--k", "3"]);
    assert!(out.contains("mu,W^T X,IJK,6000"));
    assert!(out.contains("game,pair W gradient,IJK^2,18000"));
}

#[test]
fn errors_are_one_machine_readable_line() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let line = error_line(&run(d, &["fit", "--algo", "svd", "--in", "x.mat", "--k", "2"]));
    assert!(line.contains("kind=argument") && line.contains("game-jmax"), "{line}");
    let line = error_line(&run(d, &["fit", "--algo", "mu", "--in", "missing.mat", "--k", "2"]));
    assert!(line.contains("kind=io") && line.contains("missing.mat"), "{line}");
    let line = error_line(&run(d, &["bench", "--nope"]));
    assert!(line.contains("kind=usage"), "{line}");
    std::fs::write(d.join("bad.cfg"), "iterz = 3\n").unwrap();
    let line = error_line(&run(d, &["bench", "--config", "bad.cfg"]));
    assert!(line.contains("kind=parse") && line.contains("iterz"), "{line}");
    let line = error_line(&run(d, &["fit", "--algo", "mu", "--self-game", "jmin", "--in", "x.mat", "--k", "2"]));
    assert!(line.contains("kind=argument"), "{line}");
    std::fs::write(d.join("bad.mat"), "2 2\n1 2\n3\n").unwrap();
    let line = error_line(&run(d, &["pca", "--in", "bad.mat", "--k", "1"]));
    assert!(line.contains("kind=parse"), "{line}");
}
