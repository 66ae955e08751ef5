use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn paracc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paracc"))
        .args(args)
        .env_remove("PARACC_SEED")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

// a1-b1, a1-b2, a2-b2, a3-b3: two blocks plus an isolated pair.
const BIP: &str = "3 3 4\n1 1\n1 2\n2 2\n3 3\n";

#[test]
fn malformed_input_exits_2() {
    let d = TempDir::new().unwrap();
    let bad = write(d.path(), "bad.bip", "2 2 1\n1 x\n");
    let o = paracc(&["matching", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error: kind=parse msg="), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn missing_file_and_bad_flag_exit_2() {
    assert_eq!(paracc(&["matching", "/nonexistent/x.bip"]).status.code(), Some(2));
    assert_eq!(paracc(&["round", "--auto", "--delta", "0.3", "x"]).status.code(), Some(2));
}

#[test]
fn size_limit_exits_3() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "g.bip", BIP);
    let o = paracc(&["brute", "--beta", "0.6", "--max-n", "4", &f]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("kind=size-limit"));
}

#[test]
fn uncertified_lp_exits_4_only_when_required() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "g.bip", BIP);
    let args = ["lp-solve", "--beta", "0.4", "--mu", "0.2", "--max-iters", "1", &f];
    let o = paracc(&args);
    assert!(o.status.success());
    assert_eq!(json(&o)["converged"], false);
    let mut strict = args.to_vec();
    strict.push("--require-certificate");
    let o = paracc(&strict);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8(o.stderr).unwrap().contains("kind=not-converged"));
}

#[test]
fn round_auto_at_half_claims_four() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "g.bip", BIP);
    let v = json(&paracc(&["round", "--auto", "--mu", "0", "--beta", "0.5", &f]));
    assert_eq!(v["regime"], "mu-zero");
    assert_eq!(v["alpha"], 4.0);
    assert_eq!(v["delta"], 0.5);
    assert_eq!(v["check"]["passed"], true);
    assert_eq!(v["clustering"]["assignment"].as_array().unwrap().len(), 6);
}

#[test]
fn round_matching_regime_and_fixed_delta() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "g.bip", BIP);
    let v = json(&paracc(&["round", "--auto", "--mu", "0.5", "--beta", "0.6", &f]));
    assert_eq!(v["regime"], "matching");
    let v = json(&paracc(&["round", "--delta", "0.4", "--alpha", "5", "--mu", "0.1", "--beta", "0.7", &f]));
    assert_eq!(v["regime"], "fixed");
    assert_eq!(v["alpha"], 5.0);
    assert!(v["check"].is_object());
}

#[test]
fn round_sweep_writes_delta_table() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "g.bip", BIP);
    let out = d.path().join("o");
    let o = paracc(&[
        "round", "--sweep-deltas", "0.1:0.9:0.2", "--seeds", "2", "--beta", "0.3", "--out-dir", out.to_str().unwrap(), &f,
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "delta,seed,objective");
    assert_eq!(lines.len(), 1 + 5 * 2);
    assert!(lines[1].starts_with("0.1,0,"));
    assert!(out.join("clustering.txt").exists());
}

#[test]
fn pbcc_sweep_schema_and_determinism() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "g.bip", BIP);
    let truth = write(d.path(), "truth.txt", "1 a\n2 a\n3 b\n4 a\n5 a\n6 b\n");
    let args = ["sweep", "--pbcc", "--beta-grid", "0:1:0.25", "--mu", "0", "--deltas", "0.05:0.95:0.05", "--truth", &truth, &f];
    let a = paracc(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param_set,mu1,mu2,beta,lambda,delta,seed,objective,lp_bound,ratio,ari,time_ms");
    assert_eq!(lines.len(), 6);
    assert!(lines[3].starts_with("g,0,0,0.5,,"));
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 12);
        assert!(l.ends_with(','), "time_ms must be empty without --timing");
    }
    let b = paracc(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_dir_artifacts_are_reproducible() {
    let d = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = d.path().join(name);
        let o = paracc(&["synth", "--kind", "hypergraph", "--sizes", "6,6", "--edges-per-block", "8", "--seed", "5", "--out-dir", out.to_str().unwrap()]);
        assert!(o.status.success());
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["graph.hyper", "truth.txt", "manifest.json"] {
        let x = std::fs::read(a.join(f)).unwrap();
        let y = std::fs::read(b.join(f)).unwrap();
        if f == "manifest.json" {
            // Only the output directory differs.
            let mx: serde_json::Value = serde_json::from_slice(&x).unwrap();
            let my: serde_json::Value = serde_json::from_slice(&y).unwrap();
            assert_eq!(mx["outputs"], my["outputs"]);
            assert_eq!(mx["config"]["command"], my["config"]["command"]);
            assert_eq!(mx["config"]["seed"], 5);
        } else {
            assert_eq!(x, y, "{f}");
        }
    }
}

#[test]
fn seed_from_environment() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("s");
    let o = Command::new(env!("CARGO_BIN_EXE_paracc"))
        .args(["synth", "--kind", "bipartite", "--sizes", "2x2", "--out-dir", out.to_str().unwrap()])
        .env("PARACC_SEED", "17")
        .output()
        .unwrap();
    assert!(o.status.success());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["seed"], 17);
}

#[test]
fn louvain_and_eval_agree() {
    let d = TempDir::new().unwrap();
    let h = write(d.path(), "h.hyper", "6 4\n1 2 3\n1 2\n4 5 6\n5 6\n");
    let out = d.path().join("o");
    let v = json(&paracc(&["louvain", "--lambda", "0.05", "--cut", "linear", "--out-dir", out.to_str().unwrap(), &h]));
    assert_eq!(v["clustering"]["num_clusters"], 2);
    let c = out.join("clustering.txt");
    let e = json(&paracc(&[
        "eval", "--objective", "hyperlam", "--lambda", "0.05", "--cut", "linear", "--clustering", c.to_str().unwrap(), "--json", &h,
    ]));
    assert_eq!(e["value"], v["objective"]);
    let plain = paracc(&["eval", "--objective", "hyperlam", "--lambda", "0.05", "--clustering", c.to_str().unwrap(), &h]);
    assert!(plain.status.success());
    assert_eq!(stdout(&plain).trim().parse::<f64>().unwrap(), e["value"].as_f64().unwrap());
}

#[test]
fn expand_and_ncut() {
    let d = TempDir::new().unwrap();
    let h = write(d.path(), "h.hyper", "4 1\n1 2 3 4\n");
    let o = paracc(&["expand", "--mode", "clique", &h]);
    let text = stdout(&o);
    assert!(text.starts_with("4 6\n"), "{text}");
    let g = write(d.path(), "g.graph", &text);
    let tri = paracc(&["expand", "--mode", "triangles", &g]);
    assert!(stdout(&tri).starts_with("4 4\n"));
    let s = write(d.path(), "s.txt", "1 2\n");
    let v = json(&paracc(&["eval", "--objective", "ncut", "--set", &s, "--json", &g]));
    // cut 4/3, both sides have volume 2 * (3 * 1/3) = 2 -> 4/3.
    assert!((v["value"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    let star = paracc(&["expand", "--mode", "star", "--normalize-volume", "1", &h]);
    assert!(stdout(&star).starts_with("5 4\n"));
}

#[test]
fn verify_bounds_and_matching() {
    let v = json(&paracc(&["verify-bounds", "--mu", "0.1", "--beta", "0.7"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["delta"], 0.4);
    let o = paracc(&["verify-bounds", "--mu", "0.3", "--beta", "0.5", "--delta", "0.1", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "g.bip", BIP);
    let m = json(&paracc(&["matching", "--beta", "0.5", "--mu", "0.5", &f]));
    assert_eq!(m["size"], 3);
    let b = json(&paracc(&["brute", "--beta", "0.5", "--mu", "0.5", &f]));
    assert_eq!(m["pbcc_objective"], b["objective"]);
}

#[test]
fn louvain_sweep_rows() {
    let d = TempDir::new().unwrap();
    let h = write(d.path(), "h.hyper", "6 4\n1 2 3\n1 2\n4 5 6\n5 6\n");
    let o = paracc(&["sweep", "--louvain", "--lambda-scaled-grid", "0.5,1,2", "--seeds", "2", "--param-set", "toy", &h]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(text.lines().nth(1).unwrap().starts_with("toy,,,,"));
}

#[test]
fn help_lists_defaults() {
    for sub in ["expand", "eval", "lp-solve", "round", "verify-bounds", "louvain", "brute", "matching", "sweep", "synth"] {
        let o = paracc(&[sub, "--help"]);
        assert!(o.status.success(), "{sub}");
        let text = stdout(&o);
        assert!(text.contains("--seed"), "{sub}");
        assert!(text.contains("--out-dir"), "{sub}");
    }
    let text = stdout(&paracc(&["sweep", "--help"]));
    assert!(text.contains("[default: 0:1:0.05]"));
    assert!(text.contains("[default: 0.05:0.95:0.05]"));
}
