use std::path::Path;
use std::process::{Command, Output};

const TRIPLE: &str = "3\n0 0.4 0.7\n0.4 0 0.5\n0.7 0.5 0\nweights: 0.2 0.3 0.5\n";
const BAD_TRIANGLE: &str = "3\n0 0.1 0.9\n0.1 0 0.1\n0.9 0.1 0\n";

fn run(dir: &Path, cache: Option<&Path>, args: &[&str]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_scalent"));
    c.current_dir(dir).args(args).env_remove("SCALENT_CACHE_DIR");
    if let Some(p) = cache {
        c.env("SCALENT_CACHE_DIR", p);
    }
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", stdout(o)))
}

fn workdir() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("a.txt"), TRIPLE).unwrap();
    std::fs::write(d.path().join("bad.txt"), BAD_TRIANGLE).unwrap();
    d
}

#[test]
fn exit_codes() {
    let d = workdir();
    let p = d.path();
    assert_eq!(code(&run(p, None, &["triple", "validate", "a.txt"])), 0);
    let bad = run(p, None, &["triple", "validate", "bad.txt"]);
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("fails validation"));
    let missing = run(p, None, &["entropy", "eps", "--triple", "nowhere.txt", "--eps", "0.2"]);
    assert_eq!(code(&missing), 1);
    assert!(stderr(&missing).contains("nowhere.txt"));
    let capped = run(p, None, &["--exact-cap", "2", "scale", "grid", "--system", "bernoulli:0.5", "--eps", "0.2", "--n", "6"]);
    assert_eq!(code(&capped), 2, "{}", stderr(&capped));
    assert!(stderr(&capped).contains("warning"));
    assert_eq!(code(&run(p, None, &["entropy", "eps", "--triple", "a.txt", "--eps", "0.2", "--bogus"])), 64);
    assert_eq!(code(&run(p, None, &[])), 64);
    assert_eq!(code(&run(p, None, &["--threads", "0", "triple", "info", "a.txt"])), 64);
    assert_eq!(code(&run(p, None, &["--help"])), 0);
}

#[test]
fn eps_at_least_one_gives_zero_entropy() {
    let d = workdir();
    let o = run(d.path(), None, &["entropy", "eps", "--triple", "a.txt", "--eps", "2.0"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["schema"], "scalent-report-v1");
    assert_eq!(r["result"][0]["value"], 0.0);
    assert_eq!(r["result"][0]["k"], 1);
}

#[test]
fn bits_flag_converts_units() {
    let d = workdir();
    let nats = json(&run(d.path(), None, &["entropy", "eps", "--triple", "a.txt", "--eps", "0.45"]));
    let bits = json(&run(d.path(), None, &["--bits", "entropy", "eps", "--triple", "a.txt", "--eps", "0.45"]));
    assert_eq!(nats["unit"], "nats");
    assert_eq!(bits["unit"], "bits");
    let (n, b) = (nats["result"][0]["value"].as_f64().unwrap(), bits["result"][0]["value"].as_f64().unwrap());
    assert!((n / std::f64::consts::LN_2 - b).abs() < 1e-12);
}

#[test]
fn config_fills_unset_flags_and_command_line_wins() {
    let d = workdir();
    let p = d.path();
    std::fs::write(p.join("run.cfg"), "eps = 0.45\nbits = true\n").unwrap();
    let from_file = json(&run(p, None, &["--config", "run.cfg", "entropy", "eps", "--triple", "a.txt"]));
    assert_eq!(from_file["result"][0]["eps"], 0.45);
    assert_eq!(from_file["unit"], "bits");
    let overridden = json(&run(p, None, &["--config", "run.cfg", "entropy", "eps", "--triple", "a.txt", "--eps", "0.1"]));
    assert_eq!(overridden["result"][0]["eps"], 0.1);
    std::fs::write(p.join("bad.cfg"), "nonsense = 3\n").unwrap();
    assert_eq!(code(&run(p, None, &["--config", "bad.cfg", "entropy", "eps", "--triple", "a.txt", "--eps", "0.1"])), 64);
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn cache_hits_misses_and_recovers_from_corruption() {
    let d = workdir();
    let p = d.path();
    let cache = p.join("cache");
    let args = ["--seed", "3", "mdist", "sample", "--system", "cube:3", "--n", "4", "--replicas", "2"];
    let cold = run(p, Some(&cache), &args);
    assert_eq!(code(&cold), 0);
    assert_eq!(cache_files(&cache).len(), 1);
    let warm = run(p, Some(&cache), &args);
    assert_eq!(stdout(&warm), stdout(&cold));
    assert_eq!(cache_files(&cache).len(), 1);

    let mut reseeded = args.to_vec();
    reseeded[1] = "4";
    run(p, Some(&cache), &reseeded);
    assert_eq!(cache_files(&cache).len(), 2, "a new seed is a new entry");

    for f in cache_files(&cache) {
        std::fs::write(&f, "tampered\n{}").unwrap();
    }
    let healed = run(p, Some(&cache), &args);
    assert_eq!(code(&healed), 0);
    assert!(stderr(&healed).contains("warning: corrupt cache entry"), "{}", stderr(&healed));
    assert_eq!(stdout(&healed), stdout(&cold));
    let again = run(p, Some(&cache), &args);
    assert!(!stderr(&again).contains("corrupt"), "entry rewritten after recompute");
}

#[test]
fn plot_writes_svg() {
    let d = workdir();
    let p = d.path();
    let grid = ["scale", "grid", "--system", "bernoulli:0.5", "--eps", "0.3", "--n", "1..5", "--out", "prof.csv"];
    assert_eq!(code(&run(p, None, &grid)), 0);
    let csv = std::fs::read_to_string(p.join("prof.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "eps,n,H,method,replicas,seed,ci_low,ci_high");
    assert_eq!(code(&run(p, None, &["scale", "plot", "--profile", "prof.csv", "--out", "prof.svg"])), 0);
    let svg = std::fs::read_to_string(p.join("prof.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn replay_detects_tampered_outputs() {
    let d = workdir();
    let p = d.path();
    let args = ["--seed", "5", "mdist", "spectra", "--system", "circle", "--n", "6", "--replicas", "5", "--out", "sp.csv"];
    assert_eq!(code(&run(p, None, &args)), 0);
    let header = std::fs::read_to_string(p.join("sp.csv")).unwrap();
    assert!(header.starts_with("replica,size,index,eigenvalue\n"));
    let ok = run(p, None, &["--replay", "sp.csv.manifest.json", "--threads", "2"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stderr(&ok).contains("outputs identical"));
    // Replay rewrites the output, so tamper with the recorded hash instead.
    let m = std::fs::read_to_string(p.join("sp.csv.manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&m).unwrap();
    let hash = v["outputs"][0]["sha256"].as_str().expect("manifest records a hash");
    std::fs::write(p.join("sp.csv.manifest.json"), m.replace(hash, &"0".repeat(64))).unwrap();
    assert_eq!(code(&run(p, None, &["--replay", "sp.csv.manifest.json"])), 1);
    assert_eq!(code(&run(p, None, &["--replay", "sp.csv.manifest.json", "triple", "info", "a.txt"])), 64);
}
