use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const D1: &str = r#"
[problem]
d = 1
L = 8
s = 0.5
p = 2.0
alpha = 0.5
tau = 2.5

[problem.potential]
h0 = 1.0
a = 1.0
beta = 1.0
center = [0]

[solver]
restarts = 2

[verify]
samples = 40
sphere_directions = 100
hls_pairs = 100
p_triples = 1000
"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Writes a config with `io` pointed inside the workspace.
    fn config(&self, name: &str, body: &str) -> PathBuf {
        let text = format!(
            "{body}\n[io]\noutput_dir = {:?}\ncache_dir = {:?}\n",
            self.path("out").display().to_string(),
            self.path("cache").display().to_string()
        );
        let path = self.path(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_choquard")).args(args).current_dir(self.dir.path()).output().unwrap()
    }
}

fn run_with(ws: &Workspace, cmd: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    ws.run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(ws: &Workspace) -> toml::Table {
    fs::read_to_string(ws.path("out/report.toml")).unwrap().parse().unwrap()
}

#[test]
fn green_caches_and_reports() {
    let ws = Workspace::new();
    let cfg = ws.config("c.toml", D1);
    let first = run_with(&ws, "green", &cfg, &[]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.contains("K_alpha = "), "{text}");
    assert!(text.contains("decay slope = "));
    assert!(text.contains("cache = built"));
    let table = ws.path("cache/green_d1_a0.5_L8_N256.csv");
    let bytes = fs::read(&table).unwrap();

    let second = run_with(&ws, "green", &cfg, &[]);
    assert!(stdout(&second).contains("cache = hit"));
    assert_eq!(fs::read(&table).unwrap(), bytes);
}

#[test]
fn green_k_alpha_for_even_order() {
    let ws = Workspace::new();
    let body = D1
        .replace("d = 1", "d = 3")
        .replace("L = 8", "L = 3")
        .replace("alpha = 0.5", "alpha = 2.0")
        .replace("center = [0]", "center = [0, 0, 0]");
    let out = run_with(&ws, "green", &ws.config("c.toml", &body), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let line = stdout(&out).lines().find(|l| l.starts_with("K_alpha")).unwrap().to_string();
    let k: f64 = line.trim_start_matches("K_alpha = ").parse().unwrap();
    assert!((k - 6.0).abs() < 6e-6, "{line}");
}

#[test]
fn solve_writes_report_field_and_trace() {
    let ws = Workspace::new();
    let cfg = ws.config("c.toml", D1);
    let out = run_with(&ws, "solve", &cfg, &["--trace"]);
    assert_eq!(out.status.code(), Some(0), "{}\n{}", stdout(&out), stderr(&out));
    let rep = report(&ws);
    let result = rep["result"].as_table().unwrap();
    assert_eq!(result["converged"].as_bool(), Some(true));
    assert!(result["min_value"].as_float().unwrap() > 0.0);
    assert!(result["grad_supnorm"].as_float().unwrap() <= 1e-6);
    let iterations = result["iterations"].as_integer().unwrap() as usize;
    let trace = fs::read_to_string(ws.path("out/trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), iterations);
    let first: serde_json::Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    for key in ["iteration", "level", "grad_norm", "t_u", "step"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    let field = fs::read_to_string(ws.path("out/field.csv")).unwrap();
    assert_eq!(field.lines().next(), Some("x1,u"));
    assert_eq!(field.lines().count(), 1 + 17);
}

#[test]
fn report_echo_reproduces_the_run() {
    let ws = Workspace::new();
    let cfg = ws.config("c.toml", D1);
    assert_eq!(run_with(&ws, "solve", &cfg, &["--seed", "7"]).status.code(), Some(0));
    let rep = report(&ws);
    assert_eq!(rep["config"]["solver"]["seed"].as_integer(), Some(7));
    assert_eq!(rep["config"]["verify"]["seed"].as_integer(), Some(7));
    let field = fs::read_to_string(ws.path("out/field.csv")).unwrap();
    let level = rep["result"]["level"].as_float().unwrap();

    fs::copy(ws.path("out/report.toml"), ws.path("echo.toml")).unwrap();
    let again = run_with(&ws, "solve", &ws.path("echo.toml"), &[]);
    assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
    assert_eq!(fs::read_to_string(ws.path("out/field.csv")).unwrap(), field);
    assert_eq!(report(&ws)["result"]["level"].as_float().unwrap(), level);
}

#[test]
fn non_convergence_exits_2_with_partial_report() {
    let ws = Workspace::new();
    let cfg = ws.config("c.toml", &D1.replace("restarts = 2", "restarts = 1\nmax_iter = 2"));
    let out = run_with(&ws, "solve", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert_eq!(report(&ws)["result"]["converged"].as_bool(), Some(false));
}

#[test]
fn validation_errors_exit_1() {
    let ws = Workspace::new();
    let low = run_with(&ws, "solve", &ws.config("low.toml", &D1.replace("tau = 2.5", "tau = 1.2")), &[]);
    assert_eq!(low.status.code(), Some(1));
    assert!(stderr(&low).contains("(f2)"), "{}", stderr(&low));
    assert!(!ws.path("cache").exists(), "no table is built for an invalid config");

    let typo = run_with(&ws, "solve", &ws.config("typo.toml", &D1.replace("restarts = 2", "restart = 2")), &[]);
    assert_eq!(typo.status.code(), Some(1));
    assert!(stderr(&typo).contains("restart"), "{}", stderr(&typo));

    let missing = ws.run(&["solve"]);
    assert_eq!(missing.status.code(), Some(1));
    let threads = run_with(&ws, "green", &ws.config("c.toml", D1), &["--threads", "0"]);
    assert_eq!(threads.status.code(), Some(1));
}

#[test]
fn verify_is_deterministic_and_catches_a_corrupted_kernel() {
    let ws = Workspace::new();
    let cfg = ws.config("c.toml", D1);
    let out = run_with(&ws, "verify", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count() >= 12);
    let first = fs::read(ws.path("out/verify.toml")).unwrap();
    assert_eq!(run_with(&ws, "verify", &cfg, &["--threads", "2"]).status.code(), Some(0));
    assert_eq!(fs::read(ws.path("out/verify.toml")).unwrap(), first);

    let kernel = ws.path("cache/kernel_d1_power-law_s0.5_L8.csv");
    let text = fs::read_to_string(&kernel).unwrap();
    let corrupted: String = text
        .lines()
        .map(|l| if l.starts_with("3,") { "3,-0.25".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    fs::write(&kernel, corrupted + "\n").unwrap();
    let bad = run_with(&ws, "verify", &cfg, &[]);
    assert_eq!(bad.status.code(), Some(3), "{}", stdout(&bad));
    let line = stdout(&bad).lines().find(|l| l.contains("kernel_bounds")).unwrap().to_string();
    assert!(line.starts_with("FAIL"), "{line}");
    let rep: toml::Table = fs::read_to_string(ws.path("out/verify.toml")).unwrap().parse().unwrap();
    let entry = rep["properties"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["name"].as_str() == Some("kernel_bounds"))
        .unwrap();
    let case: serde_json::Value = serde_json::from_str(entry["failing_case"].as_str().unwrap()).unwrap();
    // The mirror entry at -3 is now asymmetric and may be listed first.
    assert_eq!(case["z"][0].as_i64().unwrap().abs(), 3, "{case}");
}

#[test]
fn bench_table_and_empty_list() {
    let ws = Workspace::new();
    let body = D1
        .replace("d = 1", "d = 2")
        .replace("alpha = 0.5", "alpha = 1.0")
        .replace("center = [0]", "center = [0, 0]")
        + "\n[bench]\nsizes = [4, 8]\nrepeats = 1\n";
    let out = run_with(&ws, "bench", &ws.config("c.toml", &body), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(ws.path("out/bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    for row in csv.lines().skip(1) {
        let disc: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(disc <= 1e-10);
    }

    let empty = D1.to_string() + "\n[bench]\nsizes = []\n";
    let out = run_with(&ws, "bench", &ws.config("e.toml", &empty), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_config_keys() {
    let out = Command::new(env!("CARGO_BIN_EXE_choquard")).arg("--help").output().unwrap();
    let text = stdout(&out);
    for key in ["--config", "--threads", "--seed", "--trace", "green", "solve", "verify", "bench", "tol_grad", "quadrature_N", "cache_dir", "samples", "sizes"] {
        assert!(text.contains(key), "{key} missing from --help");
    }
}
