//! A full configured run: tables through the cache, solve, report files.

use choquard_lattice::app::{run_solve, RunConfig};

const CONFIG: &str = r#"
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
"#;

fn main() -> choquard_lattice::Result<()> {
    let dir = std::env::temp_dir().join("choquard-config-run");
    let mut config = RunConfig::from_toml_str(CONFIG)?;
    config.io.output_dir = dir.join("out");
    config.io.cache_dir = dir.join("cache");
    config.io.trace = true;
    let code = run_solve(&config, &mut std::io::stdout())?;
    println!("exit code {code}; files in {}", config.io.output_dir.display());
    Ok(())
}
