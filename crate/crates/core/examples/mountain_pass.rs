//! Mountain-pass path deformation compared with Nehari descent.

use choquard_lattice::functional::ProblemSpec;
use choquard_lattice::solver::{solve_ground_state, solve_mountain_pass, Algorithm, SolverConfig};

fn main() -> choquard_lattice::Result<()> {
    let problem = ProblemSpec::new(1, 8, 0.5, 2.0, 0.5, 2.5).build()?;
    let nehari = solve_ground_state(&SolverConfig::default(), &problem)?;
    let config = SolverConfig { algorithm: Algorithm::MountainPass, ..Default::default() };
    let mp = solve_mountain_pass(&config, &problem)?;
    let info = mp.mountain_pass.as_ref().expect("path info");
    println!("endpoint J(e) = {:.6}, |e|_H^p = {:.4}", info.endpoint_level, info.endpoint_norm);
    println!("straight path max {:.10}, final {:.10} ({} sweeps)", info.initial_max_level, mp.level, mp.iterations);
    println!("Nehari level {:.10}, relative gap {:e}", nehari.level, (mp.level - nehari.level).abs() / nehari.level);
    Ok(())
}
