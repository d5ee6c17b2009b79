//! Ground state by Nehari descent with two starts, then its certificate.

use choquard_lattice::functional::ProblemSpec;
use choquard_lattice::solver::{certify_solution, solve_ground_state, SolverConfig};

fn main() -> choquard_lattice::Result<()> {
    let problem = ProblemSpec::new(1, 8, 0.5, 2.0, 0.5, 2.5).build()?;
    let config = SolverConfig { restarts: 2, ..Default::default() };
    let sol = solve_ground_state(&config, &problem)?;
    println!("level {:.12} after {} iterations, spread {:e}", sol.level, sol.iterations, sol.level_spread);
    let cert = certify_solution(&sol, &problem)?;
    println!(
        "residual {:e}, min u {:e}, floor {:.12}, certified {}",
        cert.residual_relative,
        cert.min_value,
        cert.level_floor,
        cert.passes(config.tol_grad)
    );
    for (x, v) in problem.lattice().sites().zip(sol.u.values()) {
        println!("{:>3} {v:.6}", x[0]);
    }
    Ok(())
}
