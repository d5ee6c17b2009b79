//! Energy, its parts, and the gradient checked against finite differences.

use choquard_lattice::functional::ProblemSpec;
use choquard_lattice::verify::{gradient_fd_error, nonnegative_field};

fn main() -> choquard_lattice::Result<()> {
    let problem = ProblemSpec::new(1, 8, 0.5, 3.0, 0.5, 3.5).build()?;
    let u = nonnegative_field(*problem.lattice(), 11).map(|v| v + 0.5);
    let e = problem.energy(&u)?;
    println!("J = {:.10} = {:.10} (norm) - {:.10} (Choquard)", e.total, e.norm_term, e.choquard_term);
    let sites: Vec<usize> = (0..17).collect();
    println!("gradient vs central differences: {:e}", gradient_fd_error(&problem, &u, &sites, 1e-5)?);
    Ok(())
}
