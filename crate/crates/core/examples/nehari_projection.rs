//! Projection of rays onto the Nehari manifold.

use choquard_lattice::functional::ProblemSpec;
use choquard_lattice::verify::nonnegative_field;

fn main() -> choquard_lattice::Result<()> {
    let problem = ProblemSpec::new(2, 6, 0.5, 2.0, 1.0, 2.5).build()?;
    let u = nonnegative_field(*problem.lattice(), 5);
    let closed = problem.nehari_project_closed_form(&u)?;
    let bisect = problem.nehari_project_bisection(&u)?;
    println!("t_u: closed form {:.14}, bisection {:.14}", closed.t, bisect.t);
    println!("residual on the manifold: {:e}", problem.nehari_residual(&closed.v)?);
    println!("J(t_u u) = {:.10}", problem.energy(&closed.v)?.total);
    for t in [0.5, 1.0, 2.0] {
        println!("  J({t} t_u u) = {:.10}", problem.energy(&closed.v.scaled(t))?.total);
    }
    Ok(())
}
