//! The property suite on a small problem.

use choquard_lattice::functional::ProblemSpec;
use choquard_lattice::verify::{run_properties, VerifyConfig};

fn main() -> choquard_lattice::Result<()> {
    let spec = ProblemSpec::new(1, 6, 0.5, 2.0, 0.5, 2.5);
    let problem = spec.build()?;
    let report = run_properties(&problem, &spec, &VerifyConfig { samples: 50, ..Default::default() })?;
    for p in &report.properties {
        println!("{} {:<28} {:>11.3e}  {}", if p.passed { "PASS" } else { "FAIL" }, p.name, p.worst_margin, p.anchor);
    }
    println!("Nehari floor {:?}, small-sphere level {:e}", report.empirical.nehari_floor, report.empirical.sphere_level);
    Ok(())
}
