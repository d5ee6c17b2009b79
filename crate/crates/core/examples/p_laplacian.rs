//! The nonlocal p-Laplacian and the summation-by-parts identity it satisfies.

use choquard_lattice::lattice::LatticeBox;
use choquard_lattice::operators::{KernelModel, KernelOperator, KernelTable};
use choquard_lattice::verify::{integration_by_parts_sides, signed_field};

fn main() -> choquard_lattice::Result<()> {
    let lattice = LatticeBox::new(2, 5)?;
    let op = KernelOperator::new(lattice, KernelTable::build(KernelModel::PowerLaw, 0.5, &lattice)?)?;
    let u = signed_field(lattice, 1);
    let phi = signed_field(lattice, 2);
    for p in [2.0, 3.0, 4.0] {
        let (lhs, rhs) = integration_by_parts_sides(&op, &u, &phi, p)?;
        println!("p = {p}: <(-Delta)_p u, phi> = {lhs:.12}, gradient pairing = {rhs:.12}");
    }
    let lap = op.p_laplacian(&u, 3.0)?;
    println!("sup |(-Delta)_3 u| = {:.6}", lap.sup_norm());
    Ok(())
}
