//! Power-law and spectral jump kernels with their fitted bounds.

use choquard_lattice::lattice::LatticeBox;
use choquard_lattice::operators::{KernelModel, KernelTable};

fn main() -> choquard_lattice::Result<()> {
    let lattice = LatticeBox::new(2, 6)?;
    for model in [KernelModel::PowerLaw, KernelModel::Spectral] {
        let kernel = KernelTable::build(model, 0.5, &lattice)?;
        println!(
            "{:>9}: W(1,0) = {:.6}, W(3,2) = {:.6}, c_lo = {:.4}, c_hi = {:.4}, violations = {}",
            model.name(),
            kernel.value(&[1, 0]).unwrap(),
            kernel.value(&[3, 2]).unwrap(),
            kernel.c_lo(),
            kernel.c_hi(),
            kernel.check_bounds().len()
        );
    }
    Ok(())
}
