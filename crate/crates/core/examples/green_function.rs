//! Riesz Green's function of the lattice Laplacian and its decay.

use choquard_lattice::spectral::{compute_green_table, compute_k_alpha, fit_decay_exponent};

fn main() -> choquard_lattice::Result<()> {
    // K_alpha has a closed form when alpha is even.
    let k = compute_k_alpha(3, 2.0, 64)?;
    println!("K_2 in d = 3: {k:.10} (exact 6)");

    let table = compute_green_table(2, 1.0, 24, 256)?;
    println!("R_1(0) = {:.8}, R_1(e1) = {:.8}", table.value(&[0, 0]).unwrap(), table.value(&[1, 0]).unwrap());
    let fit = fit_decay_exponent(&table, 6, 24)?;
    println!("axis decay slope {:.4} (continuum value -1), N vs 2N change {:e}", fit.slope, table.refinement_delta());
    Ok(())
}
