use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeBox};
use crate::store::read_field;

use super::config::{InitKind, SolverConfig};

/// `exp(-|x|_1^2 / L)` around the origin.
pub fn bump_field(lattice: LatticeBox) -> Field {
    let scale = lattice.radius().max(1) as f64;
    Field::from_fn(lattice, |x| {
        let r: i64 = x.iter().map(|c| c.abs()).sum();
        (-((r * r) as f64) / scale).exp()
    })
}

/// The bump with an independent factor in `[0.8, 1.2)` at every site.
///
/// Lattice problems with a strong potential have localized critical points
/// centred away from the origin. Fully independent site values, or factors
/// as wide as `[0.5, 1.5)`, often start the descent in their basins.
pub fn random_positive_field(lattice: LatticeBox, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bump = bump_field(lattice);
    Field::from_fn(lattice, |x| {
        let b = bump.get(x).expect("same box");
        b * rng.random_range(0.8..1.2)
    })
}

pub fn initial_field(config: &SolverConfig, kind: InitKind, lattice: LatticeBox, seed: u64) -> Result<Field> {
    match kind {
        InitKind::Bump => Ok(bump_field(lattice)),
        InitKind::RandomPositive => Ok(random_positive_field(lattice, seed)),
        InitKind::File => {
            let path = config
                .init_file
                .as_ref()
                .ok_or_else(|| Error::validation("init = \"file\" needs init_file"))?;
            read_field(path, lattice)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_fields_are_positive_and_seeded() {
        let b = LatticeBox::new(2, 3).unwrap();
        let u = bump_field(b);
        assert_eq!(u.get(&[0, 0]), Some(1.0));
        assert!((u.get(&[1, -1]).unwrap() - (-4.0f64 / 3.0).exp()).abs() < 1e-15);
        let r1 = random_positive_field(b, 5);
        assert_eq!(r1, random_positive_field(b, 5));
        assert_ne!(r1, random_positive_field(b, 6));
        assert!(r1.min_value() > 0.0);
        assert!(r1.get(&[0, 0]).unwrap() >= 0.8);
    }
}
