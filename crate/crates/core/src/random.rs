//! Seeded generators for probe operators, product states and decompositions.
//!
//! All generators take a caller-owned RNG; use [`seeded`] for reproducible
//! streams.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chsh::{BlochDirection, ChshSettings};
use crate::lhv::{ProductComponent, SeparableDecomposition};
use crate::operator::{Complex64, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::Result;

/// Generator returned by [`seeded`].
pub type SeededRng = ChaCha8Rng;

pub const MIN_COMPONENTS: usize = 2;
pub const MAX_COMPONENTS: usize = 8;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1] + i[-1, 1]`, then symmetrized as `(A + A^dagger) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<HermitianOperator> {
    let entries = (0..dim * dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    let a = ComplexMatrix::from_row_major(dim, entries)?;
    Ok(HermitianOperator::hermitian_part(&a))
}

/// Uniformly distributed point on the unit sphere.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> BlochDirection {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    BlochDirection::normalized(r * phi.cos(), r * phi.sin(), z).expect("nonzero vector")
}

pub fn random_settings<R: Rng + ?Sized>(rng: &mut R) -> ChshSettings {
    ChshSettings {
        a: random_direction(rng),
        a_prime: random_direction(rng),
        b: random_direction(rng),
        b_prime: random_direction(rng),
    }
}

/// Haar-random pure qubit state.
pub fn random_pure_qubit<R: Rng + ?Sized>(rng: &mut R) -> Result<DensityOperator> {
    let n = random_direction(rng);
    let theta = n.z().clamp(-1.0, 1.0).acos();
    let phi = n.y().atan2(n.x());
    DensityOperator::pure(&[
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
}

/// Uniform point on the probability simplex with `n` vertices.
pub fn random_simplex_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `components` pure product qubit states with simplex weights; atoms labelled by index.
pub fn random_separable_decomposition<R: Rng + ?Sized>(
    rng: &mut R,
    components: usize,
) -> Result<SeparableDecomposition> {
    let weights = random_simplex_weights(rng, components);
    let comps = weights
        .into_iter()
        .enumerate()
        .map(|(i, weight)| {
            Ok(ProductComponent {
                label: i.to_string(),
                weight,
                site1: random_pure_qubit(rng)?,
                site2: random_pure_qubit(rng)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SeparableDecomposition::new(comps)
}

/// Random decomposition with between [`MIN_COMPONENTS`] and [`MAX_COMPONENTS`] terms.
pub fn random_two_qubit_decomposition<R: Rng + ?Sized>(rng: &mut R) -> Result<SeparableDecomposition> {
    let n = rng.gen_range(MIN_COMPONENTS..=MAX_COMPONENTS);
    random_separable_decomposition(rng, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_reproducible() {
        let a = random_two_qubit_decomposition(&mut seeded(7)).unwrap();
        let b = random_two_qubit_decomposition(&mut seeded(7)).unwrap();
        assert_eq!(a, b);
        let c = random_two_qubit_decomposition(&mut seeded(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn simplex_weights_sum_to_one() {
        let mut rng = seeded(1);
        for n in 1..10 {
            let w = random_simplex_weights(&mut rng, n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(w.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn random_hermitian_is_exactly_hermitian() {
        let mut rng = seeded(3);
        for dim in 1..5 {
            let h = random_hermitian(&mut rng, dim).unwrap();
            assert_eq!(h.matrix().hermiticity_defect(), 0.0);
        }
    }

    #[test]
    fn pure_qubits_are_pure() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            let rho = random_pure_qubit(&mut rng).unwrap();
            let sq = rho.matrix().matmul(rho.matrix()).unwrap();
            assert!(sq.sub(rho.matrix()).unwrap().max_norm() < 1e-14);
        }
    }
}
