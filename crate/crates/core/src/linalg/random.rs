//! Seeded random unitaries and states.
//!
//! All generators draw from a caller-provided [`Rng`]; the `seed` entry point
//! uses ChaCha8 so streams are identical on every platform.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{vector, ComplexMatrix, DensityState, UnitaryOperator};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random `n x n` unitary: QR of a complex Ginibre matrix with the
/// diagonal of `R` rotated to be positive.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryOperator {
    assert!(n >= 1, "dimension must be positive");
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut u = ComplexMatrix::from_nalgebra(&qr.q());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    UnitaryOperator::new(u).expect("QR factor is unitary to machine precision")
}

pub fn haar_random_unitary(n: usize, seed: u64) -> UnitaryOperator {
    haar_unitary_with(n, &mut seeded_rng(seed))
}

/// Uniformly random unit vector in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        if let Some(u) = vector::normalized(&v) {
            return u;
        }
    }
}

/// Random mixed state `G G^dagger / tr(G G^dagger)` with `G` Ginibre of
/// the given rank.
pub fn random_density_with<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DensityState {
    let rank = rank.clamp(1, n);
    let mut g = ComplexMatrix::zeros(n, rank);
    for i in 0..n {
        for j in 0..rank {
            g[(i, j)] = gaussian(rng);
        }
    }
    let gg = g.matmul(&g.adjoint()).expect("shapes agree");
    let tr = gg.trace().re;
    DensityState::from_matrix(gg.scale(Complex64::new(1.0 / tr, 0.0)).hermitian_part())
        .expect("Gram matrix is a valid state")
}
