//! Random states and unitaries for property tests and simulations.

use nalgebra::{DMatrix, DVector, Matrix4};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random `dim × dim` unitary (QR of a Ginibre matrix with the phase
/// of R's diagonal divided out).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Random two-qubit density matrix `G G† / tr(G G†)` with Ginibre `G`.
pub fn random_density_4<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<C64> {
    let g = Matrix4::from_fn(|_, _| complex_gaussian(rng));
    let m = g * g.adjoint();
    let tr = m.trace();
    m / tr
}
