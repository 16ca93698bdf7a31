//! Mixed-state entanglement toolkit.
//!
//! Bell-state algebra on two-bit labels, two-qubit density matrices and
//! entanglement measures, discrete twirls, recurrence / hashing / breeding
//! purification, yield curves over Werner fidelity, a Monte Carlo search
//! for small GF(2) block codes, and state-vector verification of the
//! resulting quantum error-correcting code.
//!
//! Bell states are labelled in the Φ+-standard two-bit convention
//! (`Φ+ = 00`, `Ψ+ = 01`, `Φ− = 10`, `Ψ− = 11`); the left bit is the
//! phase bit and the right bit the amplitude bit.

pub mod bell;
pub mod capacity;
pub mod codesearch;
pub mod density;
mod error;
pub mod fmt;
pub mod hashing;
pub mod protocols;
pub mod qecc;
pub mod random;
pub mod twirl;

pub use error::{Error, Result};

pub use bell::{BellIndex, BellString, GateOp, SubsetIndex};
pub use density::{BellDiagonal, DensityMatrix, Ensemble, PureState};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Largest entry modulus of a complex matrix.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>> MaxAbs for nalgebra::Matrix<C64, R, C, S> {
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
