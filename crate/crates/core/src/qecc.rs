//! State-vector checks for small quantum codes.
//!
//! Kets are indexed with qubit 0 as the most significant bit, so `|10010⟩`
//! is index `0b10010`.

use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;

use crate::bell::GateOp;
use crate::random::random_unitary;
use crate::twirl::{half_pi_rotation, pauli};
use crate::{MaxAbs, Error, Result, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(n: usize, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch(1 << n, amps.len()));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state norm {norm}")));
        }
        Ok(StateVector { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = DVector::zeros(1 << n);
        amps[index] = c(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }
}

/// Two orthonormal codewords spanning a one-qubit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Codeword {
    pub v0: StateVector,
    pub v1: StateVector,
}

impl Codeword {
    pub fn new(v0: StateVector, v1: StateVector) -> Result<Self> {
        if v0.n != v1.n {
            return Err(Error::DimensionMismatch(v0.n, v1.n));
        }
        let overlap = v0.inner(&v1).norm();
        if overlap > 1e-10 {
            return Err(Error::InvalidState(format!("codewords overlap by {overlap:e}")));
        }
        Ok(Codeword { v0, v1 })
    }

    pub fn n(&self) -> usize {
        self.v0.n
    }

    /// `α v0 + β v1`.
    pub fn encode(&self, alpha: C64, beta: C64) -> DVector<C64> {
        &self.v0.amps * alpha + &self.v1.amps * beta
    }

    /// Projector onto the code space.
    pub fn projector(&self) -> DMatrix<C64> {
        let (a, b) = (&self.v0.amps, &self.v1.amps);
        a * a.adjoint() + b * b.adjoint()
    }
}

/// Signs of the sixteen even-parity kets making up `v0`.
const PUBLISHED_V0: [(&str, f64); 16] = [
    ("00000", -1.0),
    ("11000", -1.0),
    ("01100", -1.0),
    ("00110", -1.0),
    ("00011", -1.0),
    ("10001", -1.0),
    ("10010", 1.0),
    ("10100", 1.0),
    ("01001", 1.0),
    ("01010", 1.0),
    ("00101", 1.0),
    ("11110", 1.0),
    ("11101", 1.0),
    ("11011", 1.0),
    ("10111", 1.0),
    ("01111", 1.0),
];

/// The published five-qubit codewords; `v1` complements every bit of `v0`.
pub fn published_codewords() -> Codeword {
    let mut v0 = DVector::zeros(32);
    let mut v1 = DVector::zeros(32);
    for (ket, sign) in PUBLISHED_V0 {
        let k = usize::from_str_radix(ket, 2).expect("binary ket");
        v0[k] = c(sign / 4.0, 0.0);
        v1[k ^ 0b11111] = c(sign / 4.0, 0.0);
    }
    Codeword::new(StateVector { n: 5, amps: v0 }, StateVector { n: 5, amps: v1 }).expect("orthonormal fixture")
}

#[derive(Clone, Debug, PartialEq)]
pub enum ErrorOperator {
    Identity,
    Pauli { axis: char, qubit: usize },
    Unitary { matrix: Matrix2<C64>, qubit: usize },
}

impl ErrorOperator {
    pub fn pauli(axis: char, qubit: usize) -> Result<Self> {
        if !matches!(axis, 'x' | 'y' | 'z') {
            return Err(Error::Parse(format!("unknown Pauli axis {axis:?}")));
        }
        Ok(ErrorOperator::Pauli { axis, qubit })
    }

    pub fn unitary(matrix: Matrix2<C64>, qubit: usize) -> Result<Self> {
        let dev = (matrix.adjoint() * matrix - Matrix2::identity()).max_abs();
        if dev > 1e-12 {
            return Err(Error::InvalidState(format!("error operator not unitary ({dev:e})")));
        }
        Ok(ErrorOperator::Unitary { matrix, qubit })
    }

    fn single(&self) -> Option<(Matrix2<C64>, usize)> {
        match self {
            ErrorOperator::Identity => None,
            ErrorOperator::Pauli { axis, qubit } => Some((pauli(*axis), *qubit)),
            ErrorOperator::Unitary { matrix, qubit } => Some((*matrix, *qubit)),
        }
    }

    pub fn apply(&self, n: usize, v: &DVector<C64>) -> DVector<C64> {
        match self.single() {
            None => v.clone(),
            Some((u, q)) => apply_single(&u, q, n, v),
        }
    }
}

impl fmt::Display for ErrorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorOperator::Identity => f.write_str("I"),
            ErrorOperator::Pauli { axis, qubit } => write!(f, "{}{qubit}", axis.to_ascii_uppercase()),
            ErrorOperator::Unitary { qubit, .. } => write!(f, "U{qubit}"),
        }
    }
}

/// `u` on qubit `q` of an `n`-qubit vector.
pub fn apply_single(u: &Matrix2<C64>, q: usize, n: usize, v: &DVector<C64>) -> DVector<C64> {
    assert!(q < n);
    let bit = 1usize << (n - 1 - q);
    let mut out = v.clone();
    for k in 0..v.len() {
        if k & bit == 0 {
            let (a, b) = (v[k], v[k | bit]);
            out[k] = u[(0, 0)] * a + u[(0, 1)] * b;
            out[k | bit] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
    }
    out
}

/// Every single-qubit Pauli on `n` qubits, qubit-major, axes `x, y, z`.
pub fn single_qubit_paulis(n: usize) -> Vec<ErrorOperator> {
    (0..n)
        .flat_map(|q| ['x', 'y', 'z'].map(|axis| ErrorOperator::Pauli { axis, qubit: q }))
        .collect()
}

/// Identity plus every single-qubit Pauli.
pub fn standard_errors(n: usize) -> Vec<ErrorOperator> {
    std::iter::once(ErrorOperator::Identity)
        .chain(single_qubit_paulis(n))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct KlReport {
    pub holds: bool,
    pub max_residual: f64,
    /// First ordered pair `(i, j)` breaking a condition.
    pub witness: Option<(usize, usize)>,
}

/// Checks `⟨v0|Ri†Rj|v0⟩ = ⟨v1|Ri†Rj|v1⟩` and `⟨v1|Ri†Rj|v0⟩ = 0` for all
/// ordered pairs.
pub fn kl_check(code: &Codeword, errors: &[ErrorOperator], tol: f64) -> KlReport {
    let n = code.n();
    let r0: Vec<_> = errors.iter().map(|e| e.apply(n, &code.v0.amps)).collect();
    let r1: Vec<_> = errors.iter().map(|e| e.apply(n, &code.v1.amps)).collect();
    let mut max_residual = 0.0f64;
    let mut witness = None;
    for i in 0..errors.len() {
        for j in 0..errors.len() {
            let same = (r0[i].dotc(&r0[j]) - r1[i].dotc(&r1[j])).norm();
            let cross = r1[i].dotc(&r0[j]).norm();
            let res = same.max(cross);
            max_residual = max_residual.max(res);
            if res > tol && witness.is_none() {
                witness = Some((i, j));
            }
        }
    }
    KlReport {
        holds: witness.is_none(),
        max_residual,
        witness,
    }
}

/// Recovery built from the error-correction conditions.
///
/// Diagonalizing `C_ij = ⟨v0|Ri†Rj|v0⟩` gives combinations `F_k = Σ U_ik R_i`
/// that map the code onto mutually orthogonal copies; decoding projects
/// onto each copy and reads the logical amplitudes back.
#[derive(Clone, Debug)]
pub struct Decoder {
    subspaces: Vec<(DVector<C64>, DVector<C64>)>,
}

impl Decoder {
    pub fn new(code: &Codeword, errors: &[ErrorOperator]) -> Self {
        let n = code.n();
        let r0: Vec<_> = errors.iter().map(|e| e.apply(n, &code.v0.amps)).collect();
        let r1: Vec<_> = errors.iter().map(|e| e.apply(n, &code.v1.amps)).collect();
        let k = errors.len();
        let gram = DMatrix::from_fn(k, k, |i, j| r0[i].dotc(&r0[j]));
        let gram = (&gram + gram.adjoint()) * c(0.5, 0.0);
        let eig = gram.symmetric_eigen();
        let mut subspaces = Vec::new();
        for col in 0..k {
            let d = eig.eigenvalues[col];
            if d < 1e-9 {
                continue;
            }
            let u = eig.eigenvectors.column(col);
            let scale = c(1.0 / d.sqrt(), 0.0);
            let combine = |r: &[DVector<C64>]| {
                r.iter()
                    .enumerate()
                    .fold(DVector::zeros(1 << n), |acc: DVector<C64>, (i, v)| acc + v * u[i])
                    * scale
            };
            subspaces.push((combine(&r0), combine(&r1)));
        }
        Decoder { subspaces }
    }

    /// Number of orthogonal error subspaces.
    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    /// Fidelity `Σ_k |⟨ξ|ξ_k⟩|²` of the recovered logical state with
    /// `ξ = (α, β)`.
    pub fn fidelity(&self, received: &DVector<C64>, alpha: C64, beta: C64) -> f64 {
        self.subspaces
            .iter()
            .map(|(f0, f1)| {
                let (a, b) = (f0.dotc(received), f1.dotc(received));
                (alpha.conj() * a + beta.conj() * b).norm_sqr()
            })
            .sum()
    }
}

fn check_logical(alpha: C64, beta: C64) -> Result<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::OutOfDomain {
            what: "logical state norm",
            value: norm,
        });
    }
    Ok(())
}

/// Encode, corrupt with `e`, decode for the identity-plus-single-Pauli
/// error set, and return the fidelity with the input.
pub fn decode_simulate(code: &Codeword, alpha: C64, beta: C64, e: &ErrorOperator) -> Result<f64> {
    let decoder = Decoder::new(code, &standard_errors(code.n()));
    decode_with(&decoder, code, alpha, beta, e)
}

/// As [`decode_simulate`] with a prebuilt decoder.
pub fn decode_with(decoder: &Decoder, code: &Codeword, alpha: C64, beta: C64, e: &ErrorOperator) -> Result<f64> {
    check_logical(alpha, beta)?;
    let received = e.apply(code.n(), &code.encode(alpha, beta));
    Ok(decoder.fidelity(&received, alpha, beta))
}

/// Random logical amplitudes, uniform on the Bloch sphere.
pub fn random_logical<R: Rng + ?Sized>(rng: &mut R) -> (C64, C64) {
    let v = crate::random::random_pure_state(2, rng);
    (v[0], v[1])
}

pub fn random_single_qubit_error<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ErrorOperator {
    let u = random_unitary(2, rng);
    ErrorOperator::Unitary {
        matrix: Matrix2::from_fn(|r, col| u[(r, col)]),
        qubit: rng.random_range(0..n),
    }
}

/// `‖(U⊗I)|Φ⟩ − (I⊗Uᵀ)|Φ⟩‖` with `|Φ⟩ = 2^{−n/2} Σ_x |x⟩|x⟩`.
pub fn ricochet_check(u: &DMatrix<C64>, n: usize) -> Result<f64> {
    let d = 1usize << n;
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch(d, u.nrows()));
    }
    let mut phi = DVector::zeros(d * d);
    let amp = c((d as f64).sqrt().recip(), 0.0);
    for x in 0..d {
        phi[x * d + x] = amp;
    }
    let id = DMatrix::<C64>::identity(d, d);
    let left = u.kronecker(&id) * &phi;
    let right = id.kronecker(&u.transpose()) * &phi;
    Ok((left - right).norm())
}

/// Whether the reduced-density-matrix obstruction rules out a code
/// correcting `t` errors in `n` qubits: it does exactly when `n = 4t`.
pub fn kl_no_code_argument(n: usize, t: usize) -> bool {
    t > 0 && n == 4 * t
}

/// Reduced density matrix of `v` on the qubits in `keep` (ascending).
pub fn reduced_density(v: &DVector<C64>, n: usize, keep: &[usize]) -> DMatrix<C64> {
    let k = keep.len();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let index = |kept_bits: usize, env_bits: usize| {
        let mut idx = 0usize;
        for (j, &q) in keep.iter().enumerate() {
            idx |= (kept_bits >> (k - 1 - j) & 1) << (n - 1 - q);
        }
        for (j, &q) in traced.iter().enumerate() {
            idx |= (env_bits >> (traced.len() - 1 - j) & 1) << (n - 1 - q);
        }
        idx
    };
    DMatrix::from_fn(1 << k, 1 << k, |a, b| {
        (0..1usize << traced.len())
            .map(|e| v[index(a, e)] * v[index(b, e)].conj())
            .sum()
    })
}

/// Ascending `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0usize..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|q| m >> (n - 1 - q) & 1 == 1).collect())
        .collect()
}

fn cnot(control: usize, target: usize, n: usize) -> DMatrix<C64> {
    let d = 1usize << n;
    let (cb, tb) = (1usize << (n - 1 - control), 1usize << (n - 1 - target));
    DMatrix::from_fn(d, d, |r, col| {
        let image = if col & cb != 0 { col ^ tb } else { col };
        if r == image {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

fn single_op(u: &Matrix2<C64>, q: usize, n: usize) -> DMatrix<C64> {
    let d = 1usize << n;
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let mut e = DVector::zeros(d);
        e[col] = c(1.0, 0.0);
        m.set_column(col, &apply_single(u, q, n, &e));
    }
    m
}

/// Alice's half of a repertoire gate list as an `n`-qubit unitary.
///
/// BXOR becomes a CNOT, `BY` and `SXBX` contribute their single-qubit
/// rotations, and the unilateral amplitude flip is done by Alice.
pub fn alice_unitary(gates: &[GateOp], n: usize) -> Result<DMatrix<C64>> {
    let d = 1usize << n;
    let mut u = DMatrix::<C64>::identity(d, d);
    for &g in gates {
        crate::bell::apply_gate(g, &crate::bell::BellString::zeros(n))?;
        let step = match g {
            GateOp::Bxor { source, target } => cnot(source, target, n),
            GateOp::By(i) => single_op(&half_pi_rotation('y'), i, n),
            GateOp::Sx(i) => single_op(&pauli('x'), i, n),
            GateOp::SxBx(i) => single_op(&(pauli('x') * half_pi_rotation('x')), i, n),
            other => return Err(Error::UnsupportedGate(other.to_string())),
        };
        u = step * u;
    }
    Ok(u)
}

/// Codewords `v_j = U_Aᵀ |j, 0…0⟩` of the code equivalent to a one-way
/// purification circuit keeping pair 0.
pub fn codewords_from_circuit(gates: &[GateOp], n: usize) -> Result<Codeword> {
    let u = alice_unitary(gates, n)?;
    let word = |j: usize| {
        let row = j << (n - 1);
        StateVector::new(n, u.row(row).transpose())
    };
    Codeword::new(word(0)?, word(1)?)
}

/// Frobenius distance between the two code-space projectors.
pub fn subspace_distance(a: &Codeword, b: &Codeword) -> f64 {
    (a.projector() - b.projector()).norm()
}
