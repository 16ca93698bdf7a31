//! Two-qubit mixed states and entanglement measures.
//!
//! Computational basis order is `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` (`|00⟩ … |11⟩`,
//! first qubit most significant). The magic basis is
//! `e1 = Φ+`, `e2 = iΦ−`, `e3 = iΨ+`, `e4 = Ψ−`; in it every maximally
//! entangled state is a real vector up to a global phase.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::bell::BellIndex;
use crate::{MaxAbs, Error, Result, C64};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;
const PROB_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Computational,
    Magic,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bell state `b` as a computational-basis vector.
pub fn bell_vector(b: BellIndex) -> Vector4<C64> {
    let r = c(FRAC_1_SQRT_2, 0.0);
    let sign = if b.phase() { -r } else { r };
    if b.amplitude() {
        Vector4::new(c(0.0, 0.0), r, sign, c(0.0, 0.0))
    } else {
        Vector4::new(r, c(0.0, 0.0), c(0.0, 0.0), sign)
    }
}

/// Bell index carried by magic-basis vector `e_{j+1}`.
pub const MAGIC_ORDER: [BellIndex; 4] = [
    BellIndex::PHI_PLUS,
    BellIndex::PHI_MINUS,
    BellIndex::PSI_PLUS,
    BellIndex::PSI_MINUS,
];

/// Columns are the magic-basis vectors in the computational basis.
pub fn magic_basis() -> Matrix4<C64> {
    let phases = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)];
    let mut u = Matrix4::zeros();
    for (j, (b, ph)) in MAGIC_ORDER.iter().zip(phases).enumerate() {
        u.set_column(j, &(bell_vector(*b) * ph));
    }
    u
}

/// Columns are the Bell states ordered by index bits (Φ+, Ψ+, Φ−, Ψ−).
pub fn bell_basis() -> Matrix4<C64> {
    let mut u = Matrix4::zeros();
    for b in BellIndex::ALL {
        u.set_column(b.bits() as usize, &bell_vector(b));
    }
    u
}

/// Binary entropy in bits, `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// Shannon entropy of a probability list in bits, `0·log 0 = 0`.
pub fn shannon_entropy<'a>(probs: impl IntoIterator<Item = &'a f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Lower bound on the entanglement of formation from the fully entangled
/// fraction: `H(½ + √(f(1−f)))` for `f ≥ ½`, zero below.
pub fn h_bound(f: f64) -> f64 {
    let f = f.clamp(0.0, 1.0);
    if f < 0.5 {
        0.0
    } else {
        binary_entropy(0.5 + (f * (1.0 - f)).sqrt())
    }
}

/// Probability vector over the four Bell states, indexed by Bell bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellDiagonal {
    p: [f64; 4],
}

impl BellDiagonal {
    /// `p` is `[p00, p01, p10, p11]`.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if let Some(&bad) = p.iter().find(|&&x| !x.is_finite() || x < -PROB_TOL) {
            return Err(Error::OutOfDomain {
                what: "Bell-diagonal probability",
                value: bad,
            });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::OutOfDomain {
                what: "Bell-diagonal total probability",
                value: sum,
            });
        }
        Ok(BellDiagonal {
            p: p.map(|x| x.max(0.0)),
        })
    }

    /// Renormalizes before validating; for values produced by arithmetic.
    pub(crate) fn normalized(p: [f64; 4]) -> Self {
        let sum: f64 = p.iter().sum();
        BellDiagonal {
            p: p.map(|x| (x / sum).max(0.0)),
        }
    }

    pub fn garbage() -> Self {
        BellDiagonal { p: [0.25; 4] }
    }

    pub fn probs(&self) -> [f64; 4] {
        self.p
    }

    pub fn get(&self, b: BellIndex) -> f64 {
        self.p[b.bits() as usize]
    }

    /// Weight on the standard state `Φ+`.
    pub fn fidelity(&self) -> f64 {
        self.p[0]
    }

    pub fn max_prob(&self) -> f64 {
        self.p.iter().copied().fold(0.0, f64::max)
    }

    /// Von Neumann entropy (the Shannon entropy of the weights).
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.p)
    }

    /// Exact entanglement of formation, `h(max p)`.
    pub fn entanglement_of_formation(&self) -> f64 {
        h_bound(self.max_prob())
    }

    pub fn to_density(&self) -> DensityMatrix {
        let mut m = Matrix4::zeros();
        for b in BellIndex::ALL {
            let v = bell_vector(b);
            m += v * v.adjoint() * c(self.get(b), 0.0);
        }
        DensityMatrix {
            m,
            basis: Basis::Computational,
        }
    }

    /// Components in magic-basis order `e1..e4`.
    fn magic_weights(&self) -> [f64; 4] {
        MAGIC_ORDER.map(|b| self.get(b))
    }
}

/// Werner state of fidelity `f` in the Φ+ convention: `(F, q, q, q)` with
/// `q = (1−F)/3`.
pub fn werner(f: f64) -> Result<BellDiagonal> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfDomain {
            what: "Werner fidelity",
            value: f,
        });
    }
    let q = (1.0 - f) / 3.0;
    Ok(BellDiagonal { p: [f, q, q, q] })
}

/// Exact entanglement of formation of a Bell-diagonal state.
pub fn eof_bell_diagonal(w: &BellDiagonal) -> f64 {
    w.entanglement_of_formation()
}

/// A 4×4 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<C64>,
    basis: Basis,
}

impl DensityMatrix {
    pub fn new(m: Matrix4<C64>, basis: Basis) -> Result<Self> {
        let herm = (m - m.adjoint()).max_abs();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (residual {herm:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} ≠ 1")));
        }
        let dm = DensityMatrix { m, basis };
        let min = dm.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(dm)
    }

    /// Wraps a matrix the caller knows to be valid.
    pub(crate) fn from_raw(m: Matrix4<C64>, basis: Basis) -> Self {
        DensityMatrix { m, basis }
    }

    pub fn from_pure(v: &PureState) -> Self {
        let a = v.amplitudes();
        DensityMatrix {
            m: a * a.adjoint(),
            basis: v.basis(),
        }
    }

    /// `(1−p)|↑↑⟩⟨↑↑| + p|Ψ+⟩⟨Ψ+|`.
    pub fn up_up_psi_plus(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfDomain {
                what: "mixing weight",
                value: p,
            });
        }
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(1.0 - p, 0.0);
        let psi = bell_vector(BellIndex::PSI_PLUS);
        m += psi * psi.adjoint() * c(p, 0.0);
        Ok(DensityMatrix {
            m,
            basis: Basis::Computational,
        })
    }

    /// Equal mixture of `|↑↑⟩` and `Ψ+`: fully entangled fraction ½ yet
    /// entangled.
    pub fn counterexample() -> Self {
        Self::up_up_psi_plus(0.5).expect("valid weight")
    }

    pub fn garbage() -> Self {
        DensityMatrix {
            m: Matrix4::identity() * c(0.25, 0.0),
            basis: Basis::Computational,
        }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.m
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn to_magic_basis(&self) -> DensityMatrix {
        match self.basis {
            Basis::Magic => self.clone(),
            Basis::Computational => {
                let u = magic_basis();
                DensityMatrix {
                    m: u.adjoint() * self.m * u,
                    basis: Basis::Magic,
                }
            }
        }
    }

    pub fn to_computational(&self) -> DensityMatrix {
        match self.basis {
            Basis::Computational => self.clone(),
            Basis::Magic => {
                let u = magic_basis();
                DensityMatrix {
                    m: u * self.m * u.adjoint(),
                    basis: Basis::Computational,
                }
            }
        }
    }

    /// The matrix expressed in the Bell basis (rows/columns Φ+, Ψ+, Φ−, Ψ−).
    pub fn bell_basis_matrix(&self) -> Matrix4<C64> {
        let u = bell_basis();
        u.adjoint() * self.to_computational().m * u
    }

    /// Diagonal of the matrix in the Bell basis.
    pub fn bell_weights(&self) -> [f64; 4] {
        let b = self.bell_basis_matrix();
        [b[(0, 0)].re, b[(1, 1)].re, b[(2, 2)].re, b[(3, 3)].re]
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let ev = self.m.symmetric_eigenvalues();
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// Base-2 von Neumann entropy.
    pub fn entropy(&self) -> f64 {
        let ev = self.eigenvalues();
        shannon_entropy(&ev)
    }

    /// Largest overlap with any maximally entangled state: the top
    /// eigenvalue of the real part of the matrix in the magic basis.
    pub fn fully_entangled_fraction(&self) -> f64 {
        let magic = self.to_magic_basis();
        let re: Matrix4<f64> = magic.m.map(|z| z.re);
        let sym = (re + re.transpose()) * 0.5;
        sym.symmetric_eigenvalues().max()
    }

    /// `⟨v|M|v⟩` for a computational-basis vector `v`.
    pub fn expectation(&self, v: &Vector4<C64>) -> f64 {
        (v.adjoint() * self.to_computational().m * v)[(0, 0)].re
    }
}

/// Fully entangled fraction of `m`.
pub fn fully_entangled_fraction(m: &DensityMatrix) -> f64 {
    m.fully_entangled_fraction()
}

/// Unit-norm two-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vector4<C64>,
    basis: Basis,
}

impl PureState {
    pub fn new(amps: Vector4<C64>, basis: Basis) -> Result<Self> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state norm {norm}")));
        }
        Ok(PureState { amps, basis })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amps: Vector4<C64>, basis: Basis) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(PureState {
            amps: amps / c(norm, 0.0),
            basis,
        })
    }

    pub fn bell(b: BellIndex) -> Self {
        PureState {
            amps: bell_vector(b),
            basis: Basis::Computational,
        }
    }

    pub fn amplitudes(&self) -> &Vector4<C64> {
        &self.amps
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn to_computational(&self) -> PureState {
        match self.basis {
            Basis::Computational => self.clone(),
            Basis::Magic => PureState {
                amps: magic_basis() * self.amps,
                basis: Basis::Computational,
            },
        }
    }

    pub fn to_magic_basis(&self) -> PureState {
        match self.basis {
            Basis::Magic => self.clone(),
            Basis::Computational => PureState {
                amps: magic_basis().adjoint() * self.amps,
                basis: Basis::Magic,
            },
        }
    }

    /// `C = |Σ α_j²|` over magic-basis amplitudes.
    pub fn concurrence(&self) -> f64 {
        self.to_magic_basis().amps.iter().map(|a| a * a).sum::<C64>().norm()
    }

    /// Entropy of entanglement via `H(½(1 + √(1 − C²)))`.
    pub fn entanglement(&self) -> f64 {
        let cc = self.concurrence().min(1.0);
        binary_entropy(0.5 * (1.0 + (1.0 - cc * cc).max(0.0).sqrt()))
    }

    /// Entropy of the reduced state of the second qubit, computed directly.
    pub fn reduced_entropy(&self) -> f64 {
        let a = self.to_computational().amps;
        let rho = Matrix2::from_fn(|b1, b2| a[b1] * a[b2].conj() + a[2 + b1] * a[2 + b2].conj());
        let tr = rho.trace().re;
        let det = rho.determinant().re;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        binary_entropy(0.5 * (tr + disc))
    }
}

/// Entanglement of a pure state.
pub fn pure_entanglement(v: &PureState) -> f64 {
    v.entanglement()
}

/// A decomposition `Σ p_k |φ_k⟩⟨φ_k|`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The mixture, in the computational basis.
    pub fn density(&self) -> DensityMatrix {
        let mut m = Matrix4::zeros();
        for (p, v) in &self.members {
            let a = v.to_computational().amps;
            m += a * a.adjoint() * c(*p, 0.0);
        }
        DensityMatrix::from_raw(m, Basis::Computational)
    }

    pub fn average_entanglement(&self) -> f64 {
        self.members.iter().map(|(p, v)| p * v.entanglement()).sum()
    }
}

/// Phases `θ_j` with `Σ p_j e^{iθ_j} = 0`, available whenever no weight
/// exceeds ½.
///
/// The two largest weights and the combined remainder form a (possibly
/// degenerate) triangle; the two smallest share a direction.
pub fn closing_phases(p: [f64; 4]) -> Option<[f64; 4]> {
    if p.iter().any(|&x| x > 0.5 + 1e-12) {
        return None;
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    let (a, b) = (p[order[0]], p[order[1]]);
    let rest = p[order[2]] + p[order[3]];
    let cos = ((rest * rest - a * a - b * b) / (2.0 * a * b)).clamp(-1.0, 1.0);
    let phi = cos.acos();
    let sum = C64::from_polar(a, 0.0) + C64::from_polar(b, phi);
    let rest_angle = if rest > 0.0 { (-sum).arg() } else { 0.0 };
    let mut theta = [0.0; 4];
    theta[order[0]] = 0.0;
    theta[order[1]] = phi;
    theta[order[2]] = rest_angle;
    theta[order[3]] = rest_angle;
    Some(theta)
}

fn sign_patterns(active: &[usize]) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for mask in 0..(1u32 << active.len()) {
        let mut s = [1.0; 4];
        for (bit, &j) in active.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                s[j] = -1.0;
            }
        }
        out.push(s);
    }
    out
}

fn equal_mixture(states: Vec<Vector4<C64>>) -> Ensemble {
    let w = 1.0 / states.len() as f64;
    Ensemble {
        members: states
            .into_iter()
            .map(|a| (w, PureState::normalized(a, Basis::Magic).expect("nonzero")))
            .collect(),
    }
}

/// Zero-entanglement ensemble `Σ ±√p_j e^{iθ_j/2} e_j` for phases that
/// close the polygon.
pub fn phased_ensemble(w: &BellDiagonal, theta: [f64; 4]) -> Result<Ensemble> {
    let p = w.magic_weights();
    let t = MAGIC_ORDER.map(|b| theta[b.bits() as usize]);
    let closure: C64 = p.iter().zip(t).map(|(&pj, tj)| C64::from_polar(pj, tj)).sum();
    if closure.norm() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "phases do not close: |Σ p e^(iθ)| = {:e}",
            closure.norm()
        )));
    }
    let first = (0..4).find(|&j| p[j] > 0.0).expect("probabilities sum to 1");
    let active: Vec<usize> = (first + 1..4).filter(|&j| p[j] > 0.0).collect();
    let states = sign_patterns(&active)
        .into_iter()
        .map(|s| Vector4::from_fn(|j, _| C64::from_polar(s[j] * p[j].sqrt(), t[j] / 2.0)))
        .collect();
    Ok(equal_mixture(states))
}

/// Minimum-entanglement decomposition of a Bell-diagonal state.
///
/// With a dominant weight `p ≥ ½` the members are
/// `√p e_k + i(±√p_a e_a ± √p_b e_b ± √p_c e_c)`, each carrying `h(p)`
/// ebits. Otherwise the members are built from [`closing_phases`] and are
/// all unentangled. Components with zero weight are not sign-expanded, so
/// a pure Bell state yields a single member.
pub fn minimal_ensemble(w: &BellDiagonal) -> Ensemble {
    let p = w.magic_weights();
    let (k, &pk) = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("four weights");
    if pk >= 0.5 {
        let active: Vec<usize> = (0..4).filter(|&j| j != k && p[j] > 0.0).collect();
        let states = sign_patterns(&active)
            .into_iter()
            .map(|s| {
                Vector4::from_fn(|j, _| {
                    if j == k {
                        c(pk.sqrt(), 0.0)
                    } else {
                        c(0.0, s[j] * p[j].sqrt())
                    }
                })
            })
            .collect();
        equal_mixture(states)
    } else {
        let theta = closing_phases(w.probs()).expect("no weight above ½");
        phased_ensemble(w, theta).expect("closing phases close")
    }
}

/// Anything with a base-2 von Neumann entropy.
pub trait VonNeumann {
    fn von_neumann_entropy(&self) -> f64;
}

impl VonNeumann for BellDiagonal {
    fn von_neumann_entropy(&self) -> f64 {
        self.entropy()
    }
}

impl VonNeumann for DensityMatrix {
    fn von_neumann_entropy(&self) -> f64 {
        self.entropy()
    }
}

pub fn von_neumann_entropy(state: &impl VonNeumann) -> f64 {
    state.von_neumann_entropy()
}

/// Sixteen whitespace-separated `re,im` pairs, row-major, computational basis.
impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.to_computational().m;
        let mut first = true;
        for r in 0..4 {
            for col in 0..4 {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                let z = m[(r, col)];
                write!(f, "{},{}", crate::fmt::csv(z.re), crate::fmt::csv(z.im))?;
            }
        }
        Ok(())
    }
}

impl FromStr for DensityMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split_whitespace()
            .map(|tok| {
                let (re, im) = tok
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected re,im, got {tok:?}")))?;
                let parse = |x: &str| x.parse::<f64>().map_err(|e| Error::Parse(format!("{x:?}: {e}")));
                Ok(c(parse(re)?, parse(im)?))
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != 16 {
            return Err(Error::Parse(format!("expected 16 entries, got {}", entries.len())));
        }
        DensityMatrix::new(Matrix4::from_row_slice(&entries), Basis::Computational)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::random::{random_density_4, random_pure_state};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn magic_basis_is_unitary() {
        let u = magic_basis();
        assert!((u.adjoint() * u - Matrix4::identity()).norm() < 1e-14);
        let b = bell_basis();
        assert!((b.adjoint() * b - Matrix4::identity()).norm() < 1e-14);
    }

    #[test]
    fn magic_basis_examples() {
        let phi = BellDiagonal::new([1.0, 0.0, 0.0, 0.0]).unwrap().to_density();
        let m = phi.to_magic_basis();
        let mut expect = Matrix4::zeros();
        expect[(0, 0)] = c(1.0, 0.0);
        assert!((m.matrix() - expect).norm() < 1e-14);

        let g = DensityMatrix::garbage().to_magic_basis();
        assert!((g.matrix() - Matrix4::identity() * c(0.25, 0.0)).norm() < 1e-14);

        let cm = DensityMatrix::counterexample().to_magic_basis();
        let mut expect = Matrix4::zeros();
        expect[(0, 0)] = c(0.25, 0.0);
        expect[(0, 1)] = c(0.0, 0.25);
        expect[(1, 0)] = c(0.0, -0.25);
        expect[(1, 1)] = c(0.25, 0.0);
        expect[(2, 2)] = c(0.5, 0.0);
        assert!((cm.matrix() - expect).norm() < 1e-14, "{}", cm.matrix());
        assert!((cm.to_computational().matrix() - DensityMatrix::counterexample().matrix()).norm() < 1e-14);
    }

    #[test]
    fn magic_basis_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DensityMatrix::new(random_density_4(&mut rng), Basis::Computational).unwrap();
        let mut a = m.eigenvalues();
        let mut b = m.to_magic_basis().eigenvalues();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(b) {
            close(*x, y, 1e-12);
        }
        close(m.to_magic_basis().matrix().trace().re, 1.0, 1e-12);
    }

    #[test]
    fn density_validation() {
        let mut bad = Matrix4::identity() * c(0.25, 0.0);
        bad[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(bad, Basis::Computational).is_err());
        assert!(DensityMatrix::new(Matrix4::identity() * c(0.3, 0.0), Basis::Computational).is_err());
        let mut neg = Matrix4::zeros();
        neg[(0, 0)] = c(1.5, 0.0);
        neg[(1, 1)] = c(-0.5, 0.0);
        assert!(DensityMatrix::new(neg, Basis::Computational).is_err());
        assert!(DensityMatrix::new(*DensityMatrix::garbage().matrix(), Basis::Computational).is_ok());
    }

    #[test]
    fn fully_entangled_fraction_examples() {
        close(DensityMatrix::counterexample().fully_entangled_fraction(), 0.5, 1e-12);
        close(h_bound(0.5), 0.0, 0.0);
        let phi = PureState::bell(BellIndex::PHI_PLUS);
        close(DensityMatrix::from_pure(&phi).fully_entangled_fraction(), 1.0, 1e-12);
    }

    // Brute-force maximization over random real magic-basis unit vectors.
    #[test]
    fn fully_entangled_fraction_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = werner(0.9).unwrap().to_density();
        let m = DensityMatrix::new(random_density_4(&mut rng), Basis::Computational).unwrap();
        for state in [w, m] {
            let u = magic_basis();
            let mut best = 0.0f64;
            for _ in 0..200_000 {
                let r = Vector4::from_fn(|_, _| rng.random::<f64>() * 2.0 - 1.0);
                let r = r / r.norm();
                let e = u * r.map(|x| c(x, 0.0));
                best = best.max(state.expectation(&e));
            }
            let f = state.fully_entangled_fraction();
            assert!(best <= f + 1e-12);
            assert!(f - best < 2e-3, "sampled {best}, eigenvalue {f}");
        }
        close(werner(0.9).unwrap().to_density().fully_entangled_fraction(), 0.9, 1e-12);
    }

    #[test]
    fn pure_entanglement_examples() {
        close(PureState::bell(BellIndex::PSI_MINUS).entanglement(), 1.0, 1e-12);
        let up = PureState::new(Vector4::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), Basis::Computational).unwrap();
        close(up.entanglement(), 0.0, 1e-12);
        let phi = PureState::new(Vector4::new(c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)), Basis::Computational).unwrap();
        close(phi.entanglement(), binary_entropy(0.64), 1e-12);
        close(phi.entanglement(), 0.942_683_189_255_493, 1e-12);
        // h(½ + αβ) = H(α²)
        close(h_bound(0.5 + 0.48), binary_entropy(0.64), 1e-12);
    }

    #[test]
    fn pure_entanglement_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let v = random_pure_state(4, &mut rng);
            let s = PureState::new(Vector4::from_iterator(v.iter().copied()), Basis::Computational).unwrap();
            close(s.entanglement(), s.reduced_entropy(), 1e-10);
        }
    }

    #[test]
    fn real_magic_combinations_are_maximally_entangled() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let r = Vector4::from_fn(|_, _| c(rng.random::<f64>() - 0.5, 0.0));
            let s = PureState::normalized(r, Basis::Magic).unwrap();
            close(s.entanglement(), 1.0, 1e-10);
            close(s.reduced_entropy(), 1.0, 1e-10);
        }
    }

    #[test]
    fn h_bound_examples() {
        close(h_bound(1.0), 1.0, 1e-15);
        close(h_bound(0.5), 0.0, 1e-15);
        close(h_bound(0.3), 0.0, 0.0);
        close(h_bound(5.0 / 8.0), 0.117_62, 5e-6);
    }

    #[test]
    fn eof_examples() {
        close(eof_bell_diagonal(&werner(5.0 / 8.0).unwrap()), 0.1176, 5e-5);
        close(eof_bell_diagonal(&BellDiagonal::garbage()), 0.0, 0.0);
        close(eof_bell_diagonal(&werner(1.0).unwrap()), 1.0, 1e-15);
    }

    #[test]
    fn eof_equals_bound_on_bell_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
            let w = BellDiagonal::normalized(raw);
            let bound = h_bound(w.to_density().fully_entangled_fraction());
            close(eof_bell_diagonal(&w), bound, 1e-10);
        }
    }

    fn check_ensemble(w: &BellDiagonal, expected_e: f64) {
        let ens = minimal_ensemble(w);
        let total: f64 = ens.members.iter().map(|(p, _)| p).sum();
        close(total, 1.0, 1e-12);
        let diff = (ens.density().matrix() - w.to_density().matrix()).max_abs();
        assert!(diff < 1e-10, "reconstruction error {diff:e}");
        for (_, v) in &ens.members {
            close(v.entanglement(), expected_e, 1e-10);
            close(v.reduced_entropy(), expected_e, 1e-10);
        }
    }

    #[test]
    fn minimal_ensemble_examples() {
        let w = BellDiagonal::new([0.7, 0.1, 0.1, 0.1]).unwrap();
        assert_eq!(minimal_ensemble(&w).len(), 8);
        check_ensemble(&w, h_bound(0.7));
        let x: f64 = 0.5 + 0.21f64.sqrt();
        close(h_bound(0.7), -x * x.log2() - (1.0 - x) * (1.0 - x).log2(), 1e-14);
        close(h_bound(0.7), 0.2502, 5e-5);

        let pure = BellDiagonal::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        let ens = minimal_ensemble(&pure);
        assert_eq!(ens.len(), 1);
        check_ensemble(&pure, 1.0);

        check_ensemble(&BellDiagonal::garbage(), 0.0);
        assert_eq!(minimal_ensemble(&BellDiagonal::garbage()).len(), 8);

        // dominant weight on a non-standard Bell state
        check_ensemble(&BellDiagonal::new([0.1, 0.05, 0.15, 0.7]).unwrap(), h_bound(0.7));
    }

    #[test]
    fn phased_ensemble_with_alternating_phases() {
        let g = BellDiagonal::garbage();
        let ens = phased_ensemble(&g, [0.0, PI, 0.0, PI]).unwrap();
        assert_eq!(ens.len(), 8);
        for (_, v) in &ens.members {
            close(v.entanglement(), 0.0, 1e-10);
        }
        assert!((ens.density().matrix() - g.to_density().matrix()).max_abs() < 1e-12);
        assert!(phased_ensemble(&g, [0.0; 4]).is_err());
    }

    proptest! {
        #[test]
        fn ensemble_reconstructs(raw in proptest::array::uniform4(0.0f64..1.0)) {
            prop_assume!(raw.iter().sum::<f64>() > 1e-3);
            let w = BellDiagonal::normalized(raw);
            let e = if w.max_prob() >= 0.5 { h_bound(w.max_prob()) } else { 0.0 };
            check_ensemble(&w, e);
        }
    }

    #[test]
    fn entropy_examples() {
        close(werner(1.0).unwrap().entropy(), 0.0, 0.0);
        close(BellDiagonal::garbage().entropy(), 2.0, 1e-15);
        let f: f64 = 0.9;
        let closed = -f * f.log2() - (1.0 - f) * ((1.0 - f) / 3.0).log2();
        close(werner(0.9).unwrap().entropy(), closed, 1e-14);
        close(closed, 0.627_492_0, 1e-6);
        close(werner(0.9).unwrap().to_density().entropy(), closed, 1e-12);
        close(DensityMatrix::garbage().entropy(), 2.0, 1e-12);
    }

    #[test]
    fn werner_examples() {
        assert_eq!(werner(5.0 / 8.0).unwrap().probs(), [0.625, 0.125, 0.125, 0.125]);
        assert_eq!(werner(1.0).unwrap().probs(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(werner(0.25).unwrap().probs(), [0.25; 4]);
        assert!(werner(1.2).is_err());
        assert!(werner(-0.1).is_err());
        assert!(BellDiagonal::new([0.5, 0.5, 0.1, -0.1]).is_err());
        assert!(BellDiagonal::new([0.5, 0.6, 0.0, 0.0]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = DensityMatrix::counterexample();
        let back: DensityMatrix = m.to_string().parse().unwrap();
        assert!((back.matrix() - m.matrix()).max_abs() < 1e-12);
        assert!("1,0 0,0".parse::<DensityMatrix>().is_err());
        close(von_neumann_entropy(&m), von_neumann_entropy(&m.to_magic_basis()), 1e-12);
    }

    #[test]
    fn bell_weights_round_trip() {
        let w = BellDiagonal::new([0.4, 0.3, 0.2, 0.1]).unwrap();
        let got = w.to_density().bell_weights();
        for (a, b) in got.iter().zip(w.probs()) {
            close(*a, b, 1e-14);
        }
    }
}
