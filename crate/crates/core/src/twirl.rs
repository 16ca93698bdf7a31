//! Discrete twirls: averaging a two-qubit state over a finite set of
//! bilateral rotations to force Werner or Bell-diagonal form.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use rand::Rng;

use crate::bell::BellIndex;
use crate::density::{bell_vector, Basis, DensityMatrix};
use crate::random::random_density_4;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwirlKind {
    /// Tetrahedral subgroup: any state to Werner form.
    T12,
    /// Orthorhombic group: any state to Bell-diagonal form.
    D2,
    /// Bell-diagonal to Werner form.
    Triple,
    /// `{Bx, By, Bz}`: Bell-diagonal to Werner form.
    Axes,
}

impl TwirlKind {
    pub const ALL: [TwirlKind; 4] = [TwirlKind::T12, TwirlKind::D2, TwirlKind::Triple, TwirlKind::Axes];

    /// Words over `{x, y, z}`; each letter is a bilateral π/2 rotation and
    /// a word is the matrix product in written order.
    pub fn words(self) -> &'static [&'static str] {
        match self {
            TwirlKind::T12 => &[
                "", "xx", "yy", "zz", "xy", "yz", "zx", "yx", "xyxy", "yzyz", "zxzx", "yxyx",
            ],
            TwirlKind::D2 => &["", "xx", "yy", "zz"],
            TwirlKind::Triple => &["", "xxxy", "xxxz"],
            TwirlKind::Axes => &["x", "y", "z"],
        }
    }
}

impl fmt::Display for TwirlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwirlKind::T12 => "T12",
            TwirlKind::D2 => "D2",
            TwirlKind::Triple => "TRIPLE",
            TwirlKind::Axes => "AXES",
        })
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli(axis: char) -> Matrix2<C64> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match axis {
        'x' => Matrix2::new(z, o, o, z),
        'y' => Matrix2::new(z, -i, i, z),
        'z' => Matrix2::new(o, z, z, -o),
        _ => panic!("unknown Pauli axis {axis:?}"),
    }
}

/// Single-qubit π/2 rotation `(I + iσ)/√2`.
///
/// This sign makes `Bx` send `Φ+ → iΨ+` and `Ψ+ → iΦ+`, matching the
/// phased rotation table; the opposite sign conjugates every phase.
pub fn half_pi_rotation(axis: char) -> Matrix2<C64> {
    (Matrix2::identity() + pauli(axis) * c(0.0, 1.0)) * c(FRAC_1_SQRT_2, 0.0)
}

pub fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// A bilateral operation `u ⊗ u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bilateral {
    pub word: &'static str,
    pub single: Matrix2<C64>,
}

impl Bilateral {
    pub fn from_word(word: &'static str) -> Self {
        let single = word
            .chars()
            .fold(Matrix2::identity(), |acc, a| acc * half_pi_rotation(a));
        Bilateral { word, single }
    }

    pub fn matrix(&self) -> Matrix4<C64> {
        kron2(&self.single, &self.single)
    }
}

#[derive(Clone, Debug)]
pub struct TwirlGroup {
    pub kind: TwirlKind,
    pub elements: Vec<Bilateral>,
}

pub fn twirl_group(kind: TwirlKind) -> TwirlGroup {
    TwirlGroup {
        kind,
        elements: kind.words().iter().map(|w| Bilateral::from_word(w)).collect(),
    }
}

impl TwirlGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `(1/N) Σ U† M U`, in the computational basis.
pub fn apply_twirl(m: &DensityMatrix, g: &TwirlGroup) -> DensityMatrix {
    let rho = *m.to_computational().matrix();
    let sum: Matrix4<C64> = g
        .elements
        .iter()
        .map(|e| {
            let u = e.matrix();
            u.adjoint() * rho * u
        })
        .sum();
    let avg = sum / c(g.len() as f64, 0.0);
    // Restore exact Hermiticity lost to rounding.
    let avg = (avg + avg.adjoint()) * c(0.5, 0.0);
    DensityMatrix::from_raw(avg, Basis::Computational)
}

/// Unilateral `σy` on the first qubit, which exchanges `Φ+` and `Ψ−`.
fn sigma_y_first() -> Matrix4<C64> {
    kron2(&pauli('y'), &Matrix2::identity())
}

/// Twirl that fixes `Φ+` and equalizes the other three Bell weights.
pub fn modified_twirl(m: &DensityMatrix) -> DensityMatrix {
    let s = sigma_y_first();
    let flip = |rho: &Matrix4<C64>| s * rho * s;
    let rho = flip(m.to_computational().matrix());
    let twirled = apply_twirl(&DensityMatrix::from_raw(rho, Basis::Computational), &twirl_group(TwirlKind::T12));
    DensityMatrix::from_raw(flip(twirled.matrix()), Basis::Computational)
}

/// `1 − |⟨A, B⟩|/(‖A‖‖B‖)`: zero iff the matrices agree up to a phase.
pub fn projective_distance(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    let inner: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    1.0 - inner.norm() / (a.norm() * b.norm())
}

/// Largest deviation from the Werner form relative to the singlet.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WernerResidual {
    /// Largest off-diagonal magnitude in the Bell basis.
    pub off_diagonal: f64,
    /// Spread among the three triplet weights.
    pub triplet_spread: f64,
}

pub fn werner_residual(m: &DensityMatrix, standard: BellIndex) -> WernerResidual {
    let b = m.bell_basis_matrix();
    let mut off = 0.0f64;
    for r in 0..4 {
        for col in 0..4 {
            if r != col {
                off = off.max(b[(r, col)].norm());
            }
        }
    }
    let triplet: Vec<f64> = (0..4)
        .filter(|&k| k != standard.bits() as usize)
        .map(|k| b[(k, k)].re)
        .collect();
    let hi = triplet.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = triplet.iter().copied().fold(f64::INFINITY, f64::min);
    WernerResidual {
        off_diagonal: off,
        triplet_spread: hi - lo,
    }
}

/// Outcome of twirling a batch of random states with `T12`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwirlBattery {
    pub samples: usize,
    pub max_off_diagonal: f64,
    pub max_triplet_spread: f64,
    pub max_singlet_shift: f64,
    /// Smallest `S(M_T) − S(M)`.
    pub min_entropy_gain: f64,
    pub min_eigenvalue: f64,
}

impl TwirlBattery {
    pub fn passed(&self) -> bool {
        self.max_off_diagonal < 1e-10
            && self.max_triplet_spread < 1e-10
            && self.max_singlet_shift < 1e-12
            && self.min_entropy_gain >= -1e-9
            && self.min_eigenvalue >= -1e-10
    }
}

pub fn twirl_battery<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> TwirlBattery {
    let g = twirl_group(TwirlKind::T12);
    let singlet = bell_vector(BellIndex::PSI_MINUS);
    let mut out = TwirlBattery {
        samples,
        max_off_diagonal: 0.0,
        max_triplet_spread: 0.0,
        max_singlet_shift: 0.0,
        min_entropy_gain: f64::INFINITY,
        min_eigenvalue: f64::INFINITY,
    };
    for _ in 0..samples {
        let m = DensityMatrix::from_raw(random_density_4(rng), Basis::Computational);
        let t = apply_twirl(&m, &g);
        let res = werner_residual(&t, BellIndex::PSI_MINUS);
        out.max_off_diagonal = out.max_off_diagonal.max(res.off_diagonal);
        out.max_triplet_spread = out.max_triplet_spread.max(res.triplet_spread);
        out.max_singlet_shift = out
            .max_singlet_shift
            .max((t.expectation(&singlet) - m.expectation(&singlet)).abs());
        out.min_entropy_gain = out.min_entropy_gain.min(t.entropy() - m.entropy());
        out.min_eigenvalue = t.eigenvalues().iter().copied().fold(out.min_eigenvalue, f64::min);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MaxAbs;
    use crate::density::{bell_basis, werner, BellDiagonal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell(b: BellIndex) -> nalgebra::Vector4<C64> {
        bell_vector(b)
    }

    /// `u` maps `from` to `phase · to`, for some unit phase.
    fn maps_to(u: &Matrix4<C64>, from: BellIndex, to: BellIndex, phase: C64) {
        let img = u * bell(from);
        let want = bell(to) * phase;
        assert!((img - want).norm() < 1e-12, "{from:?} -> {img} (want {want})");
    }

    #[test]
    fn rotation_table_with_phases() {
        use BellIndex as B;
        let i = c(0.0, 1.0);
        let one = c(1.0, 0.0);
        let bx = Bilateral::from_word("x").matrix();
        maps_to(&bx, B::PSI_MINUS, B::PSI_MINUS, one);
        maps_to(&bx, B::PHI_MINUS, B::PHI_MINUS, one);
        maps_to(&bx, B::PHI_PLUS, B::PSI_PLUS, i);
        maps_to(&bx, B::PSI_PLUS, B::PHI_PLUS, i);
        let by = Bilateral::from_word("y").matrix();
        maps_to(&by, B::PSI_MINUS, B::PSI_MINUS, one);
        maps_to(&by, B::PHI_MINUS, B::PSI_PLUS, -one);
        maps_to(&by, B::PHI_PLUS, B::PHI_PLUS, one);
        maps_to(&by, B::PSI_PLUS, B::PHI_MINUS, one);
        let bz = Bilateral::from_word("z").matrix();
        maps_to(&bz, B::PSI_MINUS, B::PSI_MINUS, one);
        maps_to(&bz, B::PHI_MINUS, B::PHI_PLUS, i);
        maps_to(&bz, B::PHI_PLUS, B::PHI_MINUS, i);
        maps_to(&bz, B::PSI_PLUS, B::PSI_PLUS, one);
    }

    #[test]
    fn rotations_have_order_four() {
        for a in ['x', 'y', 'z'] {
            let r = half_pi_rotation(a);
            let r4 = r * r * r * r;
            let b4 = kron2(&r4, &r4);
            assert!(projective_distance(&b4, &Matrix4::identity()) < 1e-12);
        }
    }

    #[test]
    fn group_sizes_and_unitarity() {
        let sizes = [(TwirlKind::T12, 12), (TwirlKind::D2, 4), (TwirlKind::Triple, 3), (TwirlKind::Axes, 3)];
        for (k, n) in sizes {
            let g = twirl_group(k);
            assert_eq!(g.len(), n);
            for e in &g.elements {
                let u = e.matrix();
                assert!((u.adjoint() * u - Matrix4::identity()).max_abs() < 1e-12);
                assert!((u - kron2(&e.single, &e.single)).max_abs() == 0.0);
            }
        }
    }

    #[test]
    fn t12_closes_up_to_phase() {
        let g = twirl_group(TwirlKind::T12);
        let mats: Vec<_> = g.elements.iter().map(|e| e.matrix()).collect();
        for a in &mats {
            for b in &mats {
                let p = a * b;
                let best = mats
                    .iter()
                    .map(|m| projective_distance(&p, m))
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-10);
            }
        }
        // and the elements are projectively distinct
        for (i, a) in mats.iter().enumerate() {
            for b in &mats[i + 1..] {
                assert!(projective_distance(a, b) > 1e-3);
            }
        }
    }

    #[test]
    fn d2_closes_up_to_phase() {
        let g = twirl_group(TwirlKind::D2);
        let mats: Vec<_> = g.elements.iter().map(|e| e.matrix()).collect();
        for a in &mats {
            for b in &mats {
                let p = a * b;
                assert!(mats.iter().any(|m| projective_distance(&p, m) < 1e-10));
            }
        }
    }

    #[test]
    fn singlet_is_invariant() {
        let s = DensityMatrix::from_raw(
            bell(BellIndex::PSI_MINUS) * bell(BellIndex::PSI_MINUS).adjoint(),
            Basis::Computational,
        );
        let t = apply_twirl(&s, &twirl_group(TwirlKind::T12));
        assert!((t.matrix() - s.matrix()).max_abs() < 1e-12);
    }

    // Brute-force twelve-term average compared with the Werner form built
    // from the singlet overlap.
    #[test]
    fn t12_produces_werner_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = twirl_group(TwirlKind::T12);
        for _ in 0..20 {
            let m = DensityMatrix::from_raw(random_density_4(&mut rng), Basis::Computational);
            let f = m.expectation(&bell(BellIndex::PSI_MINUS));
            let mut sum = Matrix4::zeros();
            for e in &g.elements {
                let u = e.matrix();
                sum += u.adjoint() * m.matrix() * u;
            }
            sum /= c(12.0, 0.0);
            let q = (1.0 - f) / 3.0;
            let mut expect = Matrix4::zeros();
            for b in BellIndex::ALL {
                let w = if b == BellIndex::PSI_MINUS { f } else { q };
                expect += bell(b) * bell(b).adjoint() * c(w, 0.0);
            }
            assert!((sum - expect).max_abs() < 1e-12);
            assert!((apply_twirl(&m, &g).matrix() - expect).max_abs() < 1e-12);
        }
    }

    #[test]
    fn d2_makes_bell_diagonal_and_fixes_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = twirl_group(TwirlKind::D2);
        let m = DensityMatrix::from_raw(random_density_4(&mut rng), Basis::Computational);
        let t = apply_twirl(&m, &g);
        assert!(werner_residual(&t, BellIndex::PSI_MINUS).off_diagonal < 1e-12);
        let w = BellDiagonal::new([0.4, 0.3, 0.2, 0.1]).unwrap().to_density();
        assert!((apply_twirl(&w, &g).matrix() - w.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn small_sets_equalize_bell_diagonal_triplets() {
        let w = BellDiagonal::new([0.1, 0.2, 0.3, 0.4]).unwrap().to_density();
        for k in [TwirlKind::Triple, TwirlKind::Axes] {
            let t = apply_twirl(&w, &twirl_group(k));
            let r = werner_residual(&t, BellIndex::PSI_MINUS);
            assert!(r.off_diagonal < 1e-12 && r.triplet_spread < 1e-12, "{k}: {r:?}");
            let weights = t.bell_weights();
            assert!((weights[3] - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn modified_twirl_examples() {
        let phi = BellDiagonal::new([1.0, 0.0, 0.0, 0.0]).unwrap().to_density();
        assert!((modified_twirl(&phi).matrix() - phi.matrix()).max_abs() < 1e-12);

        let w = BellDiagonal::new([0.55, 0.05, 0.15, 0.25]).unwrap();
        let t = modified_twirl(&w.to_density());
        let want = werner(0.55).unwrap().to_density();
        assert!((t.matrix() - want.matrix()).max_abs() < 1e-12);

        let g = DensityMatrix::garbage();
        assert!((modified_twirl(&g).matrix() - g.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn battery_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = twirl_battery(100, &mut rng);
        assert!(b.passed(), "{b:?}");
    }

    #[test]
    fn bell_basis_is_column_ordered_by_bits() {
        let u = bell_basis();
        for b in BellIndex::ALL {
            assert_eq!(u.column(b.bits() as usize).into_owned(), bell(b));
        }
    }
}
