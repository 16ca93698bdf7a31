//! Two-bit Bell-state algebra.
//!
//! Everything here works at the index level: a Bell state is a pair of
//! classical bits and gates act on those bits. Phases picked up by the
//! physical rotations are dropped; the matrix-level picture lives in
//! [`crate::density`], [`crate::twirl`] and [`crate::qecc`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::{Error, Result};

/// Largest number of pairs a packed [`BellString`] can hold.
pub const MAX_PAIRS: usize = 32;

/// One Bell state as a (phase, amplitude) bit pair.
///
/// `Φ+ = 00`, `Ψ+ = 01`, `Φ− = 10`, `Ψ− = 11`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct BellIndex(u8);

impl BellIndex {
    pub const PHI_PLUS: BellIndex = BellIndex(0b00);
    pub const PSI_PLUS: BellIndex = BellIndex(0b01);
    pub const PHI_MINUS: BellIndex = BellIndex(0b10);
    pub const PSI_MINUS: BellIndex = BellIndex(0b11);

    pub const ALL: [BellIndex; 4] = [
        Self::PHI_PLUS,
        Self::PSI_PLUS,
        Self::PHI_MINUS,
        Self::PSI_MINUS,
    ];

    pub fn new(phase: bool, amplitude: bool) -> Self {
        BellIndex(((phase as u8) << 1) | amplitude as u8)
    }

    /// Builds an index from its two-bit value `0..4`.
    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 4).then_some(BellIndex(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// High-order bit: distinguishes `+` from `−`.
    pub fn phase(self) -> bool {
        self.0 & 0b10 != 0
    }

    /// Low-order bit: distinguishes `Φ` from `Ψ`.
    pub fn amplitude(self) -> bool {
        self.0 & 0b01 != 0
    }

    pub fn symbol(self) -> &'static str {
        match self.0 {
            0 => "Φ+",
            1 => "Ψ+",
            2 => "Φ−",
            _ => "Ψ−",
        }
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (self.phase() as u8), (self.amplitude() as u8))
    }
}

/// A sequence of `n` Bell states packed into a `2n`-bit word.
///
/// Layout is pair-major with pair 0 leftmost and the phase bit before the
/// amplitude bit, so `Ψ−Φ+Φ−` is the word `110010`. The numeric value of
/// [`BellString::bits`] reads exactly like that word in binary.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct BellString {
    bits: u64,
    len: usize,
}

impl BellString {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_PAIRS, "at most {MAX_PAIRS} pairs");
        BellString { bits: 0, len }
    }

    pub fn from_pairs(pairs: &[BellIndex]) -> Self {
        let mut s = Self::zeros(pairs.len());
        for (i, &p) in pairs.iter().enumerate() {
            s.set(i, p);
        }
        s
    }

    /// Wraps a raw `2n`-bit word. Bits above `2n` are masked off.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_PAIRS, "at most {MAX_PAIRS} pairs");
        BellString {
            bits: bits & Self::mask(len),
            len,
        }
    }

    fn mask(len: usize) -> u64 {
        if len == MAX_PAIRS {
            u64::MAX
        } else {
            (1u64 << (2 * len)) - 1
        }
    }

    #[inline]
    fn shift(&self, pair: usize) -> usize {
        2 * (self.len - 1 - pair)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, pair: usize) -> BellIndex {
        BellIndex(((self.bits >> self.shift(pair)) & 0b11) as u8)
    }

    pub fn set(&mut self, pair: usize, value: BellIndex) {
        let sh = self.shift(pair);
        self.bits = (self.bits & !(0b11 << sh)) | ((value.0 as u64) << sh);
    }

    /// Bit `k` of the `2n`-bit word, counted from the left (k = 0 is the
    /// phase bit of pair 0).
    pub fn bit(&self, k: usize) -> bool {
        (self.bits >> (2 * self.len - 1 - k)) & 1 == 1
    }

    pub fn pairs(&self) -> impl Iterator<Item = BellIndex> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Number of pairs that are not `Φ+`.
    pub fn weight(&self) -> usize {
        self.pairs().filter(|p| p.0 != 0).count()
    }

    /// The string with pair `pair` deleted.
    pub fn without_pair(&self, pair: usize) -> BellString {
        let sh = self.shift(pair);
        let low = self.bits & ((1u64 << sh) - 1);
        let high = if sh + 2 >= 64 { 0 } else { self.bits >> (sh + 2) };
        BellString {
            bits: (high << sh) | low,
            len: self.len - 1,
        }
    }

    /// Appends one pair on the right.
    pub fn with_pair(&self, value: BellIndex) -> BellString {
        assert!(self.len < MAX_PAIRS);
        BellString {
            bits: (self.bits << 2) | value.0 as u64,
            len: self.len + 1,
        }
    }
}

impl fmt::Display for BellString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for BellString {
    type Err = Error;

    /// Accepts `110010`, `11,00,10` or `11 00 10`.
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '_'))
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<_>>()?;
        if !digits.len().is_multiple_of(2) {
            return Err(Error::Parse(format!("odd number of bits in {s:?}")));
        }
        if digits.len() / 2 > MAX_PAIRS {
            return Err(Error::Parse(format!("more than {MAX_PAIRS} pairs")));
        }
        let bits = digits.iter().fold(0u64, |acc, &d| (acc << 1) | d as u64);
        Ok(BellString::from_bits(bits, digits.len() / 2))
    }
}

/// A `2n`-bit mask selecting phase and amplitude bits of a [`BellString`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct SubsetIndex(pub BellString);

impl SubsetIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_zero()
    }

    /// First pair with a nonzero selector; the parity destination.
    pub fn first_selected_pair(&self) -> Option<usize> {
        (0..self.0.len()).find(|&i| self.0.get(i).bits() != 0)
    }

    /// Uniform random nonzero subset over `len` pairs.
    pub fn random_nonzero<R: Rng + ?Sized>(len: usize, rng: &mut R) -> SubsetIndex {
        assert!(len > 0);
        let mask = BellString::mask(len);
        loop {
            let bits = rng.random::<u64>() & mask;
            if bits != 0 {
                return SubsetIndex(BellString::from_bits(bits, len));
            }
        }
    }
}

impl FromStr for SubsetIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(SubsetIndex)
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Modulo-2 inner product `s·x`.
pub fn subset_parity(s: &SubsetIndex, x: &BellString) -> Result<bool> {
    if s.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: s.len(),
        });
    }
    Ok((s.0.bits & x.bits).count_ones() & 1 == 1)
}

/// Unilateral and bilateral operations that map Bell states to Bell states.
///
/// Pair indices are 0-based. The `S*` variants are unilateral π rotations,
/// the `B*` variants bilateral π/2 rotations, and `SxBx` is the composite
/// `σx·Bx`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GateOp {
    Bxor { source: usize, target: usize },
    By(usize),
    Bx(usize),
    Bz(usize),
    Sx(usize),
    Sy(usize),
    Sz(usize),
    SxBx(usize),
}

impl GateOp {
    pub fn is_bxor(&self) -> bool {
        matches!(self, GateOp::Bxor { .. })
    }

    /// Highest pair index the gate touches.
    pub fn max_index(&self) -> usize {
        match *self {
            GateOp::Bxor { source, target } => source.max(target),
            GateOp::By(i)
            | GateOp::Bx(i)
            | GateOp::Bz(i)
            | GateOp::Sx(i)
            | GateOp::Sy(i)
            | GateOp::Sz(i)
            | GateOp::SxBx(i) => i,
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateOp::Bxor { .. } => "BXOR",
            GateOp::By(_) => "BY",
            GateOp::Bx(_) => "BX",
            GateOp::Bz(_) => "BZ",
            GateOp::Sx(_) => "SX",
            GateOp::Sy(_) => "SY",
            GateOp::Sz(_) => "SZ",
            GateOp::SxBx(_) => "SXBX",
        }
    }

    fn validate(&self, len: usize) -> Result<()> {
        let check = |i: usize| {
            if i < len {
                Ok(())
            } else {
                Err(Error::PairOutOfRange { index: i, len })
            }
        };
        match *self {
            GateOp::Bxor { source, target } => {
                check(source)?;
                check(target)?;
                if source == target {
                    return Err(Error::BxorSelfLoop(source));
                }
                Ok(())
            }
            GateOp::By(i)
            | GateOp::Bx(i)
            | GateOp::Bz(i)
            | GateOp::Sx(i)
            | GateOp::Sy(i)
            | GateOp::Sz(i)
            | GateOp::SxBx(i) => check(i),
        }
    }

    /// Applies the gate in place; indices must already be validated.
    #[inline]
    pub(crate) fn apply_unchecked(&self, x: &mut BellString) {
        let single = |x: &mut BellString, i: usize, f: fn(bool, bool) -> (bool, bool)| {
            let b = x.get(i);
            let (ph, amp) = f(b.phase(), b.amplitude());
            x.set(i, BellIndex::new(ph, amp));
        };
        match *self {
            GateOp::Bxor { source, target } => {
                let s = x.get(source);
                let t = x.get(target);
                x.set(source, BellIndex::new(s.phase() ^ t.phase(), s.amplitude()));
                x.set(target, BellIndex::new(t.phase(), t.amplitude() ^ s.amplitude()));
            }
            GateOp::By(i) => single(x, i, |p, a| (a, p)),
            GateOp::Bx(i) => single(x, i, |p, a| (p, a ^ !p)),
            GateOp::Bz(i) => single(x, i, |p, a| (p ^ !a, a)),
            GateOp::Sx(i) => single(x, i, |p, a| (p, !a)),
            GateOp::Sy(i) => single(x, i, |p, a| (!p, !a)),
            GateOp::Sz(i) => single(x, i, |p, a| (!p, a)),
            GateOp::SxBx(i) => single(x, i, |p, a| (p, a ^ p)),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::Bxor { source, target } => write!(f, "BXOR {source} {target}"),
            GateOp::By(i)
            | GateOp::Bx(i)
            | GateOp::Bz(i)
            | GateOp::Sx(i)
            | GateOp::Sy(i)
            | GateOp::Sz(i)
            | GateOp::SxBx(i) => write!(f, "{} {i}", self.mnemonic()),
        }
    }
}

impl FromStr for GateOp {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| Error::Parse("empty gate line".into()))?;
        let mut index = || -> Result<usize> {
            let tok = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("missing pair index in {line:?}")))?;
            tok.parse()
                .map_err(|_| Error::Parse(format!("bad pair index {tok:?}")))
        };
        let gate = match name {
            "BXOR" => {
                let source = index()?;
                let target = index()?;
                if source == target {
                    return Err(Error::BxorSelfLoop(source));
                }
                GateOp::Bxor { source, target }
            }
            "BY" => GateOp::By(index()?),
            "BX" => GateOp::Bx(index()?),
            "BZ" => GateOp::Bz(index()?),
            "SX" => GateOp::Sx(index()?),
            "SY" => GateOp::Sy(index()?),
            "SZ" => GateOp::Sz(index()?),
            "SXBX" => GateOp::SxBx(index()?),
            other => return Err(Error::Parse(format!("unknown gate {other:?}"))),
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in {line:?}")));
        }
        Ok(gate)
    }
}

/// Parses the one-gate-per-line text format. Blank lines are skipped.
pub fn parse_gate_list(text: &str) -> Result<Vec<GateOp>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

/// Writes gates in the text format, LF-terminated.
pub fn format_gate_list(gates: &[GateOp]) -> String {
    gates.iter().map(|g| format!("{g}\n")).collect()
}

/// Applies `gate` to `x` at the index level.
pub fn apply_gate(gate: GateOp, x: &BellString) -> Result<BellString> {
    gate.validate(x.len())?;
    let mut out = *x;
    gate.apply_unchecked(&mut out);
    Ok(out)
}

/// Applies a gate sequence left to right.
pub fn apply_gates(gates: &[GateOp], x: &BellString) -> Result<BellString> {
    let mut out = *x;
    for g in gates {
        g.validate(x.len())?;
        g.apply_unchecked(&mut out);
    }
    Ok(out)
}

/// Gates that collect `s·x` into the amplitude bit of one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityNetwork {
    pub gates: Vec<GateOp>,
    pub destination: usize,
}

/// Per-pair gate moving the selected bits' parity into the amplitude bit.
fn collect_gate(selector: BellIndex, pair: usize) -> Option<GateOp> {
    match selector.bits() {
        0b10 => Some(GateOp::By(pair)),
        0b11 => Some(GateOp::SxBx(pair)),
        _ => None,
    }
}

/// Builds the parity-collection network for subset `s`.
///
/// The destination is the first pair with a nonzero selector. Every
/// selected pair first has its selected parity folded into its amplitude
/// bit (`01`: nothing, `10`: `BY`, `11`: `SXBX`), then every other
/// selected pair is BXORed into the destination.
pub fn build_parity_network(s: &SubsetIndex) -> Result<ParityNetwork> {
    let destination = s.first_selected_pair().ok_or(Error::EmptySubset)?;
    let n = s.len();
    let mut gates: Vec<GateOp> = (0..n)
        .filter_map(|i| collect_gate(s.0.get(i), i))
        .collect();
    gates.extend(
        (0..n)
            .filter(|&i| i != destination && s.0.get(i).bits() != 0)
            .map(|i| GateOp::Bxor {
                source: i,
                target: destination,
            }),
    );
    Ok(ParityNetwork { gates, destination })
}

impl ParityNetwork {
    /// Runs the network on `x`, which must have as many pairs as the subset
    /// the network was built for.
    pub fn measure(&self, x: &BellString) -> ParityMeasurement {
        let mut y = *x;
        for g in &self.gates {
            g.apply_unchecked(&mut y);
        }
        ParityMeasurement {
            parity: y.get(self.destination).amplitude(),
            residual: y.without_pair(self.destination),
        }
    }
}

/// Outcome of a subset-parity measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityMeasurement {
    pub parity: bool,
    /// Bell states of the unmeasured pairs after the network, with the
    /// destination pair removed.
    pub residual: BellString,
}

/// Runs the parity network on `x`, reads the destination amplitude bit and
/// drops the destination pair.
///
/// The residual carries the BXOR back-action on the sources' phase bits.
pub fn measure_and_backaction(s: &SubsetIndex, x: &BellString) -> Result<ParityMeasurement> {
    if s.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: s.len(),
        });
    }
    Ok(build_parity_network(s)?.measure(x))
}

/// Bilateral `z` measurement of one pair.
///
/// Returns the amplitude bit (Φ vs Ψ) and the post-measurement label,
/// whose phase bit is now uniformly random.
pub fn measure_amplitude<R: Rng + ?Sized>(b: BellIndex, rng: &mut R) -> (bool, BellIndex) {
    let amplitude = b.amplitude();
    (amplitude, BellIndex::new(rng.random(), amplitude))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bs(s: &str) -> BellString {
        s.parse().unwrap()
    }

    fn sub(s: &str) -> SubsetIndex {
        s.parse().unwrap()
    }

    #[test]
    fn layout_matches_worked_string() {
        let x = BellString::from_pairs(&[
            BellIndex::PSI_MINUS,
            BellIndex::PHI_PLUS,
            BellIndex::PHI_MINUS,
        ]);
        assert_eq!(x.bits(), 0b110010);
        assert_eq!(x.to_string(), "11,00,10");
        assert_eq!(bs("110010"), x);
        assert!(x.bit(0) && x.bit(1) && !x.bit(2) && x.bit(4));
    }

    // Rows of the unilateral / bilateral rotation tables, columns in the
    // order Ψ−, Φ−, Φ+, Ψ+.
    #[test]
    fn single_pair_tables() {
        use BellIndex as B;
        let cols = [B::PSI_MINUS, B::PHI_MINUS, B::PHI_PLUS, B::PSI_PLUS];
        let rows: [(fn(usize) -> GateOp, [BellIndex; 4]); 6] = [
            (GateOp::Sx, [B::PHI_MINUS, B::PSI_MINUS, B::PSI_PLUS, B::PHI_PLUS]),
            (GateOp::Sy, [B::PHI_PLUS, B::PSI_PLUS, B::PSI_MINUS, B::PHI_MINUS]),
            (GateOp::Sz, [B::PSI_PLUS, B::PHI_PLUS, B::PHI_MINUS, B::PSI_MINUS]),
            (GateOp::Bx, [B::PSI_MINUS, B::PHI_MINUS, B::PSI_PLUS, B::PHI_PLUS]),
            (GateOp::By, [B::PSI_MINUS, B::PSI_PLUS, B::PHI_PLUS, B::PHI_MINUS]),
            (GateOp::Bz, [B::PSI_MINUS, B::PHI_PLUS, B::PHI_MINUS, B::PSI_PLUS]),
        ];
        for (gate, expected) in rows {
            for (c, e) in cols.iter().zip(expected) {
                let out = apply_gate(gate(0), &BellString::from_pairs(&[*c])).unwrap();
                assert_eq!(out.get(0), e, "{} on {}", gate(0), c.symbol());
            }
        }
    }

    #[test]
    fn bxor_table() {
        use BellIndex as B;
        let cols = [B::PSI_MINUS, B::PHI_MINUS, B::PHI_PLUS, B::PSI_PLUS];
        // (target, [(source after, target after) per source column])
        let table = [
            (B::PSI_MINUS, [(B::PSI_PLUS, B::PHI_MINUS), (B::PHI_PLUS, B::PSI_MINUS), (B::PHI_MINUS, B::PSI_MINUS), (B::PSI_MINUS, B::PHI_MINUS)]),
            (B::PHI_MINUS, [(B::PSI_PLUS, B::PSI_MINUS), (B::PHI_PLUS, B::PHI_MINUS), (B::PHI_MINUS, B::PHI_MINUS), (B::PSI_MINUS, B::PSI_MINUS)]),
            (B::PHI_PLUS, [(B::PSI_MINUS, B::PSI_PLUS), (B::PHI_MINUS, B::PHI_PLUS), (B::PHI_PLUS, B::PHI_PLUS), (B::PSI_PLUS, B::PSI_PLUS)]),
            (B::PSI_PLUS, [(B::PSI_MINUS, B::PHI_PLUS), (B::PHI_MINUS, B::PSI_PLUS), (B::PHI_PLUS, B::PSI_PLUS), (B::PSI_PLUS, B::PHI_PLUS)]),
        ];
        let g = GateOp::Bxor { source: 0, target: 1 };
        for (target, row) in table {
            for (src, (s_after, t_after)) in cols.iter().zip(row) {
                let out = apply_gate(g, &BellString::from_pairs(&[*src, target])).unwrap();
                assert_eq!((out.get(0), out.get(1)), (s_after, t_after));
            }
        }
    }

    #[test]
    fn bxor_examples() {
        let g = GateOp::Bxor { source: 0, target: 1 };
        assert_eq!(apply_gate(g, &bs("11,00")).unwrap(), bs("11,01"));
        assert_eq!(apply_gate(g, &bs("00,00")).unwrap(), bs("00,00"));
        assert_eq!(apply_gate(g, &bs("01,10")).unwrap(), bs("11,11"));
    }

    #[test]
    fn gate_errors() {
        let x = bs("00,00");
        assert!(matches!(
            apply_gate(GateOp::By(2), &x),
            Err(Error::PairOutOfRange { index: 2, len: 2 })
        ));
        assert!(matches!(
            apply_gate(GateOp::Bxor { source: 1, target: 1 }, &x),
            Err(Error::BxorSelfLoop(1))
        ));
    }

    #[test]
    fn involutions_over_all_pairs() {
        let gates = [
            GateOp::Bxor { source: 0, target: 1 },
            GateOp::Bxor { source: 1, target: 0 },
            GateOp::By(0),
            GateOp::By(1),
            GateOp::SxBx(0),
            GateOp::SxBx(1),
            GateOp::Bx(1),
            GateOp::Bz(0),
            GateOp::Sx(0),
            GateOp::Sy(1),
            GateOp::Sz(0),
        ];
        for bits in 0..16 {
            let x = BellString::from_bits(bits, 2);
            for g in gates {
                let once = apply_gate(g, &x).unwrap();
                assert_eq!(once.len(), 2);
                assert_eq!(apply_gate(g, &once).unwrap(), x, "{g} twice on {x}");
            }
        }
    }

    #[test]
    fn phi_plus_string_is_fixed() {
        let x = BellString::zeros(3);
        for g in [
            GateOp::Bxor { source: 2, target: 0 },
            GateOp::By(1),
            GateOp::SxBx(2),
        ] {
            assert_eq!(apply_gate(g, &x).unwrap(), x);
        }
    }

    #[test]
    fn subset_parity_examples() {
        let s = SubsetIndex(BellString::from_bits(0b1101, 2));
        let x = BellString::from_bits(0b0111, 2);
        assert!(!subset_parity(&s, &x).unwrap());
        assert!(!subset_parity(&sub("0000"), &bs("1011")).unwrap());
        assert!(subset_parity(&sub("11"), &bs("10")).unwrap());
        // s = 11 against x = 11 contributes 1 + 1 = 0
        assert!(!subset_parity(&sub("00,11,01,10"), &bs("00,11,00,00")).unwrap());
        assert!(matches!(
            subset_parity(&sub("11"), &bs("1010")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn destination_is_first_selected_pair() {
        let net = build_parity_network(&sub("00,11,01,10")).unwrap();
        assert_eq!(net.destination, 1);
        assert_eq!(
            net.gates,
            vec![
                GateOp::SxBx(1),
                GateOp::By(3),
                GateOp::Bxor { source: 2, target: 1 },
                GateOp::Bxor { source: 3, target: 1 },
            ]
        );

        let single = build_parity_network(&sub("01,00")).unwrap();
        assert_eq!(single.destination, 0);
        assert!(single.gates.is_empty());

        assert_eq!(build_parity_network(&sub("00,00")), Err(Error::EmptySubset));
    }

    #[test]
    fn small_network_by_hand() {
        // s = 11,01 and x = 10,01: (1⊕0)⊕1 = 0
        let s = sub("11,01");
        let x = bs("10,01");
        let net = build_parity_network(&s).unwrap();
        let y = apply_gates(&net.gates, &x).unwrap();
        assert!(!y.get(net.destination).amplitude());
        assert!(!subset_parity(&s, &x).unwrap());
    }

    #[test]
    fn network_collects_parity_exhaustively() {
        for n in 1..=4usize {
            let words = 1u64 << (2 * n);
            for s_bits in 1..words {
                let s = SubsetIndex(BellString::from_bits(s_bits, n));
                let net = build_parity_network(&s).unwrap();
                for x_bits in 0..words {
                    let x = BellString::from_bits(x_bits, n);
                    let y = apply_gates(&net.gates, &x).unwrap();
                    assert_eq!(
                        y.get(net.destination).amplitude(),
                        subset_parity(&s, &x).unwrap(),
                        "s={s} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn backaction_examples() {
        let m = measure_and_backaction(&sub("01"), &bs("01")).unwrap();
        assert!(m.parity);
        assert!(m.residual.is_empty());

        let m = measure_and_backaction(&sub("00,11,01,10"), &BellString::zeros(4)).unwrap();
        assert!(!m.parity);
        assert_eq!(m.residual, BellString::zeros(3));
    }

    // s = 01,01 is BXOR(1 -> 0): the source's phase picks up the
    // destination's phase before the destination is measured out.
    #[test]
    fn backaction_two_pairs_exhaustive() {
        let s = sub("01,01");
        for bits in 0..16 {
            let x = BellString::from_bits(bits, 2);
            let (d, src) = (x.get(0), x.get(1));
            let m = measure_and_backaction(&s, &x).unwrap();
            assert_eq!(m.parity, d.amplitude() ^ src.amplitude());
            assert_eq!(m.parity, subset_parity(&s, &x).unwrap());
            let expect = BellIndex::new(src.phase() ^ d.phase(), src.amplitude());
            assert_eq!(m.residual, BellString::from_pairs(&[expect]));
        }
        let m = measure_and_backaction(&s, &bs("01,00")).unwrap();
        assert!(m.parity);
        assert_eq!(m.residual, bs("00"));
    }

    #[test]
    fn amplitude_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(!measure_amplitude(BellIndex::PHI_PLUS, &mut rng).0);
        assert!(measure_amplitude(BellIndex::PSI_MINUS, &mut rng).0);
        let (a, post) = measure_amplitude(BellIndex::PSI_PLUS, &mut rng);
        assert!(a && post.amplitude());
    }

    #[test]
    fn gate_list_text_round_trip() {
        let text = "BXOR 0 3\nBY 1\nBX 2\nBZ 0\nSX 4\nSY 1\nSZ 0\nSXBX 2\n";
        let gates = parse_gate_list(text).unwrap();
        assert_eq!(gates.len(), 8);
        assert_eq!(format_gate_list(&gates), text);
        assert!(parse_gate_list("BXOR 1 1").is_err());
        assert!(parse_gate_list("CNOT 0 1").is_err());
        assert!(parse_gate_list("BY").is_err());
        assert!(parse_gate_list("BY 1 2").is_err());
    }

    #[test]
    fn without_pair_and_with_pair() {
        let x = bs("11,01,10");
        assert_eq!(x.without_pair(0), bs("01,10"));
        assert_eq!(x.without_pair(1), bs("11,10"));
        assert_eq!(x.without_pair(2), bs("11,01"));
        assert_eq!(x.without_pair(1).with_pair(BellIndex::PSI_PLUS), bs("11,10,01"));
        let full = BellString::from_bits(u64::MAX, MAX_PAIRS);
        assert_eq!(full.without_pair(0).len(), MAX_PAIRS - 1);
        assert_eq!(full.without_pair(0).weight(), MAX_PAIRS - 1);
    }
}
