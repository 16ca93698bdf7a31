//! One-way hashing and breeding at desk scale.
//!
//! Both protocols learn random subset parities of an unknown Bell string.
//! The simulators sample a true string, then track an exact posterior over
//! every candidate initial string: each candidate keeps its prior weight
//! and its current image under the measurements performed so far.

use std::fmt;

use rand::Rng;

use crate::bell::{build_parity_network, BellIndex, BellString, GateOp, SubsetIndex};
use crate::density::{shannon_entropy, BellDiagonal};
use crate::{Error, Result};

/// Largest block with an explicit posterior (`4^8` candidates).
pub const MAX_EXACT_PAIRS: usize = 8;

/// Asymptotic yield `max(0, 1 − S(W))`.
pub fn hashing_yield(w: &BellDiagonal) -> f64 {
    (1.0 - w.entropy()).max(0.0)
}

/// Default slack `δ = n^(−1/4)`.
pub fn default_delta(n: usize) -> f64 {
    (n as f64).powf(-0.25)
}

/// Rounds beyond `n·S(W)` needed to push the failure probability down:
/// `⌈2δn⌉`.
pub fn extra_rounds(n: usize, delta: f64) -> usize {
    (2.0 * delta * n as f64).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureMode {
    None,
    /// Rounds ran out with more than one candidate left.
    Ambiguous,
    /// The truth was excluded by the likely-set restriction.
    TruthOutsideCandidates,
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureMode::None => "none",
            FailureMode::Ambiguous => "ambiguous",
            FailureMode::TruthOutsideCandidates => "truth_outside_candidates",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HashingRound {
    pub round_index: usize,
    pub s: SubsetIndex,
    pub parity_observed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HashingReport {
    pub rounds: usize,
    pub identified: bool,
    pub failure_mode: FailureMode,
    /// Posterior entropy (bits) before any round, then after each round.
    pub entropy_trace: Vec<f64>,
    /// Consistent candidates before any round, then after each round.
    pub candidate_trace: Vec<usize>,
    pub history: Vec<HashingRound>,
    /// Traces are typical-set estimates rather than an exact posterior.
    pub estimated: bool,
}

impl HashingReport {
    /// Entropy removed by round `k` (1-based).
    pub fn entropy_drop(&self, k: usize) -> Option<f64> {
        Some(self.entropy_trace.get(k - 1)? - self.entropy_trace.get(k)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HashingConfig {
    /// Keep only the `2^{n(S+δ)}` most probable strings when set. The truth
    /// may then fall outside the candidate set.
    pub likely_set_delta: Option<f64>,
}

/// Posterior over initial strings.
#[derive(Clone, Debug)]
pub struct Posterior {
    pub n: usize,
    weights: Vec<f64>,
    initial: Vec<BellString>,
    images: Vec<BellString>,
}

impl Posterior {
    /// Prior `W^{⊗n}`, dropping zero-weight strings.
    pub fn prior(w: &BellDiagonal, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_EXACT_PAIRS {
            return Err(Error::TooManyPairs { n, max: MAX_EXACT_PAIRS });
        }
        let mut weights = Vec::new();
        let mut strings = Vec::new();
        for bits in 0..(1u64 << (2 * n)) {
            let x = BellString::from_bits(bits, n);
            let p: f64 = x.pairs().map(|b| w.get(b)).product();
            if p > 0.0 {
                weights.push(p);
                strings.push(x);
            }
        }
        Ok(Posterior {
            n,
            weights,
            images: strings.clone(),
            initial: strings,
        })
    }

    /// Keeps the `⌈2^{n(S+δ)}⌉` heaviest candidates.
    pub fn restrict_to_likely(&mut self, entropy: f64, delta: f64) {
        let keep = 2f64.powf(self.n as f64 * (entropy + delta)).ceil() as usize;
        if keep >= self.len() {
            return;
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.weights[b]
                .total_cmp(&self.weights[a])
                .then(self.initial[a].bits().cmp(&self.initial[b].bits()))
        });
        order.truncate(keep);
        order.sort_unstable();
        self.retain_indices(&order);
    }

    fn retain_indices(&mut self, idx: &[usize]) {
        self.weights = idx.iter().map(|&i| self.weights[i]).collect();
        self.initial = idx.iter().map(|&i| self.initial[i]).collect();
        self.images = idx.iter().map(|&i| self.images[i]).collect();
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Shannon entropy of the normalized weights.
    pub fn entropy(&self) -> f64 {
        let total: f64 = self.weights.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        let probs: Vec<f64> = self.weights.iter().map(|w| w / total).collect();
        shannon_entropy(&probs)
    }

    pub fn contains_initial(&self, x: &BellString) -> bool {
        self.initial.binary_search_by_key(&x.bits(), |s| s.bits()).is_ok()
    }

    /// True when every surviving candidate has the same current image.
    pub fn is_point_mass(&self) -> bool {
        match self.images.split_first() {
            Some((first, rest)) => rest.iter().all(|x| x == first),
            None => false,
        }
    }

    pub fn images(&self) -> &[BellString] {
        &self.images
    }

    /// Hashing update: drop candidates whose `s`-parity disagrees and map
    /// the rest through the measurement's residual map.
    pub fn update_hashing(&mut self, s: &SubsetIndex, parity: bool) -> Result<()> {
        let net = build_parity_network(s)?;
        let mut keep = Vec::with_capacity(self.len() / 2 + 1);
        for (i, x) in self.images.iter_mut().enumerate() {
            let m = net.measure(x);
            if m.parity == parity {
                *x = m.residual;
                keep.push(i);
            }
        }
        self.retain_indices(&keep);
        Ok(())
    }

    /// Breeding update: images are left alone.
    pub fn update_parity_only(&mut self, s: &SubsetIndex, parity: bool) -> Result<()> {
        let mut keep = Vec::with_capacity(self.len() / 2 + 1);
        for (i, x) in self.images.iter().enumerate() {
            if crate::bell::subset_parity(s, x)? == parity {
                keep.push(i);
            }
        }
        self.retain_indices(&keep);
        Ok(())
    }
}

/// Draws one string from `W^{⊗n}`.
pub fn sample_string<R: Rng + ?Sized>(w: &BellDiagonal, n: usize, rng: &mut R) -> BellString {
    let p = w.probs();
    let pairs: Vec<BellIndex> = (0..n)
        .map(|_| {
            let r: f64 = rng.random();
            let mut acc = 0.0;
            for (k, pk) in p.iter().enumerate() {
                acc += pk;
                if r < acc {
                    return BellIndex::from_bits(k as u8).expect("two-bit value");
                }
            }
            // rounding at the top of the range: last nonzero weight
            let last = (0..4).rev().find(|&k| p[k] > 0.0).unwrap_or(0);
            BellIndex::from_bits(last as u8).expect("two-bit value")
        })
        .collect();
    BellString::from_pairs(&pairs)
}

fn initial_posterior(w: &BellDiagonal, n: usize, config: &HashingConfig) -> Result<Posterior> {
    let mut post = Posterior::prior(w, n)?;
    if let Some(delta) = config.likely_set_delta {
        post.restrict_to_likely(w.entropy(), delta);
    }
    Ok(post)
}

fn finish(
    post: &Posterior,
    truth_initial: &BellString,
    truth_now: &BellString,
    mut report: HashingReport,
) -> HashingReport {
    let identified = post.is_point_mass();
    report.identified = identified;
    report.failure_mode = if !post.contains_initial(truth_initial) || (identified && post.images()[0] != *truth_now) {
        FailureMode::TruthOutsideCandidates
    } else if !identified {
        FailureMode::Ambiguous
    } else {
        FailureMode::None
    };
    report
}

fn empty_report(post: &Posterior) -> HashingReport {
    HashingReport {
        rounds: 0,
        identified: false,
        failure_mode: FailureMode::None,
        entropy_trace: vec![post.entropy()],
        candidate_trace: vec![post.len()],
        history: Vec::new(),
        estimated: false,
    }
}

/// Hashing with the exact posterior, stopping early once identified.
pub fn hashing_simulate<R: Rng + ?Sized>(w: &BellDiagonal, n: usize, rounds: usize, rng: &mut R) -> Result<HashingReport> {
    hashing_simulate_with(w, n, rounds, &HashingConfig::default(), rng)
}

pub fn hashing_simulate_with<R: Rng + ?Sized>(
    w: &BellDiagonal,
    n: usize,
    rounds: usize,
    config: &HashingConfig,
    rng: &mut R,
) -> Result<HashingReport> {
    if rounds > n {
        return Err(Error::TooManyRounds { rounds, available: n });
    }
    let mut post = initial_posterior(w, n, config)?;
    let x0 = sample_string(w, n, rng);
    let mut x = x0;
    let mut report = empty_report(&post);
    for k in 0..rounds {
        if post.is_point_mass() || post.is_empty() {
            break;
        }
        let s = SubsetIndex::random_nonzero(x.len(), rng);
        let m = build_parity_network(&s)?.measure(&x);
        post.update_hashing(&s, m.parity)?;
        x = m.residual;
        report.rounds += 1;
        report.history.push(HashingRound {
            round_index: k,
            s,
            parity_observed: m.parity,
        });
        report.entropy_trace.push(post.entropy());
        report.candidate_trace.push(post.len());
    }
    Ok(finish(&post, &x0, &x, report))
}

/// Hashing beyond [`MAX_EXACT_PAIRS`]: the true string is sampled and
/// measured exactly, but the candidate set is only estimated as the
/// `2^{n(S+δ)}` typical strings, halved by every round. Entropy is reported
/// as the log of that count and identification as the count reaching one;
/// the failure mode is not observable and stays `None`.
pub fn hashing_estimate<R: Rng + ?Sized>(w: &BellDiagonal, n: usize, rounds: usize, rng: &mut R) -> Result<HashingReport> {
    if n == 0 || n > crate::bell::MAX_PAIRS {
        return Err(Error::TooManyPairs {
            n,
            max: crate::bell::MAX_PAIRS,
        });
    }
    if rounds > n {
        return Err(Error::TooManyRounds { rounds, available: n });
    }
    let typical = (n as f64 * (w.entropy() + default_delta(n))).min(2.0 * n as f64);
    let mut x = sample_string(w, n, rng);
    let mut report = HashingReport {
        rounds: 0,
        identified: typical <= 0.0,
        failure_mode: FailureMode::None,
        entropy_trace: vec![typical],
        candidate_trace: vec![typical.exp2().round() as usize],
        history: Vec::new(),
        estimated: true,
    };
    for k in 0..rounds {
        if report.identified {
            break;
        }
        let s = SubsetIndex::random_nonzero(x.len(), rng);
        let m = build_parity_network(&s)?.measure(&x);
        x = m.residual;
        let bits = (typical - (k + 1) as f64).max(0.0);
        report.rounds += 1;
        report.history.push(HashingRound {
            round_index: k,
            s,
            parity_observed: m.parity,
        });
        report.entropy_trace.push(bits);
        report.candidate_trace.push(bits.exp2().round() as usize);
        report.identified = bits == 0.0;
    }
    if !report.identified {
        report.failure_mode = FailureMode::Ambiguous;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BreedingReport {
    pub hashing: HashingReport,
    pub pool_consumed: usize,
    /// `(n − pool_consumed)/n`.
    pub net_yield: f64,
    /// The working string was bit-identical after every round.
    pub string_preserved: bool,
}

/// Gates that collect `s·x` of an `n`-pair string into an ancilla `Φ+`
/// appended as pair `n`, and the preprocessing they apply first.
fn breeding_network(s: &SubsetIndex) -> (Vec<GateOp>, Vec<GateOp>) {
    let n = s.len();
    let mut pre = Vec::new();
    let mut xors = Vec::new();
    for i in 0..n {
        match s.0.get(i).bits() {
            0b00 => continue,
            0b10 => pre.push(GateOp::By(i)),
            0b11 => pre.push(GateOp::SxBx(i)),
            _ => {}
        }
        xors.push(GateOp::Bxor { source: i, target: n });
    }
    (pre, xors)
}

/// One breeding measurement: returns the parity read from the ancilla and
/// the working string after the preprocessing has been undone.
pub fn breed_round(s: &SubsetIndex, x: &BellString) -> Result<(bool, BellString)> {
    if s.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: s.len(),
        });
    }
    let (pre, xors) = breeding_network(s);
    let mut y = x.with_pair(BellIndex::PHI_PLUS);
    for g in pre.iter().chain(&xors) {
        g.apply_unchecked(&mut y);
    }
    let parity = y.get(x.len()).amplitude();
    // The preprocessing gates are involutions.
    for g in pre.iter().rev() {
        g.apply_unchecked(&mut y);
    }
    Ok((parity, y.without_pair(x.len())))
}

/// Breeding with pre-purified ancillas drawn from a pool.
pub fn breeding_simulate<R: Rng + ?Sized>(w: &BellDiagonal, n: usize, pool: usize, rng: &mut R) -> Result<BreedingReport> {
    breeding_simulate_with(w, n, pool, &HashingConfig::default(), rng)
}

pub fn breeding_simulate_with<R: Rng + ?Sized>(
    w: &BellDiagonal,
    n: usize,
    pool: usize,
    config: &HashingConfig,
    rng: &mut R,
) -> Result<BreedingReport> {
    let mut post = initial_posterior(w, n, config)?;
    let x = sample_string(w, n, rng);
    let mut report = empty_report(&post);
    let mut preserved = true;
    let mut consumed = 0;
    while !post.is_point_mass() && !post.is_empty() {
        if consumed == pool {
            return Err(Error::PoolExhausted(pool));
        }
        let s = SubsetIndex::random_nonzero(n, rng);
        let (parity, after) = breed_round(&s, &x)?;
        preserved &= after == x;
        consumed += 1;
        post.update_parity_only(&s, parity)?;
        report.history.push(HashingRound {
            round_index: report.rounds,
            s,
            parity_observed: parity,
        });
        report.rounds += 1;
        report.entropy_trace.push(post.entropy());
        report.candidate_trace.push(post.len());
    }
    let hashing = finish(&post, &x, &x, report);
    Ok(BreedingReport {
        hashing,
        pool_consumed: consumed,
        net_yield: (n as f64 - consumed as f64) / n as f64,
        string_preserved: preserved,
    })
}
