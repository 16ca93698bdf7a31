//! Two-way purification: the recurrence step and its iterations, and a
//! state-vector simulation of direct purification of a non-Bell-diagonal
//! mixture.

use std::fmt;
use std::str::FromStr;

use nalgebra::{SVector, Vector4};
use rand::Rng;

use crate::bell::BellIndex;
use crate::density::{bell_vector, BellDiagonal};
use crate::{Error, Result, C64};

/// One round of the recurrence method on a Bell-diagonal pair of copies.
///
/// Returns the state of the kept source pairs and the probability that a
/// pair of copies passes.
pub fn recurrence_step(p: &BellDiagonal) -> Result<(BellDiagonal, f64)> {
    let [p00, p01, p10, p11] = p.probs();
    let pass = p00 * p00 + p01 * p01 + p10 * p10 + p11 * p11 + 2.0 * p00 * p10 + 2.0 * p01 * p11;
    if pass <= 0.0 {
        return Err(Error::ZeroPassProbability);
    }
    let next = [
        (p00 * p00 + p10 * p10) / pass,
        (p01 * p01 + p11 * p11) / pass,
        2.0 * p00 * p10 / pass,
        2.0 * p01 * p11 / pass,
    ];
    Ok((BellDiagonal::normalized(next), pass))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Re-twirl to Werner form after every step.
    WernerTwirl,
    /// Exchange the `Φ−` and `Ψ−` weights after every step.
    Macchiavello,
}

impl Variant {
    pub fn apply(self, p: &BellDiagonal) -> BellDiagonal {
        let [p00, p01, p10, p11] = p.probs();
        match self {
            Variant::WernerTwirl => {
                let q = (1.0 - p00) / 3.0;
                BellDiagonal::normalized([p00, q, q, q])
            }
            Variant::Macchiavello => BellDiagonal::normalized([p00, p01, p11, p10]),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::WernerTwirl => "twirl",
            Variant::Macchiavello => "macchiavello",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "twirl" | "werner" | "werner_twirl" => Ok(Variant::WernerTwirl),
            "macchiavello" | "macch" => Ok(Variant::Macchiavello),
            _ => Err(Error::Parse(format!("unknown variant {s:?}"))),
        }
    }
}

/// Iterate until the fidelity reaches `target` or `max_steps` steps ran.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub target: f64,
    pub max_steps: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            target: 1.0 - 1e-6,
            max_steps: 64,
        }
    }
}

impl StopRule {
    /// Runs exactly `steps` steps.
    pub fn steps(steps: usize) -> Self {
        StopRule {
            target: f64::INFINITY,
            max_steps: steps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceStep {
    pub p: BellDiagonal,
    pub p_pass: f64,
    pub fraction_remaining: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceTrace {
    pub initial: BellDiagonal,
    pub steps: Vec<RecurrenceStep>,
}

impl RecurrenceTrace {
    pub fn final_state(&self) -> BellDiagonal {
        self.steps.last().map_or(self.initial, |s| s.p)
    }

    pub fn fidelities(&self) -> Vec<f64> {
        std::iter::once(self.initial.fidelity())
            .chain(self.steps.iter().map(|s| s.p.fidelity()))
            .collect()
    }
}

/// Iterates the recurrence step from an arbitrary Bell-diagonal state.
pub fn recurrence_iterate_from(p: &BellDiagonal, variant: Variant, stop: StopRule) -> Result<RecurrenceTrace> {
    let mut steps = Vec::new();
    let mut cur = *p;
    let mut fraction = 1.0;
    while cur.fidelity() < stop.target && steps.len() < stop.max_steps {
        let (next, pass) = recurrence_step(&cur)?;
        fraction *= pass / 2.0;
        cur = variant.apply(&next);
        steps.push(RecurrenceStep {
            p: cur,
            p_pass: pass,
            fraction_remaining: fraction,
        });
    }
    Ok(RecurrenceTrace { initial: *p, steps })
}

/// Iterates from a Werner state of fidelity `f0 ∈ (½, 1]`.
pub fn recurrence_iterate(f0: f64, variant: Variant, stop: StopRule) -> Result<RecurrenceTrace> {
    if !(f0 > 0.5 && f0 <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "initial fidelity (must lie in (1/2, 1])",
            value: f0,
        });
    }
    recurrence_iterate_from(&crate::density::werner(f0)?, variant, stop)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectPurifyResult {
    pub trials: u64,
    pub successes: u64,
    pub estimated_success_prob: f64,
    /// Kept sources per input pair.
    pub estimated_yield: f64,
    /// Worst overlap of a kept source with `Ψ+`; 1 when nothing was kept.
    pub min_survivor_fidelity: f64,
}

impl DirectPurifyResult {
    /// Binomial standard error of the success probability.
    pub fn success_sigma(&self) -> f64 {
        let p = self.estimated_success_prob;
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

type State16 = SVector<C64, 16>;

fn up_up() -> Vector4<C64> {
    Vector4::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
}

/// Qubit order `A1 B1 A2 B2`, first most significant.
fn join(source: &Vector4<C64>, target: &Vector4<C64>) -> State16 {
    State16::from_fn(|k, _| source[k >> 2] * target[k & 3])
}

/// Both parties apply a CNOT from their source qubit to their target qubit.
fn bilateral_cnot(psi: &State16) -> State16 {
    State16::from_fn(|k, _| {
        let a1 = (k >> 3) & 1;
        let b1 = (k >> 2) & 1;
        psi[k ^ (a1 << 1) ^ b1]
    })
}

/// Outcome probabilities for the target pair measured in `z`.
fn target_outcomes(psi: &State16) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, a) in psi.iter().enumerate() {
        out[k & 3] += a.norm_sqr();
    }
    out
}

/// Normalized source state given target outcome `t`.
fn collapse_source(psi: &State16, t: usize) -> Vector4<C64> {
    let v = Vector4::from_fn(|s, _| psi[(s << 2) | t]);
    let n = v.norm();
    v / C64::new(n, 0.0)
}

const DOWN_DOWN: usize = 0b11;

/// Exact success probability and kept-source fidelity to `Ψ+` for the
/// mixture `(1−p)|↑↑⟩⟨↑↑| + p|Ψ+⟩⟨Ψ+|`, by enumerating the four source and
/// target combinations.
pub fn direct_purify_exact(p: f64) -> (f64, f64) {
    let psi_plus = bell_vector(BellIndex::PSI_PLUS);
    let comps = [(1.0 - p, up_up()), (p, psi_plus)];
    let mut success = 0.0;
    let mut fid_weighted = 0.0;
    for (ws, s) in &comps {
        for (wt, t) in &comps {
            let w = ws * wt;
            if w == 0.0 {
                continue;
            }
            let out = bilateral_cnot(&join(s, t));
            let pdd = target_outcomes(&out)[DOWN_DOWN];
            if pdd > 0.0 {
                let kept = collapse_source(&out, DOWN_DOWN);
                success += w * pdd;
                fid_weighted += w * pdd * psi_plus.dotc(&kept).norm_sqr();
            }
        }
    }
    let fidelity = if success > 0.0 { fid_weighted / success } else { 1.0 };
    (success, fidelity)
}

/// Monte Carlo over `n_pairs / 2` source–target trials.
pub fn direct_purify_sim<R: Rng + ?Sized>(p: f64, n_pairs: u64, rng: &mut R) -> Result<DirectPurifyResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfDomain {
            what: "Ψ+ weight",
            value: p,
        });
    }
    if !n_pairs.is_multiple_of(2) {
        return Err(Error::InvalidState(format!("pair count {n_pairs} is odd")));
    }
    let psi_plus = bell_vector(BellIndex::PSI_PLUS);
    let draw = |rng: &mut R| if rng.random::<f64>() < p { psi_plus } else { up_up() };
    let trials = n_pairs / 2;
    let mut successes = 0u64;
    let mut min_fid = 1.0f64;
    for _ in 0..trials {
        let s = draw(rng);
        let t = draw(rng);
        let out = bilateral_cnot(&join(&s, &t));
        let probs = target_outcomes(&out);
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let mut outcome = 3;
        for (k, q) in probs.iter().enumerate() {
            acc += q;
            if r < acc {
                outcome = k;
                break;
            }
        }
        if outcome == DOWN_DOWN && probs[DOWN_DOWN] > 0.0 {
            successes += 1;
            let kept = collapse_source(&out, DOWN_DOWN);
            min_fid = min_fid.min(psi_plus.dotc(&kept).norm_sqr());
        }
    }
    let prob = if trials > 0 { successes as f64 / trials as f64 } else { 0.0 };
    Ok(DirectPurifyResult {
        trials,
        successes,
        estimated_success_prob: prob,
        estimated_yield: prob / 2.0,
        min_survivor_fidelity: min_fid,
    })
}
