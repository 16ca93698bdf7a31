//! Yield and bound curves over Werner fidelity, and the correspondence
//! between Pauli channels and Bell-diagonal states.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::density::{werner, BellDiagonal};
use crate::fmt::csv;
use crate::hashing::hashing_yield;
use crate::protocols::{recurrence_iterate_from, StopRule, Variant};
use crate::{Error, Result};

/// Recurrence steps considered before switching to hashing.
pub const K_MAX: usize = 64;

/// Replaces the qubit by a uniformly random one with probability `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepolarizingChannel {
    p: f64,
}

impl DepolarizingChannel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfDomain {
                what: "depolarization probability",
                value: p,
            });
        }
        Ok(DepolarizingChannel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn as_pauli(&self) -> PauliChannel {
        let e = self.p / 4.0;
        PauliChannel {
            i: 1.0 - 3.0 * e,
            x: e,
            y: e,
            z: e,
        }
    }
}

/// Applies `I, σx, σy, σz` with the given probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliChannel {
    pub i: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PauliChannel {
    /// State obtained by sending one half of `Φ+` through the channel.
    pub fn to_state(&self) -> BellDiagonal {
        BellDiagonal::normalized([self.i, self.x, self.z, self.y])
    }
}

/// Werner state with `F = 1 − 3p/4`.
pub fn channel_to_state(c: &DepolarizingChannel) -> BellDiagonal {
    werner(1.0 - 0.75 * c.p).expect("fidelity in range")
}

/// The Pauli channel whose action on half of `Φ+` produces `w`.
pub fn state_to_channel(w: &BellDiagonal) -> PauliChannel {
    let [p00, p01, p10, p11] = w.probs();
    PauliChannel {
        i: p00,
        x: p01,
        y: p11,
        z: p10,
    }
}

/// Straight-line upper bound on the one-way yield: `min(1, max(0, 4F − 3))`.
pub fn kl_upper_bound(f: f64) -> f64 {
    (4.0 * f - 3.0).clamp(0.0, 1.0)
}

/// Best yield from `k ≤ K_MAX` recurrence steps followed by hashing.
pub fn combined_yield_from(w: &BellDiagonal, variant: Variant) -> f64 {
    let trace = match recurrence_iterate_from(w, variant, StopRule::steps(K_MAX)) {
        Ok(t) => t,
        Err(_) => return hashing_yield(w),
    };
    trace
        .steps
        .iter()
        .map(|s| s.fraction_remaining * hashing_yield(&s.p))
        .fold(hashing_yield(w), f64::max)
}

/// Combined yield from a Werner state; zero for `F ≤ ½`.
pub fn combined_yield(f: f64, variant: Variant) -> f64 {
    if f <= 0.5 {
        return 0.0;
    }
    match werner(f) {
        Ok(w) => combined_yield_from(&w, variant),
        Err(_) => 0.0,
    }
}

/// Werner fidelity at which `1 − S(W_F)` vanishes, by bisection.
pub fn hashing_threshold() -> f64 {
    let g = |f: f64| 1.0 - werner(f).expect("in range").entropy();
    let (mut lo, mut hi) = (0.75, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub f: f64,
    pub e_formation: f64,
    pub d_hash: f64,
    pub d_recur_hash: f64,
    pub d_macch_hash: f64,
    pub kl_upper: f64,
}

impl CurvePoint {
    pub fn at(f: f64) -> Result<Self> {
        let w = werner(f)?;
        Ok(CurvePoint {
            f,
            e_formation: w.entanglement_of_formation(),
            d_hash: hashing_yield(&w),
            d_recur_hash: combined_yield(f, Variant::WernerTwirl),
            d_macch_hash: combined_yield(f, Variant::Macchiavello),
            kl_upper: kl_upper_bound(f),
        })
    }
}

/// Evenly spaced fidelities, endpoints included.
pub fn linear_grid(fmin: f64, fmax: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![fmin],
        _ => (0..points)
            .map(|i| fmin + (fmax - fmin) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Fidelities evenly spaced in `log10(F − ½)`; needs `fmin > ½`.
pub fn log_grid(fmin: f64, fmax: f64, points: usize) -> Result<Vec<f64>> {
    if fmin <= 0.5 {
        return Err(Error::OutOfDomain {
            what: "log-grid lower fidelity (must exceed 1/2)",
            value: fmin,
        });
    }
    Ok(linear_grid((fmin - 0.5).log10(), (fmax - 0.5).log10(), points)
        .into_iter()
        .map(|x| 0.5 + 10f64.powf(x))
        .collect())
}

pub fn emit_curves(grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if let Some(&bad) = grid.iter().find(|&&f| !(f > 0.25 && f <= 1.0)) {
        return Err(Error::OutOfDomain {
            what: "grid fidelity (must lie in (1/4, 1])",
            value: bad,
        });
    }
    grid.par_iter().map(|&f| CurvePoint::at(f)).collect()
}

pub const CURVE_HEADER: &str = "F,E_formation,D_hash,D_recur_hash,D_macch_hash,KL_upper";

/// Writes the curve CSV; `log` appends a `log10(F − ½)` column.
pub fn write_curves_csv<W: Write>(out: &mut W, points: &[CurvePoint], log: bool) -> io::Result<()> {
    if log {
        writeln!(out, "{CURVE_HEADER},log10_F_minus_half")?;
    } else {
        writeln!(out, "{CURVE_HEADER}")?;
    }
    for p in points {
        write!(
            out,
            "{},{},{},{},{},{}",
            csv(p.f),
            csv(p.e_formation),
            csv(p.d_hash),
            csv(p.d_recur_hash),
            csv(p.d_macch_hash),
            csv(p.kl_upper)
        )?;
        if log {
            write!(out, ",{}", csv((p.f - 0.5).log10()))?;
        }
        writeln!(out)?;
    }
    Ok(())
}
