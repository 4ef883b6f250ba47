//! Monte Carlo estimate of the success probability of a POVM.
//!
//! Trials are split into fixed blocks of [`BLOCK_TRIALS`]. Block `k` draws
//! from its own Xoshiro256++ stream seeded with
//! `seed + k · 0x9E3779B97F4A7C15` (wrapping) through `seed_from_u64`, so the
//! result depends only on `(seed, trials)` and not on how blocks are spread
//! over threads. Each trial draws one `f64` for the state and one for the
//! outcome, both by inverse CDF.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::TwoSetEnsemble;
use crate::povm::Povm;
use crate::qmat::CMat;

pub const BLOCK_TRIALS: u64 = 65_536;
/// Born probabilities at least this negative are an error; smaller dips are clamped.
pub const NEGATIVE_TOL: f64 = 1e-10;
/// Largest deviation of the total probability that is silently renormalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;
const STREAM_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("Born probabilities do not form a distribution (sum {sum}, smallest {min})")]
    InvalidDistribution { sum: f64, min: f64 },
    #[error("POVM has {got} elements, ensemble has {expected} states")]
    LengthMismatch { got: usize, expected: usize },
    #[error("POVM dimension {got} differs from state dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("trials must be at least 1")]
    NoTrials,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// Born distribution `Tr(Π_i ρ)` with tiny negatives clamped and the total
/// renormalized.
pub fn born_distribution(rho: &CMat, povm: &Povm) -> Result<Vec<f64>, SimError> {
    if povm.dim() != rho.dim() {
        return Err(SimError::DimensionMismatch { got: povm.dim(), expected: rho.dim() });
    }
    let raw: Vec<f64> = povm.elements().iter().map(|el| el.trace_product(rho).re).collect();
    let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let sum: f64 = raw.iter().sum();
    if min < -NEGATIVE_TOL || (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(SimError::InvalidDistribution { sum, min });
    }
    let clamped: Vec<f64> = raw.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    Ok(clamped.into_iter().map(|x| x / total).collect())
}

/// Index `i` with probability `probs[i]` for a uniform draw `u ∈ [0, 1)`.
fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left the total just under 1; return the last outcome with weight.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Draw a measurement outcome by the Born rule.
pub fn sample_outcome(rho: &CMat, povm: &Povm, rng: &mut impl Rng) -> Result<usize, SimError> {
    let probs = born_distribution(rho, povm)?;
    Ok(inverse_cdf(&probs, rng.random::<f64>()))
}

fn block_rng(seed: u64, block: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed.wrapping_add(block.wrapping_mul(STREAM_STRIDE)))
}

/// Estimate the success probability: pick a state by its prior, measure it
/// and count a success when the outcome index equals the state index.
pub fn monte_carlo_success(e: &TwoSetEnsemble, povm: &Povm, trials: u64, seed: u64) -> Result<SimResult, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    if povm.len() != e.len() {
        return Err(SimError::LengthMismatch { got: povm.len(), expected: e.len() });
    }
    let priors = e.priors();
    let table = e.states().iter().map(|rho| born_distribution(rho, povm)).collect::<Result<Vec<_>, _>>()?;
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let successes: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            let mut hits = 0u64;
            for _ in 0..count {
                let j = inverse_cdf(&priors, rng.random::<f64>());
                let i = inverse_cdf(&table[j], rng.random::<f64>());
                hits += u64::from(i == j);
            }
            hits
        })
        .sum();
    let p_hat = successes as f64 / trials as f64;
    Ok(SimResult { trials, successes, p_hat, stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(), seed })
}
