//! Numerical maximizers used to cross-check the closed forms.
//!
//! Both report a lower bound (the success probability of the POVM they found)
//! and an upper bound from a feasible dual point: with `M̂` the Hermitian part
//! of `Σ p_j Π_j ρ_j` and `ε = max(0, max_j λ_max(p_j ρ_j − M̂))`, the operator
//! `M̂ + ε I` dominates every `p_j ρ_j`, so its trace bounds every strategy.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{build_M, success_probability, CertifyError};
use crate::ensembles::TwoSetEnsemble;
use crate::povm::{Povm, PovmError};
use crate::qmat::{eig_herm, psd_inv_sqrt, CMat, QmatError, C64};

/// Eigenvalues of `L` below this fraction of the largest are dropped.
pub const PINV_CUTOFF: f64 = 1e-12;
/// Restarts from a perturbed start after `L` loses its support.
pub const MAX_RESTARTS: usize = 5;
/// Ascent iterations per restart.
pub const ASCENT_ITERS: usize = 5000;
/// The ascent stops a restart once its own gap falls below this.
pub const ASCENT_GAP: f64 = 1e-9;
const STEP_MAX: f64 = 1e3;
/// Ascent steps whose renormalized POVM misses completeness or positivity by
/// more than this are rejected; large steps amplify rounding in `S^{-1/2}`.
const STEP_VALIDITY: f64 = 1e-10;
/// Allowed dip in the lower bound between fixed-point sweeps.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("no convergence after {} iterations (gap {:.3e})", .0.iterations, .0.gap())]
    NotConverged(Box<OracleResult>),
    #[error("L lost its support {restarts} times")]
    SingularL { restarts: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Matrix(#[from] QmatError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Povm(#[from] PovmError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub povm: Povm,
    pub p_lower: f64,
    pub p_upper: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Fixed-point sweeps where the lower bound dropped by more than 1e-12.
    pub dips: usize,
}

impl OracleResult {
    pub fn gap(&self) -> f64 {
        self.p_upper - self.p_lower
    }
}

/// `(p, Tr(M̂ + ε I))` for a POVM: its success probability and a dual bound.
pub fn dual_bounds(e: &TwoSetEnsemble, povm: &Povm) -> Result<(f64, f64), OracleError> {
    let m = build_M(e, povm)?.hermitian_part();
    let p = success_probability(e, povm)?;
    let mut eps = 0.0f64;
    for r in e.weighted_states() {
        eps = eps.max(eig_herm(&(&r - &m))?.max_value());
    }
    Ok((p, m.trace().re + e.dim() as f64 * eps))
}

/// `Π ← S^{-1/2} Π S^{-1/2}` with `S = Σ Π`; any part of the space outside
/// the support of `S` is handed to the first element.
fn normalize(elements: &mut [CMat]) -> Result<bool, OracleError> {
    let d = elements[0].dim();
    let mut s = CMat::zeros(d);
    for el in elements.iter() {
        s.axpy(1.0, el);
    }
    let Some(si) = psd_inv_sqrt(&s.hermitian_part(), PINV_CUTOFF)? else { return Ok(false) };
    for el in elements.iter_mut() {
        *el = (&(&si * el) * &si).hermitian_part();
    }
    patch_support(elements);
    Ok(true)
}

fn patch_support(elements: &mut [CMat]) {
    let d = elements[0].dim();
    let mut rest = CMat::identity(d);
    for el in elements.iter() {
        rest.axpy(-1.0, el);
    }
    elements[0].axpy(1.0, &rest.hermitian_part());
}

fn is_valid_step(povm: &Povm) -> Result<bool, OracleError> {
    Ok(povm.completeness_residual() <= STEP_VALIDITY && povm.psd_deficit()? <= STEP_VALIDITY)
}

fn uniform_start(d: usize, n: usize) -> Vec<CMat> {
    vec![CMat::identity(d).scale(1.0 / n as f64); n]
}

fn random_psd(d: usize, rng: &mut impl Rng) -> CMat {
    let mut a = CMat::zeros(d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    &a.adjoint() * &a
}

/// Iterate `Π_j ← L^{-1/2} R_j Π_j R_j L^{-1/2}` with `R_j = p_j ρ_j` and
/// `L = Σ R_k Π_k R_k` from the uniform POVM until the dual gap closes.
pub fn med_fixed_point(e: &TwoSetEnsemble, max_iters: usize, gap: f64) -> Result<OracleResult, OracleError> {
    if max_iters == 0 {
        return Err(OracleError::InvalidArgument("max_iters must be at least 1".into()));
    }
    if !(gap > 0.0) {
        return Err(OracleError::InvalidArgument(format!("gap must be positive, got {gap}")));
    }
    let d = e.dim();
    let n = e.len();
    let r = e.weighted_states();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x6d65_645f_6669_7870);
    let mut restarts = 0;
    let mut pi = uniform_start(d, n);

    'restart: loop {
        let mut best: Option<(Vec<CMat>, f64)> = None;
        let mut best_upper = f64::INFINITY;
        let mut last_lower = f64::NEG_INFINITY;
        let mut dips = 0;
        for it in 1..=max_iters {
            let mut l = CMat::zeros(d);
            for (rj, pj) in r.iter().zip(&pi) {
                l.axpy(1.0, &(&(rj * pj) * rj));
            }
            let Some(s) = psd_inv_sqrt(&l.hermitian_part(), PINV_CUTOFF)? else {
                restarts += 1;
                if restarts > MAX_RESTARTS {
                    return Err(OracleError::SingularL { restarts: MAX_RESTARTS });
                }
                pi = uniform_start(d, n);
                for el in pi.iter_mut() {
                    el.axpy(1e-3, &random_psd(d, &mut rng));
                }
                normalize(&mut pi)?;
                continue 'restart;
            };
            for (rj, pj) in r.iter().zip(pi.iter_mut()) {
                *pj = (&(&(&(&s * rj) * &*pj) * rj) * &s).hermitian_part();
            }
            patch_support(&mut pi);

            let povm = Povm::new(pi.clone(), e.n())?;
            let (lower, upper) = dual_bounds(e, &povm)?;
            if lower < last_lower - MONOTONE_SLACK {
                dips += 1;
            }
            last_lower = lower;
            best_upper = best_upper.min(upper);
            if best.as_ref().is_none_or(|(_, b)| lower > *b) {
                best = Some((pi.clone(), lower));
            }
            let (elements, p_lower) = best.clone().expect("set above");
            if best_upper - p_lower <= gap || it == max_iters {
                let result = OracleResult {
                    povm: Povm::new(elements, e.n())?,
                    p_lower,
                    p_upper: best_upper.max(p_lower),
                    iterations: it,
                    converged: best_upper - p_lower <= gap,
                    dips,
                };
                return if result.converged { Ok(result) } else { Err(OracleError::NotConverged(Box::new(result))) };
            }
        }
        unreachable!("the last iteration always returns");
    }
}

/// Multiplicative ascent from random POVMs `S^{-1/2} A†A S^{-1/2}`: each step
/// applies `(I + t G_j) Π_j (I + t G_j)` with `G_j = R_j − M̂`, renormalizes and
/// adapts `t`. Deterministic for a given seed.
pub fn random_restart_ascent(e: &TwoSetEnsemble, restarts: usize, seed: u64) -> Result<OracleResult, OracleError> {
    if restarts == 0 {
        return Err(OracleError::InvalidArgument("restarts must be at least 1".into()));
    }
    let d = e.dim();
    let n = e.len();
    let r = e.weighted_states();
    let id = CMat::identity(d);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut best: Option<OracleResult> = None;
    let mut total_iters = 0;

    for _ in 0..restarts {
        let mut pi: Vec<CMat> = (0..n).map(|_| random_psd(d, &mut rng)).collect();
        if !normalize(&mut pi)? || !is_valid_step(&Povm::new(pi.clone(), e.n())?)? {
            pi = uniform_start(d, n);
        }
        let mut povm = Povm::new(pi.clone(), e.n())?;
        let (mut p, mut upper) = dual_bounds(e, &povm)?;
        let mut t = 1.0;
        for it in 0..ASCENT_ITERS {
            total_iters += 1;
            let m = build_M(e, &povm)?.hermitian_part();
            let mut next: Vec<CMat> = r
                .iter()
                .zip(&pi)
                .map(|(rj, pj)| {
                    let mut step = id.clone();
                    step.axpy(t, &(rj - &m));
                    (&(&step * pj) * &step).hermitian_part()
                })
                .collect();
            let ok = normalize(&mut next)?;
            let cand = Povm::new(next.clone(), e.n())?;
            let ok = ok && is_valid_step(&cand)?;
            let pn = success_probability(e, &cand)?;
            if ok && pn >= p {
                pi = next;
                povm = cand;
                p = pn;
                t = (t * 1.5).min(STEP_MAX);
            } else {
                t *= 0.5;
            }
            if it % 20 == 0 {
                upper = upper.min(dual_bounds(e, &povm)?.1);
                if upper - p < ASCENT_GAP {
                    break;
                }
            }
        }
        upper = upper.min(dual_bounds(e, &povm)?.1);
        let better = best.as_ref().is_none_or(|b| p > b.p_lower);
        let upper_all = best.as_ref().map_or(upper, |b| b.p_upper.min(upper));
        if better {
            best = Some(OracleResult { povm, p_lower: p, p_upper: upper_all, iterations: 0, converged: false, dips: 0 });
        } else if let Some(b) = best.as_mut() {
            b.p_upper = upper_all;
        }
    }
    let mut out = best.expect("at least one restart");
    out.p_upper = out.p_upper.max(out.p_lower);
    out.iterations = total_iters;
    out.converged = out.gap() <= ASCENT_GAP;
    Ok(out)
}
