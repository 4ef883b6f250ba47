//! Numerical certificate for the necessary-and-sufficient optimality
//! conditions of minimum-error discrimination.
//!
//! For a POVM `{Π_j}` with claimed value `p`, form `M = Σ p_j Π_j ρ_j`. The
//! POVM is optimal iff `M` is Hermitian, `M ⪰ p_j ρ_j` for every `j` and
//! `Tr((M − p_j ρ_j) Π_j) = 0`. Then `K = M` is dual feasible with `Tr K = p`,
//! which bounds every other strategy.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blochdirac::GammaSet;
use crate::ensembles::TwoSetEnsemble;
use crate::povm::{Povm, PovmError};
use crate::qmat::{min_eigenvalue, CMat, QmatError};
use crate::tolerances::Tolerances;

/// `p − p_j` below this counts as the degenerate `Π = I` situation.
pub const DEGENERATE_GAP: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("POVM has {got} elements, ensemble has {expected} states")]
    LengthMismatch { got: usize, expected: usize },
    #[error("POVM split {got} differs from the ensemble's first-set size {expected}")]
    SplitMismatch { got: usize, expected: usize },
    #[error("POVM dimension {got} differs from ensemble dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Matrix(#[from] QmatError),
    #[error(transparent)]
    Povm(#[from] PovmError),
}

fn check_shapes(e: &TwoSetEnsemble, p: &Povm) -> Result<(), CertifyError> {
    if p.len() != e.len() {
        return Err(CertifyError::LengthMismatch { got: p.len(), expected: e.len() });
    }
    if p.split() != e.n() {
        return Err(CertifyError::SplitMismatch { got: p.split(), expected: e.n() });
    }
    if p.dim() != e.dim() {
        return Err(CertifyError::DimensionMismatch { got: p.dim(), expected: e.dim() });
    }
    Ok(())
}

/// `p = η Σ Tr(ρ_j Π_j) + η' Σ Tr(ρ'_j Π'_j)`.
pub fn success_probability(e: &TwoSetEnsemble, povm: &Povm) -> Result<f64, CertifyError> {
    check_shapes(e, povm)?;
    Ok(e.weighted_states()
        .iter()
        .zip(povm.elements())
        .map(|(r, pi)| r.trace_product(pi).re)
        .sum())
}

/// `M = Σ p_j Π_j ρ_j` (not symmetrized).
#[allow(non_snake_case)]
pub fn build_M(e: &TwoSetEnsemble, povm: &Povm) -> Result<CMat, CertifyError> {
    check_shapes(e, povm)?;
    let mut m = CMat::zeros(e.dim());
    for (r, pi) in e.weighted_states().iter().zip(povm.elements()) {
        m.axpy(1.0, &(pi * r));
    }
    Ok(m)
}

/// Conjugate states `τ_j = (M − p_j ρ_j) / (p − p_j)`. A set whose prior is
/// within [`DEGENERATE_GAP`] of `p` gets `None` entries and a degenerate flag.
#[derive(Debug, Clone)]
pub struct ConjugateStates {
    pub tau: Vec<Option<CMat>>,
    pub tau_prime: Vec<Option<CMat>>,
    pub degenerate_first: bool,
    pub degenerate_second: bool,
}

impl ConjugateStates {
    pub fn is_degenerate(&self) -> bool {
        self.degenerate_first || self.degenerate_second
    }
}

pub fn conjugate_states(m: &CMat, e: &TwoSetEnsemble, p: f64) -> ConjugateStates {
    let mh = m.hermitian_part();
    let (first, second) = crate::ensembles::make_states(e);
    let build = |states: &[CMat], prior: f64| -> (Vec<Option<CMat>>, bool) {
        let gap = p - prior;
        if gap.abs() <= DEGENERATE_GAP {
            return (vec![None; states.len()], true);
        }
        let taus = states
            .iter()
            .map(|rho| {
                let mut t = mh.clone();
                t.axpy(-prior, rho);
                Some(t.scale(1.0 / gap))
            })
            .collect();
        (taus, false)
    };
    let (tau, degenerate_first) = build(&first, e.eta());
    let (tau_prime, degenerate_second) = build(&second, e.eta_prime());
    ConjugateStates { tau, tau_prime, degenerate_first, degenerate_second }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateStatus {
    Certified,
    Rejected,
}

/// Named residuals; [`Residuals::entries`] yields them with their report keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖Σ Π − I‖`
    pub completeness: f64,
    /// Largest negative eigenvalue magnitude over the POVM elements.
    pub povm_psd: f64,
    /// Largest negative eigenvalue magnitude over the conjugate states and
    /// over every `M − p_j ρ_j`.
    pub tau_psd: f64,
    /// `max |Tr τ_j − 1|`
    pub tau_trace: f64,
    /// `max |(p − p_j) Tr(τ_j Π_j)|`
    pub slackness: f64,
    /// `max ‖M − U_j M U_j†‖` over both sets; reported, not gating.
    pub m_invariance: f64,
    /// `max(|p − P_succ|, |Tr M − p|)`
    pub p_consistency: f64,
    /// `‖M − M†‖`
    pub m_hermiticity: f64,
}

impl Residuals {
    pub const KEYS: [&'static str; 8] = [
        "completeness",
        "povm_psd",
        "tau_psd",
        "tau_trace",
        "slackness",
        "M_invariance",
        "p_consistency",
        "M_hermiticity",
    ];

    pub fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("completeness", self.completeness),
            ("povm_psd", self.povm_psd),
            ("tau_psd", self.tau_psd),
            ("tau_trace", self.tau_trace),
            ("slackness", self.slackness),
            ("M_invariance", self.m_invariance),
            ("p_consistency", self.p_consistency),
            ("M_hermiticity", self.m_hermiticity),
        ]
    }

    /// Names of the gating residuals above their limits.
    pub fn failures(&self, tol: &Tolerances) -> Vec<&'static str> {
        let limits = [
            ("completeness", self.completeness, tol.certificate),
            ("povm_psd", self.povm_psd, tol.povm_psd),
            ("tau_psd", self.tau_psd, tol.certificate),
            ("tau_trace", self.tau_trace, tol.certificate),
            ("slackness", self.slackness, tol.certificate),
            ("p_consistency", self.p_consistency, tol.certificate),
            ("M_hermiticity", self.m_hermiticity, tol.certificate),
        ];
        limits
            .iter()
            .filter(|(_, v, lim)| !(v <= lim))
            .map(|(k, _, _)| *k)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct OptimalityCertificate {
    pub p: f64,
    pub M: CMat,
    /// Conjugate states of the first set; empty when that set is degenerate.
    pub tau: Vec<CMat>,
    pub tau_prime: Vec<CMat>,
    /// `Tr M / d`, the identity coefficient of `M`.
    pub alpha: f64,
    /// Generator coefficients `Tr(M γ_i) / 2^m`; filled by [`attach_bloch_projection`](Self::attach_bloch_projection).
    pub beta: Vec<f64>,
    /// Bloch radii of the conjugate states, when a gamma set is attached.
    pub c: Vec<f64>,
    pub c_prime: Vec<f64>,
    pub residuals: Residuals,
    pub status: CertificateStatus,
    pub degenerate: bool,
    pub failed: Vec<String>,
}

impl OptimalityCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }

    /// `Certified`, `Certified-Degenerate` or `Rejected`.
    pub fn status_label(&self) -> &'static str {
        match (self.status, self.degenerate) {
            (CertificateStatus::Certified, false) => "Certified",
            (CertificateStatus::Certified, true) => "Certified-Degenerate",
            (CertificateStatus::Rejected, _) => "Rejected",
        }
    }

    /// Fill `beta` and the conjugate radii from a gamma set of matching dimension.
    pub fn attach_bloch_projection(&mut self, g: &GammaSet) {
        if g.dim() != self.M.dim() {
            return;
        }
        self.beta = g.components(&self.M.hermitian_part());
        let radius = |t: &CMat| {
            // Tr(τ γ_i) = c m_i for τ = (I + c m·γ)/2^m.
            g.components(t).iter().map(|x| (x * g.dim() as f64).powi(2)).sum::<f64>().sqrt()
        };
        self.c = self.tau.iter().map(radius).collect();
        self.c_prime = self.tau_prime.iter().map(radius).collect();
    }
}

impl fmt::Display for OptimalityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status = {}", self.status_label())?;
        writeln!(f, "p = {:.12}", self.p)?;
        for (k, v) in self.residuals.entries() {
            // Adding zero turns a negative zero into a plain zero.
            writeln!(f, "{k} = {:.6e}", v + 0.0)?;
        }
        if !self.failed.is_empty() {
            writeln!(f, "failed = {}", self.failed.join(","))?;
        }
        Ok(())
    }
}

pub fn certificate(
    e: &TwoSetEnsemble,
    povm: &Povm,
    p: f64,
    tol: &Tolerances,
) -> Result<OptimalityCertificate, CertifyError> {
    check_shapes(e, povm)?;
    let d = e.dim();
    let m = build_M(e, povm)?;
    let mh = m.hermitian_part();
    let m_hermiticity = m.hermiticity_residual();
    let p_succ = success_probability(e, povm)?;
    let trace_m = m.trace().re;

    let completeness = povm.completeness_residual();
    let povm_psd = povm.psd_deficit()?;

    let conj = conjugate_states(&m, e, p);
    let (first, second) = crate::ensembles::make_states(e);
    let mut tau_psd = 0.0f64;
    let mut tau_trace = 0.0f64;
    let mut slackness = 0.0f64;
    let groups = [
        (&first, &conj.tau, e.eta(), povm.first_set()),
        (&second, &conj.tau_prime, e.eta_prime(), povm.second_set()),
    ];
    for (states, taus, prior, elements) in groups {
        for ((rho, tau), pi) in states.iter().zip(taus.iter()).zip(elements) {
            let mut gap_op = mh.clone();
            gap_op.axpy(-prior, rho);
            slackness = slackness.max(gap_op.trace_product(pi).re.abs());
            // `M ⪰ p_j ρ_j` is checked directly: below the prior, τ_j divides by
            // a negative gap and a positive τ_j would hide an infeasible `M`.
            tau_psd = tau_psd.max(-min_eigenvalue(&gap_op)?);
            if let Some(t) = tau {
                tau_psd = tau_psd.max(-min_eigenvalue(t)?);
                tau_trace = tau_trace.max((t.trace().re - 1.0).abs());
            }
        }
    }

    let m_invariance = e
        .all_unitaries()
        .map(|u| m.conjugate_by(u).distance(&m))
        .fold(0.0, f64::max);
    let p_consistency = (p - p_succ).abs().max((trace_m - p).abs());

    let residuals = Residuals {
        completeness,
        povm_psd,
        tau_psd,
        tau_trace,
        slackness,
        m_invariance,
        p_consistency,
        m_hermiticity,
    };
    let failed: Vec<String> = residuals.failures(tol).into_iter().map(String::from).collect();
    let status = if failed.is_empty() { CertificateStatus::Certified } else { CertificateStatus::Rejected };
    let unwrap_all = |v: Vec<Option<CMat>>| v.into_iter().flatten().collect::<Vec<_>>();
    Ok(OptimalityCertificate {
        p,
        alpha: trace_m / d as f64,
        M: m,
        tau: unwrap_all(conj.tau),
        tau_prime: unwrap_all(conj.tau_prime),
        beta: Vec::new(),
        c: Vec::new(),
        c_prime: Vec::new(),
        residuals,
        status,
        degenerate: conj.degenerate_first || conj.degenerate_second,
        failed,
    })
}
