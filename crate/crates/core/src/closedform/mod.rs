//! Closed-form minimum-error solvers.
//!
//! Each solver proposes one or more candidate `(p, POVM)` pairs, certifies every
//! candidate against the optimality conditions and returns the certified one
//! with the largest value. Candidates are tried in a fixed order; equal values
//! keep the earliest and report the rest as alternatives.

mod bloch;
mod irreducible;
mod mqubit;
mod qubit;
mod special;
pub mod weights;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blochdirac::{BlochError, GammaSet};
use crate::certify::{certificate, CertifyError, OptimalityCertificate};
use crate::ensembles::{irreducibility_test, EnsembleError, SetLabel, TwoSetEnsemble};
use crate::povm::{Povm, PovmError};
use crate::qmat::QmatError;
use crate::tolerances::Tolerances;

pub use bloch::{segment_dual, DualPoint};
pub use irreducible::{solve_irreducible, solve_mqubit_irreducible};
pub use mqubit::{
    corrected_coefficients, printed_coefficients, solve_mqubit_reducible, CoefficientAudit, FrameDecomposition,
};
pub use qubit::{qubit_coefficients, shared_axis_frame, solve_qubit_any_axis, solve_qubit_two_sets};
pub use special::{solve_special_case, SpecialCase, SpecialRule};
pub use weights::{recover_weights, WeightConstraintSystem, WeightError};

/// Values closer than this are the same optimum.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Irreducible,
    QubitCase(u8),
    Special { case: u8, rule: SpecialRule },
    MQubitIrreducible,
    MQubitReducible,
    /// `Π = I` on one state, zero elsewhere.
    Degenerate,
    /// A special-case input answered by the general qubit solver.
    Fallback(Box<Branch>),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Irreducible => f.write_str("Irreducible"),
            Branch::QubitCase(k) => write!(f, "QubitCase{k}"),
            Branch::Special { case, rule } => write!(f, "Special{case}/{rule}"),
            Branch::MQubitIrreducible => f.write_str("MQubitIrred"),
            Branch::MQubitReducible => f.write_str("MQubitRed"),
            Branch::Degenerate => f.write_str("Degenerate-Π=I"),
            Branch::Fallback(inner) => write!(f, "Fallback/{inner}"),
        }
    }
}

/// How a candidate's value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Printed closed-form expression.
    Printed,
    /// Bisection on the two unit-norm conditions of the dual.
    Derived,
    /// Dual optimum at one set's invariant point.
    Vertex,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Printed => "printed",
            Route::Derived => "derived",
            Route::Vertex => "vertex",
        })
    }
}

/// Coefficients of `4A p² + 4B p + C = 0` with roots `(−B ± √(B² − AC)) / 2A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Root used for the candidate, if any root was admissible.
    pub chosen: Option<f64>,
    /// The other root, when real.
    pub discarded: Option<f64>,
}

impl Quadratic {
    /// Roots, larger first. A double root is returned once; a linear
    /// equation (|A| negligible) gives `−C / 4B`.
    pub fn roots(a: f64, b: f64, c: f64) -> Vec<f64> {
        let scale = b.abs().max(c.abs());
        if a.abs() < 1e-12 * scale {
            return if b != 0.0 { vec![-c / (4.0 * b)] } else { Vec::new() };
        }
        let mut disc = b * b - a * c;
        if disc < 0.0 {
            if disc > -1e-12 {
                disc = 0.0;
            } else {
                return Vec::new();
            }
        }
        let s = disc.sqrt();
        let r1 = (-b + s) / (2.0 * a);
        let r2 = (-b - s) / (2.0 * a);
        if s == 0.0 {
            vec![r1]
        } else if r1 >= r2 {
            vec![r1, r2]
        } else {
            vec![r2, r1]
        }
    }
}

/// One candidate as tried by a solver, kept for diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub branch: String,
    pub route: Option<Route>,
    pub p: f64,
    pub certified: bool,
    /// Failing residual keys, or why no POVM could be assembled.
    pub detail: String,
}

impl fmt::Display for CandidateSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} p={:.12}", self.branch, self.p)?;
        if let Some(r) = self.route {
            write!(f, " route={r}")?;
        }
        write!(f, " {}", if self.certified { "certified" } else { "rejected" })?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub p_opt: f64,
    pub branch: Branch,
    pub route: Option<Route>,
    pub povm: Povm,
    pub certificate: OptimalityCertificate,
    pub quadratic: Option<Quadratic>,
    /// Other certified candidates with the same value.
    pub alternatives: Vec<(Branch, f64)>,
    /// Every candidate that was tried.
    pub candidates: Vec<CandidateSummary>,
    /// Observations worth surfacing, such as printed formulas that disagree
    /// with the certified optimum.
    pub findings: Vec<String>,
    pub audit: Option<CoefficientAudit>,
    pub frame: Option<FrameDecomposition>,
}

impl SolveReport {
    pub fn status_label(&self) -> &'static str {
        self.certificate.status_label()
    }
}

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("{set} set is not irreducible (commutant dimension {commutant_dim})")]
    NotIrreducible { set: SetLabel, commutant_dim: usize },
    #[error("no nonnegative weights complete the {branch} POVM: {source}")]
    WeightInfeasible { branch: String, source: WeightError },
    #[error("no candidate branch certifies:\n{}", format_candidates(.candidates))]
    NoBranchCertifies { candidates: Vec<CandidateSummary> },
    #[error("unsupported geometry: {0}")]
    GeometryUnsupported(String),
    #[error("printed branch conditions overlap: {first} gives {first_p}, {second} gives {second_p}")]
    ConditionAmbiguous { first: String, first_p: f64, second: String, second_p: f64 },
    #[error("printed coefficients give p = {printed:?}, derived route gives p = {derived}")]
    CoefficientMismatch { printed: Option<f64>, derived: f64 },
    #[error("closed forms disagree: {0}")]
    IdentityMismatch(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Matrix(#[from] QmatError),
}

fn format_candidates(c: &[CandidateSummary]) -> String {
    if c.is_empty() {
        return "  (no candidates generated)".into();
    }
    c.iter().map(|s| format!("  {s}")).collect::<Vec<_>>().join("\n")
}

/// A proposed solution before selection.
pub(crate) struct Candidate {
    pub branch: Branch,
    pub route: Option<Route>,
    pub p: f64,
    pub povm: Result<Povm, String>,
    pub quadratic: Option<Quadratic>,
}

impl Candidate {
    pub fn new(branch: Branch, route: Option<Route>, p: f64, povm: Result<Povm, String>) -> Self {
        Self { branch, route, p, povm, quadratic: None }
    }
}

pub(crate) struct Selection {
    pub report: Option<SolveReport>,
    pub summaries: Vec<CandidateSummary>,
}

/// Certify every candidate and keep the best certified one.
pub(crate) fn select(
    e: &TwoSetEnsemble,
    candidates: Vec<Candidate>,
    gammas: Option<&GammaSet>,
    tol: &Tolerances,
) -> Result<Selection, ClosedFormError> {
    let mut summaries = Vec::with_capacity(candidates.len());
    let mut certified: Vec<(Candidate, Povm, OptimalityCertificate)> = Vec::new();
    for cand in candidates {
        let mut summary = CandidateSummary {
            branch: cand.branch.to_string(),
            route: cand.route,
            p: cand.p,
            certified: false,
            detail: String::new(),
        };
        match &cand.povm {
            Err(reason) => summary.detail = reason.clone(),
            Ok(povm) => {
                let mut cert = certificate(e, povm, cand.p, tol)?;
                if cert.is_certified() {
                    summary.certified = true;
                    if let Some(g) = gammas {
                        cert.attach_bloch_projection(g);
                    }
                    let povm = povm.clone();
                    certified.push((cand, povm, cert));
                } else {
                    summary.detail = format!("failed: {}", cert.failed.join(","));
                }
            }
        }
        summaries.push(summary);
    }
    let mut best: Option<usize> = None;
    for (i, (c, _, _)) in certified.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if c.p > certified[b].0.p + TIE_TOL => best = Some(i),
            _ => {}
        }
    }
    let Some(best) = best else { return Ok(Selection { report: None, summaries }) };
    let p_best = certified[best].0.p;
    let alternatives = certified
        .iter()
        .enumerate()
        .filter(|(i, (c, _, _))| *i != best && (c.p - p_best).abs() <= TIE_TOL)
        .map(|(_, (c, _, _))| (c.branch.clone(), c.p))
        .collect();
    let (cand, povm, cert) = certified.swap_remove(best);
    Ok(Selection {
        report: Some(SolveReport {
            p_opt: cand.p,
            branch: cand.branch,
            route: cand.route,
            povm,
            certificate: cert,
            quadratic: cand.quadratic,
            alternatives,
            candidates: summaries.clone(),
            findings: Vec::new(),
            audit: None,
            frame: None,
        }),
        summaries,
    })
}

/// `Π = I` on the first state of each set, valued at that set's prior.
pub(crate) fn degenerate_candidates(e: &TwoSetEnsemble) -> Vec<Candidate> {
    let d = e.dim();
    let n = e.n();
    vec![
        Candidate::new(Branch::Degenerate, None, e.eta(), Ok(Povm::single_identity(d, e.len(), n, 0))),
        Candidate::new(Branch::Degenerate, None, e.eta_prime(), Ok(Povm::single_identity(d, e.len(), n, n))),
    ]
}

/// Pick a solver from the structure of the ensemble.
///
/// Irreducible sets go to the irreducible solvers; otherwise qubits sharing a
/// rotation axis go to the qubit solver and generalized Bloch families to the
/// reducible solver.
pub fn solve(e: &TwoSetEnsemble, gammas: Option<&GammaSet>, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    let irr = irreducibility_test(e.unitaries())?.is_irreducible
        && irreducibility_test(e.unitaries_prime())?.is_irreducible;
    let family = gammas.filter(|g| g.dim() == e.dim());
    if irr {
        return match family {
            Some(g) if g.m() >= 2 => solve_mqubit_irreducible(e, g, tol),
            _ => solve_irreducible(e, tol),
        };
    }
    if e.dim() == 2 {
        match solve_qubit_any_axis(e, tol) {
            Err(ClosedFormError::GeometryUnsupported(_)) => {}
            other => return other,
        }
        let g = crate::blochdirac::dirac_gammas(1)?;
        return solve_mqubit_reducible(e, &g, tol);
    }
    match family {
        Some(g) => solve_mqubit_reducible(e, g, tol),
        None => Err(ClosedFormError::GeometryUnsupported(
            "reducible ensemble outside the qubit and generalized Bloch families".into(),
        )),
    }
}
