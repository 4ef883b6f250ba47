//! Two sets of qubit states generated by rotations about the z axis.
//!
//! Rotation invariance forces `M = (p I + 2β σ_z) / 2`. Which states carry
//! weight depends on the signs of the z components of the conjugate-state
//! directions, giving four cases; every case is proposed and certified.

use crate::blochdirac::dirac_gammas;
use crate::ensembles::{SetLabel, TwoSetEnsemble};
use crate::certify::certificate;
use crate::qmat::{expi_herm, paulis, CMat, C64};
use crate::tolerances::Tolerances;

use super::bloch::{assemble, segment_dual, BlochData};
use super::{degenerate_candidates, select, Branch, Candidate, ClosedFormError, Quadratic, Route, SolveReport};

/// Index of `σ_z` in the qubit generator list.
const Z: usize = 2;
/// Printed and derived roots closer than this are the same candidate.
const ROUTE_AGREEMENT: f64 = 1e-9;

/// Coefficients `(A, B, C)` of the Case 1 quadratic in terms of the priors,
/// Bloch radii and shared z components.
pub fn qubit_coefficients(eta: f64, eta_prime: f64, b: f64, nz: f64, b_prime: f64, nz_prime: f64) -> (f64, f64, f64) {
    let dz = eta * b * nz - eta_prime * b_prime * nz_prime;
    let k = eta * eta * (b * b - 1.0) - eta_prime * eta_prime * (b_prime * b_prime - 1.0);
    let de = eta - eta_prime;
    let a = de * de - dz * dz;
    let bb = k * de - 2.0 * eta * b * nz * de * dz + 2.0 * eta * dz * dz;
    let c = k * k + 4.0 * eta * eta * (b * b - 1.0) * dz * dz - 4.0 * eta * b * nz * k * dz;
    (a, bb, c)
}

/// Case 1 quantities for a root: `(β, m_z, m'_z)`.
fn case1_components(eta: f64, eta_prime: f64, r: [f64; 2], r_prime: [f64; 2], p: f64) -> (f64, f64, f64) {
    // r = [b n_z, b²].
    let dz = eta * r[0] - eta_prime * r_prime[0];
    let beta = (eta * eta * (r[1] - 1.0) - eta_prime * eta_prime * (r_prime[1] - 1.0) + 2.0 * (eta - eta_prime) * p) / (4.0 * dz);
    let mz = (2.0 * beta - eta * r[0]) / (p - eta);
    let mz_p = (2.0 * beta - eta_prime * r_prime[0]) / (p - eta_prime);
    (beta, mz, mz_p)
}

fn is_z_rotation(u: &CMat) -> bool {
    u[(0, 1)].norm() <= crate::ensembles::UNITARY_TOL && u[(1, 0)].norm() <= crate::ensembles::UNITARY_TOL
}

/// Coefficients of the printed quadratic and its largest admissible root:
/// real, within `[max(η, η'), 1]` and with `m_z m'_z < 0`. `None` when the
/// z components balance and the quadratic is undefined.
fn printed_root(eta: f64, eta_prime: f64, r: [f64; 2], r_prime: [f64; 2]) -> Option<Quadratic> {
    let dz = eta * r[0] - eta_prime * r_prime[0];
    if dz.abs() < 1e-12 {
        return None;
    }
    let split = |r: [f64; 2]| {
        let b = r[1].sqrt();
        (b, if b > 0.0 { r[0] / b } else { 0.0 })
    };
    let ((b, nz), (bp, nzp)) = (split(r), split(r_prime));
    let (a, bb, c) = qubit_coefficients(eta, eta_prime, b, nz, bp, nzp);
    let roots = Quadratic::roots(a, bb, c);
    let floor = eta.max(eta_prime);
    let admissible = |p: f64| {
        if !(floor - 1e-12..=1.0 + 1e-12).contains(&p) || p <= eta || p <= eta_prime {
            return false;
        }
        let (_, mz, mzp) = case1_components(eta, eta_prime, r, r_prime, p);
        mz * mzp < 0.0
    };
    let chosen = roots.iter().copied().find(|&p| admissible(p));
    let discarded = roots.iter().copied().find(|&p| Some(p) != chosen);
    Some(Quadratic { a, b: bb, c, chosen, discarded })
}

pub fn solve_qubit_two_sets(e: &TwoSetEnsemble, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    if e.dim() != 2 {
        return Err(ClosedFormError::GeometryUnsupported(format!("qubit solver needs d = 2, got {}", e.dim())));
    }
    if !e.all_unitaries().all(is_z_rotation) {
        return Err(ClosedFormError::GeometryUnsupported("generating sets are not rotations about z".into()));
    }
    let g = dirac_gammas(1)?;
    let data = BlochData::new(e, &g)?;
    let (eta, eta_p) = (e.eta(), e.eta_prime());
    let seed = data.seed().to_vec();
    let seed_p = data.seed_prime().to_vec();
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let r = [seed[Z], sq(&seed)];
    let r_p = [seed_p[Z], sq(&seed_p)];

    let mut candidates = Vec::new();
    let mut findings = Vec::new();

    // Case 1: printed quadratic, then the derived route if it disagrees.
    let quad = printed_root(eta, eta_p, r, r_p);
    let p_printed = quad.and_then(|q| q.chosen);
    if let Some(p) = p_printed {
        let (beta, _, _) = case1_components(eta, eta_p, r, r_p, p);
        let x = [0.0, 0.0, 2.0 * beta];
        let mut c = Candidate::new(Branch::QubitCase(1), Some(Route::Printed), p, assemble(&data, p, &x));
        c.quadratic = quad;
        candidates.push(c);
    }
    let (u, v) = data.reduced(SetLabel::First);
    let (u_p, v_p) = data.reduced(SetLabel::Second);
    let dual = segment_dual(eta, eta_p, &u, &u_p, v, v_p);
    if dual.route == Route::Derived {
        let disagree = p_printed.is_none_or(|p| (p - dual.p).abs() > ROUTE_AGREEMENT);
        if disagree {
            if let Some(p) = p_printed {
                findings.push(format!("printed Case 1 root {p:.12} differs from derived route {:.12}", dual.p));
            }
            let mut c = Candidate::new(Branch::QubitCase(1), Some(Route::Derived), dual.p, assemble(&data, dual.p, &dual.x));
            c.quadratic = quad;
            candidates.push(c);
        }
    }

    // Case 2: both sets on the equator of the measurement directions.
    let dist = u.iter().zip(&u_p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if dist <= 1e-12 {
        for p in [eta + v, eta_p + v_p] {
            candidates.push(Candidate::new(Branch::QubitCase(2), Some(Route::Vertex), p, assemble(&data, p, &u)));
        }
    }
    // Cases 3 and 4: one set alone.
    if e.n() >= 2 {
        let p = eta + v;
        candidates.push(Candidate::new(Branch::QubitCase(3), Some(Route::Vertex), p, assemble(&data, p, &u)));
    }
    if e.n_prime() >= 2 {
        let p = eta_p + v_p;
        candidates.push(Candidate::new(Branch::QubitCase(4), Some(Route::Vertex), p, assemble(&data, p, &u_p)));
    }
    candidates.extend(degenerate_candidates(e));

    let sel = select(e, candidates, Some(&g), tol)?;
    let mut report = sel.report.ok_or(ClosedFormError::NoBranchCertifies { candidates: sel.summaries.clone() })?;
    if let (Some(p), Branch::QubitCase(1)) = (p_printed, &report.branch) {
        if report.route == Some(Route::Derived) {
            findings.push(format!("printed root {p:.12} did not certify; derived route used"));
        }
    }
    if report.quadratic.is_none() && matches!(report.branch, Branch::QubitCase(1)) {
        report.quadratic = quad;
    }
    report.findings.extend(findings);
    Ok(report)
}

/// Rotation axis of a qubit unitary, or `None` when it is a multiple of `I`.
/// From `U = e^{iφ}(cos θ I − i sin θ a·σ)`, `Tr(σ_k U) ∝ a_k` with a
/// common complex factor.
fn rotation_axis(u: &CMat) -> Option<[f64; 3]> {
    let v: Vec<C64> = paulis().iter().map(|s| s.trace_product(u)).collect();
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    if big.norm() <= crate::ensembles::UNITARY_TOL {
        return None;
    }
    let phase = big / big.norm();
    let a: Vec<f64> = v.iter().map(|c| (c / phase).re).collect();
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    Some([a[0] / norm, a[1] / norm, a[2] / norm])
}

/// Unitary turning the common rotation axis of every generator onto `+z`,
/// when the generators share one.
pub fn shared_axis_frame(e: &TwoSetEnsemble) -> Option<CMat> {
    let axes: Vec<[f64; 3]> = e.all_unitaries().filter_map(rotation_axis).collect();
    let a = *axes.first()?;
    let parallel = |b: &[f64; 3]| (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).abs() >= 1.0 - 1e-9;
    if !axes.iter().all(parallel) {
        return None;
    }
    // Rotate by the angle between a and z about a × z.
    let k = [a[1], -a[0], 0.0];
    let sin = (k[0] * k[0] + k[1] * k[1]).sqrt();
    let omega = sin.atan2(a[2]);
    let mut h = CMat::zeros(2);
    if sin > 0.0 {
        for (s, kc) in paulis().iter().zip(k) {
            h.axpy(-0.5 * omega * kc / sin, s);
        }
    }
    let w = expi_herm(&h).ok()?;
    e.all_unitaries().all(|u| is_z_rotation(&u.conjugate_by(&w))).then_some(w)
}

/// Qubit solver for generators sharing any rotation axis: solve in the frame
/// where the axis is `z`, then rotate the POVM back and certify it again.
pub fn solve_qubit_any_axis(e: &TwoSetEnsemble, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    if e.dim() != 2 || e.all_unitaries().all(is_z_rotation) {
        return solve_qubit_two_sets(e, tol);
    }
    let w = shared_axis_frame(e)
        .ok_or_else(|| ClosedFormError::GeometryUnsupported("generating sets share no rotation axis".into()))?;
    let mut report = solve_qubit_two_sets(&e.conjugated(&w)?, tol)?;
    let back = w.adjoint();
    report.povm = report.povm.conjugated(&back);
    report.certificate = certificate(e, &report.povm, report.p_opt, tol)?;
    report.findings.push("solved in the frame with the shared rotation axis along z".into());
    Ok(report)
}
