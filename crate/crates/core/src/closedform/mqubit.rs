//! Generalized Bloch states under reducible spinor rotations.
//!
//! `M = (p I + x·γ) / 2^m` with `x` supported on the generators fixed by both
//! sets. Restricted to that subspace the problem is planar: with `n⃗₀`, `n⃗'₀`
//! the restricted seed directions, choose `n⃗₀` as the first axis and write
//! `n'₀`, `n'₁` for the components of `n⃗'₀`. Three routes to `p` are compared:
//! the printed quadratic, a re-derived quadratic and a direct solve of the
//! two unit-norm conditions by bisection.

use serde::{Deserialize, Serialize};

use crate::blochdirac::GammaSet;
use crate::ensembles::{SetLabel, TwoSetEnsemble};
use crate::tolerances::Tolerances;

use super::bloch::{assemble, segment_dual, BlochData};
use super::qubit::qubit_coefficients;
use super::{degenerate_candidates, select, Branch, Candidate, ClosedFormError, Quadratic, Route, SolveReport};

/// Printed and derived values further apart than this disagree.
pub const COEFFICIENT_TOL: f64 = 1e-8;

/// Planar coordinates of the reduced problem and the solution's components in them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDecomposition {
    pub n0: f64,
    pub n0_prime: f64,
    pub n1_prime: f64,
    /// Total weight on the first set.
    pub mu: f64,
    pub m0: f64,
    pub m1: f64,
    pub m0_prime: f64,
    pub m1_prime: f64,
    pub beta0: f64,
    pub beta1: f64,
}

/// Unit axes of the plane plus the seed radii.
#[derive(Debug, Clone)]
struct Frame {
    e0: Vec<f64>,
    e1: Vec<f64>,
    b: f64,
    b_prime: f64,
    n0: f64,
    n0_prime: f64,
    n1_prime: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Frame {
    fn new(data: &BlochData, u: &[f64], u_prime: &[f64]) -> Self {
        let eta = data.priors[0];
        let eta_p = data.priors[data.split];
        let b = norm(data.seed());
        let b_prime = norm(data.seed_prime());
        let dir = |v: &[f64], scale: f64| -> Vec<f64> {
            if scale > 0.0 {
                v.iter().map(|x| x / scale).collect()
            } else {
                vec![0.0; v.len()]
            }
        };
        let n_vec = dir(u, eta * b);
        let n_vec_p = dir(u_prime, eta_p * b_prime);
        let n0 = norm(&n_vec);
        let len = n_vec.len();
        let e0 = if n0 > 1e-12 {
            n_vec.iter().map(|x| x / n0).collect()
        } else if norm(&n_vec_p) > 1e-12 {
            let s = norm(&n_vec_p);
            n_vec_p.iter().map(|x| x / s).collect()
        } else {
            let mut e = vec![0.0; len];
            if let Some(&i) = data.shared.first() {
                e[i] = 1.0;
            }
            e
        };
        let n0_prime = dot(&n_vec_p, &e0);
        let perp: Vec<f64> = n_vec_p.iter().zip(&e0).map(|(a, b)| a - n0_prime * b).collect();
        let n1_prime = norm(&perp);
        let e1 = if n1_prime > 1e-12 { perp.iter().map(|x| x / n1_prime).collect() } else { vec![0.0; len] };
        Self { e0, e1, b, b_prime, n0, n0_prime, n1_prime }
    }
}

/// Coefficients exactly as printed, including the divisions by
/// `D = η b n₀ − η' b' n'₀`. `None` when `D = 0`.
#[allow(clippy::too_many_arguments)]
pub fn printed_coefficients(
    eta: f64,
    eta_prime: f64,
    b: f64,
    b_prime: f64,
    n0: f64,
    n0_prime: f64,
    n1_prime: f64,
) -> Option<(f64, f64, f64)> {
    let d = eta * b * n0 - eta_prime * b_prime * n0_prime;
    if d == 0.0 {
        return None;
    }
    let de = eta - eta_prime;
    let q = eta_prime * eta_prime * b_prime * b_prime * n1_prime * n1_prime;
    let k = eta * eta * (1.0 - b * b) - eta_prime * eta_prime * (1.0 - b_prime * b_prime);
    let cross = eta * eta_prime * eta_prime * b * b_prime * b_prime * n0 * n1_prime * n1_prime;
    let a = de * de - d * d - q;
    let bb = (k - 2.0 * cross / d) * de - 2.0 * eta * b * n0 * de * (d + q / d) + 2.0 * eta * (d * d + q);
    let c = (k - cross / d).powi(2)
        + 4.0 * eta * eta * (b * b * (1.0 + q * n0 * n0 / (d * d)) - 1.0) * (d * d + q)
        - 4.0 * eta * b * n0 * (k - 2.0 * cross / d) * (d + q / d);
    Some((a, bb, c))
}

/// Coefficients re-derived from the two unit-norm conditions with `x` on the
/// segment between the weighted seeds. They reduce to the qubit coefficients
/// when `n'₁ = 0`.
pub fn corrected_coefficients(
    eta: f64,
    eta_prime: f64,
    b: f64,
    b_prime: f64,
    n0: f64,
    n0_prime: f64,
    n1_prime: f64,
) -> (f64, f64, f64) {
    let d = eta * b * n0 - eta_prime * b_prime * n0_prime;
    let de = eta - eta_prime;
    let q = eta_prime * eta_prime * b_prime * b_prime * n1_prime * n1_prime;
    let k = eta * eta * (1.0 - b * b) - eta_prime * eta_prime * (1.0 - b_prime * b_prime);
    let a = de * de - d * d - q;
    let bb = -k * de - 2.0 * eta * b * n0 * de * d + 2.0 * eta * (d * d + q);
    let c = k * k + 4.0 * eta * b * n0 * d * k + 4.0 * eta * eta * (b * b - 1.0) * (d * d + q)
        - 4.0 * eta * eta * b * b * n0 * n0 * q;
    (a, bb, c)
}

/// Comparison of the three routes to `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientAudit {
    pub printed: Option<Quadratic>,
    pub corrected: Quadratic,
    pub derived_p: f64,
    pub derived_route: Route,
    /// `|printed root − derived p|`, when the printed quadratic has an admissible root.
    pub printed_gap: Option<f64>,
    /// With a one-dimensional shared subspace and `n'₁ = 0`: whether each
    /// coefficient set equals the qubit coefficients.
    pub printed_matches_qubit: Option<bool>,
    pub corrected_matches_qubit: Option<bool>,
}

/// Point on the line through the weighted seeds at distance `√((p−η)² − v²)`
/// from the first, moving toward the second.
fn point_toward(u: &[f64], u_prime: &[f64], reach: f64) -> Vec<f64> {
    let len = u.iter().zip(u_prime).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if len == 0.0 {
        return u.to_vec();
    }
    u.iter().zip(u_prime).map(|(a, b)| a - reach * (a - b) / len).collect()
}

struct Reduced<'a> {
    eta: f64,
    eta_p: f64,
    u: &'a [f64],
    u_p: &'a [f64],
    v: f64,
    v_p: f64,
}

impl Reduced<'_> {
    fn reach(&self, p: f64) -> Option<f64> {
        let r2 = (p - self.eta).powi(2) - self.v * self.v;
        (r2 >= -1e-12).then(|| r2.max(0.0).sqrt())
    }

    /// Residual of the second unit-norm condition at the printed-route point.
    fn second_residual(&self, p: f64) -> Option<f64> {
        let x = point_toward(self.u, self.u_p, self.reach(p)?);
        let dist2: f64 = x.iter().zip(self.u_p).map(|(a, b)| (a - b).powi(2)).sum();
        Some(((dist2 + self.v_p * self.v_p).sqrt() - (p - self.eta_p)).abs())
    }

    /// Largest root in `[max(η, η'), 1]` for which the first condition is
    /// solvable, optionally also requiring the second to hold.
    fn root(&self, coeffs: (f64, f64, f64), both: bool) -> Quadratic {
        let (a, b, c) = coeffs;
        let roots = Quadratic::roots(a, b, c);
        let floor = self.eta.max(self.eta_p);
        let admissible = |p: f64| {
            (floor - 1e-12..=1.0 + 1e-12).contains(&p)
                && self.reach(p).is_some()
                && (!both || self.second_residual(p).is_some_and(|r| r < 1e-9))
        };
        let chosen = roots.iter().copied().find(|&p| admissible(p));
        let discarded = roots.iter().copied().find(|&p| Some(p) != chosen);
        Quadratic { a, b, c, chosen, discarded }
    }
}

fn frame_decomposition(frame: &Frame, data: &BlochData, report: &SolveReport) -> FrameDecomposition {
    let eta = data.priors[0];
    let eta_p = data.priors[data.split];
    let d = data.gammas.dim() as f64;
    let p = report.p_opt;
    let x: Vec<f64> = report.certificate.beta.iter().map(|b| b * d).collect();
    let (x0, x1) = (dot(&x, &frame.e0), dot(&x, &frame.e1));
    let safe = |num: f64, den: f64| if den.abs() > 1e-15 { num / den } else { 0.0 };
    let mu = report
        .povm
        .first_set()
        .iter()
        .map(|el| el.trace().re / d)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    FrameDecomposition {
        n0: frame.n0,
        n0_prime: frame.n0_prime,
        n1_prime: frame.n1_prime,
        mu,
        m0: safe(x0 - eta * frame.b * frame.n0, p - eta),
        m1: safe(x1, p - eta),
        m0_prime: safe(x0 - eta_p * frame.b_prime * frame.n0_prime, p - eta_p),
        m1_prime: safe(x1 - eta_p * frame.b_prime * frame.n1_prime, p - eta_p),
        beta0: x0 / d,
        beta1: x1 / d,
    }
}

fn coefficients_close(a: (f64, f64, f64), b: (f64, f64, f64)) -> bool {
    let scale = [a.0, a.1, a.2, b.0, b.1, b.2].iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    [(a.0, b.0), (a.1, b.1), (a.2, b.2)].iter().all(|(x, y)| (x - y).abs() <= 1e-10 * scale.max(1.0))
}

pub fn solve_mqubit_reducible(e: &TwoSetEnsemble, g: &GammaSet, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    if e.dim() != g.dim() {
        return Err(ClosedFormError::GeometryUnsupported(format!(
            "ensemble dimension {} does not match the gamma set ({})",
            e.dim(),
            g.dim()
        )));
    }
    let data = BlochData::new(e, g)?;
    let (eta, eta_p) = (e.eta(), e.eta_prime());
    let (u, v) = data.reduced(SetLabel::First);
    let (u_p, v_p) = data.reduced(SetLabel::Second);
    let frame = Frame::new(&data, &u, &u_p);
    let red = Reduced { eta, eta_p, u: &u, u_p: &u_p, v, v_p };
    let args = (eta, eta_p, frame.b, frame.b_prime, frame.n0, frame.n0_prime, frame.n1_prime);

    let printed = printed_coefficients(args.0, args.1, args.2, args.3, args.4, args.5, args.6).map(|c| red.root(c, false));
    let corrected_coeffs = corrected_coefficients(args.0, args.1, args.2, args.3, args.4, args.5, args.6);
    let corrected = red.root(corrected_coeffs, true);
    let dual = segment_dual(eta, eta_p, &u, &u_p, v, v_p);

    let mut candidates = Vec::new();
    if let Some(q) = printed {
        if let Some(p) = q.chosen {
            let reach = red.reach(p).unwrap_or(0.0);
            let x = point_toward(&u, &u_p, reach);
            let mut c = Candidate::new(Branch::MQubitReducible, Some(Route::Printed), p, assemble(&data, p, &x));
            c.quadratic = Some(q);
            candidates.push(c);
        }
    }
    let mut derived = Candidate::new(Branch::MQubitReducible, Some(dual.route), dual.p, assemble(&data, dual.p, &dual.x));
    derived.quadratic = Some(corrected);
    candidates.push(derived);
    candidates.extend(degenerate_candidates(e));

    let printed_gap = printed.and_then(|q| q.chosen).map(|p| (p - dual.p).abs());
    let one_dim = data.shared.len() == 1 && frame.n1_prime <= 1e-12;
    let qubit = one_dim.then(|| qubit_coefficients(eta, eta_p, frame.b, frame.n0, frame.b_prime, frame.n0_prime));
    let audit = CoefficientAudit {
        printed,
        corrected,
        derived_p: dual.p,
        derived_route: dual.route,
        printed_gap,
        printed_matches_qubit: qubit.map(|qc| {
            printed_coefficients(args.0, args.1, args.2, args.3, args.4, args.5, args.6)
                .is_some_and(|pc| coefficients_close(pc, qc))
        }),
        corrected_matches_qubit: qubit.map(|qc| coefficients_close(corrected_coeffs, qc)),
    };

    let mut findings = Vec::new();
    let mismatch = dual.route == Route::Derived && printed_gap.is_none_or(|gap| gap > COEFFICIENT_TOL);
    if mismatch {
        let printed_p = printed.and_then(|q| q.chosen);
        if tol.strict {
            return Err(ClosedFormError::CoefficientMismatch { printed: printed_p, derived: dual.p });
        }
        findings.push(match printed_p {
            Some(p) => format!("printed quadratic gives p = {p:.12}, derived route gives {:.12}", dual.p),
            None => format!("printed quadratic has no admissible root; derived route gives {:.12}", dual.p),
        });
    }
    if dual.route == Route::Derived {
        if let Some(p) = corrected.chosen {
            if (p - dual.p).abs() > COEFFICIENT_TOL {
                findings.push(format!("re-derived quadratic gives p = {p:.12}, bisection gives {:.12}", dual.p));
            }
        }
    }

    let sel = select(e, candidates, Some(g), tol)?;
    let mut report = sel.report.ok_or(ClosedFormError::NoBranchCertifies { candidates: sel.summaries })?;
    report.frame = Some(frame_decomposition(&frame, &data, &report));
    report.audit = Some(audit);
    report.findings.extend(findings);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blochdirac::{dirac_gammas, GeneralizedBlochState};
    use crate::closedform::solve_qubit_two_sets;
    use crate::ensembles::{build_qubit_zrotation_ensemble, build_spinor_ensemble, ThetaTable};
    use std::f64::consts::PI;

    fn qubit(b: f64, nz: f64, phi: f64) -> GeneralizedBlochState {
        let s = (1.0 - nz * nz).sqrt();
        GeneralizedBlochState::normalized(1, b, vec![s * phi.cos(), s * phi.sin(), nz]).unwrap()
    }

    #[test]
    fn corrected_coefficients_reduce_to_qubit() {
        let (eta, etap, b, bp, n0, n0p) = (0.2, 0.15, 0.9, 0.8, 0.3, -0.2);
        let c = corrected_coefficients(eta, etap, b, bp, n0, n0p, 0.0);
        let q = qubit_coefficients(eta, etap, b, n0, bp, n0p);
        assert!(coefficients_close(c, q));
    }

    #[test]
    fn matches_qubit_solver_on_qubit_input() {
        let e = build_qubit_zrotation_ensemble(
            0.2,
            0.15,
            &qubit(0.9, 0.3, 0.0),
            &qubit(0.8, -0.2, 0.4),
            &[0.0, PI],
            &[0.0, PI / 2.0, PI, 1.5 * PI],
        )
        .unwrap();
        let g = dirac_gammas(1).unwrap();
        let a = solve_mqubit_reducible(&e, &g, &Tolerances::default()).unwrap();
        let b = solve_qubit_two_sets(&e, &Tolerances::default()).unwrap();
        assert!((a.p_opt - b.p_opt).abs() < 1e-10, "{} vs {}", a.p_opt, b.p_opt);
        assert_eq!(a.audit.unwrap().corrected_matches_qubit, Some(true));
    }

    #[test]
    fn zero_radius_seeds_give_the_larger_prior() {
        let g = dirac_gammas(2).unwrap();
        let mixed = GeneralizedBlochState::new(2, 0.0, vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let table = ThetaTable::from_entries(2, &[(0, 1, PI / 4.0)]).unwrap();
        let tables = vec![ThetaTable::zeros(2), table];
        let e = build_spinor_ensemble(&g, 0.3, 0.2, &mixed, &mixed, &tables, &tables).unwrap();
        let r = solve_mqubit_reducible(&e, &g, &Tolerances::default()).unwrap();
        assert!((r.p_opt - 0.3).abs() < 1e-12);
        assert!(r.certificate.is_certified());
        let f = r.frame.unwrap();
        assert!((0.0..=1.0).contains(&f.mu));
    }

    #[test]
    fn planar_two_qubit_instance_certifies() {
        let g = dirac_gammas(2).unwrap();
        let seed = GeneralizedBlochState::normalized(2, 0.9, vec![0.5, 0.1, 0.6, 0.3, 0.0]).unwrap();
        let seed_p = GeneralizedBlochState::normalized(2, 0.7, vec![0.2, 0.4, -0.5, 0.1, 0.2]).unwrap();
        let quarter = ThetaTable::from_entries(2, &[(0, 1, PI / 4.0)]).unwrap();
        let half = ThetaTable::from_entries(2, &[(0, 1, PI / 2.0)]).unwrap();
        let three = ThetaTable::from_entries(2, &[(0, 1, 3.0 * PI / 4.0)]).unwrap();
        let first = vec![ThetaTable::zeros(2), half.clone()];
        let second = vec![ThetaTable::zeros(2), quarter, half, three];
        let e = build_spinor_ensemble(&g, 0.2, 0.15, &seed, &seed_p, &first, &second).unwrap();
        let r = solve_mqubit_reducible(&e, &g, &Tolerances::default()).unwrap();
        assert!(r.certificate.is_certified(), "{:?}", r.candidates);
        let f = r.frame.unwrap();
        assert!(f.n0_prime.powi(2) + f.n1_prime.powi(2) <= 1.0 + 1e-12);
    }
}
