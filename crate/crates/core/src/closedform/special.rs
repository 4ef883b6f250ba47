//! Piecewise closed forms for three families of pure qubit states.
//!
//! * Case 1: `n` states sharing `n_z`, plus one state along `+z`.
//! * Case 2: `n` states sharing `n_z`, plus one state along `+y`.
//! * Case 3: two states sharing `n_z`, plus two equatorial states.
//!
//! Every rule whose condition holds is evaluated with its listed POVM shapes,
//! weighted by [`recover_weights`](super::recover_weights) so that they resolve
//! the identity and reproduce the rule's value, and certified. When
//! no rule certifies, the general qubit solver answers instead.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blochdirac::dirac_gammas;
use crate::ensembles::TwoSetEnsemble;
use crate::tolerances::Tolerances;

use super::bloch::{povm_from_shapes, BlochData};
use super::qubit::solve_qubit_two_sets;
use super::{select, Branch, Candidate, ClosedFormError, SolveReport, TIE_TOL};

/// Equalities in the branch conditions are tested to this tolerance.
const CONDITION_TOL: f64 = 1e-12;
/// Pure-state and shared-component checks on the input geometry.
const GEOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialCase {
    /// Extra state along `+z`.
    AxisZ,
    /// Extra state along `+y`.
    AxisY,
    /// Two pairs, the second on the equator.
    EquatorialPairs,
}

impl SpecialCase {
    pub fn number(self) -> u8 {
        match self {
            SpecialCase::AxisZ => 1,
            SpecialCase::AxisY => 2,
            SpecialCase::EquatorialPairs => 3,
        }
    }
}

impl TryFrom<u8> for SpecialCase {
    type Error = ClosedFormError;

    fn try_from(k: u8) -> Result<Self, Self::Error> {
        match k {
            1 => Ok(SpecialCase::AxisZ),
            2 => Ok(SpecialCase::AxisY),
            3 => Ok(SpecialCase::EquatorialPairs),
            _ => Err(ClosedFormError::GeometryUnsupported(format!("no special case {k}; expected 1, 2 or 3"))),
        }
    }
}

/// Which piece of a piecewise formula produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialRule {
    /// Both sets active with tilted measurement directions.
    Crossing,
    /// `p = 2η`, both sets on the equator.
    TwoEta,
    /// `p = η(1 + √(1 − n_z²))`, only the first set measured.
    EtaOnePlusS,
    /// `p = η`, only the extra state measured.
    Eta,
    /// `p = 2η'` with `n_z = 0`, both sets measured.
    TwoEtaPrimeEquator,
    /// `p = 2η'`, only the second set measured.
    TwoEtaPrime,
}

impl fmt::Display for SpecialRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpecialRule::Crossing => "crossing",
            SpecialRule::TwoEta => "2eta",
            SpecialRule::EtaOnePlusS => "eta(1+s)",
            SpecialRule::Eta => "eta",
            SpecialRule::TwoEtaPrimeEquator => "2eta'/nz=0",
            SpecialRule::TwoEtaPrime => "2eta'",
        })
    }
}

/// A rule whose condition holds, with its value and listed shapes
/// (`None` marks an element forced to zero).
struct Rule {
    rule: SpecialRule,
    p: f64,
    shapes: Vec<Option<Vec<f64>>>,
}

struct Geometry {
    eta: f64,
    eta_p: f64,
    n: usize,
    nz: f64,
    first: Vec<[f64; 3]>,
    second: Vec<[f64; 3]>,
}

fn geometry(which: SpecialCase, data: &BlochData, e: &TwoSetEnsemble) -> Result<Geometry, ClosedFormError> {
    let unsupported = |msg: &str| ClosedFormError::GeometryUnsupported(format!("special case {}: {msg}", which.number()));
    let as3 = |v: &Vec<f64>| [v[0], v[1], v[2]];
    let first: Vec<[f64; 3]> = data.vectors[..data.split].iter().map(as3).collect();
    let second: Vec<[f64; 3]> = data.vectors[data.split..].iter().map(as3).collect();
    if first.iter().chain(&second).any(|r| (r.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() > GEOMETRY_TOL) {
        return Err(unsupported("states must be pure"));
    }
    let nz = first[0][2];
    if first.iter().any(|r| (r[2] - nz).abs() > GEOMETRY_TOL) {
        return Err(unsupported("first-set states must share n_z"));
    }
    let close = |r: &[f64; 3], t: [f64; 3]| r.iter().zip(t).all(|(a, b)| (a - b).abs() <= GEOMETRY_TOL);
    match which {
        SpecialCase::AxisZ if second.len() != 1 || !close(&second[0], [0.0, 0.0, 1.0]) => {
            return Err(unsupported("second set must be the single state (0, 0, 1)"))
        }
        SpecialCase::AxisY if second.len() != 1 || !close(&second[0], [0.0, 1.0, 0.0]) => {
            return Err(unsupported("second set must be the single state (0, 1, 0)"))
        }
        SpecialCase::EquatorialPairs
            if first.len() != 2 || second.len() != 2 || second.iter().any(|r| r[2].abs() > GEOMETRY_TOL) =>
        {
            return Err(unsupported("needs two states per set with the second pair on the equator"))
        }
        _ => {}
    }
    Ok(Geometry { eta: e.eta(), eta_p: e.eta_prime(), n: e.n(), nz, first, second })
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONDITION_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Shape `I + a (n_x σ_x + n_y σ_y) + c σ_z` for each state.
fn tilted(states: &[[f64; 3]], a: f64, c: f64) -> Vec<Option<Vec<f64>>> {
    states.iter().map(|r| Some(vec![a * r[0], a * r[1], c])).collect()
}

fn zero(states: &[[f64; 3]]) -> Vec<Option<Vec<f64>>> {
    vec![None; states.len()]
}

fn join(a: Vec<Option<Vec<f64>>>, b: Vec<Option<Vec<f64>>>) -> Vec<Option<Vec<f64>>> {
    a.into_iter().chain(b).collect()
}

fn case_axis_z(g: &Geometry) -> Vec<Rule> {
    let Geometry { eta, eta_p, n, nz, .. } = *g;
    let s = (1.0 - nz * nz).max(0.0).sqrt();
    let mut rules = Vec::new();
    let den = eta * (1.0 + nz) - 2.0 * eta_p;
    let dn = eta * nz - eta_p;
    if den != 0.0 && dn != 0.0 {
        let q = 2.0 * eta_p * (eta - eta_p) / den;
        if (eta * nz < q && q < eta_p) || (eta * nz > q && q > eta_p) {
            let p = 2.0 * eta_p * dn / den;
            let c = -((eta - eta_p) * p - eta * nz * dn) / (dn * (p - eta));
            let c_p = -((eta - eta_p) * p - eta_p * dn) / (dn * (p - eta_p));
            let shapes = join(tilted(&g.first, eta / (p - eta), c), vec![Some(vec![0.0, 0.0, c_p])]);
            rules.push(Rule { rule: SpecialRule::Crossing, p, shapes });
        }
    }
    let nf = n as f64;
    let bound = (nz - 1.0 - s) / (nz * nz + eta * nz - 1.0 - nf - (1.0 + nf) * s);
    if s > 0.0 && (dn.abs() <= CONDITION_TOL || eta <= bound) {
        let shapes = join(tilted(&g.first, 1.0 / s, 0.0), zero(&g.second));
        rules.push(Rule { rule: SpecialRule::EtaOnePlusS, p: eta * (1.0 + s), shapes });
    }
    rules
}

/// The crossing rule shared by Cases 2 and 3; the second set's shapes are
/// `I + a' (n'_x σ_x + n'_y σ_y) + c' σ_z`.
fn crossing_yz(g: &Geometry) -> Option<Rule> {
    let Geometry { eta, eta_p, nz, .. } = *g;
    let den = (eta * nz).powi(2) - (eta - eta_p).powi(2);
    if den == 0.0 || nz == 0.0 {
        return None;
    }
    let q = (eta - eta_p) * eta_p / den;
    if !(0.0 < q && q < 0.5) {
        return None;
    }
    let p = 2.0 * eta * eta * eta_p * nz * nz / den;
    let c = -((eta - eta_p) * p - eta * eta * nz * nz) / (eta * nz * (p - eta));
    let c_p = -((eta - eta_p) * p) / (eta * nz * (p - eta_p));
    let shapes = join(tilted(&g.first, eta / (p - eta), c), tilted(&g.second, eta_p / (p - eta_p), c_p));
    Some(Rule { rule: SpecialRule::Crossing, p, shapes })
}

fn case_axis_y(g: &Geometry) -> Vec<Rule> {
    let Geometry { eta, n, nz, .. } = *g;
    let s = (1.0 - nz * nz).max(0.0).sqrt();
    let nf = n as f64;
    let nz_zero = nz.abs() <= CONDITION_TOL;
    let mut rules: Vec<Rule> = crossing_yz(g).into_iter().collect();
    if nz_zero && eta >= 1.0 / (1.0 + nf) - CONDITION_TOL {
        let shapes = join(tilted(&g.first, 1.0, 0.0), tilted(&g.second, 1.0, 0.0));
        rules.push(Rule { rule: SpecialRule::TwoEta, p: 2.0 * eta, shapes });
    }
    if !nz_zero && s > 0.0 && eta >= 1.0 / (nf + s) - CONDITION_TOL {
        let shapes = join(tilted(&g.first, 1.0 / s, 0.0), zero(&g.second));
        rules.push(Rule { rule: SpecialRule::EtaOnePlusS, p: eta * (1.0 + s), shapes });
    }
    if !nz_zero && eq(eta, 1.0 / (1.0 + nf)) {
        let shapes = join(zero(&g.first), vec![Some(vec![0.0; 3])]);
        rules.push(Rule { rule: SpecialRule::Eta, p: eta, shapes });
    }
    rules
}

fn case_equatorial_pairs(g: &Geometry) -> Vec<Rule> {
    let Geometry { eta, eta_p, nz, .. } = *g;
    let s = (1.0 - nz * nz).max(0.0).sqrt();
    let nz_zero = nz.abs() <= CONDITION_TOL;
    let mut rules: Vec<Rule> = crossing_yz(g).into_iter().collect();
    if nz_zero && eta >= 0.25 - CONDITION_TOL {
        let shapes = join(tilted(&g.first, 0.5, 0.0), tilted(&g.second, 1.0, 0.0));
        rules.push(Rule { rule: SpecialRule::TwoEta, p: 2.0 * eta, shapes });
    }
    if !nz_zero && s > 0.0 && eta >= 1.0 / (2.0 + s) - CONDITION_TOL {
        let shapes = join(tilted(&g.first, 1.0 / s, 0.0), zero(&g.second));
        rules.push(Rule { rule: SpecialRule::EtaOnePlusS, p: eta * (1.0 + s), shapes });
    }
    if nz_zero && eta <= 0.25 + CONDITION_TOL {
        let shapes = join(tilted(&g.first, 1.0, 0.0), tilted(&g.second, 1.0, 0.0));
        rules.push(Rule { rule: SpecialRule::TwoEtaPrimeEquator, p: 2.0 * eta_p, shapes });
    }
    if !nz_zero && eta <= 0.25 + CONDITION_TOL {
        let shapes = join(zero(&g.first), tilted(&g.second, 1.0, 0.0));
        rules.push(Rule { rule: SpecialRule::TwoEtaPrime, p: 2.0 * eta_p, shapes });
    }
    rules
}

/// Evaluate the piecewise closed form for one of the three families.
pub fn solve_special_case(which: SpecialCase, e: &TwoSetEnsemble, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    if e.dim() != 2 {
        return Err(ClosedFormError::GeometryUnsupported(format!("special cases need d = 2, got {}", e.dim())));
    }
    let gammas = dirac_gammas(1)?;
    let data = BlochData::new(e, &gammas)?;
    let g = geometry(which, &data, e)?;
    let rules = match which {
        SpecialCase::AxisZ => case_axis_z(&g),
        SpecialCase::AxisY => case_axis_y(&g),
        SpecialCase::EquatorialPairs => case_equatorial_pairs(&g),
    };
    let case = which.number();

    if tol.strict {
        for (i, a) in rules.iter().enumerate() {
            if let Some(b) = rules[i + 1..].iter().find(|b| (a.p - b.p).abs() > TIE_TOL) {
                return Err(ClosedFormError::ConditionAmbiguous {
                    first: a.rule.to_string(),
                    first_p: a.p,
                    second: b.rule.to_string(),
                    second_p: b.p,
                });
            }
        }
    }

    let holding: Vec<(SpecialRule, f64)> = rules.iter().map(|r| (r.rule, r.p)).collect();
    let candidates = rules
        .into_iter()
        .map(|r| Candidate::new(Branch::Special { case, rule: r.rule }, None, r.p, povm_from_shapes(&data, r.shapes, Some(r.p))))
        .collect();
    let sel = select(e, candidates, Some(&gammas), tol)?;
    let mut findings: Vec<String> = sel
        .summaries
        .iter()
        .filter(|s| !s.certified)
        .map(|s| format!("condition for {} holds but it does not certify ({})", s.branch, s.detail))
        .collect();
    if holding.is_empty() {
        findings.push(format!("no listed condition of special case {case} holds"));
    }
    if let Some(mut report) = sel.report {
        report.findings.extend(findings);
        return Ok(report);
    }

    match solve_qubit_two_sets(e, tol) {
        Ok(mut report) => {
            report.branch = Branch::Fallback(Box::new(report.branch));
            let mut all = sel.summaries;
            all.append(&mut report.candidates);
            report.candidates = all;
            findings.append(&mut report.findings);
            report.findings = findings;
            Ok(report)
        }
        Err(ClosedFormError::NoBranchCertifies { candidates }) => {
            let mut all = sel.summaries;
            all.extend(candidates);
            Err(ClosedFormError::NoBranchCertifies { candidates: all })
        }
        Err(ClosedFormError::GeometryUnsupported(msg)) => {
            let mut all = sel.summaries;
            all.push(super::CandidateSummary {
                branch: "Fallback".into(),
                route: None,
                p: f64::NAN,
                certified: false,
                detail: msg,
            });
            Err(ClosedFormError::NoBranchCertifies { candidates: all })
        }
        Err(other) => Err(other),
    }
}
