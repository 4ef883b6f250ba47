//! Irreducible generating sets: `M` commutes with an irreducible set, so it is
//! a multiple of the identity and `p = d · max(η a_max, η' a'_max)`.

use crate::blochdirac::{state_to_bloch, GammaSet};
use crate::ensembles::{irreducibility_test, SetLabel, TwoSetEnsemble};
use crate::povm::Povm;
use crate::qmat::{eig_herm, CMat};
use crate::tolerances::Tolerances;

use super::bloch::{assemble, BlochData};
use super::weights::{solve_atom_weights, WeightError};
use super::{select, Branch, Candidate, ClosedFormError, SolveReport, TIE_TOL};

/// Eigenvalues within this of `a_max` count as the top eigenspace.
const TOP_EIGEN_TOL: f64 = 1e-9;

fn require_irreducible(e: &TwoSetEnsemble) -> Result<(), ClosedFormError> {
    for (set, us) in [(SetLabel::First, e.unitaries()), (SetLabel::Second, e.unitaries_prime())] {
        let report = irreducibility_test(us)?;
        if !report.is_irreducible {
            return Err(ClosedFormError::NotIrreducible { set, commutant_dim: report.commutant_dim });
        }
    }
    Ok(())
}

/// Largest eigenvalue of a seed and an orthonormal basis of its eigenspace.
fn top_eigenspace(seed: &CMat) -> Result<(f64, Vec<CMat>), ClosedFormError> {
    let eig = eig_herm(seed)?;
    let a_max = eig.max_value();
    let vecs = (0..seed.dim())
        .filter(|&k| eig.values[k] >= a_max - TOP_EIGEN_TOL)
        .map(|k| CMat::projector(&eig.vector(k)))
        .collect();
    Ok((a_max, vecs))
}

/// Winning sets for the value `p`: a set participates when its own bound
/// reaches `p` (both on a tie).
fn participants(p: f64, p_first: f64, p_second: f64) -> [bool; 2] {
    [p_first >= p - TIE_TOL, p_second >= p - TIE_TOL]
}

/// `p = max(η a_max d, η' a'_max d)` with POVM elements built from the top
/// eigenprojectors of the winning seeds, rotated by each state's unitary.
pub fn solve_irreducible(e: &TwoSetEnsemble, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    require_irreducible(e)?;
    let d = e.dim();
    let (a_max, top) = top_eigenspace(e.seed())?;
    let (a_max_p, top_p) = top_eigenspace(e.seed_prime())?;
    let p_first = e.eta() * a_max * d as f64;
    let p_second = e.eta_prime() * a_max_p * d as f64;
    let p = p_first.max(p_second);
    let active = participants(p, p_first, p_second);

    let povm = irreducible_povm(e, &top, &top_p, active)?;
    let cand = Candidate::new(Branch::Irreducible, None, p, Ok(povm));
    let sel = select(e, vec![cand], None, tol)?;
    sel.report.ok_or(ClosedFormError::NoBranchCertifies { candidates: sel.summaries })
}

/// Try whole top-eigenspace atoms first; with a degenerate top eigenvalue the
/// eigenvectors may need separate weights, so retry per eigenvector.
fn irreducible_povm(
    e: &TwoSetEnsemble,
    top: &[CMat],
    top_p: &[CMat],
    active: [bool; 2],
) -> Result<Povm, ClosedFormError> {
    let d = e.dim() as f64;
    let sets = [(e.unitaries(), top, active[0]), (e.unitaries_prime(), top_p, active[1])];

    // Shape per state: (d/k) U P_max U†.
    let mut shapes: Vec<Option<CMat>> = Vec::with_capacity(e.len());
    for (us, projs, on) in sets {
        let mut proj = CMat::zeros(e.dim());
        for pr in projs {
            proj.axpy(d / projs.len() as f64, pr);
        }
        for u in us {
            shapes.push(on.then(|| proj.conjugate_by(u)));
        }
    }
    let target = CMat::identity(e.dim());
    let active_shapes: Vec<&CMat> = shapes.iter().flatten().collect();
    match solve_atom_weights(&active_shapes, &target) {
        Ok(w) => {
            let mut it = w.into_iter();
            let weights: Vec<f64> = shapes.iter().map(|s| if s.is_some() { it.next().unwrap_or(0.0) } else { 0.0 }).collect();
            let mats = shapes.into_iter().map(|s| s.unwrap_or_else(|| target.clone())).collect();
            return Ok(Povm::from_weights(weights, mats, e.n())?);
        }
        Err(WeightError::Infeasible { .. }) if top.len() > 1 || top_p.len() > 1 => {}
        Err(source) => return Err(ClosedFormError::WeightInfeasible { branch: Branch::Irreducible.to_string(), source }),
    }

    // Per-eigenvector atoms d U |v⟩⟨v| U†, grouped back per state.
    let mut atoms = Vec::new();
    let mut owner = Vec::new();
    let mut state = 0;
    for (us, projs, on) in sets {
        for u in us {
            if on {
                for pr in projs {
                    atoms.push(pr.scale(d).conjugate_by(u));
                    owner.push(state);
                }
            }
            state += 1;
        }
    }
    let refs: Vec<&CMat> = atoms.iter().collect();
    let w = solve_atom_weights(&refs, &target)
        .map_err(|source| ClosedFormError::WeightInfeasible { branch: Branch::Irreducible.to_string(), source })?;
    let mut elements = vec![CMat::zeros(e.dim()); e.len()];
    let mut weights = vec![0.0; e.len()];
    for ((atom, &k), c) in atoms.iter().zip(&owner).zip(&w) {
        elements[k].axpy(*c, atom);
        weights[k] += c;
    }
    let mats = elements
        .iter()
        .zip(&weights)
        .map(|(el, &lam)| if lam > 0.0 { el.scale(1.0 / lam) } else { target.clone() })
        .collect();
    Ok(Povm::from_weights(weights, mats, e.n())?)
}

/// Generalized Bloch seeds: `a_max = (1 + b) / 2^m`, so
/// `p = max(η(1 + b), η'(1 + b'))` and the dual vector is zero.
pub fn solve_mqubit_irreducible(e: &TwoSetEnsemble, g: &GammaSet, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    require_irreducible(e)?;
    let b = state_to_bloch(e.seed(), g)?.radius();
    let b_p = state_to_bloch(e.seed_prime(), g)?.radius();
    let p = (e.eta() * (1.0 + b)).max(e.eta_prime() * (1.0 + b_p));

    // Same value from the top eigenvalues of the seeds.
    let d = e.dim() as f64;
    let (a_max, _) = top_eigenspace(e.seed())?;
    let (a_max_p, _) = top_eigenspace(e.seed_prime())?;
    let p_eig = (e.eta() * a_max * d).max(e.eta_prime() * a_max_p * d);
    if (p - p_eig).abs() > tol.identity {
        return Err(ClosedFormError::IdentityMismatch(format!(
            "η(1+b) form gives {p}, eigenvalue form gives {p_eig}"
        )));
    }

    let data = BlochData::new(e, g)?;
    let x = vec![0.0; g.len()];
    let cand = Candidate::new(Branch::MQubitIrreducible, None, p, assemble(&data, p, &x));
    let sel = select(e, vec![cand], Some(g), tol)?;
    sel.report.ok_or(ClosedFormError::NoBranchCertifies { candidates: sel.summaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blochdirac::{bloch_to_state, dirac_gammas, GeneralizedBlochState};
    use crate::ensembles::{build_spinor_ensemble, pauli_by_name, ThetaTable};

    fn paulis(names: &[&str]) -> Vec<CMat> {
        names.iter().map(|n| pauli_by_name(n).unwrap()).collect()
    }

    fn pure(n: [f64; 3]) -> CMat {
        let g = dirac_gammas(1).unwrap();
        bloch_to_state(&GeneralizedBlochState::normalized(1, 1.0, n.to_vec()).unwrap(), &g).unwrap()
    }

    #[test]
    fn pauli_orbits_of_pure_states() {
        let s = pure([0.3, 0.2, 0.9]);
        let e = TwoSetEnsemble::new(0.125, 0.125, s.clone(), pure([0.0, 1.0, 0.0]), paulis(&["I", "X", "Y", "Z"]), paulis(&["I", "X", "Y", "Z"]))
            .unwrap();
        let r = solve_irreducible(&e, &Tolerances::default()).unwrap();
        assert!((r.p_opt - 0.25).abs() < 1e-12);
        assert!(r.certificate.is_certified());
    }

    #[test]
    fn losing_set_gets_zero_elements() {
        let e = TwoSetEnsemble::new(
            0.25,
            1.0 / 12.0,
            pure([0.0, 0.0, 1.0]),
            pure([1.0, 0.0, 0.0]),
            paulis(&["I", "X", "Y", "Z"])[..3].to_vec(),
            paulis(&["I", "X", "Z"]),
        );
        // {I, X, Y} is irreducible on a qubit.
        let e = e.unwrap();
        let r = solve_irreducible(&e, &Tolerances::default()).unwrap();
        assert!((r.p_opt - 0.5).abs() < 1e-12);
        for el in r.povm.second_set() {
            assert!(el.frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_seeds_reduce_to_priors() {
        let mixed = CMat::identity(2).scale(0.5);
        let e = TwoSetEnsemble::new(0.125, 0.125, mixed.clone(), mixed, paulis(&["I", "X", "Y", "Z"]), paulis(&["I", "X", "Y", "Z"]))
            .unwrap();
        let r = solve_irreducible(&e, &Tolerances::default()).unwrap();
        assert!((r.p_opt - 0.125).abs() < 1e-12);
        assert!(r.certificate.is_certified());
    }

    #[test]
    fn reducible_set_is_refused() {
        let e = TwoSetEnsemble::new(
            0.25,
            0.25,
            pure([0.0, 0.0, 1.0]),
            pure([1.0, 0.0, 0.0]),
            paulis(&["I", "Z"]),
            paulis(&["I", "X"]),
        )
        .unwrap();
        assert!(matches!(
            solve_irreducible(&e, &Tolerances::default()),
            Err(ClosedFormError::NotIrreducible { set: SetLabel::First, .. })
        ));
    }

    #[test]
    fn two_qubit_bloch_seeds_agree_with_eigenvalue_form() {
        let g = dirac_gammas(2).unwrap();
        let seed = GeneralizedBlochState::normalized(2, 0.6, vec![0.2, -0.1, 0.5, 0.3, 0.4]).unwrap();
        let seed_p = GeneralizedBlochState::normalized(2, 0.6, vec![0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        // Rotations by π in every coordinate plane; the group they generate acts irreducibly.
        let tables: Vec<ThetaTable> = std::iter::once(ThetaTable::zeros(2))
            .chain((0..4).map(|i| ThetaTable::from_entries(2, &[(i, i + 1, std::f64::consts::FRAC_PI_2)]).unwrap()))
            .collect();
        let e = build_spinor_ensemble(&g, 0.1, 0.1, &seed, &seed_p, &tables, &tables).unwrap();
        let r = solve_mqubit_irreducible(&e, &g, &Tolerances::default()).unwrap();
        assert!((r.p_opt - 0.1 * 1.6).abs() < 1e-12);
        assert!(r.certificate.is_certified());
        let r2 = solve_irreducible(&e, &Tolerances::default()).unwrap();
        assert!((r.p_opt - r2.p_opt).abs() < 1e-12);
    }
}
