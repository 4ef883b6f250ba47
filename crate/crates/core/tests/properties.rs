use std::f64::consts::PI;

use medkit::blochdirac::{dirac_gammas, GeneralizedBlochState};
use medkit::certify::certificate;
use medkit::closedform::{solve, solve_qubit_two_sets, Branch, SolveReport};
use medkit::ensembles::build_qubit_zrotation_ensemble;
use medkit::qmat::{eig_herm, expi_herm};
use medkit::{CMat, Tolerances, TwoSetEnsemble, C64};
use proptest::prelude::*;

fn qubit(b: f64, nz: f64, phi: f64) -> GeneralizedBlochState {
    let s = (1.0 - nz * nz).max(0.0).sqrt();
    GeneralizedBlochState::normalized(1, b, vec![s * phi.cos(), s * phi.sin(), nz]).unwrap()
}

fn evenly(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Seeds `(b, n_z, φ)` for both sets, set sizes and the first set's share of
/// the prior mass.
fn zrotation() -> impl Strategy<Value = TwoSetEnsemble> {
    let seed = (0.2..1.0f64, -0.95..0.95f64, 0.0..2.0 * PI);
    (seed.clone(), seed, 2..=4usize, 2..=4usize, 0.05..0.95f64).prop_map(|((b, nz, phi), (bp, nzp, phip), n, np, share)| {
        let eta = share / n as f64;
        let eta_p = (1.0 - share) / np as f64;
        build_qubit_zrotation_ensemble(eta, eta_p, &qubit(b, nz, phi), &qubit(bp, nzp, phip), &evenly(n), &evenly(np)).unwrap()
    })
}

fn unitary() -> impl Strategy<Value = CMat> {
    proptest::collection::vec(-2.0..2.0f64, 4).prop_map(|h| {
        let m = CMat::from_rows(vec![
            vec![C64::new(h[0], 0.0), C64::new(h[2], h[3])],
            vec![C64::new(h[2], -h[3]), C64::new(h[1], 0.0)],
        ])
        .unwrap();
        expi_herm(&m).unwrap()
    })
}

fn certified(e: &TwoSetEnsemble) -> Option<SolveReport> {
    solve_qubit_two_sets(e, &Tolerances::default()).ok().filter(|r| r.certificate.is_certified())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn optimum_is_at_least_the_larger_prior(e in zrotation()) {
        if let Some(r) = certified(&e) {
            prop_assert!(r.p_opt >= e.eta().max(e.eta_prime()) - 1e-12);
            prop_assert!(r.p_opt <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn conjugating_the_ensemble_keeps_the_optimum(e in zrotation(), v in unitary()) {
        let Some(r) = certified(&e) else { return Ok(()) };
        let ev = e.conjugated(&v).unwrap();
        // The conjugated POVM certifies at the same value on the conjugated ensemble.
        let cert = certificate(&ev, &r.povm.conjugated(&v), r.p_opt, &Tolerances::default()).unwrap();
        prop_assert!(cert.is_certified(), "{}", cert);
        // A fresh closed-form solve of the rotated ensemble agrees.
        let rv = solve(&ev, Some(&dirac_gammas(1).unwrap()), &Tolerances::default()).unwrap();
        prop_assert!((rv.p_opt - r.p_opt).abs() <= 1e-10, "{} vs {}", rv.p_opt, r.p_opt);
        prop_assert!(rv.certificate.is_certified());
    }

    #[test]
    fn chosen_root_dominates_and_is_admissible(e in zrotation()) {
        let Some(r) = certified(&e) else { return Ok(()) };
        if r.branch != Branch::QubitCase(1) {
            return Ok(());
        }
        let q = r.quadratic.as_ref().expect("Case 1 reports its quadratic");
        let chosen = q.chosen.expect("certified Case 1 has a chosen root");
        prop_assert!((chosen - r.p_opt).abs() <= 1e-12);
        prop_assert!(chosen >= e.eta().max(e.eta_prime()) - 1e-12 && chosen <= 1.0 + 1e-12);
        if let Some(other) = q.discarded {
            prop_assert!(chosen >= other - 1e-12, "chosen {} < discarded {}", chosen, other);
        }
    }

    #[test]
    fn case_one_measurement_directions_straddle_the_equator(e in zrotation()) {
        let Some(r) = certified(&e) else { return Ok(()) };
        if r.branch != Branch::QubitCase(1) {
            return Ok(());
        }
        let bloch = r.povm.bloch.as_ref().expect("Bloch shapes");
        let w = r.povm.weights().expect("weights");
        let split = r.povm.split();
        let first = (0..split).find(|&k| w[k] > 1e-12).map(|k| bloch[k][2]);
        let second = (split..w.len()).find(|&k| w[k] > 1e-12).map(|k| bloch[k][2]);
        prop_assert!(matches!((first, second), (Some(a), Some(b)) if a * b < 0.0));
    }

    #[test]
    fn every_state_keeps_its_seed_spectrum(e in zrotation()) {
        let (n, states) = (e.n(), e.states());
        for (k, rho) in states.iter().enumerate() {
            let seed = if k < n { e.seed() } else { e.seed_prime() };
            let (a, b) = (eig_herm(rho).unwrap(), eig_herm(seed).unwrap());
            prop_assert!((a.max_value() - b.max_value()).abs() <= 1e-12);
            prop_assert!((a.min_value() - b.min_value()).abs() <= 1e-12);
        }
    }
}
