//! Shared machinery for ensembles whose states are generalized Bloch states.
//!
//! A candidate optimum is described by `p` and a dual vector `x` through
//! `M = (p I + x·γ) / 2^m`. For every state, `M − p_k ρ_k` is a multiple of
//! `I + w_k·γ` with `w_k = (x − p_k r_k) / (p − p_k)`, so dual feasibility is
//! `|w_k| ≤ 1` and a state can carry weight only when `|w_k| = 1`, in which
//! case its POVM element is proportional to `I − w_k·γ`.

use serde::{Deserialize, Serialize};

use crate::blochdirac::{state_to_bloch, GammaSet};
use crate::ensembles::{shared_invariant_indices, SetLabel, TwoSetEnsemble};
use crate::povm::Povm;
use crate::qmat::CMat;

use super::weights::{recover_weights, WeightConstraintSystem};
use super::{ClosedFormError, Route};

/// How far `|w|` may sit from 1 and still count as touching the boundary.
pub(crate) const ACTIVE_TOL: f64 = 1e-7;
/// `p − p_k` below this treats the state's gap operator as traceless.
const FLAT_GAP: f64 = 1e-12;

/// Bloch vectors `r_k = b n̂_k` of every state, with priors and the shared
/// invariant index set.
#[derive(Debug, Clone)]
pub(crate) struct BlochData {
    pub gammas: GammaSet,
    pub vectors: Vec<Vec<f64>>,
    pub priors: Vec<f64>,
    pub split: usize,
    pub shared: Vec<usize>,
}

impl BlochData {
    pub fn new(e: &TwoSetEnsemble, g: &GammaSet) -> Result<Self, ClosedFormError> {
        let vectors = e
            .states()
            .iter()
            .map(|rho| state_to_bloch(rho, g).map(|s| s.bloch_vector()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            gammas: g.clone(),
            vectors,
            priors: e.priors(),
            split: e.n(),
            shared: shared_invariant_indices(e, g),
        })
    }

    pub fn seed(&self) -> &[f64] {
        &self.vectors[0]
    }

    pub fn seed_prime(&self) -> &[f64] {
        &self.vectors[self.split]
    }

    /// Weighted seed restricted to the shared invariant indices, and the
    /// weighted length of the remainder: `(η r|_S, η |r − r|_S|)`.
    pub fn reduced(&self, set: SetLabel) -> (Vec<f64>, f64) {
        let (r, prior) = match set {
            SetLabel::First => (self.seed(), self.priors[0]),
            SetLabel::Second => (self.seed_prime(), self.priors[self.split]),
        };
        let mut u = vec![0.0; r.len()];
        let mut rest = 0.0;
        for (i, &ri) in r.iter().enumerate() {
            if self.shared.contains(&i) {
                u[i] = prior * ri;
            } else {
                rest += ri * ri;
            }
        }
        (u, prior * rest.sqrt())
    }
}

/// Build the POVM matching the dual point `(p, x)`: classify every state,
/// give active states the atom `I − ŵ·γ` and solve for the weights.
pub(crate) fn assemble(data: &BlochData, p: f64, x: &[f64]) -> Result<Povm, String> {
    let mut shapes = Vec::with_capacity(data.vectors.len());
    for (k, (r, &prior)) in data.vectors.iter().zip(&data.priors).enumerate() {
        let gap = p - prior;
        let diff: Vec<f64> = x.iter().zip(r).map(|(xi, ri)| xi - prior * ri).collect();
        let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gap < -FLAT_GAP {
            return Err(format!("p below the prior of state {k}"));
        }
        if gap <= FLAT_GAP {
            if norm > 1e-9 {
                return Err(format!("dual infeasible at state {k}: traceless gap with |x − p_k r_k| = {norm:.3e}"));
            }
            shapes.push(Some(vec![0.0; x.len()]));
            continue;
        }
        let w = norm / gap;
        if w > 1.0 + ACTIVE_TOL {
            return Err(format!("dual infeasible at state {k}: |w| = {w:.9}"));
        }
        if w >= 1.0 - ACTIVE_TOL {
            shapes.push(Some(diff.iter().map(|v| -v / norm).collect()));
        } else {
            shapes.push(None);
        }
    }
    povm_from_shapes(data, shapes, None)
}

/// POVM whose element `k` is `λ_k (I + s_k·γ)`; `None` fixes `λ_k = 0`.
/// With `value`, the weights must also give that success probability.
pub(crate) fn povm_from_shapes(data: &BlochData, shapes: Vec<Option<Vec<f64>>>, value: Option<f64>) -> Result<Povm, String> {
    let g = &data.gammas;
    let id = CMat::identity(g.dim());
    let atoms: Vec<Option<CMat>> = shapes.iter().map(|s| s.as_ref().map(|v| &id + &g.dot(v))).collect();
    let mut system = WeightConstraintSystem::completeness(atoms.clone(), data.split).ok_or("no active states")?;
    if let Some(p) = value {
        // p_k Tr(ρ_k (I + s·γ)) = p_k (1 + r_k·s) for ρ_k = (I + r_k·γ)/2^m.
        let coeffs = shapes
            .iter()
            .zip(&data.vectors)
            .zip(&data.priors)
            .map(|((s, r), &pk)| s.as_ref().map_or(0.0, |s| pk * (1.0 + r.iter().zip(s).map(|(a, b)| a * b).sum::<f64>())))
            .collect();
        system = system.with_value(coeffs, p);
    }
    let (first, second) = recover_weights(&system).map_err(|e| e.to_string())?;
    let weights: Vec<f64> = first.into_iter().chain(second).collect();
    let mats = atoms.into_iter().map(|a| a.unwrap_or_else(|| id.clone())).collect();
    let mut povm = Povm::from_weights(weights, mats, data.split).map_err(|e| e.to_string())?;
    povm.bloch = Some(shapes.into_iter().map(|s| s.unwrap_or_else(|| vec![0.0; g.len()])).collect());
    Ok(povm)
}

/// Optimum of the reduced dual: the smallest `p` for which some `x` satisfies
/// `|x − u|² + v² ≤ (p − η)²` and `|x − u'|² + v'² ≤ (p − η')²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub p: f64,
    pub x: Vec<f64>,
    pub route: Route,
    /// Set whose invariant point is the optimum, for vertex solutions.
    pub vertex: Option<SetLabel>,
}

/// Solve the reduced dual. The optimal `x` lies on the segment `[u, u']`;
/// either one ball alone already reaches the other (a vertex) or both
/// constraints are tight and `p` is found by bisection.
pub fn segment_dual(eta: f64, eta_prime: f64, u: &[f64], u_prime: &[f64], v: f64, v_prime: f64) -> DualPoint {
    let len = u.iter().zip(u_prime).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let reach = |p: f64, prior: f64, w: f64| ((p - prior).powi(2) - w * w).max(0.0).sqrt();
    let (lo_first, lo_second) = (eta + v, eta_prime + v_prime);
    let first_wins = lo_first >= lo_second;
    let p_lo = lo_first.max(lo_second);
    let g = |p: f64| reach(p, eta, v) + reach(p, eta_prime, v_prime) - len;
    if len == 0.0 || g(p_lo) >= 0.0 {
        let label = if first_wins { SetLabel::First } else { SetLabel::Second };
        let x = if first_wins || len == 0.0 { u.to_vec() } else { u_prime.to_vec() };
        return DualPoint { p: p_lo, x, route: Route::Vertex, vertex: Some(label) };
    }
    let (mut lo, mut hi) = (p_lo, p_lo + len);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = hi;
    let s = reach(p, eta, v).min(len);
    let x = u.iter().zip(u_prime).map(|(a, b)| a + s * (b - a) / len).collect();
    DualPoint { p, x, route: Route::Derived, vertex: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_when_one_ball_covers_the_other() {
        let d = segment_dual(0.4, 0.1, &[0.0, 0.0, 0.1], &[0.0, 0.0, -0.05], 0.3, 0.05);
        assert_eq!(d.route, Route::Vertex);
        assert_eq!(d.vertex, Some(SetLabel::First));
        assert!((d.p - 0.7).abs() < 1e-15);
    }

    #[test]
    fn bisection_makes_both_constraints_tight() {
        let (u, up) = ([0.0, 0.0, 0.3], [0.0, 0.0, -0.3]);
        let d = segment_dual(0.25, 0.25, &u, &up, 0.1, 0.2);
        assert_eq!(d.route, Route::Derived);
        let lhs = |c: &[f64], w: f64, prior: f64| {
            let dist2: f64 = d.x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum();
            (dist2 + w * w).sqrt() - (d.p - prior)
        };
        assert!(lhs(&u, 0.1, 0.25).abs() < 1e-12);
        assert!(lhs(&up, 0.2, 0.25).abs() < 1e-12);
    }

    #[test]
    fn coincident_centres_give_a_vertex() {
        let d = segment_dual(0.2, 0.3, &[0.1], &[0.1], 0.5, 0.1);
        assert_eq!(d.route, Route::Vertex);
        assert!((d.p - 0.7).abs() < 1e-15);
    }
}
