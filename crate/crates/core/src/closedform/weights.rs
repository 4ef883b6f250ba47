//! Nonnegative weights for POVM atoms so that they resolve the identity.
//!
//! The closed forms fix the shape of every optimal POVM element but leave the
//! weights underdetermined. Any nonnegative solution of `Σ c_k A_k = I` is
//! equally optimal; we pick the one maximizing the smallest weight so every
//! state that can participate does.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::qmat::{hermitian_coordinates, CMat};

/// Largest acceptable L1 residual of the best nonnegative fit.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("no nonnegative weights reproduce the target (L1 residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("no active atoms")]
    NoAtoms,
    #[error("atom dimension {got} differs from target dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("linear program failed: {0}")]
    Solver(String),
}

/// Linear system `Σ_k c_k A_k = target`, `c ≥ 0`, over the states of both
/// sets. `None` atoms are inactive states whose weight is fixed at zero.
#[derive(Debug, Clone)]
pub struct WeightConstraintSystem {
    pub atoms: Vec<Option<CMat>>,
    pub target: CMat,
    /// Number of first-set states.
    pub split: usize,
    /// Optional extra row `Σ_k r_k c_k = value`, one coefficient per atom.
    /// With `r_k = p_k Tr(ρ_k A_k)` it pins the success probability.
    pub value_row: Option<(Vec<f64>, f64)>,
}

impl WeightConstraintSystem {
    pub fn completeness(atoms: Vec<Option<CMat>>, split: usize) -> Option<Self> {
        let d = atoms.iter().flatten().next()?.dim();
        Some(Self { atoms, target: CMat::identity(d), split, value_row: None })
    }

    pub fn with_value(mut self, coefficients: Vec<f64>, value: f64) -> Self {
        self.value_row = Some((coefficients, value));
        self
    }
}

/// Weights `(λ, λ')` for the first and second set.
pub fn recover_weights(system: &WeightConstraintSystem) -> Result<(Vec<f64>, Vec<f64>), WeightError> {
    let active: Vec<&CMat> = system.atoms.iter().flatten().collect();
    let extra = system.value_row.as_ref().map(|(coeffs, value)| {
        let row: Vec<f64> = system.atoms.iter().zip(coeffs).filter(|(a, _)| a.is_some()).map(|(_, &r)| r).collect();
        (row, *value)
    });
    let solved = solve_weight_rows(&active, &system.target, extra.as_ref())?;
    let mut it = solved.into_iter();
    let all: Vec<f64> = system
        .atoms
        .iter()
        .map(|a| if a.is_some() { it.next().unwrap_or(0.0) } else { 0.0 })
        .collect();
    let (first, second) = all.split_at(system.split.min(all.len()));
    Ok((first.to_vec(), second.to_vec()))
}

/// Max–min nonnegative weights for a list of Hermitian atoms.
pub fn solve_atom_weights(atoms: &[&CMat], target: &CMat) -> Result<Vec<f64>, WeightError> {
    solve_weight_rows(atoms, target, None)
}

fn solve_weight_rows(atoms: &[&CMat], target: &CMat, extra: Option<&(Vec<f64>, f64)>) -> Result<Vec<f64>, WeightError> {
    if atoms.is_empty() {
        return Err(WeightError::NoAtoms);
    }
    let d = target.dim();
    if let Some(a) = atoms.iter().find(|a| a.dim() != d) {
        return Err(WeightError::DimensionMismatch { got: a.dim(), expected: d });
    }
    let mut cols: Vec<Vec<f64>> = atoms.iter().map(|a| hermitian_coordinates(a)).collect();
    let mut b = hermitian_coordinates(target);
    if let Some((row, value)) = extra {
        for (col, r) in cols.iter_mut().zip(row) {
            col.push(*r);
        }
        b.push(*value);
    }
    let rows = b.len();
    let k = atoms.len();

    // Stage 1: smallest L1 residual. Always feasible, so failures are solver trouble.
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let c: Vec<_> = (0..k).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for r in 0..rows {
        let plus = lp.add_var(1.0, (0.0, f64::INFINITY));
        let minus = lp.add_var(1.0, (0.0, f64::INFINITY));
        let mut expr: Vec<_> = (0..k).filter(|&j| cols[j][r] != 0.0).map(|j| (c[j], cols[j][r])).collect();
        expr.push((plus, 1.0));
        expr.push((minus, -1.0));
        lp.add_constraint(expr, ComparisonOp::Eq, b[r]);
    }
    let sol = lp
        .solve()
        .map_err(|e| WeightError::Solver(e.to_string()))?
        .into_solution()
        .map_err(|_| WeightError::Solver("interrupted".into()))?;
    let residual = sol.objective();
    if residual > FEASIBILITY_TOL {
        return Err(WeightError::Infeasible { residual });
    }
    let stage1: Vec<f64> = c.iter().map(|&v| sol.var_value(v).max(0.0)).collect();

    // Stage 2: maximize the smallest weight inside a thin band around the fit.
    let band = 1e-11 + residual;
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let c2: Vec<_> = (0..k).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    for &cj in &c2 {
        lp.add_constraint([(cj, 1.0), (t, -1.0)], ComparisonOp::Ge, 0.0);
    }
    for r in 0..rows {
        let expr: Vec<_> = (0..k).filter(|&j| cols[j][r] != 0.0).map(|j| (c2[j], cols[j][r])).collect();
        if expr.is_empty() {
            continue;
        }
        lp.add_constraint(expr.clone(), ComparisonOp::Le, b[r] + band);
        lp.add_constraint(expr, ComparisonOp::Ge, b[r] - band);
    }
    let weights = match lp.solve().ok().and_then(|o| o.into_solution().ok()) {
        Some(sol) => c2.iter().map(|&v| sol.var_value(v).max(0.0)).collect(),
        None => stage1,
    };
    Ok(polish(&cols, &b, weights))
}

/// One least-squares correction on the support of `w`, kept only if it stays
/// nonnegative and reduces the residual.
fn polish(cols: &[Vec<f64>], b: &[f64], w: Vec<f64>) -> Vec<f64> {
    let support: Vec<usize> = (0..w.len()).filter(|&j| w[j] > 1e-12).collect();
    if support.is_empty() {
        return w;
    }
    let rows = b.len();
    let a = DMatrix::from_fn(rows, support.len(), |r, s| cols[support[s]][r]);
    let ws = DVector::from_iterator(support.len(), support.iter().map(|&j| w[j]));
    let bv = DVector::from_column_slice(b);
    let resid = &a * &ws - &bv;
    let before = resid.norm();
    if before == 0.0 {
        return w;
    }
    let Ok(step) = a.clone().svd(true, true).solve(&resid, 1e-12) else { return w };
    let candidate = &ws - step;
    if candidate.iter().any(|&x| x < 0.0) || (&a * &candidate - &bv).norm() >= before {
        return w;
    }
    let mut out = w;
    for (s, &j) in support.iter().enumerate() {
        out[j] = candidate[s];
    }
    out
}
