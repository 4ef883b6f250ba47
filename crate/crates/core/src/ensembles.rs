//! Two sets of equiprobable states generated from one seed each by unitary
//! similarity transformations, plus irreducibility diagnostics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blochdirac::{bloch_to_state, BlochError, GammaSet, GeneralizedBlochState};
use crate::qmat::{expi_herm, min_eigenvalue, paulis, CMat, QmatError, C64};

/// Tolerance on `n η + n' η' = 1`.
pub const PRIOR_TOL: f64 = 1e-12;
/// Unitarity, generator invariance and state validity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for the commutant null space.
pub const NULL_SPACE_REL_TOL: f64 = 1e-8;
pub const DEFAULT_CLOSURE_CAP: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("priors violate the normalization n*eta + n'*eta' = 1: {n}*{eta} + {n_prime}*{eta_prime} = {total}")]
    PriorMismatch { n: usize, eta: f64, n_prime: usize, eta_prime: f64, total: f64 },
    #[error("prior {0} is negative or not finite")]
    InvalidPrior(f64),
    #[error("{set} set is empty; each set needs at least one state")]
    EmptySet { set: SetLabel },
    #[error("{set} unitary {index} is not unitary (|U^dag U - I| = {residual:.3e})")]
    NotUnitary { set: SetLabel, index: usize, residual: f64 },
    #[error("the first {set} unitary must be the identity")]
    FirstNotIdentity { set: SetLabel },
    #[error("{set} seed is not a density matrix: {reason}")]
    InvalidSeed { set: SetLabel, reason: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spinor exponent for state {index} is not Hermitian (residual {residual:.3e})")]
    NonHermitianExponent { index: usize, residual: f64 },
    #[error("angle table for state {index}: {reason}")]
    BadAngleTable { index: usize, reason: String },
    #[error("group generated by the listed unitaries exceeds {cap} elements")]
    ClosureCapExceeded { cap: usize },
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Matrix(#[from] QmatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetLabel {
    First,
    Second,
}

impl std::fmt::Display for SetLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SetLabel::First => "first",
            SetLabel::Second => "second",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoSetEnsemble {
    eta: f64,
    eta_prime: f64,
    seed: CMat,
    seed_prime: CMat,
    unitaries: Vec<CMat>,
    unitaries_prime: Vec<CMat>,
}

impl TwoSetEnsemble {
    pub fn new(
        eta: f64,
        eta_prime: f64,
        seed: CMat,
        seed_prime: CMat,
        unitaries: Vec<CMat>,
        unitaries_prime: Vec<CMat>,
    ) -> Result<Self, EnsembleError> {
        for p in [eta, eta_prime] {
            if !p.is_finite() || p < 0.0 {
                return Err(EnsembleError::InvalidPrior(p));
            }
        }
        let (n, n_prime) = (unitaries.len(), unitaries_prime.len());
        if n == 0 {
            return Err(EnsembleError::EmptySet { set: SetLabel::First });
        }
        if n_prime == 0 {
            return Err(EnsembleError::EmptySet { set: SetLabel::Second });
        }
        let total = n as f64 * eta + n_prime as f64 * eta_prime;
        if (total - 1.0).abs() > PRIOR_TOL {
            return Err(EnsembleError::PriorMismatch { n, eta, n_prime, eta_prime, total });
        }
        let d = seed.dim();
        if seed_prime.dim() != d {
            return Err(EnsembleError::DimensionMismatch { expected: d, got: seed_prime.dim() });
        }
        validate_density(&seed, SetLabel::First)?;
        validate_density(&seed_prime, SetLabel::Second)?;
        let unitaries = validate_unitaries(unitaries, d, SetLabel::First)?;
        let unitaries_prime = validate_unitaries(unitaries_prime, d, SetLabel::Second)?;
        Ok(Self { eta, eta_prime, seed, seed_prime, unitaries, unitaries_prime })
    }

    pub fn dim(&self) -> usize {
        self.seed.dim()
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn eta_prime(&self) -> f64 {
        self.eta_prime
    }
    pub fn n(&self) -> usize {
        self.unitaries.len()
    }
    pub fn n_prime(&self) -> usize {
        self.unitaries_prime.len()
    }
    /// Total number of states, `n + n'`.
    pub fn len(&self) -> usize {
        self.n() + self.n_prime()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn seed(&self) -> &CMat {
        &self.seed
    }
    pub fn seed_prime(&self) -> &CMat {
        &self.seed_prime
    }
    pub fn unitaries(&self) -> &[CMat] {
        &self.unitaries
    }
    pub fn unitaries_prime(&self) -> &[CMat] {
        &self.unitaries_prime
    }

    /// Prior of every state, first set then second set.
    pub fn priors(&self) -> Vec<f64> {
        let mut p = vec![self.eta; self.n()];
        p.extend(std::iter::repeat_n(self.eta_prime, self.n_prime()));
        p
    }

    /// Every state, first set then second set.
    pub fn states(&self) -> Vec<CMat> {
        let (mut a, b) = make_states(self);
        a.extend(b);
        a
    }

    /// `p_j ρ_j` for every state.
    pub fn weighted_states(&self) -> Vec<CMat> {
        self.states().iter().zip(self.priors()).map(|(r, p)| r.scale(p)).collect()
    }

    pub fn all_unitaries(&self) -> impl Iterator<Item = &CMat> {
        self.unitaries.iter().chain(&self.unitaries_prime)
    }

    /// The same ensemble seen in a rotated basis: `ρ -> V ρ V†`, `U -> V U V†`.
    pub fn conjugated(&self, v: &CMat) -> Result<Self, EnsembleError> {
        Self::new(
            self.eta,
            self.eta_prime,
            self.seed.conjugate_by(v),
            self.seed_prime.conjugate_by(v),
            self.unitaries.iter().map(|u| u.conjugate_by(v)).collect(),
            self.unitaries_prime.iter().map(|u| u.conjugate_by(v)).collect(),
        )
    }
}

fn validate_density(rho: &CMat, set: SetLabel) -> Result<(), EnsembleError> {
    let bad = |reason: String| EnsembleError::InvalidSeed { set, reason };
    if !rho.is_hermitian(UNITARY_TOL) {
        return Err(bad("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > UNITARY_TOL || tr.im.abs() > UNITARY_TOL {
        return Err(bad(format!("trace {tr} differs from 1")));
    }
    let min = min_eigenvalue(rho)?;
    if min < -UNITARY_TOL {
        return Err(bad(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

fn validate_unitaries(us: Vec<CMat>, d: usize, set: SetLabel) -> Result<Vec<CMat>, EnsembleError> {
    let id = CMat::identity(d);
    let mut out = Vec::with_capacity(us.len());
    for (index, u) in us.into_iter().enumerate() {
        if u.dim() != d {
            return Err(EnsembleError::DimensionMismatch { expected: d, got: u.dim() });
        }
        let residual = (&u.adjoint() * &u).distance(&id);
        if residual > UNITARY_TOL || !u.is_finite() {
            return Err(EnsembleError::NotUnitary { set, index, residual });
        }
        if index == 0 {
            if u.distance(&id) > PRIOR_TOL {
                return Err(EnsembleError::FirstNotIdentity { set });
            }
            out.push(id.clone());
        } else {
            out.push(u);
        }
    }
    Ok(out)
}

/// `ρ_j = U_j ρ₁ U_j†` and `ρ'_j = U'_j ρ'₁ U'_j†`.
pub fn make_states(e: &TwoSetEnsemble) -> (Vec<CMat>, Vec<CMat>) {
    let first = e.unitaries.iter().map(|u| e.seed.conjugate_by(u).hermitian_part()).collect();
    let second = e.unitaries_prime.iter().map(|u| e.seed_prime.conjugate_by(u).hermitian_part()).collect();
    (first, second)
}

/// `exp(-i α σ_z / 2)`: rotation of Bloch vectors about z by α.
pub fn zrotation(angle: f64) -> CMat {
    let mut u = CMat::zeros(2);
    u[(0, 0)] = C64::from_polar(1.0, -angle / 2.0);
    u[(1, 1)] = C64::from_polar(1.0, angle / 2.0);
    u
}

pub fn build_qubit_zrotation_ensemble(
    eta: f64,
    eta_prime: f64,
    seed: &GeneralizedBlochState,
    seed_prime: &GeneralizedBlochState,
    angles: &[f64],
    angles_prime: &[f64],
) -> Result<TwoSetEnsemble, EnsembleError> {
    let g = crate::blochdirac::dirac_gammas(1)?;
    let rotations = |angles: &[f64], set| -> Result<Vec<CMat>, EnsembleError> {
        match angles.first() {
            None => Err(EnsembleError::EmptySet { set }),
            Some(&a) if a != 0.0 => Err(EnsembleError::FirstNotIdentity { set }),
            _ => Ok(angles.iter().map(|&a| zrotation(a)).collect()),
        }
    };
    TwoSetEnsemble::new(
        eta,
        eta_prime,
        bloch_to_state(seed, &g)?,
        bloch_to_state(seed_prime, &g)?,
        rotations(angles, SetLabel::First)?,
        rotations(angles_prime, SetLabel::Second)?,
    )
}

/// Antisymmetric table of rotation angles `θ_ik` over the `2m + 1` generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTable {
    size: usize,
    theta: Vec<f64>,
}

impl ThetaTable {
    pub fn zeros(m: usize) -> Self {
        let size = 2 * m + 1;
        Self { size, theta: vec![0.0; size * size] }
    }

    /// Entries `(i, k, θ)` with zero-based generator indices, `i != k`.
    pub fn from_entries(m: usize, entries: &[(usize, usize, f64)]) -> Result<Self, String> {
        let mut t = Self::zeros(m);
        for &(i, k, th) in entries {
            if i >= t.size || k >= t.size {
                return Err(format!("generator index out of range 0..{}", t.size));
            }
            if i == k {
                return Err(format!("diagonal entry ({i}, {k}) is not allowed"));
            }
            t.theta[i * t.size + k] += th;
            t.theta[k * t.size + i] -= th;
        }
        Ok(t)
    }

    /// Full matrix; must be antisymmetric to 1e-12.
    pub fn from_dense(rows: Vec<Vec<f64>>) -> Result<Self, String> {
        let size = rows.len();
        if size < 3 || size % 2 == 0 {
            return Err(format!("table size {size} is not 2m + 1"));
        }
        let mut theta = Vec::with_capacity(size * size);
        for r in &rows {
            if r.len() != size {
                return Err("table is not square".into());
            }
            theta.extend_from_slice(r);
        }
        for i in 0..size {
            for k in 0..size {
                if (theta[i * size + k] + theta[k * size + i]).abs() > 1e-12 {
                    return Err(format!("entries ({i}, {k}) and ({k}, {i}) are not antisymmetric"));
                }
            }
        }
        Ok(Self { size, theta })
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.theta[i * self.size + k]
    }

    pub fn is_zero(&self) -> bool {
        self.theta.iter().all(|&x| x == 0.0)
    }
}

/// `exp(-Σ_{i<k} θ_ik γ_i γ_k)`, computed as `exp(iH)` with the Hermitian
/// exponent `H = Σ_{i<k} θ_ik (i γ_i γ_k)`.
pub fn spinor_unitary(g: &GammaSet, table: &ThetaTable, index: usize) -> Result<CMat, EnsembleError> {
    if table.size != g.len() {
        return Err(EnsembleError::BadAngleTable {
            index,
            reason: format!("table size {} does not match {} generators", table.size, g.len()),
        });
    }
    let mut h = CMat::zeros(g.dim());
    for i in 0..g.len() {
        for k in (i + 1)..g.len() {
            let th = table.get(i, k);
            if th != 0.0 {
                let gg = (g.get(i) * g.get(k)).scale_c(C64::new(0.0, 1.0));
                h.axpy(th, &gg);
            }
        }
    }
    let residual = h.hermiticity_residual();
    if residual > UNITARY_TOL * h.frobenius_norm().max(1.0) {
        return Err(EnsembleError::NonHermitianExponent { index, residual });
    }
    Ok(expi_herm(&h.hermitian_part())?)
}

pub fn build_spinor_ensemble(
    g: &GammaSet,
    eta: f64,
    eta_prime: f64,
    seed: &GeneralizedBlochState,
    seed_prime: &GeneralizedBlochState,
    tables: &[ThetaTable],
    tables_prime: &[ThetaTable],
) -> Result<TwoSetEnsemble, EnsembleError> {
    let unitaries = |tables: &[ThetaTable], set| -> Result<Vec<CMat>, EnsembleError> {
        match tables.first() {
            None => return Err(EnsembleError::EmptySet { set }),
            Some(t) if !t.is_zero() => return Err(EnsembleError::FirstNotIdentity { set }),
            _ => {}
        }
        tables.iter().enumerate().map(|(i, t)| spinor_unitary(g, t, i)).collect()
    };
    TwoSetEnsemble::new(
        eta,
        eta_prime,
        bloch_to_state(seed, g)?,
        bloch_to_state(seed_prime, g)?,
        unitaries(tables, SetLabel::First)?,
        unitaries(tables_prime, SetLabel::Second)?,
    )
}

/// Pauli group element by name: `I`, `X`, `Y` or `Z`.
pub fn pauli_by_name(name: &str) -> Option<CMat> {
    let [x, y, z] = paulis();
    match name {
        "I" | "i" => Some(CMat::identity(2)),
        "X" | "x" => Some(x),
        "Y" | "y" => Some(y),
        "Z" | "z" => Some(z),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub commutant_dim: usize,
    pub is_irreducible: bool,
    /// Zero-based generator indices fixed by every unitary (only with a gamma set).
    pub invariant_indices: Option<Vec<usize>>,
    pub variant_indices: Option<Vec<usize>>,
}

/// Dimension of `{X : U X = X U for all U}`, from the singular values of the
/// stacked commutator maps `X -> U X - X U`.
pub fn commutant_dim(unitaries: &[CMat]) -> Result<usize, EnsembleError> {
    let d = unitaries.first().map(|u| u.dim()).unwrap_or(1);
    let dd = d * d;
    let id = CMat::identity(d);
    let mut stacked: Option<DMatrix<C64>> = None;
    for u in unitaries {
        if u.dim() != d {
            return Err(EnsembleError::DimensionMismatch { expected: d, got: u.dim() });
        }
        if u.distance(&id) == 0.0 {
            continue;
        }
        // Row (r, c) of U X - X U against column (a, b) of X:
        // U[r][a] δ(b, c) - δ(r, a) U[b][c].
        let mut block = DMatrix::<C64>::zeros(dd, dd);
        for r in 0..d {
            for c in 0..d {
                let row = r * d + c;
                for a in 0..d {
                    block[(row, a * d + c)] += u[(r, a)];
                }
                for b in 0..d {
                    block[(row, r * d + b)] -= u[(b, c)];
                }
            }
        }
        stacked = Some(match stacked {
            None => block,
            Some(prev) => {
                let rows = prev.nrows() + dd;
                let mut both = DMatrix::<C64>::zeros(rows, dd);
                both.rows_mut(0, prev.nrows()).copy_from(&prev);
                both.rows_mut(prev.nrows(), dd).copy_from(&block);
                // Keep the stack square: R from a QR has the same singular values.
                both.qr().r()
            }
        });
    }
    let Some(a) = stacked else { return Ok(dd) };
    let sv = a.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(dd);
    }
    let rank = sv.iter().filter(|&&s| s > NULL_SPACE_REL_TOL * smax).count();
    Ok(dd - rank)
}

/// Schur test: the listed unitaries act irreducibly iff only scalars commute
/// with all of them. The commutant of a set equals that of the group it
/// generates, so no closure is needed here.
pub fn irreducibility_test(unitaries: &[CMat]) -> Result<IrreducibilityReport, EnsembleError> {
    let commutant_dim = commutant_dim(unitaries)?;
    Ok(IrreducibilityReport {
        commutant_dim,
        is_irreducible: commutant_dim == 1,
        invariant_indices: None,
        variant_indices: None,
    })
}

/// Split generator indices into those fixed by every `U γ_i U†` and the rest.
pub fn invariant_index_sets(unitaries: &[CMat], g: &GammaSet) -> Result<IrreducibilityReport, EnsembleError> {
    let mut report = irreducibility_test(unitaries)?;
    let mut fixed = vec![true; g.len()];
    for u in unitaries {
        if u.dim() != g.dim() {
            return Err(EnsembleError::DimensionMismatch { expected: g.dim(), got: u.dim() });
        }
        for (f, ok) in fixed.iter_mut().zip(g.fixed_by(u, UNITARY_TOL)) {
            *f &= ok;
        }
    }
    report.invariant_indices = Some((0..g.len()).filter(|&i| fixed[i]).collect());
    report.variant_indices = Some((0..g.len()).filter(|&i| !fixed[i]).collect());
    Ok(report)
}

/// Generator indices fixed by both sets of unitaries.
pub fn shared_invariant_indices(e: &TwoSetEnsemble, g: &GammaSet) -> Vec<usize> {
    let mut fixed = vec![true; g.len()];
    for u in e.all_unitaries() {
        for (f, ok) in fixed.iter_mut().zip(g.fixed_by(u, UNITARY_TOL)) {
            *f &= ok;
        }
    }
    (0..g.len()).filter(|&i| fixed[i]).collect()
}

fn equal_up_to_phase(a: &CMat, b: &CMat) -> bool {
    let Some(k) = a.as_slice().iter().position(|z| z.norm() > 1e-6) else {
        return b.frobenius_norm() < 1e-8;
    };
    let bk = b.as_slice()[k];
    if bk.norm() < 1e-9 {
        return false;
    }
    let phase = bk / a.as_slice()[k];
    let phase = phase / phase.norm();
    a.scale_c(phase).distance(b) < 1e-8
}

/// Closure of the listed unitaries under multiplication, identified up to a
/// global phase.
pub fn group_closure(unitaries: &[CMat], cap: usize) -> Result<Vec<CMat>, EnsembleError> {
    let Some(first) = unitaries.first() else { return Ok(Vec::new()) };
    let mut elements = vec![CMat::identity(first.dim())];
    let mut frontier = vec![0usize];
    let push = |m: CMat, elements: &mut Vec<CMat>| -> Result<Option<usize>, EnsembleError> {
        if elements.iter().any(|e| equal_up_to_phase(e, &m)) {
            return Ok(None);
        }
        if elements.len() >= cap {
            return Err(EnsembleError::ClosureCapExceeded { cap });
        }
        elements.push(m);
        Ok(Some(elements.len() - 1))
    };
    for u in unitaries {
        if let Some(i) = push(u.clone(), &mut elements)? {
            frontier.push(i);
        }
    }
    while let Some(i) = frontier.pop() {
        for u in unitaries {
            let prod = u * &elements[i];
            if let Some(j) = push(prod, &mut elements)? {
                frontier.push(j);
            }
        }
    }
    Ok(elements)
}
