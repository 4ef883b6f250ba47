//! Dirac gamma matrices and generalized Bloch states `(I + a n·γ) / 2^m`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qmat::{paulis, CMat, QmatError};

pub const MAX_GAMMA_ORDER: usize = 4;

/// Reconstruction threshold separating family members from everything else.
pub const OUTSIDE_FAMILY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlochError {
    #[error("gamma order m = {0} is outside 1..={MAX_GAMMA_ORDER}")]
    DimensionTooLarge(usize),
    #[error("Bloch state has m = {state}, gamma set has m = {gammas}")]
    DimensionMismatch { state: usize, gammas: usize },
    #[error("direction has {got} components, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("direction is not a unit vector (norm {0})")]
    NotUnitVector(f64),
    #[error("radius {0} is outside [0, 1]")]
    RadiusOutOfRange(f64),
    #[error("state is not in the generalized Bloch family (reconstruction error {0:.3e})")]
    OutsideFamily(f64),
    #[error("state has trace {0}, expected 1")]
    NotUnitTrace(f64),
    #[error("zero radius: the Bloch direction is undefined")]
    ZeroRadius,
    #[error(transparent)]
    Matrix(#[from] QmatError),
}

/// The `2m + 1` mutually anticommuting Hermitian generators in dimension `2^m`.
#[derive(Debug, Clone)]
pub struct GammaSet {
    m: usize,
    gammas: Vec<CMat>,
}

impl GammaSet {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    pub fn get(&self, i: usize) -> &CMat {
        &self.gammas[i]
    }

    /// `Σ_i v_i γ_i` for an arbitrary real vector.
    pub fn dot(&self, v: &[f64]) -> CMat {
        assert_eq!(v.len(), self.gammas.len(), "vector length must be 2m + 1");
        let mut out = CMat::zeros(self.dim());
        for (g, &c) in self.gammas.iter().zip(v) {
            if c != 0.0 {
                out.axpy(c, g);
            }
        }
        out
    }

    /// Components `Tr(X γ_i) / 2^m`: the coordinates of `X` along each generator.
    pub fn components(&self, x: &CMat) -> Vec<f64> {
        let d = self.dim() as f64;
        self.gammas.iter().map(|g| x.trace_product(g).re / d).collect()
    }

    /// Which generators are fixed by conjugation with `u`.
    pub fn fixed_by(&self, u: &CMat, tol: f64) -> Vec<bool> {
        self.gammas.iter().map(|g| g.conjugate_by(u).distance(g) <= tol).collect()
    }
}

/// Recursive construction: Pauli triple for m = 1, then `γ_i ⊗ σ_z`
/// followed by `I ⊗ σ_x` and `I ⊗ σ_y`.
pub fn dirac_gammas(m: usize) -> Result<GammaSet, BlochError> {
    if m == 0 || m > MAX_GAMMA_ORDER {
        return Err(BlochError::DimensionTooLarge(m));
    }
    let [sx, sy, sz] = paulis();
    let mut gammas = vec![sx.clone(), sy.clone(), sz.clone()];
    for level in 1..m {
        let id = CMat::identity(1 << level);
        let mut next: Vec<CMat> = gammas.iter().map(|g| g.kron(&sz)).collect();
        next.push(id.kron(&sx));
        next.push(id.kron(&sy));
        gammas = next;
    }
    Ok(GammaSet { m, gammas })
}

/// `ρ = (I + a n̂·γ) / 2^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedBlochState {
    m: usize,
    radius: f64,
    direction: Vec<f64>,
}

impl GeneralizedBlochState {
    pub fn new(m: usize, radius: f64, direction: Vec<f64>) -> Result<Self, BlochError> {
        if m == 0 || m > MAX_GAMMA_ORDER {
            return Err(BlochError::DimensionTooLarge(m));
        }
        if direction.len() != 2 * m + 1 {
            return Err(BlochError::WrongLength { got: direction.len(), expected: 2 * m + 1 });
        }
        if !(0.0..=1.0).contains(&radius) {
            return Err(BlochError::RadiusOutOfRange(radius));
        }
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(BlochError::NotUnitVector(norm));
        }
        Ok(Self { m, radius, direction })
    }

    /// Like [`new`](Self::new) but rescales the direction to unit length first.
    pub fn normalized(m: usize, radius: f64, direction: Vec<f64>) -> Result<Self, BlochError> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(BlochError::NotUnitVector(norm));
        }
        Self::new(m, radius, direction.into_iter().map(|x| x / norm).collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// `a n̂`, the unnormalized Bloch vector.
    pub fn bloch_vector(&self) -> Vec<f64> {
        self.direction.iter().map(|x| x * self.radius).collect()
    }
}

pub fn bloch_to_state(s: &GeneralizedBlochState, g: &GammaSet) -> Result<CMat, BlochError> {
    if s.m != g.m {
        return Err(BlochError::DimensionMismatch { state: s.m, gammas: g.m });
    }
    let d = g.dim();
    let mut rho = CMat::identity(d);
    rho.axpy(1.0, &g.dot(&s.bloch_vector()));
    Ok(rho.scale(1.0 / d as f64))
}

/// Inverse of [`bloch_to_state`]. With `v_i = Tr(ρ γ_i)` the radius is `|v|`
/// and the direction `v / |v|`; a zero vector gets the last generator as its
/// (arbitrary) direction.
pub fn state_to_bloch(rho: &CMat, g: &GammaSet) -> Result<GeneralizedBlochState, BlochError> {
    if rho.dim() != g.dim() {
        return Err(BlochError::DimensionMismatch { state: rho.dim(), gammas: g.dim() });
    }
    rho.check_hermitian(crate::qmat::HERMITIAN_TOL)?;
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > OUTSIDE_FAMILY_TOL {
        return Err(BlochError::NotUnitTrace(tr));
    }
    let v: Vec<f64> = g.gammas.iter().map(|gi| rho.trace_product(gi).re).collect();
    let a = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if a > 1.0 + OUTSIDE_FAMILY_TOL {
        return Err(BlochError::OutsideFamily(a - 1.0));
    }
    let direction = if a > 1e-15 {
        v.iter().map(|x| x / a).collect()
    } else {
        let mut e = vec![0.0; v.len()];
        *e.last_mut().expect("at least three generators") = 1.0;
        e
    };
    let s = GeneralizedBlochState { m: g.m, radius: a.min(1.0), direction };
    let back = bloch_to_state(&s, g)?;
    let err = back.distance(rho);
    if err > OUTSIDE_FAMILY_TOL {
        return Err(BlochError::OutsideFamily(err));
    }
    Ok(s)
}

/// Eigenprojectors `P± = (I ± n̂·γ) / 2` of a Bloch state.
pub fn spectral_split(s: &GeneralizedBlochState, g: &GammaSet) -> Result<(CMat, CMat), BlochError> {
    if s.m != g.m {
        return Err(BlochError::DimensionMismatch { state: s.m, gammas: g.m });
    }
    if s.radius == 0.0 {
        return Err(BlochError::ZeroRadius);
    }
    let d = g.dim();
    let ng = g.dot(&s.direction);
    let id = CMat::identity(d);
    Ok(((&id + &ng).scale(0.5), (&id - &ng).scale(0.5)))
}


#[cfg(test)]
pub(crate) use tests::random_unit;
