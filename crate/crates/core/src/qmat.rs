//! Dense complex matrices for small Hermitian problems.
//!
//! Everything in this crate lives in dimension `d <= 16`, so the kernel keeps
//! a plain row-major `Vec<Complex64>` and a cyclic complex Jacobi eigensolver.
//! Jacobi is slow for large matrices but deterministic and accurate to a few
//! ulps at these sizes, which is what the certificates need.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Relative Hermiticity tolerance used when callers do not pass their own.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QmatError {
    #[error("matrix is not Hermitian: |M - M^dag| = {residual:.3e} exceeds {limit:.3e}")]
    NonHermitian { residual: f64, limit: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    ConvergenceFailure { sweeps: usize, off: f64 },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("expected a square {expected}x{expected} matrix, got row {row} of length {len}")]
    Ragged { expected: usize, row: usize, len: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "CMat dimension must be >= 1");
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, QmatError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(QmatError::EmptyDimension);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(QmatError::Ragged { expected: dim, row, len: r.len() });
            }
            data.extend(r);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QmatError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Real-valued rows, handy in tests and for Pauli-like constants.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, QmatError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Outer product |v><v|.
    pub fn projector(v: &[C64]) -> Self {
        let d = v.len();
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `self + s * other`, without allocating an intermediate.
    pub fn axpy(&mut self, s: f64, other: &CMat) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// (M + M^dag) / 2
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&adj.data) {
            *a = (*a + b) * 0.5;
        }
        out
    }

    /// Frobenius norm of M - M^dag.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_residual() <= rel_tol * self.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    pub fn check_hermitian(&self, rel_tol: f64) -> Result<(), QmatError> {
        let residual = self.hermiticity_residual();
        let limit = rel_tol * self.frobenius_norm();
        if residual > limit {
            Err(QmatError::NonHermitian { residual, limit })
        } else {
            Ok(())
        }
    }

    pub fn kron(&self, other: &CMat) -> Self {
        let (a, b) = (self.dim, other.dim);
        let mut out = Self::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let s = self[(i, j)];
                if s == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// U M U^dag
    pub fn conjugate_by(&self, u: &CMat) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Re Tr(A B), the Hilbert-Schmidt pairing for Hermitian arguments.
    pub fn trace_product(&self, other: &CMat) -> C64 {
        let d = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Frobenius distance ‖A - B‖.
    pub fn distance(&self, other: &CMat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn mul(self, rhs: &'a CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn add(self, rhs: &'a CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn sub(self, rhs: &'a CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{})", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> =
                row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Spectral decomposition of a Hermitian matrix.
///
/// `values` are ascending; column `k` of `vectors` is the eigenvector for
/// `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigenPair {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// V f(Λ) V^dag
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> CMat {
        let d = self.vectors.dim();
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMat {
        self.map_spectrum(|x| C64::new(x, 0.0))
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }
}

pub fn eig_herm(m: &CMat) -> Result<EigenPair, QmatError> {
    eig_herm_tol(m, HERMITIAN_TOL)
}

/// Cyclic complex Jacobi eigendecomposition.
pub fn eig_herm_tol(m: &CMat, herm_tol: f64) -> Result<EigenPair, QmatError> {
    m.check_hermitian(herm_tol)?;
    let d = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMat::identity(d);
    let norm = a.frobenius_norm();

    let off_norm = |a: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= 1e-15 * norm || off == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(QmatError::ConvergenceFailure { sweeps, off });
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase the (p, q) entry to a positive real, then a real rotation.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let g11 = C64::new(c, 0.0);
                let g12 = C64::new(s, 0.0);
                let g21 = -phase.conj() * s;
                let g22 = phase.conj() * c;
                apply_two_sided(&mut a, p, q, g11, g12, g21, g22);
                for k in 0..d {
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = vp * g11 + vq * g21;
                    v[(k, q)] = vp * g12 + vq * g22;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMat::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..d {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(EigenPair { values, vectors })
}

// A <- G^dag A G restricted to columns/rows p, q.
fn apply_two_sided(a: &mut CMat, p: usize, q: usize, g11: C64, g12: C64, g21: C64, g22: C64) {
    let d = a.dim();
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g11 + akq * g21;
        a[(k, q)] = akp * g12 + akq * g22;
    }
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g11.conj() * apk + g21.conj() * aqk;
        a[(q, k)] = g12.conj() * apk + g22.conj() * aqk;
    }
}

/// True iff the smallest eigenvalue of `m` is at least `-tol`.
pub fn psd_check(m: &CMat, tol: f64) -> Result<bool, QmatError> {
    Ok(min_eigenvalue(m)? >= -tol)
}

pub fn min_eigenvalue(m: &CMat) -> Result<f64, QmatError> {
    Ok(eig_herm(m)?.min_value())
}

/// exp(iH) for Hermitian H, via the spectral decomposition.
pub fn expi_herm(h: &CMat) -> Result<CMat, QmatError> {
    let eig = eig_herm(h)?;
    Ok(eig.map_spectrum(|x| C64::new(x.cos(), x.sin())))
}

/// Pseudo-inverse square root of a PSD matrix. Eigenvalues below
/// `rel_cutoff * max` are treated as zero. Returns `None` if the whole
/// spectrum is below the cutoff.
pub fn psd_inv_sqrt(m: &CMat, rel_cutoff: f64) -> Result<Option<CMat>, QmatError> {
    let eig = eig_herm(m)?;
    let top = eig.max_value();
    if top <= 0.0 {
        return Ok(None);
    }
    let cut = rel_cutoff * top;
    Ok(Some(eig.map_spectrum(|x| {
        if x > cut {
            C64::new(1.0 / x.sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })))
}

/// The three Pauli matrices (x, y, z).
pub fn paulis() -> [CMat; 3] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMat { dim: 2, data: vec![o, one, one, o] },
        CMat { dim: 2, data: vec![o, -i, i, o] },
        CMat { dim: 2, data: vec![one, o, o, -one] },
    ]
}

/// Real coordinates of a Hermitian matrix: diagonal, then Re and Im of the
/// strict upper triangle. `d^2` entries in total.
pub fn hermitian_coordinates(m: &CMat) -> Vec<f64> {
    let d = m.dim();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}


#[cfg(test)]
pub(crate) use tests::random_hermitian;
