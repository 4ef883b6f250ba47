//! Measurement operators with an optional weight/shape factorization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qmat::{min_eigenvalue, CMat, QmatError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PovmError {
    #[error("a POVM needs at least one element")]
    Empty,
    #[error("element {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, got: usize, expected: usize },
    #[error("split point {split} exceeds the {len} elements")]
    BadSplit { split: usize, len: usize },
    #[error("{weights} weights for {shapes} shapes")]
    WeightShapeMismatch { weights: usize, shapes: usize },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error(transparent)]
    Matrix(#[from] QmatError),
}

/// Elements are ordered first set then second set; `split` is the size of the
/// first set. When built from weights, element `k` equals `weights[k] * shapes[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<CMat>,
    split: usize,
    weights: Option<Vec<f64>>,
    shapes: Option<Vec<CMat>>,
    /// Bloch components of each shape's traceless part, when the solver knows them.
    pub bloch: Option<Vec<Vec<f64>>>,
}

impl Povm {
    pub fn new(elements: Vec<CMat>, split: usize) -> Result<Self, PovmError> {
        let first = elements.first().ok_or(PovmError::Empty)?;
        let d = first.dim();
        for (index, e) in elements.iter().enumerate() {
            if e.dim() != d {
                return Err(PovmError::DimensionMismatch { index, got: e.dim(), expected: d });
            }
        }
        if split > elements.len() {
            return Err(PovmError::BadSplit { split, len: elements.len() });
        }
        Ok(Self { elements, split, weights: None, shapes: None, bloch: None })
    }

    pub fn from_weights(weights: Vec<f64>, shapes: Vec<CMat>, split: usize) -> Result<Self, PovmError> {
        if weights.len() != shapes.len() {
            return Err(PovmError::WeightShapeMismatch { weights: weights.len(), shapes: shapes.len() });
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| **w < 0.0) {
            return Err(PovmError::NegativeWeight { index, value });
        }
        let elements = weights.iter().zip(&shapes).map(|(w, s)| s.scale(*w)).collect();
        let mut povm = Self::new(elements, split)?;
        povm.weights = Some(weights);
        povm.shapes = Some(shapes);
        Ok(povm)
    }

    /// `Π_k = I` for one index, zero elsewhere.
    pub fn single_identity(dim: usize, len: usize, split: usize, index: usize) -> Self {
        let mut elements = vec![CMat::zeros(dim); len];
        elements[index] = CMat::identity(dim);
        let mut weights = vec![0.0; len];
        weights[index] = 1.0;
        let shapes = vec![CMat::identity(dim); len];
        Self { elements, split, weights: Some(weights), shapes: Some(shapes), bloch: None }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn first_set(&self) -> &[CMat] {
        &self.elements[..self.split]
    }

    pub fn second_set(&self) -> &[CMat] {
        &self.elements[self.split..]
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn shapes(&self) -> Option<&[CMat]> {
        self.shapes.as_deref()
    }

    pub fn sum(&self) -> CMat {
        let mut s = CMat::zeros(self.dim());
        for e in &self.elements {
            s.axpy(1.0, e);
        }
        s
    }

    /// Frobenius norm of `Σ Π − I`.
    pub fn completeness_residual(&self) -> f64 {
        self.sum().distance(&CMat::identity(self.dim()))
    }

    /// Largest negative-eigenvalue magnitude over all elements (zero if all PSD).
    pub fn psd_deficit(&self) -> Result<f64, PovmError> {
        let mut worst = 0.0f64;
        for e in &self.elements {
            worst = worst.max(-min_eigenvalue(e)?);
        }
        Ok(worst)
    }

    /// Same POVM with every element replaced by `V Π V†`.
    pub fn conjugated(&self, v: &CMat) -> Self {
        Self {
            elements: self.elements.iter().map(|e| e.conjugate_by(v)).collect(),
            split: self.split,
            weights: self.weights.clone(),
            shapes: self.shapes.as_ref().map(|s| s.iter().map(|e| e.conjugate_by(v)).collect()),
            bloch: None,
        }
    }

    /// Replace the elements wholesale, dropping the factorization.
    pub fn with_elements(&self, elements: Vec<CMat>) -> Result<Self, PovmError> {
        Self::new(elements, self.split)
    }
}
