//! Minimum-error discrimination between two sets of similarity-transformed
//! quantum states.
//!
//! The crate provides closed-form solvers for irreducible ensembles, qubit
//! and generalized-Bloch (Dirac) families, a numerical certificate for the
//! optimality conditions, two independent numerical optimizers used as
//! oracles, and a Monte Carlo estimator of success probabilities.

pub mod blochdirac;
pub mod certify;
pub mod closedform;
pub mod ensembles;
pub mod io;
pub mod oracle;
pub mod povm;
pub mod qmat;
pub mod simulate;
pub mod tolerances;

pub use blochdirac::{GammaSet, GeneralizedBlochState};
pub use certify::{CertificateStatus, OptimalityCertificate};
pub use closedform::{Branch, SolveReport};
pub use ensembles::TwoSetEnsemble;
pub use povm::Povm;
pub use qmat::{CMat, C64};
pub use tolerances::Tolerances;
