//! Numerical tolerance ladder shared by the solvers and the certificate.

use serde::{Deserialize, Serialize};

/// Environment variable selecting the tolerance profile (`strict` or `default`).
pub const TOLERANCE_ENV: &str = "MEDKIT_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Construction checks: priors summing to one, unit Bloch directions.
    pub construction: f64,
    /// Algebraic identities and unitarity.
    pub identity: f64,
    /// Residual bound for a certificate to pass.
    pub certificate: f64,
    /// Minimum-eigenvalue deficit allowed for POVM elements.
    pub povm_psd: f64,
    /// Agreement between closed forms and the numerical oracle.
    pub oracle: f64,
    /// Strict mode turns findings such as coefficient mismatches into errors.
    pub strict: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            construction: 1e-12,
            identity: 1e-10,
            certificate: 1e-9,
            povm_psd: 1e-10,
            oracle: 1e-6,
            strict: false,
        }
    }
}

impl Tolerances {
    pub fn strict() -> Self {
        Self { certificate: 1e-10, povm_psd: 1e-11, strict: true, ..Self::default() }
    }

    /// Profile chosen by `MEDKIT_TOL`; unknown or missing values give the default.
    pub fn from_env() -> Self {
        match std::env::var(TOLERANCE_ENV).as_deref() {
            Ok("strict") => Self::strict(),
            _ => Self::default(),
        }
    }

    pub fn profile_name(&self) -> &'static str {
        if self.strict {
            "strict"
        } else {
            "default"
        }
    }
}
