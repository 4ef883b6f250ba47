//! TOML ensemble and POVM files.
//!
//! Ensemble file:
//!
//! ```toml
//! dim = 2
//! eta = 0.25
//! eta_prime = 0.25          # optional; defaults to (1 - n eta) / n'
//! special_case = 2          # optional; 1, 2 or 3 selects a special-case solver
//!
//! [seed]
//! bloch = { m = 1, a = 1.0, n = [1.0, 0.0, 0.0] }
//!
//! [seed_prime]
//! matrix = [["0.5", "0-0.5j"], ["0+0.5j", "0.5"]]
//!
//! [unitaries]
//! z_angles = [0.0, 3.141592653589793]
//!
//! [unitaries_prime]
//! pauli = ["I", "X", "Z"]
//! ```
//!
//! A seed gives exactly one of `matrix` (rows of `"re+imj"` strings or plain
//! numbers) or `bloch`. A unitary list gives exactly one of `z_angles`,
//! `pauli`, `matrices` or `spinor_thetas` (one list of 1-based `[i, k, θ]`
//! entries per state, the first empty).
//!
//! POVM file: an optional `split` and one `[[element]]` table per outcome,
//! each with `matrix`, or `weight` and `bloch` for `weight · (I + s·γ)`.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blochdirac::{bloch_to_state, dirac_gammas, BlochError, GammaSet, GeneralizedBlochState, MAX_GAMMA_ORDER};
use crate::closedform::SpecialCase;
use crate::ensembles::{build_spinor_ensemble, pauli_by_name, zrotation, EnsembleError, SetLabel, ThetaTable, TwoSetEnsemble};
use crate::povm::{Povm, PovmError};
use crate::qmat::{CMat, QmatError, C64};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{}{msg}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { line: Option<usize>, msg: String },
    #[error("cannot serialize: {0}")]
    Write(#[from] toml::ser::Error),
}

impl IoError {
    fn invalid(src: &str, key: &str, msg: impl Into<String>) -> Self {
        IoError::Invalid { line: key_line(src, key), msg: msg.into() }
    }
}

/// 1-based line of the first `key = ...` or `[key]` in a TOML document.
fn key_line(src: &str, key: &str) -> Option<usize> {
    src.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
            || t.starts_with(&format!("[{key}]"))
            || t.starts_with(&format!("[[{key}]]"))
    })
    .map(|i| i + 1)
}

/// A matrix entry: a plain number or a complex string such as `"0.5-0.25j"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Text(String),
}

impl Entry {
    fn value(&self) -> Result<C64, String> {
        match self {
            Entry::Real(x) => Ok(C64::new(*x, 0.0)),
            Entry::Text(s) => {
                let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
                C64::from_str(&compact).map_err(|_| format!("'{s}' is not a complex number of the form re+imj"))
            }
        }
    }

    fn from_value(z: C64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Text(format!("{}{}{}j", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs()))
        }
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

fn matrix_from_spec(rows: &MatrixSpec) -> Result<CMat, String> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(Entry::value).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    CMat::from_rows(rows).map_err(|e| e.to_string())
}

fn matrix_to_spec(m: &CMat) -> MatrixSpec {
    m.rows().into_iter().map(|r| r.into_iter().map(Entry::from_value).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochSpec {
    pub m: usize,
    pub a: f64,
    pub n: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<BlochSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitarySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_angles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<MatrixSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spinor_thetas: Option<Vec<Vec<[f64; 3]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_case: Option<u8>,
    pub seed: SeedSpec,
    pub seed_prime: SeedSpec,
    pub unitaries: UnitarySpec,
    pub unitaries_prime: UnitarySpec,
}

/// A parsed ensemble with the gamma family matching its dimension, if any.
#[derive(Debug, Clone)]
pub struct LoadedEnsemble {
    pub spec: EnsembleSpec,
    pub ensemble: TwoSetEnsemble,
    pub gammas: Option<GammaSet>,
    pub special_case: Option<SpecialCase>,
}

/// `m` with `2^m = dim`, when it is within the supported gamma orders.
fn gamma_order(dim: usize) -> Option<usize> {
    (1..=MAX_GAMMA_ORDER).find(|&m| 1usize << m == dim)
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

pub fn load_ensemble(path: &Path) -> Result<LoadedEnsemble, IoError> {
    parse_ensemble(&read(path)?)
}

pub fn parse_ensemble(src: &str) -> Result<LoadedEnsemble, IoError> {
    let spec: EnsembleSpec = toml::from_str(src)?;
    build_ensemble(&spec, src)
}

/// Build from a spec; `src` is only used to attach line numbers to errors.
pub fn build_ensemble(spec: &EnsembleSpec, src: &str) -> Result<LoadedEnsemble, IoError> {
    let d = spec.dim;
    if d < 2 {
        return Err(IoError::invalid(src, "dim", format!("dim must be at least 2, got {d}")));
    }
    let gammas = gamma_order(d).map(dirac_gammas).transpose().map_err(|e| IoError::invalid(src, "dim", e.to_string()))?;
    let special_case = spec
        .special_case
        .map(SpecialCase::try_from)
        .transpose()
        .map_err(|e| IoError::invalid(src, "special_case", e.to_string()))?;

    let seed = seed_matrix(&spec.seed, d, src, "seed")?;
    let seed_prime = seed_matrix(&spec.seed_prime, d, src, "seed_prime")?;
    let us = unitary_list(&spec.unitaries, d, gammas.as_ref(), src, "unitaries")?;
    let us_prime = unitary_list(&spec.unitaries_prime, d, gammas.as_ref(), src, "unitaries_prime")?;

    let (n, n_prime) = (us.len(), us_prime.len());
    let eta_prime = match spec.eta_prime {
        Some(x) => x,
        None => {
            let x = (1.0 - n as f64 * spec.eta) / n_prime as f64;
            if x < 0.0 {
                return Err(IoError::invalid(
                    src,
                    "eta",
                    format!(
                        "eta = {} with n = {n} leaves eta' = (1 - n eta)/n' = {x} < 0; priors must satisfy the normalization n*eta + n'*eta' = 1",
                        spec.eta
                    ),
                ));
            }
            x
        }
    };
    let ensemble = TwoSetEnsemble::new(spec.eta, eta_prime, seed, seed_prime, us, us_prime).map_err(|e| {
        let key = match &e {
            EnsembleError::PriorMismatch { .. } | EnsembleError::InvalidPrior(_) => "eta",
            EnsembleError::InvalidSeed { set: SetLabel::Second, .. } => "seed_prime",
            EnsembleError::InvalidSeed { .. } => "seed",
            EnsembleError::NotUnitary { set: SetLabel::Second, .. }
            | EnsembleError::FirstNotIdentity { set: SetLabel::Second }
            | EnsembleError::EmptySet { set: SetLabel::Second } => "unitaries_prime",
            _ => "unitaries",
        };
        IoError::invalid(src, key, e.to_string())
    })?;
    Ok(LoadedEnsemble { spec: spec.clone(), ensemble, gammas, special_case })
}

fn seed_matrix(s: &SeedSpec, d: usize, src: &str, key: &str) -> Result<CMat, IoError> {
    let err = |msg: String| IoError::invalid(src, key, format!("[{key}] {msg}"));
    match (&s.matrix, &s.bloch) {
        (Some(rows), None) => {
            let m = matrix_from_spec(rows).map_err(err)?;
            if m.dim() != d {
                return Err(err(format!("matrix is {0}x{0}, dim is {d}", m.dim())));
            }
            Ok(m)
        }
        (None, Some(b)) => {
            if 1usize.checked_shl(b.m as u32) != Some(d) {
                return Err(err(format!("bloch m = {} does not match dim = {d}", b.m)));
            }
            let g = dirac_gammas(b.m).map_err(|e| err(e.to_string()))?;
            let state = GeneralizedBlochState::normalized(b.m, b.a, b.n.clone()).map_err(|e| err(e.to_string()))?;
            bloch_to_state(&state, &g).map_err(|e| err(e.to_string()))
        }
        _ => Err(err("give exactly one of `matrix` or `bloch`".into())),
    }
}

fn unitary_list(u: &UnitarySpec, d: usize, g: Option<&GammaSet>, src: &str, key: &str) -> Result<Vec<CMat>, IoError> {
    let err = |msg: String| IoError::invalid(src, key, format!("[{key}] {msg}"));
    let given = [u.z_angles.is_some(), u.pauli.is_some(), u.matrices.is_some(), u.spinor_thetas.is_some()];
    if given.iter().filter(|&&x| x).count() != 1 {
        return Err(err("give exactly one of `z_angles`, `pauli`, `matrices` or `spinor_thetas`".into()));
    }
    if let Some(angles) = &u.z_angles {
        if d != 2 {
            return Err(err(format!("z_angles need dim = 2, got {d}")));
        }
        return Ok(angles.iter().map(|&a| zrotation(a)).collect());
    }
    if let Some(names) = &u.pauli {
        if d != 2 {
            return Err(err(format!("pauli lists need dim = 2, got {d}")));
        }
        return names.iter().map(|n| pauli_by_name(n).ok_or_else(|| err(format!("unknown Pauli name '{n}'")))).collect();
    }
    if let Some(mats) = &u.matrices {
        return mats
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                let m = matrix_from_spec(rows).map_err(|e| err(format!("matrix {}: {e}", i + 1)))?;
                if m.dim() != d {
                    return Err(err(format!("matrix {} is {1}x{1}, dim is {d}", i + 1, m.dim())));
                }
                Ok(m)
            })
            .collect();
    }
    let thetas = u.spinor_thetas.as_ref().expect("one list is present");
    let g = g.ok_or_else(|| err(format!("spinor_thetas need dim = 2^m with m ≤ {MAX_GAMMA_ORDER}, got {d}")))?;
    let tables = thetas
        .iter()
        .enumerate()
        .map(|(state, entries)| theta_table(g.m(), entries).map_err(|e| err(format!("state {}: {e}", state + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    // Only the unitaries are needed; any valid pair of seeds will do.
    let mixed = GeneralizedBlochState::new(g.m(), 0.0, unit(g.len()))?;
    let e = build_spinor_ensemble(g, 1.0 / (2 * tables.len()) as f64, 1.0 / (2 * tables.len()) as f64, &mixed, &mixed, &tables, &tables)
        .map_err(|e| err(e.to_string()))?;
    Ok(e.unitaries().to_vec())
}

fn unit(len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[0] = 1.0;
    v
}

fn theta_table(m: usize, entries: &[[f64; 3]]) -> Result<ThetaTable, String> {
    let n = 2 * m + 1;
    let mut zero_based = Vec::with_capacity(entries.len());
    for &[i, k, theta] in entries {
        let idx = |x: f64| -> Result<usize, String> {
            if x.fract() != 0.0 || x < 1.0 || x > n as f64 {
                return Err(format!("generator index {x} is not an integer in 1..={n}"));
            }
            Ok(x as usize - 1)
        };
        zero_based.push((idx(i)?, idx(k)?, theta));
    }
    ThetaTable::from_entries(m, &zero_based)
}

impl From<BlochError> for IoError {
    fn from(e: BlochError) -> Self {
        IoError::Invalid { line: None, msg: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<usize>,
    pub element: Vec<ElementSpec>,
}

/// Read a POVM file; `split` defaults to `default_split` (usually `n`).
pub fn load_povm(path: &Path, default_split: usize) -> Result<Povm, IoError> {
    parse_povm(&read(path)?, default_split)
}

pub fn parse_povm(src: &str, default_split: usize) -> Result<Povm, IoError> {
    let spec: PovmSpec = toml::from_str(src)?;
    let err = |msg: String| IoError::invalid(src, "element", msg);
    let mut elements = Vec::with_capacity(spec.element.len());
    for (i, el) in spec.element.iter().enumerate() {
        let m = match (&el.matrix, el.weight, &el.bloch) {
            (Some(rows), None, None) => matrix_from_spec(rows).map_err(|e| err(format!("element {}: {e}", i + 1)))?,
            (None, Some(w), Some(s)) => {
                if s.len() % 2 == 0 {
                    return Err(err(format!("element {}: bloch vector needs 2m + 1 components, got {}", i + 1, s.len())));
                }
                let g = dirac_gammas(s.len() / 2).map_err(|e| err(format!("element {}: {e}", i + 1)))?;
                let mut m = CMat::identity(g.dim());
                m.axpy(1.0, &g.dot(s));
                m.scale(w)
            }
            _ => return Err(err(format!("element {}: give `matrix`, or `weight` with `bloch`", i + 1))),
        };
        elements.push(m);
    }
    let split = spec.split.unwrap_or(default_split);
    Povm::new(elements, split).map_err(|e: PovmError| IoError::invalid(src, "split", e.to_string()))
}

/// POVM file text with every element written as a matrix.
pub fn povm_to_toml(povm: &Povm) -> Result<String, IoError> {
    let spec = PovmSpec {
        split: Some(povm.split()),
        element: povm.elements().iter().map(|m| ElementSpec { matrix: Some(matrix_to_spec(m)), ..Default::default() }).collect(),
    };
    Ok(toml::to_string(&spec)?)
}

/// Set a named scan parameter on an ensemble spec.
///
/// `eta` also clears `eta_prime` so it is recomputed as `(1 − n η)/n'`.
/// `b`, `b_prime` set the seed Bloch radius; `nz`, `nz_prime` set the third
/// direction component and rescale the others to keep a unit direction;
/// `angle:K`, `angle_prime:K` set the K-th (1-based) z-rotation angle.
pub fn apply_parameter(spec: &mut EnsembleSpec, name: &str, value: f64) -> Result<(), IoError> {
    let bad = |msg: String| IoError::Invalid { line: None, msg };
    match name {
        "eta" => {
            spec.eta = value;
            spec.eta_prime = None;
        }
        "b" => bloch(&mut spec.seed, "seed")?.a = value,
        "b_prime" => bloch(&mut spec.seed_prime, "seed_prime")?.a = value,
        "nz" => set_nz(bloch(&mut spec.seed, "seed")?, value).map_err(bad)?,
        "nz_prime" => set_nz(bloch(&mut spec.seed_prime, "seed_prime")?, value).map_err(bad)?,
        _ => {
            let (set, k) = name
                .split_once(':')
                .and_then(|(s, k)| Some((s, k.parse::<usize>().ok()?)))
                .ok_or_else(|| bad(format!("unknown scan parameter '{name}'")))?;
            let angles = match set {
                "angle" => spec.unitaries.z_angles.as_mut(),
                "angle_prime" => spec.unitaries_prime.z_angles.as_mut(),
                _ => return Err(bad(format!("unknown scan parameter '{name}'"))),
            }
            .ok_or_else(|| bad(format!("'{name}' needs a z_angles list")))?;
            if k < 2 || k > angles.len() {
                return Err(bad(format!("'{name}': index must be in 2..={} (the first angle is fixed at 0)", angles.len())));
            }
            angles[k - 1] = value;
        }
    }
    Ok(())
}

fn bloch<'a>(s: &'a mut SeedSpec, key: &str) -> Result<&'a mut BlochSpec, IoError> {
    s.bloch
        .as_mut()
        .ok_or_else(|| IoError::Invalid { line: None, msg: format!("sweeping a {key} parameter needs a bloch seed") })
}

fn set_nz(b: &mut BlochSpec, nz: f64) -> Result<(), String> {
    if b.n.len() < 3 || nz.abs() > 1.0 {
        return Err(format!("nz = {nz} needs |nz| ≤ 1 and a direction with at least 3 components"));
    }
    let norm: f64 = b.n.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rest: f64 = b.n.iter().enumerate().filter(|&(i, _)| i != 2).map(|(_, x)| (x / norm).powi(2)).sum::<f64>().sqrt();
    let target = (1.0 - nz * nz).max(0.0).sqrt();
    for (i, x) in b.n.iter_mut().enumerate() {
        if i != 2 {
            *x = if rest > 0.0 { *x / norm * target / rest } else if i == 0 { target } else { 0.0 };
        }
    }
    b.n[2] = nz;
    Ok(())
}

impl From<QmatError> for IoError {
    fn from(e: QmatError) -> Self {
        IoError::Invalid { line: None, msg: e.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRINE_AXIS: &str = r#"
dim = 2
eta = 0.25

[seed]
bloch = { m = 1, a = 1.0, n = [0.0, -1.0, 0.0] }

[seed_prime]
bloch = { m = 1, a = 1.0, n = [0.0, 1.0, 0.0] }

[unitaries]
z_angles = [0.0, 2.0943951023931957, 4.1887902047863905]

[unitaries_prime]
z_angles = [0.0]
"#;

    #[test]
    fn complex_entries() {
        assert_eq!(Entry::Text("0.5-0.25j".into()).value().unwrap(), C64::new(0.5, -0.25));
        assert_eq!(Entry::Text("1j".into()).value().unwrap(), C64::new(0.0, 1.0));
        assert_eq!(Entry::Real(2.0).value().unwrap(), C64::new(2.0, 0.0));
        assert!(Entry::Text("abc".into()).value().is_err());
        let z = C64::new(0.1, -0.3);
        assert_eq!(Entry::from_value(z).value().unwrap(), z);
    }

    #[test]
    fn eta_prime_is_derived() {
        let l = parse_ensemble(TRINE_AXIS).unwrap();
        assert_eq!(l.ensemble.n(), 3);
        assert!((l.ensemble.eta_prime() - 0.25).abs() < 1e-15);
        assert!(l.gammas.is_some());
    }

    #[test]
    fn normalization_violation_cites_line() {
        let src = TRINE_AXIS.replace("eta = 0.25", "eta = 0.25\neta_prime = 0.5");
        let err = parse_ensemble(&src).unwrap_err().to_string();
        assert!(err.starts_with("line 3:"), "{err}");
        assert!(err.contains("normalization"), "{err}");
    }

    #[test]
    fn matrix_seeds_and_pauli_lists() {
        let src = r#"
dim = 2
eta = 0.1666666666666667
[seed]
matrix = [[1, 0], [0, 0]]
[seed_prime]
matrix = [["0.5", "0-0.5j"], ["0+0.5j", "0.5"]]
[unitaries]
pauli = ["I", "X", "Z"]
[unitaries_prime]
pauli = ["I", "Y", "Z"]
"#;
        let l = parse_ensemble(src).unwrap();
        assert_eq!(l.ensemble.len(), 6);
    }

    #[test]
    fn spinor_tables_use_one_based_indices() {
        let src = r#"
dim = 4
eta = 0.25
[seed]
bloch = { m = 2, a = 0.5, n = [0, 0, 1, 0, 0] }
[seed_prime]
bloch = { m = 2, a = 0.5, n = [1, 0, 0, 0, 0] }
[unitaries]
spinor_thetas = [[], [[1, 2, 0.7853981633974483]]]
[unitaries_prime]
spinor_thetas = [[], [[4, 5, 1.0]]]
"#;
        let l = parse_ensemble(src).unwrap();
        assert_eq!(l.ensemble.n(), 2);
        let bad = src.replace("[[4, 5, 1.0]]", "[[0, 5, 1.0]]");
        assert!(parse_ensemble(&bad).unwrap_err().to_string().contains("generator index"));
    }

    #[test]
    fn conflicting_forms_are_rejected() {
        let src = TRINE_AXIS.replace("z_angles = [0.0]", "z_angles = [0.0]\npauli = [\"I\"]");
        assert!(parse_ensemble(&src).unwrap_err().to_string().contains("exactly one"));
    }

    #[test]
    fn povm_round_trip() {
        let l = parse_ensemble(TRINE_AXIS).unwrap();
        let povm = Povm::single_identity(2, l.ensemble.len(), l.ensemble.n(), 1);
        let text = povm_to_toml(&povm).unwrap();
        let back = parse_povm(&text, 0).unwrap();
        assert_eq!(back.split(), 3);
        for (a, b) in povm.elements().iter().zip(back.elements()) {
            assert!(a.distance(b) == 0.0);
        }
        let bloch = "[[element]]\nweight = 0.5\nbloch = [0, 0, 1]\n[[element]]\nweight = 0.5\nbloch = [0, 0, -1]\n";
        let p = parse_povm(bloch, 1).unwrap();
        assert!(p.completeness_residual() < 1e-15);
    }

    #[test]
    fn scan_parameters() {
        let mut spec = parse_ensemble(TRINE_AXIS).unwrap().spec;
        apply_parameter(&mut spec, "eta", 0.2).unwrap();
        let l = build_ensemble(&spec, "").unwrap();
        assert!((l.ensemble.eta_prime() - 0.4).abs() < 1e-15);
        apply_parameter(&mut spec, "nz", 0.6).unwrap();
        let n = &spec.seed.bloch.as_ref().unwrap().n;
        assert!((n[1] + 0.8).abs() < 1e-15 && n[2] == 0.6);
        apply_parameter(&mut spec, "angle:2", 1.0).unwrap();
        assert_eq!(spec.unitaries.z_angles.as_ref().unwrap()[1], 1.0);
        assert!(apply_parameter(&mut spec, "angle:1", 1.0).is_err());
        assert!(apply_parameter(&mut spec, "mu", 1.0).is_err());
    }
}
