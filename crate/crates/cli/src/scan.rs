//! Parameter sweeps tabulated as CSV.

use medkit::io::{apply_parameter, build_ensemble, LoadedEnsemble};
use medkit::oracle::{med_fixed_point, OracleError};
use medkit::Tolerances;
use rayon::prelude::*;

use crate::report::sig12;
use crate::{solve_failure, solve_loaded, Failure};

/// Fixed-point budget per scan point.
const ORACLE_ITERS: usize = 100_000;
const ORACLE_GAP: f64 = 1e-9;

pub struct ScanSpec {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub oracle: bool,
    pub keep_going: bool,
}

impl ScanSpec {
    fn validate(&self) -> Result<(), Failure> {
        if self.steps < 2 {
            return Err(Failure::Input(format!("scan needs steps ≥ 2, got {}", self.steps)));
        }
        if !(self.start < self.stop) {
            return Err(Failure::Input(format!("scan needs start < stop, got {} and {}", self.start, self.stop)));
        }
        Ok(())
    }

    fn points(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| if i + 1 == self.steps { self.stop } else { self.start + i as f64 * h }).collect()
    }
}

struct Row {
    value: f64,
    solved: Result<(f64, String, String), Failure>,
    oracle: Option<Result<f64, Failure>>,
}

fn evaluate(base: &LoadedEnsemble, spec: &ScanSpec, value: f64, tol: &Tolerances) -> Row {
    let loaded = (|| {
        let mut s = base.spec.clone();
        apply_parameter(&mut s, &spec.param, value).map_err(|e| Failure::Input(e.to_string()))?;
        build_ensemble(&s, "").map_err(|e| Failure::Input(e.to_string()))
    })();
    let loaded = match loaded {
        Ok(l) => l,
        Err(f) => return Row { value, solved: Err(f), oracle: None },
    };
    let solved = solve_loaded(&loaded, tol).map_err(solve_failure).and_then(|r| {
        if r.certificate.is_certified() {
            Ok((r.p_opt, r.branch.to_string(), r.status_label().to_string()))
        } else {
            Err(Failure::Certification(format!("certificate rejected: {}", r.certificate.failed.join(" "))))
        }
    });
    let oracle = spec.oracle.then(|| match med_fixed_point(&loaded.ensemble, ORACLE_ITERS, ORACLE_GAP) {
        Ok(r) => Ok(r.p_lower),
        Err(OracleError::NotConverged(r)) => {
            Err(Failure::NotConverged(format!("oracle gap {:.3e} at p_lower {}", r.gap(), sig12(r.p_lower))))
        }
        Err(e) => Err(Failure::Input(e.to_string())),
    });
    Row { value, solved, oracle }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Run a sweep; rows are computed in parallel and written in parameter order.
/// Without `keep_going` the first failing point aborts the sweep.
pub fn run(base: &LoadedEnsemble, spec: &ScanSpec, tol: &Tolerances) -> Result<String, Failure> {
    spec.validate()?;
    let rows: Vec<Row> = spec.points().into_par_iter().map(|v| evaluate(base, spec, v, tol)).collect();
    let mut csv = format!("{},p_opt,branch,status,oracle_p,gap\n", csv_field(&spec.param));
    let mut first_failure = None;
    for row in rows {
        let (p, branch, status) = match &row.solved {
            Ok((p, b, s)) => (Some(*p), b.clone(), s.clone()),
            Err(f) => (None, String::new(), f.message().to_string()),
        };
        let (oracle_p, gap, oracle_status) = match &row.oracle {
            None => (String::new(), String::new(), None),
            Some(Ok(q)) => (sig12(*q), p.map(|p| sig12((p - q).abs())).unwrap_or_default(), None),
            Some(Err(f)) => (String::new(), String::new(), Some(f.message().to_string())),
        };
        let status = match &oracle_status {
            Some(o) => format!("{status}; {o}"),
            None => status,
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig12(row.value),
            p.map(sig12).unwrap_or_default(),
            csv_field(&branch),
            csv_field(&status),
            oracle_p,
            gap
        ));
        if first_failure.is_none() {
            first_failure = row.solved.err().or(row.oracle.and_then(Result::err)).map(|f| (row.value, f));
        }
    }
    if let (Some((v, f)), false) = (first_failure, spec.keep_going) {
        let msg = format!("{} = {}: {}", spec.param, sig12(v), f.message());
        return Err(match f {
            Failure::Input(_) => Failure::Input(msg),
            Failure::Certification(_) => Failure::Certification(msg),
            Failure::NotConverged(_) => Failure::NotConverged(msg),
        });
    }
    Ok(csv)
}
