mod report;
mod scan;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use medkit::certify::{certificate, success_probability};
use medkit::closedform::{solve, solve_special_case, ClosedFormError, SolveReport};
use medkit::io::{load_ensemble, load_povm, povm_to_toml, LoadedEnsemble};
use medkit::oracle::{med_fixed_point, random_restart_ascent, OracleError, OracleResult};
use medkit::simulate::monte_carlo_success;
use medkit::Tolerances;

/// Minimum-error discrimination of two sets of similarity-transformed states.
///
/// The tolerance profile is read from MEDKIT_TOL (`default` or `strict`).
/// Exit codes: 0 success, 1 input error, 2 certification failure,
/// 3 oracle not converged.
#[derive(Parser)]
#[command(name = "medkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form optimum with its optimality certificate.
    Solve {
        ensemble: PathBuf,
        /// Write the optimal POVM as a POVM file.
        #[arg(long)]
        povm_out: Option<PathBuf>,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a POVM against the optimality conditions.
    Certify {
        ensemble: PathBuf,
        povm: PathBuf,
        /// Claimed optimum; defaults to the POVM's own success probability.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Numerical optimum with lower and upper bounds.
    Oracle {
        ensemble: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::FixedPoint)]
        method: Method,
        /// Target gap between the bounds.
        #[arg(long, default_value_t = 1e-9)]
        gap: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        /// Seed for the ascent method.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random restarts for the ascent method.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        povm_out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of a POVM's success probability.
    Simulate {
        ensemble: PathBuf,
        povm: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep one parameter and tabulate the optimum as CSV.
    ///
    /// Parameters: eta, b, b_prime, nz, nz_prime, angle:K, angle_prime:K.
    /// Sweeping eta recomputes eta' = (1 - n eta)/n' at every point.
    Scan {
        ensemble: PathBuf,
        /// Parameter to sweep.
        #[arg(long)]
        param: String,
        /// First value.
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        /// Last value.
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        /// Number of evenly spaced points, at least 2.
        #[arg(long)]
        steps: usize,
        /// Add the fixed-point oracle value and its distance from p_opt.
        #[arg(long)]
        oracle: bool,
        /// Emit rows for failing points instead of stopping.
        #[arg(long)]
        keep_going: bool,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    FixedPoint,
    Ascent,
}

/// A failed command and its exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Certification(String),
    NotConverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Certification(_) => 2,
            Failure::NotConverged(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Certification(m) | Failure::NotConverged(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(context: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", context.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(input(path))
}

/// Solve with the special-case solver when the file asks for one.
pub fn solve_loaded(l: &LoadedEnsemble, tol: &Tolerances) -> Result<SolveReport, ClosedFormError> {
    match l.special_case {
        Some(case) => solve_special_case(case, &l.ensemble, tol),
        None => solve(&l.ensemble, l.gammas.as_ref(), tol),
    }
}

/// Exit class of a solver error.
pub fn solve_failure(e: ClosedFormError) -> Failure {
    match e {
        ClosedFormError::NoBranchCertifies { .. }
        | ClosedFormError::ConditionAmbiguous { .. }
        | ClosedFormError::CoefficientMismatch { .. }
        | ClosedFormError::IdentityMismatch(_) => Failure::Certification(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

fn cmd_solve(ensemble: &Path, povm_out: Option<&Path>, report_path: Option<&Path>, tol: &Tolerances) -> Result<(), Failure> {
    let l = load_ensemble(ensemble).map_err(input(ensemble))?;
    let r = solve_loaded(&l, tol).map_err(solve_failure)?;
    let text = report::solve_report(&r, l.gammas.as_ref());
    print!("{text}");
    if let Some(path) = report_path {
        write_file(path, &text)?;
    }
    if let Some(path) = povm_out {
        write_file(path, &povm_to_toml(&r.povm).map_err(input(path))?)?;
    }
    if r.certificate.is_certified() {
        Ok(())
    } else {
        Err(Failure::Certification(format!("certificate rejected: {}", r.certificate.failed.join(", "))))
    }
}

fn cmd_certify(ensemble: &Path, povm: &Path, p: Option<f64>, tol: &Tolerances) -> Result<(), Failure> {
    let l = load_ensemble(ensemble).map_err(input(ensemble))?;
    let povm = load_povm(povm, l.ensemble.n()).map_err(input(povm))?;
    let p = match p {
        Some(p) => p,
        None => success_probability(&l.ensemble, &povm).map_err(input(ensemble))?,
    };
    let mut cert = certificate(&l.ensemble, &povm, p, tol).map_err(input(ensemble))?;
    if let Some(g) = &l.gammas {
        cert.attach_bloch_projection(g);
    }
    print!("{cert}");
    if cert.is_certified() {
        Ok(())
    } else {
        Err(Failure::Certification(format!("certificate rejected: {}", cert.failed.join(", "))))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    ensemble: &Path,
    method: Method,
    gap: f64,
    max_iters: usize,
    seed: u64,
    restarts: usize,
    povm_out: Option<&Path>,
) -> Result<(), Failure> {
    let l = load_ensemble(ensemble).map_err(input(ensemble))?;
    let outcome = match method {
        Method::FixedPoint => med_fixed_point(&l.ensemble, max_iters, gap),
        Method::Ascent => random_restart_ascent(&l.ensemble, restarts, seed),
    };
    let (result, converged): (OracleResult, bool) = match outcome {
        Ok(r) => {
            let ok = r.gap() <= gap;
            (r, ok)
        }
        Err(OracleError::NotConverged(r)) => (*r, false),
        Err(e) => return Err(Failure::Input(e.to_string())),
    };
    print!("{}", report::oracle_report(&result));
    if let Some(path) = povm_out {
        write_file(path, &povm_to_toml(&result.povm).map_err(input(path))?)?;
    }
    if converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!("gap {:.3e} above target {gap:.3e}", result.gap())))
    }
}

fn cmd_simulate(ensemble: &Path, povm: &Path, trials: u64, seed: u64) -> Result<(), Failure> {
    let l = load_ensemble(ensemble).map_err(input(ensemble))?;
    let povm = load_povm(povm, l.ensemble.n()).map_err(input(povm))?;
    let r = monte_carlo_success(&l.ensemble, &povm, trials, seed).map_err(input(ensemble))?;
    print!("{}", report::sim_report(&r));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = Tolerances::from_env();
    match cli.command {
        Command::Solve { ensemble, povm_out, report } => cmd_solve(&ensemble, povm_out.as_deref(), report.as_deref(), &tol),
        Command::Certify { ensemble, povm, p } => cmd_certify(&ensemble, &povm, p, &tol),
        Command::Oracle { ensemble, method, gap, max_iters, seed, restarts, povm_out } => {
            cmd_oracle(&ensemble, method, gap, max_iters, seed, restarts, povm_out.as_deref())
        }
        Command::Simulate { ensemble, povm, trials, seed } => cmd_simulate(&ensemble, &povm, trials, seed),
        Command::Scan { ensemble, param, start, stop, steps, oracle, keep_going, out } => {
            let spec = scan::ScanSpec { param, start, stop, steps, oracle, keep_going };
            let l = load_ensemble(&ensemble).map_err(input(&ensemble))?;
            let csv = scan::run(&l, &spec, &tol)?;
            match out {
                Some(path) => write_file(&path, &csv),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
