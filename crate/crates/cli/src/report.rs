//! Plain-text reports.

use std::fmt::Write;

use medkit::oracle::OracleResult;
use medkit::simulate::SimResult;
use medkit::{GammaSet, Povm, SolveReport};

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim(format!("{x:.*}", (11 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn povm_lines(out: &mut String, povm: &Povm, gammas: Option<&GammaSet>) {
    let n = povm.split();
    for (k, el) in povm.elements().iter().enumerate() {
        let label = if k < n { format!("Pi_{}", k + 1) } else { format!("Pi'_{}", k - n + 1) };
        let weight = povm.weights().map_or_else(|| el.trace().re / el.dim() as f64, |w| w[k]);
        let _ = write!(out, "  {label}: weight = {weight:.6}");
        let bloch = povm.bloch.as_ref().map(|b| b[k].clone()).or_else(|| {
            // Normalized generator components of the element, when it has weight.
            gammas.filter(|g| g.dim() == el.dim() && weight > 0.0).map(|g| {
                g.components(el).iter().map(|c| c * g.dim() as f64 / (weight * el.dim() as f64)).collect()
            })
        });
        if let Some(b) = bloch {
            let _ = write!(out, ", bloch = {}", vector(&b));
        }
        out.push('\n');
    }
}

pub fn solve_report(r: &SolveReport, gammas: Option<&GammaSet>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p_opt = {:.6}, branch = {}", r.p_opt, r.branch);
    let _ = writeln!(out, "p_opt_full = {}", sig12(r.p_opt));
    if let Some(route) = r.route {
        let _ = writeln!(out, "route = {route}");
    }
    if let Some(q) = &r.quadratic {
        let _ = writeln!(out, "quadratic: A = {}, B = {}, C = {}", sig12(q.a), sig12(q.b), sig12(q.c));
        if let Some(root) = q.chosen {
            let _ = writeln!(out, "  chosen root = {}", sig12(root));
        }
    }
    let _ = writeln!(out, "povm:");
    povm_lines(&mut out, &r.povm, gammas);
    let _ = writeln!(out, "certificate:");
    for line in r.certificate.to_string().lines() {
        let _ = writeln!(out, "  {line}");
    }
    if !r.alternatives.is_empty() {
        let _ = writeln!(out, "alternatives:");
        for (b, p) in &r.alternatives {
            let _ = writeln!(out, "  {b}: {}", sig12(*p));
        }
    }
    let _ = writeln!(out, "candidates:");
    for c in &r.candidates {
        let _ = writeln!(out, "  {c}");
    }
    if !r.findings.is_empty() {
        let _ = writeln!(out, "findings:");
        for f in &r.findings {
            let _ = writeln!(out, "  - {f}");
        }
    }
    out
}

pub fn oracle_report(r: &OracleResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p_lower = {}", sig12(r.p_lower));
    let _ = writeln!(out, "p_upper = {}", sig12(r.p_upper));
    let _ = writeln!(out, "gap = {:.3e}", r.gap());
    let _ = writeln!(out, "iterations = {}", r.iterations);
    let _ = writeln!(out, "converged = {}", r.converged);
    if r.dips > 0 {
        let _ = writeln!(out, "dips = {}", r.dips);
    }
    out
}

pub fn sim_report(r: &SimResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p_hat = {}", sig12(r.p_hat));
    let _ = writeln!(out, "stderr = {}", sig12(r.stderr));
    let _ = writeln!(out, "successes = {}", r.successes);
    let _ = writeln!(out, "trials = {}", r.trials);
    let _ = writeln!(out, "seed = {}", r.seed);
    out
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(1e-9), "1e-9");
        assert_eq!(sig12(-1.234567890123456e-7), "-1.23456789012e-7");
        assert_eq!(sig12(123456.0), "123456");
        assert_eq!(sig12(0.0), "0");
    }
}
