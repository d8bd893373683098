use fpcert::bench::BenchOutcome;
use fpcert::report::{CertificateStatus, Method, ReportEntry};

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Bern => "FPBern",
        Method::Ks => "FPKriSten",
    }
}

fn degree(r: &ReportEntry) -> String {
    let k: Vec<String> = r.k.iter().map(|k| k.to_string()).collect();
    match r.method {
        Method::Bern => format!("({})", k.join(",")),
        Method::Ks => k.join(","),
    }
}

/// Human-readable block for one analysis.
pub fn entry(r: &ReportEntry) -> String {
    let mut s = String::new();
    s.push_str(&format!("{} [{}, {:?} backend]\n", r.name, method_name(r.method), r.backend));
    s.push_str(&format!("  n = {}, m = {}, d = {}, k = {}\n", r.n, r.m, r.d, degree(r)));
    s.push_str(&format!("  linear part / eps  in [{}, {}]\n", r.linear_lo, r.linear_hi));
    s.push_str(&format!("  remainder          in [{}, {}]\n", r.remainder_lo, r.remainder_hi));
    s.push_str(&format!("  total error bound  {}\n", r.total));
    if let Some(exact) = &r.total.exact {
        s.push_str(&format!("  (exact: {exact})\n"));
    }
    if let (Some(lo), Some(hi)) = (r.sharp_lower, r.sharp_upper) {
        s.push_str(&format!("  sharp: lower {lo}, upper {hi}\n"));
    }
    if let Some(e) = r.elevations {
        s.push_str(&format!("  degree elevations: {e}\n"));
    }
    if let Some(lp) = r.lp {
        s.push_str(&format!("  LP: {} columns x {} rows\n", lp.columns, lp.rows));
    }
    if let Some(gap) = &r.convergence_gap {
        s.push_str(&format!("  convergence gap: {gap}\n"));
    }
    let cert = match r.certificate {
        CertificateStatus::NotApplicable => None,
        CertificateStatus::Verified => Some("verified (zero residual)"),
        CertificateStatus::Repaired => Some("repaired (float LP residual absorbed)"),
        CertificateStatus::Trivial => Some("trivial (no rounding errors)"),
    };
    if let Some(c) = cert {
        s.push_str(&format!("  certificate: {c}\n"));
    }
    s.push_str(&format!("  time: {:.3} s\n", r.wall_time_secs));
    s
}

pub fn bench_table(out: &[BenchOutcome]) -> String {
    let mut s = format!(
        "{:<14} {:<10} {:>3} {:>3} {:>3}  {:>12}  {:>10}  {:>7}  {:>8}\n",
        "case", "method", "n", "m", "d", "bound", "reference", "ratio", "time(s)"
    );
    for o in out {
        match &o.result {
            Ok(r) => s.push_str(&format!(
                "{:<14} {:<10} {:>3} {:>3} {:>3}  {:>12}  {:>10}  {:>7}  {:>8.2}\n",
                o.case,
                method_name(o.method),
                r.n,
                r.m,
                r.d,
                format!("{:.3e}", r.total.as_f64()),
                o.reference.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into()),
                o.ratio().map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
                o.wall_time_secs
            )),
            Err(e) => s.push_str(&format!("{:<14} {:<10} error: {e}\n", o.case, method_name(o.method))),
        }
    }
    s
}
