use std::path::PathBuf;
use std::process::{Command, Output};

use fpcert::report::{CertificateStatus, Method, ReportEntry};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(format!("{name}.fp"))
}

fn fpcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpcert")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_lines(o: &Output) -> Vec<ReportEntry> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("one report per line")).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fpcert-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn overview_bernstein_linear_bound_is_two() {
    let path = corpus("overview");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--method", "bern", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json_lines(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].method, Method::Bern);
    assert_eq!(r[0].linear_hi.as_f64(), 2.0);
    assert_eq!(r[0].linear_lo.as_f64(), -2.0);
    assert_eq!(r[0].linear_hi.exact.as_deref(), Some("2"));
}

#[test]
fn overview_ks_reports_lp_dimensions() {
    let path = corpus("overview");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--method", "ks", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    let lp = r.lp.expect("ks reports LP size");
    assert_eq!((lp.columns, lp.rows), (106, 22));
    assert_eq!(r.k, vec![3]);
    assert_eq!(r.certificate, CertificateStatus::Verified);
}

#[test]
fn human_output_mentions_the_bound() {
    let path = corpus("overview");
    let o = fpcert(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("FPBern") && s.contains("FPKriSten"), "{s}");
    assert!(s.contains("106 columns x 22 rows"), "{s}");
}

#[test]
fn ks_on_rational_program_is_inapplicable() {
    let path = corpus("doppler1");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--method", "ks"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn both_skips_the_inapplicable_engine() {
    let path = corpus("doppler1");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--backend", "float", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_lines(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].method, Method::Bern);
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped"));
}

#[test]
fn bernstein_rejects_constraints() {
    let path = corpus("floudas3-4");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--method", "bern"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn syntax_error_exits_one() {
    let dir = scratch("syntax");
    let bad = dir.join("bad.fp");
    std::fs::write(&bad, "variables: x in [0, 1;\nexpression: x +;\n").unwrap();
    let o = fpcert(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_file_and_usage_errors() {
    assert_eq!(fpcert(&["analyze", "/nonexistent/x.fp"]).status.code(), Some(4));
    assert_eq!(fpcert(&["analyze"]).status.code(), Some(64));
    assert_eq!(fpcert(&["analyze", "x.fp", "--method", "simplex"]).status.code(), Some(64));
    assert_eq!(fpcert(&["--help"]).status.code(), Some(0));
}

#[test]
fn order_below_degree_is_reported() {
    let path = corpus("overview");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--method", "ks", "--order", "1"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn eps_forms_agree() {
    let path = corpus("overview");
    let p = path.to_str().unwrap();
    let totals: Vec<String> = ["2^-24", "1/16777216", "5.9604644775390625e-8"]
        .iter()
        .map(|e| {
            let o = fpcert(&["analyze", p, "--method", "bern", "--json", "--eps", e]);
            assert_eq!(o.status.code(), Some(0), "eps {e}");
            json_lines(&o)[0].total.decimal.clone()
        })
        .collect();
    assert!(totals.windows(2).all(|w| w[0] == w[1]), "{totals:?}");
    assert_eq!(fpcert(&["analyze", p, "--eps", "2"]).status.code(), Some(64));
}

#[test]
fn json_round_trips() {
    let path = corpus("kepler0");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--backend", "float", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    for (line, entry) in stdout(&o).lines().zip(json_lines(&o)) {
        assert_eq!(serde_json::to_string(&entry).unwrap(), line);
    }
}

#[test]
fn export_writes_both_lps() {
    let dir = scratch("export");
    let stem = dir.join("overview");
    let path = corpus("overview");
    let o = fpcert(&["analyze", path.to_str().unwrap(), "--method", "ks", "--export-lp", stem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for side in ["lower", "upper"] {
        let text = std::fs::read_to_string(dir.join(format!("overview.{side}.lp"))).unwrap();
        assert!(text.contains("Subject To"), "{side}: {text}");
    }
}

#[test]
fn bench_csv_and_sequential_flag() {
    let o = fpcert(&["--sequential", "bench", "--filter", "kepler0", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("case,method,total,reference,ratio,seconds,status"));
    assert_eq!(lines.filter(|l| l.starts_with("kepler0,")).count(), 2);
    assert_eq!(fpcert(&["bench", "--filter", "no-such-case"]).status.code(), Some(4));
}
