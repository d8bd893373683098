//! The bundled benchmark corpus and a small regression harness.
//!
//! Reference values are stored verbatim as printed (three significant
//! digits) and compared as ratios.

use std::time::Instant;

use crate::algebra::{Backend, Rational};
use crate::bernstein::{fpbern_run, BernOptions};
use crate::error::Result;
use crate::krivine::{fpkristen_run, KsOptions};
use crate::par;
use crate::report::{Method, ReportEntry};
use crate::round_model::{default_eps, parse_program, ConstantPolicy, ErrorForm, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Box,
    Semialgebraic,
}

/// Published upper bounds for one program, `None` where a tool was not run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct References {
    pub fpbern: Option<&'static str>,
    pub fpkristen: Option<&'static str>,
    pub real2float: Option<&'static str>,
    pub rosa: Option<&'static str>,
    pub fptaylor: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchmarkCase {
    pub name: String,
    pub source: String,
    pub domain: Domain,
    pub rational: bool,
    /// (n, m, d) as listed alongside the references.
    pub listed: (usize, usize, u32),
    pub references: References,
    /// Engines for which the case is too large for routine runs.
    pub heavy: Vec<Method>,
}

impl BenchmarkCase {
    pub fn program(&self) -> Result<Program> {
        parse_program(&self.source)
    }

    /// Bernstein needs a box; Krivine-Stengle needs a polynomial body.
    pub fn applicable(&self, method: Method) -> bool {
        match method {
            Method::Bern => self.domain == Domain::Box,
            Method::Ks => !self.rational,
        }
    }

    pub fn is_heavy(&self, method: Method) -> bool {
        self.heavy.contains(&method)
    }

    pub fn reference(&self, method: Method) -> Option<f64> {
        let r = match method {
            Method::Bern => self.references.fpbern,
            Method::Ks => self.references.fpkristen,
        };
        r.and_then(|s| s.parse().ok())
    }
}

macro_rules! corpus_file {
    ($name:literal) => {
        ($name, include_str!(concat!("../corpus/", $name, ".fp")))
    };
}

const FILES: [(&str, &str); 28] = [
    corpus_file!("overview"),
    corpus_file!("rigidBody1"),
    corpus_file!("rigidBody2"),
    corpus_file!("kepler0"),
    corpus_file!("kepler1"),
    corpus_file!("kepler2"),
    corpus_file!("sineTaylor"),
    corpus_file!("sineOrder3"),
    corpus_file!("sqroot"),
    corpus_file!("himmilbeau"),
    corpus_file!("schwefel"),
    corpus_file!("magnetism"),
    corpus_file!("caprasse"),
    corpus_file!("floudas2-6"),
    corpus_file!("floudas3-3"),
    corpus_file!("floudas3-4"),
    corpus_file!("floudas4-6"),
    corpus_file!("floudas4-7"),
    corpus_file!("doppler1"),
    corpus_file!("doppler2"),
    corpus_file!("doppler3"),
    corpus_file!("verhulst"),
    corpus_file!("carbonGas"),
    corpus_file!("predPrey"),
    corpus_file!("turbine1"),
    corpus_file!("turbine2"),
    corpus_file!("turbine3"),
    corpus_file!("jet"),
];

type Row = (&'static str, usize, usize, u32, [Option<&'static str>; 5]);

const fn all(fpbern: &'static str, ks: &'static str, r2f: &'static str, rosa: &'static str, fpt: &'static str) -> [Option<&'static str>; 5] {
    [Some(fpbern), Some(ks), Some(r2f), Some(rosa), Some(fpt)]
}

// name, n, m, d, [FPBern, FPKriSten, Real2Float, Rosa, FPTaylor]
const TABLE: [Row; 35] = [
    ("rigidBody1", 3, 10, 3, all("5.33e-13", "5.33e-13", "5.33e-13", "5.08e-13", "3.87e-13")),
    ("rigidBody2", 3, 15, 5, all("6.48e-11", "6.48e-11", "6.48e-11", "6.48e-11", "5.24e-11")),
    ("kepler0", 6, 21, 3, all("1.08e-13", "1.08e-13", "1.18e-13", "1.16e-13", "1.05e-13")),
    ("kepler1", 4, 28, 4, all("4.23e-13", "4.23e-13", "4.47e-13", "6.49e-13", "4.49e-13")),
    ("kepler2", 6, 42, 4, all("2.03e-12", "2.03e-12", "2.09e-12", "2.89e-12", "2.10e-12")),
    ("sineTaylor", 1, 13, 8, all("5.51e-16", "5.51e-16", "6.03e-16", "9.56e-16", "6.75e-16")),
    ("sineOrder3", 1, 6, 4, all("1.35e-15", "1.25e-15", "1.19e-15", "1.11e-15", "9.97e-16")),
    ("sqroot", 1, 15, 5, all("1.29e-15", "1.29e-15", "1.29e-15", "8.41e-16", "7.13e-16")),
    ("himmilbeau", 2, 11, 5, all("2.00e-12", "1.97e-12", "1.43e-12", "1.43e-12", "1.32e-12")),
    ("schwefel", 3, 15, 5, all("1.48e-11", "1.48e-11", "1.49e-11", "1.49e-11", "1.03e-11")),
    ("magnetism", 7, 27, 3, all("1.27e-14", "1.27e-14", "1.27e-14", "1.27e-14", "7.61e-15")),
    ("caprasse", 4, 34, 5, all("4.49e-15", "4.49e-15", "5.63e-15", "5.96e-15", "3.04e-15")),
    ("ex-2-2-5", 2, 9, 3, all("2.23e-14", "2.23e-14", "2.23e-14", "2.23e-14", "1.96e-14")),
    ("ex-2-2-10", 2, 14, 3, all("5.33e-14", "5.33e-14", "5.33e-15", "5.33e-14", "4.85e-14")),
    ("ex-2-2-15", 2, 19, 3, all("9.55e-14", "9.55e-14", "9.55e-14", "9.55e-14", "8.84e-14")),
    ("ex-2-2-20", 2, 24, 3, [Some("1.49e-13"), Some("1.49e-13"), None, Some("1.49e-13"), Some("1.40e-13")]),
    ("ex-2-5-2", 2, 9, 6, all("1.67e-13", "1.67e-13", "1.67e-13", "1.67e-13", "1.41e-13")),
    ("ex-2-10-2", 2, 14, 11, all("1.05e-11", "1.34e-11", "1.05e-11", "1.05e-11", "8.76e-12")),
    ("ex-5-2-2", 5, 12, 3, all("8.55e-14", "8.55e-14", "8.55e-14", "8.55e-14", "7.72e-14")),
    ("ex-10-2-2", 10, 22, 3, all("5.16e-13", "5.16e-13", "5.16e-13", "5.16e-13", "4.82e-13")),
    ("floudas2-6", 10, 50, 3, [None, Some("4.34e-13"), Some("5.15e-13"), Some("5.87e-13"), Some("7.88e-13")]),
    ("floudas3-3", 6, 25, 3, [None, Some("4.05e-13"), Some("5.81e-13"), Some("4.05e-13"), Some("5.76e-13")]),
    ("floudas3-4", 3, 7, 3, [None, Some("2.67e-15"), Some("2.78e-15"), Some("2.56e-15"), Some("2.23e-15")]),
    ("floudas4-6", 2, 4, 3, [None, Some("1.89e-15"), Some("1.82e-15"), Some("1.33e-15"), Some("1.23e-15")]),
    ("floudas4-7", 2, 8, 3, [None, Some("2.07e-14"), Some("1.06e-14"), Some("1.31e-14"), Some("1.80e-14")]),
    ("doppler1", 3, 11, 3, [Some("1.65e-13"), None, Some("7.65e-12"), Some("4.92e-13"), Some("1.59e-13")]),
    ("doppler2", 3, 11, 3, [Some("3.14e-13"), None, Some("1.57e-11"), Some("1.29e-12"), Some("2.90e-13")]),
    ("doppler3", 3, 11, 3, [Some("8.14e-14"), None, Some("8.55e-12"), Some("2.03e-13"), Some("8.22e-14")]),
    ("verhulst", 1, 5, 5, [Some("4.40e-16"), None, Some("4.67e-16"), Some("6.82e-16"), Some("3.53e-16")]),
    ("carbonGas", 1, 11, 4, [Some("1.42e-08"), None, Some("2.21e-08"), Some("4.64e-08"), Some("1.23e-08")]),
    ("predPrey", 1, 7, 10, [Some("2.32e-16"), None, Some("2.52e-16"), Some("2.94e-16"), Some("1.89e-16")]),
    ("turbine1", 3, 17, 4, [Some("7.75e-14"), None, Some("2.45e-11"), Some("1.25e-13"), Some("2.33e-14")]),
    ("turbine2", 3, 13, 2, [Some("1.16e-13"), None, Some("2.08e-12"), Some("1.76e-13"), Some("3.14e-14")]),
    ("turbine3", 3, 17, 4, [Some("5.36e-14"), None, Some("1.71e-11"), Some("8.50e-14"), Some("1.70e-14")]),
    ("jet", 2, 24, 8, [Some("2.73e-09"), None, None, Some("1.62e-08"), Some("1.50e-11")]),
];

/// Source text of ex-{n}-{deg}-{nSum}: nSum + 1 copies of (x_1 + … + x_n)^deg
/// summed, over [-1, 1]^n. Repeated subterms are shared by the parser, so
/// each copy after the first contributes only its addition.
pub fn ex_family_source(n: usize, nsum: usize, deg: usize) -> String {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i} in [-1, 1]")).collect();
    let sum = format!("({})", (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" + "));
    let prod = vec![sum; deg].join("*");
    let body = vec![prod; nsum + 1].join(" + ");
    format!("name: ex-{n}-{deg}-{nsum}\nvars: {};\nexpr: {body}\n", vars.join("; "))
}

pub fn generate_ex_family(n: usize, nsum: usize, deg: usize) -> Program {
    assert!(n >= 1 && nsum >= 1 && deg >= 1, "generator parameters must be positive");
    parse_program(&ex_family_source(n, nsum, deg)).expect("generated program parses")
}

fn parse_ex_name(name: &str) -> Option<(usize, usize, usize)> {
    let mut it = name.strip_prefix("ex-")?.split('-').map(|s| s.parse::<usize>().ok());
    let (n, deg, nsum) = (it.next()??, it.next()??, it.next()??);
    Some((n, deg, nsum))
}

/// Every bundled case: the 27 programs, the 8 generated ones and the
/// introductory x² − x example.
pub fn corpus() -> Vec<BenchmarkCase> {
    let mut out: Vec<BenchmarkCase> = TABLE
        .iter()
        .map(|&(name, n, m, d, r)| {
            let source = match parse_ex_name(name) {
                Some((n, deg, nsum)) => ex_family_source(n, nsum, deg),
                None => FILES.iter().find(|(f, _)| *f == name).expect("corpus file for every listed case").1.to_string(),
            };
            let domain = if name.starts_with("floudas") { Domain::Semialgebraic } else { Domain::Box };
            let rational = r[0].is_some() && r[1].is_none();
            BenchmarkCase {
                name: name.to_string(),
                source,
                domain,
                rational,
                listed: (n, m, d),
                references: References { fpbern: r[0], fpkristen: r[1], real2float: r[2], rosa: r[3], fptaylor: r[4] },
                heavy: if matches!(name, "floudas2-6" | "ex-2-10-2") { vec![Method::Ks] } else { Vec::new() },
            }
        })
        .collect();
    out.push(BenchmarkCase {
        name: "overview".into(),
        source: FILES[0].1.to_string(),
        domain: Domain::Box,
        rational: false,
        listed: (1, 3, 3),
        references: References { fpbern: None, fpkristen: None, real2float: None, rosa: None, fptaylor: None },
        heavy: Vec::new(),
    });
    out
}

pub fn case(name: &str) -> Option<BenchmarkCase> {
    corpus().into_iter().find(|c| c.name == name)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchOptions {
    pub backend: Backend,
    pub policy: ConstantPolicy,
    pub bern: BernOptions,
    pub ks: KsOptions,
    pub include_heavy: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            backend: Backend::Float,
            policy: ConstantPolicy::default(),
            bern: BernOptions::default(),
            ks: KsOptions::default(),
            include_heavy: false,
        }
    }
}

/// One (case, method) run.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchOutcome {
    pub case: String,
    pub method: Method,
    pub result: std::result::Result<ReportEntry, String>,
    pub reference: Option<f64>,
    pub wall_time_secs: f64,
}

impl BenchOutcome {
    /// Reported total over the published value.
    pub fn ratio(&self) -> Option<f64> {
        let r = self.result.as_ref().ok()?;
        Some(r.total_f64() / self.reference?)
    }
}

/// Analyse one case with one engine.
pub fn run_case(case: &BenchmarkCase, method: Method, opts: &BenchOptions) -> Result<ReportEntry> {
    let prog = case.program()?;
    let ef = ErrorForm::from_program(&prog, opts.policy, default_eps())?;
    run_program(&prog, &ef, method, opts)
}

pub fn run_program(prog: &Program, ef: &ErrorForm, method: Method, opts: &BenchOptions) -> Result<ReportEntry> {
    match (method, opts.backend) {
        (Method::Bern, Backend::Exact) => fpbern_run::<Rational>(prog, ef, &opts.bern),
        (Method::Bern, Backend::Float) => fpbern_run::<f64>(prog, ef, &opts.bern),
        (Method::Ks, Backend::Exact) => fpkristen_run::<Rational>(prog, ef, &opts.ks),
        (Method::Ks, Backend::Float) => fpkristen_run::<f64>(prog, ef, &opts.ks),
    }
}

/// Run every applicable (case, method) pair whose case name contains
/// `filter`. Failures are recorded per case; the output is ordered by case
/// name, then method.
pub fn run_benchmarks(filter: &str, methods: &[Method], opts: &BenchOptions) -> Vec<BenchOutcome> {
    let jobs: Vec<(BenchmarkCase, Method)> = corpus()
        .into_iter()
        .filter(|c| c.name.contains(filter))
        .flat_map(|c| {
            let ms: Vec<Method> = methods
                .iter()
                .copied()
                .filter(|m| c.applicable(*m) && (opts.include_heavy || !c.is_heavy(*m)))
                .collect();
            ms.into_iter().map(move |m| (c.clone(), m))
        })
        .collect();
    let mut out = par::map(&jobs, |(c, m)| {
        let start = Instant::now();
        let result = run_case(c, *m, opts).map_err(|e| e.to_string());
        BenchOutcome {
            case: c.name.clone(),
            method: *m,
            result,
            reference: c.reference(*m),
            wall_time_secs: start.elapsed().as_secs_f64(),
        }
    });
    out.sort_by(|a, b| a.case.cmp(&b.case).then(a.method.cmp(&b.method)));
    out
}

/// CSV with one line per outcome.
pub fn outcomes_csv(outcomes: &[BenchOutcome]) -> String {
    let mut s = String::from("case,method,total,reference,ratio,seconds,status\n");
    for o in outcomes {
        let (total, status) = match &o.result {
            Ok(r) => (r.total.decimal.clone(), "ok".to_string()),
            Err(e) => (String::new(), e.replace(',', ";")),
        };
        s.push_str(&format!(
            "{},{},{},{},{},{:.3},{}\n",
            o.case,
            o.method,
            total,
            o.reference.map(|r| format!("{r:e}")).unwrap_or_default(),
            o.ratio().map(|r| format!("{r:.4}")).unwrap_or_default(),
            o.wall_time_secs,
            status
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex_family_metadata() {
        for (n, nsum, deg, m, d) in [(2, 5, 2, 9, 3), (2, 10, 2, 14, 3), (2, 2, 5, 9, 6), (5, 2, 2, 12, 3), (10, 2, 2, 22, 3)] {
            let p = generate_ex_family(n, nsum, deg);
            let ef = ErrorForm::from_program(&p, ConstantPolicy::NonRepresentable, default_eps()).unwrap();
            assert_eq!((ef.n, ef.m, ef.degree()), (n, m, d), "{}", p.name);
        }
    }

    #[test]
    fn degenerate_generator() {
        let p = generate_ex_family(1, 1, 1);
        assert_eq!(p.name, "ex-1-1-1");
        let ef = ErrorForm::from_program(&p, ConstantPolicy::NonRepresentable, default_eps()).unwrap();
        assert_eq!(ef.f.num().eval(&[Rational::from_integer(3.into())]).unwrap(), Rational::from_integer(6.into()));
    }

    #[test]
    fn corpus_is_complete_and_parses() {
        let c = corpus();
        assert_eq!(c.len(), 36);
        for case in &c {
            let p = case.program().unwrap_or_else(|e| panic!("{}: {e}", case.name));
            assert_eq!(p.name, case.name);
            assert_eq!(p.nvars(), case.listed.0, "{}", case.name);
            assert_eq!(p.has_constraints(), case.domain == Domain::Semialgebraic, "{}", case.name);
            let ef = ErrorForm::from_program(&p, ConstantPolicy::NonRepresentable, default_eps()).unwrap();
            assert_eq!(!ef.is_polynomial(), case.rational, "{}", case.name);
        }
    }

    #[test]
    fn applicability_mirrors_the_dashes() {
        for case in corpus() {
            if case.name == "overview" {
                continue;
            }
            assert_eq!(case.applicable(Method::Bern), case.references.fpbern.is_some(), "{}", case.name);
            assert_eq!(case.applicable(Method::Ks), case.references.fpkristen.is_some(), "{}", case.name);
        }
    }

    #[test]
    fn harness_orders_and_records_failures() {
        let out = run_benchmarks("ex-2-2-5", &[Method::Ks, Method::Bern], &BenchOptions::default());
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].method, Method::Bern);
        let r = out[0].ratio().unwrap();
        assert!((0.9..1.1).contains(&r), "{r}");
        assert!(outcomes_csv(&out).lines().count() == 3);
    }
}
