use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fpcert::algebra::{parse_decimal, pow2, Backend, Rational};
use fpcert::bench::{outcomes_csv, run_benchmarks, run_program, BenchOptions};
use fpcert::bernstein::BernOptions;
use fpcert::krivine::KsOptions;
use fpcert::report::{parse_rational, Method, ReportEntry};
use fpcert::round_model::{default_eps, parse_program, ConstantPolicy, ErrorForm};
use fpcert::{par, Error};

mod render;

const EXIT_PARSE: u8 = 1;
const EXIT_INAPPLICABLE: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_OTHER: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "fpcert", version, about = "Certified roundoff error bounds for straight-line floating-point programs")]
struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Bern,
    Ks,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Bern => vec![Method::Bern],
            MethodArg::Ks => vec![Method::Ks],
            MethodArg::Both => vec![Method::Bern, Method::Ks],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConstArg {
    None,
    NonRepresentable,
    All,
}

impl From<ConstArg> for ConstantPolicy {
    fn from(c: ConstArg) -> Self {
        match c {
            ConstArg::None => ConstantPolicy::None,
            ConstArg::NonRepresentable => ConstantPolicy::NonRepresentable,
            ConstArg::All => ConstantPolicy::All,
        }
    }
}

#[derive(clap::Args, Debug)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    /// Arithmetic backend (default: exact for `analyze`, float for `bench`).
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Uniform Bernstein degree (default: per-variable degrees of the problem).
    #[arg(long, value_name = "K", conflicts_with = "order")]
    degree: Option<u32>,
    /// Krivine-Stengle relaxation order (default: deg f + 1).
    #[arg(long, value_name = "k")]
    order: Option<u32>,
    /// Unit roundoff, as a decimal, `p/q` or `2^-N` (default 2^-53).
    #[arg(long, value_name = "E", value_parser = parse_eps)]
    eps: Option<Rational>,
    /// Degree elevations tried for rational programs.
    #[arg(long, value_name = "N", default_value_t = 3)]
    max_elevations: u32,
    /// Which literals carry a rounding error.
    #[arg(long, value_enum, default_value = "non-representable")]
    const_errors: ConstArg,
}

impl EngineArgs {
    fn options(&self, default_backend: BackendArg, export_lp: Option<PathBuf>) -> BenchOptions {
        BenchOptions {
            backend: self.backend.unwrap_or(default_backend).into(),
            policy: self.const_errors.into(),
            bern: BernOptions { degree: self.degree, max_elevations: self.max_elevations },
            ks: KsOptions { order: self.order, export_lp, ..KsOptions::default() },
            include_heavy: false,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound the roundoff error of one program.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        /// Print one JSON object per report line instead of a table.
        #[arg(long)]
        json: bool,
        /// Write the Krivine-Stengle LPs (`<stem>.lower.lp`, `<stem>.upper.lp`).
        #[arg(long, value_name = "PATH")]
        export_lp: Option<PathBuf>,
    },
    /// Run the bundled benchmark corpus against the stored references.
    Bench {
        /// Only cases whose name contains this string.
        #[arg(long, default_value = "")]
        filter: String,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        /// Also run cases marked as too large for routine runs.
        #[arg(long)]
        include_heavy: bool,
    },
}

fn parse_eps(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let v = if let Some(e) = s.strip_prefix("2^") {
        let k: i32 = e.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| format!("bad exponent in `{s}`"))?;
        Some(pow2(k))
    } else if s.contains('/') {
        parse_rational(s)
    } else {
        parse_decimal(s)
    };
    match v {
        Some(v) if v > Rational::from_integer(0.into()) && v < Rational::from_integer(1.into()) => Ok(v),
        Some(_) => Err("eps must lie strictly between 0 and 1".into()),
        None => Err(format!("cannot parse `{s}` as a number")),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_parse_error() {
        EXIT_PARSE
    } else if e.is_inapplicable() {
        EXIT_INAPPLICABLE
    } else if e.is_solver_failure() {
        EXIT_SOLVER
    } else {
        EXIT_OTHER
    }
}

fn analyze(file: &PathBuf, engine: &EngineArgs, json: bool, export_lp: Option<PathBuf>) -> u8 {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("fpcert: cannot read {}: {e}", file.display());
            return EXIT_OTHER;
        }
    };
    let prog = match parse_program(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("fpcert: {}: {e}", file.display());
            return EXIT_PARSE;
        }
    };
    let opts = engine.options(BackendArg::Exact, export_lp);
    let eps = engine.eps.clone().unwrap_or_else(default_eps);
    let ef = match ErrorForm::from_program(&prog, opts.policy, eps) {
        Ok(ef) => ef,
        Err(e) => {
            eprintln!("fpcert: {}: {e}", file.display());
            return exit_code(&e);
        }
    };

    let mut reports: Vec<ReportEntry> = Vec::new();
    let mut failures: Vec<(Method, Error)> = Vec::new();
    for m in engine.method.methods() {
        match run_program(&prog, &ef, m, &opts) {
            Ok(r) => reports.push(r),
            Err(e) => failures.push((m, e)),
        }
    }
    for r in &reports {
        if json {
            println!("{}", serde_json::to_string(r).expect("report serializes"));
        } else {
            print!("{}", render::entry(r));
        }
    }
    let only_inapplicable = failures.iter().all(|(_, e)| e.is_inapplicable());
    for (m, e) in &failures {
        if engine.method == MethodArg::Both && e.is_inapplicable() && !reports.is_empty() {
            eprintln!("fpcert: {m} skipped: {e}");
        } else {
            eprintln!("fpcert: {m}: {e}");
        }
    }
    match failures.first() {
        None => 0,
        Some(_) if engine.method == MethodArg::Both && only_inapplicable && !reports.is_empty() => 0,
        Some((_, e)) => failures.iter().map(|(_, e)| exit_code(e)).find(|c| *c != EXIT_INAPPLICABLE).unwrap_or(exit_code(e)),
    }
}

fn bench(filter: &str, engine: &EngineArgs, json: bool, csv: bool, include_heavy: bool) -> u8 {
    let mut opts = engine.options(BackendArg::Float, None);
    opts.include_heavy = include_heavy;
    let out = run_benchmarks(filter, &engine.method.methods(), &opts);
    if out.is_empty() {
        eprintln!("fpcert: no benchmark matches `{filter}`");
        return EXIT_OTHER;
    }
    if csv {
        print!("{}", outcomes_csv(&out));
    } else if json {
        for o in &out {
            match &o.result {
                Ok(r) => println!("{}", serde_json::to_string(r).expect("report serializes")),
                Err(e) => println!("{}", serde_json::json!({"name": o.case, "method": o.method, "error": e})),
            }
        }
    } else {
        print!("{}", render::bench_table(&out));
    }
    0
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE } else { 0 });
        }
    };
    if cli.sequential {
        par::set_parallel(false);
    }
    let code = match &cli.command {
        Command::Analyze { file, engine, json, export_lp } => analyze(file, engine, *json, export_lp.clone()),
        Command::Bench { filter, engine, json, csv, include_heavy } => bench(filter, engine, *json, *csv, *include_heavy),
    };
    ExitCode::from(code)
}
