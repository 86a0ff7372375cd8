mod input;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi_series::hypergeometric::expand_monomial_with;
use jacobi_series::scalar::rational_to_f64;
use jacobi_series::series::parse_rational;
use jacobi_series::verify::{residual_order_study, run_verify, Fault, Suite, VerifyConfig};
use jacobi_series::{
    solve_all, solve_branch, EigenResult, Error, Execution, JacobiMatrix, Layout, MonomialSpec, Rational, Scalar,
    SolveOptions,
};
use serde_json::{json, Value};

use input::{parse_matrix, Mode};
use output::Branch;

const MAX_D: usize = 16;
const MAX_DEGREE: u32 = 24;
const MAX_COEFFICIENTS: u128 = 2_000_000;

#[derive(Debug)]
pub enum CliError {
    Verify(String),
    Parse(String),
    Matrix(String),
    Limit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Matrix(_) => 3,
            CliError::Limit(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Matrix(m) => write!(f, "invalid matrix: {m}"),
            CliError::Limit(m) => write!(f, "limit exceeded: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::MatrixTooSmall(_) | Error::LengthMismatch { .. } | Error::DuplicateDiagonal { .. } => {
                CliError::Matrix(e.to_string())
            }
            Error::Parse(_) | Error::BadIndex { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Limit(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "jacobi-series",
    version,
    about = "Eigenpairs of tridiagonal matrices as exact hypergeometric series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and eigenvectors of one or all branches.
    Solve(SolveArgs),
    /// Series expansion of a monomial in u and ut.
    Expand(ExpandArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Time coefficient enumeration, sequential against parallel.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Args)]
struct Common {
    /// Branch index (1-based) or `all`.
    #[arg(long, default_value = "all")]
    k: String,
    /// Truncation degree N.
    #[arg(long, default_value_t = 3)]
    degree: u32,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON matrix document.
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Comma-separated scale factors; emits residual and gap for degrees 1..=N.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Args)]
struct ExpandArgs {
    /// JSON matrix document; only its size is used.
    input: Option<PathBuf>,
    /// Matrix size, instead of an input document.
    #[arg(long, conflicts_with = "input")]
    d: Option<usize>,
    /// Exponents of u and ut, e.g. `1,0;2` for u_1 u_2^0 ut_1^2.
    #[arg(long)]
    monomial: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CoeffH,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run (repeatable or comma-separated); default all.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    max_d: usize,
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Random points per branch for the Jacobian and Lagrange suites.
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 5)]
    d: usize,
    /// Branch; defaults to the middle one.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 4)]
    degree: u32,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Parse(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read_matrix(path: &PathBuf, mode: Mode) -> Result<JacobiMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text, mode)
}

fn branches(k: &str, d: usize) -> Result<Vec<usize>, CliError> {
    if k == "all" {
        return Ok((1..=d).collect());
    }
    let k: usize = k
        .parse()
        .map_err(|_| CliError::Parse(format!("--k must be `all` or an integer, got {k:?}")))?;
    if k == 0 || k > d {
        return Err(Error::BadIndex { k, d }.into());
    }
    Ok(vec![k])
}

fn binomial(n: u128, k: u128) -> u128 {
    (1..=k).fold(1u128, |acc, i| acc.saturating_mul(n + 1 - i) / i)
}

fn check_limits(d: usize, degree: u32) -> Result<(), CliError> {
    if d > MAX_D {
        return Err(CliError::Limit(format!("d = {d} exceeds {MAX_D}")));
    }
    if degree > MAX_DEGREE {
        return Err(CliError::Limit(format!("degree {degree} exceeds {MAX_DEGREE}")));
    }
    // widest layout has 2d - 3 variables
    let vars = (2 * d).saturating_sub(3).max(1) as u128;
    let coeffs = binomial(vars + degree as u128, degree as u128);
    if coeffs > MAX_COEFFICIENTS {
        return Err(CliError::Limit(format!(
            "up to {coeffs} coefficients per series exceeds {MAX_COEFFICIENTS}"
        )));
    }
    Ok(())
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    }
}

fn solve_branches<T: Scalar>(
    m: &JacobiMatrix,
    ks: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<EigenResult<T>>, Error> {
    if ks.len() == m.d() {
        solve_all(m, opts)
    } else {
        ks.iter().map(|&k| solve_branch(m, k, opts)).collect()
    }
}

fn run_solve(args: &SolveArgs) -> Result<(), CliError> {
    let c = &args.common;
    let m = read_matrix(&args.input, mode_of(c.mode))?;
    check_limits(m.d(), c.degree)?;
    let ks = branches(&c.k, m.d())?;
    if let Some(list) = &args.sweep {
        return run_sweep(&m, &ks, c, list);
    }
    let opts = SolveOptions::new(c.degree);
    let layout = |k| Layout::for_branch(m.d(), k);
    let text = match c.mode {
        ModeArg::Exact => {
            let results: Vec<EigenResult<Rational>> = solve_branches(&m, &ks, &opts)?;
            let bs: Vec<Branch<Rational>> = results
                .iter()
                .map(|r| Branch {
                    result: r,
                    layout: layout(r.k),
                    eigenvalue_float: rational_to_f64(&r.eigenvalue),
                })
                .collect();
            match c.format {
                Format::Json => json_text(&output::solve_json(&bs, c.degree, "exact", |x| json!(output::rat(x)))),
                Format::Csv => output::solve_csv(&bs, output::rat),
                Format::Text => output::solve_text(&bs, output::rat),
            }
        }
        ModeArg::Float => {
            let results: Vec<EigenResult<f64>> = solve_branches(&m, &ks, &opts)?;
            let bs: Vec<Branch<f64>> = results
                .iter()
                .map(|r| Branch {
                    result: r,
                    layout: layout(r.k),
                    eigenvalue_float: r.eigenvalue,
                })
                .collect();
            match c.format {
                Format::Json => json_text(&output::solve_json(&bs, c.degree, "float", |x| json!(x))),
                Format::Csv => output::solve_csv(&bs, |x| format!("{x:e}")),
                Format::Text => output::solve_text(&bs, |x| format!("{x:e}")),
            }
        }
    };
    emit(&c.out, &text)
}

fn run_sweep(m: &JacobiMatrix, ks: &[usize], c: &Common, list: &str) -> Result<(), CliError> {
    let eps: Vec<Rational> = list
        .split(',')
        .map(|s| {
            let s = s.trim();
            parse_rational(s)
                .or_else(|| s.parse::<f64>().ok().and_then(Rational::from_float))
                .ok_or_else(|| CliError::Parse(format!("--sweep entry {s:?} is not a number")))
        })
        .collect::<Result<_, _>>()?;
    let degrees: Vec<u32> = (1..=c.degree.max(1)).collect();
    let mut rows = Vec::new();
    for &k in ks {
        for s in residual_order_study(m, k, &eps, &degrees, Execution::Parallel)? {
            rows.push((k, s));
        }
    }
    let text = match c.format {
        Format::Json => json_text(&output::sweep_json(&rows)),
        Format::Csv | Format::Text => output::sweep_csv(&rows),
    };
    emit(&c.out, &text)
}

fn parse_monomial(s: &str, layout: &Layout) -> Result<MonomialSpec, CliError> {
    let (u, ut) = s.split_once(';').unwrap_or((s, ""));
    let side = |part: &str, want: usize, name: &str| -> Result<Vec<i64>, CliError> {
        let v: Vec<i64> = if part.trim().is_empty() {
            vec![]
        } else {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| CliError::Parse(format!("--monomial: {x:?} is not an integer")))
                })
                .collect::<Result<_, _>>()?
        };
        if v.len() != want {
            return Err(CliError::Parse(format!(
                "--monomial: {name} needs {want} exponents, got {}",
                v.len()
            )));
        }
        Ok(v)
    };
    Ok(MonomialSpec {
        k: side(u, layout.r, "u")?,
        kt: side(ut, layout.rt, "ut")?,
    })
}

fn run_expand(args: &ExpandArgs) -> Result<(), CliError> {
    let c = &args.common;
    let d = match (&args.input, args.d) {
        (Some(p), _) => read_matrix(p, mode_of(c.mode))?.d(),
        (None, Some(d)) if d >= 2 => d,
        (None, Some(d)) => return Err(Error::MatrixTooSmall(d).into()),
        (None, None) => return Err(CliError::Parse("expand needs an input document or --d".into())),
    };
    check_limits(d, c.degree)?;
    let ks = branches(&c.k, d)?;
    if ks.len() != 1 {
        return Err(CliError::Parse("expand needs a single branch --k".into()));
    }
    let layout = Layout::for_branch(d, ks[0]);
    let spec = parse_monomial(&args.monomial, &layout)?;
    let s = expand_monomial_with(&spec, &layout, c.degree, Execution::Parallel)?;
    let text = match c.format {
        Format::Json => json_text(&output::series_json(&s, &layout)),
        Format::Csv => output::series_csv(&s, &layout),
        Format::Text => output::series_text(&s, &layout),
    };
    emit(&c.out, &text)
}

fn run_verify_cmd(args: &VerifyArgs) -> Result<(), CliError> {
    let suites = if args.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suite
            .iter()
            .map(|s| s.parse::<Suite>())
            .collect::<Result<_, _>>()?
    };
    check_limits(args.max_d, args.degree)?;
    let cfg = VerifyConfig {
        suites,
        seed: args.seed,
        max_d: args.max_d,
        degree: args.degree,
        points: args.points,
        fault: args.inject_fault.map(|FaultArg::CoeffH| Fault::CoeffH),
        exec: Execution::Parallel,
    };
    let report = run_verify(&cfg);
    let text = match args.format {
        Format::Json => json_text(&output::verify_json(&report)),
        Format::Csv | Format::Text => output::verify_text(&report),
    };
    emit(&args.out, &text)?;
    match report
        .suites
        .iter()
        .find_map(|s| s.first_failure().map(|f| (s.suite, f)))
    {
        None => Ok(()),
        Some((suite, f)) => Err(CliError::Verify(format!("{suite} {}: {}", f.case, f.message))),
    }
}

fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.d < 2 {
        return Err(Error::MatrixTooSmall(args.d).into());
    }
    check_limits(args.d, args.degree)?;
    let k = args.k.unwrap_or(args.d.div_ceil(2));
    if k == 0 || k > args.d {
        return Err(Error::BadIndex { k, d: args.d }.into());
    }
    let layout = Layout::for_branch(args.d, k);
    let specs: Vec<MonomialSpec> = (1..=layout.r)
        .map(|i| MonomialSpec::unit(&layout, i))
        .chain((1..=layout.rt).map(|i| MonomialSpec::unit_tilde(&layout, i)))
        .collect();
    let mut rows = Vec::new();
    for exec in [Execution::Sequential, Execution::Parallel] {
        let mut best = f64::INFINITY;
        let mut terms = 0;
        for _ in 0..args.repeat.max(1) {
            let start = Instant::now();
            terms = 0;
            for s in &specs {
                terms += expand_monomial_with(s, &layout, args.degree, exec)?.len();
            }
            best = best.min(start.elapsed().as_secs_f64());
        }
        rows.push((exec, best, terms));
    }
    let text = match args.format {
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|(e, t, n)| json!({ "execution": format!("{e:?}").to_lowercase(), "seconds": t, "terms": n }))
                .collect(),
        )),
        Format::Csv => {
            let mut s = String::from("execution,seconds,terms\n");
            for (e, t, n) in &rows {
                s.push_str(&format!("{},{t:e},{n}\n", format!("{e:?}").to_lowercase()));
            }
            s
        }
        Format::Text => rows
            .iter()
            .map(|(e, t, n)| {
                format!(
                    "{:<10} {:>10.3} ms  {n} terms  (d={} k={k} N={})\n",
                    format!("{e:?}").to_lowercase(),
                    t * 1e3,
                    args.d,
                    args.degree
                )
            })
            .collect(),
    };
    emit(&args.out, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Expand(a) => run_expand(a),
        Command::Verify(a) => run_verify_cmd(a),
        Command::Bench(a) => run_bench(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
