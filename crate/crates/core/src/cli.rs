//! Command-line front end. Exit codes: 0 success, 1 other errors, 2 parse
//! errors, 3 invalid algebras, 4 numerical rank or decomposition
//! ambiguity, 5 disagreement between methods or with expected values.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::catalog::{self, CatalogEntry, Params};
use crate::error::Error;
use crate::io;
use crate::killing::{self, Method};
use crate::linalg::DEFAULT_TOL;
use crate::report::{self, SCHEMA};
use crate::sampling;
use crate::structure::killing_dimensions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::UnknownCatalogEntry(_) => EXIT_PARSE,
        Error::InvalidAlgebra(_) | Error::AlgebraAbelian => EXIT_INVALID,
        Error::NumericalRankFailure { .. }
        | Error::DecompositionAmbiguous(_)
        | Error::InternalInvariantViolation(_) => EXIT_NUMERICAL,
        _ => EXIT_OTHER,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nilkill",
    version,
    about = "Killing forms on metric 2-step nilpotent Lie algebras"
)]
pub struct Cli {
    /// Relative tolerance for rank decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Input {
    /// Path to an algebra JSON file, or `catalog:<name>`.
    pub input: String,
    /// λ for `complex_heisenberg`.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// l for `heisenberg` (dimension 2l+1).
    #[arg(long)]
    pub l: Option<usize>,
    /// Flat summand dimension (the dimension itself for `euclidean`).
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Structured,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decomposition, factor flags, Killing dimensions and the j trace form.
    Analyze(Input),
    /// Basis of the Killing forms of one degree.
    Killing {
        #[command(flatten)]
        input: Input,
        /// Form degree k, at least 1.
        #[arg(long)]
        degree: usize,
        /// Solver; the structured one covers degrees 2 and 3.
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// Abelian part and irreducible factors.
    Decompose(Input),
    /// Built-in algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Recompute both classification tables.
    Tables {
        /// Also compare brute force with the structured solvers on this many
        /// seeded random metrics per entry.
        #[arg(long, default_value_t = 0)]
        random_metrics: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show {
        name: String,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
    },
}

fn params(lambda: Option<f64>, l: Option<usize>, d: Option<usize>) -> Params {
    let def = Params::default();
    Params {
        lambda: lambda.unwrap_or(def.lambda),
        l: l.unwrap_or(def.l),
        d,
    }
}

/// Loads an algebra from a file or `catalog:<name>` without validating it.
pub fn load(input: &Input) -> Result<MetricLieAlgebra, Error> {
    match input.input.strip_prefix("catalog:") {
        Some(name) => catalog::lookup(name, &params(input.lambda, input.l, input.d)),
        None => io::read_algebra(&input.input),
    }
}

fn emit<T: Serialize>(
    out: &mut dyn Write,
    json: bool,
    value: &T,
    text: String,
) -> std::io::Result<()> {
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(value).expect("plain data serializes")
        )
    } else {
        write!(out, "{text}")
    }
}

#[derive(Debug, Serialize)]
struct TableRow {
    key: &'static str,
    name: &'static str,
    p: usize,
    expected: Option<(usize, usize)>,
    computed: Option<(usize, usize)>,
    status: &'static str,
}

#[derive(Debug, Serialize)]
struct Table {
    title: &'static str,
    degree: usize,
    rows: Vec<TableRow>,
}

#[derive(Debug, Serialize)]
struct RandomCheck {
    key: &'static str,
    trials: usize,
    mismatches: usize,
}

#[derive(Debug, Serialize)]
struct TablesReport {
    schema: u32,
    tol: f64,
    tables: Vec<Table>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    random_checks: Vec<RandomCheck>,
    mismatches: usize,
}

fn table(
    title: &'static str,
    degree: usize,
    entries: &[CatalogEntry],
    tol: f64,
) -> Result<Table, Error> {
    let mut rows = Vec::new();
    for e in entries {
        let row = match e.build() {
            None => TableRow {
                key: e.key,
                name: e.name,
                p: e.dim,
                expected: None,
                computed: None,
                status: "skipped",
            },
            Some(l) => {
                let dims = killing_dimensions(&l?, tol)?;
                let computed = (dims.dim_k2, dims.dim_k3);
                TableRow {
                    key: e.key,
                    name: e.name,
                    p: e.dim,
                    expected: e.expected,
                    computed: Some(computed),
                    status: if e.expected == Some(computed) {
                        "ok"
                    } else {
                        "mismatch"
                    },
                }
            }
        };
        rows.push(row);
    }
    Ok(Table {
        title,
        degree,
        rows,
    })
}

fn random_checks(
    entries: &[CatalogEntry],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<RandomCheck>, Error> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::new();
    for e in entries {
        let Some(l) = e.build() else { continue };
        let l = l?;
        let mut mismatches = 0;
        for _ in 0..trials {
            let lr = sampling::with_random_metric(&l, &mut rng)?;
            let frame = crate::AdaptedFrame::new(&lr, tol)?;
            for k in [2, 3] {
                let brute = killing::killing_nullspace_brute(&lr, &frame, k, tol)?;
                let structured = killing::solve(&lr, k, Method::Structured, tol)?;
                if brute.dim() != structured.dim() || brute.span_residual(&structured) > 1e-8 {
                    mismatches += 1;
                }
            }
        }
        out.push(RandomCheck {
            key: e.key,
            trials,
            mismatches,
        });
    }
    Ok(out)
}

fn tables(out: &mut dyn Write, cli: &Cli, random_metrics: usize) -> Result<i32, Error> {
    let (two, three) = catalog::classification_lists();
    let tables = vec![
        table("non-zero Killing 2-forms, dimension <= 8", 2, &two, cli.tol)?,
        table(
            "non-zero Killing 3-forms, dimension <= 6",
            3,
            &three,
            cli.tol,
        )?,
    ];
    let checks = if random_metrics > 0 {
        random_checks(&catalog::entries(), random_metrics, cli.seed, cli.tol)?
    } else {
        vec![]
    };
    let mismatches = tables
        .iter()
        .flat_map(|t| &t.rows)
        .filter(|r| r.status == "mismatch")
        .count()
        + checks.iter().map(|c| c.mismatches).sum::<usize>();
    let report = TablesReport {
        schema: SCHEMA,
        tol: cli.tol,
        tables,
        random_checks: checks,
        mismatches,
    };
    let mut text = String::new();
    for t in &report.tables {
        text.push_str(&format!("{} (degree {})\n", t.title, t.degree));
        text.push_str(&format!(
            "  {:<12} {:<28} {:>2} {:>10} {:>10}  {}\n",
            "key", "algebra", "p", "expected", "computed", "status"
        ));
        for r in &t.rows {
            let fmt = |d: Option<(usize, usize)>| {
                d.map(|(a, b)| format!("({a},{b})"))
                    .unwrap_or_else(|| "-".into())
            };
            text.push_str(&format!(
                "  {:<12} {:<28} {:>2} {:>10} {:>10}  {}\n",
                r.key,
                r.name,
                r.p,
                fmt(r.expected),
                fmt(r.computed),
                r.status
            ));
        }
    }
    for c in &report.random_checks {
        text.push_str(&format!(
            "random metrics {}: {} trials, {} mismatches\n",
            c.key, c.trials, c.mismatches
        ));
    }
    text.push_str(&format!("mismatches = {}\n", report.mismatches));
    emit(out, cli.json, &report, text)?;
    Ok(if report.mismatches == 0 {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

#[derive(Debug, Serialize)]
struct CatalogList {
    schema: u32,
    parametric: Vec<&'static str>,
    entries: Vec<CatalogEntry>,
}

fn run_inner(cli: &Cli, out: &mut dyn Write) -> Result<i32, Error> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::Parse(format!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    match &cli.command {
        Command::Analyze(input) => {
            let l = load(input)?;
            let r = report::analyze(&l, cli.tol)?;
            emit(out, cli.json, &r, r.to_text())?;
            Ok(EXIT_OK)
        }
        Command::Decompose(input) => {
            let l = load(input)?;
            let r = report::decomposition(&l, cli.tol)?;
            emit(out, cli.json, &r, r.to_text())?;
            Ok(EXIT_OK)
        }
        Command::Killing {
            input,
            degree,
            method,
        } => {
            if *degree == 0 {
                return Err(Error::Parse("--degree must be at least 1".into()));
            }
            let l = load(input)?;
            let methods: &[Method] = match method {
                MethodArg::Brute => &[Method::Brute],
                MethodArg::Structured => &[Method::Structured],
                MethodArg::Both if *degree == 2 || *degree == 3 => {
                    &[Method::Brute, Method::Structured]
                }
                MethodArg::Both => &[Method::Brute],
            };
            let r = report::killing_report(&l, *degree, methods, cli.tol)?;
            emit(out, cli.json, &r, r.to_text())?;
            Ok(if r.agree == Some(false) {
                EXIT_MISMATCH
            } else {
                EXIT_OK
            })
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let (two, _) = catalog::classification_lists();
                let mut entries = catalog::entries();
                entries.extend(two.into_iter().filter(|e| e.construction_external));
                let list = CatalogList {
                    schema: SCHEMA,
                    parametric: catalog::PARAMETRIC.to_vec(),
                    entries,
                };
                let mut text = String::from("parametric: heisenberg --l, complex_heisenberg --lambda, free_two_step_3, euclidean --d\n");
                for e in &list.entries {
                    let status = if e.construction_external {
                        "no explicit construction".to_string()
                    } else {
                        let (a, b) = e.expected.expect("built entries carry expectations");
                        format!("expected (dimK2, dimK3) = ({a}, {b})")
                    };
                    text.push_str(&format!(
                        "{:<12} {:<28} p={:<2} {status}\n",
                        e.key, e.name, e.dim
                    ));
                }
                emit(out, cli.json, &list, text)?;
                Ok(EXIT_OK)
            }
            CatalogAction::Show { name, lambda, l, d } => {
                let alg = catalog::lookup(name, &params(*lambda, *l, *d))?;
                // The algebra file format is JSON in either mode.
                writeln!(out, "{}", io::to_json_string(&alg))?;
                Ok(EXIT_OK)
            }
        },
        Command::Tables { random_metrics } => tables(out, cli, *random_metrics),
    }
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_inner(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let _ = writeln!(
                    err,
                    "{}",
                    serde_json::json!({"schema": SCHEMA, "error": e.to_string(), "exit_code": code})
                );
            } else {
                match &e {
                    Error::InvalidAlgebra(list) => {
                        let _ = writeln!(err, "error: invalid algebra");
                        for v in list {
                            let _ = writeln!(err, "  - {v}");
                        }
                    }
                    _ => {
                        let _ = writeln!(err, "error: {e}");
                    }
                }
            }
            code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_PARSE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}
