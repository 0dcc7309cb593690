//! The `dutchbook` command line.
//!
//! Exit codes: 0 consistent or nonempty, 1 inconsistent or empty (or a
//! rejected certificate), 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bookfile::{parse_book_file, BookFile};
use crate::coherence::{assess, fundamental_interval, ProbInterval};
use crate::exchange::{
    decompose, mixture_approximation, restrict, xi_state_capped, ExchangeableState, DEFAULT_MAX_N,
};
use crate::formula::{DEFAULT_WORLD_CAP, MAX_WORLD_CAP};
use crate::rational::{fmt_rational, parse_rational, Rational};
use crate::report::{verify_report, with_decimal, Report, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dutchbook", version, about = "Exact coherence checks for probability assessments")]
pub struct Cli {
    /// Emit machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    /// Also print every rational as a decimal with this many digits.
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<usize>,
    /// Largest number of variables a book may declare.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_WORLD_CAP)]
    max_vars: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether book files can be extended to a probability state.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Number of files to assess concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Range of probabilities a query can take consistently with a book.
    Interval {
        path: PathBuf,
        /// Query formula; repeatable. Defaults to the file's `query` lines.
        #[arg(long = "query", short = 'q')]
        queries: Vec<String>,
    },
    /// Exchangeable states: restriction, extremal decomposition and product
    /// mixture approximation.
    Exchange {
        #[command(subcommand)]
        op: ExchangeOp,
    },
    /// Re-check a JSON report against its book without solving anything.
    Verify { book: PathBuf, report: PathBuf },
}

#[derive(Debug, Subcommand)]
enum ExchangeOp {
    /// Restrict a state on F_N to F_n.
    Restrict {
        #[command(flatten)]
        state: StateSpec,
        #[arg(long = "n")]
        n: usize,
    },
    /// Weights of a state over the extremal states ξ_{N,K}.
    Decompose {
        #[command(flatten)]
        state: StateSpec,
    },
    /// Compare the restriction to F_n with the matching product mixture.
    Approx {
        #[command(flatten)]
        state: StateSpec,
        #[arg(long = "n")]
        n: usize,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Extremal state `N,K`.
    #[arg(long, value_name = "N,K")]
    xi: Option<String>,
    /// Product state with this bias (needs `--N`).
    #[arg(long, value_name = "P", requires = "big_n")]
    product: Option<String>,
    /// Per-class miniterm values `q_0,...,q_N`.
    #[arg(long, value_name = "Q0,Q1,...")]
    values: Option<String>,
}

#[derive(Debug, Args)]
struct StateSpec {
    #[command(flatten)]
    source: Source,
    #[arg(long = "N", id = "big_n")]
    big_n: Option<usize>,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Checked = Result<(Report, i32), Failure>;

struct Outcome {
    stdout: String,
    code: i32,
}

fn read_book(path: &Path) -> Result<BookFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_book_file(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn check_one(cli: &Cli, path: &Path) -> Checked {
    let file = read_book(path)?;
    let algebra = file.algebra(cli.max_vars)?;
    let book = file.book(&algebra)?;
    let verdict = assess(&book)?;
    let code = if verdict.is_consistent() { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((Report::check(&file, &book, &verdict), code))
}

fn cmd_check(cli: &Cli, paths: &[PathBuf], jobs: usize) -> Result<Outcome, Failure> {
    let results: Vec<Checked> = if jobs <= 1 || paths.len() <= 1 {
        paths.iter().map(|p| check_one(cli, p)).collect()
    } else {
        let next = AtomicUsize::new(0);
        let mut slots: Vec<Option<Checked>> = (0..paths.len()).map(|_| None).collect();
        let done: Vec<Vec<(usize, Checked)>> = std::thread::scope(|scope| {
            let workers: Vec<_> = (0..jobs.min(paths.len()))
                .map(|_| {
                    scope.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= paths.len() {
                                break local;
                            }
                            local.push((i, check_one(cli, &paths[i])));
                        }
                    })
                })
                .collect();
            workers.into_iter().map(|w| w.join().expect("worker panicked")).collect()
        });
        for (i, r) in done.into_iter().flatten() {
            slots[i] = Some(r);
        }
        slots.into_iter().map(|s| s.expect("every file assessed")).collect()
    };

    if paths.len() == 1 {
        let (report, code) = results.into_iter().next().unwrap()?;
        let stdout = if cli.json {
            report.to_json() + "\n"
        } else {
            report.to_text(cli.decimal)
        };
        return Ok(Outcome { stdout, code });
    }

    let mut code = EXIT_OK;
    let mut stdout = String::new();
    let mut json_items = Vec::new();
    for (path, result) in paths.iter().zip(results) {
        match result {
            Ok((report, c)) => {
                code = code.max(c);
                if cli.json {
                    json_items.push(json!({ "path": path.display().to_string(), "report": report }));
                } else {
                    stdout.push_str(&format!("== {}\n{}", path.display(), report.to_text(cli.decimal)));
                }
            }
            Err(Failure(message)) => {
                code = EXIT_ERROR;
                if cli.json {
                    json_items.push(json!({ "path": path.display().to_string(), "error": message }));
                } else {
                    stdout.push_str(&format!("== {}\nERROR {message}\n", path.display()));
                }
            }
        }
    }
    if cli.json {
        stdout = serde_json::to_string_pretty(&json_items)? + "\n";
    }
    Ok(Outcome { stdout, code })
}

fn cmd_interval(cli: &Cli, path: &Path, extra: &[String]) -> Result<Outcome, Failure> {
    let file = read_book(path)?;
    let queries = if extra.is_empty() {
        file.queries.clone()
    } else {
        extra
            .iter()
            .map(|q| file.parse_query(q).map_err(|e| Failure(format!("query `{q}`: {e}"))))
            .collect::<Result<_, _>>()?
    };
    if queries.is_empty() {
        return Err(Failure("no query given and the book has no `query` line".into()));
    }
    let algebra = file.algebra(cli.max_vars)?;
    let book = file.book(&algebra)?;
    let mut report = Report::check(&file, &book, &assess(&book)?);
    let mut code = EXIT_OK;
    for q in &queries {
        let interval = fundamental_interval(&book, &algebra.event_of(q)?)?;
        if matches!(interval, ProbInterval::Empty) {
            code = EXIT_NEGATIVE;
        }
        report.push_query(q, &interval);
    }
    let stdout = if cli.json {
        report.to_json() + "\n"
    } else {
        report.queries_text(cli.decimal)
    };
    Ok(Outcome { stdout, code })
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| Failure(format!("{what} `{s}`: {e}"))))
        .collect()
}

fn build_state(spec: &StateSpec) -> Result<(ExchangeableState, String), Failure> {
    let src = &spec.source;
    if let Some(xi) = &src.xi {
        let nk: Vec<usize> = parse_list(xi, "--xi")?;
        let [n, k] = nk[..] else {
            return Err(Failure("--xi expects `N,K`".into()));
        };
        return Ok((xi_state_capped(n, k, DEFAULT_MAX_N)?, format!("xi {n},{k}")));
    }
    if let Some(p) = &src.product {
        let big_n = spec.big_n.ok_or_else(|| Failure("--product needs --N".into()))?;
        let p = parse_rational(p)?;
        let label = format!("product {} on {big_n}", fmt_rational(&p));
        return Ok((ExchangeableState::product_capped(&p, big_n, DEFAULT_MAX_N)?, label));
    }
    let values = src.values.as_deref().expect("clap enforces one source");
    let values: Vec<Rational> = values
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<Result<_, _>>()?;
    if values.len() > DEFAULT_MAX_N + 1 {
        return Err(Failure(format!("more than {} classes", DEFAULT_MAX_N + 1)));
    }
    let state = ExchangeableState::new(values)?;
    if spec.big_n.is_some_and(|n| n != state.n()) {
        return Err(Failure(format!("--N disagrees with the {} values given", state.n() + 1)));
    }
    let label = format!("values on {}", state.n());
    Ok((state, label))
}

fn table(out: &mut String, title: &str, values: &[Rational], decimal: Option<usize>) {
    out.push_str(title);
    out.push('\n');
    for (k, v) in values.iter().enumerate() {
        out.push_str(&format!("  {k}  {}\n", with_decimal(&fmt_rational(v), decimal)));
    }
}

fn strs(values: &[Rational]) -> Vec<String> {
    values.iter().map(fmt_rational).collect()
}

fn cmd_exchange(cli: &Cli, op: &ExchangeOp) -> Result<Outcome, Failure> {
    let mut out = String::new();
    let value = match op {
        ExchangeOp::Restrict { state, n } => {
            let (state, label) = build_state(state)?;
            let r = restrict(&state, *n)?;
            table(&mut out, &format!("restriction of {label} to {n} (value per miniterm with k positive):"), r.values(), cli.decimal);
            json!({ "operation": "restrict", "state": label, "n": n, "values": strs(r.values()) })
        }
        ExchangeOp::Decompose { state } => {
            let (state, label) = build_state(state)?;
            let w = decompose(&state);
            table(&mut out, &format!("lambda for {label} (weight of xi N,K):"), w.weights(), cli.decimal);
            json!({ "operation": "decompose", "state": label, "lambda": strs(w.weights()) })
        }
        ExchangeOp::Approx { state, n } => {
            let (state, label) = build_state(state)?;
            let a = mixture_approximation(&state, *n)?;
            table(&mut out, &format!("lambda for {label} (weight of xi N,K):"), a.weights.weights(), cli.decimal);
            table(&mut out, &format!("restriction to {n}:"), a.restricted.values(), cli.decimal);
            table(&mut out, &format!("product mixture on {n}:"), a.approximant.values(), cli.decimal);
            out.push_str(&format!(
                "sup_error {}\n",
                with_decimal(&fmt_rational(&a.sup_error), cli.decimal)
            ));
            json!({
                "operation": "approx",
                "state": label,
                "n": n,
                "lambda": strs(a.weights.weights()),
                "restricted": strs(a.restricted.values()),
                "approximant": strs(a.approximant.values()),
                "sup_error": fmt_rational(&a.sup_error),
            })
        }
    };
    let stdout = if cli.json {
        serde_json::to_string_pretty(&value)? + "\n"
    } else {
        out
    };
    Ok(Outcome { stdout, code: EXIT_OK })
}

fn cmd_verify(cli: &Cli, book: &Path, report: &Path) -> Result<Outcome, Failure> {
    let file = read_book(book)?;
    let text = std::fs::read_to_string(report)
        .map_err(|e| Failure(format!("{}: {e}", report.display())))?;
    let report: Report = serde_json::from_str(&text)
        .map_err(|e| Failure(format!("{}: {e}", report.display())))?;
    match verify_report(&file, &report, cli.max_vars) {
        Ok(()) => Ok(Outcome { stdout: "VERIFIED\n".into(), code: EXIT_OK }),
        Err(VerifyError::Rejected(message)) => Ok(Outcome {
            stdout: format!("REJECTED {message}\n"),
            code: EXIT_NEGATIVE,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Run a parsed command line, writing the report to `stdout` and
/// diagnostics to `stderr`. Returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = if cli.max_vars > MAX_WORLD_CAP {
        Err(Failure(format!("--max-vars may not exceed {MAX_WORLD_CAP}")))
    } else {
        match &cli.command {
            Command::Check { paths, jobs } => cmd_check(cli, paths, *jobs),
            Command::Interval { path, queries } => cmd_interval(cli, path, queries),
            Command::Exchange { op } => cmd_exchange(cli, op),
            Command::Verify { book, report } => cmd_verify(cli, book, report),
        }
    };
    match result {
        Ok(Outcome { stdout: text, code }) => {
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return EXIT_ERROR;
            }
            code
        }
        Err(Failure(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_ERROR
        }
    }
}

/// Parse `args` (including the program name) and run.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            code
        }
    }
}
