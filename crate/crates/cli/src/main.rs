//! Command-line front end: configured solves with convergence traces,
//! component listings, and the package-design metrics analyzer.
//!
//! Exit codes: 0 converged / success, 1 usage or input error, 2 iteration
//! budget exhausted, 3 solver failure.

use clap::{Args, Parser, Subcommand};
use newton_forge_core::config::{build_solver, parse_config, OverrideValue, SolverConfig};
use newton_forge_core::drivers::{SolveResult, SolveStatus};
use newton_forge_core::registry::{registry_init, Category};
use newton_forge_metrics::{analyze, parse_manifest, round2};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "newton-forge", version, about = "Newton-type solvers with swappable components")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured solve and print the final status line.
    Solve(SolveArgs),
    /// List registered component names, one per line.
    List {
        /// One of: drivers, problems, conditions, generators, subproblems,
        /// linear-solvers.
        category: String,
    },
    /// Analyze a class dependency manifest with package-design metrics.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Configuration file in `key = value` format.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Driver name (overrides the config file).
    #[arg(long)]
    driver: Option<String>,
    /// Problem name (overrides the config file).
    #[arg(long)]
    problem: Option<String>,
    /// Starting point as comma-separated decimals, e.g. `-1.2,1`.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Gradient tolerance (overrides the config file).
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget (overrides the config file).
    #[arg(long)]
    max_iter: Option<u32>,
    /// Write the convergence trace to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Dependency manifest file.
    #[arg(long)]
    manifest: PathBuf,
    /// Optional full-precision CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_MAX_ITER: u8 = 2;
const EXIT_SOLVER_ERROR: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not usage errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
    };
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::List { category } => cmd_list(&category),
        Command::Metrics(args) => cmd_metrics(args),
    };
    ExitCode::from(code)
}

/// Formats with six significant digits for stdout; files get full
/// precision. Magnitudes outside a readable decimal range use scientific
/// notation.
fn fmt6(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return format!("{v}");
    }
    let a = v.abs();
    if !(1e-4..1e16).contains(&a) {
        return format!("{v:.5e}");
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatter output");
    format!("{rounded}")
}

fn fmt6_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt6(*x)).collect::<Vec<_>>().join(",")
}

fn parse_x0(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| format!("invalid x0 component '{t}'"))
        })
        .collect()
}

fn usage(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn cmd_solve(args: SolveArgs) -> u8 {
    let mut config = match &args.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage(format_args!("cannot read {}: {e}", path.display())),
            };
            match parse_config(&text) {
                Ok(parsed) => {
                    for w in &parsed.warnings {
                        eprintln!("warning: {} (line {})", w.message, w.line);
                    }
                    parsed.config
                }
                Err(e) => return usage(e),
            }
        }
        None => SolverConfig {
            driver: String::new(),
            problem: String::new(),
            x0: Vec::new(),
            overrides: BTreeMap::new(),
        },
    };

    // Inline flags take precedence over the config file.
    if let Some(driver) = args.driver {
        config.driver = driver;
    }
    if let Some(problem) = args.problem {
        config.problem = problem;
    }
    if let Some(raw) = args.x0 {
        match parse_x0(&raw) {
            Ok(x0) => config.x0 = x0,
            Err(e) => return usage(e),
        }
    }
    if let Some(tol) = args.tol {
        config
            .overrides
            .insert("grad_tol".into(), OverrideValue::Number(tol));
    }
    if let Some(max_iter) = args.max_iter {
        config
            .overrides
            .insert("max_iter".into(), OverrideValue::Number(max_iter as f64));
    }
    if config.driver.is_empty() {
        return usage("no driver given (use --driver or a config file)");
    }
    if config.problem.is_empty() {
        return usage("no problem given (use --problem or a config file)");
    }
    if config.x0.is_empty() {
        return usage("no starting point given (use --x0 or a config file)");
    }

    let solver = match build_solver(registry_init(), &config) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let result = match solver.run() {
        Ok(r) => r,
        Err(e) => return usage(e),
    };

    if let Some(path) = &args.trace {
        if let Err(e) = std::fs::write(path, result.trace_csv()) {
            return usage(format_args!("cannot write {}: {e}", path.display()));
        }
    }
    print_status_line(&result);
    match result.status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxIterations => EXIT_MAX_ITER,
        SolveStatus::LineSearchFailed | SolveStatus::NumericalBreakdown => {
            if let Some(detail) = &result.failure {
                eprintln!("error: {detail}");
            }
            EXIT_SOLVER_ERROR
        }
    }
}

fn print_status_line(result: &SolveResult) {
    println!(
        "{} x={} f={} |g|={} iters={}",
        result.status,
        fmt6_vec(&result.x_final),
        fmt6(result.f_final),
        fmt6(result.g_norm_final),
        result.iterations
    );
}

fn cmd_list(category: &str) -> u8 {
    let Some(cat) = Category::from_name(category) else {
        return usage(format_args!(
            "unknown category '{category}' (expected one of: conditions, drivers, \
             generators, linear-solvers, problems, subproblems)"
        ));
    };
    for name in registry_init().list(cat) {
        println!("{name}");
    }
    EXIT_OK
}

fn cmd_metrics(args: MetricsArgs) -> u8 {
    let text = match std::fs::read_to_string(&args.manifest) {
        Ok(t) => t,
        Err(e) => return usage(format_args!("cannot read {}: {e}", args.manifest.display())),
    };
    let graph = match parse_manifest(&text) {
        Ok(g) => g,
        Err(e) => return usage(e),
    };
    let report = analyze(&graph);

    println!("package,A,I,D");
    for m in &report.metrics {
        println!(
            "{},{:.2},{:.2},{:.2}",
            m.package,
            round2(m.abstractness),
            round2(m.instability),
            round2(m.distance)
        );
    }
    for a in &report.annotations {
        eprintln!("note: {}", a.issue);
    }

    if let Some(path) = &args.csv {
        let mut out = String::from("package,n_abstract,n_classes,c_e,c_a,A,I,D\n");
        for m in &report.metrics {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                m.package,
                m.n_abstract,
                m.n_classes,
                m.efferent,
                m.afferent,
                m.abstractness,
                m.instability,
                m.distance
            ));
        }
        if let Err(e) = std::fs::write(path, out) {
            return usage(format_args!("cannot write {}: {e}", path.display()));
        }
    }
    EXIT_OK
}
