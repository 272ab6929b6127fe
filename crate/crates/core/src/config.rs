//! Solver configuration: a line-oriented `key = value` format, its parser
//! and renderer, and assembly of runnable solvers from the registry.
//!
//! Format: UTF-8 text, one `key = value` per line, `#` starts a comment,
//! vectors are comma-separated decimal literals. `driver`, `problem` and
//! `x0` are required; every other key is an override on documented
//! defaults. Unknown keys are rejected at parse time; duplicate keys warn
//! and the last value wins.

use crate::drivers::{run_driver, DriverKind, DriverOptions, SolveResult, StoppingCriteria};
use crate::problem::ProblemDefinition;
use crate::registry::{ComponentRegistry, RegistryError};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

/// Keys taking a finite numeric value.
pub const NUMERIC_KEYS: [&str; 13] = [
    "c1",
    "c2",
    "delta0",
    "delta_max",
    "eta",
    "f_tol",
    "goldstein_c",
    "grad_tol",
    "lambda0",
    "lambda_min",
    "max_iter",
    "max_trials",
    "step_tol",
];

/// Keys taking a registered component name.
pub const NAME_KEYS: [&str; 3] = ["ls_condition", "ls_generator", "subproblem"];

#[derive(Debug, Clone, PartialEq)]
pub enum OverrideValue {
    Number(f64),
    Name(String),
}

impl std::fmt::Display for OverrideValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OverrideValue::Number(v) => write!(f, "{v}"),
            OverrideValue::Name(s) => f.write_str(s),
        }
    }
}

/// A parsed solver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub driver: String,
    pub problem: String,
    pub x0: Vec<f64>,
    /// Overrides keyed by the names in [`NUMERIC_KEYS`] and [`NAME_KEYS`].
    pub overrides: BTreeMap<String, OverrideValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("unknown {category} '{name}'")]
    UnknownComponent { category: String, name: String },
    #[error("invalid override '{key}': {reason}")]
    InvalidOverride { key: String, reason: String },
}

impl From<RegistryError> for BuildError {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::Unknown { category, name } => BuildError::UnknownComponent {
                category: category.to_string(),
                name,
            },
            other => BuildError::InvalidOverride {
                key: "registry".into(),
                reason: other.to_string(),
            },
        }
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        reason: reason.into(),
    }
}

fn parse_number(line: usize, key: &str, raw: &str) -> Result<f64, ConfigError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| parse_err(line, format!("'{key}' expects a number, got '{raw}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("'{key}' must be finite, got '{raw}'")));
    }
    Ok(v)
}

fn parse_vector(line: usize, raw: &str) -> Result<Vec<f64>, ConfigError> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let token = part.trim();
        if token.is_empty() {
            return Err(parse_err(line, "empty component in vector value"));
        }
        out.push(parse_number(line, "x0", token)?);
    }
    Ok(out)
}

/// Outcome of [`parse_config`]: the configuration plus any warnings
/// (duplicate keys) collected along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: SolverConfig,
    pub warnings: Vec<ParseWarning>,
}

/// Parses the `key = value` format. Deterministic: the same text yields
/// the same configuration and warnings.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let mut driver: Option<String> = None;
    let mut problem: Option<String> = None;
    let mut x0: Option<Vec<f64>> = None;
    let mut overrides: BTreeMap<String, OverrideValue> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(lineno, format!("expected 'key = value', got '{line}'")));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(parse_err(lineno, "empty key"));
        }
        if value.is_empty() {
            return Err(parse_err(lineno, format!("empty value for '{key}'")));
        }
        if let Some(first) = seen.insert(key.to_string(), lineno) {
            warnings.push(ParseWarning {
                line: lineno,
                message: format!(
                    "duplicate key '{key}' (first set on line {first}); last value wins"
                ),
            });
        }
        match key {
            "driver" => driver = Some(value.to_string()),
            "problem" => problem = Some(value.to_string()),
            "x0" => x0 = Some(parse_vector(lineno, value)?),
            k if NUMERIC_KEYS.contains(&k) => {
                let v = parse_number(lineno, k, value)?;
                overrides.insert(k.to_string(), OverrideValue::Number(v));
            }
            k if NAME_KEYS.contains(&k) => {
                overrides.insert(k.to_string(), OverrideValue::Name(value.to_string()));
            }
            other => {
                return Err(parse_err(lineno, format!("unknown key '{other}'")));
            }
        }
    }

    let driver = driver.ok_or_else(|| parse_err(0, "missing required key 'driver'"))?;
    let problem = problem.ok_or_else(|| parse_err(0, "missing required key 'problem'"))?;
    let x0 = x0.ok_or_else(|| parse_err(0, "missing required key 'x0'"))?;
    Ok(ParsedConfig {
        config: SolverConfig {
            driver,
            problem,
            x0,
            overrides,
        },
        warnings,
    })
}

/// Emits the configuration in the same format [`parse_config`] reads;
/// `parse_config(render_config(cfg))` reproduces `cfg` exactly.
pub fn render_config(cfg: &SolverConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "driver = {}", cfg.driver);
    let _ = writeln!(out, "problem = {}", cfg.problem);
    let x0 = cfg
        .x0
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "x0 = {x0}");
    for (key, value) in &cfg.overrides {
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}

/// A fully wired solver: problem, driver, criteria and options resolved.
#[derive(Debug, Clone)]
pub struct ConfiguredSolver {
    pub driver: DriverKind,
    pub problem_name: String,
    pub problem: Arc<ProblemDefinition>,
    pub x0: Vec<f64>,
    pub criteria: StoppingCriteria,
    pub options: DriverOptions,
}

impl ConfiguredSolver {
    pub fn run(&self) -> Result<SolveResult, crate::drivers::DriverError> {
        run_driver(
            self.driver,
            &self.problem,
            &self.x0,
            &self.criteria,
            &self.options,
        )
    }
}

fn integer_override(key: &str, v: f64) -> Result<u32, BuildError> {
    if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
        return Err(BuildError::InvalidOverride {
            key: key.into(),
            reason: format!("expects a positive integer, got {v}"),
        });
    }
    Ok(v as u32)
}

fn expect_number(key: &str, value: &OverrideValue) -> Result<f64, BuildError> {
    match value {
        OverrideValue::Number(v) => Ok(*v),
        OverrideValue::Name(s) => Err(BuildError::InvalidOverride {
            key: key.into(),
            reason: format!("expects a number, got '{s}'"),
        }),
    }
}

fn expect_name<'v>(key: &str, value: &'v OverrideValue) -> Result<&'v str, BuildError> {
    match value {
        OverrideValue::Name(s) => Ok(s),
        OverrideValue::Number(v) => Err(BuildError::InvalidOverride {
            key: key.into(),
            reason: format!("expects a component name, got {v}"),
        }),
    }
}

// Attributes a post-application validation failure to the first overridden
// key in the related group, so errors name what the user actually set.
fn attribute<'k>(
    overridden: &BTreeMap<String, OverrideValue>,
    group: &[&'k str],
    fallback: &'k str,
) -> &'k str {
    group
        .iter()
        .find(|k| overridden.contains_key(**k))
        .copied()
        .unwrap_or(fallback)
}

/// Resolves every name in the configuration against the registry, applies
/// the overrides onto documented defaults, validates, and returns a
/// runnable solver.
pub fn build_solver(
    registry: &ComponentRegistry,
    cfg: &SolverConfig,
) -> Result<ConfiguredSolver, BuildError> {
    let driver = registry.driver(&cfg.driver)?;
    let problem = registry.problem(&cfg.problem)?;
    if cfg.x0.len() != problem.n() {
        return Err(BuildError::InvalidOverride {
            key: "x0".into(),
            reason: format!(
                "length {} does not match problem dimension {}",
                cfg.x0.len(),
                problem.n()
            ),
        });
    }

    let mut criteria = StoppingCriteria::default();
    let mut options = DriverOptions::defaults_for(driver);

    for (key, value) in &cfg.overrides {
        match key.as_str() {
            "grad_tol" => criteria.grad_tol = expect_number(key, value)?,
            "step_tol" => criteria.step_tol = expect_number(key, value)?,
            "f_tol" => criteria.f_tol = expect_number(key, value)?,
            "max_iter" => criteria.max_iter = integer_override(key, expect_number(key, value)?)?,
            "c1" => options.ls_params.c1 = expect_number(key, value)?,
            "c2" => options.ls_params.c2 = expect_number(key, value)?,
            "goldstein_c" => options.ls_params.goldstein_c = expect_number(key, value)?,
            "lambda0" => options.ls_params.lambda0 = expect_number(key, value)?,
            "lambda_min" => options.ls_params.lambda_min = expect_number(key, value)?,
            "max_trials" => {
                options.ls_params.max_trials = integer_override(key, expect_number(key, value)?)?
            }
            "delta0" => options.delta0 = expect_number(key, value)?,
            "delta_max" => options.delta_max = Some(expect_number(key, value)?),
            "eta" => options.forcing_eta = expect_number(key, value)?,
            "ls_condition" => options.ls_condition = registry.condition(expect_name(key, value)?)?,
            "ls_generator" => options.ls_generator = registry.generator(expect_name(key, value)?)?,
            "subproblem" => options.subproblem = registry.subproblem(expect_name(key, value)?)?,
            other => {
                return Err(BuildError::InvalidOverride {
                    key: other.into(),
                    reason: "unknown override".into(),
                })
            }
        }
    }

    if let Err(e) = criteria.validate() {
        let key = attribute(
            &cfg.overrides,
            &["grad_tol", "step_tol", "f_tol", "max_iter"],
            "criteria",
        );
        return Err(BuildError::InvalidOverride {
            key: key.into(),
            reason: e.to_string(),
        });
    }
    if let Err(e) = options.validate() {
        let key = attribute(
            &cfg.overrides,
            &[
                "c1",
                "c2",
                "goldstein_c",
                "lambda0",
                "lambda_min",
                "max_trials",
                "delta0",
                "delta_max",
                "eta",
            ],
            "options",
        );
        return Err(BuildError::InvalidOverride {
            key: key.into(),
            reason: e.to_string(),
        });
    }

    Ok(ConfiguredSolver {
        driver,
        problem_name: cfg.problem.clone(),
        problem,
        x0: cfg.x0.clone(),
        criteria,
        options,
    })
}
