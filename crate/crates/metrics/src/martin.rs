use crate::graph::{DependencyGraph, GraphError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("package '{0}' has no classes; abstractness is undefined")]
    EmptyPackage(String),
    #[error("package '{0}' has no cross-package dependencies; instability is undefined")]
    IsolatedPackage(String),
    #[error("package '{0}' is not declared")]
    UnknownPackage(String),
}

fn unknown(e: GraphError, pkg: &str) -> MetricsError {
    match e {
        GraphError::UnknownPackage(p) => MetricsError::UnknownPackage(p),
        _ => MetricsError::UnknownPackage(pkg.to_string()),
    }
}

/// `A = N_a / N_c`. Errors on an empty package rather than defining 0/0.
pub fn abstractness(g: &DependencyGraph, pkg: &str) -> Result<f64, MetricsError> {
    let (na, nc) = g.class_counts(pkg).map_err(|e| unknown(e, pkg))?;
    if nc == 0 {
        return Err(MetricsError::EmptyPackage(pkg.to_string()));
    }
    Ok(na as f64 / nc as f64)
}

/// `I = C_e / (C_e + C_a)`, class-level counting. Errors when the package
/// has no cross-package dependencies in either direction.
pub fn instability(g: &DependencyGraph, pkg: &str) -> Result<f64, MetricsError> {
    let (ce, ca) = g.coupling_counts(pkg).map_err(|e| unknown(e, pkg))?;
    if ce + ca == 0 {
        return Err(MetricsError::IsolatedPackage(pkg.to_string()));
    }
    Ok(ce as f64 / (ce + ca) as f64)
}

/// Distance from the main sequence, `D = |A + I - 1|`.
pub fn distance(a: f64, i: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&i));
    (a + i - 1.0).abs()
}

/// Rounds half away from zero to two decimals, for display.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Metrics for one package, raw counts included.
#[derive(Debug, Clone, PartialEq)]
pub struct PackageMetrics {
    pub package: String,
    pub n_abstract: usize,
    pub n_classes: usize,
    pub efferent: usize,
    pub afferent: usize,
    pub abstractness: f64,
    pub instability: f64,
    pub distance: f64,
}

/// A package whose metrics are undefined, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackageAnnotation {
    pub package: String,
    pub issue: MetricsError,
}

/// Full-graph analysis: metrics for every computable package plus
/// annotations for the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    /// Sorted by distance descending (ties by name) — the packages
    /// farthest from the main sequence come first.
    pub metrics: Vec<PackageMetrics>,
    pub annotations: Vec<PackageAnnotation>,
}

/// Computes metrics for every package. Per-package failures (empty or
/// isolated packages) become annotations instead of aborting the run.
pub fn analyze(g: &DependencyGraph) -> AnalysisReport {
    let mut metrics = Vec::new();
    let mut annotations = Vec::new();
    for pkg in g.packages() {
        let counts = g.class_counts(pkg).expect("declared package");
        let coupling = g.coupling_counts(pkg).expect("declared package");
        let a = match abstractness(g, pkg) {
            Ok(a) => a,
            Err(issue) => {
                annotations.push(PackageAnnotation {
                    package: pkg.to_string(),
                    issue,
                });
                continue;
            }
        };
        let i = match instability(g, pkg) {
            Ok(i) => i,
            Err(issue) => {
                annotations.push(PackageAnnotation {
                    package: pkg.to_string(),
                    issue,
                });
                continue;
            }
        };
        metrics.push(PackageMetrics {
            package: pkg.to_string(),
            n_abstract: counts.0,
            n_classes: counts.1,
            efferent: coupling.0,
            afferent: coupling.1,
            abstractness: a,
            instability: i,
            distance: distance(a, i),
        });
    }
    metrics.sort_by(|x, y| {
        y.distance
            .partial_cmp(&x.distance)
            .expect("distances are finite")
            .then_with(|| x.package.cmp(&y.package))
    });
    AnalysisReport {
        metrics,
        annotations,
    }
}
