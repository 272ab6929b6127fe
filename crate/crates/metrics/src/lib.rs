//! Package-design metrics over a declared class dependency graph.
//!
//! For each package in a [`DependencyGraph`] the engine computes
//!
//! * abstractness `A = N_a / N_c` — abstract classes over all classes;
//! * instability `I = C_e / (C_e + C_a)` — where `C_e` counts classes
//!   inside the package that depend on classes outside it and `C_a`
//!   counts classes outside the package that depend on classes inside it
//!   (class-level counting);
//! * distance from the main sequence `D = |A + I - 1|`.
//!
//! A package with `D = 0` balances abstractness against incoming
//! dependency pressure; large `D` flags packages that are hard to extend
//! or uselessly abstract.
//!
//! Graphs are declared in a line-oriented manifest format (see
//! [`parse_manifest`]) listing packages, classes with an
//! `abstract`/`concrete` marker, and directed class-level dependencies.

mod graph;
mod manifest;
mod martin;

pub use graph::{DependencyGraph, GraphError};
pub use manifest::{parse_manifest, ManifestError};
pub use martin::{
    abstractness, analyze, distance, instability, round2, AnalysisReport, MetricsError,
    PackageAnnotation, PackageMetrics,
};
