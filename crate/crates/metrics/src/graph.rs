use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("package '{0}' is already declared")]
    DuplicatePackage(String),
    #[error("package '{0}' is not declared")]
    UnknownPackage(String),
    #[error("class '{0}' is already declared")]
    DuplicateClass(String),
    #[error("class '{0}' is not declared")]
    UndeclaredClass(String),
    #[error("self-dependency on '{0}'")]
    SelfEdge(String),
    #[error("malformed class reference '{0}' (expected package.Class)")]
    BadReference(String),
}

#[derive(Debug, Clone)]
struct ClassDecl {
    package: String,
    is_abstract: bool,
}

/// Packages, classes with abstract/concrete flags, and directed
/// class-level dependency edges.
///
/// Classes are addressed by qualified name `package.Class`. Every edge
/// endpoint must be declared; self-edges are rejected.
#[derive(Debug, Clone, Default)]
pub struct DependencyGraph {
    packages: BTreeSet<String>,
    classes: BTreeMap<String, ClassDecl>,
    edges: BTreeSet<(String, String)>,
}

impl DependencyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_package(&mut self, name: &str) -> Result<(), GraphError> {
        if !self.packages.insert(name.to_string()) {
            return Err(GraphError::DuplicatePackage(name.to_string()));
        }
        Ok(())
    }

    /// Declares `package.class`; the package must already exist.
    pub fn add_class(
        &mut self,
        package: &str,
        class: &str,
        is_abstract: bool,
    ) -> Result<(), GraphError> {
        if !self.packages.contains(package) {
            return Err(GraphError::UnknownPackage(package.to_string()));
        }
        let qualified = format!("{package}.{class}");
        if self.classes.contains_key(&qualified) {
            return Err(GraphError::DuplicateClass(qualified));
        }
        self.classes.insert(
            qualified,
            ClassDecl {
                package: package.to_string(),
                is_abstract,
            },
        );
        Ok(())
    }

    /// Adds a dependency `from -> to` between qualified class names.
    /// Duplicate edges collapse (the metrics count classes, not edges).
    pub fn add_edge(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        if !self.classes.contains_key(from) {
            return Err(GraphError::UndeclaredClass(from.to_string()));
        }
        if !self.classes.contains_key(to) {
            return Err(GraphError::UndeclaredClass(to.to_string()));
        }
        if from == to {
            return Err(GraphError::SelfEdge(from.to_string()));
        }
        self.edges.insert((from.to_string(), to.to_string()));
        Ok(())
    }

    pub fn packages(&self) -> impl Iterator<Item = &str> {
        self.packages.iter().map(String::as_str)
    }

    pub fn package_count(&self) -> usize {
        self.packages.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_package(&self, name: &str) -> bool {
        self.packages.contains(name)
    }

    pub(crate) fn package_of(&self, class: &str) -> Option<&str> {
        self.classes.get(class).map(|c| c.package.as_str())
    }

    /// `(N_a, N_c)` for a package.
    pub fn class_counts(&self, package: &str) -> Result<(usize, usize), GraphError> {
        if !self.packages.contains(package) {
            return Err(GraphError::UnknownPackage(package.to_string()));
        }
        let mut total = 0;
        let mut abstracts = 0;
        for decl in self.classes.values() {
            if decl.package == package {
                total += 1;
                if decl.is_abstract {
                    abstracts += 1;
                }
            }
        }
        Ok((abstracts, total))
    }

    /// `(C_e, C_a)` for a package: distinct inside classes with an edge
    /// out of the package, and distinct outside classes with an edge into
    /// it.
    pub fn coupling_counts(&self, package: &str) -> Result<(usize, usize), GraphError> {
        if !self.packages.contains(package) {
            return Err(GraphError::UnknownPackage(package.to_string()));
        }
        let mut efferent: BTreeSet<&str> = BTreeSet::new();
        let mut afferent: BTreeSet<&str> = BTreeSet::new();
        for (from, to) in &self.edges {
            let from_pkg = self.package_of(from).expect("edge endpoints declared");
            let to_pkg = self.package_of(to).expect("edge endpoints declared");
            if from_pkg == to_pkg {
                continue;
            }
            if from_pkg == package {
                efferent.insert(from);
            }
            if to_pkg == package {
                afferent.insert(from);
            }
        }
        Ok((efferent.len(), afferent.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_package_graph() -> DependencyGraph {
        let mut g = DependencyGraph::new();
        g.add_package("a").unwrap();
        g.add_package("b").unwrap();
        g.add_class("a", "X", true).unwrap();
        g.add_class("a", "Y", false).unwrap();
        g.add_class("b", "Z", false).unwrap();
        g.add_edge("b.Z", "a.X").unwrap();
        g
    }

    #[test]
    fn counts() {
        let g = two_package_graph();
        assert_eq!(g.class_counts("a").unwrap(), (1, 2));
        assert_eq!(g.class_counts("b").unwrap(), (0, 1));
        // a: no outgoing, one outside class (b.Z) depends in.
        assert_eq!(g.coupling_counts("a").unwrap(), (0, 1));
        // b: one inside class depends out, nothing depends on b.
        assert_eq!(g.coupling_counts("b").unwrap(), (1, 0));
    }

    #[test]
    fn duplicate_and_undeclared_are_rejected() {
        let mut g = two_package_graph();
        assert!(matches!(g.add_package("a"), Err(GraphError::DuplicatePackage(_))));
        assert!(matches!(
            g.add_class("a", "X", false),
            Err(GraphError::DuplicateClass(_))
        ));
        assert!(matches!(
            g.add_class("nope", "W", false),
            Err(GraphError::UnknownPackage(_))
        ));
        assert!(matches!(
            g.add_edge("a.X", "c.Q"),
            Err(GraphError::UndeclaredClass(_))
        ));
        assert!(matches!(g.add_edge("a.X", "a.X"), Err(GraphError::SelfEdge(_))));
    }

    #[test]
    fn intra_package_edges_do_not_count() {
        let mut g = two_package_graph();
        g.add_edge("a.Y", "a.X").unwrap();
        assert_eq!(g.coupling_counts("a").unwrap(), (0, 1));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let mut g = two_package_graph();
        let e = g.edge_count();
        g.add_edge("b.Z", "a.X").unwrap();
        assert_eq!(g.edge_count(), e);
    }

    // A class depending on two packages counts once per target package's
    // afferent side but once total on its own efferent side.
    #[test]
    fn multi_target_class_counts_once_efferently() {
        let mut g = DependencyGraph::new();
        for p in ["a", "b", "c"] {
            g.add_package(p).unwrap();
        }
        g.add_class("a", "X", false).unwrap();
        g.add_class("b", "Y", false).unwrap();
        g.add_class("c", "Z", false).unwrap();
        g.add_edge("a.X", "b.Y").unwrap();
        g.add_edge("a.X", "c.Z").unwrap();
        assert_eq!(g.coupling_counts("a").unwrap(), (1, 0));
        assert_eq!(g.coupling_counts("b").unwrap(), (0, 1));
        assert_eq!(g.coupling_counts("c").unwrap(), (0, 1));
    }
}
