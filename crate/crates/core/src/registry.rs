//! The shared component registry.
//!
//! One registry maps names to builders for every swappable component
//! family: problems, linear solvers, line-search conditions and
//! generators, trust-region subproblems, and drivers. Built-ins register
//! through the same calls external code would use, the registry is frozen
//! once initialization completes, and [`registry_init`] hands every caller
//! the same frozen process-wide instance.

use crate::corpus;
use crate::drivers::DriverKind;
use crate::linalg::{CgSolver, CholeskySolver, LinearSolver, LuSolver};
use crate::linesearch::{Condition, Generator};
use crate::problem::ProblemDefinition;
use crate::trustregion::Subproblem;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, OnceLock, RwLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown {category} '{name}'")]
    Unknown { category: Category, name: String },
    #[error("{category} '{name}' is already registered")]
    Duplicate { category: Category, name: String },
    #[error("registry is frozen; registration of {category} '{name}' rejected")]
    Frozen { category: Category, name: String },
    #[error("invalid linear solver configuration: {0}")]
    BadSolverConfig(String),
}

/// Component families the registry knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Problems,
    LinearSolvers,
    Conditions,
    Generators,
    Subproblems,
    Drivers,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Conditions,
        Category::Drivers,
        Category::Generators,
        Category::LinearSolvers,
        Category::Problems,
        Category::Subproblems,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "problems" => Some(Self::Problems),
            "linear-solvers" => Some(Self::LinearSolvers),
            "conditions" => Some(Self::Conditions),
            "generators" => Some(Self::Generators),
            "subproblems" => Some(Self::Subproblems),
            "drivers" => Some(Self::Drivers),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Problems => "problems",
            Self::LinearSolvers => "linear-solvers",
            Self::Conditions => "conditions",
            Self::Generators => "generators",
            Self::Subproblems => "subproblems",
            Self::Drivers => "drivers",
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Singular form reads better in error messages.
        let s = match self {
            Self::Problems => "problem",
            Self::LinearSolvers => "linear solver",
            Self::Conditions => "condition",
            Self::Generators => "generator",
            Self::Subproblems => "subproblem",
            Self::Drivers => "driver",
        };
        f.write_str(s)
    }
}

/// Construction-time settings for a linear solver handle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolverConfig {
    /// Relative residual tolerance for iterative solvers.
    pub tol: f64,
    /// Iteration cap for iterative solvers; `None` means the system order.
    pub max_iter: Option<usize>,
    /// Whether factorization-based solvers may perturb indefinite input.
    pub modify: bool,
}

impl Default for LinearSolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            modify: false,
        }
    }
}

/// Factory producing a solver handle from a configuration.
pub type LinearSolverFactory =
    Arc<dyn Fn(&LinearSolverConfig) -> Result<Arc<dyn LinearSolver>, RegistryError> + Send + Sync>;

#[derive(Default)]
struct Maps {
    problems: BTreeMap<String, Arc<ProblemDefinition>>,
    linear_solvers: BTreeMap<String, LinearSolverFactory>,
    conditions: BTreeMap<String, Condition>,
    generators: BTreeMap<String, Generator>,
    subproblems: BTreeMap<String, Subproblem>,
    drivers: BTreeMap<String, DriverKind>,
}

/// Name-to-builder maps for every component family.
///
/// Writable until [`freeze`](Self::freeze) is called, read-only afterwards;
/// a frozen registry supports unlimited concurrent readers.
pub struct ComponentRegistry {
    frozen: AtomicBool,
    maps: RwLock<Maps>,
}

impl Default for ComponentRegistry {
    fn default() -> Self {
        Self::empty()
    }
}

impl ComponentRegistry {
    /// An empty, unfrozen registry.
    pub fn empty() -> Self {
        Self {
            frozen: AtomicBool::new(false),
            maps: RwLock::new(Maps::default()),
        }
    }

    /// A registry with every built-in component registered (not frozen).
    pub fn with_builtins() -> Self {
        let reg = Self::empty();
        reg.register_builtins().expect("fresh registry accepts built-ins");
        reg
    }

    fn register_builtins(&self) -> Result<(), RegistryError> {
        for name in corpus::NAMES {
            let p = corpus::build(name).expect("built-in name");
            self.register_problem(name, Arc::new(p))?;
        }
        self.register_linear_solver(
            "lu",
            Arc::new(|_cfg| Ok(Arc::new(LuSolver) as Arc<dyn LinearSolver>)),
        )?;
        self.register_linear_solver(
            "cholesky",
            Arc::new(|cfg| {
                Ok(Arc::new(CholeskySolver { modify: cfg.modify }) as Arc<dyn LinearSolver>)
            }),
        )?;
        self.register_linear_solver(
            "cg",
            Arc::new(|cfg| {
                if !(cfg.tol > 0.0) {
                    return Err(RegistryError::BadSolverConfig(format!(
                        "cg tolerance must be positive, got {}",
                        cfg.tol
                    )));
                }
                Ok(Arc::new(CgSolver {
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                }) as Arc<dyn LinearSolver>)
            }),
        )?;
        for name in Condition::NAMES {
            self.register_condition(name, Condition::from_name(name).expect("built-in name"))?;
        }
        for name in Generator::NAMES {
            self.register_generator(name, Generator::from_name(name).expect("built-in name"))?;
        }
        for name in Subproblem::NAMES {
            self.register_subproblem(name, Subproblem::from_name(name).expect("built-in name"))?;
        }
        for name in DriverKind::NAMES {
            self.register_driver(name, DriverKind::from_name(name).expect("built-in name"))?;
        }
        Ok(())
    }

    /// Freezes the registry; all later registrations are rejected.
    pub fn freeze(&self) {
        self.frozen.store(true, Ordering::SeqCst);
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen.load(Ordering::SeqCst)
    }

    fn guard(&self, category: Category, name: &str) -> Result<(), RegistryError> {
        if self.is_frozen() {
            return Err(RegistryError::Frozen {
                category,
                name: name.to_string(),
            });
        }
        Ok(())
    }

    pub fn register_problem(
        &self,
        name: &str,
        problem: Arc<ProblemDefinition>,
    ) -> Result<(), RegistryError> {
        self.guard(Category::Problems, name)?;
        let mut maps = self.maps.write().expect("registry lock");
        insert_unique(&mut maps.problems, Category::Problems, name, problem)
    }

    pub fn register_linear_solver(
        &self,
        name: &str,
        factory: LinearSolverFactory,
    ) -> Result<(), RegistryError> {
        self.guard(Category::LinearSolvers, name)?;
        let mut maps = self.maps.write().expect("registry lock");
        insert_unique(&mut maps.linear_solvers, Category::LinearSolvers, name, factory)
    }

    pub fn register_condition(&self, name: &str, c: Condition) -> Result<(), RegistryError> {
        self.guard(Category::Conditions, name)?;
        let mut maps = self.maps.write().expect("registry lock");
        insert_unique(&mut maps.conditions, Category::Conditions, name, c)
    }

    pub fn register_generator(&self, name: &str, g: Generator) -> Result<(), RegistryError> {
        self.guard(Category::Generators, name)?;
        let mut maps = self.maps.write().expect("registry lock");
        insert_unique(&mut maps.generators, Category::Generators, name, g)
    }

    pub fn register_subproblem(&self, name: &str, s: Subproblem) -> Result<(), RegistryError> {
        self.guard(Category::Subproblems, name)?;
        let mut maps = self.maps.write().expect("registry lock");
        insert_unique(&mut maps.subproblems, Category::Subproblems, name, s)
    }

    pub fn register_driver(&self, name: &str, d: DriverKind) -> Result<(), RegistryError> {
        self.guard(Category::Drivers, name)?;
        let mut maps = self.maps.write().expect("registry lock");
        insert_unique(&mut maps.drivers, Category::Drivers, name, d)
    }

    pub fn problem(&self, name: &str) -> Result<Arc<ProblemDefinition>, RegistryError> {
        let maps = self.maps.read().expect("registry lock");
        maps.problems
            .get(name)
            .cloned()
            .ok_or_else(|| unknown(Category::Problems, name))
    }

    /// Builds a linear solver handle satisfying the common solve contract;
    /// this is the adapter seam for external packages.
    pub fn linear_solver(
        &self,
        name: &str,
        config: &LinearSolverConfig,
    ) -> Result<Arc<dyn LinearSolver>, RegistryError> {
        let factory = {
            let maps = self.maps.read().expect("registry lock");
            maps.linear_solvers
                .get(name)
                .cloned()
                .ok_or_else(|| unknown(Category::LinearSolvers, name))?
        };
        factory(config)
    }

    pub fn condition(&self, name: &str) -> Result<Condition, RegistryError> {
        let maps = self.maps.read().expect("registry lock");
        maps.conditions
            .get(name)
            .copied()
            .ok_or_else(|| unknown(Category::Conditions, name))
    }

    pub fn generator(&self, name: &str) -> Result<Generator, RegistryError> {
        let maps = self.maps.read().expect("registry lock");
        maps.generators
            .get(name)
            .copied()
            .ok_or_else(|| unknown(Category::Generators, name))
    }

    pub fn subproblem(&self, name: &str) -> Result<Subproblem, RegistryError> {
        let maps = self.maps.read().expect("registry lock");
        maps.subproblems
            .get(name)
            .copied()
            .ok_or_else(|| unknown(Category::Subproblems, name))
    }

    pub fn driver(&self, name: &str) -> Result<DriverKind, RegistryError> {
        let maps = self.maps.read().expect("registry lock");
        maps.drivers
            .get(name)
            .copied()
            .ok_or_else(|| unknown(Category::Drivers, name))
    }

    /// Sorted names in a category.
    pub fn list(&self, category: Category) -> Vec<String> {
        let maps = self.maps.read().expect("registry lock");
        match category {
            Category::Problems => maps.problems.keys().cloned().collect(),
            Category::LinearSolvers => maps.linear_solvers.keys().cloned().collect(),
            Category::Conditions => maps.conditions.keys().cloned().collect(),
            Category::Generators => maps.generators.keys().cloned().collect(),
            Category::Subproblems => maps.subproblems.keys().cloned().collect(),
            Category::Drivers => maps.drivers.keys().cloned().collect(),
        }
    }

    /// Total number of registrations across all categories.
    pub fn registration_count(&self) -> usize {
        let maps = self.maps.read().expect("registry lock");
        maps.problems.len()
            + maps.linear_solvers.len()
            + maps.conditions.len()
            + maps.generators.len()
            + maps.subproblems.len()
            + maps.drivers.len()
    }
}

fn insert_unique<V>(
    map: &mut BTreeMap<String, V>,
    category: Category,
    name: &str,
    value: V,
) -> Result<(), RegistryError> {
    if map.contains_key(name) {
        return Err(RegistryError::Duplicate {
            category,
            name: name.to_string(),
        });
    }
    map.insert(name.to_string(), value);
    Ok(())
}

fn unknown(category: Category, name: &str) -> RegistryError {
    RegistryError::Unknown {
        category,
        name: name.to_string(),
    }
}

static GLOBAL: OnceLock<ComponentRegistry> = OnceLock::new();

/// The process-wide registry: built-ins registered, frozen, shared.
///
/// Every call returns the same instance; initialization happens exactly
/// once on first use.
pub fn registry_init() -> &'static ComponentRegistry {
    GLOBAL.get_or_init(|| {
        let reg = ComponentRegistry::with_builtins();
        reg.freeze();
        reg
    })
}

/// Looks up a linear solver by name in the shared registry and builds a
/// handle honoring `config`.
pub fn external_solver_adapter(
    name: &str,
    config: &LinearSolverConfig,
) -> Result<Arc<dyn LinearSolver>, RegistryError> {
    registry_init().linear_solver(name, config)
}
