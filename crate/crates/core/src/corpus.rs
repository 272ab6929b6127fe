//! Built-in problems addressable by name.
//!
//! | name                  | kind | minimizer / root                     |
//! |-----------------------|------|--------------------------------------|
//! | `quadratic`           | UO   | (0, 0)                               |
//! | `rosenbrock`          | UO   | (1, 1)                               |
//! | `rosenbrock-residual` | NLS  | (1, 1)                               |
//! | `linear-system`       | NE   | (2, 3)                               |
//! | `powell-badly-scaled` | NE   | (1.09815933e-5, 9.10614674) approx.  |
//!
//! All problems carry analytic first derivatives; `quadratic` and
//! `rosenbrock` carry analytic Hessians as well.

use crate::linalg::DenseMatrix;
use crate::problem::{ProblemBuilder, ProblemDefinition};

/// Names of all built-in problems, sorted.
pub const NAMES: [&str; 5] = [
    "linear-system",
    "powell-badly-scaled",
    "quadratic",
    "rosenbrock",
    "rosenbrock-residual",
];

/// Builds the named problem, or `None` for an unknown name.
pub fn build(name: &str) -> Option<ProblemDefinition> {
    let p = match name {
        // f(x) = 1/2 (x1^2 + 10 x2^2), minimizer at the origin.
        "quadratic" => ProblemBuilder::unconstrained("quadratic", 2, |x| {
            0.5 * (x[0] * x[0] + 10.0 * x[1] * x[1])
        })
        .gradient(|x| vec![x[0], 10.0 * x[1]])
        .hessian(|_| DenseMatrix::diagonal(&[1.0, 10.0]))
        .build(),

        // f(x) = 100 (x2 - x1^2)^2 + (1 - x1)^2, minimizer (1, 1).
        "rosenbrock" => ProblemBuilder::unconstrained("rosenbrock", 2, |x| {
            let a = x[1] - x[0] * x[0];
            let b = 1.0 - x[0];
            100.0 * a * a + b * b
        })
        .gradient(|x| {
            let a = x[1] - x[0] * x[0];
            vec![-400.0 * x[0] * a - 2.0 * (1.0 - x[0]), 200.0 * a]
        })
        .hessian(|x| {
            DenseMatrix::from_rows(&[
                vec![1200.0 * x[0] * x[0] - 400.0 * x[1] + 2.0, -400.0 * x[0]],
                vec![-400.0 * x[0], 200.0],
            ])
            .expect("static shape")
        })
        .build(),

        // Residual form of the same function: r = (10 (x2 - x1^2), 1 - x1).
        "rosenbrock-residual" => ProblemBuilder::least_squares("rosenbrock-residual", 2, 2, |x| {
            vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]
        })
        .jacobian(|x| {
            DenseMatrix::from_rows(&[vec![-20.0 * x[0], 10.0], vec![-1.0, 0.0]])
                .expect("static shape")
        })
        .build(),

        // F(x) = A x - b with A = [[3, 1], [1, 2]], b = (9, 8); root (2, 3).
        "linear-system" => ProblemBuilder::equations("linear-system", 2, |x| {
            vec![
                3.0 * x[0] + x[1] - 9.0,
                x[0] + 2.0 * x[1] - 8.0,
            ]
        })
        .jacobian(|_| {
            DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 2.0]]).expect("static shape")
        })
        .build(),

        // F = (1e4 x1 x2 - 1, exp(-x1) + exp(-x2) - 1.0001).
        "powell-badly-scaled" => ProblemBuilder::equations("powell-badly-scaled", 2, |x| {
            vec![
                1e4 * x[0] * x[1] - 1.0,
                (-x[0]).exp() + (-x[1]).exp() - 1.0001,
            ]
        })
        .jacobian(|x| {
            DenseMatrix::from_rows(&[
                vec![1e4 * x[1], 1e4 * x[0]],
                vec![-(-x[0]).exp(), -(-x[1]).exp()],
            ])
            .expect("static shape")
        })
        .build(),

        _ => return None,
    };
    Some(p.expect("built-in problems satisfy their own invariants"))
}

/// Documented minimizer (or root) of the named problem.
pub fn known_minimizer(name: &str) -> Option<Vec<f64>> {
    match name {
        "quadratic" => Some(vec![0.0, 0.0]),
        "rosenbrock" | "rosenbrock-residual" => Some(vec![1.0, 1.0]),
        "linear-system" => Some(vec![2.0, 3.0]),
        "powell-badly-scaled" => Some(vec![1.0981593296998175e-5, 9.106146739866524]),
        _ => None,
    }
}

/// Conventional starting point for the named problem.
pub fn default_start(name: &str) -> Option<Vec<f64>> {
    match name {
        "quadratic" => Some(vec![1.0, 1.0]),
        "rosenbrock" | "rosenbrock-residual" => Some(vec![-1.2, 1.0]),
        "linear-system" => Some(vec![0.0, 0.0]),
        "powell-badly-scaled" => Some(vec![0.0, 1.0]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;
    use crate::problem::{evaluate, Wanted};

    #[test]
    fn all_names_build() {
        for name in NAMES {
            let p = build(name).unwrap();
            assert_eq!(p.name(), name);
            assert!(known_minimizer(name).is_some());
            assert!(default_start(name).is_some());
        }
        assert!(build("no-such").is_none());
    }

    #[test]
    fn rosenbrock_value_at_standard_start() {
        let p = build("rosenbrock").unwrap();
        let rec = evaluate(&p, &[-1.2, 1.0], Wanted::NONE.with_f()).unwrap();
        assert!((rec.f().unwrap() - 24.2).abs() < 1e-12);
    }

    #[test]
    fn residual_vanishes_at_documented_roots() {
        for name in ["linear-system", "rosenbrock-residual", "powell-badly-scaled"] {
            let p = build(name).unwrap();
            let x = known_minimizer(name).unwrap();
            let rec = evaluate(&p, &x, Wanted::NONE.with_residual()).unwrap();
            assert!(
                norm_inf(rec.residual().unwrap()) < 1e-8,
                "{name}: residual {:?}",
                rec.residual().unwrap()
            );
        }
    }

    #[test]
    fn gradients_vanish_at_documented_minimizers() {
        for name in ["quadratic", "rosenbrock"] {
            let p = build(name).unwrap();
            let x = known_minimizer(name).unwrap();
            let rec = evaluate(&p, &x, Wanted::NONE.with_gradient()).unwrap();
            assert!(norm_inf(rec.gradient().unwrap()) < 1e-12, "{name}");
        }
    }
}
