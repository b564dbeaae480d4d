//! Linear programs over named variables, a deterministic two-phase simplex
//! solver, and an exact enumeration oracle for small instances.
//!
//! Variables carry a lower bound of either zero or unbounded; constraints
//! relate a linear combination to a constant with one of `<=`, `=`, `>=`;
//! the objective is a linear combination to minimise. [`solve`] runs an
//! embedded dense simplex and never fails: infeasibility and unboundedness
//! are reported in the solution status. [`brute_force`] enumerates basic
//! solutions and extreme rays in exact rational arithmetic and serves as an
//! independent oracle for randomized testing.

mod brute;
mod simplex;
pub mod text;

pub use brute::{brute_force, BruteForceError};
pub use simplex::solve;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Feasibility and pivoting tolerance used by the floating-point solver.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Lower bound of a variable: at zero, or none at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBound {
    Zero,
    Free,
}

/// Relation of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub bound: LowerBound,
}

/// One constraint row: `terms (relation) constant`, with terms held sorted
/// by variable index and free of zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    terms: Vec<(usize, f64)>,
    relation: Relation,
    constant: f64,
}

impl Constraint {
    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("term references undeclared variable {index}")]
    UnknownVariable { index: usize },
    #[error("coefficient or constant is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, f64)>,
}

fn canonical_terms(terms: &[(usize, f64)], nvars: usize) -> Result<Vec<(usize, f64)>, LpError> {
    for &(index, coefficient) in terms {
        if index >= nvars {
            return Err(LpError::UnknownVariable { index });
        }
        if !coefficient.is_finite() {
            return Err(LpError::NonFinite);
        }
    }
    let mut sorted = terms.to_vec();
    sorted.sort_by_key(|&(index, _)| index);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(sorted.len());
    for (index, coefficient) in sorted {
        match merged.last_mut() {
            Some((last, c)) if *last == index => *c += coefficient,
            _ => merged.push((index, coefficient)),
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    Ok(merged)
}

impl LinearProgram {
    pub fn new() -> Self {
        LinearProgram::default()
    }

    /// Declares a variable and returns its index.
    pub fn add_variable(&mut self, name: impl Into<String>, bound: LowerBound) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            bound,
        });
        self.variables.len() - 1
    }

    /// Adds a constraint row and returns its index.
    pub fn add_constraint(
        &mut self,
        terms: &[(usize, f64)],
        relation: Relation,
        constant: f64,
    ) -> Result<usize, LpError> {
        if !constant.is_finite() {
            return Err(LpError::NonFinite);
        }
        let terms = canonical_terms(terms, self.variables.len())?;
        self.constraints.push(Constraint {
            terms,
            relation,
            constant,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, terms: &[(usize, f64)]) -> Result<(), LpError> {
        self.objective = canonical_terms(terms, self.variables.len())?;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn objective_value(&self, assignment: &[f64]) -> f64 {
        self.objective
            .iter()
            .map(|&(index, c)| c * assignment[index])
            .sum()
    }

    /// Whether the assignment satisfies every bound and constraint within
    /// the given absolute tolerance.
    pub fn check_feasible(&self, assignment: &[f64], tol: f64) -> bool {
        if assignment.len() != self.variables.len() {
            return false;
        }
        for (variable, &x) in self.variables.iter().zip(assignment) {
            if variable.bound == LowerBound::Zero && x < -tol {
                return false;
            }
        }
        self.constraints.iter().all(|row| {
            let lhs: f64 = row.terms.iter().map(|&(index, c)| c * assignment[index]).sum();
            match row.relation {
                Relation::Le => lhs <= row.constant + tol,
                Relation::Eq => (lhs - row.constant).abs() <= tol,
                Relation::Ge => lhs >= row.constant - tol,
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. The assignment and objective are meaningful only when
/// the status is `Optimal`; otherwise they are zero-filled.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub assignment: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    pub(crate) fn non_optimal(status: LpStatus, nvars: usize) -> Self {
        LpSolution {
            status,
            assignment: vec![0.0; nvars],
            objective_value: 0.0,
        }
    }
}

fn push_term(out: &mut String, first: bool, coefficient: f64, name: &str) {
    use core::fmt::Write;
    let negative = coefficient < 0.0;
    if first {
        if negative {
            out.push_str("- ");
        }
    } else if negative {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    let magnitude = coefficient.abs();
    if magnitude != 1.0 {
        let _ = write!(out, "{magnitude} ");
    }
    out.push_str(name);
}

/// Renders the program in the fixed-format LP text dialect: an objective
/// section, a constraint section, a bounds section, and a terminator.
pub fn to_lp_text(lp: &LinearProgram) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    if !lp.objective().is_empty() {
        out.push(' ');
        for (position, &(index, c)) in lp.objective().iter().enumerate() {
            push_term(&mut out, position == 0, c, &lp.variables()[index].name);
        }
    }
    out.push_str("\nSubject To\n");
    for (row_index, row) in lp.constraints().iter().enumerate() {
        let _ = write!(out, " c{row_index}:");
        if row.terms().is_empty() {
            out.push_str(" 0");
        } else {
            out.push(' ');
            for (position, &(index, c)) in row.terms().iter().enumerate() {
                push_term(&mut out, position == 0, c, &lp.variables()[index].name);
            }
        }
        let relation = match row.relation() {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {relation} {}", row.constant());
    }
    out.push_str("Bounds\n");
    for variable in lp.variables() {
        match variable.bound {
            LowerBound::Zero => {
                let _ = writeln!(out, " {} >= 0", variable.name);
            }
            LowerBound::Free => {
                let _ = writeln!(out, " {} free", variable.name);
            }
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn terms_are_canonicalized() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        let y = lp.add_variable("y", LowerBound::Zero);
        lp.add_constraint(&[(y, 1.0), (x, 2.0), (y, -1.0), (x, 1.0)], Relation::Le, 5.0)
            .unwrap();
        assert_eq!(lp.constraints()[0].terms(), &[(x, 3.0)]);
        assert_eq!(
            lp.add_constraint(&[(7, 1.0)], Relation::Le, 0.0),
            Err(LpError::UnknownVariable { index: 7 })
        );
    }

    #[test]
    fn feasibility_check_respects_relations_and_bounds() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, 2.0).unwrap();
        assert!(lp.check_feasible(&[2.0], 1e-9));
        assert!(!lp.check_feasible(&[1.0], 1e-9));
        assert!(!lp.check_feasible(&[-1.0], 1e-9));
    }

    #[test]
    fn lp_text_layout_is_fixed() {
        let mut lp = LinearProgram::new();
        let w = lp.add_variable("w", LowerBound::Zero);
        let v = lp.add_variable("v0", LowerBound::Free);
        lp.set_objective(&[(w, 1.0)]).unwrap();
        lp.add_constraint(&[(v, 1.0), (w, -1.0)], Relation::Le, 0.0).unwrap();
        lp.add_constraint(&[(v, 2.5)], Relation::Ge, 1.0).unwrap();
        let text = to_lp_text(&lp);
        assert_eq!(
            text,
            "Minimize\n obj: w\nSubject To\n c0: - w + v0 <= 0\n c1: 2.5 v0 >= 1\nBounds\n w >= 0\n v0 free\nEnd\n"
        );
    }

    pub(super) fn random_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram {
        let nvars = rng.random_range(1..=max_vars);
        let nrows = rng.random_range(0..=max_rows);
        let mut lp = LinearProgram::new();
        for v in 0..nvars {
            lp.add_variable(alloc::format!("x{v}"), LowerBound::Zero);
        }
        let objective: Vec<(usize, f64)> = (0..nvars)
            .map(|v| (v, rng.random_range(-3..=3) as f64))
            .collect();
        lp.set_objective(&objective).unwrap();
        for _ in 0..nrows {
            let terms: Vec<(usize, f64)> = (0..nvars)
                .map(|v| (v, rng.random_range(-3..=3) as f64))
                .collect();
            let relation = match rng.random_range(0..3) {
                0 => Relation::Le,
                1 => Relation::Eq,
                _ => Relation::Ge,
            };
            let constant = rng.random_range(-4..=4) as f64;
            lp.add_constraint(&terms, relation, constant).unwrap();
        }
        lp
    }

    #[test]
    fn solver_matches_exact_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for case in 0..150 {
            let lp = random_lp(&mut rng, 4, 6);
            let fast = solve(&lp);
            let exact = brute_force(&lp).unwrap();
            assert_eq!(fast.status, exact.status, "case {case}: {lp:?}");
            if fast.status == LpStatus::Optimal {
                assert!(
                    (fast.objective_value - exact.objective_value).abs() <= 1e-6,
                    "case {case}: {} vs {} on {lp:?}",
                    fast.objective_value,
                    exact.objective_value
                );
                assert!(lp.check_feasible(&fast.assignment, 1e-7));
            }
        }
    }

    #[test]
    fn solver_is_deterministic_bit_for_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let lp = random_lp(&mut rng, 5, 8);
            let first = solve(&lp);
            let second = solve(&lp);
            assert_eq!(first.status, second.status);
            let bits = |xs: &[f64]| xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&first.assignment), bits(&second.assignment));
            assert_eq!(
                first.objective_value.to_bits(),
                second.objective_value.to_bits()
            );
        }
    }

    #[test]
    fn perturbed_feasible_points_never_beat_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        for _ in 0..60 {
            let lp = random_lp(&mut rng, 4, 6);
            let sol = solve(&lp);
            if sol.status != LpStatus::Optimal {
                continue;
            }
            for _ in 0..20 {
                let candidate: Vec<f64> = sol
                    .assignment
                    .iter()
                    .map(|&x| {
                        let jitter = rng.random_range(-2..=2) as f64 * 0.5;
                        (x + jitter).round().max(0.0)
                    })
                    .collect();
                if lp.check_feasible(&candidate, 1e-9) {
                    checked += 1;
                    assert!(lp.objective_value(&candidate) >= sol.objective_value - 1e-6);
                }
            }
        }
        assert!(checked > 0);
    }
}
