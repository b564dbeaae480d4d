//! Dense two-phase simplex with a light exact presolve.
//!
//! The presolve exists because the layout pipeline emits many two-variable
//! equalities (fairness rows over singleton preimages) and duplicate rows;
//! merging and deduplicating them shrinks four-dimensional instances by an
//! order of magnitude before the tableau is built. All presolve rewrites
//! are exact, so they cannot change the status or the optimum.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use alloc::collections::BTreeSet;

use super::{
    Constraint, LinearProgram, LowerBound, LpSolution, LpStatus, Relation, FEASIBILITY_TOL,
};

/// Consecutive non-improving pivots tolerated before the solver permanently
/// switches from largest-decrease selection to Bland's rule. Generous,
/// because genuine cycles are short while layout programs routinely walk
/// long degenerate plateaus that Dantzig pricing crosses far faster.
fn stall_limit(rows: usize) -> usize {
    512 + 8 * rows
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        UnionFind {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cursor = x;
        while self.parent[cursor] != root {
            let next = self.parent[cursor];
            self.parent[cursor] = root;
            cursor = next;
        }
        root
    }

    /// Keeps the smaller index as representative.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (low, high) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[high] = low;
        true
    }
}

struct Presolved {
    reduced: LinearProgram,
    /// Original variable index to reduced variable index.
    reduced_of: Vec<usize>,
    infeasible: bool,
}

fn row_key(terms: &[(usize, f64)], relation: Relation, constant: f64) -> (Vec<(usize, u64)>, u8, u64) {
    let terms = terms.iter().map(|&(v, c)| (v, c.to_bits())).collect();
    let relation = match relation {
        Relation::Le => 0,
        Relation::Eq => 1,
        Relation::Ge => 2,
    };
    (terms, relation, constant.to_bits())
}

/// A single-variable row that `x >= 0` already implies.
fn implied_by_zero_bound(coefficient: f64, relation: Relation, constant: f64) -> bool {
    match relation {
        Relation::Ge => coefficient > 0.0 && constant <= 0.0,
        Relation::Le => coefficient < 0.0 && constant >= 0.0,
        Relation::Eq => false,
    }
}

fn presolve(lp: &LinearProgram) -> Presolved {
    let nvars = lp.variable_count();
    let mut uf = UnionFind::new(nvars);
    let mut rows: Vec<Option<Constraint>> = lp.constraints().iter().cloned().map(Some).collect();
    let mut infeasible = false;

    loop {
        let mut changed = false;
        let mut seen = BTreeSet::new();
        for slot in rows.iter_mut() {
            let Some(row) = slot else { continue };
            let mut rewritten: Vec<(usize, f64)> =
                row.terms.iter().map(|&(v, c)| (uf.find(v), c)).collect();
            rewritten.sort_by_key(|&(v, _)| v);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(rewritten.len());
            for (v, c) in rewritten {
                match merged.last_mut() {
                    Some((last, acc)) if *last == v => *acc += c,
                    _ => merged.push((v, c)),
                }
            }
            merged.retain(|&(_, c)| c != 0.0);
            row.terms = merged;

            if row.terms.is_empty() {
                let holds = match row.relation {
                    Relation::Le => 0.0 <= row.constant + FEASIBILITY_TOL,
                    Relation::Eq => row.constant.abs() <= FEASIBILITY_TOL,
                    Relation::Ge => 0.0 >= row.constant - FEASIBILITY_TOL,
                };
                if !holds {
                    infeasible = true;
                }
                *slot = None;
                changed = true;
                continue;
            }
            if row.terms.len() == 1 {
                let (v, c) = row.terms[0];
                let zero_bound = lp.variables()[v].bound == LowerBound::Zero
                    || (0..nvars).any(|original| {
                        uf.find(original) == v && lp.variables()[original].bound == LowerBound::Zero
                    });
                if zero_bound && implied_by_zero_bound(c, row.relation, row.constant) {
                    *slot = None;
                    changed = true;
                    continue;
                }
            }
            if row.relation == Relation::Eq
                && row.constant == 0.0
                && row.terms.len() == 2
                && row.terms[0].1 == -row.terms[1].1
            {
                uf.union(row.terms[0].0, row.terms[1].0);
                *slot = None;
                changed = true;
                continue;
            }
            if !seen.insert(row_key(&row.terms, row.relation, row.constant)) {
                *slot = None;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Representatives in ascending order become the reduced variables. A
    // class is bounded at zero as soon as any member is.
    let mut reduced = LinearProgram::new();
    let mut reduced_of = vec![usize::MAX; nvars];
    let mut index_of_rep = vec![usize::MAX; nvars];
    for v in 0..nvars {
        let rep = uf.find(v);
        if index_of_rep[rep] == usize::MAX {
            let bound = if (0..nvars)
                .any(|u| uf.find(u) == rep && lp.variables()[u].bound == LowerBound::Zero)
            {
                LowerBound::Zero
            } else {
                LowerBound::Free
            };
            index_of_rep[rep] = reduced.add_variable(format!("r{rep}"), bound);
        }
        reduced_of[v] = index_of_rep[rep];
    }
    for row in rows.into_iter().flatten() {
        let terms: Vec<(usize, f64)> = row
            .terms
            .iter()
            .map(|&(v, c)| (reduced_of[v], c))
            .collect();
        reduced
            .add_constraint(&terms, row.relation, row.constant)
            .expect("presolved row refers to reduced variables");
    }
    let objective: Vec<(usize, f64)> = lp
        .objective()
        .iter()
        .map(|&(v, c)| (reduced_of[v], c))
        .collect();
    reduced
        .set_objective(&objective)
        .expect("presolved objective refers to reduced variables");

    Presolved {
        reduced,
        reduced_of,
        infeasible,
    }
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    /// Row-major coefficient matrix, `rows x cols`.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    /// Columns at or beyond this index are artificial.
    artificial_start: usize,
    /// Once set, entering columns follow Bland's rule permanently.
    bland: bool,
    stalled: usize,
}

impl Tableau {
    /// Eliminates the pivot column from every other row, touching only the
    /// columns where the (normalized) pivot row is nonzero. The tableau
    /// stays sparse for most of a run, so this skips the bulk of each row.
    fn pivot(&mut self, row: usize, col: usize, scratch: &mut Vec<usize>) {
        let pivot = self.a[row][col];
        for value in self.a[row].iter_mut() {
            *value /= pivot;
        }
        self.b[row] /= pivot;
        scratch.clear();
        scratch.extend(
            self.a[row]
                .iter()
                .enumerate()
                .filter(|&(_, &value)| value != 0.0)
                .map(|(j, _)| j),
        );
        for r in 0..self.a.len() {
            if r == row {
                continue;
            }
            let factor = self.a[r][col];
            if factor == 0.0 {
                continue;
            }
            let (pivot_row, other_row) = if r < row {
                let (head, tail) = self.a.split_at_mut(row);
                (&tail[0], &mut head[r])
            } else {
                let (head, tail) = self.a.split_at_mut(r);
                (&head[row], &mut tail[0])
            };
            for &j in scratch.iter() {
                other_row[j] -= factor * pivot_row[j];
            }
            self.b[r] -= factor * self.b[row];
        }
        self.basis[row] = col;
    }

    /// Prices every active column against the current basis from scratch.
    fn reduced_costs(&self, cost: &[f64], active_cols: usize) -> Vec<f64> {
        let mut reduced: Vec<f64> = cost[..active_cols].to_vec();
        for r in 0..self.a.len() {
            let basic_cost = cost[self.basis[r]];
            if basic_cost == 0.0 {
                continue;
            }
            for (value, coefficient) in reduced.iter_mut().zip(&self.a[r]) {
                *value -= basic_cost * coefficient;
            }
        }
        reduced
    }

    /// Runs pivots until the cost vector is optimal or proven unbounded.
    /// Columns at or beyond `active_cols` are ignored. Reduced costs are
    /// carried across pivots and re-priced from scratch periodically to
    /// bound drift.
    fn run(&mut self, cost: &[f64], active_cols: usize) -> RunOutcome {
        const REFRESH_PERIOD: usize = 256;
        let rows = self.a.len();
        let mut reduced = self.reduced_costs(cost, active_cols);
        let mut since_refresh = 0;
        let mut scratch: Vec<usize> = Vec::new();
        loop {
            if since_refresh == REFRESH_PERIOD {
                reduced = self.reduced_costs(cost, active_cols);
                since_refresh = 0;
            }

            let entering = if self.bland {
                (0..active_cols).find(|&j| reduced[j] < -FEASIBILITY_TOL)
            } else {
                let mut best: Option<usize> = None;
                for j in 0..active_cols {
                    if reduced[j] < -FEASIBILITY_TOL
                        && best.map_or(true, |b| reduced[j] < reduced[b])
                    {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                // The carried costs may have drifted optimistic; accept the
                // claim only if freshly priced costs agree.
                let fresh = self.reduced_costs(cost, active_cols);
                if fresh.iter().any(|&value| value < -FEASIBILITY_TOL) {
                    reduced = fresh;
                    since_refresh = 0;
                    continue;
                }
                return RunOutcome::Optimal;
            };

            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..rows {
                if self.a[r][col] > FEASIBILITY_TOL {
                    let ratio = self.b[r] / self.a[r][col];
                    let better = match leaving {
                        None => true,
                        Some((current, best_ratio)) => {
                            ratio < best_ratio - FEASIBILITY_TOL
                                || (ratio < best_ratio + FEASIBILITY_TOL
                                    && self.basis[r] < self.basis[current])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leaving else {
                return RunOutcome::Unbounded;
            };

            if ratio <= FEASIBILITY_TOL {
                self.stalled += 1;
                if self.stalled >= stall_limit(rows) {
                    self.bland = true;
                }
            } else {
                self.stalled = 0;
            }
            let scale = reduced[col];
            self.pivot(row, col, &mut scratch);
            if scale != 0.0 {
                let pivot_row = &self.a[row];
                for (value, coefficient) in reduced.iter_mut().zip(pivot_row) {
                    *value -= scale * coefficient;
                }
            }
            reduced[col] = 0.0;
            since_refresh += 1;
        }
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .zip(&self.b)
            .map(|(&col, &value)| cost[col] * value)
            .sum()
    }
}

/// Solves the reduced program with a dense two-phase simplex.
fn simplex(lp: &LinearProgram) -> LpSolution {
    let nvars = lp.variable_count();

    // Structural columns: one per zero-bounded variable, a difference pair
    // for each free variable.
    let mut column_sign: Vec<(usize, f64)> = Vec::new();
    for (v, variable) in lp.variables().iter().enumerate() {
        column_sign.push((v, 1.0));
        if variable.bound == LowerBound::Free {
            column_sign.push((v, -1.0));
        }
    }
    let structural = column_sign.len();

    // Rows are normalized to a non-negative right-hand side.
    struct Row {
        coefficients: Vec<f64>,
        relation: Relation,
        rhs: f64,
    }
    let rows: Vec<Row> = lp
        .constraints()
        .iter()
        .map(|constraint| {
            let mut coefficients = vec![0.0; structural];
            for (col, &(v, sign)) in column_sign.iter().enumerate() {
                for &(variable, c) in constraint.terms() {
                    if variable == v {
                        coefficients[col] += sign * c;
                    }
                }
            }
            let mut relation = constraint.relation();
            let mut rhs = constraint.constant();
            if rhs < 0.0 {
                rhs = -rhs;
                for value in coefficients.iter_mut() {
                    *value = -*value;
                }
                relation = match relation {
                    Relation::Le => Relation::Ge,
                    Relation::Eq => Relation::Eq,
                    Relation::Ge => Relation::Le,
                };
            }
            Row {
                coefficients,
                relation,
                rhs,
            }
        })
        .collect();

    let slack_count = rows
        .iter()
        .filter(|row| row.relation != Relation::Eq)
        .count();
    let artificial_count = rows
        .iter()
        .filter(|row| row.relation != Relation::Le)
        .count();
    let total_cols = structural + slack_count + artificial_count;
    let artificial_start = structural + slack_count;

    let mut a = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    let mut basis = Vec::with_capacity(rows.len());
    let mut next_slack = structural;
    let mut next_artificial = artificial_start;
    for row in &rows {
        let mut dense = vec![0.0; total_cols];
        dense[..structural].copy_from_slice(&row.coefficients);
        match row.relation {
            Relation::Le => {
                dense[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                dense[next_slack] = -1.0;
                next_slack += 1;
                dense[next_artificial] = 1.0;
                basis.push(next_artificial);
                next_artificial += 1;
            }
            Relation::Eq => {
                dense[next_artificial] = 1.0;
                basis.push(next_artificial);
                next_artificial += 1;
            }
        }
        a.push(dense);
        b.push(row.rhs);
    }

    let mut tableau = Tableau {
        a,
        b,
        basis,
        artificial_start,
        bland: false,
        stalled: 0,
    };

    if artificial_count > 0 {
        let mut phase1_cost = vec![0.0; total_cols];
        for cost in phase1_cost[artificial_start..].iter_mut() {
            *cost = 1.0;
        }
        match tableau.run(&phase1_cost, total_cols) {
            RunOutcome::Optimal => {}
            // A sum of non-negative artificials cannot decrease without
            // bound; reaching here means the arithmetic already broke down,
            // and no feasible point was produced.
            RunOutcome::Unbounded => return LpSolution::non_optimal(LpStatus::Infeasible, nvars),
        }
        if tableau.objective(&phase1_cost) > 1e-7 {
            return LpSolution::non_optimal(LpStatus::Infeasible, nvars);
        }

        // Drive leftover artificials out of the basis; rows that offer no
        // structural or slack pivot are redundant and dropped.
        let mut scratch = Vec::new();
        let mut keep = Vec::new();
        for r in 0..tableau.a.len() {
            if tableau.basis[r] < artificial_start {
                keep.push(r);
                continue;
            }
            let pivot_col = (0..artificial_start)
                .find(|&j| tableau.a[r][j].abs() > FEASIBILITY_TOL);
            match pivot_col {
                Some(col) => {
                    tableau.pivot(r, col, &mut scratch);
                    keep.push(r);
                }
                None => {}
            }
        }
        if keep.len() != tableau.a.len() {
            let mut a = Vec::with_capacity(keep.len());
            let mut b = Vec::with_capacity(keep.len());
            let mut basis = Vec::with_capacity(keep.len());
            for &r in &keep {
                a.push(core::mem::take(&mut tableau.a[r]));
                b.push(tableau.b[r]);
                basis.push(tableau.basis[r]);
            }
            tableau.a = a;
            tableau.b = b;
            tableau.basis = basis;
        }
        // Artificial columns are dead from here on; trimming them shrinks
        // every later pivot.
        for row in tableau.a.iter_mut() {
            row.truncate(artificial_start);
        }
    }

    let mut phase2_cost = vec![0.0; total_cols];
    for (col, &(v, sign)) in column_sign.iter().enumerate() {
        for &(variable, c) in lp.objective() {
            if variable == v {
                phase2_cost[col] += sign * c;
            }
        }
    }
    match tableau.run(&phase2_cost, tableau.artificial_start) {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return LpSolution::non_optimal(LpStatus::Unbounded, nvars),
    }

    let mut column_value = vec![0.0; total_cols];
    for (r, &col) in tableau.basis.iter().enumerate() {
        column_value[col] = tableau.b[r];
    }
    let mut assignment = vec![0.0; nvars];
    for (col, &(v, sign)) in column_sign.iter().enumerate() {
        assignment[v] += sign * column_value[col];
    }
    let objective_value = lp.objective_value(&assignment);
    LpSolution {
        status: LpStatus::Optimal,
        assignment,
        objective_value,
    }
}

/// Minimises the objective subject to the constraints and lower bounds.
///
/// Infeasibility and unboundedness are reported through the status, never
/// as an error. Output is deterministic for a fixed variable and
/// constraint order.
pub fn solve(lp: &LinearProgram) -> LpSolution {
    let nvars = lp.variable_count();
    let pre = presolve(lp);
    if pre.infeasible {
        return LpSolution::non_optimal(LpStatus::Infeasible, nvars);
    }
    let reduced_solution = simplex(&pre.reduced);
    match reduced_solution.status {
        LpStatus::Optimal => {
            let assignment: Vec<f64> = pre
                .reduced_of
                .iter()
                .map(|&r| reduced_solution.assignment[r])
                .collect();
            let objective_value = lp.objective_value(&assignment);
            LpSolution {
                status: LpStatus::Optimal,
                assignment,
                objective_value,
            }
        }
        status => LpSolution::non_optimal(status, nvars),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{to_lp_text, LinearProgram, LowerBound, LpStatus, Relation};
    use super::{presolve, solve};

    #[test]
    fn single_lower_bounded_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        lp.set_objective(&[(x, 1.0)]).unwrap();
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, 3.0).unwrap();
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 3.0).abs() < 1e-9);
        assert!((sol.assignment[x] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn chained_bounds_pin_the_width() {
        let mut lp = LinearProgram::new();
        let w = lp.add_variable("w", LowerBound::Zero);
        let v = lp.add_variable("v", LowerBound::Zero);
        lp.set_objective(&[(w, 1.0)]).unwrap();
        lp.add_constraint(&[(v, 1.0), (w, -1.0)], Relation::Le, 0.0)
            .unwrap();
        lp.add_constraint(&[(v, 1.0)], Relation::Ge, 1.0).unwrap();
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-9);
        assert!((sol.assignment[w] - 1.0).abs() < 1e-9);
        assert!((sol.assignment[v] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn conflicting_bounds_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        lp.set_objective(&[(x, 1.0)]).unwrap();
        lp.add_constraint(&[(x, 1.0)], Relation::Le, 0.0).unwrap();
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, 1.0).unwrap();
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn open_descent_is_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        lp.set_objective(&[(x, -1.0)]).unwrap();
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_split_cleanly() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Free);
        lp.set_objective(&[(x, 1.0)]).unwrap();
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, -5.0).unwrap();
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.assignment[x] + 5.0).abs() < 1e-9);
    }

    #[test]
    fn equality_pairs_merge_in_presolve() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        let y = lp.add_variable("y", LowerBound::Zero);
        let z = lp.add_variable("z", LowerBound::Zero);
        lp.set_objective(&[(x, 1.0), (y, 1.0), (z, 1.0)]).unwrap();
        lp.add_constraint(&[(x, 1.0), (y, -1.0)], Relation::Eq, 0.0)
            .unwrap();
        lp.add_constraint(&[(z, -2.0), (y, 2.0)], Relation::Eq, 0.0)
            .unwrap();
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, 2.0).unwrap();
        // Duplicate of the previous row once variables merge.
        lp.add_constraint(&[(z, 1.0)], Relation::Ge, 2.0).unwrap();
        let pre = presolve(&lp);
        assert_eq!(pre.reduced.variable_count(), 1);
        assert_eq!(pre.reduced.constraints().len(), 1);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 6.0).abs() < 1e-9);
        assert!((sol.assignment[y] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn presolve_spots_contradictory_constants() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        lp.add_constraint(&[(x, 1.0), (x, -1.0)], Relation::Ge, 1.0)
            .unwrap();
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_ties_still_terminate() {
        // Classic cycling-prone instance (Beale); Bland's fallback must
        // terminate it at the optimum.
        let mut lp = LinearProgram::new();
        let x1 = lp.add_variable("x1", LowerBound::Zero);
        let x2 = lp.add_variable("x2", LowerBound::Zero);
        let x3 = lp.add_variable("x3", LowerBound::Zero);
        let x4 = lp.add_variable("x4", LowerBound::Zero);
        lp.set_objective(&[(x1, -0.75), (x2, 150.0), (x3, -0.02), (x4, 6.0)])
            .unwrap();
        lp.add_constraint(
            &[(x1, 0.25), (x2, -60.0), (x3, -0.04), (x4, 9.0)],
            Relation::Le,
            0.0,
        )
        .unwrap();
        lp.add_constraint(
            &[(x1, 0.5), (x2, -90.0), (x3, -0.02), (x4, 3.0)],
            Relation::Le,
            0.0,
        )
        .unwrap();
        lp.add_constraint(&[(x3, 1.0)], Relation::Le, 1.0).unwrap();
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value + 0.05).abs() < 1e-9);
    }

    #[test]
    fn exported_text_reflects_presolved_input_shape() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", LowerBound::Zero);
        lp.set_objective(&[(x, 1.0)]).unwrap();
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, 3.0).unwrap();
        let text = to_lp_text(&lp);
        assert!(text.starts_with("Minimize\n"));
        assert!(text.contains("Subject To\n c0: x >= 3\n"));
        assert!(text.ends_with("End\n"));
    }
}
