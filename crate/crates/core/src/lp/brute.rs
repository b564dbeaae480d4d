//! Exhaustive exact solver for small linear programs.
//!
//! Every candidate optimum of a pointed feasible region is a vertex, and a
//! vertex is the unique solution of some full-rank subset of the active
//! hyperplanes (constraint rows plus coordinate planes). Unboundedness is
//! witnessed by an extreme ray, which is a one-dimensional kernel of some
//! rank `n-1` subset. Both families are small enough to enumerate outright
//! under the size guard, and all arithmetic is exact rational, so the
//! result is an oracle rather than an approximation.
//!
//! Arithmetic runs over `i128` fractions first and restarts in big
//! rationals on overflow, which keeps the common case allocation-free.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{LinearProgram, LowerBound, LpSolution, LpStatus, Relation};

pub const MAX_VARIABLES: usize = 8;
pub const MAX_CONSTRAINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BruteForceError {
    #[error(
        "instance too large for exhaustive search: {variables} variables and \
         {constraints} constraints exceed the {MAX_VARIABLES}/{MAX_CONSTRAINTS} guard"
    )]
    TooLarge { variables: usize, constraints: usize },
    #[error("variable {index} has no lower bound, so the feasible region is not pointed")]
    FreeVariable { index: usize },
}

/// Exact field operations. Methods return `None` on arithmetic overflow,
/// which callers treat as a request to restart with a wider number type.
trait Field: Clone + Sized {
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn zero() -> Self;
    fn one() -> Self;
    fn neg(&self) -> Self;
    fn add(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn div(&self, other: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn try_cmp(&self, other: &Self) -> Option<core::cmp::Ordering>;
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Reduced fraction of two `i128` values with a positive denominator.
#[derive(Debug, Clone)]
struct Q64 {
    n: i128,
    d: i128,
}

impl Q64 {
    fn reduced(n: i128, d: i128) -> Option<Q64> {
        if d == 0 {
            return None;
        }
        let (n, d) = if d < 0 {
            (n.checked_neg()?, d.checked_neg()?)
        } else {
            (n, d)
        };
        let g = gcd128(n, d);
        if g > 1 {
            Some(Q64 { n: n / g, d: d / g })
        } else {
            Some(Q64 { n, d })
        }
    }
}

impl Field for Q64 {
    fn from_f64(x: f64) -> Option<Self> {
        let exact = BigRational::from_float(x)?;
        Q64::reduced(exact.numer().to_i128()?, exact.denom().to_i128()?)
    }

    fn to_f64(&self) -> f64 {
        self.n as f64 / self.d as f64
    }

    fn zero() -> Self {
        Q64 { n: 0, d: 1 }
    }

    fn one() -> Self {
        Q64 { n: 1, d: 1 }
    }

    fn neg(&self) -> Self {
        Q64 {
            n: -self.n,
            d: self.d,
        }
    }

    fn add(&self, other: &Self) -> Option<Self> {
        let n = self
            .n
            .checked_mul(other.d)?
            .checked_add(other.n.checked_mul(self.d)?)?;
        Q64::reduced(n, self.d.checked_mul(other.d)?)
    }

    fn sub(&self, other: &Self) -> Option<Self> {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Option<Self> {
        Q64::reduced(self.n.checked_mul(other.n)?, self.d.checked_mul(other.d)?)
    }

    fn div(&self, other: &Self) -> Option<Self> {
        if other.n == 0 {
            return None;
        }
        Q64::reduced(self.n.checked_mul(other.d)?, self.d.checked_mul(other.n)?)
    }

    fn is_zero(&self) -> bool {
        self.n == 0
    }

    fn try_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        let left = self.n.checked_mul(other.d)?;
        let right = other.n.checked_mul(self.d)?;
        Some(left.cmp(&right))
    }
}

impl Field for BigRational {
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(0.0)
    }

    fn zero() -> Self {
        num_traits::Zero::zero()
    }

    fn one() -> Self {
        num_traits::One::one()
    }

    fn neg(&self) -> Self {
        -self
    }

    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }

    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }

    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }

    fn div(&self, other: &Self) -> Option<Self> {
        if num_traits::Zero::is_zero(other) {
            return None;
        }
        Some(self / other)
    }

    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }

    fn try_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct Instance<F> {
    nvars: usize,
    rows: Vec<(Vec<F>, Relation, F)>,
    objective: Vec<F>,
}

fn build<F: Field>(lp: &LinearProgram) -> Option<Instance<F>> {
    let nvars = lp.variable_count();
    let mut rows = Vec::with_capacity(lp.constraints().len());
    for constraint in lp.constraints() {
        let mut coefficients = vec![F::zero(); nvars];
        for &(v, c) in constraint.terms() {
            coefficients[v] = F::from_f64(c)?;
        }
        rows.push((
            coefficients,
            constraint.relation(),
            F::from_f64(constraint.constant())?,
        ));
    }
    let mut objective = vec![F::zero(); nvars];
    for &(v, c) in lp.objective() {
        objective[v] = F::from_f64(c)?;
    }
    Some(Instance {
        nvars,
        rows,
        objective,
    })
}

/// Visits `choose`-element subsets of `0..total` in lexicographic order
/// until the visitor returns a value.
fn combinations<R>(
    total: usize,
    choose: usize,
    mut visit: impl FnMut(&[usize]) -> Option<R>,
) -> Option<R> {
    if choose > total {
        return None;
    }
    let mut idx: Vec<usize> = (0..choose).collect();
    loop {
        if let Some(result) = visit(&idx) {
            return Some(result);
        }
        let mut i = choose;
        while i > 0 && idx[i - 1] == i - 1 + total - choose {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        idx[i - 1] += 1;
        for j in i..choose {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

enum Solved<F> {
    Unique(Vec<F>),
    Singular,
}

/// Solves the square system given by the chosen planes. `None` signals
/// overflow.
fn solve_square<F: Field>(planes: &[(Vec<F>, F)], combo: &[usize]) -> Option<Solved<F>> {
    let n = combo.len();
    let mut m: Vec<Vec<F>> = combo
        .iter()
        .map(|&p| {
            let mut row = planes[p].0.clone();
            row.push(planes[p].1.clone());
            row
        })
        .collect();
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Some(Solved::Singular);
        };
        m.swap(col, pivot_row);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&m[col][col])?;
            for j in col..=n {
                let delta = factor.mul(&m[col][j])?;
                m[r][j] = m[r][j].sub(&delta)?;
            }
        }
    }
    let mut x = vec![F::zero(); n];
    for col in (0..n).rev() {
        let mut acc = m[col][n].clone();
        for j in col + 1..n {
            let delta = m[col][j].mul(&x[j])?;
            acc = acc.sub(&delta)?;
        }
        x[col] = acc.div(&m[col][col])?;
    }
    Some(Solved::Unique(x))
}

/// Determinant by fraction-full elimination. `None` signals overflow.
fn determinant<F: Field>(mut m: Vec<Vec<F>>) -> Option<F> {
    let n = m.len();
    let mut product = F::one();
    let mut negated = false;
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Some(F::zero());
        };
        if pivot_row != col {
            m.swap(col, pivot_row);
            negated = !negated;
        }
        product = product.mul(&m[col][col])?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&m[col][col])?;
            for j in col..n {
                let delta = factor.mul(&m[col][j])?;
                m[r][j] = m[r][j].sub(&delta)?;
            }
        }
    }
    Some(if negated { product.neg() } else { product })
}

/// Kernel direction of `n-1` plane normals via signed cofactors; the
/// all-zero answer means the chosen rows are rank deficient. Outer `None`
/// signals overflow.
fn kernel_direction<F: Field>(
    planes: &[(Vec<F>, F)],
    combo: &[usize],
    nvars: usize,
) -> Option<Option<Vec<F>>> {
    let mut direction = Vec::with_capacity(nvars);
    let mut all_zero = true;
    for skip in 0..nvars {
        let minor: Vec<Vec<F>> = combo
            .iter()
            .map(|&p| {
                planes[p]
                    .0
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, value)| value.clone())
                    .collect()
            })
            .collect();
        let mut cofactor = determinant(minor)?;
        if skip % 2 == 1 {
            cofactor = cofactor.neg();
        }
        if !cofactor.is_zero() {
            all_zero = false;
        }
        direction.push(cofactor);
    }
    Some(if all_zero { None } else { Some(direction) })
}

fn dot<F: Field>(xs: &[F], ys: &[F]) -> Option<F> {
    let mut acc = F::zero();
    for (x, y) in xs.iter().zip(ys) {
        let term = x.mul(y)?;
        acc = acc.add(&term)?;
    }
    Some(acc)
}

/// Whether the point satisfies every constraint and lower bound exactly.
/// `None` signals overflow.
fn satisfies<F: Field>(inst: &Instance<F>, x: &[F]) -> Option<bool> {
    use core::cmp::Ordering;
    for value in x {
        if value.try_cmp(&F::zero())? == Ordering::Less {
            return Some(false);
        }
    }
    for (coefficients, relation, constant) in &inst.rows {
        let lhs = dot(coefficients, x)?;
        let ord = lhs.try_cmp(constant)?;
        let holds = match relation {
            Relation::Le => ord != Ordering::Greater,
            Relation::Eq => ord == Ordering::Equal,
            Relation::Ge => ord != Ordering::Less,
        };
        if !holds {
            return Some(false);
        }
    }
    Some(true)
}

/// Whether the direction lies in the recession cone and strictly improves
/// the objective. `None` signals overflow.
fn improving_ray<F: Field>(inst: &Instance<F>, direction: &[F]) -> Option<bool> {
    use core::cmp::Ordering;
    for value in direction {
        if value.try_cmp(&F::zero())? == Ordering::Less {
            return Some(false);
        }
    }
    for (coefficients, relation, _) in &inst.rows {
        let slope = dot(coefficients, direction)?;
        let ord = slope.try_cmp(&F::zero())?;
        let holds = match relation {
            Relation::Le => ord != Ordering::Greater,
            Relation::Eq => ord == Ordering::Equal,
            Relation::Ge => ord != Ordering::Less,
        };
        if !holds {
            return Some(false);
        }
    }
    let gain = dot(&inst.objective, direction)?;
    Some(gain.try_cmp(&F::zero())? == Ordering::Less)
}

enum Scan {
    Overflow,
    Ray,
}

/// Runs the full enumeration in one number type. `None` signals overflow
/// anywhere, asking the caller to restart with a wider type.
fn solve_exact<F: Field>(lp: &LinearProgram) -> Option<LpSolution> {
    use core::cmp::Ordering;
    let inst = build::<F>(lp)?;
    let n = inst.nvars;
    if n == 0 {
        let feasible = inst.rows.iter().all(|(_, relation, constant)| {
            let ord = F::zero()
                .try_cmp(constant)
                .expect("comparison of converted constants");
            match relation {
                Relation::Le => ord != Ordering::Greater,
                Relation::Eq => ord == Ordering::Equal,
                Relation::Ge => ord != Ordering::Less,
            }
        });
        return Some(if feasible {
            LpSolution {
                status: LpStatus::Optimal,
                assignment: Vec::new(),
                objective_value: 0.0,
            }
        } else {
            LpSolution::non_optimal(LpStatus::Infeasible, 0)
        });
    }

    let mut planes: Vec<(Vec<F>, F)> = inst
        .rows
        .iter()
        .map(|(coefficients, _, constant)| (coefficients.clone(), constant.clone()))
        .collect();
    for v in 0..n {
        let mut unit = vec![F::zero(); n];
        unit[v] = F::one();
        planes.push((unit, F::zero()));
    }

    let mut best: Option<(Vec<F>, F)> = None;
    let aborted = combinations(planes.len(), n, |combo| {
        let solved = match solve_square(&planes, combo) {
            None => return Some(Scan::Overflow),
            Some(Solved::Singular) => return None,
            Some(Solved::Unique(x)) => x,
        };
        match satisfies(&inst, &solved) {
            None => return Some(Scan::Overflow),
            Some(false) => return None,
            Some(true) => {}
        }
        let Some(value) = dot(&inst.objective, &solved) else {
            return Some(Scan::Overflow);
        };
        let replace = match &best {
            None => true,
            Some((_, incumbent)) => match value.try_cmp(incumbent) {
                None => return Some(Scan::Overflow),
                Some(Ordering::Less) => true,
                _ => false,
            },
        };
        if replace {
            best = Some((solved, value));
        }
        None
    });
    if aborted.is_some() {
        return None;
    }

    let Some((assignment, value)) = best else {
        return Some(LpSolution::non_optimal(LpStatus::Infeasible, n));
    };

    let ray = combinations(planes.len(), n - 1, |combo| {
        let direction = match kernel_direction(&planes, combo, n) {
            None => return Some(Scan::Overflow),
            Some(None) => return None,
            Some(Some(direction)) => direction,
        };
        for candidate in [&direction, &direction.iter().map(Field::neg).collect::<Vec<_>>()] {
            match improving_ray(&inst, candidate) {
                None => return Some(Scan::Overflow),
                Some(true) => return Some(Scan::Ray),
                Some(false) => {}
            }
        }
        None
    });
    match ray {
        Some(Scan::Overflow) => return None,
        Some(Scan::Ray) => return Some(LpSolution::non_optimal(LpStatus::Unbounded, n)),
        None => {}
    }

    Some(LpSolution {
        status: LpStatus::Optimal,
        assignment: assignment.iter().map(Field::to_f64).collect(),
        objective_value: value.to_f64(),
    })
}

/// Solves a small program by exact enumeration of vertices and extreme
/// rays. Independent of the simplex path, so the two can cross-check each
/// other. Requires every variable to be bounded below.
pub fn brute_force(lp: &LinearProgram) -> Result<LpSolution, BruteForceError> {
    let variables = lp.variable_count();
    let constraints = lp.constraints().len();
    if variables > MAX_VARIABLES || constraints > MAX_CONSTRAINTS {
        return Err(BruteForceError::TooLarge {
            variables,
            constraints,
        });
    }
    if let Some(index) = lp
        .variables()
        .iter()
        .position(|variable| variable.bound == LowerBound::Free)
    {
        return Err(BruteForceError::FreeVariable { index });
    }
    if let Some(solution) = solve_exact::<Q64>(lp) {
        return Ok(solution);
    }
    Ok(solve_exact::<BigRational>(lp).expect("big rational arithmetic does not overflow"))
}
