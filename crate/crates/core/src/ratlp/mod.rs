//! Exact linear programming over bounded boxes.
//!
//! Programs have the form `max w·y` subject to `C y ≤ f` and `l ≤ y ≤ u`,
//! which is all the threshold search needs. Arithmetic is exact, so every
//! reported optimum is a vertex of the polytope with no rounding.

mod bounds;
mod simplex;

use thiserror::Error;

use crate::asgraph::RoutingSystem;
use crate::scalar::ExactScalar;
use crate::search::SaturationPattern;

pub use bounds::{default_sweeps, tighten_bounds, Tightening};
pub use simplex::simplex_max;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("{what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("saturation pattern leaves no unsaturated message")]
    EmptyUnsat,
    #[error("pattern has {got} labels for {expected} messages")]
    PatternLength { expected: usize, got: usize },
}

/// `max objective·y` s.t. `constraints · y ≤ rhs`, `lower ≤ y ≤ upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram<T> {
    objective: Vec<T>,
    constraints: Vec<Vec<T>>,
    rhs: Vec<T>,
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: ExactScalar> LinearProgram<T> {
    pub fn new(
        objective: Vec<T>,
        constraints: Vec<Vec<T>>,
        rhs: Vec<T>,
        lower: Vec<T>,
        upper: Vec<T>,
    ) -> Result<Self, LpError> {
        let n = objective.len();
        let dim = |what, expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(LpError::DimensionMismatch {
                    what,
                    expected,
                    got,
                })
            }
        };
        dim("right-hand side", constraints.len(), rhs.len())?;
        for row in &constraints {
            dim("constraint row", n, row.len())?;
        }
        dim("lower bounds", n, lower.len())?;
        dim("upper bounds", n, upper.len())?;
        Ok(LinearProgram {
            objective,
            constraints,
            rhs,
            lower,
            upper,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Vec<T>] {
        &self.constraints
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Same constraints with a different box.
    pub fn with_bounds(&self, lower: Vec<T>, upper: Vec<T>) -> Result<Self, LpError> {
        LinearProgram::new(
            self.objective.clone(),
            self.constraints.clone(),
            self.rhs.clone(),
            lower,
            upper,
        )
    }

    /// `true` iff `y` satisfies every row and bound exactly.
    pub fn is_feasible(&self, y: &[T]) -> bool {
        y.len() == self.num_vars()
            && y.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
            && self
                .constraints
                .iter()
                .zip(&self.rhs)
                .all(|(row, f)| dot(row, y) <= *f)
    }

    /// Constraint rows and bound unit vectors that hold with equality at `y`.
    pub fn active_rows(&self, y: &[T]) -> Vec<Vec<T>> {
        let n = self.num_vars();
        let mut out: Vec<Vec<T>> = self
            .constraints
            .iter()
            .zip(&self.rhs)
            .filter(|(row, f)| dot(row, y) == **f)
            .map(|(row, _)| row.clone())
            .collect();
        for k in 0..n {
            if y[k] == self.lower[k] || y[k] == self.upper[k] {
                let mut e = vec![T::zero(); n];
                e[k] = T::one();
                out.push(e);
            }
        }
        out
    }

    pub fn value_at(&self, y: &[T]) -> T {
        dot(&self.objective, y)
    }
}

pub(crate) fn dot<T: ExactScalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpStatus<T> {
    Optimal { value: T, point: Vec<T> },
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOutcome<T> {
    pub status: LpStatus<T>,
    pub pivots: usize,
}

impl<T> LpOutcome<T> {
    pub fn value(&self) -> Option<&T> {
        match &self.status {
            LpStatus::Optimal { value, .. } => Some(value),
            LpStatus::Infeasible => None,
        }
    }

    pub fn point(&self) -> Option<&[T]> {
        match &self.status {
            LpStatus::Optimal { point, .. } => Some(point),
            LpStatus::Infeasible => None,
        }
    }
}

/// The linearized equilibrium program for one saturation pattern.
///
/// Variables are `y = [λ; x_u]` with `u` the unsaturated messages in
/// increasing order. Unsaturated rows encode
/// `(A_uu - I)(x_u - 1) + (1 + λ)·1 ≤ 0`, saturated rows encode
/// `A_su (x_u - 1) + (1 + λ)·1 ≥ 0`.
pub fn build_problem4<T: ExactScalar>(
    rs: &RoutingSystem,
    pattern: &SaturationPattern,
    lambda_max: &T,
) -> Result<LinearProgram<T>, LpError> {
    if pattern.len() != rs.n() {
        return Err(LpError::PatternLength {
            expected: rs.n(),
            got: pattern.len(),
        });
    }
    let unsat = pattern.unsat();
    if unsat.is_empty() {
        return Err(LpError::EmptyUnsat);
    }
    let sat = pattern.sat();
    let m = unsat.len();
    let mut col_of = vec![usize::MAX; rs.n()];
    for (c, &j) in unsat.iter().enumerate() {
        col_of[j] = c + 1;
    }
    let a = rs.routing();
    let one = T::one();

    let mut constraints = Vec::with_capacity(rs.n());
    let mut rhs = Vec::with_capacity(rs.n());
    for &i in &unsat {
        let mut row = vec![T::zero(); m + 1];
        row[0] = one.clone();
        let mut weight = 0i64;
        for j in a.row_support(i) {
            if col_of[j] != usize::MAX {
                row[col_of[j]] = one.clone();
                weight += 1;
            }
        }
        // the routing matrix has a zero diagonal
        row[col_of[i]] = -one.clone();
        constraints.push(row);
        rhs.push(T::from_int(weight - 2));
    }
    for &i in &sat {
        let mut row = vec![T::zero(); m + 1];
        row[0] = -one.clone();
        let mut weight = 0i64;
        for j in a.row_support(i) {
            if col_of[j] != usize::MAX {
                row[col_of[j]] = -one.clone();
                weight += 1;
            }
        }
        constraints.push(row);
        rhs.push(T::from_int(1 - weight));
    }

    let mut objective = vec![T::zero(); m + 1];
    objective[0] = one.clone();
    let lower = vec![-one.clone(); m + 1];
    let mut upper = vec![one; m + 1];
    upper[0] = lambda_max.clone();
    LinearProgram::new(objective, constraints, rhs, lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::routing;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn all_unsat_as_5_3_has_only_unsat_rows() {
        let rs = routing("as_5_3");
        let p = SaturationPattern::all_free(rs.n());
        let lp = build_problem4(&rs, &p, &q(1, 1)).unwrap();
        assert_eq!(lp.num_rows(), 12);
        assert_eq!(lp.num_vars(), 13);
        for row in lp.constraints() {
            assert_eq!(row[0], q(1, 1));
            assert!(row.iter().all(|v| *v <= q(1, 1) && *v >= q(-1, 1)));
        }
    }

    #[test]
    fn problem4_optima_for_extremal_sets() {
        let rs = routing("as_4_4");
        let lp = build_problem4(&rs, &SaturationPattern::all_free(rs.n()), &q(1, 1)).unwrap();
        assert_eq!(simplex_max(&lp).value(), Some(&q(-1, 1)));

        let rs = routing("as_4_0");
        let lp = build_problem4(&rs, &SaturationPattern::all_free(rs.n()), &q(1, 1)).unwrap();
        let out = simplex_max(&lp);
        assert_eq!(out.value(), Some(&q(1, 1)));
        assert!(out.point().unwrap()[1..].iter().all(|v| *v == q(-1, 1)));
    }

    #[test]
    fn empty_unsat_is_an_error() {
        let rs = routing("as_4_4");
        let p = SaturationPattern::all_sat(rs.n());
        assert_eq!(
            build_problem4(&rs, &p, &q(1, 1)),
            Err::<LinearProgram<Rational>, _>(LpError::EmptyUnsat)
        );
    }

    #[test]
    fn dimension_checks() {
        let err = LinearProgram::new(vec![q(1, 1)], vec![vec![q(1, 1), q(0, 1)]], vec![q(0, 1)], vec![q(0, 1)], vec![q(1, 1)]);
        assert!(matches!(err, Err(LpError::DimensionMismatch { what: "constraint row", .. })));
    }
}
