//! Threshold computation: the largest uniform channel value at which the
//! absorbing set still admits a bad equilibrium.
//!
//! Every equilibrium splits the messages into saturated ones (at `+1`) and
//! unsaturated ones; for a fixed split the equilibrium conditions are linear,
//! so the threshold is the maximum of one LP per saturation pattern. The tree
//! search in [`compute_threshold`] explores patterns with two prunes:
//! [`test1`] discards patterns whose unsaturated block cannot hold an
//! equilibrium, and [`test2`] skips LPs that provably cannot beat the
//! incumbent.

mod certify;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asgraph::RoutingSystem;
use crate::ratlp::{build_problem4, default_sweeps, simplex_max, tighten_bounds, LpError, LpStatus};
use crate::scalar::ExactScalar;

pub use certify::{certify_threshold, Certificate, CertifyError, CertifyOptions};
pub use tree::{brute_force_threshold, compute_threshold, SearchOptions, DEFAULT_BRUTE_FORCE_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Free,
    FixedUnsat,
    FixedSat,
}

/// Per-message labels. Free and fixed-unsaturated messages together form
/// the unsaturated set; fixed-saturated messages sit at `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SaturationPattern(Vec<Label>);

impl SaturationPattern {
    pub fn all_free(n: usize) -> Self {
        SaturationPattern(vec![Label::Free; n])
    }

    pub fn all_sat(n: usize) -> Self {
        SaturationPattern(vec![Label::FixedSat; n])
    }

    /// Fully fixed pattern with `unsat[i]` choosing the label of message `i`.
    pub fn from_unsat_mask(unsat: &[bool]) -> Self {
        SaturationPattern(
            unsat
                .iter()
                .map(|&u| if u { Label::FixedUnsat } else { Label::FixedSat })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, i: usize) -> Label {
        self.0[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn set(&mut self, i: usize, label: Label) {
        self.0[i] = label;
    }

    pub fn is_unsat(&self, i: usize) -> bool {
        self.0[i] != Label::FixedSat
    }

    pub fn unsat(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.is_unsat(i)).collect()
    }

    pub fn sat(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| !self.is_unsat(i)).collect()
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] == Label::Free).collect()
    }
}

impl fmt::Display for SaturationPattern {
    /// One character per message: `.` free, `u` fixed unsaturated, `s` saturated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Label::Free => ".",
                Label::FixedUnsat => "u",
                Label::FixedSat => "s",
            })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationCase {
    /// Every violating message is free, so they can all be moved to the
    /// saturated set.
    AllFree,
    /// Some violating message is fixed unsaturated: the subtree is dead.
    SomeFixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Test1 {
    Pass,
    Violation {
        indices: Vec<usize>,
        case: ViolationCase,
    },
}

/// Structural check of the unsaturated block `A_uu`.
///
/// Message `j` violates when its row of `A_uu` is zero, or when the row has
/// a single one at column `h` and some saturated message also reads `h`.
/// An empty unsaturated set passes trivially.
pub fn test1(rs: &RoutingSystem, pattern: &SaturationPattern) -> Test1 {
    let a = rs.routing();
    let mut indices = Vec::new();
    for j in pattern.unsat() {
        let mut in_unsat = a.row_support(j).filter(|&h| pattern.is_unsat(h));
        let violates = match (in_unsat.next(), in_unsat.next()) {
            (None, _) => true,
            (Some(h), None) => a.col_support(h).any(|i| !pattern.is_unsat(i)),
            _ => false,
        };
        if violates {
            indices.push(j);
        }
    }
    if indices.is_empty() {
        return Test1::Pass;
    }
    let case = if indices.iter().all(|&j| pattern.label(j) == Label::Free) {
        ViolationCase::AllFree
    } else {
        ViolationCase::SomeFixed
    };
    Test1::Violation { indices, case }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Test2 {
    Keep,
    Prune,
}

/// Bound propagation on the pattern's LP with `λ ≥ tau_so_far`: prunes when
/// no point of the box can match the incumbent.
pub fn test2<T: ExactScalar>(
    rs: &RoutingSystem,
    pattern: &SaturationPattern,
    tau_so_far: &T,
    lambda_max: &T,
) -> Result<Test2, LpError> {
    let lp = build_problem4(rs, pattern, lambda_max)?;
    let m1 = lp.num_vars();
    let mut l = vec![-T::one(); m1];
    let mut u = vec![T::one(); m1];
    l[0] = tau_so_far.clone();
    u[0] = lambda_max.clone();
    Ok(if tighten_bounds(&lp, &l, &u, default_sweeps(m1)).is_empty() {
        Test2::Prune
    } else {
        Test2::Keep
    })
}

/// Inner LP for one pattern: `Some((λ, x_u))` at the optimum, `None` if
/// infeasible. Also returns the pivot count.
pub fn solve_pattern<T: ExactScalar>(
    rs: &RoutingSystem,
    pattern: &SaturationPattern,
    lambda_max: &T,
) -> Result<(Option<(T, Vec<T>)>, usize), LpError> {
    let lp = build_problem4(rs, pattern, lambda_max)?;
    let out = simplex_max(&lp);
    let sol = match out.status {
        LpStatus::Optimal { value, mut point } => {
            point.remove(0);
            Some((value, point))
        }
        LpStatus::Infeasible => None,
    };
    Ok((sol, out.pivots))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes_visited: u64,
    pub lps_solved: u64,
    pub test1_prunes: u64,
    pub test2_prunes: u64,
    pub pivots: u64,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("the set has no internal messages")]
    NoMessages,
    #[error("{n} messages exceed the brute-force cap of {cap}")]
    TooManyMessages { n: usize, cap: usize },
    #[error("lambda_max {0} is below -1")]
    LambdaMaxTooSmall(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdResult<T> {
    /// `min(τ, lambda_max)`; a lower bound when `exhausted`.
    pub tau: T,
    pub witness_pattern: SaturationPattern,
    /// Optimal `λ` of the witness pattern's LP and the unsaturated messages,
    /// in increasing message order.
    pub witness_point: (T, Vec<T>),
    pub stats: SearchStats,
    pub lambda_max_used: T,
    /// The node budget ran out before the search finished.
    pub exhausted: bool,
}

impl<T: ExactScalar> ThresholdResult<T> {
    /// Full message vector of the witness: LP values on unsaturated
    /// messages, `+1` on saturated ones.
    pub fn witness_state(&self) -> Vec<T> {
        let mut x = vec![T::one(); self.witness_pattern.len()];
        for (v, i) in self.witness_point.1.iter().zip(self.witness_pattern.unsat()) {
            x[i] = v.clone();
        }
        x
    }
}
