use super::{
    solve_pattern, test1, test2, Label, SaturationPattern, SearchError, SearchStats, Test1,
    Test2, ThresholdResult, ViolationCase,
};
use crate::asgraph::RoutingSystem;
use crate::scalar::ExactScalar;

/// Largest `N` accepted by [`brute_force_threshold`] by default.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions<T> {
    pub lambda_max: T,
    pub test1: bool,
    pub test2: bool,
    /// Stop after visiting this many tree nodes (at least the root is visited).
    pub max_nodes: Option<u64>,
}

impl<T: ExactScalar> Default for SearchOptions<T> {
    fn default() -> Self {
        SearchOptions {
            lambda_max: T::one(),
            test1: true,
            test2: true,
            max_nodes: None,
        }
    }
}

impl<T: ExactScalar> SearchOptions<T> {
    pub fn with_lambda_max(lambda_max: T) -> Self {
        SearchOptions {
            lambda_max,
            ..Default::default()
        }
    }

    pub fn without_prunes(mut self) -> Self {
        self.test1 = false;
        self.test2 = false;
        self
    }
}

struct Best<T> {
    tau: T,
    witness: Option<(SaturationPattern, T, Vec<T>)>,
}

impl<T: ExactScalar> Best<T> {
    fn offer(&mut self, pattern: &SaturationPattern, lambda: T, x: Vec<T>) {
        if lambda > self.tau || self.witness.is_none() && lambda >= self.tau {
            self.tau = lambda.clone();
            self.witness = Some((pattern.clone(), lambda, x));
        }
    }

    fn into_result(self, stats: SearchStats, lambda_max: T, exhausted: bool) -> ThresholdResult<T> {
        let (witness_pattern, lam, x) = self
            .witness
            .expect("the all-unsaturated pattern always admits x = -1, λ = -1");
        ThresholdResult {
            tau: self.tau,
            witness_pattern,
            witness_point: (lam, x),
            stats,
            lambda_max_used: lambda_max,
            exhausted,
        }
    }
}

struct Search<'a, T> {
    rs: &'a RoutingSystem,
    opts: &'a SearchOptions<T>,
    row_weight: Vec<usize>,
    best: Best<T>,
    stats: SearchStats,
    exhausted: bool,
}

impl<T: ExactScalar> Search<'_, T> {
    fn visit(&mut self, mut pattern: SaturationPattern, needs_lp: bool) -> Result<(), SearchError> {
        if let Some(cap) = self.opts.max_nodes {
            if self.stats.nodes_visited >= cap.max(1) {
                self.exhausted = true;
                return Ok(());
            }
        }
        self.stats.nodes_visited += 1;
        if pattern.unsat().is_empty() {
            return Ok(());
        }
        if self.opts.test1 {
            match test1(self.rs, &pattern) {
                Test1::Pass => {}
                Test1::Violation {
                    case: ViolationCase::SomeFixed,
                    ..
                } => {
                    self.stats.test1_prunes += 1;
                    return Ok(());
                }
                Test1::Violation { indices, .. } => {
                    self.stats.test1_prunes += 1;
                    for j in indices {
                        pattern.set(j, Label::FixedSat);
                    }
                    // the unsaturated set shrank, so the LP must be solved
                    return self.visit(pattern, true);
                }
            }
        }

        if needs_lp {
            let keep = !self.opts.test2
                || test2(self.rs, &pattern, &self.best.tau, &self.opts.lambda_max)? == Test2::Keep;
            if keep {
                let (sol, pivots) = solve_pattern(self.rs, &pattern, &self.opts.lambda_max)?;
                self.stats.lps_solved += 1;
                self.stats.pivots += pivots as u64;
                if let Some((lambda, x)) = sol {
                    self.best.offer(&pattern, lambda, x);
                }
            } else {
                self.stats.test2_prunes += 1;
            }
        }

        let free = pattern.free();
        let Some(&branch) = free
            .iter()
            .max_by(|&&i, &&j| self.row_weight[i].cmp(&self.row_weight[j]).then(j.cmp(&i)))
        else {
            return Ok(());
        };
        let mut unsat_child = pattern.clone();
        unsat_child.set(branch, Label::FixedUnsat);
        self.visit(unsat_child, false)?;
        pattern.set(branch, Label::FixedSat);
        self.visit(pattern, true)
    }
}

fn check_inputs<T: ExactScalar>(rs: &RoutingSystem, lambda_max: &T) -> Result<(), SearchError> {
    if rs.n() == 0 {
        return Err(SearchError::NoMessages);
    }
    if *lambda_max < -T::one() {
        return Err(SearchError::LambdaMaxTooSmall(format!("{lambda_max:?}")));
    }
    Ok(())
}

/// Tree search over saturation patterns.
///
/// Starts from the all-free pattern. A node whose unsaturated block passes
/// [`test1`] solves its LP (unless [`test2`] rules it out or the parent had
/// the same unsaturated set) and branches on the free message with the
/// heaviest routing row, fixed-unsaturated child first. Violations by free
/// messages move them to the saturated set in one step; violations by fixed
/// messages end the branch.
pub fn compute_threshold<T: ExactScalar>(
    rs: &RoutingSystem,
    opts: &SearchOptions<T>,
) -> Result<ThresholdResult<T>, SearchError> {
    check_inputs(rs, &opts.lambda_max)?;
    let mut search = Search {
        rs,
        opts,
        row_weight: rs.routing().row_weights(),
        best: Best {
            tau: -T::one(),
            witness: None,
        },
        stats: SearchStats::default(),
        exhausted: false,
    };
    search.visit(SaturationPattern::all_free(rs.n()), true)?;
    let Search {
        best,
        stats,
        exhausted,
        ..
    } = search;
    Ok(best.into_result(stats, opts.lambda_max.clone(), exhausted))
}

/// Solves the LP of every nonempty unsaturated set and keeps the best.
/// Exponential in `N`; refuses sets with more than `cap` messages.
pub fn brute_force_threshold<T: ExactScalar>(
    rs: &RoutingSystem,
    lambda_max: &T,
    cap: usize,
) -> Result<ThresholdResult<T>, SearchError> {
    check_inputs(rs, lambda_max)?;
    let n = rs.n();
    if n > cap || n >= 64 {
        return Err(SearchError::TooManyMessages { n, cap });
    }
    let mut best = Best {
        tau: -T::one(),
        witness: None,
    };
    let mut stats = SearchStats::default();
    for mask in 1u64..(1u64 << n) {
        let unsat: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let pattern = SaturationPattern::from_unsat_mask(&unsat);
        let (sol, pivots) = solve_pattern(rs, &pattern, lambda_max)?;
        stats.nodes_visited += 1;
        stats.lps_solved += 1;
        stats.pivots += pivots as u64;
        if let Some((lambda, x)) = sol {
            best.offer(&pattern, lambda, x);
        }
    }
    Ok(best.into_result(stats, lambda_max.clone(), false))
}
