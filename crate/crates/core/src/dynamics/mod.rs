//! Saturated message evolution inside an absorbing set.
//!
//! With every message entering the set from outside pinned at the correct
//! saturated value `+1`, one decoding iteration reads
//!
//! ```text
//! x' = sat(A (x - 1) + 2·1 + R λ)
//! ```
//!
//! for the parallel schedule; sequential schedules evaluate the same rows in
//! check-node order, reading already refreshed values through `A̲`.

mod sweep;

use std::collections::HashMap;

use num_traits::One;
use thiserror::Error;

use crate::asgraph::{RoutingSystem, SchedulePartition};
use crate::scalar::{ExactScalar, Scalar};

pub use sweep::{
    lch_sweep, puncture_check, InitialStates, OutcomeCounts, ProbeOutcome, RestChannel,
    SweepConfig, SweepError, SweepReport,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("{what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("message {index} is outside [-1, 1]")]
    OutOfRange { index: usize },
    #[error("punctured VN {vn} out of range")]
    BadPuncture { vn: usize },
}

/// Vector of the `N` internal extrinsic messages, each in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MessageState<T>(Vec<T>);

impl<T: Scalar> MessageState<T> {
    /// Rejects entries outside `[-1, 1]`.
    pub fn new(x: Vec<T>) -> Result<Self, DynamicsError> {
        let one = T::one();
        if let Some(index) = x.iter().position(|v| *v > one || *v < -one.clone()) {
            return Err(DynamicsError::OutOfRange { index });
        }
        Ok(MessageState(x))
    }

    /// Saturates every entry into `[-1, 1]`.
    pub fn saturating(x: Vec<T>) -> Self {
        MessageState(x.into_iter().map(Scalar::sat).collect())
    }

    pub fn constant(n: usize, v: T) -> Self {
        MessageState::saturating(vec![v; n])
    }

    pub fn ones(n: usize) -> Self {
        MessageState(vec![T::one(); n])
    }

    pub fn minus_ones(n: usize) -> Self {
        MessageState(vec![-T::one(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(One::is_one)
    }

    /// Elementwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Channel LLRs of the `a` variable nodes, clamped to `[-1, 1]`, with
/// punctured VNs pinned at zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChannelVector<T> {
    lambda: Vec<T>,
    punctured: Vec<bool>,
}

impl<T: Scalar> ChannelVector<T> {
    pub fn new(lambda: Vec<T>) -> Self {
        let punctured = vec![false; lambda.len()];
        ChannelVector {
            lambda: lambda.into_iter().map(Scalar::sat).collect(),
            punctured,
        }
    }

    pub fn uniform(a: usize, v: T) -> Self {
        ChannelVector::new(vec![v; a])
    }

    /// Skips the `[-1, 1]` clamp. Only meant for probing the `λ > 1` regime.
    pub fn unclamped(lambda: Vec<T>) -> Self {
        let punctured = vec![false; lambda.len()];
        ChannelVector { lambda, punctured }
    }

    /// Zeroes the channel value of every VN in `vns`.
    pub fn punctured(mut self, vns: &[usize]) -> Result<Self, DynamicsError> {
        for &vn in vns {
            if vn >= self.lambda.len() {
                return Err(DynamicsError::BadPuncture { vn });
            }
            self.punctured[vn] = true;
            self.lambda[vn] = T::zero();
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.lambda
    }

    pub fn is_punctured(&self, vn: usize) -> bool {
        self.punctured[vn]
    }

    pub fn min(&self) -> Option<T> {
        self.lambda.iter().cloned().reduce(T::min_of)
    }
}

fn check_dims<T>(
    rs: &RoutingSystem,
    x: &MessageState<T>,
    ch: &ChannelVector<T>,
) -> Result<(), DynamicsError> {
    if x.0.len() != rs.n() {
        return Err(DynamicsError::DimensionMismatch {
            what: "message state",
            expected: rs.n(),
            got: x.0.len(),
        });
    }
    if ch.lambda.len() != rs.a() {
        return Err(DynamicsError::DimensionMismatch {
            what: "channel vector",
            expected: rs.a(),
            got: ch.lambda.len(),
        });
    }
    Ok(())
}

/// Pre-saturation value of message `i` given the values it reads.
#[inline]
fn drive<T: Scalar>(rs: &RoutingSystem, i: usize, reads: impl Iterator<Item = T>, lambda: &[T]) -> T {
    let one = T::one();
    let mut acc = T::from_int(2) + lambda[rs.source_vn(i)].clone();
    for v in reads {
        acc = acc + v - one.clone();
    }
    acc
}

/// One decoding iteration under the schedule described by `sp`.
pub fn step<T: Scalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    x: &MessageState<T>,
    ch: &ChannelVector<T>,
) -> Result<MessageState<T>, DynamicsError> {
    check_dims(rs, x, ch)?;
    if sp.n() != rs.n() {
        return Err(DynamicsError::DimensionMismatch {
            what: "schedule partition",
            expected: rs.n(),
            got: sp.n(),
        });
    }
    Ok(step_unchecked(rs, sp, x, ch))
}

pub(crate) fn step_unchecked<T: Scalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    x: &MessageState<T>,
    ch: &ChannelVector<T>,
) -> MessageState<T> {
    let old = &x.0;
    if sp.is_parallel() {
        let next = (0..rs.n())
            .map(|i| drive(rs, i, rs.inputs(i).iter().map(|&j| old[j].clone()), &ch.lambda).sat())
            .collect();
        return MessageState(next);
    }
    let mut next = old.clone();
    for group in sp.groups() {
        // messages of one CN never read each other, so in-group order is irrelevant
        for &i in group {
            let reads = sp
                .bar_inputs(i)
                .iter()
                .map(|&j| old[j].clone())
                .chain(sp.under_inputs(i).iter().map(|&j| next[j].clone()));
            let v = drive(rs, i, reads, &ch.lambda).sat();
            next[i] = v;
        }
    }
    MessageState(next)
}

/// Parallel one-step update, `sat(A(x-1) + 2·1 + Rλ)`.
pub fn step_parallel<T: Scalar>(
    rs: &RoutingSystem,
    x: &MessageState<T>,
    ch: &ChannelVector<T>,
) -> Result<MessageState<T>, DynamicsError> {
    check_dims(rs, x, ch)?;
    let old = &x.0;
    Ok(MessageState(
        (0..rs.n())
            .map(|i| drive(rs, i, rs.inputs(i).iter().map(|&j| old[j].clone()), &ch.lambda).sat())
            .collect(),
    ))
}

/// `true` iff `(x, λ)` is an equilibrium: one parallel step returns `x` exactly.
/// Dimension mismatches are simply not equilibria.
pub fn is_equilibrium<T: Scalar>(rs: &RoutingSystem, x: &MessageState<T>, ch: &ChannelVector<T>) -> bool {
    step_parallel(rs, x, ch).is_ok_and(|next| next == *x)
}

/// Fixed-point test under an arbitrary schedule.
pub fn is_fixed_point<T: Scalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    x: &MessageState<T>,
    ch: &ChannelVector<T>,
) -> bool {
    step(rs, sp, x, ch).is_ok_and(|next| next == *x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_iters: usize,
    /// Most distinct states remembered for cycle detection.
    pub state_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_iters: 200,
            state_cap: 1_000_000,
        }
    }
}

impl RunOptions {
    pub fn with_max_iters(max_iters: usize) -> Self {
        RunOptions {
            max_iters,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    ConvergedAllOnes,
    Equilibrium(MessageState<T>),
    /// States of one period, starting from the first repeated state.
    LimitCycle {
        period: usize,
        states: Vec<MessageState<T>>,
    },
    BudgetExhausted(MessageState<T>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryResult<T> {
    pub outcome: Outcome<T>,
    /// Number of iterations performed.
    pub iterations: usize,
}

impl<T> TrajectoryResult<T> {
    pub fn converged(&self) -> bool {
        matches!(self.outcome, Outcome::ConvergedAllOnes)
    }
}

/// Iterates the dynamics from `x0` until all-ones, an equilibrium, a
/// repeated state, or the budget.
pub fn run<T: ExactScalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    x0: &MessageState<T>,
    ch: &ChannelVector<T>,
    opts: &RunOptions,
) -> Result<TrajectoryResult<T>, DynamicsError> {
    check_dims(rs, x0, ch)?;
    if x0.is_all_ones() {
        return Ok(TrajectoryResult {
            outcome: Outcome::ConvergedAllOnes,
            iterations: 0,
        });
    }
    let mut seen: HashMap<MessageState<T>, usize> = HashMap::new();
    let mut trail: Vec<MessageState<T>> = Vec::new();
    let mut x = x0.clone();
    seen.insert(x.clone(), 0);
    trail.push(x.clone());

    for k in 1..=opts.max_iters {
        let next = step_unchecked(rs, sp, &x, ch);
        if next.is_all_ones() {
            return Ok(TrajectoryResult {
                outcome: Outcome::ConvergedAllOnes,
                iterations: k,
            });
        }
        if next == x {
            return Ok(TrajectoryResult {
                outcome: Outcome::Equilibrium(next),
                iterations: k,
            });
        }
        if let Some(&first) = seen.get(&next) {
            return Ok(TrajectoryResult {
                outcome: Outcome::LimitCycle {
                    period: k - first,
                    states: trail[first..].to_vec(),
                },
                iterations: k,
            });
        }
        if seen.len() >= opts.state_cap {
            return Ok(TrajectoryResult {
                outcome: Outcome::BudgetExhausted(next),
                iterations: k,
            });
        }
        seen.insert(next.clone(), k);
        trail.push(next.clone());
        x = next;
    }
    Ok(TrajectoryResult {
        outcome: Outcome::BudgetExhausted(x),
        iterations: opts.max_iters,
    })
}

/// Iterates from `x0` while the state keeps decreasing elementwise and
/// returns the fixed point it settles on.
///
/// Returns `None` if some step increases an entry (the start was not a
/// super-solution) or the iteration budget runs out.
pub fn monotone_descent<T: Scalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    x0: &MessageState<T>,
    ch: &ChannelVector<T>,
    max_iters: usize,
) -> Option<(MessageState<T>, usize)> {
    check_dims(rs, x0, ch).ok()?;
    let mut x = x0.clone();
    for k in 0..max_iters {
        let next = step_unchecked(rs, sp, &x, ch);
        if !next.le(&x) {
            return None;
        }
        if next == x {
            return Some((x, k));
        }
        x = next;
    }
    None
}

/// `true` iff some message is strictly below one.
pub fn is_bad<T: Scalar>(x: &MessageState<T>) -> bool {
    x.0.iter().any(|v| *v < T::one())
}

#[cfg(test)]
mod tests;
