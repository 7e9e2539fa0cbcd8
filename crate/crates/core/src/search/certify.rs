//! Turning a threshold into an explicit equilibrium, and checking that
//! nothing bad survives just above it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::ThresholdResult;
use crate::asgraph::{schedule_partition, RoutingSystem, Schedule};
use crate::dynamics::{
    is_bad, is_equilibrium, monotone_descent, run, ChannelVector, MessageState, Outcome,
    RunOptions,
};
use crate::scalar::ExactScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyOptions<T> {
    /// Gap above the threshold for the convergence check.
    pub epsilon: T,
    /// Extra random `{-1, 1}` starts at `τ + ε`, on top of the all-wrong start.
    pub corner_trials: u64,
    pub seed: u64,
    pub max_iters: usize,
}

impl<T: ExactScalar> Default for CertifyOptions<T> {
    fn default() -> Self {
        CertifyOptions {
            epsilon: T::ratio(1, 64),
            corner_trials: 32,
            seed: 0,
            max_iters: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate<T> {
    pub tau: T,
    /// Equilibrium at `λ = τ·1` with at least one message below `+1`.
    pub equilibrium: MessageState<T>,
    pub start: MessageState<T>,
    pub descent_steps: usize,
    /// `(λ, iterations)` of the convergence run from `x = -1` above `τ`.
    /// `None` when `τ` equals `lambda_max`, where there is no room above.
    pub above: Option<(T, usize)>,
    pub corners_checked: u64,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("descent from the witness did not settle monotonically")]
    DescentFailed,
    #[error("descent ended at a state that is not an equilibrium")]
    NotEquilibrium,
    #[error("descent ended at the all-ones state")]
    NotBad,
    #[error("a bad trajectory survives at λ = {lambda} ({what})")]
    BadAboveThreshold { lambda: String, what: &'static str },
    #[error("threshold result was cut short by the node budget")]
    Exhausted,
}

/// Rebuilds an equilibrium at the reported threshold and checks the
/// dynamics just above it.
///
/// The witness state (LP values, `+1` on saturated messages) is a
/// super-solution of the dynamics at `λ = τ·1`, so iterating from it
/// decreases monotonically into an equilibrium below it. Above the
/// threshold the all-wrong start `x = -1` bounds every other start from
/// below, so it converging to all-ones rules out bad equilibria there.
pub fn certify_threshold<T: ExactScalar>(
    rs: &RoutingSystem,
    result: &ThresholdResult<T>,
    opts: &CertifyOptions<T>,
) -> Result<Certificate<T>, CertifyError> {
    if result.exhausted {
        return Err(CertifyError::Exhausted);
    }
    let sp = schedule_partition(rs, &Schedule::Parallel).expect("parallel schedule");
    let tau = result.tau.clone();
    let ch = ChannelVector::uniform(rs.a(), tau.clone());

    let mut start = MessageState::saturating(result.witness_state());
    if start.is_all_ones() {
        start = MessageState::minus_ones(rs.n());
    }
    let (equilibrium, descent_steps) =
        monotone_descent(rs, &sp, &start, &ch, opts.max_iters).ok_or(CertifyError::DescentFailed)?;
    if !is_equilibrium(rs, &equilibrium, &ch) {
        return Err(CertifyError::NotEquilibrium);
    }
    if !is_bad(&equilibrium) {
        return Err(CertifyError::NotBad);
    }

    let mut above = None;
    let mut corners_checked = 0;
    if tau < result.lambda_max_used {
        let mut lam = tau.clone() + opts.epsilon.clone();
        if lam > result.lambda_max_used {
            lam = result.lambda_max_used.clone();
        }
        let ch_up = ChannelVector::uniform(rs.a(), lam.clone());
        let run_opts = RunOptions::with_max_iters(opts.max_iters);
        let fail = |what| CertifyError::BadAboveThreshold {
            lambda: format!("{lam:?}"),
            what,
        };
        let low = run(rs, &sp, &MessageState::minus_ones(rs.n()), &ch_up, &run_opts)
            .expect("dimensions match");
        match low.outcome {
            Outcome::ConvergedAllOnes => {}
            Outcome::Equilibrium(_) => return Err(fail("equilibrium from x = -1")),
            _ => return Err(fail("no convergence from x = -1")),
        }
        above = Some((lam.clone(), low.iterations));
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.corner_trials {
            let x0 = MessageState::saturating(
                (0..rs.n())
                    .map(|_| if rng.gen::<bool>() { T::one() } else { -T::one() })
                    .collect(),
            );
            let r = run(rs, &sp, &x0, &ch_up, &run_opts).expect("dimensions match");
            if !r.converged() {
                return Err(fail("random corner start"));
            }
            corners_checked += 1;
        }
    }

    Ok(Certificate {
        tau,
        equilibrium,
        start,
        descent_steps,
        above,
        corners_checked,
    })
}
