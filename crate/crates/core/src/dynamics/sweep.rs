//! Randomized and exhaustive trajectory sweeps over channel and initial
//! message configurations.
//!
//! Trials are independent: trial `t` draws from its own ChaCha stream
//! `(seed, t)`, so reports do not depend on how rayon splits the work.

use std::marker::PhantomData;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{run, ChannelVector, MessageState, Outcome, RunOptions};
use crate::asgraph::{RoutingSystem, SchedulePartition};
use crate::report::RationalJson;
use crate::scalar::{convert, ExactScalar, Scalar};
use crate::Rational;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("channel saturation level {0} is outside (0, 1]")]
    LchOutOfRange(Rational),
    #[error("cannot puncture {punctured} of {a} VNs: at least one must remain")]
    TooManyPunctured { punctured: usize, a: usize },
    #[error("punctured VN {0} out of range")]
    BadPuncture(usize),
    #[error("puncturing check needs a negative threshold, got {0}")]
    NonNegativeThreshold(Rational),
    #[error("value {0} does not fit the sweep scalar type")]
    Overflow(Rational),
    #[error("probe has {got} channel values, expected {expected}")]
    ProbeLength { expected: usize, got: usize },
    #[error("corner grid of {0} messages is too large")]
    GridTooLarge(usize),
}

/// How initial message states are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialStates {
    /// `trials` states with entries uniform on `{-1, 0, 1}`.
    Sampled { trials: u64 },
    /// Every corner of `{-1, 1}^N`, one trajectory each.
    Corners,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub init: InitialStates,
    pub seed: u64,
    pub run: RunOptions,
    /// Spacing of the channel value grid.
    pub channel_step: Rational,
    /// Channel vectors always run from the all-wrong start `x0 = -1`.
    pub probes: Vec<Vec<Rational>>,
}

impl SweepConfig {
    pub fn sampled(trials: u64, seed: u64) -> Self {
        SweepConfig {
            init: InitialStates::Sampled { trials },
            seed,
            run: RunOptions::default(),
            channel_step: Rational::new(1.into(), 16.into()),
            probes: Vec::new(),
        }
    }

    pub fn corners() -> Self {
        SweepConfig {
            init: InitialStates::Corners,
            ..SweepConfig::sampled(0, 0)
        }
    }

    pub fn with_probe(mut self, lambda: Vec<Rational>) -> Self {
        self.probes.push(lambda);
        self
    }
}

/// Channel values of the non-punctured VNs in a puncturing check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RestChannel {
    Fixed(Rational),
    /// Grid values strictly above the threshold, up to `hi`.
    AboveThreshold { hi: Rational },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub converged: u64,
    pub equilibrium: u64,
    pub cycle: u64,
    pub budget: u64,
}

impl OutcomeCounts {
    fn record<T>(&mut self, o: &Outcome<T>) {
        match o {
            Outcome::ConvergedAllOnes => self.converged += 1,
            Outcome::Equilibrium(_) => self.equilibrium += 1,
            Outcome::LimitCycle { .. } => self.cycle += 1,
            Outcome::BudgetExhausted(_) => self.budget += 1,
        }
    }

    fn merge(mut self, o: OutcomeCounts) -> Self {
        self.converged += o.converged;
        self.equilibrium += o.equilibrium;
        self.cycle += o.cycle;
        self.budget += o.budget;
        self
    }

    pub fn total(&self) -> u64 {
        self.converged + self.equilibrium + self.cycle + self.budget
    }

    /// Trajectories that did not reach all-ones.
    pub fn failures(&self) -> u64 {
        self.equilibrium + self.cycle + self.budget
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeOutcome {
    pub lambda: Vec<RationalJson>,
    pub outcome: &'static str,
    pub iterations: usize,
    /// Final state for equilibria, so the caller can re-check it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<RationalJson>>,
}

/// Aggregate of a sweep. Probe outcomes are reported separately and are not
/// part of `outcomes`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub as_name: String,
    pub tau: RationalJson,
    pub lch: RationalJson,
    pub trials: u64,
    pub outcomes: OutcomeCounts,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub punctured: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<ProbeOutcome>,
}

impl SweepReport {
    pub fn failures(&self) -> u64 {
        self.outcomes.failures()
    }

    /// The threshold is negative and the channel saturation sits strictly
    /// below its magnitude, so every trajectory must converge.
    pub fn guarantee_applies(&self) -> bool {
        let tau = self.tau.to_rational();
        let lch = self.lch.to_rational();
        tau.is_negative() && lch < -tau
    }
}

fn to_t<T: ExactScalar>(v: &Rational) -> Result<T, SweepError> {
    convert::<Rational, T>(v).ok_or_else(|| SweepError::Overflow(v.clone()))
}

/// Grid `lo, lo + step, ...` up to `hi`, always including `hi`.
fn grid<T: Scalar>(lo: &T, hi: &T, step: &T) -> Vec<T> {
    let mut out = Vec::new();
    let mut v = lo.clone();
    while v < *hi {
        out.push(v.clone());
        v = v + step.clone();
    }
    out.push(hi.clone());
    out
}

struct Sampler<T> {
    /// Channel values per VN; a single entry means the value is fixed.
    channel: Vec<Vec<T>>,
    punctured: Vec<usize>,
    init: InitialStates,
    n: usize,
    _t: PhantomData<T>,
}

impl<T: ExactScalar> Sampler<T> {
    fn trial(&self, seed: u64, t: u64) -> (MessageState<T>, ChannelVector<T>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let x0 = match self.init {
            InitialStates::Sampled { .. } => MessageState::saturating(
                (0..self.n)
                    .map(|_| T::from_int(rng.gen_range(-1..=1)))
                    .collect(),
            ),
            InitialStates::Corners => MessageState::saturating(
                (0..self.n)
                    .map(|j| if (t >> j) & 1 == 1 { T::one() } else { -T::one() })
                    .collect(),
            ),
        };
        let lambda = self
            .channel
            .iter()
            .map(|choices| choices[rng.gen_range(0..choices.len())].clone())
            .collect();
        let ch = ChannelVector::new(lambda)
            .punctured(&self.punctured)
            .expect("puncture set validated");
        (x0, ch)
    }

    fn trials(&self) -> Result<u64, SweepError> {
        match self.init {
            InitialStates::Sampled { trials } => Ok(trials),
            InitialStates::Corners if self.n < 40 => Ok(1u64 << self.n),
            InitialStates::Corners => Err(SweepError::GridTooLarge(self.n)),
        }
    }
}

fn sweep_counts<T: ExactScalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    sampler: &Sampler<T>,
    cfg: &SweepConfig,
) -> Result<(u64, OutcomeCounts), SweepError> {
    let trials = sampler.trials()?;
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (x0, ch) = sampler.trial(cfg.seed, t);
            let r = run(rs, sp, &x0, &ch, &cfg.run).expect("dimensions match");
            let mut c = OutcomeCounts::default();
            c.record(&r.outcome);
            c
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::merge);
    Ok((trials, counts))
}

fn run_probes<T: ExactScalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    cfg: &SweepConfig,
) -> Result<Vec<ProbeOutcome>, SweepError> {
    cfg.probes
        .iter()
        .map(|lambda| {
            let lam: Vec<T> = lambda.iter().map(to_t).collect::<Result<_, _>>()?;
            if lam.len() != rs.a() {
                return Err(SweepError::ProbeLength {
                    expected: rs.a(),
                    got: lam.len(),
                });
            }
            let ch = ChannelVector::new(lam);
            let r = run(rs, sp, &MessageState::minus_ones(rs.n()), &ch, &cfg.run)
                .expect("dimensions checked");
            let (outcome, state) = match &r.outcome {
                Outcome::ConvergedAllOnes => ("converged", None),
                Outcome::Equilibrium(x) => ("equilibrium", Some(x)),
                Outcome::LimitCycle { .. } => ("cycle", None),
                Outcome::BudgetExhausted(_) => ("budget", None),
            };
            Ok(ProbeOutcome {
                lambda: ch.as_slice().iter().map(|v| RationalJson::from(&v.to_big())).collect(),
                outcome,
                iterations: r.iterations,
                state: state.map(|x| {
                    x.as_slice()
                        .iter()
                        .map(|v| RationalJson::from(&v.to_big()))
                        .collect()
                }),
            })
        })
        .collect()
}

/// Samples channel vectors from the grid on `[-lch, lch]` and initial states
/// per `cfg.init`, and tallies trajectory outcomes.
///
/// `T` is the exact scalar the trajectories run in; `Ratio<i64>` is plenty
/// since the dynamics never grow denominators beyond those of the inputs.
pub fn lch_sweep<T: ExactScalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    tau: &Rational,
    lch: &Rational,
    cfg: &SweepConfig,
) -> Result<SweepReport, SweepError> {
    if !lch.is_positive() || *lch > Rational::one() {
        return Err(SweepError::LchOutOfRange(lch.clone()));
    }
    let hi: T = to_t(lch)?;
    let step: T = to_t(&cfg.channel_step)?;
    let values = grid(&-hi.clone(), &hi, &step);
    let sampler = Sampler {
        channel: vec![values; rs.a()],
        punctured: Vec::new(),
        init: cfg.init,
        n: rs.n(),
        _t: PhantomData,
    };
    let (trials, outcomes) = sweep_counts(rs, sp, &sampler, cfg)?;
    Ok(SweepReport {
        as_name: rs.name().to_string(),
        tau: tau.into(),
        lch: lch.into(),
        trials,
        outcomes,
        seed: cfg.seed,
        punctured: Vec::new(),
        probes: run_probes::<T>(rs, sp, cfg)?,
    })
}

/// Runs trajectories with the VNs in `punctured` pinned at zero channel
/// value and the remaining ones per `rest`.
///
/// With `tau < 0`, at least one VN left unpunctured and every remaining
/// value above `tau`, no trajectory may fail.
pub fn puncture_check<T: ExactScalar>(
    rs: &RoutingSystem,
    sp: &SchedulePartition,
    tau: &Rational,
    punctured: &[usize],
    rest: &RestChannel,
    cfg: &SweepConfig,
) -> Result<SweepReport, SweepError> {
    if punctured.len() >= rs.a() {
        return Err(SweepError::TooManyPunctured {
            punctured: punctured.len(),
            a: rs.a(),
        });
    }
    if let Some(&vn) = punctured.iter().find(|&&v| v >= rs.a()) {
        return Err(SweepError::BadPuncture(vn));
    }
    if !tau.is_negative() {
        return Err(SweepError::NonNegativeThreshold(tau.clone()));
    }
    let (values, lch) = match rest {
        RestChannel::Fixed(v) => (vec![to_t::<T>(v)?], v.abs()),
        RestChannel::AboveThreshold { hi } => {
            let step: T = to_t(&cfg.channel_step)?;
            let lo = to_t::<T>(tau)? + step.clone();
            let hi_t: T = to_t(hi)?;
            if lo > hi_t {
                (vec![hi_t], hi.abs())
            } else {
                (grid(&lo, &hi_t, &step), hi.abs().max(tau.abs()))
            }
        }
    };
    let mut sorted = punctured.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let sampler = Sampler {
        channel: vec![values; rs.a()],
        punctured: sorted.clone(),
        init: cfg.init,
        n: rs.n(),
        _t: PhantomData,
    };
    let (trials, outcomes) = sweep_counts(rs, sp, &sampler, cfg)?;
    Ok(SweepReport {
        as_name: rs.name().to_string(),
        tau: tau.into(),
        lch: (&lch).into(),
        trials,
        outcomes,
        seed: cfg.seed,
        punctured: sorted,
        probes: Vec::new(),
    })
}
