use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::asgraph::{schedule_partition, Schedule};
use crate::catalog::routing;
use crate::{Rational, Rational64};

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn parallel(rs: &RoutingSystem) -> SchedulePartition {
    schedule_partition(rs, &Schedule::Parallel).unwrap()
}

/// `sat(A(x-1) + 2 + Rλ)` straight from the two matrices.
fn reference_step(rs: &RoutingSystem, x: &[Rational64], lambda: &[Rational64]) -> Vec<Rational64> {
    let a = rs.routing();
    let r = rs.repetition();
    (0..rs.n())
        .map(|i| {
            let mut acc = q(2, 1);
            for j in 0..rs.n() {
                if a.get(i, j) {
                    acc += x[j] - q(1, 1);
                }
            }
            for v in 0..rs.a() {
                if r.get(i, v) {
                    acc += lambda[v];
                }
            }
            acc.sat()
        })
        .collect()
}

#[test]
fn maximal_set_holds_all_wrong_state() {
    let rs = routing("as_4_4");
    let x = MessageState::<Rational64>::minus_ones(rs.n());
    let ch = ChannelVector::uniform(rs.a(), q(-1, 1));
    assert!(is_equilibrium(&rs, &x, &ch));
    assert!(is_bad(&x));
}

#[test]
fn codeword_support_fixed_points() {
    let rs = routing("as_4_0");
    let ch = ChannelVector::uniform(rs.a(), q(1, 1));
    let wrong = MessageState::<Rational64>::minus_ones(rs.n());
    assert!(is_equilibrium(&rs, &wrong, &ch));
    assert!(is_equilibrium(&rs, &MessageState::ones(rs.n()), &ch));
}

#[test]
fn as_5_3_from_zero_state() {
    let rs = routing("as_5_3");
    let x = MessageState::constant(rs.n(), q(0, 1));
    let ch = ChannelVector::uniform(rs.a(), q(0, 1));
    let next = step(&rs, &parallel(&rs), &x, &ch).unwrap();
    let expected: Vec<Rational64> = [0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1, 1]
        .iter()
        .map(|&v| q(v, 1))
        .collect();
    assert_eq!(next.as_slice(), &expected[..]);
}

#[test]
fn maximal_set_escapes_above_minus_one() {
    let rs = routing("as_4_4");
    let ch = ChannelVector::uniform(rs.a(), q(-1, 2));
    let r = run(
        &rs,
        &parallel(&rs),
        &MessageState::minus_ones(rs.n()),
        &ch,
        &RunOptions::default(),
    )
    .unwrap();
    assert!(r.converged());
    assert!(r.iterations <= 4, "took {}", r.iterations);
}

#[test]
fn all_ones_start_is_immediately_converged() {
    let rs = routing("as_5_3");
    let ch = ChannelVector::uniform(rs.a(), q(-1, 1));
    let r = run(&rs, &parallel(&rs), &MessageState::ones(rs.n()), &ch, &RunOptions::default()).unwrap();
    assert_eq!(r.iterations, 0);
    assert!(r.converged());
}

#[test]
fn dimension_errors() {
    let rs = routing("as_5_3");
    let sp = parallel(&rs);
    let short = MessageState::<Rational64>::minus_ones(3);
    let ch = ChannelVector::uniform(rs.a(), q(0, 1));
    assert!(matches!(
        step(&rs, &sp, &short, &ch),
        Err(DynamicsError::DimensionMismatch { what: "message state", .. })
    ));
    assert_eq!(
        MessageState::new(vec![q(3, 2)]),
        Err(DynamicsError::OutOfRange { index: 0 })
    );
    assert!(ChannelVector::uniform(2, q(0, 1)).punctured(&[2]).is_err());
}

#[test]
fn float_and_exact_steps_agree_on_dyadic_inputs() {
    let rs = routing("as_5_3");
    let sp = parallel(&rs);
    let xs: Vec<i64> = vec![-4, 3, 0, 1, -2, 4, 2, -1, 0, 3, -3, 1];
    let xe = MessageState::new(xs.iter().map(|&v| q(v, 4)).collect()).unwrap();
    let xf = MessageState::new(xs.iter().map(|&v| v as f64 / 4.0).collect()).unwrap();
    let le = ChannelVector::uniform(rs.a(), q(-3, 8));
    let lf = ChannelVector::uniform(rs.a(), -0.375);
    let e = step(&rs, &sp, &xe, &le).unwrap();
    let f = step(&rs, &sp, &xf, &lf).unwrap();
    for (a, b) in e.as_slice().iter().zip(f.as_slice()) {
        assert_eq!(a.to_f64_lossy(), *b);
    }
}

#[test]
fn big_and_small_rationals_agree() {
    let rs = routing("as_6_4");
    let sp = schedule_partition(&rs, &Schedule::natural(&rs)).unwrap();
    let x: Vec<Rational64> = (0..rs.n() as i64).map(|i| q(i % 5 - 2, 3)).collect();
    let lam: Vec<Rational64> = (0..rs.a() as i64).map(|v| q(v - 3, 7)).collect();
    let small = step(&rs, &sp, &MessageState::new(x.clone()).unwrap(), &ChannelVector::new(lam.clone())).unwrap();
    let xb: Vec<Rational> = x.iter().map(ExactScalar::to_big).collect();
    let lb: Vec<Rational> = lam.iter().map(ExactScalar::to_big).collect();
    let big = step(&rs, &sp, &MessageState::new(xb).unwrap(), &ChannelVector::new(lb)).unwrap();
    let back: Vec<Rational> = small.as_slice().iter().map(ExactScalar::to_big).collect();
    assert_eq!(back, big.into_inner());
}

#[test]
fn sequential_schedule_reads_fresh_values() {
    // One sequential sweep from x = -1 at λ = 1 on the (4,4) ring: the
    // first CN only sees stale inputs, later CNs see refreshed ones.
    let rs = routing("as_4_4");
    let sp = schedule_partition(&rs, &Schedule::natural(&rs)).unwrap();
    let x = MessageState::<Rational64>::minus_ones(rs.n());
    let ch = ChannelVector::uniform(rs.a(), q(1, 2));
    let seq = step(&rs, &sp, &x, &ch).unwrap();
    let par = step(&rs, &parallel(&rs), &x, &ch).unwrap();
    assert!(par.le(&seq));
    assert_ne!(par, seq);
    assert!(!is_equilibrium(&rs, &seq, &ch) || seq.is_all_ones());
}

#[test]
fn punctured_vn_reads_zero() {
    let rs = routing("as_5_3");
    let ch = ChannelVector::uniform(rs.a(), q(1, 2)).punctured(&[1]).unwrap();
    assert!(ch.is_punctured(1));
    assert_eq!(ch.as_slice()[1], Rational64::zero());
    assert_eq!(ch.min(), Some(Rational64::zero()));
}

#[test]
fn limit_cycles_are_reported_with_their_period() {
    // theta graph: at λ = 0 the parity-flipped state oscillates
    let spec = crate::AbsorbingSetSpec::new("theta", 2, vec![vec![0, 1]; 3], None).unwrap();
    let rs = crate::build_routing(&spec).unwrap();
    let sp = parallel(&rs);
    let ch = ChannelVector::uniform(2, q(-1, 1));
    let x0 = MessageState::new(vec![q(1, 1), q(1, 1), q(1, 1), q(-1, 1), q(-1, 1), q(-1, 1)]).unwrap();
    let r = run(&rs, &sp, &x0, &ch, &RunOptions::default()).unwrap();
    match r.outcome {
        Outcome::LimitCycle { period, states } => {
            assert_eq!(period, 2);
            assert_eq!(states.len(), 2);
        }
        other => panic!("expected a cycle, got {other:?}"),
    }
}

#[test]
fn monotone_descent_refuses_non_supersolutions() {
    let rs = routing("as_4_4");
    let ch = ChannelVector::uniform(rs.a(), q(1, 1));
    let start = MessageState::<Rational64>::minus_ones(rs.n());
    assert_eq!(monotone_descent(&rs, &parallel(&rs), &start, &ch, 100), None);
    let top = MessageState::ones(rs.n());
    let (fixed, steps) = monotone_descent(&rs, &parallel(&rs), &top, &ch, 100).unwrap();
    assert!(fixed.is_all_ones());
    assert_eq!(steps, 0);
}

fn small_rational() -> impl Strategy<Value = Rational64> {
    (-8i64..=8).prop_map(|v| q(v, 8))
}

fn fixture_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["as_4_4", "as_5_3", "as_4_0", "as_6_4", "as_7_3"])
}

proptest! {
    #[test]
    fn parallel_step_matches_matrix_form(
        name in fixture_name(),
        xs in prop::collection::vec(small_rational(), 32),
        ls in prop::collection::vec(small_rational(), 8),
    ) {
        let rs = routing(name);
        let x = MessageState::new(xs[..rs.n()].to_vec()).unwrap();
        let ch = ChannelVector::new(ls[..rs.a()].to_vec());
        let got = step_parallel(&rs, &x, &ch).unwrap();
        prop_assert_eq!(got.as_slice(), &reference_step(&rs, x.as_slice(), ch.as_slice())[..]);
    }

    #[test]
    fn steps_saturate_and_are_monotone(
        name in fixture_name(),
        xs in prop::collection::vec(small_rational(), 32),
        bump in prop::collection::vec(0i64..=4, 32),
        ls in prop::collection::vec(small_rational(), 8),
        sequential in any::<bool>(),
    ) {
        let rs = routing(name);
        let sched = if sequential { Schedule::natural(&rs) } else { Schedule::Parallel };
        let sp = schedule_partition(&rs, &sched).unwrap();
        let x = MessageState::new(xs[..rs.n()].to_vec()).unwrap();
        let y = MessageState::saturating(
            x.as_slice().iter().zip(&bump).map(|(v, b)| *v + q(*b, 4)).collect(),
        );
        prop_assert!(x.le(&y));
        let ch = ChannelVector::new(ls[..rs.a()].to_vec());
        let fx = step(&rs, &sp, &x, &ch).unwrap();
        let fy = step(&rs, &sp, &y, &ch).unwrap();
        prop_assert!(fx.le(&fy));
        let one = Rational64::one();
        prop_assert!(fx.as_slice().iter().all(|v| *v <= one && *v >= -one));
    }
}
