//! Exact thresholds of elementary absorbing sets of left-regular LDPC codes
//! under saturated Min-Sum decoding.
//!
//! The pipeline is: parse a topology ([`asgraph`]), compile its routing
//! system, then either simulate the saturated message dynamics
//! ([`dynamics`]) or compute the threshold `τ` exactly ([`search`], built on
//! the rational LP kernel in [`ratlp`]).
//!
//! ```
//! use asthreshold::{catalog, search, Rational};
//!
//! let rs = catalog::routing("as_5_3");
//! let res = search::compute_threshold::<Rational>(&rs, &Default::default()).unwrap();
//! assert_eq!(res.tau, Rational::new((-1).into(), 3.into()));
//! ```
//!
//! Arithmetic is generic over [`scalar::Scalar`]. The threshold search needs
//! exact values and uses [`Rational`]; trajectory sweeps are usually fast
//! enough in [`Rational64`].

pub mod asgraph;
pub mod catalog;
pub mod dynamics;
pub mod matrix;
pub mod ratlp;
pub mod report;
pub mod scalar;
pub mod search;

/// Arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

/// Rational with `i64` parts, for trajectory simulation.
pub type Rational64 = num_rational::Ratio<i64>;

pub use asgraph::{
    build_routing, parse_catalog, parse_spec, validate, AbsorbingSetSpec, RoutingSystem,
    Schedule, ValidationReport,
};
pub use dynamics::{run, step, ChannelVector, MessageState, Outcome};
pub use scalar::{ExactScalar, Scalar};
pub use search::{certify_threshold, compute_threshold, SaturationPattern, ThresholdResult};
