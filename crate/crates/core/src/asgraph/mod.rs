//! Absorbing-set topologies: input format, structural validation, and the
//! routing system `(A, R)` that drives the message dynamics.
//!
//! An absorbing set is described only by its variable nodes and the check
//! nodes touching them. Check nodes adjacent to two VNs of the set forward
//! messages between them; check nodes adjacent to one VN are the unsatisfied
//! (odd) boundary and carry no internal messages.

mod format;
mod routing;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{parse_catalog, parse_catalog_json, parse_spec, ParseError};
pub use routing::{
    build_routing, schedule_partition, Message, RoutingError, RoutingSystem, Schedule,
    ScheduleError, SchedulePartition,
};

/// Every variable node of the set has this many check-node neighbours.
pub const VN_DEGREE: usize = 3;

/// Topology of a candidate absorbing set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorbingSetSpec {
    pub name: String,
    /// Number of variable nodes, indexed `0..a`.
    pub a: usize,
    /// Adjacency list of each check node, in VN indices.
    pub check_nodes: Vec<Vec<usize>>,
    /// Explicit internal message order as `(vn, cn)` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<(usize, usize)>>,
    /// User-annotated `(a, b)` label, only ever compared against the computed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("VN {vn} out of range for a set of {a} VNs (CN {cn})")]
    VnOutOfRange { cn: usize, vn: usize, a: usize },
    #[error("VN {vn} has degree {degree}, expected {expected}", expected = VN_DEGREE)]
    DegreeViolation { vn: usize, degree: usize },
    #[error("CN {cn} lists VN {vn} twice")]
    DuplicateEdge { cn: usize, vn: usize },
    #[error("CN {cn} has no neighbours")]
    EmptyCheckNode { cn: usize },
    #[error("the set has no variable nodes")]
    NoVariableNodes,
    #[error("bad message order: {0}")]
    BadOrder(String),
}

impl AbsorbingSetSpec {
    /// Builds a spec and checks the structural invariants (range, degree, no
    /// duplicate edges, order is a permutation of the internal messages).
    pub fn new(
        name: impl Into<String>,
        a: usize,
        check_nodes: Vec<Vec<usize>>,
        order: Option<Vec<(usize, usize)>>,
    ) -> Result<Self, SpecError> {
        let spec = AbsorbingSetSpec {
            name: name.into(),
            a,
            check_nodes,
            order,
            label: None,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_label(mut self, a: usize, b: usize) -> Self {
        self.label = Some((a, b));
        self
    }

    pub(crate) fn check(&self) -> Result<(), SpecError> {
        if self.a == 0 {
            return Err(SpecError::NoVariableNodes);
        }
        let mut degree = vec![0usize; self.a];
        for (cn, vns) in self.check_nodes.iter().enumerate() {
            if vns.is_empty() {
                return Err(SpecError::EmptyCheckNode { cn });
            }
            let mut seen = BTreeSet::new();
            for &vn in vns {
                if vn >= self.a {
                    return Err(SpecError::VnOutOfRange { cn, vn, a: self.a });
                }
                if !seen.insert(vn) {
                    return Err(SpecError::DuplicateEdge { cn, vn });
                }
                degree[vn] += 1;
            }
        }
        if let Some((vn, &d)) = degree.iter().enumerate().find(|(_, &d)| d != VN_DEGREE) {
            return Err(SpecError::DegreeViolation { vn, degree: d });
        }
        if let Some(order) = &self.order {
            let expected: BTreeSet<(usize, usize)> = self.internal_pairs().collect();
            let given: BTreeSet<(usize, usize)> = order.iter().copied().collect();
            if given.len() != order.len() {
                return Err(SpecError::BadOrder("repeated message".into()));
            }
            if given != expected {
                let missing: Vec<_> = expected.difference(&given).collect();
                let extra: Vec<_> = given.difference(&expected).collect();
                return Err(SpecError::BadOrder(format!(
                    "missing {missing:?}, not internal {extra:?}"
                )));
            }
        }
        Ok(())
    }

    /// `(vn, cn)` for every VN adjacent to a degree-2 check node.
    pub(crate) fn internal_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.check_nodes
            .iter()
            .enumerate()
            .filter(|(_, vns)| vns.len() == 2)
            .flat_map(|(cn, vns)| vns.iter().map(move |&vn| (vn, cn)))
    }

    /// Edges `(vn, cn)` of the bipartite graph, in CN order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.check_nodes
            .iter()
            .enumerate()
            .flat_map(|(cn, vns)| vns.iter().map(move |&vn| (vn, cn)))
    }
}

/// Outcome of [`validate`]: the absorbing/elementary predicates plus the
/// even/odd boundary bookkeeping behind them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub is_absorbing: bool,
    pub is_elementary: bool,
    pub a: usize,
    pub b: usize,
    pub even_cns: Vec<usize>,
    pub odd_cns: Vec<usize>,
    /// `(even, odd)` boundary CN counts per VN.
    pub per_vn_even_odd: Vec<(usize, usize)>,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid_elementary(&self) -> bool {
        self.is_absorbing && self.is_elementary
    }

    pub fn is_maximal(&self) -> bool {
        self.is_absorbing && self.a == self.b
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: ({},{}) absorbing={} elementary={}",
            self.name, self.a, self.b, self.is_absorbing, self.is_elementary
        )?;
        for fail in &self.failures {
            write!(f, "\n  failure: {fail}")?;
        }
        for warn in &self.warnings {
            write!(f, "\n  warning: {warn}")?;
        }
        Ok(())
    }
}

/// Checks the absorbing-set conditions. Never fails: violations are reported.
pub fn validate(spec: &AbsorbingSetSpec) -> ValidationReport {
    let mut even_cns = Vec::new();
    let mut odd_cns = Vec::new();
    let mut per_vn = vec![(0usize, 0usize); spec.a];
    let mut failures = Vec::new();
    let mut is_elementary = true;

    for (cn, vns) in spec.check_nodes.iter().enumerate() {
        let even = vns.len() % 2 == 0;
        if even {
            even_cns.push(cn);
        } else {
            odd_cns.push(cn);
        }
        if vns.len() > 2 {
            is_elementary = false;
            failures.push(format!(
                "CN {cn} is connected to the set {} times (not elementary)",
                vns.len()
            ));
        }
        for &vn in vns {
            if vn < spec.a {
                if even {
                    per_vn[vn].0 += 1;
                } else {
                    per_vn[vn].1 += 1;
                }
            }
        }
    }

    let mut is_absorbing = true;
    for (vn, &(even, odd)) in per_vn.iter().enumerate() {
        if even <= odd {
            is_absorbing = false;
            failures.push(format!(
                "VN {vn} has {even} even and {odd} odd boundary CNs (needs strictly more even)"
            ));
        }
    }

    let b = odd_cns.len();
    let mut warnings = Vec::new();
    if let Some((la, lb)) = spec.label {
        if (la, lb) != (spec.a, b) {
            warnings.push(format!(
                "annotated label ({la},{lb}) differs from computed ({},{b})",
                spec.a
            ));
        }
    }

    ValidationReport {
        name: spec.name.clone(),
        is_absorbing,
        is_elementary,
        a: spec.a,
        b,
        even_cns,
        odd_cns,
        per_vn_even_odd: per_vn,
        failures,
        warnings,
    }
}
