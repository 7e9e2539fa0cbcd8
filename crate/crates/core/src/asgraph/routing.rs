use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{validate, AbsorbingSetSpec};
use crate::matrix::BinaryMatrix;

/// One internal extrinsic message: emitted by `vn` through the degree-2 check
/// node `cn`, delivered to `to_vn`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message {
    pub vn: usize,
    pub cn: usize,
    pub to_vn: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("CN {cn} is connected to the set {degree} times; only elementary sets are supported")]
    NotElementary { cn: usize, degree: usize },
    #[error("not an absorbing set: {}", failures.join("; "))]
    NotAbsorbing { failures: Vec<String> },
}

/// Linear skeleton of the message dynamics: routing matrix `A` (N×N),
/// repetition matrix `R` (N×a) and the message numbering both refer to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingSystem {
    name: String,
    a: usize,
    b: usize,
    messages: Vec<Message>,
    routing: BinaryMatrix,
    repetition: BinaryMatrix,
    /// Supports of the rows of `A`, cached for the hot loops.
    in_edges: Vec<Vec<usize>>,
    even_cns: Vec<usize>,
}

impl RoutingSystem {
    /// Compiles the routing system of an elementary topology without checking
    /// that it is absorbing. [`build_routing`] is the checked entry point.
    pub fn compile(spec: &AbsorbingSetSpec) -> Result<Self, RoutingError> {
        let mut even_cns = Vec::new();
        let mut b = 0;
        for (cn, vns) in spec.check_nodes.iter().enumerate() {
            match vns.len() {
                2 => even_cns.push(cn),
                1 => b += 1,
                degree => return Err(RoutingError::NotElementary { cn, degree }),
            }
        }

        let pairs: Vec<(usize, usize)> = match &spec.order {
            Some(order) => order.clone(),
            None => {
                let mut p: Vec<_> = spec.internal_pairs().collect();
                p.sort_unstable();
                p
            }
        };
        let messages: Vec<Message> = pairs
            .iter()
            .map(|&(vn, cn)| {
                let vns = &spec.check_nodes[cn];
                let to_vn = if vns[0] == vn { vns[1] } else { vns[0] };
                Message { vn, cn, to_vn }
            })
            .collect();

        let n = messages.len();
        let mut routing = BinaryMatrix::zeros(n, n);
        let mut repetition = BinaryMatrix::zeros(n, spec.a);
        for (i, mi) in messages.iter().enumerate() {
            repetition.set(i, mi.vn, true);
            for (j, mj) in messages.iter().enumerate() {
                // j arrives at the VN emitting i, through a different CN
                if mj.to_vn == mi.vn && mj.vn != mi.vn && mj.cn != mi.cn {
                    routing.set(i, j, true);
                }
            }
        }
        let in_edges = (0..n).map(|i| routing.row_support(i).collect()).collect();

        Ok(RoutingSystem {
            name: spec.name.clone(),
            a: spec.a,
            b,
            messages,
            routing,
            repetition,
            in_edges,
            even_cns,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of variable nodes.
    pub fn a(&self) -> usize {
        self.a
    }

    /// Number of odd (unsatisfied) boundary check nodes.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of internal messages `N`.
    pub fn n(&self) -> usize {
        self.messages.len()
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// The routing matrix `A`.
    pub fn routing(&self) -> &BinaryMatrix {
        &self.routing
    }

    /// The repetition matrix `R`.
    pub fn repetition(&self) -> &BinaryMatrix {
        &self.repetition
    }

    /// Messages feeding message `i` (support of row `i` of `A`).
    #[inline]
    pub fn inputs(&self, i: usize) -> &[usize] {
        &self.in_edges[i]
    }

    /// VN whose channel value enters message `i` (the one-hot of row `i` of `R`).
    #[inline]
    pub fn source_vn(&self, i: usize) -> usize {
        self.messages[i].vn
    }

    /// Indices of the degree-2 check nodes, ascending.
    pub fn even_cns(&self) -> &[usize] {
        &self.even_cns
    }
}

/// Validates `spec` and compiles its routing system.
pub fn build_routing(spec: &AbsorbingSetSpec) -> Result<RoutingSystem, RoutingError> {
    let report = validate(spec);
    if !report.is_elementary {
        let (cn, vns) = spec
            .check_nodes
            .iter()
            .enumerate()
            .find(|(_, v)| v.len() > 2)
            .expect("non-elementary set has a CN of degree > 2");
        return Err(RoutingError::NotElementary {
            cn,
            degree: vns.len(),
        });
    }
    if !report.is_absorbing {
        return Err(RoutingError::NotAbsorbing {
            failures: report.failures,
        });
    }
    RoutingSystem::compile(spec)
}

/// Check-node activation order within one decoding iteration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// All messages computed from the previous iteration.
    Parallel,
    /// Check nodes activated one by one in the given order (CN indices).
    Sequential(Vec<usize>),
}

impl Schedule {
    /// Sequential schedule in ascending CN index order.
    pub fn natural(rs: &RoutingSystem) -> Self {
        Schedule::Sequential(rs.even_cns().to_vec())
    }

    /// All cyclic rotations of the natural sequential order.
    pub fn cyclic_orders(rs: &RoutingSystem) -> Vec<Schedule> {
        let base = rs.even_cns();
        (0..base.len().max(1))
            .map(|k| {
                let mut o = base.to_vec();
                let len = o.len();
                o.rotate_left(k.min(len));
                Schedule::Sequential(o)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("CN order is not a permutation of the even CNs {expected:?}: got {got:?}")]
    NotAPermutation { expected: Vec<usize>, got: Vec<usize> },
}

/// Split `A = Ā + A̲` into reads from the previous iteration (`a_bar`) and
/// reads of values already refreshed in the current one (`a_under`), plus
/// the message update groups in activation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchedulePartition {
    pub a_bar: BinaryMatrix,
    pub a_under: BinaryMatrix,
    /// `None` for the parallel schedule.
    pub cn_order: Option<Vec<usize>>,
    groups: Vec<Vec<usize>>,
    bar_inputs: Vec<Vec<usize>>,
    under_inputs: Vec<Vec<usize>>,
}

impl SchedulePartition {
    pub fn is_parallel(&self) -> bool {
        self.cn_order.is_none()
    }

    /// Message indices updated together, in activation order.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    #[inline]
    pub(crate) fn bar_inputs(&self, i: usize) -> &[usize] {
        &self.bar_inputs[i]
    }

    #[inline]
    pub(crate) fn under_inputs(&self, i: usize) -> &[usize] {
        &self.under_inputs[i]
    }

    pub fn n(&self) -> usize {
        self.a_bar.rows()
    }
}

pub fn schedule_partition(
    rs: &RoutingSystem,
    schedule: &Schedule,
) -> Result<SchedulePartition, ScheduleError> {
    let n = rs.n();
    let a = rs.routing();
    let (a_bar, a_under, cn_order, groups) = match schedule {
        Schedule::Parallel => (
            a.clone(),
            BinaryMatrix::zeros(n, n),
            None,
            vec![(0..n).collect::<Vec<_>>()],
        ),
        Schedule::Sequential(order) => {
            let expected: BTreeSet<usize> = rs.even_cns().iter().copied().collect();
            let got: BTreeSet<usize> = order.iter().copied().collect();
            if got != expected || order.len() != expected.len() {
                return Err(ScheduleError::NotAPermutation {
                    expected: rs.even_cns().to_vec(),
                    got: order.clone(),
                });
            }
            let position: HashMap<usize, usize> =
                order.iter().enumerate().map(|(p, &cn)| (cn, p)).collect();
            let pos_of = |msg: usize| position[&rs.messages()[msg].cn];
            let mut a_bar = BinaryMatrix::zeros(n, n);
            let mut a_under = BinaryMatrix::zeros(n, n);
            for i in 0..n {
                for &j in rs.inputs(i) {
                    if pos_of(j) < pos_of(i) {
                        a_under.set(i, j, true);
                    } else {
                        a_bar.set(i, j, true);
                    }
                }
            }
            let groups = order
                .iter()
                .map(|&cn| (0..n).filter(|&m| rs.messages()[m].cn == cn).collect())
                .collect();
            (a_bar, a_under, Some(order.clone()), groups)
        }
    };
    let bar_inputs = (0..n).map(|i| a_bar.row_support(i).collect()).collect();
    let under_inputs = (0..n).map(|i| a_under.row_support(i).collect()).collect();
    Ok(SchedulePartition {
        a_bar,
        a_under,
        cn_order,
        groups,
        bar_inputs,
        under_inputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> AbsorbingSetSpec {
        // VNs 0 and 1 joined by three parallel CNs: a (2,0) codeword-like toy
        AbsorbingSetSpec::new("theta", 2, vec![vec![0, 1]; 3], None).unwrap()
    }

    #[test]
    fn single_even_cn_has_no_in_iteration_reads() {
        let spec =
            AbsorbingSetSpec::new("pair", 2, vec![vec![0, 1], vec![0], vec![0], vec![1], vec![1]], None)
                .unwrap();
        let rs = RoutingSystem::compile(&spec).unwrap();
        assert_eq!(rs.n(), 2);
        assert!(rs.routing().is_zero());
        for s in [Schedule::Parallel, Schedule::Sequential(vec![0])] {
            let sp = schedule_partition(&rs, &s).unwrap();
            assert!(sp.a_under.is_zero());
        }
        assert!(matches!(build_routing(&spec), Err(RoutingError::NotAbsorbing { .. })));
    }

    #[test]
    fn theta_routing_by_hand() {
        let rs = build_routing(&theta()).unwrap();
        // lexicographic (vn, cn): (0,0) (0,1) (0,2) (1,0) (1,1) (1,2)
        let expected = vec![
            vec![0, 0, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 0, 1],
            vec![0, 0, 0, 1, 1, 0],
            vec![0, 1, 1, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 0],
            vec![1, 1, 0, 0, 0, 0],
        ];
        assert_eq!(rs.routing().to_rows(), expected);
        assert_eq!(rs.repetition().col_weight(0), 3);
    }

    #[test]
    fn sequential_partition_by_hand() {
        let rs = build_routing(&theta()).unwrap();
        let sp = schedule_partition(&rs, &Schedule::Sequential(vec![2, 0, 1])).unwrap();
        // message 0 sits on CN 0 (position 1); it reads message 4 (CN 1, pos 2)
        // from the previous iteration and message 5 (CN 2, pos 0) fresh.
        assert!(sp.a_bar.get(0, 4) && sp.a_under.get(0, 5));
        assert_eq!(sp.groups(), &[vec![2, 5], vec![0, 3], vec![1, 4]]);
        for i in 0..6 {
            for j in 0..6 {
                let sum = u8::from(sp.a_bar.get(i, j)) + u8::from(sp.a_under.get(i, j));
                assert_eq!(sum == 1, rs.routing().get(i, j));
            }
        }
    }

    #[test]
    fn rejects_non_permutations() {
        let rs = build_routing(&theta()).unwrap();
        for bad in [vec![0, 1], vec![0, 1, 1], vec![0, 1, 5]] {
            assert!(schedule_partition(&rs, &Schedule::Sequential(bad)).is_err());
        }
    }

    #[test]
    fn non_elementary_is_rejected() {
        let spec = AbsorbingSetSpec::new(
            "ne",
            3,
            vec![vec![0, 1, 2], vec![0, 1], vec![1, 2], vec![0, 2]],
            None,
        )
        .unwrap();
        assert_eq!(
            build_routing(&spec),
            Err(RoutingError::NotElementary { cn: 0, degree: 3 })
        );
    }
}
