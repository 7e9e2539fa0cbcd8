//! Interval bound propagation over `C y ≤ f`.

use super::LinearProgram;
use crate::scalar::ExactScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tightening<T> {
    /// Bounds after propagation; every feasible point of the box survives.
    Consistent { lower: Vec<T>, upper: Vec<T> },
    /// No point of the box is feasible. `var` is the variable whose bounds
    /// crossed and `row` the constraint that crossed them; `row` is `None`
    /// when the box was inverted on entry, `var` when the row has no support.
    Empty {
        row: Option<usize>,
        var: Option<usize>,
    },
}

impl<T> Tightening<T> {
    pub fn is_empty(&self) -> bool {
        matches!(self, Tightening::Empty { .. })
    }
}

/// Tightens `[lower, upper]` against the rows of `lp`, sweeping rows in
/// index order until nothing changes or `max_sweeps` sweeps have run.
///
/// Each row `Σ c_k y_k ≤ f` bounds every `y_k` with `c_k ≠ 0` by the slack
/// left after the most favourable contribution of the other variables.
/// The bounds stored in `lp` are ignored in favour of the given box.
pub fn tighten_bounds<T: ExactScalar>(
    lp: &LinearProgram<T>,
    lower: &[T],
    upper: &[T],
    max_sweeps: usize,
) -> Tightening<T> {
    let n = lp.num_vars();
    assert_eq!(lower.len(), n, "lower bound length");
    assert_eq!(upper.len(), n, "upper bound length");
    let mut l = lower.to_vec();
    let mut u = upper.to_vec();
    if let Some(k) = (0..n).find(|&k| l[k] > u[k]) {
        return Tightening::Empty { row: None, var: Some(k) };
    }

    for _ in 0..max_sweeps {
        let mut changed = false;
        for (r, (row, f)) in lp.constraints().iter().zip(lp.rhs()).enumerate() {
            let support: Vec<usize> = (0..n).filter(|&k| !row[k].is_zero()).collect();
            let min_term = |k: usize, l: &[T], u: &[T]| {
                if row[k].is_positive() {
                    row[k].clone() * l[k].clone()
                } else {
                    row[k].clone() * u[k].clone()
                }
            };
            if support.is_empty() {
                if f.is_negative() {
                    return Tightening::Empty { row: Some(r), var: None };
                }
                continue;
            }
            for &k in &support {
                let others = support
                    .iter()
                    .filter(|&&m| m != k)
                    .fold(T::zero(), |acc, &m| acc + min_term(m, &l, &u));
                let bound = (f.clone() - others) / row[k].clone();
                if row[k].is_positive() {
                    if bound < u[k] {
                        u[k] = bound;
                        changed = true;
                    }
                } else if bound > l[k] {
                    l[k] = bound;
                    changed = true;
                }
                if l[k] > u[k] {
                    return Tightening::Empty {
                        row: Some(r),
                        var: Some(k),
                    };
                }
            }
        }
        if !changed {
            break;
        }
    }
    Tightening::Consistent { lower: l, upper: u }
}

/// Default sweep budget for an LP with `m1` variables.
pub fn default_sweeps(m1: usize) -> usize {
    2 * m1
}
