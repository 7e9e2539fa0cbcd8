//! Dense two-phase tableau simplex with Bland's rule.
//!
//! The box is shifted to `z = y - l ≥ 0` and the upper bounds become
//! ordinary rows `z_k ≤ u_k - l_k`, so the tableau only ever sees
//! nonnegative variables.

use super::{dot, LinearProgram, LpOutcome, LpStatus};
use crate::scalar::ExactScalar;

struct Tableau<T> {
    /// `m` rows of `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs, same layout; the last entry is the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    cols: usize,
    /// Columns allowed to enter the basis.
    enterable: Vec<bool>,
    pivots: usize,
}

impl<T: ExactScalar> Tableau<T> {
    fn rhs(&self, r: usize) -> &T {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, p: usize, j: usize) {
        let piv = self.rows[p][j].clone();
        if !piv.is_one() {
            for v in self.rows[p].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / piv.clone();
                }
            }
        }
        let support: Vec<usize> = (0..=self.cols)
            .filter(|&c| !self.rows[p][c].is_zero())
            .collect();
        let prow = std::mem::take(&mut self.rows[p]);
        let eliminate = |row: &mut Vec<T>| {
            let factor = row[j].clone();
            if factor.is_zero() {
                return;
            }
            for &c in &support {
                row[c] = row[c].clone() - factor.clone() * prow[c].clone();
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[p] = prow;
        self.basis[p] = j;
        self.pivots += 1;
    }

    /// Runs Bland pivots until no reduced cost is negative.
    fn optimize(&mut self) {
        loop {
            let Some(j) = (0..self.cols).find(|&c| self.enterable[c] && self.obj[c].is_negative())
            else {
                return;
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r).clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let (p, _) = best.expect("bounded box: every entering column has a blocking row");
            self.pivot(p, j);
        }
    }

    /// Reduced costs for maximizing `c·x` over the current basis.
    fn set_objective(&mut self, c: &[T]) {
        let mut obj: Vec<T> = (0..=self.cols)
            .map(|k| if k < self.cols { -c[k].clone() } else { T::zero() })
            .collect();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &c[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (k, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    obj[k] = obj[k].clone() + cb.clone() * v.clone();
                }
            }
        }
        self.obj = obj;
    }
}

/// Maximizes `lp` exactly. Deterministic for a fixed input.
pub fn simplex_max<T: ExactScalar>(lp: &LinearProgram<T>) -> LpOutcome<T> {
    let n = lp.num_vars();
    let m_c = lp.num_rows();
    let infeasible = |pivots| LpOutcome {
        status: LpStatus::Infeasible,
        pivots,
    };
    let range: Vec<T> = lp
        .upper()
        .iter()
        .zip(lp.lower())
        .map(|(u, l)| u.clone() - l.clone())
        .collect();
    if range.iter().any(|r| r.is_negative()) {
        return infeasible(0);
    }

    let m = m_c + n;
    let mut b: Vec<T> = lp
        .constraints()
        .iter()
        .zip(lp.rhs())
        .map(|(row, f)| f.clone() - dot(row, lp.lower()))
        .collect();
    b.extend(range);
    let n_art = b.iter().filter(|v| v.is_negative()).count();
    let cols = n + m + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n + m;
    for r in 0..m {
        let mut row = vec![T::zero(); cols + 1];
        if r < m_c {
            row[..n].clone_from_slice(&lp.constraints()[r]);
        } else {
            row[r - m_c] = T::one();
        }
        row[n + r] = T::one();
        row[cols] = b[r].clone();
        if b[r].is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            row[next_art] = T::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + r);
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        cols,
        enterable: vec![true; cols],
        pivots: 0,
    };

    if n_art > 0 {
        let c1: Vec<T> = (0..cols)
            .map(|k| if k >= n + m { -T::one() } else { T::zero() })
            .collect();
        t.set_objective(&c1);
        t.optimize();
        if t.obj[cols].is_negative() {
            return infeasible(t.pivots);
        }
        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= n + m {
                match (0..n + m).find(|&c| !t.rows[r][c].is_zero()) {
                    Some(c) => t.pivot(r, c),
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for c in n + m..cols {
            t.enterable[c] = false;
        }
    }

    let mut c2 = vec![T::zero(); cols];
    c2[..n].clone_from_slice(lp.objective());
    t.set_objective(&c2);
    t.optimize();

    let mut point: Vec<T> = lp.lower().to_vec();
    for (r, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            point[bv] = point[bv].clone() + t.rhs(r).clone();
        }
    }
    let value = lp.value_at(&point);
    debug_assert!(lp.is_feasible(&point));
    LpOutcome {
        status: LpStatus::Optimal { value, point },
        pivots: t.pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn lp(c: &[i64], rows: &[&[i64]], f: &[i64], l: &[i64], u: &[i64]) -> LinearProgram<Rational> {
        let v = |s: &[i64]| s.iter().map(|&x| q(x)).collect::<Vec<_>>();
        LinearProgram::new(v(c), rows.iter().map(|r| v(r)).collect(), v(f), v(l), v(u)).unwrap()
    }

    #[test]
    fn single_binding_row() {
        let p = lp(&[1], &[&[1]], &[-1], &[-1], &[1]);
        let out = simplex_max(&p);
        assert_eq!(out.value(), Some(&q(-1)));
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        // λ ≤ -2 and -λ ≤ 0
        let p = lp(&[1], &[&[1], &[-1]], &[-2, 0], &[-1], &[1]);
        assert_eq!(simplex_max(&p).status, LpStatus::Infeasible);
        let empty_box = lp(&[1], &[], &[], &[1], &[0]);
        assert_eq!(simplex_max(&empty_box).status, LpStatus::Infeasible);
    }

    #[test]
    fn fractional_vertex() {
        // max x + y s.t. 2x + y ≤ 1, x + 2y ≤ 1 → (1/3, 1/3)
        let p = lp(&[1, 1], &[&[2, 1], &[1, 2]], &[1, 1], &[-1, -1], &[1, 1]);
        let out = simplex_max(&p);
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(out.point().unwrap(), &[third.clone(), third.clone()]);
        assert_eq!(out.value(), Some(&(third.clone() + third)));
    }

    #[test]
    fn redundant_equalities_keep_phase_two_sound() {
        // x + y ≤ -1 and -x - y ≤ 1 force x + y = -1
        let p = lp(&[1, 0], &[&[1, 1], &[-1, -1]], &[-1, 1], &[-1, -1], &[1, 1]);
        let out = simplex_max(&p);
        assert_eq!(out.value(), Some(&q(0)));
        assert_eq!(out.point().unwrap(), &[q(0), q(-1)]);
    }
}
