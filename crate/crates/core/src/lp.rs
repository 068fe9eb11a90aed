//! Dense two-phase simplex over exact rationals, Bland's rule.
//!
//! Solves `max c·x` subject to linear rows and `x ≥ 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Q)>,
    pub relation: Relation,
    pub rhs: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Q>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![Q::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_objective(&mut self, c: Vec<Q>) {
        assert_eq!(c.len(), self.num_vars);
        self.objective = c;
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// `rows × (cols + 1)`; the last column is the right-hand side.
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
    num_vars: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let n = lp.num_vars;
        let slacks = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        // A row needs an artificial unless it is `≤` with non-negative rhs.
        let needs_art = |c: &Constraint| {
            let flip = c.rhs.is_negative();
            !matches!((c.relation, flip), (Relation::Le, false) | (Relation::Ge, true))
        };
        let arts = lp.constraints.iter().filter(|c| needs_art(c)).count();
        let cols = n + slacks + arts;
        let first_artificial = n + slacks;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, first_artificial);
        for c in &lp.constraints {
            let mut row = vec![Q::zero(); cols + 1];
            for (j, v) in &c.coeffs {
                row[*j] += v;
            }
            row[cols] = c.rhs.clone();
            let mut slack_col = None;
            match c.relation {
                Relation::Le => {
                    row[s] = Q::one();
                    slack_col = Some(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -Q::one();
                    slack_col = Some(s);
                    s += 1;
                }
                Relation::Eq => {}
            }
            if c.rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            if needs_art(c) {
                row[a] = Q::one();
                basis.push(a);
                a += 1;
            } else {
                basis.push(slack_col.expect("rows without artificial have a slack"));
            }
            rows.push(row);
        }
        Tableau { rows, basis, cols, num_vars: n, first_artificial }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Q]) {
        let piv = self.rows[r][c].clone();
        if !piv.is_one() {
            for v in self.rows[r].iter_mut() {
                *v /= &piv;
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (v, p) in obj.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for `cost` (length `cols`) under the current basis;
    /// last entry is minus the objective value.
    fn reduced(&self, cost: &[Q]) -> Vec<Q> {
        let mut obj: Vec<Q> = cost.to_vec();
        obj.push(Q::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (v, t) in obj.iter_mut().zip(row) {
                *v -= cb * t;
            }
        }
        obj
    }

    /// Primal simplex with Bland's rule over columns `< limit`.
    /// Returns false if unbounded.
    fn optimize(&mut self, obj: &mut [Q], limit: usize) -> bool {
        loop {
            let Some(enter) = (0..limit).find(|&j| obj[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter, obj);
        }
    }

    fn run(mut self, c: &[Q]) -> LpOutcome {
        if self.first_artificial < self.cols {
            let mut cost = vec![Q::zero(); self.cols];
            for v in cost.iter_mut().skip(self.first_artificial) {
                *v = -Q::one();
            }
            let mut obj = self.reduced(&cost);
            let cols = self.cols;
            self.optimize(&mut obj, cols);
            let infeasible = self
                .rows
                .iter()
                .zip(&self.basis)
                .any(|(row, &b)| b >= self.first_artificial && !row[self.cols].is_zero());
            if infeasible {
                return LpOutcome::Infeasible;
            }
            // Drive zero-valued artificials out of the basis, dropping redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                        Some(j) => {
                            let mut dummy = vec![Q::zero(); self.cols + 1];
                            self.pivot(r, j, &mut dummy);
                        }
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }
        let mut cost = vec![Q::zero(); self.cols];
        cost[..self.num_vars].clone_from_slice(c);
        let mut obj = self.reduced(&cost);
        let limit = self.first_artificial;
        if !self.optimize(&mut obj, limit) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); self.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_vars {
                x[b] = row[self.cols].clone();
            }
        }
        let value = x.iter().zip(c).map(|(a, b)| a * b).fold(Q::zero(), |s, t| s + t);
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(v: &[(usize, i64)]) -> Vec<(usize, Q)> {
        v.iter().map(|&(j, c)| (j, q(c))).collect()
    }

    #[test]
    fn textbook() {
        // max 3x + 5y; x ≤ 4; 2y ≤ 12; 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![q(3), q(5)]);
        lp.add(terms(&[(0, 1)]), Relation::Le, q(4));
        lp.add(terms(&[(1, 2)]), Relation::Le, q(12));
        lp.add(terms(&[(0, 3), (1, 2)]), Relation::Le, q(18));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![q(2), q(6)], value: q(36) });
    }

    #[test]
    fn fractional_vertex() {
        // max x + y; 2x + y ≤ 2; x + 2y ≤ 2 → (2/3, 2/3)
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![q(1), q(1)]);
        lp.add(terms(&[(0, 2), (1, 1)]), Relation::Le, q(2));
        lp.add(terms(&[(0, 1), (1, 2)]), Relation::Le, q(2));
        let third = Q::new(BigInt::from(2), BigInt::from(3));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![third.clone(), third], value: Q::new(4.into(), 3.into()) });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(terms(&[(0, 1)]), Relation::Ge, q(2));
        lp.add(terms(&[(0, 1)]), Relation::Le, q(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![q(1), q(0)]);
        lp.add(terms(&[(0, 1), (1, -1)]), Relation::Le, q(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_and_negative_rhs() {
        // min x + y (as max of negation); x + y = 3; x - y ≤ -1 → value -3
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![q(-1), q(-1)]);
        lp.add(terms(&[(0, 1), (1, 1)]), Relation::Eq, q(3));
        lp.add(terms(&[(0, 1), (1, -1)]), Relation::Le, q(-1));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(-3));
                assert!(&x[0] - &x[1] <= q(-1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![q(1), q(2)]);
        lp.add(terms(&[(0, 1), (1, 1)]), Relation::Eq, q(1));
        lp.add(terms(&[(0, 2), (1, 2)]), Relation::Eq, q(2));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![q(0), q(1)], value: q(2) });
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example; Bland's rule must terminate.
        let mut lp = LinearProgram::new(4);
        let r = |a: i64, b: i64| Q::new(a.into(), b.into());
        lp.set_objective(vec![r(3, 4), q(-150), r(1, 50), q(-6)]);
        lp.add(vec![(0, r(1, 4)), (1, q(-60)), (2, r(-1, 25)), (3, q(9))], Relation::Le, q(0));
        lp.add(vec![(0, r(1, 2)), (1, q(-90)), (2, r(-1, 50)), (3, q(3))], Relation::Le, q(0));
        lp.add(vec![(2, q(1))], Relation::Le, q(1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
