//! Dense two-phase simplex over exact rationals with Bland's rule.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::num::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// `maximize objective . x` subject to `rows`, `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub n_vars: usize,
    pub objective: Vec<Rational>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub fn new(n_vars: usize) -> Self {
        Lp { n_vars, objective: vec![Rational::zero(); n_vars], rows: Vec::new() }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        self.rows.push(Row { coeffs, sense, rhs });
    }
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        for x in self.a[r].iter_mut() {
            *x /= &p;
        }
        self.b[r] /= &p;
        let prow = self.a[r].clone();
        let pb = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (x, y) in self.a[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.b[i] -= &f * &pb;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over columns `allowed`; false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let ncols = cost.len();
            let mut enter = None;
            for j in 0..ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &bj) in self.basis.iter().enumerate() {
                    if !self.a[i][j].is_zero() && !cost[bj].is_zero() {
                        rc -= &cost[bj] * &self.a[i][j];
                    }
                }
                if rc.is_positive() {
                    enter = Some(j);
                    break;
                }
            }
            let c = match enter {
                Some(c) => c,
                None => return true,
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if self.a[i][c].is_positive() {
                    let ratio = &self.b[i] / &self.a[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

pub fn maximize(lp: &Lp) -> LpOutcome {
    let n = lp.n_vars;
    let m = lp.rows.len();
    // Columns: originals, one slack/surplus per inequality row, then artificials.
    let mut rows: Vec<(Vec<Rational>, Sense, Rational)> = Vec::with_capacity(m);
    for row in &lp.rows {
        let mut dense = vec![Rational::zero(); n];
        for (j, v) in &row.coeffs {
            dense[*j] += v;
        }
        let (mut sense, mut rhs) = (row.sense, row.rhs.clone());
        if rhs.is_negative() {
            for x in dense.iter_mut() {
                *x = -&*x;
            }
            rhs = -rhs;
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        rows.push((dense, sense, rhs));
    }
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let total = n + n_slack + n_art;
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut si, mut ai) = (n, n + n_slack);
    for (dense, sense, rhs) in rows {
        let mut r = dense;
        r.resize(total, Rational::zero());
        match sense {
            Sense::Le => {
                r[si] = Rational::one();
                basis.push(si);
                si += 1;
            }
            Sense::Ge => {
                r[si] = -Rational::one();
                si += 1;
                r[ai] = Rational::one();
                basis.push(ai);
                ai += 1;
            }
            Sense::Eq => {
                r[ai] = Rational::one();
                basis.push(ai);
                ai += 1;
            }
        }
        a.push(r);
        b.push(rhs);
    }
    let mut t = Tableau { a, b, basis };
    let all = vec![true; total];
    if n_art > 0 {
        let mut cost1 = vec![Rational::zero(); total];
        for c in cost1.iter_mut().skip(n + n_slack) {
            *c = -Rational::one();
        }
        t.optimize(&cost1, &all);
        let infeas = t
            .basis
            .iter()
            .zip(&t.b)
            .any(|(&bj, bv)| bj >= n + n_slack && bv.is_positive());
        if infeas {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis or drop their rows.
        let mut r = 0;
        while r < t.a.len() {
            if t.basis[r] >= n + n_slack {
                match (0..n + n_slack).find(|&j| !t.a[r][j].is_zero()) {
                    Some(j) => {
                        t.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        t.a.remove(r);
                        t.b.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }
    let mut cost = vec![Rational::zero(); total];
    cost[..n].clone_from_slice(&lp.objective);
    let mut allowed = vec![true; total];
    for x in allowed.iter_mut().skip(n + n_slack) {
        *x = false;
    }
    if !t.optimize(&cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bj) in t.basis.iter().enumerate() {
        if bj < n {
            x[bj] = t.b[i].clone();
        }
    }
    let value = x.iter().zip(&lp.objective).fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { value, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
        let mut lp = Lp::new(2);
        lp.objective = vec![int(3), int(5)];
        lp.add_row(vec![(0, int(1))], Sense::Le, int(4));
        lp.add_row(vec![(1, int(2))], Sense::Le, int(12));
        lp.add_row(vec![(0, int(3)), (1, int(2))], Sense::Le, int(18));
        assert_eq!(maximize(&lp), LpOutcome::Optimal { value: int(36), x: vec![int(2), int(6)] });
    }

    #[test]
    fn equality_and_infeasible() {
        // min x + 2y (as max of the negation) with x + y = 3/2, x <= 1.
        let mut lp = Lp::new(2);
        lp.objective = vec![int(-1), int(-2)];
        lp.add_row(vec![(0, int(1)), (1, int(1))], Sense::Eq, ratio(3, 2));
        lp.add_row(vec![(0, int(1))], Sense::Le, int(1));
        match maximize(&lp) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(-2)),
            o => panic!("{o:?}"),
        }
        lp.add_row(vec![(1, int(1))], Sense::Le, ratio(1, 4));
        assert_eq!(maximize(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = Lp::new(2);
        lp.objective = vec![int(1), int(0)];
        lp.add_row(vec![(0, int(1)), (1, int(-1))], Sense::Le, int(1));
        assert_eq!(maximize(&lp), LpOutcome::Unbounded);
    }
}
