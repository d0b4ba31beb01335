//! Dense two-phase primal simplex with Bland's rule, generic over the
//! field so that the same code runs exactly over rationals and with a
//! tolerance over `f64`. Variables are nonnegative; the objective is maximized.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    nvars: usize,
    objective: Vec<T>,
    constraints: Vec<(Vec<T>, Relation, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    /// Phase one ended with a positive artificial sum.
    Infeasible,
    Unbounded,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(nvars: usize) -> Self {
        Self { nvars, objective: vec![T::nil(); nvars], constraints: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Maximize `objective · x`.
    pub fn maximize(&mut self, objective: Vec<T>) {
        assert_eq!(objective.len(), self.nvars);
        self.objective = objective;
    }

    pub fn constrain(&mut self, coeffs: Vec<T>, rel: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.nvars);
        self.constraints.push((coeffs, rel, rhs));
    }

    /// Sparse helper: `Σ coeff·x[var] rel rhs`.
    pub fn constrain_terms(&mut self, terms: &[(usize, T)], rel: Relation, rhs: T) {
        let mut row = vec![T::nil(); self.nvars];
        for (v, c) in terms {
            row[*v] = row[*v].add(c);
        }
        self.constrain(row, rel, rhs);
    }

    pub fn solve(&self) -> LpOutcome<T> {
        let n = self.nvars;
        let m = self.constraints.len();
        let nslack = self.constraints.iter().filter(|c| c.1 != Relation::Eq).count();
        let art0 = n + nslack;
        let width = art0 + m;

        let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut rhs: Vec<T> = Vec::with_capacity(m);
        let mut basis: Vec<usize> = Vec::with_capacity(m);
        let mut slack = n;
        for (i, (coeffs, rel, b)) in self.constraints.iter().enumerate() {
            let mut row = vec![T::nil(); width];
            row[..n].clone_from_slice(coeffs);
            match rel {
                Relation::Le => {
                    row[slack] = T::unit();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = T::unit().neg();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let mut b = b.clone();
            if b.is_negative_tol() {
                for v in row.iter_mut() {
                    *v = v.neg();
                }
                b = b.neg();
            }
            row[art0 + i] = T::unit();
            rows.push(row);
            rhs.push(b);
            basis.push(art0 + i);
        }
        let mut t = Tableau { rows, rhs, basis };

        // phase one: maximize −Σ artificials
        let mut c1 = vec![T::nil(); width];
        for v in c1.iter_mut().skip(art0) {
            *v = T::unit().neg();
        }
        if t.optimize(&c1, width) == Step::Unbounded {
            unreachable!("phase one is bounded");
        }
        let infeas = (0..t.rows.len())
            .filter(|&i| t.basis[i] >= art0)
            .fold(T::nil(), |acc, i| acc.add(&t.rhs[i]));
        if infeas.is_positive_tol() {
            return LpOutcome::Infeasible;
        }
        // drive remaining artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art0 {
                if let Some(j) = (0..art0).find(|&j| !t.rows[i][j].is_zero_tol()) {
                    t.pivot(i, j);
                } else {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }

        let mut c2 = vec![T::nil(); width];
        c2[..n].clone_from_slice(&self.objective);
        if t.optimize(&c2, art0) == Step::Unbounded {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![T::nil(); n];
        for (i, &bv) in t.basis.iter().enumerate() {
            if bv < n {
                x[bv] = t.rhs[i].clone();
            }
        }
        let value = x.iter().zip(self.objective.iter()).fold(T::nil(), |acc, (xi, ci)| acc.add(&xi.mul(ci)));
        LpOutcome::Optimal { x, value }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.div(&piv);
        }
        self.rhs[r] = self.rhs[r].div(&piv);
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero_tol() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, p) in self.rows[i].iter_mut().zip(prow.iter()) {
                *v = v.sub(&f.mul(p));
            }
            self.rhs[i] = self.rhs[i].sub(&f.mul(&prhs));
            self.rows[i][c] = T::nil();
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` over columns `< ncols` (Bland's rule).
    fn optimize(&mut self, cost: &[T], ncols: usize) -> Step {
        loop {
            let entering = (0..ncols).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, &bv) in self.basis.iter().enumerate() {
                    r = r.sub(&cost[bv].mul(&self.rows[i][j]));
                }
                r.is_positive_tol()
            });
            let Some(j) = entering else { return Step::Optimal };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][j].is_positive_tol() {
                    continue;
                }
                let ratio = self.rhs[i].div(&self.rows[i][j]);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        let d = ratio.sub(lr);
                        d.is_negative_tol() || (d.is_zero_tol() && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((i, _)) = leave else { return Step::Unbounded };
            self.pivot(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    #[test]
    fn small_maximization() {
        // max x + y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::<Q>::new(2);
        lp.maximize(vec![q(1, 1), q(1, 1)]);
        lp.constrain(vec![q(1, 1), q(2, 1)], Relation::Le, q(4, 1));
        lp.constrain(vec![q(3, 1), q(1, 1)], Relation::Le, q(6, 1));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(14, 5));
                assert_eq!(x, vec![q(8, 5), q(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.constrain(vec![1.0], Relation::Ge, 2.0);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::<f64>::new(2);
        lp.maximize(vec![1.0, 0.0]);
        lp.constrain(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities_and_negative_rhs() {
        let mut lp = LinearProgram::<Q>::new(2);
        lp.constrain(vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1));
        lp.constrain(vec![q(2, 1), q(2, 1)], Relation::Eq, q(2, 1));
        lp.constrain(vec![q(-1, 1), q(0, 1)], Relation::Le, q(-1, 4));
        lp.maximize(vec![q(0, 1), q(1, 1)]);
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(3, 4)),
            other => panic!("{other:?}"),
        }
    }
}
