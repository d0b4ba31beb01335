//! Exact decision of two-term models for rational boxes.
//!
//! Write the box as the 4×4 matrix `P[(x,a)][(y,b)]`. A two-term model is
//! `P = Σ_g A_g ⊗ β_g` with `β_g = W_g·B_g` the unnormalized trusted boxes, so
//! rank `P ≤ 2`. In rank 2 the `β_g` form a basis of the row space; with row
//! basis coordinates `c_0 + c_1 = s` (the trusted marginal), the untrusted
//! responses are `α_0(q) = det(q, c_1)/D` and `α_1(q) = det(c_0, q)/D` with
//! `D = det(c_0, s)`. After scaling by `D > 0` every constraint is linear in
//! `c_0`, so feasibility is an LP that maximizes a lower bound on `D`.

use num_traits::{One, Signed, Zero};

use super::local::{rational_circle_points, strategy_box};
use super::model::{qubit_mub_realizable_exact, HiddenVariableModel, TrustedKind};
use crate::boxes::{CorrBox, Side, SinglePartyBox};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::scalar::{rank, Q};

#[derive(Debug, Clone)]
pub enum ExactOutcome {
    Feasible(HiddenVariableModel),
    Infeasible(String),
    /// Only for qubit-constrained trusted boxes: the polygon relaxations
    /// from inside and outside disagree.
    Undecided(String),
}

/// `k + a·c₀₁ + b·c₀₂`.
#[derive(Clone, Debug)]
pub(super) struct Lin {
    k: Q,
    a: Q,
    b: Q,
}

impl Lin {
    pub(super) fn zero() -> Self {
        Self::new(Q::zero(), Q::zero(), Q::zero())
    }
    fn new(k: Q, a: Q, b: Q) -> Self {
        Self { k, a, b }
    }
    fn add(&self, o: &Lin) -> Lin {
        Lin::new(&self.k + &o.k, &self.a + &o.a, &self.b + &o.b)
    }
    fn sub(&self, o: &Lin) -> Lin {
        Lin::new(&self.k - &o.k, &self.a - &o.a, &self.b - &o.b)
    }
    fn scale(&self, f: &Q) -> Lin {
        Lin::new(&self.k * f, &self.a * f, &self.b * f)
    }
    pub(super) fn eval(&self, c: &[Q; 2]) -> Q {
        &self.k + &self.a * &c[0] + &self.b * &c[1]
    }
}

/// Row-space data of an oriented box (untrusted party in the Alice slot).
pub(super) struct Geometry {
    pub rank: usize,
    /// `P[x*2+a][y*2+b]`.
    pub rows: Vec<Vec<Q>>,
    basis: Option<[Vec<Q>; 2]>,
    coords: Vec<[Q; 2]>,
    s: [Q; 2],
    rho: Vec<Q>,
}

fn det(p: &[Q; 2], r: &[Q; 2]) -> Q {
    &p[0] * &r[1] - &p[1] * &r[0]
}

impl Geometry {
    pub(super) fn new(e: &[Q]) -> Self {
        let rows: Vec<Vec<Q>> = (0..4)
            .map(|r| {
                let (x, a) = (r >> 1, r & 1);
                (0..4).map(|c| e[crate::boxes::idx(x, c >> 1, a, c & 1)].clone()).collect()
            })
            .collect();
        let rk = rank(&rows);
        let rho: Vec<Q> = (0..4).map(|c| &rows[0][c] + &rows[1][c]).collect();
        let mut g = Self { rank: rk, rows, basis: None, coords: Vec::new(), s: [Q::zero(), Q::zero()], rho };
        if rk == 2 {
            g.fill_coordinates();
        }
        g
    }

    fn fill_coordinates(&mut self) {
        let r1 = self.rows.iter().find(|r| r.iter().any(|v| !v.is_zero())).unwrap().clone();
        let r2 = self.rows.iter().find(|r| rank(&[r1.clone(), (*r).clone()]) == 2).unwrap().clone();
        let (j, k, dd) = (0..4)
            .flat_map(|j| (j + 1..4).map(move |k| (j, k)))
            .map(|(j, k)| (j, k, &r1[j] * &r2[k] - &r1[k] * &r2[j]))
            .find(|t| !t.2.is_zero())
            .unwrap();
        let solve = |v: &[Q]| -> [Q; 2] {
            [(&v[j] * &r2[k] - &v[k] * &r2[j]) / &dd, (&r1[j] * &v[k] - &r1[k] * &v[j]) / &dd]
        };
        self.coords = self.rows.iter().map(|r| solve(r)).collect();
        self.s = solve(&self.rho);
        self.basis = Some([r1, r2]);
    }

    /// `β_0(col)` as a linear form in `c_0`.
    pub(super) fn beta0(&self, col: usize) -> Lin {
        let [r1, r2] = self.basis.as_ref().unwrap();
        Lin::new(Q::zero(), r1[col].clone(), r2[col].clone())
    }

    pub(super) fn beta(&self, g: usize, col: usize) -> Lin {
        let b0 = self.beta0(col);
        if g == 0 {
            b0
        } else {
            Lin::new(self.rho[col].clone(), Q::zero(), Q::zero()).sub(&b0)
        }
    }

    pub(super) fn det_d(&self) -> Lin {
        Lin::new(Q::zero(), self.s[1].clone(), -&self.s[0])
    }

    /// `α_g(row)·D` as a linear form in `c_0`.
    pub(super) fn alpha_d(&self, g: usize, row: usize) -> Lin {
        let q = &self.coords[row];
        let c = Lin::new(Q::zero(), q[1].clone(), -&q[0]);
        if g == 0 {
            Lin::new(det(q, &self.s), Q::zero(), Q::zero()).add(&c)
        } else {
            c
        }
    }
}

/// LP in `c_0 = u − v`, a margin `t` and extra nonnegative variables.
pub(super) struct TwoTermLp {
    lp: LinearProgram<Q>,
    nextra: usize,
}

pub(super) const T_VAR: usize = 4;
pub(super) const EXTRA0: usize = 5;

impl TwoTermLp {
    pub(super) fn new(g: &Geometry, nextra: usize) -> Self {
        let mut me = Self { lp: LinearProgram::new(EXTRA0 + nextra), nextra };
        let mut obj = vec![Q::zero(); EXTRA0 + nextra];
        obj[T_VAR] = Q::one();
        me.lp.maximize(obj);
        // D ≥ t
        me.push(&g.det_d(), &[(T_VAR, -Q::one())], Relation::Ge);
        for gg in 0..2 {
            for col in 0..4 {
                me.push(&g.beta(gg, col), &[], Relation::Ge);
            }
        }
        me
    }

    /// `lin(c_0) + Σ coeff·extra rel 0`.
    pub(super) fn push(&mut self, lin: &Lin, extra: &[(usize, Q)], rel: Relation) {
        let mut row = vec![Q::zero(); EXTRA0 + self.nextra];
        row[0] = lin.a.clone();
        row[1] = lin.b.clone();
        row[2] = -&lin.a;
        row[3] = -&lin.b;
        for (i, c) in extra {
            row[*i] += c;
        }
        self.lp.constrain(row, rel, -&lin.k);
    }

    /// Solution `(c_0, all variables)` when the maximal margin is positive.
    pub(super) fn solve(&self) -> Option<([Q; 2], Vec<Q>)> {
        match self.lp.solve() {
            LpOutcome::Optimal { x, value } if value.is_positive() => Some(([&x[0] - &x[2], &x[1] - &x[3]], x)),
            _ => None,
        }
    }
}

/// Assembles the model for a solution `c_0` of the row-space system.
pub(super) fn model_from_solution(
    g: &Geometry,
    c0: &[Q; 2],
    untrusted: Side,
    kind: TrustedKind,
) -> Result<HiddenVariableModel> {
    let d = g.det_d().eval(c0);
    let mut weights = Vec::new();
    let mut us = Vec::new();
    let mut ts = Vec::new();
    for gg in 0..2 {
        let beta: Vec<Q> = (0..4).map(|col| g.beta(gg, col).eval(c0)).collect();
        let w = &beta[0] + &beta[1];
        ts.push(SinglePartyBox::from_exact(beta.iter().map(|v| v / &w).collect())?);
        us.push(SinglePartyBox::from_exact((0..4).map(|row| g.alpha_d(gg, row).eval(c0) / &d).collect())?);
        weights.push(w);
    }
    HiddenVariableModel::new_exact(untrusted, kind, weights, us, ts)
}

fn oriented_exact(b: &CorrBox, untrusted: Side) -> Result<CorrBox> {
    if !b.is_rational() {
        return Err(Error::NotRational);
    }
    Ok(match untrusted {
        Side::Alice => b.clone(),
        Side::Bob => b.transpose(),
    })
}

/// Complete exact decision of `d = 2` for a rational box.
pub fn two_term_exact(b: &CorrBox, untrusted: Side, kind: TrustedKind) -> Result<ExactOutcome> {
    let t = oriented_exact(b, untrusted)?;
    let g = Geometry::new(t.exact().unwrap());
    match g.rank {
        r if r > 2 => Ok(ExactOutcome::Infeasible(format!(
            "the matrix P[(x,a),(b,y)] has rank {r}; a two-term model has rank at most 2"
        ))),
        1 => {
            // Rank one forces equal untrusted responses, i.e. a product box.
            let mu = t.marginal(Side::Alice)?;
            let mt = t.marginal(Side::Bob)?;
            if kind == TrustedKind::QubitMub && qubit_mub_realizable_exact(&mt) == Some(false) {
                return Ok(ExactOutcome::Infeasible(
                    "the box is a product and the trusted marginal is not qubit-realizable".into(),
                ));
            }
            let m = HiddenVariableModel::new_exact(untrusted, kind, vec![Q::one()], vec![mu], vec![mt])?;
            Ok(ExactOutcome::Feasible(m.padded(2)))
        }
        _ => rank_two(&g, untrusted, kind),
    }
}

fn rank_two(g: &Geometry, untrusted: Side, kind: TrustedKind) -> Result<ExactOutcome> {
    let base = |nextra: usize| {
        let mut lp = TwoTermLp::new(g, nextra);
        for gg in 0..2 {
            for row in 0..4 {
                lp.push(&g.alpha_d(gg, row), &[], Relation::Ge);
            }
        }
        lp
    };
    let Some((c0, _)) = base(0).solve() else {
        return Ok(ExactOutcome::Infeasible(
            "rank 2, but no split of the row space into two nonnegative trusted boxes yields valid untrusted responses".into(),
        ));
    };
    if kind == TrustedKind::Unconstrained {
        return Ok(ExactOutcome::Feasible(model_from_solution(g, &c0, untrusted, kind)?));
    }
    if let Ok(m) = model_from_solution(g, &c0, untrusted, kind) {
        return Ok(ExactOutcome::Feasible(m));
    }

    let pts = rational_circle_points();
    let half = Q::new(1.into(), 2.into());
    // Outer relaxation: tangent half-planes u·(2β(0|y) − W)_y ≤ W.
    let mut outer = base(0);
    for gg in 0..2 {
        let (b00, b10, b01, b11) = (g.beta(gg, 0), g.beta(gg, 1), g.beta(gg, 2), g.beta(gg, 3));
        let w = b00.add(&b10);
        for (u1, u2) in &pts {
            let lhs = b00.sub(&b10).scale(u1).add(&b01.sub(&b11).scale(u2));
            outer.push(&w.sub(&lhs), &[], Relation::Ge);
        }
    }
    if outer.solve().is_none() {
        return Ok(ExactOutcome::Infeasible(
            "no two-term model even with the trusted boxes relaxed to a polygon containing the disc".into(),
        ));
    }
    // Inner relaxation: β_g is a conic combination of disc boundary points.
    let k = pts.len();
    let mut inner = base(2 * k);
    for gg in 0..2 {
        for col in 0..4 {
            let (y, bit) = (col >> 1, col & 1);
            let terms: Vec<(usize, Q)> = pts
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let z = if y == 0 { &p.0 } else { &p.1 };
                    let p0 = &half * (Q::one() + z);
                    (super::twoterm::EXTRA0 + gg * k + j, -(if bit == 0 { p0 } else { Q::one() - p0 }))
                })
                .collect();
            inner.push(&g.beta(gg, col), &terms, Relation::Eq);
        }
    }
    if let Some((c0, _)) = inner.solve() {
        return Ok(ExactOutcome::Feasible(model_from_solution(g, &c0, untrusted, kind)?));
    }
    Ok(ExactOutcome::Undecided(
        "two-term qubit model not decided exactly: outer polygon relaxation feasible, inner one infeasible".into(),
    ))
}

/// Deterministic untrusted strategies as boxes, for the case enumeration.
pub(super) fn strategy_boxes() -> Vec<SinglePartyBox> {
    (0..4).map(strategy_box).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{deterministic_box, product_box, uniform_box};
    use crate::quantum::bb84_box_exact;
    use crate::scalar::q;

    #[test]
    fn product_boxes_are_rank_one() {
        let a = SinglePartyBox::from_p0_exact(q(1, 3), q(1, 2)).unwrap();
        let b = SinglePartyBox::from_p0_exact(q(1, 1), q(1, 4)).unwrap();
        let pb = product_box(&a, &b);
        match two_term_exact(&pb, Side::Alice, TrustedKind::Unconstrained).unwrap() {
            ExactOutcome::Feasible(m) => assert!(m.reproduces_exactly(&pb)),
            o => panic!("{o:?}"),
        }
        // trusted marginal (1, 1/4) lies outside the disc
        assert!(matches!(
            two_term_exact(&pb, Side::Alice, TrustedKind::QubitMub).unwrap(),
            ExactOutcome::Infeasible(_)
        ));
        assert!(matches!(
            two_term_exact(&uniform_box(), Side::Bob, TrustedKind::QubitMub).unwrap(),
            ExactOutcome::Feasible(_)
        ));
    }

    #[test]
    fn mixtures_of_two_products_are_found() {
        let d1 = deterministic_box(0, 0, 0, 0);
        let d2 = deterministic_box(1, 1, 0, 1);
        let mix = CorrBox::mixture_exact(&[(q(1, 3), &d1), (q(2, 3), &d2)]).unwrap();
        for side in [Side::Alice, Side::Bob] {
            match two_term_exact(&mix, side, TrustedKind::Unconstrained).unwrap() {
                ExactOutcome::Feasible(m) => assert!(m.reproduces_exactly(&mix)),
                o => panic!("{o:?}"),
            }
        }
    }

    #[test]
    fn bb84_has_rank_three() {
        let b = bb84_box_exact(&q(1, 2)).unwrap();
        assert!(matches!(two_term_exact(&b, Side::Alice, TrustedKind::QubitMub).unwrap(), ExactOutcome::Infeasible(_)));
    }
}
