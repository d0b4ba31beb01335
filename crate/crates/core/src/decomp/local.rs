use std::f64::consts::PI;

use num_traits::{One, Zero};

use super::model::{qubit_mub_realizable, qubit_mub_realizable_exact, HiddenVariableModel, TrustedKind};
use super::search::multistart_search;
use super::{FeasibilityResult, Method, SolverConfig, Verdict};
use crate::boxes::{all_deterministic_boxes, chsh_labels, for_each_entry, idx, product_box, CorrBox, Side, SinglePartyBox};
use crate::error::Result;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::scalar::{q, Scalar, Q};

const FLOAT_POLYGON: usize = 256;
const LOCAL_FLOAT_TOL: f64 = 1e-9;

/// Largest CHSH value over the eight relabelled functionals, exactly.
pub fn max_chsh_exact(b: &CorrBox) -> Option<(Q, (u8, u8, u8))> {
    chsh_labels()
        .map(|l| b.chsh_value_exact(l.0, l.1, l.2).map(|v| (v, l)))
        .collect::<Option<Vec<_>>>()?
        .into_iter()
        .fold(None, |best: Option<(Q, (u8, u8, u8))>, cur| match best {
            Some(bv) if bv.0 >= cur.0 => Some(bv),
            _ => Some(cur),
        })
}

/// `f_λ(x)` for the strategy `λ = 2α + β`, i.e. `αx ⊕ β`.
pub(super) fn strategy_output(lambda: usize, x: usize) -> usize {
    ((lambda >> 1) & x) ^ (lambda & 1)
}

pub(super) fn strategy_box(lambda: usize) -> SinglePartyBox {
    SinglePartyBox::deterministic((lambda >> 1) as u8, (lambda & 1) as u8)
}

fn vertex_lp<T: Scalar>(target: &[T]) -> LinearProgram<T> {
    let dets = all_deterministic_boxes();
    let mut lp = LinearProgram::new(16);
    for i in 0..16 {
        let row: Vec<T> = dets.iter().map(|d| if d.entries()[i] > 0.5 { T::unit() } else { T::nil() }).collect();
        lp.constrain(row, Relation::Eq, target[i].clone());
    }
    let ones = vec![T::unit(); 16];
    lp.constrain(ones, Relation::Eq, T::unit());
    lp
}

/// Convex decomposition into the 16 deterministic boxes `(α, β, γ, ε)`,
/// returned as weights in lexicographic vertex order.
fn vertex_weights(b: &CorrBox) -> Option<VertexWeights> {
    if let Some(e) = b.exact() {
        match vertex_lp::<Q>(e).solve() {
            LpOutcome::Optimal { x, .. } => Some(VertexWeights::Exact(x)),
            _ => None,
        }
    } else {
        match vertex_lp::<f64>(b.entries()).solve() {
            LpOutcome::Optimal { x, .. } => {
                let s: f64 = x.iter().map(|v| v.max(0.0)).sum();
                Some(VertexWeights::Float(x.iter().map(|v| v.max(0.0) / s).collect()))
            }
            _ => None,
        }
    }
}

enum VertexWeights {
    Exact(Vec<Q>),
    Float(Vec<f64>),
}

/// Membership in the local polytope by LP over the deterministic vertices.
pub fn local_membership(b: &CorrBox) -> Result<FeasibilityResult> {
    b.require_nosignaling()?;
    let method = if b.is_rational() { Method::ExactLp } else { Method::FloatLp };
    let mk = |v| FeasibilityResult::new(v, 16, Side::Alice, TrustedKind::Unconstrained, method);
    let Some(w) = vertex_weights(b) else {
        let (chsh, l) = b.max_chsh();
        let verdict = if b.is_rational() || chsh > 2.0 + 1e-9 { Verdict::InfeasibleExact } else { Verdict::InfeasibleNumeric };
        return Ok(mk(verdict).note(format!("CHSH functional (α,β,γ)={l:?} evaluates to {chsh:.9} > 2")));
    };
    let support: Vec<usize> = match &w {
        VertexWeights::Exact(x) => (0..16).filter(|&k| !x[k].is_zero()).collect(),
        VertexWeights::Float(x) => (0..16).filter(|&k| x[k] > 0.0).collect(),
    };
    let u: Vec<SinglePartyBox> = support.iter().map(|&k| strategy_box(k >> 2)).collect();
    let t: Vec<SinglePartyBox> = support.iter().map(|&k| strategy_box(k & 3)).collect();
    let model = match &w {
        VertexWeights::Exact(x) => HiddenVariableModel::new_exact(
            Side::Alice,
            TrustedKind::Unconstrained,
            support.iter().map(|&k| x[k].clone()).collect(),
            u,
            t,
        )?,
        VertexWeights::Float(x) => {
            HiddenVariableModel::new(Side::Alice, TrustedKind::Unconstrained, support.iter().map(|&k| x[k]).collect(), u, t)?
        }
    };
    let err = model.reconstruction_error(b);
    if !b.is_rational() && err > LOCAL_FLOAT_TOL {
        return Ok(mk(Verdict::Inconclusive).note(format!("floating LP decomposition misses the box by {err:.3e}")));
    }
    let mut r = mk(Verdict::Feasible).with_certificate(model);
    r.d = support.len();
    Ok(r)
}

fn oriented(b: &CorrBox, untrusted: Side) -> CorrBox {
    match untrusted {
        Side::Alice => b.clone(),
        Side::Bob => b.transpose(),
    }
}

/// One-term model: the box is the product of its marginals.
pub(super) fn product_model(b: &CorrBox, untrusted: Side, kind: TrustedKind, tol: f64) -> Option<HiddenVariableModel> {
    let t = oriented(b, untrusted);
    let mu = t.marginal(Side::Alice).ok()?;
    let mt = t.marginal(Side::Bob).ok()?;
    let prod = product_box(&mu, &mt);
    let same = match (prod.exact(), t.exact()) {
        (Some(x), Some(y)) => x == y,
        _ => prod.max_abs_diff(&t) <= tol,
    };
    let ok_kind = match kind {
        TrustedKind::Unconstrained => true,
        TrustedKind::QubitMub => qubit_mub_realizable_exact(&mt).unwrap_or_else(|| qubit_mub_realizable(&mt)),
    };
    if !(same && ok_kind) {
        return None;
    }
    if mu.is_rational() && mt.is_rational() {
        HiddenVariableModel::new_exact(untrusted, kind, vec![Q::one()], vec![mu], vec![mt]).ok()
    } else {
        HiddenVariableModel::new(untrusted, kind, vec![1.0], vec![mu], vec![mt]).ok()
    }
}

/// Axes and the 3-4-5 points.
const COARSE_POINTS: usize = 12;

/// Unit vectors with rational coordinates: the axes and the Pythagorean
/// triples with hypotenuse at most 65, in all octants.
pub(super) fn rational_circle_points() -> Vec<(Q, Q)> {
    const TRIPLES: [(i64, i64, i64); 11] = [
        (3, 4, 5),
        (5, 12, 13),
        (8, 15, 17),
        (7, 24, 25),
        (20, 21, 29),
        (12, 35, 37),
        (9, 40, 41),
        (28, 45, 53),
        (11, 60, 61),
        (33, 56, 65),
        (16, 63, 65),
    ];
    let mut pts = vec![(q(1, 1), q(0, 1)), (q(-1, 1), q(0, 1)), (q(0, 1), q(1, 1)), (q(0, 1), q(-1, 1))];
    for (a, b, c) in TRIPLES {
        for (u, v) in [(a, b), (b, a)] {
            for (su, sv) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                pts.push((q(su * u, c), q(sv * v, c)));
            }
        }
    }
    pts
}

fn float_circle_points() -> Vec<(f64, f64)> {
    (0..FLOAT_POLYGON)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / FLOAT_POLYGON as f64;
            (th.cos(), th.sin())
        })
        .collect()
}

/// Inner polygon LP: each strategy's unnormalized trusted box is a conic
/// combination of disc boundary points. Returns `μ[λ][k]`.
fn inner_lp<T: Scalar>(target: &[T], pts: &[(T, T)]) -> Option<Vec<Vec<T>>> {
    let k = pts.len();
    let half = T::unit().div(&T::from_i64(2));
    let tb = |p: &(T, T), b: usize, y: usize| {
        let z = if y == 0 { &p.0 } else { &p.1 };
        let v = half.mul(&T::unit().add(z));
        if b == 0 { v } else { T::unit().sub(&v) }
    };
    let mut lp = LinearProgram::new(4 * k);
    for_each_entry(|x, y, a, b| {
        let mut row = vec![T::nil(); 4 * k];
        for lambda in (0..4).filter(|&l| strategy_output(l, x) == a) {
            for (j, p) in pts.iter().enumerate() {
                row[lambda * k + j] = tb(p, b, y);
            }
        }
        lp.constrain(row, Relation::Eq, target[idx(x, y, a, b)].clone());
    });
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some(x.chunks(k).map(<[T]>::to_vec).collect()),
        _ => None,
    }
}

/// Outer polygon LP: tangent half-planes at `pts` relax the disc.
fn outer_feasible<T: Scalar>(target: &[T], pts: &[(T, T)]) -> bool {
    // variables β_λ(b|y) at 4λ + 2y + b
    let v = |l: usize, b: usize, y: usize| 4 * l + 2 * y + b;
    let mut lp = LinearProgram::new(16);
    let one = T::unit();
    for_each_entry(|x, y, a, b| {
        let terms: Vec<(usize, T)> = (0..4).filter(|&l| strategy_output(l, x) == a).map(|l| (v(l, b, y), one.clone())).collect();
        lp.constrain_terms(&terms, Relation::Eq, target[idx(x, y, a, b)].clone());
    });
    for l in 0..4 {
        lp.constrain_terms(
            &[(v(l, 0, 0), one.clone()), (v(l, 1, 0), one.clone()), (v(l, 0, 1), one.neg()), (v(l, 1, 1), one.neg())],
            Relation::Eq,
            T::nil(),
        );
        for (u1, u2) in pts {
            // u1(β00 − β10) + u2(β01 − β11) ≤ β00 + β10
            lp.constrain_terms(
                &[
                    (v(l, 0, 0), u1.sub(&one)),
                    (v(l, 1, 0), u1.neg().sub(&one)),
                    (v(l, 0, 1), u2.clone()),
                    (v(l, 1, 1), u2.neg()),
                ],
                Relation::Le,
                T::nil(),
            );
        }
    }
    lp.solve().is_feasible()
}

fn exact_grouped_model(untrusted: Side, kind: TrustedKind, weights: Vec<Q>, p0: Vec<[Q; 2]>) -> Result<HiddenVariableModel> {
    let u: Vec<SinglePartyBox> = (0..4).map(strategy_box).collect();
    let t = p0
        .into_iter()
        .map(|[p, r]| SinglePartyBox::from_p0_exact(p, r))
        .collect::<Result<Vec<_>>>()?;
    HiddenVariableModel::new_exact(untrusted, kind, weights, u, t)
}

fn float_grouped_model(untrusted: Side, kind: TrustedKind, weights: &[f64], p0: &[[f64; 2]]) -> Result<HiddenVariableModel> {
    let u: Vec<SinglePartyBox> = (0..4).map(strategy_box).collect();
    let s: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    let w: Vec<f64> = weights.iter().map(|v| v.max(0.0) / s).collect();
    let t = p0
        .iter()
        .map(|p| {
            let (mut z0, mut z1) = (2.0 * p[0].clamp(0.0, 1.0) - 1.0, 2.0 * p[1].clamp(0.0, 1.0) - 1.0);
            let r = (z0 * z0 + z1 * z1).sqrt();
            if kind == TrustedKind::QubitMub && r > 1.0 {
                z0 /= r;
                z1 /= r;
            }
            SinglePartyBox::from_p0((1.0 + z0) / 2.0, (1.0 + z1) / 2.0)
        })
        .collect::<Result<Vec<_>>>()?;
    HiddenVariableModel::new(untrusted, kind, w, u, t)
}

/// Group weights and conditional trusted boxes from per-strategy
/// unnormalized trusted boxes `β_λ(0|y)` and masses `W_λ`.
fn normalize_groups<T: Scalar>(mass: &[T], beta0: &[[T; 2]]) -> Vec<[T; 2]> {
    let half = T::unit().div(&T::from_i64(2));
    mass.iter()
        .zip(beta0)
        .map(|(w, b)| {
            if w.is_positive_tol() {
                [b[0].div(w), b[1].div(w)]
            } else {
                [half.clone(), half.clone()]
            }
        })
        .collect()
}

/// Per-strategy masses and conditional trusted boxes from the inner LP.
fn inner_groups<T: Scalar>(target: &[T], pts: &[(T, T)]) -> Option<(Vec<T>, Vec<[T; 2]>)> {
    let mu = inner_lp(target, pts)?;
    let half = T::unit().div(&T::from_i64(2));
    let mass: Vec<T> = mu.iter().map(|m| m.iter().fold(T::nil(), |s, v| s.add(v))).collect();
    let beta0: Vec<[T; 2]> = mu
        .iter()
        .map(|m| {
            let mut acc = [T::nil(), T::nil()];
            for (w, p) in m.iter().zip(pts) {
                acc[0] = acc[0].add(&w.mul(&half.mul(&T::unit().add(&p.0))));
                acc[1] = acc[1].add(&w.mul(&half.mul(&T::unit().add(&p.1))));
            }
            acc
        })
        .collect();
    let p0 = normalize_groups(&mass, &beta0);
    Some((mass, p0))
}

/// Four-term models, which are as general as any number of terms: every
/// model regroups by the untrusted party's deterministic strategies.
pub(super) fn four_term(b: &CorrBox, untrusted: Side, kind: TrustedKind, cfg: &SolverConfig) -> Result<FeasibilityResult> {
    let t = oriented(b, untrusted);
    match kind {
        TrustedKind::Unconstrained => {
            let local = local_membership(&t)?;
            let mut r = FeasibilityResult::new(local.verdict, 4, untrusted, kind, local.method);
            r.detail = local.detail.clone();
            let Some(cert) = local.certificate else { return Ok(r) };
            // Regroup the vertex decomposition by the untrusted strategy.
            let mut mass = vec![Q::zero(); 4];
            let mut beta0 = vec![[Q::zero(), Q::zero()]; 4];
            let mut fmass = [0.0; 4];
            let mut fbeta0 = [[0.0; 2]; 4];
            for i in 0..cert.dim() {
                let lu = strategy_index(&cert.untrusted_responses()[i]);
                let tr = &cert.trusted_responses()[i];
                if let Some(w) = cert.exact_weights() {
                    mass[lu] += &w[i];
                    beta0[lu][0] += &w[i] * tr.exact_prob(0, 0).unwrap();
                    beta0[lu][1] += &w[i] * tr.exact_prob(1, 0).unwrap();
                }
                let w = cert.weights()[i];
                fmass[lu] += w;
                fbeta0[lu][0] += w * tr.prob(0, 0);
                fbeta0[lu][1] += w * tr.prob(1, 0);
            }
            let model = if cert.exact_weights().is_some() {
                let p0 = normalize_groups(&mass, &beta0);
                exact_grouped_model(untrusted, kind, mass, p0)?
            } else {
                let p0 = normalize_groups(&fmass, &fbeta0);
                float_grouped_model(untrusted, kind, &fmass, &p0)?
            };
            Ok(r.with_certificate(model))
        }
        TrustedKind::QubitMub => {
            let mk = |v| FeasibilityResult::new(v, 4, untrusted, kind, Method::PolygonLp);
            if let Some(e) = t.exact() {
                let all = rational_circle_points();
                // A coarse polygon first; the full one only when it is not decisive.
                for pts in [&all[..COARSE_POINTS], &all[..]] {
                    if !outer_feasible::<Q>(e, pts) {
                        return Ok(mk(Verdict::InfeasibleExact)
                            .note("infeasible even with trusted boxes relaxed to a polygon containing the disc"));
                    }
                    if let Some((mass, p0)) = inner_groups::<Q>(e, pts) {
                        let m = exact_grouped_model(untrusted, kind, mass, p0)?;
                        if m.reproduces_exactly(b) {
                            return Ok(mk(Verdict::Feasible).with_certificate(m));
                        }
                    }
                }
            }
            let fp = float_circle_points();
            if let Some((mass, p0)) = inner_groups::<f64>(t.entries(), &fp) {
                let m = float_grouped_model(untrusted, kind, &mass, &p0)?;
                let err = m.reconstruction_error(b);
                if err <= cfg.certificate_tol {
                    return Ok(mk(Verdict::Feasible).with_certificate(m));
                }
            }
            if !t.is_rational() && !outer_feasible::<f64>(t.entries(), &fp) {
                return Ok(mk(Verdict::InfeasibleNumeric)
                    .note("floating LP infeasible with trusted boxes relaxed to a polygon containing the disc"));
            }
            let (stats, model) = multistart_search(b, 4, untrusted, kind, cfg)?;
            Ok(super::numeric_result(4, untrusted, kind, cfg, stats, model)
                .note("polygon relaxations did not decide; multi-start search"))
        }
    }
}

fn strategy_index(u: &SinglePartyBox) -> usize {
    (0..4)
        .find(|&l| (0..2).all(|x| u.prob(x, strategy_output(l, x)) > 0.5))
        .expect("vertex decomposition uses deterministic responses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{deterministic_box, pr_box, uniform_box};

    #[test]
    fn strategies_follow_labels() {
        for l in 0..4 {
            let s = strategy_box(l);
            for x in 0..2 {
                assert_eq!(s.prob(x, strategy_output(l, x)), 1.0);
            }
            assert_eq!(strategy_index(&s), l);
        }
    }

    #[test]
    fn vertices_and_pr_box() {
        assert_eq!(local_membership(&deterministic_box(1, 0, 1, 1)).unwrap().verdict, Verdict::Feasible);
        let r = local_membership(&pr_box()).unwrap();
        assert_eq!(r.verdict, Verdict::InfeasibleExact);
        assert!(r.detail[0].contains("CHSH"));
        assert_eq!(max_chsh_exact(&pr_box()).unwrap().0, q(4, 1));
        assert_eq!(max_chsh_exact(&uniform_box()).unwrap().0, q(0, 1));
    }

    #[test]
    fn circle_points_are_unit() {
        for (a, b) in rational_circle_points() {
            assert!((&a * &a + &b * &b).is_one());
        }
    }
}
