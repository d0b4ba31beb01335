//! Case-by-case analysis of two-term models built from distinct
//! deterministic untrusted strategies: the six strategy pairs, the seven
//! ways of merging four strategies into two groups and the twelve ways of
//! merging three. Strategy `λ = 2α + β` answers `a = αx ⊕ β`; every strategy
//! in a case carries strictly positive weight.

use num_traits::{One, Zero};
use serde::Serialize;

use super::local::strategy_output;
use super::model::{HiddenVariableModel, TrustedKind};
use super::twoterm::{model_from_solution, strategy_boxes, two_term_exact, ExactOutcome, Geometry, Lin, TwoTermLp, EXTRA0, T_VAR};
use crate::boxes::{idx, CorrBox, Side, SinglePartyBox};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::scalar::{format_q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseFamily {
    /// Two distinct deterministic strategies, one per term.
    StrategyPair,
    /// Four strategies merged into two groups.
    FourToTwo,
    /// Three strategies, two of which share a trusted box.
    ThreeToTwo,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseOutcome {
    pub family: CaseFamily,
    pub label: String,
    /// Strategy names per group, e.g. `["D00", "D01"]`.
    pub groups: [Vec<String>; 2],
    pub feasible: bool,
    pub trace: Vec<String>,
    pub certificate: Option<HiddenVariableModel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneralOutcome {
    pub feasible: bool,
    pub detail: String,
    pub certificate: Option<HiddenVariableModel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub untrusted: Side,
    pub rank: usize,
    /// A one-term model exists, so two terms are unnecessary.
    pub product_model: bool,
    pub cases: Vec<CaseOutcome>,
    /// Unrestricted two-term decision, including untrusted responses that
    /// mix overlapping sets of strategies.
    pub general: GeneralOutcome,
}

impl CaseReport {
    pub fn family(&self, f: CaseFamily) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(move |c| c.family == f)
    }

    pub fn all_cases_infeasible(&self) -> bool {
        self.cases.iter().all(|c| !c.feasible)
    }

    pub fn any_feasible(&self) -> bool {
        self.product_model || self.general.feasible || self.cases.iter().any(|c| c.feasible)
    }
}

pub(super) fn strategy_name(l: usize) -> String {
    format!("D{}{}", l >> 1, l & 1)
}

fn enumerate() -> Vec<(CaseFamily, String, [Vec<usize>; 2])> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            out.push((CaseFamily::StrategyPair, format!("{{{}, {}}}", strategy_name(i), strategy_name(j)), [vec![i], vec![j]]));
        }
    }
    let four: [[Vec<usize>; 2]; 7] = [
        [vec![0, 1, 2], vec![3]],
        [vec![0, 1, 3], vec![2]],
        [vec![0, 2, 3], vec![1]],
        [vec![1, 2, 3], vec![0]],
        [vec![0, 1], vec![2, 3]],
        [vec![0, 2], vec![1, 3]],
        [vec![0, 3], vec![1, 2]],
    ];
    for (n, g) in four.into_iter().enumerate() {
        out.push((CaseFamily::FourToTwo, format!("({})", (b'a' + n as u8) as char), g));
    }
    let triples = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let pairs = [(0, 1, 2), (1, 2, 0), (0, 2, 1)];
    let mut n = 0u8;
    for t in triples {
        for (i, j, k) in pairs {
            out.push((CaseFamily::ThreeToTwo, format!("({})", (b'a' + n) as char), [vec![t[i], t[j]], vec![t[k]]]));
            n += 1;
        }
    }
    out
}

/// Contradiction derived from the zero entries of the box: a zero
/// `P(ab|xy)` forces `P(b|y) = 0` in every group holding a strategy with
/// `f(x) = a`; a nonzero entry whose contributing groups are all forced
/// cannot be reproduced.
fn zero_trace(e: &[Q], groups: &[Vec<usize>; 2]) -> (Vec<String>, bool) {
    let contributing =
        |x: usize, a: usize| -> Vec<usize> { (0..2).filter(|&g| groups[g].iter().any(|&l| strategy_output(l, x) == a)).collect() };
    let mut forced = [[[false; 2]; 2]; 2];
    let mut trace = Vec::new();
    let entries: Vec<(usize, usize, usize, usize)> =
        (0..16).map(|i| (i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1)).collect();
    let check = |forced: &[[[bool; 2]; 2]; 2], trace: &mut Vec<String>| -> bool {
        for g in 0..2 {
            for y in 0..2 {
                if forced[g][y][0] && forced[g][y][1] {
                    trace.push(format!("then group {g} has P(0|{y}) = P(1|{y}) = 0, which is not a distribution"));
                    return true;
                }
            }
        }
        for &(x, y, a, b) in &entries {
            let v = &e[idx(x, y, a, b)];
            if v.is_zero() {
                continue;
            }
            let c = contributing(x, a);
            if c.iter().all(|&g| forced[g][y][b]) {
                let why = if c.is_empty() { format!(" (no strategy outputs a={a} at x={x})") } else { String::new() };
                trace.push(format!("then P({a}{b}|{x}{y}) also becomes 0{why}, but the box has P({a}{b}|{x}{y}) = {}", format_q(v)));
                return true;
            }
        }
        false
    };
    if check(&forced, &mut trace) {
        return (trace, true);
    }
    for &(x, y, a, b) in &entries {
        if !e[idx(x, y, a, b)].is_zero() {
            continue;
        }
        let c = contributing(x, a);
        if c.iter().all(|&g| forced[g][y][b]) {
            continue;
        }
        for &g in &c {
            forced[g][y][b] = true;
        }
        let names: Vec<String> = c.iter().map(|g| format!("group {g}")).collect();
        trace.push(format!("if we want to satisfy P({a}{b}|{x}{y}) = 0, the trusted box of {} must give P({b}|{y}) = 0", names.join(" and ")));
        if check(&forced, &mut trace) {
            return (trace, true);
        }
    }
    trace.push("the zero pattern alone gives no contradiction; the remaining linear system has no solution with positive weights".into());
    (trace, false)
}

fn decide_case(g: &Geometry, marg_u: &SinglePartyBox, marg_t: &SinglePartyBox, groups: &[Vec<usize>; 2], untrusted: Side) -> Result<Option<HiddenVariableModel>> {
    match g.rank {
        r if r > 2 => Ok(None),
        1 => {
            // Both groups share the trusted marginal; the union of strategies
            // must reproduce the untrusted marginal with positive weights.
            let all: Vec<usize> = groups.iter().flatten().copied().collect();
            let n = all.len();
            let mut lp = LinearProgram::<Q>::new(n + 1);
            let mut obj = vec![Q::zero(); n + 1];
            obj[n] = Q::one();
            lp.maximize(obj);
            for i in 0..n {
                lp.constrain_terms(&[(i, Q::one()), (n, -Q::one())], Relation::Ge, Q::zero());
            }
            let ones: Vec<(usize, Q)> = (0..n).map(|i| (i, Q::one())).collect();
            lp.constrain_terms(&ones, Relation::Eq, Q::one());
            for x in 0..2 {
                for a in 0..2 {
                    let terms: Vec<(usize, Q)> =
                        (0..n).filter(|&i| strategy_output(all[i], x) == a).map(|i| (i, Q::one())).collect();
                    lp.constrain_terms(&terms, Relation::Eq, marg_u.exact_prob(x, a).unwrap().clone());
                }
            }
            let LpOutcome::Optimal { x: w, value } = lp.solve() else { return Ok(None) };
            if value <= Q::zero() {
                return Ok(None);
            }
            let strat = strategy_boxes();
            let mut weights = Vec::new();
            let mut us = Vec::new();
            let mut off = 0;
            for grp in groups {
                let ws = &w[off..off + grp.len()];
                off += grp.len();
                let tot: Q = ws.iter().sum();
                let mut acc = vec![Q::zero(); 4];
                for (wi, &l) in ws.iter().zip(grp) {
                    for (k, v) in strat[l].exact().unwrap().iter().enumerate() {
                        acc[k] += wi * v / &tot;
                    }
                }
                us.push(SinglePartyBox::from_exact(acc)?);
                weights.push(tot);
            }
            let ts = vec![marg_t.clone(), marg_t.clone()];
            Ok(Some(HiddenVariableModel::new_exact(untrusted, TrustedKind::Unconstrained, weights, us, ts)?))
        }
        _ => {
            for flip in [false, true] {
                let gs = if flip { [&groups[1], &groups[0]] } else { [&groups[0], &groups[1]] };
                let n0 = gs[0].len();
                let n = n0 + gs[1].len();
                let mut lp = TwoTermLp::new(g, n);
                for i in 0..n {
                    lp.push(&Lin::zero(), &[(EXTRA0 + i, Q::one()), (T_VAR, -Q::one())], Relation::Ge);
                }
                for (gg, grp) in gs.iter().enumerate() {
                    let off = if gg == 0 { 0 } else { n0 };
                    for row in 0..4 {
                        let (x, a) = (row >> 1, row & 1);
                        let terms: Vec<(usize, Q)> = grp
                            .iter()
                            .enumerate()
                            .filter(|(_, &l)| strategy_output(l, x) == a)
                            .map(|(i, _)| (EXTRA0 + off + i, -Q::one()))
                            .collect();
                        lp.push(&g.alpha_d(gg, row), &terms, Relation::Eq);
                    }
                }
                if let Some((c0, _)) = lp.solve() {
                    let m = model_from_solution(g, &c0, untrusted, TrustedKind::Unconstrained)?;
                    return Ok(Some(m));
                }
            }
            Ok(None)
        }
    }
}

/// Runs every case on a rational box with `untrusted` as the party whose
/// responses are deterministic strategies; trusted boxes are unconstrained.
pub fn case_analysis(b: &CorrBox, untrusted: Side) -> Result<CaseReport> {
    if !b.is_rational() {
        return Err(Error::NotRational);
    }
    b.require_nosignaling()?;
    let t = match untrusted {
        Side::Alice => b.clone(),
        Side::Bob => b.transpose(),
    };
    let e = t.exact().unwrap().to_vec();
    let g = Geometry::new(&e);
    let marg_u = t.marginal(Side::Alice)?;
    let marg_t = t.marginal(Side::Bob)?;
    let product_model = g.rank == 1;

    let mut cases = Vec::new();
    for (family, label, groups) in enumerate() {
        let cert = decide_case(&g, &marg_u, &marg_t, &groups, untrusted)?;
        let trace = if cert.is_some() {
            vec!["feasible: exact certificate found".to_string()]
        } else {
            let mut tr = Vec::new();
            if g.rank > 2 {
                tr.push(format!("the matrix P[(x,a),(b,y)] has rank {} > 2", g.rank));
            }
            tr.extend(zero_trace(&e, &groups).0);
            tr
        };
        cases.push(CaseOutcome {
            family,
            label,
            groups: [0, 1].map(|i| groups[i].iter().map(|&l| strategy_name(l)).collect()),
            feasible: cert.is_some(),
            trace,
            certificate: cert,
        });
    }
    let general = match two_term_exact(b, untrusted, TrustedKind::Unconstrained)? {
        ExactOutcome::Feasible(m) => GeneralOutcome {
            feasible: true,
            detail: "a two-term model exists when untrusted responses may mix overlapping strategy sets".into(),
            certificate: Some(m),
        },
        ExactOutcome::Infeasible(s) | ExactOutcome::Undecided(s) => GeneralOutcome { feasible: false, detail: s, certificate: None },
    };
    Ok(CaseReport { untrusted, rank: g.rank, product_model, cases, general })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_five_cases_in_order() {
        let c = enumerate();
        assert_eq!(c.len(), 25);
        assert_eq!(c[6].2, [vec![0, 1, 2], vec![3]]);
        assert_eq!(c[13].1, "(a)");
        assert_eq!(c[13].2, [vec![0, 1], vec![2]]);
        assert_eq!(c[14].2, [vec![1, 2], vec![0]]);
        assert_eq!(c[24].1, "(l)");
        assert_eq!(c[24].2, [vec![1, 3], vec![2]]);
    }
}
