//! Two-input/two-output bipartite boxes `p(ab|xy)`, their marginals, local
//! relabelings and CHSH functionals.
//!
//! Entries are indexed `(x, y, a, b)` with bit values. A box built from exact
//! rationals keeps them alongside the `f64` view so that equality, locality
//! and decomposition checks on tables with rational entries stay exact.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_q, q, Scalar, Q};

/// Normalization tolerance for floating boxes.
pub const NORM_TOL: f64 = 1e-12;
/// Default tolerance for no-signaling checks on floating boxes.
pub const NS_TOL: f64 = 1e-9;

#[inline]
pub fn idx(x: usize, y: usize, a: usize, b: usize) -> usize {
    ((x * 2 + y) * 2 + a) * 2 + b
}

/// Which party of the bipartite scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Alice => Side::Bob,
            Side::Bob => Side::Alice,
        }
    }
}

/// Joint conditional distribution `p(ab|xy)` of a 2×2×2×2 scenario.
#[derive(Clone)]
pub struct CorrBox {
    p: [f64; 16],
    exact: Option<Vec<Q>>,
}

impl CorrBox {
    /// Builds an exact box from a rational-valued table.
    pub fn from_fn_exact(f: impl Fn(usize, usize, usize, usize) -> Q) -> Result<Self> {
        let mut exact = vec![Q::zero(); 16];
        for_each_entry(|x, y, a, b| exact[idx(x, y, a, b)] = f(x, y, a, b));
        Self::from_exact(exact)
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut p = [0.0; 16];
        for_each_entry(|x, y, a, b| p[idx(x, y, a, b)] = f(x, y, a, b));
        Self::from_f64(p)
    }

    /// Builds an exact box from the printed-table layout: one row per `(x, y)`
    /// in lexicographic order, columns `(a, b)` = 00, 01, 10, 11.
    pub fn from_rows_exact(rows: [[Q; 4]; 4]) -> Result<Self> {
        Self::from_exact(rows.into_iter().flatten().collect())
    }

    pub fn from_exact(exact: Vec<Q>) -> Result<Self> {
        if exact.len() != 16 {
            return Err(Error::InvalidBox(format!("expected 16 entries, got {}", exact.len())));
        }
        for (i, v) in exact.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::InvalidBox(format!("negative entry {} at {}", format_q(v), entry_name(i))));
            }
        }
        for x in 0..2 {
            for y in 0..2 {
                let s: Q = (0..4).map(|k| &exact[(x * 2 + y) * 4 + k]).sum();
                if !s.is_one() {
                    return Err(Error::InvalidBox(format!("row (x={x}, y={y}) sums to {}", format_q(&s))));
                }
            }
        }
        let mut p = [0.0; 16];
        for (i, v) in exact.iter().enumerate() {
            p[i] = v.approx();
        }
        Ok(Self { p, exact: Some(exact) })
    }

    pub fn from_f64(p: [f64; 16]) -> Result<Self> {
        for (i, v) in p.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidBox(format!("entry {v} at {} is negative or not finite", entry_name(i))));
            }
        }
        for x in 0..2 {
            for y in 0..2 {
                let s: f64 = p[(x * 2 + y) * 4..(x * 2 + y) * 4 + 4].iter().sum();
                if (s - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidBox(format!("row (x={x}, y={y}) sums to {s}")));
                }
            }
        }
        Ok(Self { p, exact: None })
    }

    pub fn p(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[idx(x, y, a, b)]
    }

    pub fn entries(&self) -> &[f64; 16] {
        &self.p
    }

    pub fn exact(&self) -> Option<&[Q]> {
        self.exact.as_deref()
    }

    pub fn exact_entry(&self, x: usize, y: usize, a: usize, b: usize) -> Option<&Q> {
        self.exact.as_ref().map(|e| &e[idx(x, y, a, b)])
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    /// Drops the exact representation.
    pub fn to_float(&self) -> CorrBox {
        CorrBox { p: self.p, exact: None }
    }

    /// Swaps the roles of Alice and Bob: `p'(ab|xy) = p(ba|yx)`.
    pub fn transpose(&self) -> CorrBox {
        let mut p = [0.0; 16];
        let mut exact = self.exact.as_ref().map(|_| vec![Q::zero(); 16]);
        for_each_entry(|x, y, a, b| {
            p[idx(x, y, a, b)] = self.p[idx(y, x, b, a)];
            if let (Some(dst), Some(src)) = (exact.as_mut(), self.exact.as_ref()) {
                dst[idx(x, y, a, b)] = src[idx(y, x, b, a)].clone();
            }
        });
        CorrBox { p, exact }
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &CorrBox) -> f64 {
        self.p.iter().zip(other.p.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Exact equality when both boxes are rational, otherwise entrywise within `tol`.
    pub fn matches(&self, other: &CorrBox, tol: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.max_abs_diff(other) <= tol,
        }
    }

    /// Entries `(x, y, a, b)` where two boxes differ (exactly, or beyond `tol`).
    pub fn mismatches(&self, other: &CorrBox, tol: f64) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        for_each_entry(|x, y, a, b| {
            let i = idx(x, y, a, b);
            let differs = match (&self.exact, &other.exact) {
                (Some(e), Some(f)) => e[i] != f[i],
                _ => (self.p[i] - other.p[i]).abs() > tol,
            };
            if differs {
                out.push((x, y, a, b));
            }
        });
        out
    }

    /// Convex mixture of boxes; exact when every box and weight is exact.
    pub fn mixture_exact(parts: &[(Q, &CorrBox)]) -> Result<CorrBox> {
        let mut acc = vec![Q::zero(); 16];
        for (w, bx) in parts {
            let e = bx.exact.as_ref().ok_or(Error::NotRational)?;
            for i in 0..16 {
                acc[i] += w * &e[i];
            }
        }
        CorrBox::from_exact(acc)
    }

    pub fn mixture(parts: &[(f64, &CorrBox)]) -> Result<CorrBox> {
        let mut acc = [0.0; 16];
        for (w, bx) in parts {
            for i in 0..16 {
                acc[i] += w * bx.p[i];
            }
        }
        CorrBox::from_f64(acc)
    }

    /// Marginal of one party; fails if the two candidate marginals (summing
    /// over the other party's two inputs) disagree.
    pub fn marginal(&self, side: Side) -> Result<SinglePartyBox> {
        if let Some(e) = &self.exact {
            let cand = |other_input: usize| -> Vec<Q> {
                let mut m = vec![Q::zero(); 4];
                for own in 0..2 {
                    for out in 0..2 {
                        m[own * 2 + out] = (0..2)
                            .map(|o| match side {
                                Side::Alice => &e[idx(own, other_input, out, o)],
                                Side::Bob => &e[idx(other_input, own, o, out)],
                            })
                            .sum();
                    }
                }
                m
            };
            let (m0, m1) = (cand(0), cand(1));
            if m0 != m1 {
                return Err(Error::Signaling(format!("{side:?}'s marginal depends on the other party's input")));
            }
            return SinglePartyBox::from_exact(m0);
        }
        let cand = |other_input: usize| -> [f64; 4] {
            let mut m = [0.0; 4];
            for own in 0..2 {
                for out in 0..2 {
                    m[own * 2 + out] = (0..2)
                        .map(|o| match side {
                            Side::Alice => self.p(own, other_input, out, o),
                            Side::Bob => self.p(other_input, own, o, out),
                        })
                        .sum();
                }
            }
            m
        };
        let (m0, m1) = (cand(0), cand(1));
        let dev = m0.iter().zip(m1.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if dev > NS_TOL {
            return Err(Error::Signaling(format!(
                "{side:?}'s marginal depends on the other party's input (deviation {dev:.3e})"
            )));
        }
        let avg = [0, 1, 2, 3].map(|i| 0.5 * (m0[i] + m1[i]));
        SinglePartyBox::from_f64(avg)
    }

    /// No-signaling check: exact for rational boxes, within `tol` otherwise.
    pub fn is_nosignaling(&self, tol: f64) -> bool {
        if self.exact.is_some() {
            return self.marginal(Side::Alice).is_ok() && self.marginal(Side::Bob).is_ok();
        }
        let mut worst: f64 = 0.0;
        for own in 0..2 {
            for out in 0..2 {
                let a0: f64 = (0..2).map(|b| self.p(own, 0, out, b)).sum();
                let a1: f64 = (0..2).map(|b| self.p(own, 1, out, b)).sum();
                let b0: f64 = (0..2).map(|a| self.p(0, own, a, out)).sum();
                let b1: f64 = (0..2).map(|a| self.p(1, own, a, out)).sum();
                worst = worst.max((a0 - a1).abs()).max((b0 - b1).abs());
            }
        }
        worst <= tol
    }

    pub fn require_nosignaling(&self) -> Result<()> {
        self.marginal(Side::Alice)?;
        self.marginal(Side::Bob)?;
        Ok(())
    }

    /// `⟨A_x B_y⟩ = Σ_{a,b} (−1)^{a⊕b} p(ab|xy)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let sign = if a ^ b == 0 { 1.0 } else { -1.0 };
                s += sign * self.p(x, y, a, b);
            }
        }
        s
    }

    pub fn correlator_exact(&self, x: usize, y: usize) -> Option<Q> {
        let e = self.exact.as_ref()?;
        let mut s = Q::zero();
        for a in 0..2 {
            for b in 0..2 {
                if a ^ b == 0 {
                    s += &e[idx(x, y, a, b)];
                } else {
                    s -= &e[idx(x, y, a, b)];
                }
            }
        }
        Some(s)
    }

    /// CHSH functional `B_{αβγ}`; the local bound is 2.
    pub fn chsh_value(&self, alpha: u8, beta: u8, gamma: u8) -> f64 {
        chsh_signs(alpha, beta, gamma)
            .iter()
            .enumerate()
            .map(|(k, s)| s * self.correlator(k / 2, k % 2))
            .sum()
    }

    pub fn chsh_value_exact(&self, alpha: u8, beta: u8, gamma: u8) -> Option<Q> {
        let mut s = Q::zero();
        for (k, sign) in chsh_signs(alpha, beta, gamma).iter().enumerate() {
            let c = self.correlator_exact(k / 2, k % 2)?;
            if *sign > 0.0 {
                s += c;
            } else {
                s -= c;
            }
        }
        Some(s)
    }

    /// Maximum over the eight CHSH functionals, with the maximizing `(α, β, γ)`.
    pub fn max_chsh(&self) -> (f64, (u8, u8, u8)) {
        let mut best = (f64::NEG_INFINITY, (0, 0, 0));
        for (al, be, ga) in chsh_labels() {
            let v = self.chsh_value(al, be, ga);
            if v > best.0 {
                best = (v, (al, be, ga));
            }
        }
        best
    }

    pub fn apply_lro(&self, r: &Relabeling) -> CorrBox {
        let mut p = [0.0; 16];
        let mut exact = self.exact.as_ref().map(|_| vec![Q::zero(); 16]);
        for_each_entry(|x, y, a, b| {
            let (x2, a2) = r.alice.map(x, a);
            let (y2, b2) = r.bob.map(y, b);
            p[idx(x2, y2, a2, b2)] = self.p[idx(x, y, a, b)];
            if let (Some(dst), Some(src)) = (exact.as_mut(), self.exact.as_ref()) {
                dst[idx(x2, y2, a2, b2)] = src[idx(x, y, a, b)].clone();
            }
        });
        CorrBox { p, exact }
    }

    /// Canonical key for set membership; exact boxes use their rationals.
    pub fn key(&self) -> String {
        match &self.exact {
            Some(e) => e.iter().map(format_q).collect::<Vec<_>>().join(","),
            None => self.p.iter().map(|v| format!("{v:.12}")).collect::<Vec<_>>().join(","),
        }
    }
}

impl PartialEq for CorrBox {
    fn eq(&self, other: &Self) -> bool {
        self.matches(other, NORM_TOL)
    }
}

impl fmt::Debug for CorrBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CorrBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(x,y) \\ (a,b)   00        01        10        11")?;
        for x in 0..2 {
            for y in 0..2 {
                write!(f, "({x},{y})        ")?;
                for a in 0..2 {
                    for b in 0..2 {
                        match self.exact_entry(x, y, a, b) {
                            Some(v) => write!(f, "{:<10}", format_q(v))?,
                            None => write!(f, "{:<10.6}", self.p(x, y, a, b))?,
                        }
                    }
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

pub fn for_each_entry(mut f: impl FnMut(usize, usize, usize, usize)) {
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    f(x, y, a, b);
                }
            }
        }
    }
}

/// `P(ab|xy)` label for an entry index.
pub fn entry_name(i: usize) -> String {
    let (x, y, a, b) = (i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1);
    format!("P({a}{b}|{x}{y})")
}

fn chsh_signs(alpha: u8, beta: u8, gamma: u8) -> [f64; 4] {
    let s = |bit: u8| if bit & 1 == 0 { 1.0 } else { -1.0 };
    [s(gamma), s(beta ^ gamma), s(alpha ^ gamma), s(alpha ^ beta ^ gamma ^ 1)]
}

pub fn chsh_labels() -> impl Iterator<Item = (u8, u8, u8)> {
    (0..8u8).map(|k| (k >> 2 & 1, k >> 1 & 1, k & 1))
}

/// Conditional distribution of one party, indexed `(input, output)`.
#[derive(Clone)]
pub struct SinglePartyBox {
    q: [f64; 4],
    exact: Option<Vec<Q>>,
}

impl SinglePartyBox {
    pub fn from_f64(q: [f64; 4]) -> Result<Self> {
        for input in 0..2 {
            let (p0, p1) = (q[input * 2], q[input * 2 + 1]);
            if p0 < -NORM_TOL || p1 < -NORM_TOL || (p0 + p1 - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidBox(format!("single-party row {input} = ({p0}, {p1}) is not a distribution")));
            }
        }
        Ok(Self { q, exact: None })
    }

    pub fn from_exact(e: Vec<Q>) -> Result<Self> {
        if e.len() != 4 {
            return Err(Error::InvalidBox("single-party box needs 4 entries".into()));
        }
        for input in 0..2 {
            let (p0, p1) = (&e[input * 2], &e[input * 2 + 1]);
            if p0.is_negative() || p1.is_negative() || !(p0 + p1).is_one() {
                return Err(Error::InvalidBox(format!(
                    "single-party row {input} = ({}, {}) is not a distribution",
                    format_q(p0),
                    format_q(p1)
                )));
            }
        }
        let q = [0, 1, 2, 3].map(|i| e[i].approx());
        Ok(Self { q, exact: Some(e) })
    }

    /// From the probabilities of output 0 for inputs 0 and 1.
    pub fn from_p0(p0_in0: f64, p0_in1: f64) -> Result<Self> {
        Self::from_f64([p0_in0, 1.0 - p0_in0, p0_in1, 1.0 - p0_in1])
    }

    pub fn from_p0_exact(p0_in0: Q, p0_in1: Q) -> Result<Self> {
        let one = Q::one();
        Self::from_exact(vec![p0_in0.clone(), &one - &p0_in0, p0_in1.clone(), &one - &p0_in1])
    }

    /// Deterministic response `out = α·in ⊕ β`.
    pub fn deterministic(alpha: u8, beta: u8) -> Self {
        let f = |input: u8| ((alpha & input) ^ beta) & 1;
        let bit = |input: u8, out: u8| if f(input) == out { q(1, 1) } else { q(0, 1) };
        Self::from_exact(vec![bit(0, 0), bit(0, 1), bit(1, 0), bit(1, 1)]).expect("deterministic box is valid")
    }

    pub fn uniform() -> Self {
        Self::from_p0_exact(q(1, 2), q(1, 2)).expect("uniform box is valid")
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.q[input * 2 + output]
    }

    pub fn exact_prob(&self, input: usize, output: usize) -> Option<&Q> {
        self.exact.as_ref().map(|e| &e[input * 2 + output])
    }

    pub fn exact(&self) -> Option<&[Q]> {
        self.exact.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    pub fn entries(&self) -> &[f64; 4] {
        &self.q
    }

    /// Exact equality when both are rational, else within `tol`.
    pub fn matches(&self, other: &SinglePartyBox, tol: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.q.iter().zip(other.q.iter()).all(|(a, b)| (a - b).abs() <= tol),
        }
    }
}

impl fmt::Debug for SinglePartyBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(
                f,
                "[{} {} | {} {}]",
                format_q(&e[0]),
                format_q(&e[1]),
                format_q(&e[2]),
                format_q(&e[3])
            ),
            None => write!(f, "[{:.6} {:.6} | {:.6} {:.6}]", self.q[0], self.q[1], self.q[2], self.q[3]),
        }
    }
}

/// Product box `p(ab|xy) = A(a|x)·B(b|y)`.
pub fn product_box(alice: &SinglePartyBox, bob: &SinglePartyBox) -> CorrBox {
    let mut p = [0.0; 16];
    for_each_entry(|x, y, a, b| p[idx(x, y, a, b)] = alice.prob(x, a) * bob.prob(y, b));
    let exact = match (alice.exact(), bob.exact()) {
        (Some(ea), Some(eb)) => {
            let mut e = vec![Q::zero(); 16];
            for_each_entry(|x, y, a, b| e[idx(x, y, a, b)] = &ea[x * 2 + a] * &eb[y * 2 + b]);
            Some(e)
        }
        _ => None,
    };
    CorrBox { p, exact }
}

/// Local deterministic box: `a = αx ⊕ β`, `b = γy ⊕ ε`.
pub fn deterministic_box(alpha: u8, beta: u8, gamma: u8, epsilon: u8) -> CorrBox {
    product_box(&SinglePartyBox::deterministic(alpha, beta), &SinglePartyBox::deterministic(gamma, epsilon))
}

/// The 16 deterministic boxes, lexicographic in `(α, β, γ, ε)`.
pub fn all_deterministic_boxes() -> Vec<CorrBox> {
    (0..16u8).map(|k| deterministic_box(k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1)).collect()
}

/// Canonical PR box: `p(ab|xy) = 1/2` iff `a ⊕ b = xy`.
pub fn pr_box() -> CorrBox {
    CorrBox::from_fn_exact(|x, y, a, b| if a ^ b == x & y { q(1, 2) } else { q(0, 1) }).expect("PR box is valid")
}

pub fn uniform_box() -> CorrBox {
    CorrBox::from_fn_exact(|_, _, _, _| q(1, 4)).expect("uniform box is valid")
}

/// Local reversible operation of one party: input flip `x → x ⊕ s`, and
/// input-conditional output flip `a → a ⊕ αx ⊕ β` (on the original input).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PartyRelabeling {
    pub flip_input: bool,
    pub alpha: bool,
    pub beta: bool,
}

impl PartyRelabeling {
    pub fn map(&self, input: usize, output: usize) -> (usize, usize) {
        let out = output ^ (self.alpha as usize & input) ^ self.beta as usize;
        (input ^ self.flip_input as usize, out)
    }

    /// `self` first, then `then`.
    pub fn then(&self, then: &PartyRelabeling) -> PartyRelabeling {
        PartyRelabeling {
            flip_input: self.flip_input ^ then.flip_input,
            alpha: self.alpha ^ then.alpha,
            beta: self.beta ^ then.beta ^ (then.alpha & self.flip_input),
        }
    }

    pub fn inverse(&self) -> PartyRelabeling {
        PartyRelabeling { flip_input: self.flip_input, alpha: self.alpha, beta: self.beta ^ (self.alpha & self.flip_input) }
    }

    pub fn all() -> impl Iterator<Item = PartyRelabeling> {
        (0..8u8).map(|k| PartyRelabeling { flip_input: k & 4 != 0, alpha: k & 2 != 0, beta: k & 1 != 0 })
    }
}

/// Independent relabelings of both parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Relabeling {
    pub alice: PartyRelabeling,
    pub bob: PartyRelabeling,
}

impl Relabeling {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn then(&self, then: &Relabeling) -> Relabeling {
        Relabeling { alice: self.alice.then(&then.alice), bob: self.bob.then(&then.bob) }
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling { alice: self.alice.inverse(), bob: self.bob.inverse() }
    }

    /// All 64 relabelings.
    pub fn all() -> impl Iterator<Item = Relabeling> {
        PartyRelabeling::all().flat_map(|alice| PartyRelabeling::all().map(move |bob| Relabeling { alice, bob }))
    }
}

/// Distinct boxes reachable from `seed` under all relabelings.
pub fn lro_orbit(seed: &CorrBox) -> Vec<CorrBox> {
    let mut seen = std::collections::BTreeMap::new();
    for r in Relabeling::all() {
        let b = seed.apply_lro(&r);
        seen.entry(b.key()).or_insert(b);
    }
    seen.into_values().collect()
}
