use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::boxes::{product_box, CorrBox, Side, SinglePartyBox};
use crate::error::{Error, Result};
use crate::scalar::{format_q, q, Scalar, Q};

const WEIGHT_TOL: f64 = 1e-12;
const DISC_TOL: f64 = 1e-10;

/// Admissible responses of the trusted party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrustedKind {
    /// Any conditional distribution.
    Unconstrained,
    /// Born statistics of a qubit state measured along two fixed mutually
    /// unbiased axes: `(2q(0|0)−1)² + (2q(0|1)−1)² ≤ 1`.
    QubitMub,
}

/// Whether `q` arises from a qubit measured along two mutually unbiased axes.
pub fn qubit_mub_realizable(q: &SinglePartyBox) -> bool {
    let z0 = 2.0 * q.prob(0, 0) - 1.0;
    let z1 = 2.0 * q.prob(1, 0) - 1.0;
    z0 * z0 + z1 * z1 <= 1.0 + DISC_TOL
}

/// Exact form of [`qubit_mub_realizable`]; `None` for floating boxes.
pub fn qubit_mub_realizable_exact(b: &SinglePartyBox) -> Option<bool> {
    let e = b.exact()?;
    let two = q(2, 1);
    let z0 = &two * &e[0] - Q::one();
    let z1 = &two * &e[2] - Q::one();
    Some(&z0 * &z0 + &z1 * &z1 <= Q::one())
}

fn admissible(kind: TrustedKind, t: &SinglePartyBox) -> bool {
    match kind {
        TrustedKind::Unconstrained => true,
        TrustedKind::QubitMub => qubit_mub_realizable_exact(t).unwrap_or_else(|| qubit_mub_realizable(t)),
    }
}

/// `p(ab|xy) = Σ_λ p(λ) U_λ T_λ` with `U_λ` on the untrusted side.
#[derive(Debug, Clone)]
pub struct HiddenVariableModel {
    untrusted: Side,
    kind: TrustedKind,
    weights: Vec<f64>,
    exact_weights: Option<Vec<Q>>,
    untrusted_responses: Vec<SinglePartyBox>,
    trusted_responses: Vec<SinglePartyBox>,
}

impl HiddenVariableModel {
    pub fn new(
        untrusted: Side,
        kind: TrustedKind,
        weights: Vec<f64>,
        untrusted_responses: Vec<SinglePartyBox>,
        trusted_responses: Vec<SinglePartyBox>,
    ) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < -WEIGHT_TOL) {
            return Err(Error::InvalidBox("model weights must be nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidBox(format!("model weights sum to {s}")));
        }
        Self::finish(untrusted, kind, weights, None, untrusted_responses, trusted_responses)
    }

    pub fn new_exact(
        untrusted: Side,
        kind: TrustedKind,
        weights: Vec<Q>,
        untrusted_responses: Vec<SinglePartyBox>,
        trusted_responses: Vec<SinglePartyBox>,
    ) -> Result<Self> {
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidBox("model weights must be nonnegative".into()));
        }
        let s: Q = weights.iter().sum();
        if !s.is_one() {
            return Err(Error::InvalidBox(format!("model weights sum to {}", format_q(&s))));
        }
        let w = weights.iter().map(Scalar::approx).collect();
        Self::finish(untrusted, kind, w, Some(weights), untrusted_responses, trusted_responses)
    }

    fn finish(
        untrusted: Side,
        kind: TrustedKind,
        weights: Vec<f64>,
        exact_weights: Option<Vec<Q>>,
        untrusted_responses: Vec<SinglePartyBox>,
        trusted_responses: Vec<SinglePartyBox>,
    ) -> Result<Self> {
        let d = weights.len();
        if d == 0 || untrusted_responses.len() != d || trusted_responses.len() != d {
            return Err(Error::InvalidBox("model needs one weight and two responses per term".into()));
        }
        if let Some(i) = trusted_responses.iter().position(|t| !admissible(kind, t)) {
            return Err(Error::InvalidBox(format!("trusted response {i} is not qubit-realizable")));
        }
        Ok(Self { untrusted, kind, weights, exact_weights, untrusted_responses, trusted_responses })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn untrusted(&self) -> Side {
        self.untrusted
    }

    pub fn trusted_kind(&self) -> TrustedKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exact_weights(&self) -> Option<&[Q]> {
        self.exact_weights.as_deref()
    }

    pub fn untrusted_responses(&self) -> &[SinglePartyBox] {
        &self.untrusted_responses
    }

    pub fn trusted_responses(&self) -> &[SinglePartyBox] {
        &self.trusted_responses
    }

    pub fn is_exact(&self) -> bool {
        self.exact_weights.is_some()
            && self.untrusted_responses.iter().chain(&self.trusted_responses).all(SinglePartyBox::is_rational)
    }

    fn term(&self, i: usize) -> CorrBox {
        let (u, t) = (&self.untrusted_responses[i], &self.trusted_responses[i]);
        match self.untrusted {
            Side::Alice => product_box(u, t),
            Side::Bob => product_box(t, u),
        }
    }

    /// The box the model generates; exact when every component is.
    pub fn reconstruct(&self) -> CorrBox {
        let terms: Vec<CorrBox> = (0..self.dim()).map(|i| self.term(i)).collect();
        if self.is_exact() {
            let w = self.exact_weights.as_ref().unwrap();
            let parts: Vec<(Q, &CorrBox)> = w.iter().cloned().zip(&terms).collect();
            if let Ok(b) = CorrBox::mixture_exact(&parts) {
                return b;
            }
        }
        let parts: Vec<(f64, &CorrBox)> = self.weights.iter().copied().zip(&terms).collect();
        let mut acc = [0.0; 16];
        for (w, bx) in parts {
            for (i, v) in bx.entries().iter().enumerate() {
                acc[i] += w * v;
            }
        }
        // Renormalize rows so that rounding in the weights cannot make the box invalid.
        for row in acc.chunks_mut(4) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v = v.max(0.0) / s);
        }
        CorrBox::from_f64(acc).expect("mixture of valid boxes is valid")
    }

    /// Largest entry-wise deviation from `target`.
    pub fn reconstruction_error(&self, target: &CorrBox) -> f64 {
        self.reconstruct().max_abs_diff(target)
    }

    /// Exact equality with `target` (both sides rational).
    pub fn reproduces_exactly(&self, target: &CorrBox) -> bool {
        match (self.reconstruct().exact(), target.exact()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// Same model with zero-weight terms appended up to `d` terms.
    pub fn padded(&self, d: usize) -> Self {
        let mut m = self.clone();
        while m.dim() < d {
            m.weights.push(0.0);
            if let Some(w) = m.exact_weights.as_mut() {
                w.push(Q::zero());
            }
            m.untrusted_responses.push(SinglePartyBox::uniform());
            m.trusted_responses.push(SinglePartyBox::uniform());
        }
        m
    }
}

#[derive(Serialize)]
struct ResponseJson {
    /// Probability of output 0 for inputs 0 and 1.
    p0: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    p0_exact: Option<[String; 2]>,
}

impl From<&SinglePartyBox> for ResponseJson {
    fn from(b: &SinglePartyBox) -> Self {
        Self {
            p0: [b.prob(0, 0), b.prob(1, 0)],
            p0_exact: b.exact().map(|e| [format_q(&e[0]), format_q(&e[2])]),
        }
    }
}

#[derive(Serialize)]
struct ModelJson<'a> {
    d: usize,
    untrusted: Side,
    trusted_kind: TrustedKind,
    weights: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    weights_exact: Option<Vec<String>>,
    untrusted_responses: Vec<ResponseJson>,
    trusted_responses: Vec<ResponseJson>,
}

impl Serialize for HiddenVariableModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelJson {
            d: self.dim(),
            untrusted: self.untrusted,
            trusted_kind: self.kind,
            weights: &self.weights,
            weights_exact: self.exact_weights.as_ref().map(|w| w.iter().map(format_q).collect()),
            untrusted_responses: self.untrusted_responses.iter().map(Into::into).collect(),
            trusted_responses: self.trusted_responses.iter().map(Into::into).collect(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(a: Q, b: Q) -> SinglePartyBox {
        SinglePartyBox::from_p0_exact(a, b).unwrap()
    }

    #[test]
    fn disc_membership() {
        assert!(qubit_mub_realizable(&SinglePartyBox::uniform()));
        assert!(qubit_mub_realizable(&sp(q(1, 1), q(1, 2))));
        assert_eq!(qubit_mub_realizable_exact(&sp(q(1, 1), q(1, 2))), Some(true));
        assert!(!qubit_mub_realizable(&sp(q(1, 1), q(1, 1))));
        assert_eq!(qubit_mub_realizable_exact(&sp(q(1, 1), q(1, 1))), Some(false));
    }

    #[test]
    fn rejects_bad_models() {
        let u = vec![SinglePartyBox::uniform()];
        assert!(HiddenVariableModel::new_exact(Side::Alice, TrustedKind::Unconstrained, vec![q(1, 2)], u.clone(), u.clone()).is_err());
        let det = vec![SinglePartyBox::deterministic(0, 0)];
        assert!(HiddenVariableModel::new_exact(Side::Alice, TrustedKind::QubitMub, vec![q(1, 1)], u.clone(), det.clone()).is_err());
        assert!(HiddenVariableModel::new_exact(Side::Alice, TrustedKind::Unconstrained, vec![q(1, 1)], u, det).is_ok());
    }

    #[test]
    fn orientation_and_padding() {
        let a = sp(q(1, 1), q(1, 2));
        let b = sp(q(1, 3), q(0, 1));
        let m = HiddenVariableModel::new_exact(Side::Bob, TrustedKind::Unconstrained, vec![q(1, 1)], vec![b.clone()], vec![a.clone()]).unwrap();
        assert_eq!(m.reconstruct(), product_box(&a, &b));
        let p = m.padded(3);
        assert_eq!(p.dim(), 3);
        assert!(p.reproduces_exactly(&product_box(&a, &b)));
    }
}
