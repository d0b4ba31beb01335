//! Hidden-variable decompositions of boxes with a bounded number of terms.
//!
//! A model is `p(ab|xy) = Σ_λ p(λ) U_λ(·|·) T_λ(·|·)` where `U_λ` are the
//! untrusted party's arbitrary responses and `T_λ` the trusted party's
//! responses, optionally restricted to Born statistics of a qubit measured in
//! two mutually unbiased bases. Exact engines handle locality (LP), one term
//! (product check), two terms (row-space geometry) and four or more terms
//! (regrouping by deterministic strategy); three terms fall back to a
//! multi-start search.

mod cases;
mod local;
mod model;
mod search;
mod twoterm;

use serde::Serialize;

use crate::boxes::{CorrBox, Side};
use crate::error::{Error, Result};

pub use cases::{case_analysis, CaseFamily, CaseOutcome, CaseReport};
pub use local::{local_membership, max_chsh_exact};
pub use model::{qubit_mub_realizable, qubit_mub_realizable_exact, HiddenVariableModel, TrustedKind};
pub use search::{multistart_search, SearchStats};
pub use twoterm::{two_term_exact, ExactOutcome};

/// Knobs of the numeric search and of the feasibility decision.
#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    pub starts: usize,
    pub seed: u64,
    /// Minimum sum of squared residuals above which a failed search is
    /// reported as numerically infeasible.
    pub residual_threshold: f64,
    /// Largest entry-wise reconstruction error accepted for a certificate.
    pub certificate_tol: f64,
    /// Function evaluations per local descent.
    pub max_evals: usize,
    pub simplex_tol: f64,
    /// Run the exact engines where they apply.
    pub exact: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            starts: 2000,
            seed: 20180,
            residual_threshold: 1e-6,
            certificate_tol: 1e-10,
            max_evals: 6000,
            simplex_tol: 1e-12,
            exact: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::Config("start count must be at least 1".into()));
        }
        for (name, v) in [
            ("residual threshold", self.residual_threshold),
            ("certificate tolerance", self.certificate_tol),
            ("simplex tolerance", self.simplex_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_evals == 0 {
            return Err(Error::Config("evaluation budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Feasible,
    InfeasibleExact,
    InfeasibleNumeric,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::InfeasibleExact => "infeasible-exact",
            Verdict::InfeasibleNumeric => "infeasible-numeric",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactLp,
    FloatLp,
    ChshWitness,
    ProductCheck,
    TwoTermExact,
    PolygonLp,
    MultiStart,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityResult {
    pub verdict: Verdict,
    pub d: usize,
    pub untrusted: Side,
    pub trusted_kind: TrustedKind,
    pub method: Method,
    pub certificate: Option<HiddenVariableModel>,
    pub search: Option<SearchStats>,
    pub detail: Vec<String>,
}

impl FeasibilityResult {
    fn new(verdict: Verdict, d: usize, untrusted: Side, kind: TrustedKind, method: Method) -> Self {
        Self { verdict, d, untrusted, trusted_kind: kind, method, certificate: None, search: None, detail: Vec::new() }
    }

    /// `Some(true)` when a model exists, `None` when undecided.
    pub fn feasible(&self) -> Option<bool> {
        match self.verdict {
            Verdict::Feasible => Some(true),
            Verdict::InfeasibleExact | Verdict::InfeasibleNumeric => Some(false),
            Verdict::Inconclusive => None,
        }
    }

    /// Negation of [`Self::feasible`]: whether the dimension-restricted
    /// property (superlocality, superunsteerability, SDI steering) holds.
    pub fn property_holds(&self) -> Option<bool> {
        self.feasible().map(|f| !f)
    }

    pub fn is_exact(&self) -> bool {
        match self.verdict {
            Verdict::InfeasibleExact => true,
            Verdict::Feasible => self.certificate.as_ref().is_some_and(HiddenVariableModel::is_exact),
            _ => false,
        }
    }

    fn with_certificate(mut self, m: HiddenVariableModel) -> Self {
        self.certificate = Some(m);
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.detail.push(s.into());
        self
    }
}

fn chsh_exceeds_local_bound(b: &CorrBox) -> Option<f64> {
    if b.is_rational() {
        let (v, _) = max_chsh_exact(b)?;
        return (v > crate::scalar::q(2, 1)).then(|| b.max_chsh().0);
    }
    let (v, _) = b.max_chsh();
    (v > 2.0 + 1e-9).then_some(v)
}

/// Decides whether `b` has a `d`-term model with arbitrary responses on the
/// `untrusted` side and responses of `kind` on the other side.
pub fn restricted_feasibility(
    b: &CorrBox,
    d: usize,
    untrusted: Side,
    kind: TrustedKind,
    cfg: &SolverConfig,
) -> Result<FeasibilityResult> {
    if d == 0 {
        return Err(Error::Config("hidden-variable dimension must be at least 1".into()));
    }
    cfg.validate()?;
    b.require_nosignaling()?;

    if let Some(chsh) = chsh_exceeds_local_bound(b) {
        return Ok(FeasibilityResult::new(Verdict::InfeasibleExact, d, untrusted, kind, Method::ChshWitness)
            .note(format!("CHSH value {chsh:.9} exceeds the local bound 2; every such model is local")));
    }

    if d >= 4 {
        let r = local::four_term(b, untrusted, kind, cfg)?;
        return Ok(match r.certificate.clone() {
            Some(m) if d > 4 => {
                let mut r = r.with_certificate(m.padded(d));
                r.d = d;
                r
            }
            _ => FeasibilityResult { d, ..r },
        });
    }

    if let Some(m) = local::product_model(b, untrusted, kind, cfg.certificate_tol) {
        return Ok(FeasibilityResult::new(Verdict::Feasible, d, untrusted, kind, Method::ProductCheck)
            .with_certificate(m.padded(d))
            .note("the box is a product of its marginals"));
    }
    if d == 1 {
        let verdict = if b.is_rational() { Verdict::InfeasibleExact } else { Verdict::InfeasibleNumeric };
        return Ok(FeasibilityResult::new(verdict, 1, untrusted, kind, Method::ProductCheck)
            .note("the box is not a product of admissible marginals"));
    }

    let mut exact_infeasible = None;
    let mut notes = Vec::new();
    if cfg.exact && b.is_rational() {
        match two_term_exact(b, untrusted, kind)? {
            ExactOutcome::Feasible(m) => {
                return Ok(FeasibilityResult::new(Verdict::Feasible, d, untrusted, kind, Method::TwoTermExact)
                    .with_certificate(m.padded(d))
                    .note("exact two-term model"));
            }
            ExactOutcome::Infeasible(reason) => exact_infeasible = Some(reason),
            ExactOutcome::Undecided(reason) => notes.push(reason),
        }
    }

    if cfg.exact {
        let four = local::four_term(b, untrusted, kind, cfg)?;
        if four.verdict == Verdict::InfeasibleExact {
            return Ok(FeasibilityResult { d, ..four }
                .note("no model with four terms exists, hence none with fewer"));
        }
    }

    let (stats, model) = multistart_search(b, d, untrusted, kind, cfg)?;
    let mut r = numeric_result(d, untrusted, kind, cfg, stats, model);
    r.detail.extend(notes);
    match (d, exact_infeasible) {
        (2, Some(reason)) if r.verdict != Verdict::Feasible => {
            r.verdict = Verdict::InfeasibleExact;
            r.method = Method::TwoTermExact;
            r.detail.push(reason);
        }
        (2, Some(reason)) => r.detail.push(format!("exact engine disagreed with a verified certificate: {reason}")),
        (_, Some(reason)) => r.detail.push(format!("no two-term model: {reason}")),
        _ => {}
    }
    Ok(r)
}

fn numeric_result(
    d: usize,
    untrusted: Side,
    kind: TrustedKind,
    cfg: &SolverConfig,
    stats: SearchStats,
    model: Option<HiddenVariableModel>,
) -> FeasibilityResult {
    let verdict = if model.is_some() {
        Verdict::Feasible
    } else if stats.min_residual > cfg.residual_threshold {
        Verdict::InfeasibleNumeric
    } else {
        Verdict::Inconclusive
    };
    let mut r = FeasibilityResult::new(verdict, d, untrusted, kind, Method::MultiStart);
    r.certificate = model;
    r.search = Some(stats);
    r
}

/// Superlocality at `min(d_a, d_b)`: no model with that many terms and
/// arbitrary responses on both sides. Fails for nonlocal boxes.
pub fn is_superlocal(b: &CorrBox, d_a: usize, d_b: usize, cfg: &SolverConfig) -> Result<FeasibilityResult> {
    let local = local_membership(b)?;
    if local.feasible() == Some(false) {
        return Err(Error::Nonlocal { chsh: b.max_chsh().0 });
    }
    restricted_feasibility(b, d_a.min(d_b), Side::Alice, TrustedKind::Unconstrained, cfg)
}

/// Directional superunsteerability: unsteerable (a qubit LHS model exists)
/// yet no LHS model with at most `d_untrusted` terms.
#[derive(Debug, Clone, Serialize)]
pub struct SuperunsteerabilityResult {
    pub untrusted: Side,
    pub holds: Option<bool>,
    /// Model search at the untrusted party's dimension.
    pub restricted: FeasibilityResult,
    /// Unrestricted LHS model (four terms suffice).
    pub unsteerable: FeasibilityResult,
}

/// `untrusted` is the steering party: `Side::Alice` is the A→B direction.
pub fn is_superunsteerable(
    b: &CorrBox,
    d_untrusted: usize,
    untrusted: Side,
    cfg: &SolverConfig,
) -> Result<SuperunsteerabilityResult> {
    let unsteerable = lhs_unsteerable(b, untrusted, cfg)?;
    let restricted = restricted_feasibility(b, d_untrusted, untrusted, TrustedKind::QubitMub, cfg)?;
    let holds = match (unsteerable.feasible(), restricted.feasible()) {
        (Some(false), _) => Some(false),
        (Some(true), r) => r.map(|f| !f),
        (None, _) => None,
    };
    Ok(SuperunsteerabilityResult { untrusted, holds, restricted, unsteerable })
}

/// Unsteerability with the trusted party measuring a qubit in two mutually
/// unbiased bases, decided with four terms.
pub fn lhs_unsteerable(b: &CorrBox, untrusted: Side, cfg: &SolverConfig) -> Result<FeasibilityResult> {
    restricted_feasibility(b, 4, untrusted, TrustedKind::QubitMub, cfg)
}
