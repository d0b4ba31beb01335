//! Von Neumann entropies and two-qubit quantum discord, minimized over
//! binary projective measurements on the measured side.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boxes::Side;
use crate::eigen::eigensystem;
use crate::error::{Error, Result};
use crate::quantum::{pauli, CMatrix, DensityMatrix, Measurement};

const CLAMP: f64 = 1e-10;

/// Direction of a discord quantity: `AliceToBob` measures Alice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "a->b")]
    AliceToBob,
    #[serde(rename = "b->a")]
    BobToAlice,
}

impl Direction {
    /// The side whose outputs are untrusted / measured.
    pub fn source(self) -> Side {
        match self {
            Direction::AliceToBob => Side::Alice,
            Direction::BobToAlice => Side::Bob,
        }
    }
}

fn entropy_of_spectrum(vals: &[f64]) -> f64 {
    vals.iter()
        .map(|&v| if (-CLAMP..0.0).contains(&v) { 0.0 } else { v })
        .filter(|&v| v > 0.0)
        .map(|v| -v * v.log2())
        .sum()
}

/// `S(ρ) = −Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(state: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&state.eigenvalues())
}

fn matrix_entropy(m: &CMatrix) -> f64 {
    entropy_of_spectrum(&eigensystem(m).expect("conditional state is Hermitian").0)
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub theta_steps: usize,
    pub phi_steps: usize,
    pub angle_tol: f64,
    pub refine_starts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { theta_steps: 60, phi_steps: 120, angle_tol: 1e-8, refine_starts: 5 }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalEntropy {
    /// `min Σ_i p_i S(ρ_{other|i})` in bits.
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
    pub measurement: Measurement,
    /// Best value seen on the coarse grid.
    pub grid_value: f64,
}

/// Post-measurement average entropy of the unmeasured side.
pub fn measured_entropy(state: &DensityMatrix, measured: Side, m: &Measurement) -> f64 {
    let rho = state.matrix();
    (0..2)
        .map(|outcome| {
            let pi = m.projector(outcome);
            let cond = CMatrix::from_fn(2, 2, |i, j| {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    for l in 0..2 {
                        s += pi[(k, l)]
                            * match measured {
                                Side::Alice => rho[(l * 2 + i, k * 2 + j)],
                                Side::Bob => rho[(i * 2 + l, j * 2 + k)],
                            };
                    }
                }
                s
            });
            let p = cond.trace().re;
            if p <= 1e-15 {
                0.0
            } else {
                p * matrix_entropy(&(cond / Complex64::new(p, 0.0)))
            }
        })
        .sum()
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Minimum over binary projective measurements (Bloch angles θ, φ) of the
/// unmeasured side's conditional entropy: coarse grid, then coordinate-wise
/// golden-section refinement from the best grid cells.
pub fn conditional_entropy_min(state: &DensityMatrix, measured: Side, cfg: &SearchConfig) -> Result<ConditionalEntropy> {
    if state.dim() != 4 {
        return Err(Error::InvalidState("conditional entropy needs a two-qubit state".into()));
    }
    if cfg.theta_steps < 2 || cfg.phi_steps < 1 || cfg.refine_starts < 1 || cfg.angle_tol <= 0.0 {
        return Err(Error::Config("invalid measurement search configuration".into()));
    }
    let obj = |t: f64, p: f64| measured_entropy(state, measured, &Measurement::from_angles(t, p));
    let dt = PI / (cfg.theta_steps - 1) as f64;
    let dp = 2.0 * PI / cfg.phi_steps as f64;

    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(cfg.theta_steps * cfg.phi_steps);
    for i in 0..cfg.theta_steps {
        let t = i as f64 * dt;
        for j in 0..cfg.phi_steps {
            let p = j as f64 * dp;
            grid.push((obj(t, p), t, p));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    let grid_value = grid[0].0;

    let mut best = grid[0];
    for &(v0, t0, p0) in grid.iter().take(cfg.refine_starts) {
        let (mut v, mut t, mut p) = (v0, t0, p0);
        for _ in 0..100 {
            let (nt, nv) = golden_section(|tt| obj(tt, p), t - dt, t + dt, cfg.angle_tol);
            let moved_t = if nv < v { (nt - t).abs() } else { 0.0 };
            if nv < v {
                t = nt;
                v = nv;
            }
            let (np, nv) = golden_section(|pp| obj(t, pp), p - dp, p + dp, cfg.angle_tol);
            let moved_p = if nv < v { (np - p).abs() } else { 0.0 };
            if nv < v {
                p = np;
                v = nv;
            }
            if moved_t < cfg.angle_tol && moved_p < cfg.angle_tol {
                break;
            }
        }
        if (v, t, p) < best {
            best = (v, t, p);
        }
    }
    Ok(ConditionalEntropy {
        value: best.0,
        theta: best.1,
        phi: best.2,
        measurement: Measurement::from_angles(best.1, best.2),
        grid_value,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscordResult {
    pub direction: Direction,
    pub discord: f64,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub conditional_entropy: f64,
    /// Bloch vector of the minimizing measurement.
    pub measurement: [f64; 3],
}

/// Discord `I(ρ) − C(ρ)` with the classical part optimized over projective
/// measurements on the direction's source side.
pub fn discord(state: &DensityMatrix, direction: Direction, cfg: &SearchConfig) -> Result<DiscordResult> {
    let measured = direction.source();
    let s_ab = von_neumann_entropy(state);
    let s_a = von_neumann_entropy(&state.reduced(Side::Alice)?);
    let s_b = von_neumann_entropy(&state.reduced(Side::Bob)?);
    let mutual_information = s_a + s_b - s_ab;
    let s_other = match measured {
        Side::Alice => s_b,
        Side::Bob => s_a,
    };
    let cond = conditional_entropy_min(state, measured, cfg)?;
    let classical_correlation = s_other - cond.value;
    Ok(DiscordResult {
        direction,
        discord: mutual_information - classical_correlation,
        mutual_information,
        classical_correlation,
        conditional_entropy: cond.value,
        measurement: cond.measurement.bloch(),
    })
}

/// Operators `Tr_other[(E_k ⊗ 1) ρ]` on `side` for the Pauli basis `E_k`
/// of the other side.
fn conditional_operators(state: &DensityMatrix, side: Side) -> Vec<CMatrix> {
    let rho = state.matrix();
    (0..4)
        .map(|k| {
            let e = pauli(k);
            CMatrix::from_fn(2, 2, |i, j| {
                let mut s = Complex64::new(0.0, 0.0);
                for m in 0..2 {
                    for l in 0..2 {
                        s += e[(m, l)]
                            * match side {
                                Side::Bob => rho[(l * 2 + i, m * 2 + j)],
                                Side::Alice => rho[(i * 2 + l, j * 2 + m)],
                            };
                    }
                }
                s
            })
        })
        .collect()
}

/// True iff `side` is classical: `ρ = Σ_i ρ_i ⊗ |i⟩⟨i|` (with `|i⟩` on `side`)
/// for some orthonormal basis, within `tol`.
pub fn is_classical_on(state: &DensityMatrix, side: Side, tol: f64) -> Result<bool> {
    if state.dim() != 4 {
        return Err(Error::InvalidState("classicality test needs a two-qubit state".into()));
    }
    let ops = conditional_operators(state, side);
    // The traceless part that is largest fixes the only candidate basis.
    let bloch = |m: &CMatrix| [1, 2, 3].map(|k| (pauli(k) * m).trace().re * 0.5);
    let norm = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pivot = ops.iter().map(|m| norm(bloch(m))).enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    if pivot.1 <= tol {
        return Ok(true);
    }
    let (_, vecs) = eigensystem(&ops[pivot.0])?;
    let rho = state.matrix();
    let mut dephased = CMatrix::zeros(4, 4);
    for i in 0..2 {
        let v = vecs.column(i);
        let proj = &v * v.adjoint();
        let lift = match side {
            Side::Bob => CMatrix::identity(2, 2).kronecker(&proj),
            Side::Alice => proj.kronecker(&CMatrix::identity(2, 2)),
        };
        dephased += &lift * rho * &lift;
    }
    let dev = (dephased - rho).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(dev <= tol)
}

/// Bob classical (zero discord when Bob is measured).
pub fn is_quantum_classical(state: &DensityMatrix, tol: f64) -> Result<bool> {
    is_classical_on(state, Side::Bob, tol)
}

/// Alice classical (zero discord when Alice is measured).
pub fn is_classical_quantum(state: &DensityMatrix, tol: f64) -> Result<bool> {
    is_classical_on(state, Side::Alice, tol)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{paper_state, random};
    use rand::SeedableRng;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn entropy_values() {
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - 1.0).abs() < 1e-12);
        let pure = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);
        let ra = paper_state().reduced(Side::Alice).unwrap();
        let expect = h2((1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0);
        assert!((von_neumann_entropy(&ra) - expect).abs() < 1e-12);
        assert!((expect - 0.600876).abs() < 1e-6);
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let s = random::state(&mut rng, 4);
            let u = random::unitary(&mut rng, 4);
            let t = s.conjugate(&u).unwrap();
            assert!((von_neumann_entropy(&s) - von_neumann_entropy(&t)).abs() < 1e-10);
        }
    }

    #[test]
    fn product_states_have_no_discord() {
        let a = DensityMatrix::from_bloch([0.3, -0.2, 0.5]).unwrap();
        let b = DensityMatrix::from_bloch([0.0, 0.6, -0.1]).unwrap();
        let s = DensityMatrix::product(&a, &b).unwrap();
        let cfg = SearchConfig::default();
        for dir in [Direction::AliceToBob, Direction::BobToAlice] {
            let r = discord(&s, dir, &cfg).unwrap();
            assert!(r.discord.abs() < 1e-6, "{dir:?}: {}", r.discord);
        }
        let c = conditional_entropy_min(&s, Side::Alice, &cfg).unwrap();
        assert!((c.value - von_neumann_entropy(&b)).abs() < 1e-9);
    }

    #[test]
    fn refinement_never_worse_than_grid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let cfg = SearchConfig { theta_steps: 12, phi_steps: 24, ..Default::default() };
        for _ in 0..5 {
            let s = random::state(&mut rng, 4);
            let c = conditional_entropy_min(&s, Side::Bob, &cfg).unwrap();
            assert!(c.value <= c.grid_value);
        }
    }

    #[test]
    fn classicality_of_paper_state() {
        let rho = paper_state();
        assert!(is_quantum_classical(&rho, 1e-9).unwrap());
        assert!(!is_classical_quantum(&rho, 1e-9).unwrap());
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(is_quantum_classical(&mixed, 1e-9).unwrap());
        assert!(is_classical_quantum(&mixed, 1e-9).unwrap());
    }
}
