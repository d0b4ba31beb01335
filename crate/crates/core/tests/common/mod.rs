//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use steerbox_core::boxes::all_deterministic_boxes;
use steerbox_core::{q, CorrBox, Q};

pub type M = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `½(|00⟩⟨00| + |+1⟩⟨+1|)` built from kets, without the library.
pub fn oracle_state() -> M {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let k00 = M::from_column_slice(4, 1, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let kp1 = M::from_column_slice(4, 1, &[c(0.0), c(s), c(0.0), c(s)]);
    (&k00 * k00.adjoint() + &kp1 * kp1.adjoint()) * c(0.5)
}

pub fn entropy_bits(m: &M) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Partial trace over the first (keep_second) or second qubit.
pub fn ptrace(m: &M, keep_second: bool) -> M {
    M::from_fn(2, 2, |i, j| {
        (0..2)
            .map(|k| if keep_second { m[(2 * k + i, 2 * k + j)] } else { m[(2 * i + k, 2 * j + k)] })
            .sum()
    })
}

fn projector(theta: f64, phi: f64, sign: f64) -> M {
    let (nx, ny, nz) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
    M::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + sign * nz)),
            Complex64::new(0.5 * sign * nx, -0.5 * sign * ny),
            Complex64::new(0.5 * sign * nx, 0.5 * sign * ny),
            c(0.5 * (1.0 - sign * nz)),
        ],
    )
}

/// `Σ_i p_i S(ρ_{B|i})` after measuring Alice along `(θ, φ)`.
pub fn measured_conditional_entropy(rho: &M, theta: f64, phi: f64) -> f64 {
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            let big = projector(theta, phi, s).kronecker(&M::identity(2, 2));
            let cond = ptrace(&(&big * rho * &big), true);
            let p = cond.trace().re;
            if p < 1e-15 {
                0.0
            } else {
                p * entropy_bits(&(cond / c(p)))
            }
        })
        .sum()
}

/// Nested grids over `(θ, φ)` refined by factors of ten down to 1e-4 rad.
pub fn grid_min_conditional_entropy(rho: &M) -> f64 {
    let pi = std::f64::consts::PI;
    let (mut lo_t, mut hi_t, mut lo_p, mut hi_p) = (0.0, pi, 0.0, 2.0 * pi);
    let mut best = f64::INFINITY;
    let mut step = 1e-2;
    loop {
        let nt = ((hi_t - lo_t) / step).ceil() as usize;
        let np = ((hi_p - lo_p) / step).ceil() as usize;
        let mut arg = (lo_t, lo_p);
        for i in 0..=nt {
            for j in 0..=np {
                let (t, p) = (lo_t + i as f64 * step, lo_p + j as f64 * step);
                let v = measured_conditional_entropy(rho, t, p);
                if v < best {
                    best = v;
                    arg = (t, p);
                }
            }
        }
        if step <= 1e-4 {
            return best;
        }
        (lo_t, hi_t, lo_p, hi_p) = (arg.0 - 10.0 * step, arg.0 + 10.0 * step, arg.1 - 10.0 * step, arg.1 + 10.0 * step);
        step /= 10.0;
    }
}

/// Discord measured on Alice, via the grid oracle.
pub fn oracle_discord_a_to_b(rho: &M) -> f64 {
    let sa = entropy_bits(&ptrace(rho, false));
    let sb = entropy_bits(&ptrace(rho, true));
    let sab = entropy_bits(rho);
    let mutual = sa + sb - sab;
    let classical = sb - grid_min_conditional_entropy(rho);
    mutual - classical
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Convex combination of `k` random deterministic vertices with rational weights.
pub fn random_local_box(rng: &mut impl Rng, k: usize) -> CorrBox {
    let dets = all_deterministic_boxes();
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=12)).collect();
    let total: i64 = raw.iter().sum();
    let picks: Vec<usize> = (0..k).map(|_| rng.gen_range(0..16)).collect();
    let parts: Vec<(Q, &CorrBox)> = raw.iter().zip(&picks).map(|(&w, &i)| (q(w, total), &dets[i])).collect();
    CorrBox::mixture_exact(&parts).expect("mixture of vertices")
}
