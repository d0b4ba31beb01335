use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::model::{HiddenVariableModel, TrustedKind};
use super::SolverConfig;
use crate::boxes::{idx, CorrBox, Side, SinglePartyBox};
use crate::error::Result;

const CHUNK: usize = 64;
const RESTARTS: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct SearchStats {
    pub starts_requested: usize,
    pub starts_run: usize,
    pub seed: u64,
    /// Smallest sum of squared entry residuals over all starts.
    pub min_residual: f64,
    /// Largest entry error of the best start.
    pub best_max_error: f64,
    pub best_start: usize,
    pub stopped_early: bool,
}

struct Decoded {
    w: Vec<f64>,
    u: Vec<[f64; 2]>,
    t: Vec<[f64; 2]>,
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, x) in s.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn decode(p: &[f64], d: usize, kind: TrustedKind) -> Decoded {
    let w = project_simplex(&p[..d]);
    let u = (0..d).map(|l| [p[d + 2 * l].clamp(0.0, 1.0), p[d + 2 * l + 1].clamp(0.0, 1.0)]).collect();
    let t = (0..d)
        .map(|l| {
            let base = 3 * d + 2 * l;
            let mut z = [2.0 * p[base].clamp(0.0, 1.0) - 1.0, 2.0 * p[base + 1].clamp(0.0, 1.0) - 1.0];
            if kind == TrustedKind::QubitMub {
                let r = z[0].hypot(z[1]);
                if r > 1.0 {
                    z = [z[0] / r, z[1] / r];
                }
            }
            [(1.0 + z[0]) / 2.0, (1.0 + z[1]) / 2.0]
        })
        .collect();
    Decoded { w, u, t }
}

fn reconstruct(m: &Decoded) -> [f64; 16] {
    let mut out = [0.0; 16];
    for l in 0..m.w.len() {
        for x in 0..2 {
            for y in 0..2 {
                let ua = [m.u[l][x], 1.0 - m.u[l][x]];
                let tb = [m.t[l][y], 1.0 - m.t[l][y]];
                for a in 0..2 {
                    for b in 0..2 {
                        out[idx(x, y, a, b)] += m.w[l] * ua[a] * tb[b];
                    }
                }
            }
        }
    }
    out
}

fn residual(target: &[f64; 16], p: &[f64], d: usize, kind: TrustedKind) -> f64 {
    let r = reconstruct(&decode(p, d, kind));
    r.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Nelder–Mead from `x0` with initial step `step`; returns the best vertex.
fn nelder_mead(f: &impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, tol: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if p[i] + step <= 1.0 { step } else { -step };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let size = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if size < tol || vals[0] == 0.0 {
            break;
        }
        let mut c = vec![0.0; n];
        for p in &pts[..n] {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { c.iter().zip(&pts[n]).map(|(ci, wi)| ci + t * (ci - wi)).collect() };
        let xr = along(1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            };
            evals += 1;
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(p, b)| b + 0.5 * (p - b)).collect();
                    vals[i] = f(&shrunk);
                    pts[i] = shrunk;
                }
                evals += n;
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[best].clone(), vals[best])
}

struct StartResult {
    start: usize,
    params: Vec<f64>,
    residual: f64,
    max_error: f64,
}

fn run_start(target: &[f64; 16], d: usize, kind: TrustedKind, cfg: &SolverConfig, start: usize) -> StartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(start as u64));
    let n = 5 * d;
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let f = |p: &[f64]| residual(target, p, d, kind);
    let (mut x, mut v) = nelder_mead(&f, &x0, 0.25, cfg.simplex_tol, cfg.max_evals);
    for r in 0..RESTARTS {
        if v > 1e-4 || v == 0.0 {
            break;
        }
        let (nx, nv) = nelder_mead(&f, &x, 0.05 / (r + 1) as f64, cfg.simplex_tol, cfg.max_evals);
        if nv >= v {
            break;
        }
        x = nx;
        v = nv;
    }
    let rec = reconstruct(&decode(&x, d, kind));
    let max_error = rec.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    StartResult { start, params: x, residual: v, max_error }
}

fn to_model(m: &Decoded, untrusted: Side, kind: TrustedKind) -> Option<HiddenVariableModel> {
    let s: f64 = m.w.iter().sum();
    let w = m.w.iter().map(|v| v / s).collect();
    let u = m.u.iter().map(|p| SinglePartyBox::from_p0(p[0], p[1])).collect::<Result<Vec<_>>>().ok()?;
    let t = m.t.iter().map(|p| SinglePartyBox::from_p0(p[0], p[1])).collect::<Result<Vec<_>>>().ok()?;
    HiddenVariableModel::new(untrusted, kind, w, u, t).ok()
}

/// Multi-start derivative-free least squares over `d`-term models. Starts
/// are seeded by `seed + index` and run in fixed chunks, so the outcome does
/// not depend on thread scheduling. Returns a certificate when the best
/// start reconstructs the box within `certificate_tol`.
pub fn multistart_search(
    b: &CorrBox,
    d: usize,
    untrusted: Side,
    kind: TrustedKind,
    cfg: &SolverConfig,
) -> Result<(SearchStats, Option<HiddenVariableModel>)> {
    cfg.validate()?;
    let t = match untrusted {
        Side::Alice => b.clone(),
        Side::Bob => b.transpose(),
    };
    let target = *t.entries();
    let mut best: Option<StartResult> = None;
    let mut run = 0;
    let mut early = false;
    for lo in (0..cfg.starts).step_by(CHUNK) {
        let hi = (lo + CHUNK).min(cfg.starts);
        let chunk: Vec<StartResult> = (lo..hi).into_par_iter().map(|s| run_start(&target, d, kind, cfg, s)).collect();
        run = hi;
        for r in chunk {
            let better = match &best {
                None => true,
                Some(bst) => (r.residual, r.start) < (bst.residual, bst.start),
            };
            if better {
                best = Some(r);
            }
        }
        if best.as_ref().is_some_and(|bst| bst.max_error <= cfg.certificate_tol) {
            early = hi < cfg.starts;
            break;
        }
    }
    let best = best.expect("at least one start");
    let stats = SearchStats {
        starts_requested: cfg.starts,
        starts_run: run,
        seed: cfg.seed,
        min_residual: best.residual,
        best_max_error: best.max_error,
        best_start: best.start,
        stopped_early: early,
    };
    let model = (best.max_error <= cfg.certificate_tol)
        .then(|| to_model(&decode(&best.params, d, kind), untrusted, kind))
        .flatten()
        .filter(|m| m.reconstruction_error(b) <= cfg.certificate_tol);
    Ok((stats, model))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.2, 0.2, 0.2]);
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
        let p = project_simplex(&[2.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0]);
        let p = project_simplex(&[0.9, 0.5, 0.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12 && p[2] == 0.0);
    }

    #[test]
    fn nelder_mead_quadratic() {
        let f = |p: &[f64]| (p[0] - 0.3).powi(2) + 2.0 * (p[1] - 0.7).powi(2);
        let (x, v) = nelder_mead(&f, &[0.5, 0.5], 0.1, 1e-12, 10_000);
        assert!(v < 1e-20 && (x[0] - 0.3).abs() < 1e-9 && (x[1] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn disc_projection_keeps_responses_realizable() {
        let p = [1.0, 1.0, 1.0, 1.0, 1.0];
        let m = decode(&p, 1, TrustedKind::QubitMub);
        let z0 = 2.0 * m.t[0][0] - 1.0;
        let z1 = 2.0 * m.t[0][1] - 1.0;
        assert!((z0 * z0 + z1 * z1 - 1.0).abs() < 1e-12);
    }
}
