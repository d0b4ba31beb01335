//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const OFF_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn off_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues (descending) and orthonormal eigenvectors (as columns, in the
/// same order) of a Hermitian matrix.
pub fn eigensystem(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if !m.is_square() {
        return Err(Error::Config(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.nrows();
    // symmetrize away rounding-level asymmetry
    let mut a = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = DMatrix::<Complex64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) < OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotation J = diag(1, conj(phase)) · [[c, s], [-s, c]] on (p, q)
                let mut j = DMatrix::<Complex64>::identity(n, n);
                j[(p, p)] = Complex64::new(c, 0.0);
                j[(p, q)] = Complex64::new(s, 0.0);
                j[(q, p)] = -phase.conj() * s;
                j[(q, q)] = phase.conj() * c;
                a = j.adjoint() * &a * &j;
                v = v * j;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &k| a[(k, k)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(vals: &[f64], vecs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = vals.len();
        let d = DMatrix::from_fn(n, n, |i, j| if i == j { c(vals[i], 0.0) } else { c(0.0, 0.0) });
        vecs * d * vecs.adjoint()
    }

    #[test]
    fn identity_half() {
        let m = DMatrix::from_fn(2, 2, |i, j| if i == j { c(0.5, 0.0) } else { c(0.0, 0.0) });
        let (vals, _) = eigensystem(&m).unwrap();
        assert_eq!(vals, vec![0.5, 0.5]);
    }

    #[test]
    fn projector_zero() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let (vals, _) = eigensystem(&m).unwrap();
        assert_eq!(vals, vec![1.0, 0.0]);
    }

    #[test]
    fn complex_four_by_four() {
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                c(2.0, 0.0), c(0.5, 0.3), c(0.0, -1.0), c(0.2, 0.0),
                c(0.5, -0.3), c(1.0, 0.0), c(0.1, 0.1), c(0.0, 0.0),
                c(0.0, 1.0), c(0.1, -0.1), c(-1.0, 0.0), c(0.4, 0.4),
                c(0.2, 0.0), c(0.0, 0.0), c(0.4, -0.4), c(0.5, 0.0),
            ],
        );
        let (vals, vecs) = eigensystem(&m).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let err = (reconstruct(&vals, &vecs) - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "reconstruction error {err}");
        let gram = vecs.adjoint() * &vecs;
        let orth = (gram - DMatrix::identity(4, 4)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(orth < 1e-12);
        let tr: f64 = vals.iter().sum();
        assert!((tr - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(eigensystem(&m), Err(Error::NotHermitian(_))));
    }
}
