//! One- and two-qubit states, binary projective measurements, assemblages
//! and Born-rule boxes.
//!
//! Two-qubit matrices use the computational ordering |00⟩, |01⟩, |10⟩, |11⟩
//! with Alice as the first factor. Measurement outcome 0 is the +1
//! eigenvalue of `n·σ`. States and measurements with real rational entries
//! also carry an exact copy, which lets [`born_box`] produce exact tables.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::boxes::{for_each_entry, idx, CorrBox, Side};
use crate::eigen::{eigensystem, hermitian_deviation};
use crate::error::{Error, Result};
use crate::scalar::{format_q, q, Scalar, Q};

pub type CMatrix = DMatrix<Complex64>;

pub const STATE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli(k: usize) -> CMatrix {
    let z = Complex64::zero();
    let one = c(1.0);
    let i = Complex64::i();
    match k {
        0 => CMatrix::identity(2, 2),
        1 => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Unit-trace positive semidefinite Hermitian matrix on one or two qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    m: CMatrix,
    exact: Option<Vec<Q>>,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = m.nrows();
        if !m.is_square() || (n != 2 && n != 4) {
            return Err(Error::InvalidState(format!("expected a 2x2 or 4x4 matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        let dev = hermitian_deviation(&m);
        if dev > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = m.trace();
        if (tr - c(1.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let (vals, _) = eigensystem(&m)?;
        if let Some(min) = vals.last() {
            if *min < -PSD_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { m, exact: None })
    }

    /// Real rational density matrix given row-major.
    pub fn from_exact_real(n: usize, entries: Vec<Q>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidState(format!("expected {} entries", n * n)));
        }
        for i in 0..n {
            for j in 0..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::InvalidState("exact matrix is not symmetric".into()));
                }
            }
        }
        let tr: Q = (0..n).map(|i| &entries[i * n + i]).sum();
        if !tr.is_one() {
            return Err(Error::InvalidState(format!("trace is {}, expected 1", format_q(&tr))));
        }
        let m = CMatrix::from_fn(n, n, |i, j| c(entries[i * n + j].approx()));
        let mut s = Self::new(m)?;
        s.exact = Some(entries);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn exact(&self) -> Option<&[Q]> {
        self.exact.as_deref()
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let entries = (0..n * n).map(|k| if k / n == k % n { q(1, n as i64) } else { q(0, 1) }).collect();
        Self::from_exact_real(n, entries).expect("maximally mixed state is valid")
    }

    /// Pure state `|ψ⟩⟨ψ|` (normalized internally).
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = v / c(norm);
        Self::new(&v * v.adjoint())
    }

    /// State from a Bloch vector (one qubit).
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let mut m = pauli(0);
        for k in 0..3 {
            m += pauli(k + 1) * c(r[k]);
        }
        Self::new(m * c(0.5))
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if a.dim() != 2 || b.dim() != 2 {
            return Err(Error::InvalidState("product expects two single-qubit states".into()));
        }
        let mut s = Self::new(kron(&a.m, &b.m))?;
        if let (Some(ea), Some(eb)) = (&a.exact, &b.exact) {
            let mut e = vec![Q::zero(); 16];
            for i in 0..4 {
                for j in 0..4 {
                    e[i * 4 + j] = &ea[(i / 2) * 2 + j / 2] * &eb[(i % 2) * 2 + j % 2];
                }
            }
            s.exact = Some(e);
        }
        Ok(s)
    }

    fn require_two_qubit(&self) -> Result<()> {
        if self.dim() != 4 {
            return Err(Error::InvalidState(format!("expected a two-qubit state, got dimension {}", self.dim())));
        }
        Ok(())
    }

    /// Reduced state of `keep`.
    pub fn reduced(&self, keep: Side) -> Result<DensityMatrix> {
        self.require_two_qubit()?;
        let m = CMatrix::from_fn(2, 2, |i, j| {
            (0..2)
                .map(|k| match keep {
                    Side::Alice => self.m[(i * 2 + k, j * 2 + k)],
                    Side::Bob => self.m[(k * 2 + i, k * 2 + j)],
                })
                .sum()
        });
        let mut r = DensityMatrix::new(m)?;
        if let Some(e) = &self.exact {
            let mut ex = vec![Q::zero(); 4];
            for i in 0..2 {
                for j in 0..2 {
                    ex[i * 2 + j] = (0..2)
                        .map(|k| match keep {
                            Side::Alice => &e[(i * 2 + k) * 4 + j * 2 + k],
                            Side::Bob => &e[(k * 2 + i) * 4 + k * 2 + j],
                        })
                        .sum();
                }
            }
            r.exact = Some(ex);
        }
        Ok(r)
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::InvalidState("Bloch vector needs a single qubit".into()));
        }
        Ok([1, 2, 3].map(|k| (pauli(k) * &self.m).trace().re))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigensystem(&self.m).expect("validated state is Hermitian").0
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(u * &self.m * u.adjoint())
    }
}

/// The separable two-qubit state `½(|00⟩⟨00| + |+1⟩⟨+1|)`.
pub fn paper_state() -> DensityMatrix {
    let mut e = vec![q(0, 1); 16];
    e[0] = q(1, 2);
    for (i, j) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
        e[i * 4 + j] = q(1, 4);
    }
    DensityMatrix::from_exact_real(4, e).expect("state is valid")
}

/// Binary projective qubit measurement `Π_0 = (I + n·σ)/2`, `Π_1 = (I − n·σ)/2`.
#[derive(Clone, Debug)]
pub struct Measurement {
    bloch: [f64; 3],
    exact: Option<[Q; 3]>,
}

impl Measurement {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        let norm = n.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidMeasurement(format!("Bloch vector has norm {norm}, expected 1")));
        }
        Ok(Self { bloch: n, exact: None })
    }

    /// Rational axis; must have unit norm exactly.
    pub fn new_exact(n: [Q; 3]) -> Result<Self> {
        let norm2: Q = n.iter().map(|v| v * v).sum();
        if !norm2.is_one() {
            return Err(Error::InvalidMeasurement(format!("squared norm {} is not 1", format_q(&norm2))));
        }
        let bloch = [n[0].approx(), n[1].approx(), n[2].approx()];
        Ok(Self { bloch, exact: Some(n) })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            bloch: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()],
            exact: None,
        }
    }

    pub fn sigma_x() -> Self {
        Self::new_exact([q(1, 1), q(0, 1), q(0, 1)]).unwrap()
    }

    pub fn sigma_y() -> Self {
        Self::new_exact([q(0, 1), q(1, 1), q(0, 1)]).unwrap()
    }

    pub fn sigma_z() -> Self {
        Self::new_exact([q(0, 1), q(0, 1), q(1, 1)]).unwrap()
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn projector(&self, outcome: usize) -> CMatrix {
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let mut m = pauli(0);
        for k in 0..3 {
            m += pauli(k + 1) * c(sign * self.bloch[k]);
        }
        m * c(0.5)
    }

    /// Exact real projector (row-major 2×2), available for axes in the x–z plane.
    pub fn exact_projector(&self, outcome: usize) -> Option<[Q; 4]> {
        let e = self.exact.as_ref()?;
        if !e[1].is_zero() {
            return None;
        }
        let half = q(1, 2);
        let s = if outcome == 0 { q(1, 1) } else { q(-1, 1) };
        let (nx, nz) = (&s * &e[0], &s * &e[2]);
        Some([
            &half * (Q::one() + &nz),
            &half * &nx,
            &half * &nx,
            &half * (Q::one() - &nz),
        ])
    }
}

fn exact_born(rho: &[Q], pa: &[Q; 4], pb: &[Q; 4]) -> Q {
    // Tr[(Πa ⊗ Πb) ρ]
    let mut s = Q::zero();
    for r in 0..4 {
        for col in 0..4 {
            let k = &pa[(r / 2) * 2 + col / 2] * &pb[(r % 2) * 2 + col % 2];
            if !k.is_zero() {
                s += k * &rho[col * 4 + r];
            }
        }
    }
    s
}

/// `p(ab|xy) = Tr[(Π_{a|x} ⊗ Π_{b|y}) ρ]`; exact when the state and every
/// measurement carry exact data.
pub fn born_box(state: &DensityMatrix, alice: &[Measurement; 2], bob: &[Measurement; 2]) -> Result<CorrBox> {
    state.require_two_qubit()?;
    if let Some(rho) = state.exact() {
        let pa: Option<Vec<[Q; 4]>> = (0..4).map(|k| alice[k / 2].exact_projector(k % 2)).collect();
        let pb: Option<Vec<[Q; 4]>> = (0..4).map(|k| bob[k / 2].exact_projector(k % 2)).collect();
        if let (Some(pa), Some(pb)) = (pa, pb) {
            return CorrBox::from_fn_exact(|x, y, a, b| exact_born(rho, &pa[x * 2 + a], &pb[y * 2 + b]));
        }
    }
    let mut p = [0.0; 16];
    for_each_entry(|x, y, a, b| {
        let k = kron(&alice[x].projector(a), &bob[y].projector(b));
        p[idx(x, y, a, b)] = (k * state.matrix()).trace().re.max(0.0);
    });
    renormalize(&mut p);
    CorrBox::from_f64(p)
}

fn renormalize(p: &mut [f64; 16]) {
    for row in p.chunks_mut(4) {
        let s: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= s;
        }
    }
}

/// Unnormalized conditional states `σ_{a|x}` on Bob's side.
#[derive(Clone, Debug)]
pub struct Assemblage {
    sigma: [[CMatrix; 2]; 2],
}

impl Assemblage {
    /// From operators indexed `[x][a]`.
    pub fn new(sigma: [[CMatrix; 2]; 2]) -> Result<Self> {
        for x in 0..2 {
            for a in 0..2 {
                let s = &sigma[x][a];
                if s.nrows() != 2 || s.ncols() != 2 {
                    return Err(Error::InvalidAssemblage("conditional states must be 2x2".into()));
                }
                let dev = hermitian_deviation(s);
                if dev > STATE_TOL {
                    return Err(Error::InvalidAssemblage(format!("σ_{a}|{x} is not Hermitian ({dev:.3e})")));
                }
                let (vals, _) = eigensystem(s)?;
                if vals[1] < -PSD_TOL {
                    return Err(Error::InvalidAssemblage(format!("σ_{a}|{x} has eigenvalue {:.3e}", vals[1])));
                }
            }
        }
        let r0 = &sigma[0][0] + &sigma[0][1];
        let r1 = &sigma[1][0] + &sigma[1][1];
        let dev = (&r0 - &r1).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > STATE_TOL {
            return Err(Error::InvalidAssemblage(format!("Σ_a σ_a|x depends on x (deviation {dev:.3e})")));
        }
        if (r0.trace() - c(1.0)).norm() > STATE_TOL {
            return Err(Error::InvalidAssemblage("reduced state does not have unit trace".into()));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self, a: usize, x: usize) -> &CMatrix {
        &self.sigma[x][a]
    }

    pub fn reduced_state(&self) -> CMatrix {
        &self.sigma[0][0] + &self.sigma[0][1]
    }
}

/// `σ_{a|x} = Tr_A[(Π_{a|x} ⊗ 1) ρ]`.
pub fn assemblage(state: &DensityMatrix, alice: &[Measurement; 2]) -> Result<Assemblage> {
    state.require_two_qubit()?;
    let rho = state.matrix();
    let cond = |pi: &CMatrix| {
        CMatrix::from_fn(2, 2, |i, j| {
            let mut s = Complex64::zero();
            for k in 0..2 {
                for l in 0..2 {
                    s += pi[(k, l)] * rho[(l * 2 + i, k * 2 + j)];
                }
            }
            s
        })
    };
    Assemblage::new([
        [cond(&alice[0].projector(0)), cond(&alice[0].projector(1))],
        [cond(&alice[1].projector(0)), cond(&alice[1].projector(1))],
    ])
}

/// `p(ab|xy) = Tr(Π_{b|y} σ_{a|x})`.
pub fn box_from_assemblage(asm: &Assemblage, bob: &[Measurement; 2]) -> Result<CorrBox> {
    let mut p = [0.0; 16];
    for_each_entry(|x, y, a, b| {
        p[idx(x, y, a, b)] = (bob[y].projector(b) * asm.sigma(a, x)).trace().re.max(0.0);
    });
    renormalize(&mut p);
    CorrBox::from_f64(p)
}

fn check_visibility(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::Range(format!("visibility V = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Noisy CHSH family `P(ab|xy) = (2 + (−1)^{a⊕b⊕xy} √2 V)/8`.
pub fn noisy_chsh_box(v: f64) -> Result<CorrBox> {
    check_visibility(v)?;
    if v == 0.0 {
        return Ok(crate::boxes::uniform_box());
    }
    CorrBox::from_fn(|x, y, a, b| {
        let sign = if (a ^ b ^ (x & y)) == 0 { 1.0 } else { -1.0 };
        (2.0 + sign * std::f64::consts::SQRT_2 * v) / 8.0
    })
}

/// White-noise BB84 family `P(ab|xy) = (1 + (−1)^{a⊕b⊕xy} δ_{xy} V)/4`.
pub fn bb84_box(v: f64) -> Result<CorrBox> {
    check_visibility(v)?;
    CorrBox::from_fn(|x, y, a, b| {
        let sign = if (a ^ b ^ (x & y)) == 0 { 1.0 } else { -1.0 };
        let delta = if x == y { 1.0 } else { 0.0 };
        (1.0 + sign * delta * v) / 4.0
    })
}

/// Exact BB84 family member for rational `V`.
pub fn bb84_box_exact(v: &Q) -> Result<CorrBox> {
    if v.is_negative() || v > &Q::one() {
        return Err(Error::Range(format!("visibility V = {} outside [0, 1]", format_q(v))));
    }
    CorrBox::from_fn_exact(|x, y, a, b| {
        if x != y {
            return q(1, 4);
        }
        let t = if (a ^ b ^ (x & y)) == 0 { Q::one() + v } else { Q::one() - v };
        t * q(1, 4)
    })
}

/// Random states, measurements and unitaries for property tests.
pub mod random {
    use super::*;
    use rand::Rng;

    fn gaussian(rng: &mut impl Rng) -> f64 {
        // Box–Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// `G G† / Tr` with complex Gaussian `G` (full rank with probability one).
    pub fn state(rng: &mut impl Rng, n: usize) -> DensityMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
        let m = &g * g.adjoint();
        let tr = m.trace();
        DensityMatrix::new(m / tr).expect("Wishart sample is a state")
    }

    pub fn measurement(rng: &mut impl Rng) -> Measurement {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        Measurement::new(v.map(|x| x / n)).expect("normalized axis")
    }

    /// Haar-ish unitary from Gram–Schmidt on complex Gaussian columns.
    pub fn unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
        let mut u = CMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
        for j in 0..n {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| u[(i, k)].conj() * u[(i, j)]).sum();
                for i in 0..n {
                    let v = u[(i, k)];
                    u[(i, j)] -= proj * v;
                }
            }
            let norm = (0..n).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                u[(i, j)] /= Complex64::new(norm, 0.0);
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::deterministic_box;

    fn corr1() -> CorrBox {
        CorrBox::from_rows_exact([
            [q(1, 2), q(1, 4), q(0, 1), q(1, 4)],
            [q(3, 8), q(3, 8), q(1, 8), q(1, 8)],
            [q(1, 4), q(1, 2), q(1, 4), q(0, 1)],
            [q(3, 8), q(3, 8), q(1, 8), q(1, 8)],
        ])
        .unwrap()
    }

    fn zx() -> [Measurement; 2] {
        [Measurement::sigma_z(), Measurement::sigma_x()]
    }

    #[test]
    fn paper_state_entries_and_spectrum() {
        let rho = paper_state();
        assert_eq!(rho.exact().unwrap()[0], q(1, 2));
        let vals = rho.eigenvalues();
        for (v, e) in vals.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let rb = rho.reduced(Side::Bob).unwrap();
        assert_eq!(rb.exact().unwrap(), &[q(1, 2), q(0, 1), q(0, 1), q(1, 2)]);
        let ra = rho.reduced(Side::Alice).unwrap().bloch().unwrap();
        assert!((ra[0] - 0.5).abs() < 1e-12 && ra[1].abs() < 1e-12 && (ra[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn born_box_reproduces_table_exactly() {
        let b = born_box(&paper_state(), &zx(), &zx()).unwrap();
        assert!(b.is_rational());
        assert_eq!(b.exact(), corr1().exact());
    }

    #[test]
    fn born_box_of_mixed_and_product_states() {
        let mixed = DensityMatrix::maximally_mixed(4);
        let b = born_box(&mixed, &[Measurement::sigma_x(), Measurement::from_angles(0.3, 1.1)], &zx()).unwrap();
        assert!(b.entries().iter().all(|v| (v - 0.25).abs() < 1e-12));
        let zero = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        let prod = DensityMatrix::product(&zero, &zero).unwrap();
        let z = [Measurement::sigma_z(), Measurement::sigma_z()];
        assert!(born_box(&prod, &z, &z).unwrap().matches(&deterministic_box(0, 0, 0, 0), 1e-12));
    }

    #[test]
    fn assemblage_of_paper_state() {
        let asm = assemblage(&paper_state(), &zx()).unwrap();
        let s = asm.sigma(0, 0);
        assert!((s[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((s[(1, 1)].re - 0.25).abs() < 1e-12);
        assert!(s[(0, 1)].norm() < 1e-12);
        let b = box_from_assemblage(&asm, &zx()).unwrap();
        assert!(b.max_abs_diff(&corr1()) < 1e-12);
    }

    #[test]
    fn assemblage_edge_cases() {
        let asm = assemblage(&DensityMatrix::maximally_mixed(4), &zx()).unwrap();
        for x in 0..2 {
            for a in 0..2 {
                let s = asm.sigma(a, x);
                assert!((s[(0, 0)].re - 0.25).abs() < 1e-12 && (s[(1, 1)].re - 0.25).abs() < 1e-12);
            }
        }
        let same = [Measurement::sigma_x(), Measurement::sigma_x()];
        let b = box_from_assemblage(&assemblage(&paper_state(), &zx()).unwrap(), &same).unwrap();
        for x in 0..2 {
            for a in 0..2 {
                for bb in 0..2 {
                    assert!((b.p(x, 0, a, bb) - b.p(x, 1, a, bb)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert!(DensityMatrix::new(bad).is_err());
        let neg = CMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(neg).is_err());
        assert!(Measurement::new([1.0, 1.0, 0.0]).is_err());
        assert!(Measurement::new_exact([q(3, 5), q(0, 1), q(4, 5)]).is_ok());
        let single = DensityMatrix::maximally_mixed(2);
        assert!(born_box(&single, &zx(), &zx()).is_err());
    }

    #[test]
    fn families() {
        assert!(noisy_chsh_box(1.5).is_err());
        assert!(bb84_box(-0.1).is_err());
        let b = noisy_chsh_box(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((b.p(0, 0, 0, 0) - 3.0 / 8.0).abs() < 1e-15);
        let b = bb84_box(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((b.p(0, 0, 0, 0) - (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 4.0).abs() < 1e-15);
        assert_eq!(bb84_box_exact(&q(1, 2)).unwrap().exact_entry(0, 0, 0, 0).unwrap(), &q(3, 8));
        assert!(bb84_box_exact(&q(0, 1)).unwrap().matches(&crate::boxes::uniform_box(), 0.0));
        assert!(noisy_chsh_box(0.0).unwrap().matches(&crate::boxes::uniform_box(), 0.0));
    }
}
