//! Massless Dirac operators in Majorana form and chiral random matrices.
//!
//! The Majorana space is `C^8 (x) C^Nc (x) C^2`: eight spinor components
//! (three qubit slots), colour, and a plane-wave doublet on which a
//! derivative acts as the real skew `k [[0, -1], [1, 0]]`. With that choice
//! `H = i Gamma^mu (d_mu - A_mu)` is imaginary skew for real momenta.

use std::ops::{Add, Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::classifier::SymmetryClass;
use crate::ensembles::{sample, EnsembleSpec};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, hermitian_deviation, hermitian_eigenvalues, identity, kron, max_abs, max_abs_diff, pauli_y, ComplexMatrix,
    RngStream, TOL_STRUCT,
};

/// Gaussian integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };

    pub fn conj(self) -> Self {
        GaussInt { re: self.re, im: -self.im }
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt { re: -self.re, im: -self.im }
    }
}

/// Dense square matrix over the Gaussian integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    pub n: usize,
    pub data: Vec<GaussInt>,
}

impl ExactMatrix {
    pub fn from_rows(n: usize, rows: &[GaussInt]) -> Self {
        assert_eq!(rows.len(), n * n);
        ExactMatrix { n, data: rows.to_vec() }
    }

    pub fn zeros(n: usize) -> Self {
        ExactMatrix { n, data: vec![GaussInt::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = GaussInt::ONE;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> GaussInt {
        self.data[i * self.n + j]
    }

    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        let n = self.n * other.n;
        let mut m = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..other.n {
                    for l in 0..other.n {
                        m.data[(i * other.n + k) * n + j * other.n + l] = self.get(i, j) * other.get(k, l);
                    }
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[j * self.n + i] = self.get(i, j);
            }
        }
        m
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0)
    }

    pub fn scale(&self, s: i64) -> ExactMatrix {
        ExactMatrix { n: self.n, data: self.data.iter().map(|&z| z * GaussInt { re: s, im: 0 }).collect() }
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |i, j| {
            let z = self.get(i, j);
            c64(z.re as f64, z.im as f64)
        })
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, o: &ExactMatrix) -> ExactMatrix {
        ExactMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, o: &ExactMatrix) -> ExactMatrix {
        let n = self.n;
        let mut m = ExactMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == GaussInt::ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] = m.data[i * n + j] + a * o.get(k, j);
                }
            }
        }
        m
    }
}

fn exact_pauli() -> [ExactMatrix; 4] {
    use GaussInt as G;
    let (o, z, i) = (G::ONE, G::ZERO, G::I);
    [
        ExactMatrix::identity(2),
        ExactMatrix::from_rows(2, &[z, o, o, z]),
        ExactMatrix::from_rows(2, &[z, -i, i, z]),
        ExactMatrix::from_rows(2, &[o, z, z, -o]),
    ]
}

fn triple(a: &ExactMatrix, b: &ExactMatrix, c: &ExactMatrix) -> ExactMatrix {
    a.kron(b).kron(c)
}

/// The Majorana-form Clifford generators, chirality and U(1) generator.
#[derive(Clone, Debug)]
pub struct GammaSet {
    pub gamma: [ExactMatrix; 4],
    pub gamma5: ExactMatrix,
    pub q_gen: ExactMatrix,
}

/// `Gamma^0 = 1 (x) s_z (x) 1`, `Gamma^1 = s_x (x) s_y (x) s_y`,
/// `Gamma^2 = s_y (x) s_y (x) 1`, `Gamma^3 = s_z (x) s_y (x) s_y`,
/// `Gamma_5 = 1 (x) s_x (x) 1`, `Q = 1 (x) 1 (x) s_y`.
pub fn gamma_matrices() -> GammaSet {
    let [one, sx, sy, sz] = exact_pauli();
    GammaSet {
        gamma: [
            triple(&one, &sz, &one),
            triple(&sx, &sy, &sy),
            triple(&sy, &sy, &one),
            triple(&sz, &sy, &sy),
        ],
        gamma5: triple(&one, &sx, &one),
        q_gen: triple(&one, &one, &sy),
    }
}

/// Outcome of the exact checks on a [`GammaSet`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaAlgebraReport {
    pub clifford: bool,
    pub real_symmetric: bool,
    pub gamma5_anticommutes: bool,
    pub gamma5_involution: bool,
    pub q_commutes: bool,
}

impl GammaAlgebraReport {
    pub fn all(&self) -> bool {
        self.clifford && self.real_symmetric && self.gamma5_anticommutes && self.gamma5_involution && self.q_commutes
    }
}

/// Exact verification of the Clifford relations and the symmetry properties.
pub fn check_gamma_algebra(set: &GammaSet) -> GammaAlgebraReport {
    let n = set.gamma5.n;
    let id2 = ExactMatrix::identity(n).scale(2);
    let zero = ExactMatrix::zeros(n);
    let anticomm = |a: &ExactMatrix, b: &ExactMatrix| &(a * b) + &(b * a);
    let comm_zero = |a: &ExactMatrix, b: &ExactMatrix| (a * b) == (b * a);
    let mut clifford = true;
    for (mu, a) in set.gamma.iter().enumerate() {
        for (nu, b) in set.gamma.iter().enumerate() {
            let expected = if mu == nu { &id2 } else { &zero };
            clifford &= anticomm(a, b) == *expected;
        }
    }
    GammaAlgebraReport {
        clifford,
        real_symmetric: set.gamma.iter().chain([&set.gamma5]).all(|g| g.is_real() && g.transpose() == *g),
        gamma5_anticommutes: set.gamma.iter().all(|g| anticomm(g, &set.gamma5) == zero),
        gamma5_involution: &set.gamma5 * &set.gamma5 == ExactMatrix::identity(n),
        q_commutes: set.gamma.iter().chain([&set.gamma5]).all(|g| comm_zero(g, &set.q_gen)),
    }
}

fn su_deviation(a: &ComplexMatrix) -> f64 {
    let anti = max_abs(&(a + a.adjoint()));
    anti.max(a.trace().norm())
}

/// `A_mu -> 1 (x) 1 (x) (A^- - A^+ s_y)` on `C^8 (x) C^Nc`, with
/// `A^(+-) = (A +- A^T) / 2`; every output is real skew.
pub fn majorana_gauge(a_mu: &[ComplexMatrix; 4]) -> Result<[ComplexMatrix; 4]> {
    let nc = a_mu[0].nrows();
    for (index, a) in a_mu.iter().enumerate() {
        if a.shape() != (nc, nc) {
            return Err(Error::DimensionMismatch { expected: nc, found: a.nrows() });
        }
        let deviation = su_deviation(a);
        if deviation > TOL_STRUCT {
            return Err(Error::NotSuNc { index, deviation });
        }
    }
    let id4 = identity(4);
    let half = c64(0.5, 0.0);
    Ok(a_mu.clone().map(|a| {
        let minus = (&a - a.transpose()) * half;
        let plus = (&a + a.transpose()) * half;
        let slot = kron(&identity(2), &minus) - kron(&pauli_y(), &plus);
        kron(&id4, &slot)
    }))
}

/// Plane-wave derivative `[[0, -1], [1, 0]]`.
fn derivative_doublet() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
}

/// `H = i Gamma^mu (k_mu J - A_mu)` on `C^8 (x) C^Nc (x) C^2`.
pub fn majorana_dirac_hamiltonian(k: [f64; 4], a_mu: &[ComplexMatrix; 4]) -> Result<ComplexMatrix> {
    let gauge = majorana_gauge(a_mu)?;
    let nc = a_mu[0].nrows();
    let set = gamma_matrices();
    let j = derivative_doublet();
    let id_nc = identity(nc);
    let dim = 16 * nc;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for mu in 0..4 {
        let g = kron(&set.gamma[mu].to_complex(), &id_nc);
        let d = kron(&identity(8 * nc), &j) * c64(k[mu], 0.0);
        let a = kron(&gauge[mu], &identity(2));
        h += kron(&g, &identity(2)) * (d - a) * c64(0.0, 1.0);
    }
    Ok(h)
}

/// An operator `G` on `C^8` lifted to the full Majorana space.
pub fn lift_spinor_operator(g: &ExactMatrix, nc: usize) -> ComplexMatrix {
    kron(&g.to_complex(), &identity(2 * nc))
}

/// Random element of `su(n)`.
pub fn random_su(rng: &mut RngStream, n: usize) -> ComplexMatrix {
    let z = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_normal());
    let mut a = (&z - z.adjoint()) * c64(0.5, 0.0);
    let shift = a.trace() / c64(n as f64, 0.0);
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    a
}

/// Checks for recasting the chiral relation as an anti-unitary symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecastReport {
    /// `conj(H) = -H`.
    pub imaginary_skew: bool,
    /// `Gamma_5 H Gamma_5 = -H`.
    pub chiral: bool,
    /// `H = Gamma_5 conj(H) Gamma_5`, i.e. `T H T^-1 = H` for `T = Gamma_5 conj`.
    pub t_symmetric: bool,
    pub passed: bool,
}

pub fn chirality_recast_check(h: &ComplexMatrix, gamma5: &ComplexMatrix, tol: f64) -> RecastReport {
    let scale = max_abs(h).max(1.0);
    let hermitian = hermitian_deviation(h) <= tol * scale;
    let hc = h.map(|z| z.conj());
    let imaginary_skew = max_abs_diff(&hc, &(-h)) <= tol * scale;
    let chiral = max_abs_diff(&(gamma5 * h * gamma5), &(-h)) <= tol * scale;
    let t_symmetric = max_abs_diff(&(gamma5 * &hc * gamma5), h) <= tol * scale;
    // the first two imply the third
    let passed = hermitian && imaginary_skew && chiral && t_symmetric;
    RecastReport { imaginary_skew, chiral, t_symmetric, passed }
}

/// Entry field of a chiral block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Complex,
    Real,
    Quaternion,
}

impl Field {
    pub fn class(self) -> SymmetryClass {
        match self {
            Field::Complex => SymmetryClass::AIII,
            Field::Real => SymmetryClass::BDI,
            Field::Quaternion => SymmetryClass::CII,
        }
    }

    /// Complex dimensions per entry.
    pub fn width(self) -> usize {
        if self == Field::Quaternion {
            2
        } else {
            1
        }
    }
}

/// `D = [[0, Z], [Z^dagger, 0]]`.
#[derive(Clone, Debug)]
pub struct ChiralOperator {
    pub field: Field,
    /// Complex embedding of the `p x q` block.
    pub z: ComplexMatrix,
    pub d: ComplexMatrix,
    /// `p - q` in units of the field.
    pub nu: i64,
}

impl ChiralOperator {
    pub fn from_z(z: ComplexMatrix, field: Field) -> Self {
        let (p, q) = z.shape();
        let mut d = ComplexMatrix::zeros(p + q, p + q);
        d.view_mut((0, p), (p, q)).copy_from(&z);
        d.view_mut((p, 0), (q, p)).copy_from(&z.adjoint());
        let w = field.width() as i64;
        ChiralOperator { field, nu: (p as i64 - q as i64) / w, z, d }
    }

    pub fn gamma5(&self) -> ComplexMatrix {
        let (p, q) = self.z.shape();
        crate::linalg::direct_sum(&[identity(p), -identity(q)])
    }
}

pub fn sample_chiral(p: usize, q: usize, field: Field, sigma: f64, rng: &mut RngStream) -> Result<ChiralOperator> {
    let spec = EnsembleSpec::chiral(field.class(), p, q).with_sigma(sigma);
    let h = sample(&spec, rng)?;
    let (pc, qc) = h.blocks.expect("chiral samples carry block sizes");
    let z = h.matrix.view((0, pc), (pc, qc)).into_owned();
    Ok(ChiralOperator::from_z(z, field))
}

/// Kernel count of a chiral operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeCount {
    /// Kernel dimension in the complex embedding.
    pub raw: usize,
    /// Kramers pairs, for quaternion entries.
    pub quaternionic: Option<usize>,
    pub tol: f64,
}

impl ZeroModeCount {
    /// Count in units of the entry field, comparable to `|nu|`.
    pub fn field_count(&self) -> usize {
        self.quaternionic.unwrap_or(self.raw)
    }
}

pub const DEFAULT_ZERO_MODE_REL_TOL: f64 = 1e-8;

/// Count eigenvalues with `|lambda| <= tol`; `tol` defaults to
/// `1e-8 * spectral radius`.
pub fn zero_modes(op: &ChiralOperator, tol: Option<f64>) -> Result<ZeroModeCount> {
    let ev = hermitian_eigenvalues(&op.d)?;
    let radius = ev.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let tol = tol.unwrap_or(DEFAULT_ZERO_MODE_REL_TOL * radius);
    if let Some(&value) = ev.iter().find(|e| e.abs() > tol && e.abs() < 10.0 * tol) {
        return Err(Error::ToleranceAmbiguous { value, tol });
    }
    let raw = ev.iter().filter(|e| e.abs() <= tol).count();
    let w = op.field.width();
    let needed = op.nu.unsigned_abs() as usize * w;
    if raw < needed {
        return Err(Error::IndexViolation { found: raw / w, nu: op.nu.unsigned_abs() as usize });
    }
    let quaternionic = (op.field == Field::Quaternion).then_some(raw / 2);
    Ok(ZeroModeCount { raw, quaternionic, tol })
}
