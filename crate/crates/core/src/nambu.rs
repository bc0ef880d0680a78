//! Nambu space of a system of fermions with quadratic Hamiltonians.
//!
//! Coordinates: the first `N` entries are the creation side `u`, the last `N`
//! the annihilation side `v`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    conj, hermitian_deviation, hermitian_eig, i_sigma_y, identity, kron, max_abs, max_abs_diff,
    unitarity_deviation, AntiUnitaryOp, ComplexMatrix, ComplexVector, ONE, I, TOL_STRUCT,
};

/// Nambu space `V* + V` over `N` orbitals.
#[derive(Clone, Debug)]
pub struct NambuSpace {
    pub n_orbitals: usize,
    pub c_op: AntiUnitaryOp,
}

impl NambuSpace {
    pub fn new(n_orbitals: usize) -> Result<Self> {
        if n_orbitals == 0 {
            return Err(Error::Schema("Nambu space needs at least one orbital".into()));
        }
        Ok(NambuSpace { n_orbitals, c_op: particle_hole_op(n_orbitals) })
    }

    pub fn dim(&self) -> usize {
        2 * self.n_orbitals
    }

    pub fn symmetric_form(&self, psi1: &ComplexVector, psi2: &ComplexVector) -> Result<Complex64> {
        symmetric_form(psi1, psi2)
    }
}

/// Bilinear pairing `{u1 + v1, u2 + v2} = sum_a (u1_a v2_a + u2_a v1_a)`.
pub fn symmetric_form(psi1: &ComplexVector, psi2: &ComplexVector) -> Result<Complex64> {
    let dim = psi1.len();
    if !dim.is_multiple_of(2) || psi2.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim + dim % 2, found: psi2.len() });
    }
    let n = dim / 2;
    Ok((0..n).map(|a| psi1[a] * psi2[n + a] + psi2[a] * psi1[n + a]).sum())
}

/// Particle-hole conjugation `C(u + v) = conj(v) + conj(u)`.
pub fn particle_hole_op(n_orbitals: usize) -> AntiUnitaryOp {
    let n = n_orbitals;
    let mut w = ComplexMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        w[(a, n + a)] = ONE;
        w[(n + a, a)] = ONE;
    }
    AntiUnitaryOp::new(w).expect("permutation matrix is unitary")
}

/// Spin-1/2 time reversal `i sigma_y conj` on both halves of Nambu space;
/// orbital `(r, sigma)` has index `2 r + sigma`. Commutes with
/// [`particle_hole_op`] and squares to `-1`.
pub fn spin_time_reversal(n_orbitals: usize) -> Result<AntiUnitaryOp> {
    if n_orbitals == 0 || !n_orbitals.is_multiple_of(2) {
        return Err(Error::SpecInvalid(format!("spin-1/2 orbitals come in pairs, got {n_orbitals}")));
    }
    AntiUnitaryOp::new(kron(&identity(n_orbitals), &i_sigma_y()))
}

/// `H = sum A_ab c_a^dagger c_b + (B_ab c_a^dagger c_b^dagger + h.c.)/2` in matrix form.
#[derive(Clone, Debug)]
pub struct QuadraticHamiltonian {
    /// Hermitian.
    pub a: ComplexMatrix,
    /// Skew-symmetric.
    pub b: ComplexMatrix,
}

impl QuadraticHamiltonian {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        let h = QuadraticHamiltonian { a, b };
        h.validate()?;
        Ok(h)
    }

    pub fn n_orbitals(&self) -> usize {
        self.a.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        if self.a.shape() != (n, n) || self.b.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: self.b.nrows() });
        }
        let scale = max_abs(&self.a).max(max_abs(&self.b)).max(1.0);
        if hermitian_deviation(&self.a) > TOL_STRUCT * scale {
            return Err(Error::StructureViolation("A is not Hermitian".into()));
        }
        if max_abs(&(&self.b + self.b.transpose())) > TOL_STRUCT * scale {
            return Err(Error::StructureViolation("B is not skew-symmetric".into()));
        }
        Ok(())
    }
}

/// `[[A, B], [-conj(B), -conj(A)]]`.
pub fn assemble_bdg(h: &QuadraticHamiltonian) -> Result<ComplexMatrix> {
    h.validate()?;
    let n = h.n_orbitals();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&h.a);
    m.view_mut((0, n), (n, n)).copy_from(&h.b);
    m.view_mut((n, 0), (n, n)).copy_from(&(-conj(&h.b)));
    m.view_mut((n, n), (n, n)).copy_from(&(-conj(&h.a)));
    Ok(m)
}

/// Unitary `W` with rows `(c + c^dagger)/sqrt 2` and `i(c - c^dagger)/sqrt 2`;
/// `W H W^dagger` is imaginary skew for every assembled `H`.
pub fn majorana_basis(n_orbitals: usize) -> ComplexMatrix {
    let n = n_orbitals;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = ComplexMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        w[(a, a)] = Complex64::new(r, 0.0);
        w[(a, n + a)] = Complex64::new(r, 0.0);
        w[(n + a, a)] = I * r;
        w[(n + a, n + a)] = -I * r;
    }
    w
}

/// `V = W (x) C^2` for spin-1/2 orbitals.
#[derive(Clone, Debug)]
pub struct SpinFactorization {
    pub w_dim: usize,
    /// Matrix of the skew form `[.,.]` on `W`.
    pub skew_form: ComplexMatrix,
    /// Unitary map from `W (x) C^2` (spin index fastest) onto Nambu coordinates.
    pub embedding: ComplexMatrix,
}

impl SpinFactorization {
    /// `[w1, w2]`.
    pub fn bracket(&self, w1: &ComplexVector, w2: &ComplexVector) -> Complex64 {
        (w1.transpose() * &self.skew_form * w2)[(0, 0)]
    }

    /// Embedded image of `w (x) s`.
    pub fn embed(&self, w: &ComplexVector, s: &ComplexVector) -> ComplexVector {
        let ws = kron(&ComplexMatrix::from_column_slice(w.len(), 1, w.as_slice()), &ComplexMatrix::from_column_slice(2, 1, s.as_slice()));
        &self.embedding * ws.column(0)
    }

    /// Embedded image of an operator `x (x) y` on `W (x) C^2`.
    pub fn embed_operator(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
        &self.embedding * kron(x, y) * self.embedding.adjoint()
    }
}

/// Spin form `eps(s1, s2) = s1^T (i sigma_y) s2`.
pub fn spin_form(s1: &ComplexVector, s2: &ComplexVector) -> Complex64 {
    (s1.transpose() * i_sigma_y() * s2)[(0, 0)]
}

/// Factorize Nambu space of `2 n_half` spin-1/2 orbitals (`4 n_half`
/// dimensions) as `W (x) C^2` with `dim W = 2 n_half`.
///
/// Orbital `(r, sigma)` has index `2 r + sigma`. `W` has coordinates
/// `(p_1..p_n, h_1..h_n)`: `p_r (x) s` maps to the creation components of
/// orbital `r` with spinor `s`, `h_r (x) s` to the annihilation components
/// with spinor `i sigma_y s`.
pub fn spin_factorize(n_half: usize) -> SpinFactorization {
    let n_orb = 2 * n_half;
    let w_dim = 2 * n_half;
    let dim = 2 * n_orb;
    let isy = i_sigma_y();
    let mut e = ComplexMatrix::zeros(dim, dim);
    for r in 0..n_half {
        for sigma in 0..2 {
            // p_r (x) e_sigma
            e[(2 * r + sigma, 2 * r + sigma)] = ONE;
            // h_r (x) e_sigma
            let col = 2 * (n_half + r) + sigma;
            for tau in 0..2 {
                e[(n_orb + 2 * r + tau, col)] = isy[(tau, sigma)];
            }
        }
    }
    let mut omega = ComplexMatrix::zeros(w_dim, w_dim);
    for r in 0..n_half {
        omega[(r, n_half + r)] = ONE;
        omega[(n_half + r, r)] = -ONE;
    }
    SpinFactorization { w_dim, skew_form: omega, embedding: e }
}

/// Spin factorization of a Nambu space of the given dimension.
pub fn spin_factorize_dim(nambu_dim: usize) -> Result<SpinFactorization> {
    if nambu_dim == 0 || !nambu_dim.is_multiple_of(4) {
        return Err(Error::DimensionNotDivisible(nambu_dim));
    }
    Ok(spin_factorize(nambu_dim / 4))
}

/// Unitary `Q = i C T` and its eigenspaces.
#[derive(Clone, Debug)]
pub struct QSplit {
    pub q: ComplexMatrix,
    pub v_plus: ComplexMatrix,
    pub v_minus: ComplexMatrix,
}

/// Build `Q = i C T` for `C^2 = +1`, `T^2 = -1`, `CT = TC` and split the space.
pub fn q_split(c: &AntiUnitaryOp, t: &AntiUnitaryOp) -> Result<QSplit> {
    if c.square_sign()?.as_i8() != 1 || t.square_sign()?.as_i8() != -1 {
        return Err(Error::AlgebraViolation("q_split needs C^2 = +1 and T^2 = -1".into()));
    }
    if max_abs_diff(&c.compose(t), &t.compose(c)) > TOL_STRUCT {
        return Err(Error::AlgebraViolation("C and T do not commute".into()));
    }
    let q = c.compose(t) * I;
    let n = q.nrows();
    if unitarity_deviation(&q) > TOL_STRUCT {
        return Err(Error::AlgebraViolation("Q is not unitary".into()));
    }
    if max_abs_diff(&(&q * &q), &identity(n)) > TOL_STRUCT {
        return Err(Error::AlgebraViolation("Q^2 differs from the identity".into()));
    }
    if q.trace().norm() > TOL_STRUCT * n as f64 {
        return Err(Error::AlgebraViolation(format!("Tr Q = {} is not zero", q.trace())));
    }
    // unitary involution, hence Hermitian
    let eig = hermitian_eig(&q)?;
    let minus = eig.values.iter().filter(|&&v| v < 0.0).count();
    Ok(QSplit {
        v_minus: eig.vectors.columns(0, minus).into_owned(),
        v_plus: eig.vectors.columns(minus, n - minus).into_owned(),
        q,
    })
}
