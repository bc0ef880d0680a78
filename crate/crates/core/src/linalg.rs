//! Dense complex linear algebra shared by every other module: Hermitian
//! eigensolving, anti-unitary operators stored by their linear part, seeded
//! Gaussian streams, and rank decisions with an explicit singular-value gap.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;
pub type RealMatrix = DMatrix<f64>;

/// Default tolerance for structural identities (Hermiticity, unitarity, squares).
pub const TOL_STRUCT: f64 = 1e-10;
/// Default tolerance for eigen-decomposition residuals.
pub const TOL_EIG: f64 = 1e-9;
/// Frobenius distance under which two group elements are identified.
pub const TOL_GROUP: f64 = 1e-8;
/// Minimum ratio between consecutive singular values at a rank cut.
pub const RANK_GAP: f64 = 1e6;
/// Singular values below this fraction of the largest one are candidates for zero.
const RANK_REL_THRESHOLD: f64 = 1e-8;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn conj(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &ComplexVector) -> ComplexVector {
    v.map(|z| z.conj())
}

pub fn real_to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| c64(x, 0.0))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `i sigma_y`, the real 2x2 symplectic unit `[[0, 1], [-1, 0]]`.
pub fn i_sigma_y() -> ComplexMatrix {
    pauli_y() * I
}

/// Block-diagonal direct sum of square blocks.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

pub fn hermitian_deviation(h: &ComplexMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(h, &h.adjoint())
}

pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Hermitian inner product `<a, b> = sum conj(a_i) b_i`.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    a.dotc(b)
}

fn scale_of(m: &ComplexMatrix) -> f64 {
    max_abs(m).max(1.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `max |H V - V diag(lambda)|`.
    pub fn residual(&self, h: &ComplexMatrix) -> f64 {
        let lambda = DVector::from_iterator(self.values.len(), self.values.iter().map(|&x| c64(x, 0.0)));
        let rhs = &self.vectors * ComplexMatrix::from_diagonal(&lambda);
        max_abs_diff(&(h * &self.vectors), &rhs)
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: h.ncols() });
    }
    let deviation = hermitian_deviation(h);
    if !(deviation <= TOL_STRUCT * scale_of(h)) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn symmetrized(h: &ComplexMatrix) -> ComplexMatrix {
    (h + h.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let n = h.nrows();
    let eig = SymmetricEigen::try_new(symmetrized(h), f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues only; skips the eigenvector accumulation.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut values: Vec<f64> = symmetrized(h).symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Sign of an involution square, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Decide whether `m` is `+Id` or `-Id` up to `tol`.
pub fn scalar_sign(m: &ComplexMatrix, tol: f64) -> Result<Sign> {
    let n = m.nrows();
    if n == 0 || !m.is_square() {
        return Err(Error::NotInvolutive { deviation: f64::INFINITY });
    }
    let c = m[(0, 0)];
    let deviation = max_abs_diff(m, &(identity(n) * c));
    let off_unit = (c.re.abs() - 1.0).abs().max(c.im.abs());
    if deviation > tol || off_unit > tol {
        return Err(Error::NotInvolutive { deviation: deviation.max(off_unit) });
    }
    Ok(if c.re > 0.0 { Sign::Plus } else { Sign::Minus })
}

/// An anti-unitary operator `psi -> w conj(psi)`, stored by its unitary part `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiUnitaryOp {
    w: ComplexMatrix,
}

impl AntiUnitaryOp {
    pub fn new(w: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(w, TOL_STRUCT)
    }

    pub fn with_tolerance(w: ComplexMatrix, tol: f64) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::DimensionMismatch { expected: w.nrows(), found: w.ncols() });
        }
        let deviation = unitarity_deviation(&w);
        if !(deviation <= tol) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(AntiUnitaryOp { w })
    }

    /// Plain complex conjugation on `C^n`.
    pub fn conjugation(n: usize) -> Self {
        AntiUnitaryOp { w: identity(n) }
    }

    pub fn linear_part(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn apply(&self, psi: &ComplexVector) -> Result<ComplexVector> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.len() });
        }
        Ok(&self.w * conj_vec(psi))
    }

    /// Linear part of the square, `w conj(w)`.
    pub fn square(&self) -> ComplexMatrix {
        &self.w * conj(&self.w)
    }

    pub fn square_sign(&self) -> Result<Sign> {
        self.square_sign_with(TOL_STRUCT)
    }

    pub fn square_sign_with(&self, tol: f64) -> Result<Sign> {
        scalar_sign(&self.square(), tol)
    }

    /// The unitary `self o other`, i.e. `w1 conj(w2)`.
    pub fn compose(&self, other: &AntiUnitaryOp) -> ComplexMatrix {
        &self.w * conj(&other.w)
    }

    /// `T M T^-1 = w conj(M) w^dagger`.
    pub fn conjugate_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &self.w * conj(m) * self.w.adjoint()
    }

    /// The operator seen in new coordinates `psi' = u psi`: `u w u^T`.
    pub fn change_basis(&self, u: &ComplexMatrix) -> AntiUnitaryOp {
        AntiUnitaryOp { w: u * &self.w * u.transpose() }
    }

    /// Restriction to the subspace spanned by the orthonormal columns of `basis`,
    /// assumed invariant: `basis^dagger w conj(basis)`.
    pub fn restrict(&self, basis: &ComplexMatrix) -> AntiUnitaryOp {
        AntiUnitaryOp { w: basis.adjoint() * &self.w * conj(basis) }
    }
}

/// Identifier of the pseudo-random generator, echoed in run manifests.
pub const RNG_ALGORITHM: &str = "ChaCha20Rng (rand_chacha 0.9) seeded with seed_from_u64(seed), set_stream(stream_id); normals via rand_distr::StandardNormal";

/// A reproducible random stream identified by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        c64(self.standard_normal(), self.standard_normal())
    }
}

/// `n` i.i.d. normal draws with standard deviation `sigma`.
pub fn gaussian_real(rng: &mut RngStream, n: usize, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    Ok((0..n).map(|_| sigma * rng.standard_normal()).collect())
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fix.
pub fn random_unitary(rng: &mut RngStream, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_normal());
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = out.column_mut(j);
        col *= phase;
    }
    out
}

/// Random Hermitian matrix with standard complex Gaussian entries.
pub fn random_hermitian(rng: &mut RngStream, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_normal());
    (&g + g.adjoint()).scale(0.5)
}

/// Rank from descending singular values, with an explicit gap test.
///
/// `len` is the number of singular values implied by the problem; missing
/// trailing values count as zero.
pub fn rank_with_gap(singular_desc: &[f64], len: usize) -> Result<usize> {
    let s_max = singular_desc.first().copied().unwrap_or(0.0);
    if s_max <= 0.0 {
        return Ok(0);
    }
    let threshold = s_max * RANK_REL_THRESHOLD;
    let rank = singular_desc.iter().take_while(|&&s| s > threshold).count();
    if rank < len {
        let below = singular_desc.get(rank).copied().unwrap_or(0.0);
        let above = singular_desc[rank - 1];
        if below > 0.0 && above / below < RANK_GAP {
            return Err(Error::RankAmbiguous { ratio: above / below });
        }
    }
    Ok(rank)
}

fn sorted_desc(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Orthonormal basis (as columns) of the null space of a complex matrix.
pub fn complex_nullspace(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    nullspace_impl(a, None)
}

/// Null space with singular values judged against `scale` rather than the
/// largest singular value; needed when every column may vanish.
pub fn complex_nullspace_scaled(a: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    nullspace_impl(a, Some(scale))
}

fn nullspace_impl(a: &ComplexMatrix, scale: Option<f64>) -> Result<ComplexMatrix> {
    let cols = a.ncols();
    let padded;
    let a = if a.nrows() < cols {
        let mut p = ComplexMatrix::zeros(cols, cols);
        p.view_mut((0, 0), a.shape()).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let mut svd = a.clone().svd(false, true);
    svd.sort_by_singular_values();
    let s = sorted_desc(svd.singular_values.iter().copied());
    let rank = match scale {
        None => rank_with_gap(&s, cols)?,
        Some(scale) => {
            let mut with_ref = vec![scale.max(s.first().copied().unwrap_or(0.0))];
            with_ref.extend(&s);
            rank_with_gap(&with_ref, cols + 1)? - 1
        }
    };
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    let mut basis = ComplexMatrix::zeros(cols, cols - rank);
    for (k, row) in (rank..cols).enumerate() {
        let v = v_t.row(row).adjoint();
        basis.set_column(k, &v);
    }
    Ok(basis)
}

/// Orthonormal basis (as columns) of the column span of a complex matrix.
pub fn complex_range(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut svd = a.clone().svd(true, false);
    svd.sort_by_singular_values();
    let s = sorted_desc(svd.singular_values.iter().copied());
    let rank = rank_with_gap(&s, a.nrows().min(a.ncols()))?;
    let u = svd.u.ok_or(Error::NoConvergence)?;
    Ok(u.columns(0, rank).into_owned())
}

/// Null space of a Hermitian positive semi-definite Gram matrix.
pub fn gram_nullspace(gram: &ComplexMatrix) -> Result<ComplexMatrix> {
    gram_nullspace_impl(gram, None)
}

/// Gram null space with eigenvalues judged against `scale`, the size of a
/// typical nonzero eigenvalue; needed when the Gram matrix may vanish.
pub fn gram_nullspace_scaled(gram: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    gram_nullspace_impl(gram, Some(scale))
}

fn gram_nullspace_impl(gram: &ComplexMatrix, scale: Option<f64>) -> Result<ComplexMatrix> {
    let n = gram.nrows();
    let eig = hermitian_eig(gram)?;
    // decided on the eigenvalues themselves: their square roots would lift
    // roundoff of order eps |G| to sqrt(eps) |G|
    let s = sorted_desc(eig.values.iter().map(|&x| x.max(0.0)));
    let rank = match scale {
        None => rank_with_gap(&s, n)?,
        Some(scale) => {
            let mut with_ref = vec![scale.max(s.first().copied().unwrap_or(0.0))];
            with_ref.extend(&s);
            rank_with_gap(&with_ref, n + 1)? - 1
        }
    };
    Ok(eig.vectors.columns(0, n - rank).into_owned())
}

/// Nullity of a real matrix.
pub fn real_nullity(a: &RealMatrix) -> Result<usize> {
    let cols = a.ncols();
    let s = if a.nrows() < cols {
        let mut p = RealMatrix::zeros(cols, cols);
        p.view_mut((0, 0), a.shape()).copy_from(a);
        sorted_desc(p.singular_values().iter().copied())
    } else {
        sorted_desc(a.singular_values().iter().copied())
    };
    Ok(cols - rank_with_gap(&s, cols)?)
}

/// Real dimension of the solution space of a real-linear system on complex
/// parameters.
///
/// `params` complex parameters are encoded by `2 * params` real unknowns; the
/// `residual` closure maps a parameter vector to the stacked complex residuals,
/// and must be real-linear.
pub fn real_solution_dimension<F>(params: usize, residual: F) -> Result<usize>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(2 * params);
    let mut x = vec![ZERO; params];
    for k in 0..2 * params {
        x.iter_mut().for_each(|z| *z = ZERO);
        x[k / 2] = if k % 2 == 0 { ONE } else { I };
        let r = residual(&x);
        columns.push(r.iter().flat_map(|z| [z.re, z.im]).collect());
    }
    let rows = columns.first().map_or(0, Vec::len);
    let a = RealMatrix::from_fn(rows, 2 * params, |i, j| columns[j][i]);
    real_nullity(&a)
}

/// Column-major vectorization.
pub fn vec_of(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &[Complex64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_diagonal_input_sorted() {
        let h = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c64(3.0, 0.0), c64(1.0, 0.0)]));
        let e = hermitian_eig(&h).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
        assert!(e.vectors[(1, 0)].norm() > 0.999);
        assert!(e.vectors[(0, 1)].norm() > 0.999);
    }

    #[test]
    fn eig_pauli_x() {
        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        for v in e.vectors.iter() {
            assert!((v.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_random_residual() {
        let mut rng = RngStream::new(7, 0);
        let h = random_hermitian(&mut rng, 6);
        let e = hermitian_eig(&h).unwrap();
        assert!(e.residual(&h) < 1e-10);
        assert!(unitarity_deviation(&e.vectors) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn pure_conjugation() {
        let op = AntiUnitaryOp::conjugation(2);
        let out = op.apply(&ComplexVector::from_vec(vec![I, ZERO])).unwrap();
        assert_eq!(out, ComplexVector::from_vec(vec![-I, ZERO]));
    }

    #[test]
    fn i_sigma_y_action_and_sign() {
        let op = AntiUnitaryOp::new(i_sigma_y()).unwrap();
        let out = op.apply(&ComplexVector::from_vec(vec![ONE, ZERO])).unwrap();
        assert_eq!(out, ComplexVector::from_vec(vec![ZERO, -ONE]));
        assert_eq!(op.square_sign().unwrap(), Sign::Minus);
        assert_eq!(AntiUnitaryOp::conjugation(3).square_sign().unwrap(), Sign::Plus);
    }

    #[test]
    fn repeated_symplectic_block_sign() {
        let w = kron(&identity(5), &i_sigma_y());
        assert_eq!(AntiUnitaryOp::new(w).unwrap().square_sign().unwrap(), Sign::Minus);
    }

    #[test]
    fn non_involutive_rejected() {
        // square is diag(-i, i): unitary but not scalar
        let w = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, I, ZERO]);
        let op = AntiUnitaryOp::new(w).unwrap();
        assert!(matches!(op.square_sign(), Err(Error::NotInvolutive { .. })));
    }

    #[test]
    fn dimension_mismatch_on_apply() {
        let op = AntiUnitaryOp::conjugation(3);
        assert!(matches!(
            op.apply(&ComplexVector::zeros(2)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn gaussian_moments_and_determinism() {
        let mut a = RngStream::new(11, 3);
        let mut b = RngStream::new(11, 3);
        let xa = gaussian_real(&mut a, 1_000_000, 1.0).unwrap();
        let xb = gaussian_real(&mut b, 1_000_000, 1.0).unwrap();
        assert_eq!(xa, xb);
        let mean = xa.iter().sum::<f64>() / xa.len() as f64;
        assert!(mean.abs() < 5e-3);

        let mut c = RngStream::new(12, 0);
        let y = gaussian_real(&mut c, 1_000_000, 2.0).unwrap();
        let m = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (y.len() - 1) as f64;
        assert!((var - 4.0).abs() / 4.0 < 0.02);
    }

    #[test]
    fn distinct_streams_differ() {
        let x = gaussian_real(&mut RngStream::new(1, 0), 4, 1.0).unwrap();
        let y = gaussian_real(&mut RngStream::new(1, 1), 4, 1.0).unwrap();
        assert_ne!(x, y);
    }

    #[test]
    fn invalid_sigma() {
        let mut r = RngStream::new(0, 0);
        assert!(matches!(gaussian_real(&mut r, 3, 0.0), Err(Error::InvalidSigma(_))));
        assert!(matches!(gaussian_real(&mut r, 3, f64::NAN), Err(Error::InvalidSigma(_))));
    }

    #[test]
    fn rank_gap_detects_ambiguity() {
        assert_eq!(rank_with_gap(&[3.0, 2.0, 1e-15], 3).unwrap(), 2);
        assert_eq!(rank_with_gap(&[3.0, 2.0], 4).unwrap(), 2);
        assert!(matches!(rank_with_gap(&[1.0, 1e-7, 1e-12], 3), Err(Error::RankAmbiguous { .. })));
    }

    #[test]
    fn nullspace_of_diag() {
        let a = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![ONE, ZERO, c64(2.0, 0.0)]));
        let n = complex_nullspace(&a).unwrap();
        assert_eq!(n.ncols(), 1);
        assert!((n[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_solution_dimension_of_hermitian_matrices() {
        // X - X^dagger = 0 on 3x3: real dimension 9
        let dim = real_solution_dimension(9, |x| {
            let m = unvec(x, 3);
            let r = &m - m.adjoint();
            r.as_slice().to_vec()
        })
        .unwrap();
        assert_eq!(dim, 9);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut r = RngStream::new(5, 0);
        let u = random_unitary(&mut r, 7);
        assert!(unitarity_deviation(&u) < 1e-12);
    }
}
