//! Gaussian ensembles in the canonical form of each class.
//!
//! Every sampler draws from the density proportional to
//! `exp(-Tr H^2 / 2 sigma^2)` restricted to the class. Quaternion entries
//! `a + b i + c j + d k` are stored as 2x2 complex blocks
//! `[[a + b i, c + d i], [-c + d i, a - b i]]`, so the complex embedding of
//! an `n`-dimensional quaternion matrix has the spin index fastest and time
//! reversal reads `(Id (x) i sigma_y) conj`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::SymmetryClass;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, direct_sum, hermitian_deviation, i_sigma_y, identity, kron, max_abs, max_abs_diff, pauli_x, pauli_y,
    AntiUnitaryOp, ComplexMatrix, RngStream, I,
};

/// Parameters of a sampling run.
///
/// `n` is the matrix dimension for the non-chiral classes. Chiral classes use
/// `p x q` blocks instead: complex for AIII, real for BDI and quaternion for
/// CII, whose matrices therefore have dimension `2 (p + q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub class: SymmetryClass,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub sigma: f64,
}

impl EnsembleSpec {
    pub fn new(class: SymmetryClass, n: usize) -> Self {
        EnsembleSpec { class, n, p: 0, q: 0, sigma: 1.0 }
    }

    pub fn chiral(class: SymmetryClass, p: usize, q: usize) -> Self {
        EnsembleSpec { class, n: 0, p, q, sigma: 1.0 }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        use SymmetryClass::*;
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::SpecInvalid(format!("sigma must be positive and finite, got {}", self.sigma)));
        }
        if self.class.is_chiral() {
            if self.p == 0 || self.q == 0 {
                return Err(Error::SpecInvalid(format!("{} needs p >= 1 and q >= 1", self.class)));
            }
            return Ok(());
        }
        let n = self.n;
        if n == 0 {
            return Err(Error::SpecInvalid("n must be positive".into()));
        }
        let (ok, need) = match self.class {
            AII | C | CI => (n.is_multiple_of(2), "even"),
            DIII => (n.is_multiple_of(4), "divisible by 4"),
            _ => (true, ""),
        };
        if !ok {
            return Err(Error::SpecInvalid(format!("{} needs n {need}, got {n}", self.class)));
        }
        Ok(())
    }

    /// Dimension of the sampled matrices.
    pub fn matrix_dim(&self) -> usize {
        match self.class {
            SymmetryClass::AIII | SymmetryClass::BDI => self.p + self.q,
            SymmetryClass::CII => 2 * (self.p + self.q),
            _ => self.n,
        }
    }

    /// Index `nu = p - q` of the chiral classes, counted in matrix dimensions.
    pub fn index(&self) -> i64 {
        let per_block = if self.class == SymmetryClass::CII { 2 } else { 1 };
        per_block * (self.p as i64 - self.q as i64)
    }
}

/// Sampled matrix with its class and canonical block sizes.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub matrix: ComplexMatrix,
    pub class: SymmetryClass,
    /// Complex sizes of the two halves for the block-structured classes
    /// (chiral sectors, or the `[[., .], [., .]]` halves of DIII, C, CI).
    pub blocks: Option<(usize, usize)>,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

struct Gauss<'a> {
    rng: &'a mut RngStream,
    sigma: f64,
}

impl Gauss<'_> {
    /// Real Gaussian with variance `fraction * sigma^2`.
    fn real(&mut self, fraction: f64) -> f64 {
        self.sigma * fraction.sqrt() * self.rng.standard_normal()
    }

    /// Complex Gaussian whose real and imaginary parts each have variance `fraction * sigma^2`.
    fn complex(&mut self, fraction: f64) -> Complex64 {
        let re = self.real(fraction);
        let im = self.real(fraction);
        c64(re, im)
    }

    fn quaternion(&mut self, fraction: f64) -> ComplexMatrix {
        let (a, b, c, d) = (self.real(fraction), self.real(fraction), self.real(fraction), self.real(fraction));
        quaternion_block(a, b, c, d)
    }
}

/// 2x2 complex block of the quaternion `a + b i + c j + d k`.
pub fn quaternion_block(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(a, b), c64(c, d), c64(-c, d), c64(a, -b)])
}

fn chiral_form(z: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = z.shape();
    let mut h = ComplexMatrix::zeros(p + q, p + q);
    h.view_mut((0, p), (p, q)).copy_from(z);
    h.view_mut((p, 0), (q, p)).copy_from(&z.adjoint());
    h
}

fn block_form(tl: &ComplexMatrix, tr: &ComplexMatrix, bl: &ComplexMatrix, br: &ComplexMatrix) -> ComplexMatrix {
    let k = tl.nrows();
    let mut h = ComplexMatrix::zeros(2 * k, 2 * k);
    h.view_mut((0, 0), (k, k)).copy_from(tl);
    h.view_mut((0, k), (k, k)).copy_from(tr);
    h.view_mut((k, 0), (k, k)).copy_from(bl);
    h.view_mut((k, k), (k, k)).copy_from(br);
    h
}

fn quaternion_matrix(rows: usize, cols: usize, mut entry: impl FnMut(usize, usize) -> ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            m.view_mut((2 * i, 2 * j), (2, 2)).copy_from(&entry(i, j));
        }
    }
    m
}

/// Draw one Hamiltonian.
pub fn sample(spec: &EnsembleSpec, rng: &mut RngStream) -> Result<Hamiltonian> {
    use SymmetryClass::*;
    spec.validate()?;
    let mut g = Gauss { rng, sigma: spec.sigma };
    let n = spec.n;
    let (matrix, blocks) = match spec.class {
        A => {
            let mut h = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = c64(g.real(1.0), 0.0);
                for j in i + 1..n {
                    let z = g.complex(0.5);
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
            (h, None)
        }
        AI => {
            let mut h = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = c64(g.real(1.0), 0.0);
                for j in i + 1..n {
                    let x = c64(g.real(0.5), 0.0);
                    h[(i, j)] = x;
                    h[(j, i)] = x;
                }
            }
            (h, None)
        }
        AII => {
            let k = n / 2;
            let mut upper = vec![None; k * k];
            for i in 0..k {
                upper[i * k + i] = Some(quaternion_block(g.real(0.5), 0.0, 0.0, 0.0));
                for j in i + 1..k {
                    upper[i * k + j] = Some(g.quaternion(0.25));
                }
            }
            let h = quaternion_matrix(k, k, |i, j| match &upper[i * k + j] {
                Some(b) => b.clone(),
                None => upper[j * k + i].as_ref().expect("upper triangle filled").adjoint(),
            });
            (h, None)
        }
        D => {
            let mut h = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let a = g.real(0.5);
                    h[(i, j)] = I * a;
                    h[(j, i)] = -I * a;
                }
            }
            (h, None)
        }
        DIII => {
            let k = n / 2;
            let mut z = ComplexMatrix::zeros(k, k);
            for i in 0..k {
                for j in i + 1..k {
                    let v = g.complex(0.25);
                    z[(i, j)] = v;
                    z[(j, i)] = -v;
                }
            }
            let zero = ComplexMatrix::zeros(k, k);
            (block_form(&zero, &z, &(-z.map(|x| x.conj())), &zero), Some((k, k)))
        }
        C => {
            let k = n / 2;
            let mut a = ComplexMatrix::zeros(k, k);
            let mut b = ComplexMatrix::zeros(k, k);
            for i in 0..k {
                a[(i, i)] = c64(g.real(0.5), 0.0);
                b[(i, i)] = g.complex(0.5);
                for j in i + 1..k {
                    let x = g.complex(0.25);
                    a[(i, j)] = x;
                    a[(j, i)] = x.conj();
                    let y = g.complex(0.25);
                    b[(i, j)] = y;
                    b[(j, i)] = y;
                }
            }
            let (ac, bc) = (a.map(|x| x.conj()), b.map(|x| x.conj()));
            (block_form(&a, &b, &bc, &(-ac)), Some((k, k)))
        }
        CI => {
            let k = n / 2;
            let mut z = ComplexMatrix::zeros(k, k);
            for i in 0..k {
                z[(i, i)] = g.complex(0.5);
                for j in i + 1..k {
                    let v = g.complex(0.25);
                    z[(i, j)] = v;
                    z[(j, i)] = v;
                }
            }
            let zero = ComplexMatrix::zeros(k, k);
            (block_form(&zero, &z, &z.map(|x| x.conj()), &zero), Some((k, k)))
        }
        AIII => {
            let z = ComplexMatrix::from_fn(spec.p, spec.q, |_, _| g.complex(0.5));
            (chiral_form(&z), Some((spec.p, spec.q)))
        }
        BDI => {
            let z = ComplexMatrix::from_fn(spec.p, spec.q, |_, _| c64(g.real(0.5), 0.0));
            (chiral_form(&z), Some((spec.p, spec.q)))
        }
        CII => {
            let z = quaternion_matrix(spec.p, spec.q, |_, _| g.quaternion(0.25));
            (chiral_form(&z), Some((2 * spec.p, 2 * spec.q)))
        }
    };
    Ok(Hamiltonian { matrix, class: spec.class, blocks })
}

/// `samples` draws, matrix `k` from stream `k` of `seed`; order is independent
/// of the thread count.
pub fn sample_campaign(spec: &EnsembleSpec, seed: u64, samples: usize) -> Result<Vec<Hamiltonian>> {
    spec.validate()?;
    (0..samples as u64)
        .into_par_iter()
        .map(|k| sample(spec, &mut RngStream::new(seed, k)))
        .collect()
}

/// Reference operators of a class.
#[derive(Clone, Debug, Default)]
pub struct Involutions {
    pub t: Option<AntiUnitaryOp>,
    pub c: Option<AntiUnitaryOp>,
    pub chirality: Option<ComplexMatrix>,
}

/// Operators fixing the canonical form of `class` on matrices of size `dim`;
/// for chiral classes `blocks` gives the sector sizes.
pub fn canonical_involutions(class: SymmetryClass, dim: usize, blocks: Option<(usize, usize)>) -> Result<Involutions> {
    use SymmetryClass::*;
    let au = |w: ComplexMatrix| AntiUnitaryOp::new(w).expect("reference operators are unitary");
    let need_even = |m: usize, what: &str| {
        if dim.is_multiple_of(m) && dim > 0 {
            Ok(())
        } else {
            Err(Error::SpecInvalid(format!("{class} needs dimension {what}, got {dim}")))
        }
    };
    let half = dim / 2;
    let gamma = |blocks: Option<(usize, usize)>| -> Result<ComplexMatrix> {
        let (p, q) = blocks.ok_or_else(|| Error::SpecInvalid(format!("{class} needs chiral block sizes")))?;
        if p + q != dim {
            return Err(Error::SpecInvalid(format!("chiral blocks {p} + {q} do not add up to {dim}")));
        }
        Ok(direct_sum(&[identity(p), -identity(q)]))
    };
    let sigma_z_blocks = || direct_sum(&[identity(half), -identity(half)]);
    Ok(match class {
        A => Involutions::default(),
        AI => Involutions { t: Some(AntiUnitaryOp::conjugation(dim)), ..Default::default() },
        AII => {
            need_even(2, "even")?;
            Involutions { t: Some(au(kron(&identity(half), &i_sigma_y()))), ..Default::default() }
        }
        D => Involutions { c: Some(AntiUnitaryOp::conjugation(dim)), ..Default::default() },
        DIII => {
            need_even(4, "divisible by 4")?;
            Involutions {
                t: Some(au(kron(&i_sigma_y(), &identity(half)))),
                c: Some(au(kron(&(pauli_x() * I), &identity(half)))),
                chirality: Some(sigma_z_blocks()),
            }
        }
        C => {
            need_even(2, "even")?;
            Involutions { c: Some(au(kron(&pauli_y(), &identity(half)))), ..Default::default() }
        }
        CI => {
            need_even(2, "even")?;
            Involutions {
                t: Some(au(kron(&pauli_x(), &identity(half)))),
                c: Some(au(kron(&pauli_y(), &identity(half)))),
                chirality: Some(sigma_z_blocks()),
            }
        }
        AIII => Involutions { chirality: Some(gamma(blocks)?), ..Default::default() },
        BDI => {
            let g = gamma(blocks)?;
            Involutions { t: Some(AntiUnitaryOp::conjugation(dim)), c: Some(au(g.clone())), chirality: Some(g) }
        }
        CII => {
            need_even(2, "even")?;
            let (p, q) = blocks.unwrap_or((0, 0));
            if p % 2 != 0 || q % 2 != 0 {
                return Err(Error::SpecInvalid(format!("CII needs even sector sizes, got {p} and {q}")));
            }
            let g = gamma(blocks)?;
            let t = kron(&identity(half), &i_sigma_y());
            Involutions { t: Some(au(t.clone())), c: Some(au(&g * t)), chirality: Some(g) }
        }
    })
}

/// Outcome of [`validate_structure`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub valid: bool,
    pub max_deviation: f64,
    pub violations: Vec<String>,
}

/// Check the defining relations of `h.class` within `tol` (relative to the
/// largest entry when that exceeds one).
pub fn validate_structure(h: &Hamiltonian, tol: f64) -> StructureReport {
    let m = &h.matrix;
    let scale = max_abs(m).max(1.0);
    let mut violations = Vec::new();
    let mut max_deviation = 0.0f64;
    let mut check = |deviation: f64, message: &str| {
        max_deviation = max_deviation.max(deviation / scale);
        if !(deviation <= tol * scale) {
            violations.push(format!("{message} (deviation {deviation:.3e})"));
        }
    };
    if m.nrows() != m.ncols() {
        return StructureReport { valid: false, max_deviation: f64::INFINITY, violations: vec!["H is not square".into()] };
    }
    check(hermitian_deviation(m), "H ≠ H†");
    match canonical_involutions(h.class, m.nrows(), h.blocks) {
        Err(e) => {
            violations.push(e.to_string());
        }
        Ok(inv) => {
            let plain_conj = |op: &AntiUnitaryOp| max_abs_diff(op.linear_part(), &identity(op.dim())) == 0.0;
            if let Some(t) = &inv.t {
                let msg = if plain_conj(t) { "conj(H) ≠ H" } else { "T H T⁻¹ ≠ H" };
                check(max_abs_diff(&t.conjugate_matrix(m), m), msg);
            }
            if let Some(c) = &inv.c {
                let msg = if plain_conj(c) { "conj(H) ≠ −H" } else { "C H C⁻¹ ≠ −H" };
                check(max_abs_diff(&c.conjugate_matrix(m), &(-m)), msg);
            }
            if let Some(g) = &inv.chirality {
                check(max_abs_diff(&(g * m * g), &(-m)), "Γ H Γ ≠ −H");
            }
        }
    }
    StructureReport { valid: violations.is_empty(), max_deviation, violations }
}

/// `exp(-Tr H^2 / 2 sigma^2)` for Hermitian `H`.
pub fn gue_weight(h: &ComplexMatrix, sigma: f64) -> f64 {
    (-h.norm_squared() / (2.0 * sigma * sigma)).exp()
}
