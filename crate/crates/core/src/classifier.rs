//! Symmetry classification of explicit symmetry data.
//!
//! The unitary part of the symmetry group is a finite group given by
//! generators. Its representation space is split into isotypic components by
//! diagonalizing a generic Hermitian element of the center of the commutant.
//! Each component invariant under the anti-unitary symmetry is then labelled
//! AI or AII by counting the real dimension of the invariant Hermitian
//! operators; when the anti-unitary symmetry acts on the group by an inner
//! automorphism the sign of the composite involution is computed as an
//! independent cross-check.
//!
//! Nambu data (particle-hole conjugation present) are routed through the
//! ten-row involution table after reducing any spin factor.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    complex_nullspace_scaled, complex_range, conj, frobenius_distance, gram_nullspace_scaled, hermitian_eig,
    identity, inner, kron, max_abs_diff, real_solution_dimension, scalar_sign, unitarity_deviation,
    unvec, vec_of, AntiUnitaryOp, ComplexMatrix, ComplexVector, RngStream, Sign, TOL_GROUP,
    TOL_STRUCT, ZERO,
};
use crate::nambu;

pub const MAX_GROUP_ORDER: usize = 1024;
const MAX_GENERIC_RETRIES: usize = 5;
const GENERIC_SEED: u64 = 0x7e4f_01d5_c1a5_5e5d;

/// The ten Cartan labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymmetryClass {
    A,
    AI,
    AII,
    C,
    CI,
    D,
    DIII,
    AIII,
    BDI,
    CII,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 10] = [
        SymmetryClass::A,
        SymmetryClass::AI,
        SymmetryClass::AII,
        SymmetryClass::C,
        SymmetryClass::CI,
        SymmetryClass::D,
        SymmetryClass::DIII,
        SymmetryClass::AIII,
        SymmetryClass::BDI,
        SymmetryClass::CII,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SymmetryClass::A => "A",
            SymmetryClass::AI => "AI",
            SymmetryClass::AII => "AII",
            SymmetryClass::C => "C",
            SymmetryClass::CI => "CI",
            SymmetryClass::D => "D",
            SymmetryClass::DIII => "DIII",
            SymmetryClass::AIII => "AIII",
            SymmetryClass::BDI => "BDI",
            SymmetryClass::CII => "CII",
        }
    }

    pub fn is_chiral(self) -> bool {
        matches!(self, SymmetryClass::AIII | SymmetryClass::BDI | SymmetryClass::CII)
    }

    /// Classes whose spectra are symmetric under `E -> -E`.
    pub fn has_symmetric_spectrum(self) -> bool {
        !matches!(self, SymmetryClass::A | SymmetryClass::AI | SymmetryClass::AII)
    }

    /// Classes with `T^2 = -1`, whose spectra come in Kramers pairs.
    pub fn is_kramers_doubled(self) -> bool {
        matches!(self, SymmetryClass::AII | SymmetryClass::DIII | SymmetryClass::CII)
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SymmetryClass::ALL
            .iter()
            .copied()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Schema(format!("unknown symmetry class {s:?}")))
    }
}

/// Input of the classifier.
#[derive(Clone, Debug)]
pub struct SymmetryData {
    pub dim: usize,
    pub g0_generators: Vec<ComplexMatrix>,
    pub t_op: Option<AntiUnitaryOp>,
    pub c_op: Option<AntiUnitaryOp>,
    pub chirality: Option<ComplexMatrix>,
    pub nambu: bool,
}

impl SymmetryData {
    pub fn new(dim: usize) -> Self {
        SymmetryData { dim, g0_generators: Vec::new(), t_op: None, c_op: None, chirality: None, nambu: false }
    }

    pub fn with_generators(mut self, generators: Vec<ComplexMatrix>) -> Self {
        self.g0_generators = generators;
        self
    }

    pub fn with_t(mut self, t: AntiUnitaryOp) -> Self {
        self.t_op = Some(t);
        self
    }

    pub fn with_c(mut self, c: AntiUnitaryOp) -> Self {
        self.c_op = Some(c);
        self
    }

    pub fn with_chirality(mut self, chirality: ComplexMatrix) -> Self {
        self.chirality = Some(chirality);
        self
    }

    pub fn with_nambu(mut self, nambu: bool) -> Self {
        self.nambu = nambu;
        self
    }

    /// Checks shapes, unitarity of generators, that T normalizes G0, and that
    /// the chirality operator is a unitary involution. Returns the group.
    pub fn validate(&self) -> Result<Vec<ComplexMatrix>> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Schema("dim must be positive".into()));
        }
        for (index, g) in self.g0_generators.iter().enumerate() {
            if g.shape() != (n, n) {
                return Err(Error::DimensionMismatch { expected: n, found: g.nrows().max(g.ncols()) });
            }
            let deviation = unitarity_deviation(g);
            if deviation > TOL_STRUCT {
                return Err(Error::NonUnitaryGenerator { index, deviation });
            }
        }
        for op in self.t_op.iter().chain(self.c_op.iter()) {
            if op.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: op.dim() });
            }
        }
        if let Some(s) = &self.chirality {
            if s.shape() != (n, n) {
                return Err(Error::DimensionMismatch { expected: n, found: s.nrows() });
            }
            if unitarity_deviation(s) > TOL_STRUCT || max_abs_diff(&(s * s), &identity(n)) > TOL_STRUCT {
                return Err(Error::StructureViolation("chirality must be a unitary involution".into()));
            }
        }
        let group = group_closure(n, &self.g0_generators)?;
        if let Some(t) = &self.t_op {
            for g in &self.g0_generators {
                let image = t.conjugate_matrix(g);
                if find_element(&group, &image).is_none() {
                    return Err(Error::NotNormalizing);
                }
            }
        }
        Ok(group)
    }
}

fn find_element(elements: &[ComplexMatrix], m: &ComplexMatrix) -> Option<usize> {
    elements.iter().position(|e| frobenius_distance(e, m) < TOL_GROUP)
}

/// All elements of the finite group generated by `generators` acting on `C^dim`.
///
/// Elements are identified when their Frobenius distance is below
/// [`TOL_GROUP`]. The identity is always the first element.
pub fn group_closure(dim: usize, generators: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    group_closure_with_limit(dim, generators, MAX_GROUP_ORDER)
}

pub fn group_closure_with_limit(
    dim: usize,
    generators: &[ComplexMatrix],
    max_order: usize,
) -> Result<Vec<ComplexMatrix>> {
    for (index, g) in generators.iter().enumerate() {
        if g.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.nrows() });
        }
        let deviation = unitarity_deviation(g);
        if deviation > TOL_STRUCT {
            return Err(Error::NonUnitaryGenerator { index, deviation });
        }
    }
    // cheap fingerprint to skip most full comparisons
    let probe = ComplexVector::from_fn(dim, |i, _| Complex64::new(1.0 / (i as f64 + 1.37), 0.5 / (i as f64 + 2.11)));
    let probe_bound = TOL_GROUP * probe.norm() * (dim as f64).sqrt();
    let fingerprint = |m: &ComplexMatrix| (m * &probe).sum();

    let mut elements = vec![identity(dim)];
    let mut prints = vec![fingerprint(&elements[0])];
    let mut frontier = vec![0usize];
    while let Some(idx) = frontier.pop() {
        for g in generators {
            let candidate = g * &elements[idx];
            let fp = fingerprint(&candidate);
            let known = prints
                .iter()
                .zip(&elements)
                .any(|(p, e)| (p - fp).norm() <= probe_bound && frobenius_distance(e, &candidate) < TOL_GROUP);
            if !known {
                if elements.len() >= max_order {
                    return Err(Error::GroupTooLarge { limit: max_order });
                }
                elements.push(candidate);
                prints.push(fp);
                frontier.push(elements.len() - 1);
            }
        }
    }
    Ok(elements)
}

/// Basis of `{X : L_k X = X R_k for all k}` for square `L_k` (a x a) and `R_k` (b x b).
///
/// Solved as the null space of the Gram matrix of the stacked vectorized
/// system; for unitary pairs summed over a whole group the Gram spectrum is
/// `{0, 2|G|}`, which keeps the rank decision sharp.
pub fn intertwiner_space(a: usize, b: usize, pairs: &[(ComplexMatrix, ComplexMatrix)]) -> Result<Vec<ComplexMatrix>> {
    let n = a * b;
    let mut gram = ComplexMatrix::zeros(n, n);
    let id_a = identity(a);
    let id_b = identity(b);
    for (l, r) in pairs {
        if l.shape() != (a, a) || r.shape() != (b, b) {
            return Err(Error::DimensionMismatch { expected: a, found: l.nrows() });
        }
        // A = I (x) L - R^T (x) I ; A^dagger A expanded termwise
        gram += kron(&id_b, &(l.adjoint() * l));
        gram -= kron(&r.transpose(), &l.adjoint());
        gram -= kron(&conj(r), l);
        gram += kron(&(conj(r) * r.transpose()), &id_a);
    }
    // 2 per unitary pair; the Gram matrix vanishes when every pair intertwines
    let scale: f64 = pairs
        .iter()
        .map(|(l, r)| l.norm_squared() / a as f64 + r.norm_squared() / b as f64)
        .sum();
    let null = gram_nullspace_scaled(&gram, scale)?;
    Ok((0..null.ncols())
        .map(|k| ComplexMatrix::from_column_slice(a, b, null.column(k).as_slice()))
        .collect())
}

/// Orthonormal (Frobenius) basis of the commutant of a set of matrices.
pub fn commutant_basis(elements: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let n = elements.first().map_or(0, |e| e.nrows());
    let pairs: Vec<_> = elements.iter().map(|g| (g.clone(), g.clone())).collect();
    intertwiner_space(n, n, &pairs)
}

/// Complex dimension of `{X : X g = g X for all g}`.
pub fn commutant_dimension(elements: &[ComplexMatrix]) -> Result<usize> {
    Ok(commutant_basis(elements)?.len())
}

/// One isotypic component of the representation.
#[derive(Clone, Debug)]
pub struct IsotypicBlock {
    /// Orthonormal columns spanning the component.
    pub basis: ComplexMatrix,
    pub projection: ComplexMatrix,
    pub block_dim: usize,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    pub t_invariant: bool,
    pub block_class: SymmetryClass,
    pub epsilon: Option<Sign>,
    /// Frobenius-orthonormal basis of the commutant restricted to the block,
    /// in block coordinates.
    pub restricted_commutant: Vec<ComplexMatrix>,
}

fn hermitian_combination(basis: &[ComplexMatrix], rng: &mut RngStream) -> ComplexMatrix {
    let n = basis[0].nrows();
    let mut y = ComplexMatrix::zeros(n, n);
    for b in basis {
        let z = rng.complex_normal();
        y += b * z;
    }
    (&y + y.adjoint()).scale(0.5)
}

/// Group sorted eigenvalues into clusters of numerically equal values.
fn cluster_eigenvalues(values: &[f64]) -> (Vec<Vec<usize>>, f64) {
    let spread = values.last().unwrap_or(&0.0) - values.first().unwrap_or(&0.0);
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let split = 1e-7 * scale;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut min_gap = f64::INFINITY;
    for (i, v) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if v - values[*c.last().unwrap()] <= split => c.push(i),
            _ => {
                if i > 0 {
                    min_gap = min_gap.min(v - values[i - 1]);
                }
                clusters.push(vec![i]);
            }
        }
    }
    let relative_gap = if spread > 0.0 { min_gap / spread } else { f64::INFINITY };
    (clusters, relative_gap)
}

fn columns_of(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), idx.len(), |i, j| m[(i, idx[j])])
}

/// Basis of the center of the algebra spanned by `commutant`.
fn center_basis(commutant: &[ComplexMatrix], rng: &mut RngStream) -> Result<Vec<ComplexMatrix>> {
    let k = commutant.len();
    if k == 1 {
        return Ok(commutant.to_vec());
    }
    let n = commutant[0].nrows();
    let random_element = |rng: &mut RngStream| {
        let mut r = ComplexMatrix::zeros(n, n);
        for x in commutant {
            r += x * rng.complex_normal();
        }
        r
    };
    // two generic elements generate the commutant as an algebra
    let r1 = random_element(rng);
    let r2 = random_element(rng);
    let mut system = ComplexMatrix::zeros(2 * n * n, k);
    for (j, x) in commutant.iter().enumerate() {
        let c1 = x * &r1 - &r1 * x;
        let c2 = x * &r2 - &r2 * x;
        let mut col = system.column_mut(j);
        col.rows_mut(0, n * n).copy_from(&vec_of(&c1));
        col.rows_mut(n * n, n * n).copy_from(&vec_of(&c2));
    }
    let null = complex_nullspace_scaled(&system, r1.norm() + r2.norm())?;
    Ok((0..null.ncols())
        .map(|c| {
            let mut z = ComplexMatrix::zeros(n, n);
            for (j, x) in commutant.iter().enumerate() {
                z += x * null[(j, c)];
            }
            z
        })
        .collect())
}

/// Split the space into isotypic components.
fn isotypic_blocks(group: &[ComplexMatrix]) -> Result<Vec<IsotypicBlock>> {
    let commutant = commutant_basis(group)?;
    let mut attempt = 0;
    let (eig, clusters) = loop {
        if attempt == MAX_GENERIC_RETRIES {
            return Err(Error::DegenerateGenericElement { attempts: MAX_GENERIC_RETRIES });
        }
        let mut rng = RngStream::new(GENERIC_SEED, attempt as u64);
        attempt += 1;
        let center = match center_basis(&commutant, &mut rng) {
            Ok(c) => c,
            Err(Error::RankAmbiguous { .. }) => continue,
            Err(e) => return Err(e),
        };
        let y = hermitian_combination(&center, &mut rng);
        let eig = hermitian_eig(&y)?;
        let (clusters, gap) = cluster_eigenvalues(&eig.values);
        if clusters.len() == center.len() && gap > 1e-4 {
            break (eig, clusters);
        }
    };

    let mut blocks = Vec::with_capacity(clusters.len());
    for idx in &clusters {
        let basis = columns_of(&eig.vectors, idx);
        let b = basis.ncols();
        let restricted = ComplexMatrix::from_fn(b * b, commutant.len(), |i, j| {
            let r = basis.adjoint() * &commutant[j] * &basis;
            r[(i % b, i / b)]
        });
        let range = complex_range(&restricted)?;
        let m2 = range.ncols();
        let m = (m2 as f64).sqrt().round() as usize;
        if m * m != m2 || m == 0 || !b.is_multiple_of(m) {
            return Err(Error::InconsistentDecomposition(format!(
                "block of dimension {b} has restricted commutant dimension {m2}"
            )));
        }
        let restricted_commutant = (0..m2).map(|k| unvec(range.column(k).as_slice(), b)).collect();
        blocks.push(IsotypicBlock {
            projection: &basis * basis.adjoint(),
            basis,
            block_dim: b,
            irrep_dim: b / m,
            multiplicity: m,
            t_invariant: false,
            block_class: SymmetryClass::A,
            epsilon: None,
            restricted_commutant,
        });
    }
    // stable, basis-independent ordering
    blocks.sort_by_key(|x| (x.irrep_dim, x.multiplicity));
    Ok(blocks)
}

/// Isotypic decomposition with per-block Dyson classes.
pub fn isotypic_decompose(data: &SymmetryData) -> Result<Vec<IsotypicBlock>> {
    let group = data.validate()?;
    decompose_with_group(data, &group)
}

fn decompose_with_group(data: &SymmetryData, group: &[ComplexMatrix]) -> Result<Vec<IsotypicBlock>> {
    let mut blocks = isotypic_blocks(group)?;
    for block in &mut blocks {
        if let Some(t) = &data.t_op {
            let image = t.conjugate_matrix(&block.projection);
            block.t_invariant = frobenius_distance(&image, &block.projection) < TOL_GROUP;
        }
        let outcome = dyson_with_group(block, group, &data.g0_generators, data.t_op.as_ref())?;
        block.block_class = outcome.class;
        block.epsilon = outcome.epsilon;
    }
    Ok(blocks)
}

/// Decomposition of an isotypic block into `m` copies of one irrep, with
/// intertwiners chosen so every copy carries the identical matrices.
#[derive(Clone, Debug)]
pub struct AdaptedBasis {
    /// `n x (d m)` orthonormal columns; copy `k` occupies columns `k d .. (k+1) d`.
    pub basis: ComplexMatrix,
    pub irrep_dim: usize,
    pub multiplicity: usize,
}

impl AdaptedBasis {
    pub fn first_copy(&self) -> ComplexMatrix {
        self.basis.columns(0, self.irrep_dim).into_owned()
    }

    /// Matrices of the irrep on the first copy.
    pub fn irrep(&self, elements: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        let e = self.first_copy();
        elements.iter().map(|g| e.adjoint() * g * &e).collect()
    }
}

fn unitary_normalized(x: &ComplexMatrix) -> ComplexMatrix {
    x * Complex64::new((x.nrows() as f64).sqrt() / x.norm(), 0.0)
}

/// Build an adapted basis for an isotypic block.
pub fn adapted_basis(block: &IsotypicBlock, group: &[ComplexMatrix]) -> Result<AdaptedBasis> {
    let (d, m) = (block.irrep_dim, block.multiplicity);
    let mut attempt = 0;
    let copies = loop {
        if attempt == MAX_GENERIC_RETRIES {
            return Err(Error::DegenerateGenericElement { attempts: MAX_GENERIC_RETRIES });
        }
        let mut rng = RngStream::new(GENERIC_SEED ^ 0xada9, attempt as u64);
        attempt += 1;
        let y = hermitian_combination(&block.restricted_commutant, &mut rng);
        let eig = hermitian_eig(&y)?;
        let (clusters, gap) = cluster_eigenvalues(&eig.values);
        let sizes_ok = clusters.len() == m && clusters.iter().all(|c| c.len() == d);
        if sizes_ok && (m == 1 || gap > 1e-4) {
            break clusters
                .iter()
                .map(|idx| &block.basis * columns_of(&eig.vectors, idx))
                .collect::<Vec<_>>();
        }
    };
    let first = &copies[0];
    let rho1: Vec<ComplexMatrix> = group.iter().map(|g| first.adjoint() * g * first).collect();
    let mut basis = ComplexMatrix::zeros(block.basis.nrows(), d * m);
    basis.columns_mut(0, d).copy_from(first);
    for (k, copy) in copies.iter().enumerate().skip(1) {
        let pairs: Vec<_> = group
            .iter()
            .zip(&rho1)
            .map(|(g, r1)| (copy.adjoint() * g * copy, r1.clone()))
            .collect();
        let space = intertwiner_space(d, d, &pairs)?;
        if space.len() != 1 {
            return Err(Error::InconsistentDecomposition(format!(
                "copy {k} has {} intertwiners with the first copy",
                space.len()
            )));
        }
        basis.columns_mut(k * d, d).copy_from(&(copy * unitary_normalized(&space[0])));
    }
    Ok(AdaptedBasis { basis, irrep_dim: d, multiplicity: m })
}

/// The unitary `s` relating an irrep to its complex conjugate, and the sign of `s conj(s)`.
#[derive(Clone, Debug)]
pub struct ConjugationIntertwiner {
    /// `None` when the irrep is not equivalent to its conjugate.
    pub s: Option<ComplexMatrix>,
    /// `+1` real type, `-1` quaternionic type, `0` complex type.
    pub fs_sign: i8,
}

/// Solve `conj(rho(g)) = s^-1 rho(g) s` for an irreducible set of matrices.
pub fn irrep_conjugation_intertwiner(irrep: &[ComplexMatrix]) -> Result<ConjugationIntertwiner> {
    let d = irrep[0].nrows();
    let pairs: Vec<_> = irrep.iter().map(|r| (r.clone(), conj(r))).collect();
    let space = intertwiner_space(d, d, &pairs)?;
    match space.len() {
        0 => Ok(ConjugationIntertwiner { s: None, fs_sign: 0 }),
        1 => {
            let s = unitary_normalized(&space[0]);
            let square = &s * conj(&s);
            let sign = scalar_sign(&square, 1e-8).map_err(|e| match e {
                Error::NotInvolutive { deviation } => Error::NonScalarSquare { deviation },
                other => other,
            })?;
            Ok(ConjugationIntertwiner { s: Some(s), fs_sign: sign.as_i8() })
        }
        k => Err(Error::InconsistentDecomposition(format!(
            "irrep is reducible: {k} conjugation intertwiners"
        ))),
    }
}

/// Conjugation intertwiner of the irrep underlying an isotypic block.
pub fn conjugation_intertwiner(block: &IsotypicBlock, group: &[ComplexMatrix]) -> Result<ConjugationIntertwiner> {
    let adapted = adapted_basis(block, group)?;
    irrep_conjugation_intertwiner(&adapted.irrep(group))
}

/// Result of the AI/AII/A decision on one block.
#[derive(Clone, Debug)]
pub struct DysonOutcome {
    pub class: SymmetryClass,
    pub epsilon: Option<Sign>,
    /// Real dimension of the T-invariant Hermitian operators commuting with G0
    /// on the block; `None` when T does not preserve the block.
    pub invariant_hermitian_dim: Option<usize>,
    /// The composite involution `T' = R T S` in adapted-basis coordinates,
    /// available in the inner case.
    pub t_prime: Option<AntiUnitaryOp>,
}

/// Complex bilinear pairing `Q(a, b) = <T' a, b>` induced by `T'`.
pub fn pairing_q(t_prime: &AntiUnitaryOp, a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    Ok(inner(&t_prime.apply(a)?, b))
}

/// A / AI / AII label of one isotypic block.
pub fn dyson_block_class(block: &IsotypicBlock, data: &SymmetryData) -> Result<DysonOutcome> {
    let group = data.validate()?;
    let mut block = block.clone();
    if let Some(t) = &data.t_op {
        block.t_invariant = frobenius_distance(&t.conjugate_matrix(&block.projection), &block.projection) < TOL_GROUP;
    }
    dyson_with_group(&block, &group, &data.g0_generators, data.t_op.as_ref())
}

fn dyson_with_group(
    block: &IsotypicBlock,
    group: &[ComplexMatrix],
    generators: &[ComplexMatrix],
    t: Option<&AntiUnitaryOp>,
) -> Result<DysonOutcome> {
    let t = match t {
        Some(t) if block.t_invariant => t,
        _ => {
            return Ok(DysonOutcome { class: SymmetryClass::A, epsilon: None, invariant_hermitian_dim: None, t_prime: None })
        }
    };
    let m = block.multiplicity;
    let tv = t.restrict(&block.basis);
    let comm = &block.restricted_commutant;
    let b = block.block_dim;
    let dim_h = real_solution_dimension(comm.len(), |coef| {
        let mut x = ComplexMatrix::zeros(b, b);
        for (c, basis) in coef.iter().zip(comm) {
            if *c != ZERO {
                x += basis * *c;
            }
        }
        let herm = &x - x.adjoint();
        let tinv = tv.conjugate_matrix(&x) - &x;
        herm.iter().chain(tinv.iter()).copied().collect()
    })?;
    let class = if dim_h == m * (m + 1) / 2 {
        SymmetryClass::AI
    } else if dim_h == m * (m - 1) / 2 {
        SymmetryClass::AII
    } else {
        return Err(Error::DimensionCountMismatch { found: dim_h, multiplicity: m });
    };

    let (epsilon, t_prime) = match inner_case_epsilon(block, group, generators, t)? {
        Some((eps, tp)) => (Some(eps), Some(tp)),
        None => (None, None),
    };
    if let Some(eps) = epsilon {
        let expected = if class == SymmetryClass::AI { Sign::Plus } else { Sign::Minus };
        if eps != expected {
            return Err(Error::EpsilonMismatch { epsilon: eps.as_i8(), class: class.to_string() });
        }
    }
    Ok(DysonOutcome { class, epsilon, invariant_hermitian_dim: Some(dim_h), t_prime })
}

/// Search the group image for `R` with `T g T^-1 = R^-1 g R` on the block and,
/// if found, return the sign of `T' = R T S` squared.
fn inner_case_epsilon(
    block: &IsotypicBlock,
    group: &[ComplexMatrix],
    generators: &[ComplexMatrix],
    t: &AntiUnitaryOp,
) -> Result<Option<(Sign, AntiUnitaryOp)>> {
    let adapted = adapted_basis(block, group)?;
    let bmat = &adapted.basis;
    let tb = t.restrict(bmat);
    let restrict = |g: &ComplexMatrix| bmat.adjoint() * g * bmat;
    let gens: Vec<ComplexMatrix> = if generators.is_empty() {
        vec![identity(bmat.ncols())]
    } else {
        generators.iter().map(restrict).collect()
    };
    let twisted: Vec<ComplexMatrix> = gens.iter().map(|g| tb.conjugate_matrix(g)).collect();
    let r = group.iter().map(restrict).find(|r| {
        gens.iter()
            .zip(&twisted)
            .all(|(g, tg)| frobenius_distance(&(r.adjoint() * g * r), tg) < TOL_GROUP)
    });
    let Some(r) = r else { return Ok(None) };
    let conj_int = irrep_conjugation_intertwiner(&adapted.irrep(group))?;
    let Some(s) = conj_int.s else { return Ok(None) };
    let s_full = kron(&identity(adapted.multiplicity), &s);
    let w_prime = r * tb.linear_part() * conj(&s_full);
    let t_prime = AntiUnitaryOp::with_tolerance(w_prime, 1e-8)?;
    let eps = t_prime.square_sign_with(1e-8)?;
    Ok(Some((eps, t_prime)))
}

/// Class from the squares of T and C and the presence of a chiral operator.
///
/// `None` means the operator is absent. When both T and C are present the
/// chiral operator is their product, so the flag is not required.
pub fn classify_by_involutions(t_square: Option<Sign>, c_square: Option<Sign>, has_chirality: bool) -> Result<SymmetryClass> {
    use Sign::{Minus, Plus};
    use SymmetryClass::*;
    Ok(match (t_square, c_square, has_chirality) {
        (None, None, false) => A,
        (Some(Plus), None, false) => AI,
        (Some(Minus), None, false) => AII,
        (None, None, true) => AIII,
        (None, Some(Plus), false) => D,
        (None, Some(Minus), false) => C,
        (Some(Plus), Some(Plus), _) => BDI,
        (Some(Minus), Some(Plus), _) => DIII,
        (Some(Minus), Some(Minus), _) => CII,
        (Some(Plus), Some(Minus), _) => CI,
        (t, c, true) => {
            return Err(Error::InvalidSignature(format!(
                "chirality with only one anti-unitary operator (T: {:?}, C: {:?})",
                t.map(Sign::as_i8),
                c.map(Sign::as_i8)
            )))
        }
    })
}

/// Per-block summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block_dim: usize,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    pub t_invariant: bool,
    pub class: SymmetryClass,
    pub epsilon: Option<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassificationPath {
    Dyson,
    Nambu,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub path: ClassificationPath,
    pub blocks: Vec<BlockReport>,
    /// Class of the whole space from the involution signature, when one is defined.
    pub class: Option<SymmetryClass>,
    pub t_square: Option<i8>,
    pub c_square: Option<i8>,
}

impl From<&IsotypicBlock> for BlockReport {
    fn from(b: &IsotypicBlock) -> Self {
        BlockReport {
            block_dim: b.block_dim,
            irrep_dim: b.irrep_dim,
            multiplicity: b.multiplicity,
            t_invariant: b.t_invariant,
            class: b.block_class,
            epsilon: b.epsilon.map(Sign::as_i8),
        }
    }
}

/// Classify symmetry data.
pub fn classify(data: &SymmetryData) -> Result<ClassReport> {
    let group = data.validate()?;
    if data.nambu {
        return classify_nambu(data, &group);
    }
    let blocks = decompose_with_group(data, &group)?;
    let t_square = data.t_op.as_ref().map(|t| t.square_sign()).transpose()?;
    let c_square = data.c_op.as_ref().map(|c| c.square_sign()).transpose()?;
    let class = if c_square.is_some() || data.chirality.is_some() {
        Some(classify_by_involutions(t_square, c_square, data.chirality.is_some())?)
    } else if blocks.len() == 1 {
        Some(blocks[0].block_class)
    } else {
        None
    };
    Ok(ClassReport {
        path: ClassificationPath::Dyson,
        blocks: blocks.iter().map(BlockReport::from).collect(),
        class,
        t_square: t_square.map(Sign::as_i8),
        c_square: c_square.map(Sign::as_i8),
    })
}

/// Square sign of an anti-unitary operator seen on the multiplicity space of
/// a single isotypic component: `op = op_w (x) s` in adapted coordinates.
fn reduced_square(op: &AntiUnitaryOp, adapted: &AdaptedBasis, s: &ComplexMatrix) -> Result<Sign> {
    let (d, m) = (adapted.irrep_dim, adapted.multiplicity);
    let ob = op.restrict(&adapted.basis);
    let w = ob.linear_part();
    let reduced = ComplexMatrix::from_fn(m, m, |j, k| {
        let blk = w.view((j * d, k * d), (d, d));
        (s.adjoint() * blk).trace() / Complex64::new(d as f64, 0.0)
    });
    if max_abs_diff(&kron(&reduced, s), w) > 1e-8 {
        return Err(Error::Unsupported("anti-unitary operator does not commute with the spin group".into()));
    }
    AntiUnitaryOp::with_tolerance(reduced, 1e-8)?.square_sign_with(1e-8)
}

fn classify_nambu(data: &SymmetryData, group: &[ComplexMatrix]) -> Result<ClassReport> {
    let n = data.dim;
    if !n.is_multiple_of(2) {
        return Err(Error::Schema("Nambu space must have even dimension".into()));
    }
    let canonical = nambu::particle_hole_op(n / 2);
    let c = match &data.c_op {
        Some(c) => {
            if max_abs_diff(c.linear_part(), canonical.linear_part()) > TOL_STRUCT {
                return Err(Error::StructureViolation(
                    "particle-hole operator differs from the canonical Nambu pairing".into(),
                ));
            }
            c.clone()
        }
        None => canonical,
    };
    if let Some(t) = &data.t_op {
        if max_abs_diff(&t.compose(&c), &c.compose(t)) > TOL_STRUCT {
            return Err(Error::InvalidSignature("time reversal does not commute with particle-hole conjugation".into()));
        }
    }
    let (t_square, c_square, blocks) = if group.len() > 1 {
        let blocks = isotypic_blocks(group)?;
        if blocks.len() != 1 {
            return Err(Error::Unsupported(format!(
                "Nambu reduction needs a single isotypic component, found {}",
                blocks.len()
            )));
        }
        let block = &blocks[0];
        let adapted = adapted_basis(block, group)?;
        let conj_int = irrep_conjugation_intertwiner(&adapted.irrep(group))?;
        let s = conj_int
            .s
            .ok_or_else(|| Error::Unsupported("spin irrep is not self-conjugate".into()))?;
        let c_sq = reduced_square(&c, &adapted, &s)?;
        let t_sq = data.t_op.as_ref().map(|t| reduced_square(t, &adapted, &s)).transpose()?;
        let report = BlockReport {
            block_dim: block.block_dim,
            irrep_dim: block.irrep_dim,
            multiplicity: block.multiplicity,
            t_invariant: data.t_op.is_some(),
            class: SymmetryClass::A,
            epsilon: None,
        };
        (t_sq, Some(c_sq), vec![report])
    } else {
        let t_sq = data.t_op.as_ref().map(|t| t.square_sign()).transpose()?;
        let report = BlockReport {
            block_dim: n,
            irrep_dim: 1,
            multiplicity: n,
            t_invariant: data.t_op.is_some(),
            class: SymmetryClass::A,
            epsilon: None,
        };
        (t_sq, Some(c.square_sign()?), vec![report])
    };
    let class = classify_by_involutions(t_square, c_square, data.chirality.is_some())?;
    let blocks = blocks.into_iter().map(|b| BlockReport { class, ..b }).collect();
    Ok(ClassReport {
        path: ClassificationPath::Nambu,
        blocks,
        class: Some(class),
        t_square: t_square.map(Sign::as_i8),
        c_square: c_square.map(Sign::as_i8),
    })
}
