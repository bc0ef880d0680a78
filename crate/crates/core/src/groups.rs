//! Small finite groups with explicit irreducible representations, and random
//! symmetry data assembled from them with a known answer.
//!
//! Used as ground truth for the classifier: an instance fixes the irreps,
//! their multiplicities and the anti-unitary symmetry by construction, then
//! hides the structure behind a random unitary change of basis.

use num_complex::Complex64;

use crate::classifier::{group_closure, SymmetryClass, SymmetryData};
use crate::error::Result;
use crate::linalg::{
    c64, complex_nullspace_scaled, conj, direct_sum, i_sigma_y, identity, kron, max_abs_diff, pauli_x,
    pauli_z, random_hermitian, random_unitary, real_nullity, AntiUnitaryOp, ComplexMatrix, RealMatrix, RngStream,
    I, ONE,
};

/// Irreducible representation given by the images of the group generators.
#[derive(Clone, Debug)]
pub struct Irrep {
    pub gens: Vec<ComplexMatrix>,
    /// Index of the irrep equivalent to the conjugate one.
    pub partner: usize,
    /// Unitary `c` with `rho_partner(g) = c conj(rho(g)) c^dagger`.
    pub conj_map: ComplexMatrix,
}

impl Irrep {
    pub fn dim(&self) -> usize {
        self.gens[0].nrows()
    }
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub name: String,
    pub order: usize,
    pub abelian: bool,
    pub irreps: Vec<Irrep>,
}

impl FiniteGroup {
    /// Frobenius-Schur type of irrep `k`: `+1` real, `-1` quaternionic, `0` complex.
    pub fn fs_type(&self, k: usize) -> i8 {
        let irrep = &self.irreps[k];
        if irrep.partner != k {
            return 0;
        }
        let square = &irrep.conj_map * conj(&irrep.conj_map);
        if square[(0, 0)].re > 0.0 {
            1
        } else {
            -1
        }
    }
}

fn scalar(z: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_element(1, 1, z)
}

fn real_rows(n: usize, rows: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(n, n, &rows.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>())
}

fn self_conjugate(gens: Vec<ComplexMatrix>, index: usize, conj_map: ComplexMatrix) -> Irrep {
    Irrep { gens, partner: index, conj_map }
}

pub fn trivial_group() -> FiniteGroup {
    FiniteGroup {
        name: "1".into(),
        order: 1,
        abelian: true,
        irreps: vec![self_conjugate(vec![scalar(ONE)], 0, identity(1))],
    }
}

/// Cyclic group `Z_k` with characters `a -> omega^j`.
pub fn cyclic(k: usize) -> FiniteGroup {
    let irreps = (0..k)
        .map(|j| Irrep {
            gens: vec![scalar(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64))],
            partner: (k - j) % k,
            conj_map: identity(1),
        })
        .collect();
    FiniteGroup { name: format!("Z{k}"), order: k, abelian: true, irreps }
}

/// Quaternion group generated by `i`, `j`.
pub fn quaternion() -> FiniteGroup {
    let mut irreps: Vec<Irrep> = Vec::new();
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let k = irreps.len();
        irreps.push(self_conjugate(vec![scalar(c64(a, 0.0)), scalar(c64(b, 0.0))], k, identity(1)));
    }
    irreps.push(self_conjugate(vec![pauli_z() * I, i_sigma_y()], 4, i_sigma_y()));
    FiniteGroup { name: "Q8".into(), order: 8, abelian: false, irreps }
}

/// Dihedral group of order `2k`, generated by a rotation and a reflection.
pub fn dihedral(k: usize) -> FiniteGroup {
    let mut irreps: Vec<Irrep> = Vec::new();
    let signs: &[(f64, f64)] = if k.is_multiple_of(2) {
        &[(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
    } else {
        &[(1.0, 1.0), (1.0, -1.0)]
    };
    for &(r, f) in signs {
        let idx = irreps.len();
        irreps.push(self_conjugate(vec![scalar(c64(r, 0.0)), scalar(c64(f, 0.0))], idx, identity(1)));
    }
    for h in 1..k.div_ceil(2) {
        let t = 2.0 * std::f64::consts::PI * h as f64 / k as f64;
        let rot = real_rows(2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let idx = irreps.len();
        irreps.push(self_conjugate(vec![rot, real_rows(2, &[1.0, 0.0, 0.0, -1.0])], idx, identity(2)));
    }
    FiniteGroup { name: format!("D{k}"), order: 2 * k, abelian: false, irreps }
}

/// Dicyclic group of order 12: `a^6 = 1`, `x^2 = a^3`, `x a x^-1 = a^-1`.
pub fn dicyclic12() -> FiniteGroup {
    let zeta = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let omega = zeta * zeta;
    let diag = |z: Complex64| ComplexMatrix::from_diagonal(&crate::linalg::ComplexVector::from_vec(vec![z, z.conj()]));
    let irreps = vec![
        self_conjugate(vec![scalar(ONE), scalar(ONE)], 0, identity(1)),
        self_conjugate(vec![scalar(ONE), scalar(-ONE)], 1, identity(1)),
        Irrep { gens: vec![scalar(-ONE), scalar(I)], partner: 3, conj_map: identity(1) },
        Irrep { gens: vec![scalar(-ONE), scalar(-I)], partner: 2, conj_map: identity(1) },
        self_conjugate(vec![diag(zeta), i_sigma_y()], 4, i_sigma_y()),
        self_conjugate(vec![diag(omega), pauli_x()], 5, pauli_x()),
    ];
    FiniteGroup { name: "Dic3".into(), order: 12, abelian: false, irreps }
}

/// Direct product with irreps `rho_1 (x) rho_2`.
pub fn direct_product(g1: &FiniteGroup, g2: &FiniteGroup) -> FiniteGroup {
    let n2 = g2.irreps.len();
    let mut irreps = Vec::with_capacity(g1.irreps.len() * n2);
    for a in &g1.irreps {
        for b in &g2.irreps {
            let id_a = identity(a.dim());
            let id_b = identity(b.dim());
            let mut gens: Vec<ComplexMatrix> = a.gens.iter().map(|g| kron(g, &id_b)).collect();
            gens.extend(b.gens.iter().map(|g| kron(&id_a, g)));
            irreps.push(Irrep { gens, partner: a.partner * n2 + b.partner, conj_map: kron(&a.conj_map, &b.conj_map) });
        }
    }
    FiniteGroup {
        name: format!("{}x{}", g1.name, g2.name),
        order: g1.order * g2.order,
        abelian: g1.abelian && g2.abelian,
        irreps,
    }
}

/// Groups used for random instances; all of order at most 48.
pub fn catalogue() -> Vec<FiniteGroup> {
    let base = vec![
        trivial_group(),
        cyclic(2),
        cyclic(3),
        cyclic(4),
        cyclic(5),
        cyclic(6),
        quaternion(),
        dihedral(3),
        dihedral(4),
        dicyclic12(),
    ];
    let mut all = base.clone();
    for (i, a) in base.iter().enumerate() {
        for b in base.iter().skip(i.max(1)) {
            if a.order > 1 && b.order > 1 && a.order * b.order <= 48 {
                all.push(direct_product(a, b));
            }
        }
    }
    all
}

/// How the anti-unitary symmetry acts on the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TMode {
    None,
    /// `T g T^-1 = g`.
    Commuting(i8),
    /// Abelian groups only: `T g T^-1 = g^-1`.
    Inverting(i8),
}

/// One isotypic component as built.
#[derive(Clone, Debug)]
pub struct ExpectedBlock {
    pub irrep: usize,
    /// Orthonormal columns in the final (rotated) coordinates.
    pub basis: ComplexMatrix,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    pub class: SymmetryClass,
}

#[derive(Clone, Debug)]
pub struct GroupInstance {
    pub group: String,
    pub t_mode: TMode,
    pub data: SymmetryData,
    pub blocks: Vec<ExpectedBlock>,
}

impl GroupInstance {
    pub fn expected_commutant_dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity * b.multiplicity).sum()
    }
}

/// `J` with `J conj(J) = sign`, of size `m` (even when `sign = -1`).
fn square_root_of_sign(m: usize, sign: i8) -> ComplexMatrix {
    if sign > 0 {
        identity(m)
    } else {
        kron(&i_sigma_y(), &identity(m / 2))
    }
}

/// Build symmetry data from irreps `(index, multiplicity)` of `group`.
///
/// Multiplicities must be even where the requested `T` needs it, and complex
/// irreps must appear together with their partner under `Commuting` mode.
pub fn build_instance(
    group: &FiniteGroup,
    chosen: &[(usize, usize)],
    t_mode: TMode,
    basis_change: &ComplexMatrix,
) -> GroupInstance {
    let n_gens = group.irreps[0].gens.len();
    let mut offsets = Vec::with_capacity(chosen.len());
    let mut dim = 0;
    for &(k, m) in chosen {
        offsets.push(dim);
        dim += group.irreps[k].dim() * m;
    }
    let gens: Vec<ComplexMatrix> = (0..n_gens)
        .map(|g| {
            let parts: Vec<_> = chosen
                .iter()
                .map(|&(k, m)| kron(&group.irreps[k].gens[g], &identity(m)))
                .collect();
            direct_sum(&parts)
        })
        .collect();

    let mut classes = vec![SymmetryClass::A; chosen.len()];
    let w = match t_mode {
        TMode::None => None,
        TMode::Inverting(t) => {
            assert!(group.abelian, "inverting T needs an abelian group");
            let parts: Vec<_> = chosen.iter().map(|&(_, m)| square_root_of_sign(m, t)).collect();
            classes.fill(if t > 0 { SymmetryClass::AI } else { SymmetryClass::AII });
            Some(direct_sum(&parts))
        }
        TMode::Commuting(t) => {
            let mut w = ComplexMatrix::zeros(dim, dim);
            for (slot, &(a, m)) in chosen.iter().enumerate() {
                let irrep = &group.irreps[a];
                let d = irrep.dim();
                let b = irrep.partner;
                let target = chosen
                    .iter()
                    .position(|&(k, mk)| k == b && mk == m)
                    .expect("conjugate partner must be present with equal multiplicity");
                let j = if a == b {
                    let fs = group.fs_type(a);
                    let inner = t * fs;
                    classes[slot] = if inner > 0 { SymmetryClass::AI } else { SymmetryClass::AII };
                    square_root_of_sign(m, inner)
                } else if a < b {
                    identity(m)
                } else {
                    // complete T^2 = t on the pair
                    let partner = &group.irreps[b];
                    let lambda = (&irrep.conj_map * conj(&partner.conj_map))[(0, 0)];
                    identity(m) * (Complex64::new(t as f64, 0.0) / lambda)
                };
                let block = kron(&irrep.conj_map, &j);
                w.view_mut((offsets[target], offsets[slot]), (d * m, d * m)).copy_from(&block);
            }
            Some(w)
        }
    };

    let u = basis_change;
    let mut data = SymmetryData::new(dim).with_generators(gens.iter().map(|g| u * g * u.adjoint()).collect());
    if let Some(w) = w {
        let t = AntiUnitaryOp::new(w).expect("constructed T is unitary");
        data = data.with_t(t.change_basis(u));
    }
    let blocks = chosen
        .iter()
        .enumerate()
        .map(|(slot, &(k, m))| {
            let d = group.irreps[k].dim();
            ExpectedBlock {
                irrep: k,
                basis: u.columns(offsets[slot], d * m).into_owned(),
                irrep_dim: d,
                multiplicity: m,
                class: classes[slot],
            }
        })
        .collect();
    GroupInstance { group: group.name.clone(), t_mode, data, blocks }
}

const MAX_INSTANCE_DIM: usize = 12;

/// Random instance: random group from the catalogue, random irreps and
/// multiplicities, random T, random basis.
pub fn random_instance(rng: &mut RngStream) -> GroupInstance {
    let catalogue = catalogue();
    let group = &catalogue[rng.below(catalogue.len())];
    let t_mode = match rng.below(if group.abelian { 5 } else { 3 }) {
        0 => TMode::None,
        1 => TMode::Commuting(1),
        2 => TMode::Commuting(-1),
        3 => TMode::Inverting(1),
        _ => TMode::Inverting(-1),
    };
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut dim = 0;
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..group.irreps.len()).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.below(i + 1));
        }
        idx
    };
    for k in order {
        if chosen.iter().any(|&(c, _)| c == k) || rng.uniform() < 0.4 {
            continue;
        }
        let irrep = &group.irreps[k];
        let d = irrep.dim();
        let mut m = 1 + rng.below(3);
        let needs_even = match t_mode {
            TMode::Commuting(t) => irrep.partner == k && t * group.fs_type(k) < 0,
            TMode::Inverting(t) => t < 0,
            TMode::None => false,
        };
        if needs_even && m % 2 == 1 {
            m += 1;
        }
        let paired = matches!(t_mode, TMode::Commuting(_)) && irrep.partner != k;
        let cost = if paired { 2 * d * m } else { d * m };
        if dim + cost > MAX_INSTANCE_DIM {
            continue;
        }
        dim += cost;
        chosen.push((k, m));
        if paired {
            chosen.push((irrep.partner, m));
        }
    }
    if chosen.is_empty() {
        // trivial-type irrep 0 is self-conjugate and real in every catalogue group
        let m = if matches!(t_mode, TMode::Commuting(-1) | TMode::Inverting(-1)) { 2 } else { 1 + rng.below(3) };
        chosen.push((0, m));
        dim = m;
    }
    let u = random_unitary(rng, dim);
    build_instance(group, &chosen, t_mode, &u)
}

/// Frobenius-Schur indicator `(1/|G|) sum_g chi(g^2)` of a representation
/// whose image is the full list `elements`.
pub fn frobenius_schur_indicator(elements: &[ComplexMatrix]) -> f64 {
    let total: Complex64 = elements.iter().map(|g| (g * g).trace()).sum();
    total.re / elements.len() as f64
}

/// Complex dimension of the commutant by brute force on the stacked
/// commutator system of the generators.
pub fn oracle_commutant_dimension(dim: usize, generators: &[ComplexMatrix]) -> Result<usize> {
    let n2 = dim * dim;
    if generators.is_empty() {
        return Ok(n2);
    }
    let mut system = ComplexMatrix::zeros(generators.len() * n2, n2);
    for (k, g) in generators.iter().enumerate() {
        let a = kron(&identity(dim), g) - kron(&g.transpose(), &identity(dim));
        system.view_mut((k * n2, 0), (n2, n2)).copy_from(&a);
    }
    Ok(complex_nullspace_scaled(&system, 1.0)?.ncols())
}

/// Real dimension of the Hermitian operators on a block that commute with the
/// group and with `T`, from Reynolds averages of random Hermitian matrices.
pub fn oracle_invariant_hermitian_dim(
    elements: &[ComplexMatrix],
    t: &AntiUnitaryOp,
    block_basis: &ComplexMatrix,
    rng: &mut RngStream,
) -> Result<usize> {
    let n = block_basis.nrows();
    let b = block_basis.ncols();
    let samples = b * b + 3;
    let order = elements.len() as f64;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = random_hermitian(rng, n);
        let mut avg = ComplexMatrix::zeros(n, n);
        for g in elements {
            avg += g * &x * g.adjoint();
        }
        avg /= Complex64::new(order, 0.0);
        let sym = (&avg + t.conjugate_matrix(&avg)) * c64(0.5, 0.0);
        let r = block_basis.adjoint() * sym * block_basis;
        columns.push(r.iter().flat_map(|z| [z.re, z.im]).collect());
    }
    let a = RealMatrix::from_fn(columns.len(), 2 * b * b, |i, j| columns[i][j]);
    // rank of the sample set = dimension of the averaged space
    Ok(2 * b * b - real_nullity(&a)?)
}

/// Group elements generated by an irrep's generator images.
pub fn irrep_image(irrep: &Irrep) -> Result<Vec<ComplexMatrix>> {
    group_closure(irrep.dim(), &irrep.gens)
}

/// `true` when `c conj(rho(g)) c^dagger = rho_partner(g)` for every generator.
pub fn conj_map_is_consistent(group: &FiniteGroup, k: usize) -> bool {
    let irrep = &group.irreps[k];
    let partner = &group.irreps[irrep.partner];
    irrep.gens.iter().zip(&partner.gens).all(|(g, p)| {
        let c = &irrep.conj_map;
        max_abs_diff(&(c * conj(g) * c.adjoint()), p) < 1e-12
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_consistent() {
        for group in catalogue() {
            assert!(group.order <= 48, "{}", group.name);
            let dims_squared: usize = group.irreps.iter().map(|r| r.dim() * r.dim()).sum();
            assert_eq!(dims_squared, group.order, "{}", group.name);
            for k in 0..group.irreps.len() {
                assert!(conj_map_is_consistent(&group, k), "{} irrep {k}", group.name);
                assert_eq!(group.irreps[group.irreps[k].partner].partner, k);
                // each image is irreducible
                let image = irrep_image(&group.irreps[k]).unwrap();
                assert_eq!(crate::classifier::commutant_dimension(&image).unwrap(), 1);
            }
        }
    }

    #[test]
    fn fs_types_match_character_oracle() {
        for group in catalogue() {
            for k in 0..group.irreps.len() {
                let image = irrep_image(&group.irreps[k]).unwrap();
                let indicator = frobenius_schur_indicator(&image);
                assert!((indicator - group.fs_type(k) as f64).abs() < 1e-10, "{} irrep {k}", group.name);
            }
        }
    }

    #[test]
    fn random_instances_are_valid() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..30 {
            let inst = random_instance(&mut rng);
            inst.data.validate().unwrap();
            if let Some(t) = &inst.data.t_op {
                let expected = match inst.t_mode {
                    TMode::Commuting(s) | TMode::Inverting(s) => s,
                    TMode::None => unreachable!(),
                };
                assert_eq!(t.square_sign().unwrap().as_i8(), expected);
            }
            assert_eq!(
                oracle_commutant_dimension(inst.data.dim, &inst.data.g0_generators).unwrap(),
                inst.expected_commutant_dimension(),
                "{}",
                inst.group
            );
        }
    }
}
