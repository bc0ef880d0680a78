//! Time evolutions as points of compact symmetric spaces.
//!
//! An involution `tau` of the unitary group defines
//! `M = {U : U = tau(U)^-1}`. For the classes with an anti-unitary `T`
//! commuting with `H` (or a chiral `Gamma` anticommuting with it) the time
//! evolutions lie in `M` for `tau = T . T^-1` (resp. `Gamma . Gamma`). The
//! classes A, D and C have group manifolds as their spaces; they are realized
//! as `M = {(U, U^-1)}` inside `K x K` with `tau` the swap of the factors.

use num_complex::Complex64;

use crate::classifier::SymmetryClass;
use crate::ensembles::{canonical_involutions, Hamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{
    direct_sum, hermitian_eig, identity, kron, max_abs_diff, pauli_x, real_solution_dimension,
    unitarity_deviation, AntiUnitaryOp, ComplexMatrix, TOL_EIG,
};

/// Involutive automorphism of the unitary group.
#[derive(Clone, Debug)]
pub enum Involution {
    /// `U -> T U T^-1`.
    AntiUnitary(AntiUnitaryOp),
    /// `U -> P U P^dagger` for a unitary `P` with `P^2` scalar.
    Unitary(ComplexMatrix),
}

impl Involution {
    pub fn dim(&self) -> usize {
        match self {
            Involution::AntiUnitary(t) => t.dim(),
            Involution::Unitary(p) => p.nrows(),
        }
    }

    /// `tau(U)`.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        if u.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.nrows() });
        }
        Ok(match self {
            Involution::AntiUnitary(t) => t.conjugate_matrix(u),
            Involution::Unitary(p) => p * u * p.adjoint(),
        })
    }
}

/// `exp(-i t H)` through the eigendecomposition of `H`.
pub fn time_evolution(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    let phases = eig.values.iter().map(|&e| Complex64::from_polar(1.0, -t * e));
    let mut scaled = eig.vectors.clone();
    for (mut col, phase) in scaled.column_iter_mut().zip(phases) {
        col *= phase;
    }
    Ok(scaled * eig.vectors.adjoint())
}

fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    let deviation = unitarity_deviation(u);
    if deviation > TOL_EIG {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// `k tau(k)^-1`.
pub fn cartan_embed(k: &ComplexMatrix, tau: &Involution) -> Result<ComplexMatrix> {
    check_unitary(k)?;
    Ok(k * tau.apply(k)?.adjoint())
}

/// `p0 p^-1 p0`.
pub fn geodesic_inversion(p0: &ComplexMatrix, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    if p0.shape() != p.shape() {
        return Err(Error::DimensionMismatch { expected: p0.nrows(), found: p.nrows() });
    }
    check_unitary(p0)?;
    check_unitary(p)?;
    Ok(p0 * p.adjoint() * p0)
}

/// `max |U - tau(U)^-1|`.
pub fn membership_deviation(u: &ComplexMatrix, tau: &Involution) -> Result<f64> {
    Ok(max_abs_diff(u, &tau.apply(u)?.adjoint()))
}

/// Whether `U = tau(U)^-1` within `tol`.
pub fn membership(u: &ComplexMatrix, tau: &Involution, tol: f64) -> bool {
    membership_deviation(u, tau).is_ok_and(|d| d <= tol)
}

/// `p0 p^-1 p0` for members `p0`, `p`; the result is checked to be a member.
pub fn closure_under_inversion_product(
    p0: &ComplexMatrix,
    p: &ComplexMatrix,
    tau: &Involution,
    tol: f64,
) -> Result<ComplexMatrix> {
    for x in [p0, p] {
        let deviation = membership_deviation(x, tau)?;
        if deviation > tol {
            return Err(Error::NotInM { deviation });
        }
    }
    let r = geodesic_inversion(p0, p)?;
    let deviation = membership_deviation(&r, tau)?;
    if deviation > tol {
        return Err(Error::NotInM { deviation });
    }
    Ok(r)
}

/// Real dimension of `{X anti-Hermitian : sigma(X) = X for every sigma}`,
/// the tangent space at the identity of the common fixed-point group.
pub fn fixed_point_dimension(n: usize, constraints: &[Involution]) -> Result<usize> {
    for c in constraints {
        if c.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
        }
    }
    real_solution_dimension(n * n, |coef| {
        let x = ComplexMatrix::from_column_slice(n, n, coef);
        let mut residual: Vec<Complex64> = (&x + x.adjoint()).iter().copied().collect();
        for c in constraints {
            let image = c.apply(&x).expect("dimension checked");
            residual.extend((image - &x).iter());
        }
        residual
    })
}

/// The symmetric space attached to a class, in the coordinates of the
/// canonical ensembles.
#[derive(Clone, Debug)]
pub struct ClassGeometry {
    pub class: SymmetryClass,
    /// Involution whose `M` contains the (possibly doubled) time evolutions.
    pub tau: Involution,
    /// Group manifolds are embedded as `diag(U, U^-1)` in twice the dimension.
    pub doubled: bool,
    /// Involutions fixing the group `K` the evolutions live in (particle-hole
    /// conjugation for the superconducting classes).
    pub k_constraints: Vec<Involution>,
}

impl ClassGeometry {
    pub fn for_hamiltonian(h: &Hamiltonian) -> Result<Self> {
        Self::new(h.class, h.dim(), h.blocks)
    }

    pub fn new(class: SymmetryClass, dim: usize, blocks: Option<(usize, usize)>) -> Result<Self> {
        use SymmetryClass::*;
        let inv = canonical_involutions(class, dim, blocks)?;
        let k_constraints: Vec<Involution> = inv.c.iter().cloned().map(Involution::AntiUnitary).collect();
        let (tau, doubled) = match class {
            A | D | C => (Involution::Unitary(kron(&pauli_x(), &identity(dim))), true),
            AI | AII | DIII | CI => (Involution::AntiUnitary(inv.t.expect("class has T")), false),
            AIII | BDI | CII => (Involution::Unitary(inv.chirality.expect("chiral class")), false),
        };
        Ok(ClassGeometry { class, tau, doubled, k_constraints })
    }

    /// Point of `M` representing the evolution `U`.
    pub fn point(&self, u: &ComplexMatrix) -> ComplexMatrix {
        if self.doubled {
            direct_sum(&[u.clone(), u.adjoint()])
        } else {
            u.clone()
        }
    }

    /// Largest of the membership deviation of `point(U)` and the deviations
    /// from the `K` constraints.
    pub fn deviation(&self, u: &ComplexMatrix) -> Result<f64> {
        let mut worst = membership_deviation(&self.point(u), &self.tau)?;
        for k in &self.k_constraints {
            worst = worst.max(max_abs_diff(&k.apply(u)?, u));
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample, EnsembleSpec};
    use crate::linalg::{c64, i_sigma_y, pauli_y, random_hermitian, random_unitary, ComplexVector, RngStream};

    fn conj_tau(n: usize) -> Involution {
        Involution::AntiUnitary(AntiUnitaryOp::conjugation(n))
    }

    #[test]
    fn time_evolution_examples() {
        let mut rng = RngStream::new(1, 0);
        let h = random_hermitian(&mut rng, 6);
        assert!(max_abs_diff(&time_evolution(&h, 0.0).unwrap(), &identity(6)) < 1e-14);
        let d = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c64(std::f64::consts::PI, 0.0), c64(0.0, 0.0)]));
        let u = time_evolution(&d, 1.0).unwrap();
        assert!(max_abs_diff(&u, &ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c64(-1.0, 0.0), c64(1.0, 0.0)]))) < 1e-15);
        let u1 = time_evolution(&h, 1.0).unwrap();
        let u2 = time_evolution(&h, 2.0).unwrap();
        assert!(max_abs_diff(&u2, &(&u1 * &u1)) < 1e-10);
        let (s, t) = (0.37, -1.21);
        let lhs = time_evolution(&h, s + t).unwrap();
        let rhs = time_evolution(&h, s).unwrap() * time_evolution(&h, t).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
        assert!(unitarity_deviation(&u1) < TOL_EIG);
    }

    #[test]
    fn involution_axioms() {
        let mut rng = RngStream::new(2, 0);
        let taus = [
            conj_tau(4),
            Involution::AntiUnitary(AntiUnitaryOp::new(kron(&i_sigma_y(), &identity(2))).unwrap()),
            Involution::Unitary(direct_sum(&[identity(1), -identity(3)])),
        ];
        for tau in &taus {
            for _ in 0..100 {
                let u = random_unitary(&mut rng, 4);
                let v = random_unitary(&mut rng, 4);
                let twice = tau.apply(&tau.apply(&u).unwrap()).unwrap();
                assert!(max_abs_diff(&twice, &u) < 1e-10);
                let lhs = tau.apply(&(&u * &v)).unwrap();
                let rhs = tau.apply(&u).unwrap() * tau.apply(&v).unwrap();
                assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn cartan_embedding_examples() {
        let mut rng = RngStream::new(3, 0);
        let tau = conj_tau(5);
        assert!(max_abs_diff(&cartan_embed(&identity(5), &tau).unwrap(), &identity(5)) < 1e-15);
        // real orthogonal matrices are fixed by conjugation
        let o = time_evolution(&(random_hermitian(&mut rng, 5).map(|z| c64(0.0, z.im))), 1.0).unwrap();
        assert!(max_abs_diff(&cartan_embed(&o, &tau).unwrap(), &identity(5)) < 1e-12);
        let k = random_unitary(&mut rng, 5);
        let p = cartan_embed(&k, &tau).unwrap();
        assert!(max_abs_diff(&p, &(&k * k.transpose())) < 1e-12);
        assert!(max_abs_diff(&p, &p.transpose()) < 1e-12);
        assert!(membership(&p, &tau, 1e-10));
        // right cosets of the fixed-point group collapse
        let p2 = cartan_embed(&(&k * &o), &tau).unwrap();
        assert!(max_abs_diff(&p, &p2) < 1e-12);
    }

    #[test]
    fn geodesic_inversion_examples() {
        let mut rng = RngStream::new(4, 0);
        let p0 = random_unitary(&mut rng, 4);
        let p = random_unitary(&mut rng, 4);
        assert!(max_abs_diff(&geodesic_inversion(&identity(4), &p).unwrap(), &p.adjoint()) < 1e-14);
        assert!(max_abs_diff(&geodesic_inversion(&p0, &p0).unwrap(), &p0) < 1e-14);
        let twice = geodesic_inversion(&p0, &geodesic_inversion(&p0, &p).unwrap()).unwrap();
        assert!(max_abs_diff(&twice, &p) < 1e-12);
        assert!(matches!(geodesic_inversion(&p0, &identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn membership_examples() {
        let mut rng = RngStream::new(5, 0);
        let tau = conj_tau(4);
        assert!(membership(&identity(4), &tau, 1e-12));
        let h = sample(&EnsembleSpec::new(SymmetryClass::AI, 4), &mut rng).unwrap();
        assert!(membership(&time_evolution(&h.matrix, 0.8).unwrap(), &tau, 1e-10));
        assert!(!membership(&random_unitary(&mut rng, 4), &tau, 1e-6));
    }

    #[test]
    fn inversion_product_stays_in_m() {
        let mut rng = RngStream::new(6, 0);
        let tau = conj_tau(4);
        let p0 = cartan_embed(&random_unitary(&mut rng, 4), &tau).unwrap();
        let p = cartan_embed(&random_unitary(&mut rng, 4), &tau).unwrap();
        let r = closure_under_inversion_product(&p0, &p, &tau, 1e-10).unwrap();
        assert!(membership(&r, &tau, 1e-10));
        let same = closure_under_inversion_product(&p, &p, &tau, 1e-10).unwrap();
        assert!(max_abs_diff(&same, &p) < 1e-12);
        let from_id = closure_under_inversion_product(&p0, &identity(4), &tau, 1e-10).unwrap();
        assert!(max_abs_diff(&from_id, &(&p0 * &p0)) < 1e-12);
        let outsider = random_unitary(&mut rng, 4);
        assert!(matches!(closure_under_inversion_product(&p0, &outsider, &tau, 1e-10), Err(Error::NotInM { .. })));
    }

    #[test]
    fn evolutions_lie_in_m_for_every_class() {
        let mut rng = RngStream::new(7, 0);
        for class in SymmetryClass::ALL {
            let spec = if class.is_chiral() { EnsembleSpec::chiral(class, 3, 2) } else { EnsembleSpec::new(class, 8) };
            let geometry_check = |h: &Hamiltonian, t: f64| {
                let geo = ClassGeometry::for_hamiltonian(h).unwrap();
                geo.deviation(&time_evolution(&h.matrix, t).unwrap()).unwrap()
            };
            for _ in 0..10 {
                let h = sample(&spec, &mut rng).unwrap();
                let t = 4.0 * rng.uniform() - 2.0;
                assert!(geometry_check(&h, t) < 1e-9, "{class}");
            }
        }
    }

    #[test]
    fn fixed_point_dimensions() {
        // conjugation alone fixes O(n)
        assert_eq!(fixed_point_dimension(4, &[conj_tau(4)]).unwrap(), 6);
        for n in [2, 3] {
            let geo = canonical_involutions(SymmetryClass::DIII, 4 * n, None).unwrap();
            let constraints = [Involution::AntiUnitary(geo.c.unwrap()), Involution::AntiUnitary(geo.t.unwrap())];
            assert_eq!(fixed_point_dimension(4 * n, &constraints).unwrap(), 4 * n * n);
        }
        for n in [2, 4] {
            let geo = canonical_involutions(SymmetryClass::CI, 2 * n, None).unwrap();
            let constraints = [Involution::AntiUnitary(geo.c.unwrap()), Involution::AntiUnitary(geo.t.unwrap())];
            assert_eq!(fixed_point_dimension(2 * n, &constraints).unwrap(), n * n);
        }
        // the symplectic group alone
        let c = AntiUnitaryOp::new(kron(&pauli_y(), &identity(2))).unwrap();
        assert_eq!(fixed_point_dimension(4, &[Involution::AntiUnitary(c)]).unwrap(), 10);
    }
}
