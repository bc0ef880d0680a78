use proptest::prelude::*;
use tenfold::classifier::SymmetryClass;
use tenfold::ensembles::{sample, validate_structure, EnsembleSpec};
use tenfold::linalg::{
    c64, hermitian_eig, i_sigma_y, identity, kron, max_abs, random_hermitian, random_unitary, unitarity_deviation,
    AntiUnitaryOp, ComplexVector, RngStream, Sign,
};
use tenfold::spectra::symmetric_spectrum_check;

fn involution(rng: &mut RngStream, half: usize, sign: Sign) -> AntiUnitaryOp {
    let base = match sign {
        Sign::Plus => AntiUnitaryOp::conjugation(2 * half),
        Sign::Minus => AntiUnitaryOp::new(kron(&i_sigma_y(), &identity(half))).unwrap(),
    };
    base.change_basis(&random_unitary(rng, 2 * half))
}

fn arb_class() -> impl Strategy<Value = SymmetryClass> {
    proptest::sample::select(SymmetryClass::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn anti_unitary_applied_twice_is_its_sign(seed in any::<u64>(), half in 1usize..6, minus in any::<bool>()) {
        let mut rng = RngStream::new(seed, 0);
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        let t = involution(&mut rng, half, sign);
        prop_assert_eq!(t.square_sign().unwrap(), sign);
        let psi = ComplexVector::from_fn(2 * half, |_, _| rng.complex_normal());
        let twice = t.apply(&t.apply(&psi).unwrap()).unwrap();
        prop_assert!((twice - psi * c64(sign.value(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn composition_of_anti_unitaries_is_unitary(seed in any::<u64>(), half in 1usize..6) {
        let mut rng = RngStream::new(seed, 1);
        let a = involution(&mut rng, half, Sign::Plus);
        let b = involution(&mut rng, half, Sign::Minus);
        prop_assert!(unitarity_deviation(&a.compose(&b)) < 1e-12);
    }

    #[test]
    fn hermitian_eigendecomposition(seed in any::<u64>(), n in 2usize..=64) {
        let h = random_hermitian(&mut RngStream::new(seed, 2), n);
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.residual(&h) < 1e-12 * max_abs(&h) * n as f64);
        prop_assert!(unitarity_deviation(&eig.vectors) < 1e-12 * n as f64);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sampled_hamiltonians_keep_their_structure(seed in any::<u64>(), class in arb_class(), k in 1usize..5, sigma in 0.1f64..5.0) {
        let spec = if class.is_chiral() {
            EnsembleSpec::chiral(class, k + 1, k)
        } else {
            EnsembleSpec::new(class, 4 * k)
        }
        .with_sigma(sigma);
        let h = sample(&spec, &mut RngStream::new(seed, 3)).unwrap();
        let report = validate_structure(&h, 1e-10);
        prop_assert!(report.valid, "{:?}", report.violations);
        if class.has_symmetric_spectrum() {
            let levels = hermitian_eig(&h.matrix).unwrap().values;
            prop_assert!(symmetric_spectrum_check(&levels) < 1e-9 * sigma.max(1.0) * spec.matrix_dim() as f64);
        }
    }
}
