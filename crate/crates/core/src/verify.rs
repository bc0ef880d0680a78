//! Invariant suites per module, each check reporting its measured deviation
//! against a tolerance. Discrete checks report a mismatch count against 0.

use serde::{Deserialize, Serialize};

use crate::classifier::{classify, isotypic_decompose, SymmetryClass, SymmetryData};
use crate::dirac_chiral::{
    check_gamma_algebra, gamma_matrices, lift_spinor_operator, majorana_dirac_hamiltonian, random_su, sample_chiral,
    zero_modes, Field,
};
use crate::ensembles::{canonical_involutions, sample, validate_structure, EnsembleSpec};
use crate::error::{Error, Result};
use crate::groups::random_instance;
use crate::linalg::{
    hermitian_eig, hermitian_eigenvalues, i_sigma_y, identity, kron, max_abs, max_abs_diff, random_hermitian, random_unitary,
    unitarity_deviation, AntiUnitaryOp, ComplexMatrix, RngStream,
};
use crate::nambu::{assemble_bdg, particle_hole_op, q_split, spin_time_reversal, QuadraticHamiltonian};
use crate::spectra::{bulk_spacings, spacing_ks, symmetric_spectrum_check, unfold};
use crate::symmetric_space::{fixed_point_dimension, time_evolution, ClassGeometry, Involution};

pub const MODULES: [&str; 7] =
    ["core_linalg", "classifier", "ensembles", "symmetric_space", "nambu", "dirac_chiral", "spectra"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub module: String,
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Replaces every tolerance when set.
    pub tol_override: Option<f64>,
    pub module_filter: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Suite<'a> {
    module: &'static str,
    config: &'a VerifyConfig,
    checks: Vec<CheckResult>,
}

impl Suite<'_> {
    fn check(&mut self, name: &str, deviation: f64, tolerance: f64) {
        let tolerance = self.config.tol_override.unwrap_or(tolerance);
        self.checks.push(CheckResult {
            module: self.module.to_string(),
            name: name.to_string(),
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        });
    }

    fn rng(&self, stream: u64) -> RngStream {
        RngStream::new(self.config.seed, stream)
    }
}

fn count(mismatches: usize) -> f64 {
    mismatches as f64
}

fn core_linalg(s: &mut Suite) -> Result<()> {
    let mut rng = s.rng(1);
    let mut residual = 0.0f64;
    for n in [2, 16, 48] {
        let h = random_hermitian(&mut rng, n);
        residual = residual.max(hermitian_eig(&h)?.residual(&h) / max_abs(&h));
    }
    s.check("eigendecomposition residual (relative)", residual, 1e-12);
    let t = AntiUnitaryOp::new(kron(&i_sigma_y(), &identity(3)))?;
    s.check("(i s_y (x) I) conj squares to -1", max_abs_diff(&t.square(), &(-identity(6))), 1e-14);
    let u = random_unitary(&mut rng, 20);
    s.check("random unitary", unitarity_deviation(&u), 1e-12);
    Ok(())
}

fn classifier(s: &mut Suite) -> Result<()> {
    let mut rng = s.rng(2);
    let (mut mismatches, mut projection) = (0, 0.0f64);
    for _ in 0..10 {
        let inst = random_instance(&mut rng);
        let blocks = isotypic_decompose(&inst.data)?;
        let sum_m2: usize = blocks.iter().map(|b| b.multiplicity * b.multiplicity).sum();
        mismatches += usize::from(sum_m2 != inst.expected_commutant_dimension());
        let total = blocks.iter().fold(ComplexMatrix::zeros(inst.data.dim, inst.data.dim), |acc, b| acc + &b.projection);
        projection = projection.max(max_abs_diff(&total, &identity(inst.data.dim)));
    }
    s.check("commutant dimension = sum m^2 (mismatches)", count(mismatches), 0.0);
    s.check("isotypic projections sum to the identity", projection, 1e-9);
    let ai = classify(&SymmetryData::new(4).with_t(AntiUnitaryOp::conjugation(4)))?;
    let aii = classify(&SymmetryData::new(4).with_t(AntiUnitaryOp::new(kron(&i_sigma_y(), &identity(2)))?))?;
    let wrong = usize::from(ai.blocks[0].class != SymmetryClass::AI) + usize::from(aii.blocks[0].class != SymmetryClass::AII);
    s.check("Dyson anchors (mismatches)", count(wrong), 0.0);
    Ok(())
}

fn ensemble_spec(class: SymmetryClass) -> EnsembleSpec {
    if class.is_chiral() {
        EnsembleSpec::chiral(class, 5, 3)
    } else {
        EnsembleSpec::new(class, 16)
    }
}

fn ensembles(s: &mut Suite) -> Result<()> {
    let mut rng = s.rng(3);
    let mut worst = 0.0f64;
    for class in SymmetryClass::ALL {
        for _ in 0..20 {
            let h = sample(&ensemble_spec(class), &mut rng)?;
            worst = worst.max(validate_structure(&h, f64::INFINITY).max_deviation);
        }
    }
    s.check("canonical structure of sampled Hamiltonians", worst, 1e-10);
    Ok(())
}

fn symmetric_space(s: &mut Suite) -> Result<()> {
    let mut rng = s.rng(4);
    let mut worst = 0.0f64;
    for class in SymmetryClass::ALL {
        for _ in 0..10 {
            let h = sample(&ensemble_spec(class), &mut rng)?;
            let geometry = ClassGeometry::for_hamiltonian(&h)?;
            let t = 4.0 * rng.uniform() - 2.0;
            worst = worst.max(geometry.deviation(&time_evolution(&h.matrix, t)?)?);
        }
    }
    s.check("evolutions lie in the symmetric space", worst, 1e-9);
    let fixed = |class, n| -> Result<usize> {
        let inv = canonical_involutions(class, n, None)?;
        let constraints = [Involution::AntiUnitary(inv.c.expect("C")), Involution::AntiUnitary(inv.t.expect("T"))];
        fixed_point_dimension(n, &constraints)
    };
    let wrong = usize::from(fixed(SymmetryClass::DIII, 8)? != 16) + usize::from(fixed(SymmetryClass::CI, 4)? != 4);
    s.check("fixed-point dimensions 4N^2 (DIII) and N^2 (CI) (mismatches)", count(wrong), 0.0);
    Ok(())
}

fn nambu(s: &mut Suite) -> Result<()> {
    let n = 4;
    let c = particle_hole_op(n);
    let t = spin_time_reversal(n)?;
    let split = q_split(&c, &t)?;
    s.check("Q^2 = Id", max_abs_diff(&(&split.q * &split.q), &identity(2 * n)), 1e-12);
    s.check("Tr Q = 0", split.q.trace().norm(), 1e-12);
    s.check("CT = TC", max_abs_diff(&c.compose(&t), &t.compose(&c)), 1e-12);
    s.check("C^2 = +Id", max_abs_diff(&c.square(), &identity(2 * n)), 1e-12);
    let mut rng = s.rng(5);
    let a = random_hermitian(&mut rng, n);
    let z = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_normal());
    let h = assemble_bdg(&QuadraticHamiltonian::new(a, &z - z.transpose())?)?;
    s.check("C H C^-1 = -H for BdG matrices", max_abs_diff(&c.conjugate_matrix(&h), &(-&h)), 1e-12);
    Ok(())
}

fn dirac_chiral(s: &mut Suite) -> Result<()> {
    let report = check_gamma_algebra(&gamma_matrices());
    let failed = [report.clifford, report.real_symmetric, report.gamma5_anticommutes, report.gamma5_involution, report.q_commutes]
        .iter()
        .filter(|ok| !**ok)
        .count();
    s.check("exact Gamma algebra (failed relations)", count(failed), 0.0);
    let mut rng = s.rng(6);
    let gauge = [random_su(&mut rng, 2), random_su(&mut rng, 2), random_su(&mut rng, 2), random_su(&mut rng, 2)];
    let h = majorana_dirac_hamiltonian([0.4, -0.3, 1.1, 0.2], &gauge)?;
    let skew = max_abs_diff(&h.map(|z| z.conj()), &(-&h));
    s.check("Majorana Dirac operator is imaginary skew", skew, 1e-12);
    let g5 = lift_spinor_operator(&gamma_matrices().gamma5, 2);
    s.check("Gamma_5 H Gamma_5 = -H", max_abs_diff(&(&g5 * &h * &g5), &(-&h)), 1e-12);
    let mut wrong = 0;
    for _ in 0..50 {
        let op = sample_chiral(3, 1, Field::Complex, 1.0, &mut rng)?;
        wrong += usize::from(zero_modes(&op, None)?.raw != 2);
    }
    s.check("zero modes = |p - q| for (3, 1) (mismatches)", count(wrong), 0.0);
    Ok(())
}

fn spectra(s: &mut Suite) -> Result<()> {
    let mut spacings = Vec::new();
    let mut mean_dev = 0.0f64;
    for k in 0..20 {
        let h = sample(&EnsembleSpec::new(SymmetryClass::A, 120), &mut s.rng(100 + k))?;
        let levels = hermitian_eigenvalues(&h.matrix)?;
        let bulk = bulk_spacings(&unfold(&levels, 7)?);
        mean_dev = mean_dev.max((bulk.iter().sum::<f64>() / bulk.len() as f64 - 1.0).abs());
        spacings.extend(bulk);
    }
    s.check("unfolded bulk mean spacing = 1", mean_dev, 0.02);
    s.check("GUE spacings vs beta = 2 surmise (KS)", spacing_ks(&spacings, 2)?, 0.05);
    let c = sample(&EnsembleSpec::new(SymmetryClass::C, 40), &mut s.rng(7))?;
    s.check("class C spectrum is symmetric", symmetric_spectrum_check(&hermitian_eigenvalues(&c.matrix)?), 1e-9);
    Ok(())
}

/// Runs every suite, or only the filtered module.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifySummary> {
    if let Some(f) = &config.module_filter {
        if !MODULES.contains(&f.as_str()) {
            return Err(Error::SpecInvalid(format!("unknown module {f:?}; expected one of {}", MODULES.join(", "))));
        }
    }
    type SuiteFn = fn(&mut Suite) -> Result<()>;
    let suites: [(&'static str, SuiteFn); 7] = [
        ("core_linalg", core_linalg),
        ("classifier", classifier),
        ("ensembles", ensembles),
        ("symmetric_space", symmetric_space),
        ("nambu", nambu),
        ("dirac_chiral", dirac_chiral),
        ("spectra", spectra),
    ];
    let mut checks = Vec::new();
    for (module, run) in suites {
        if config.module_filter.as_deref().is_some_and(|f| f != module) {
            continue;
        }
        let mut suite = Suite { module, config, checks: Vec::new() };
        run(&mut suite)?;
        checks.extend(suite.checks);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifySummary { checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_passes() {
        let summary = run_verify(&VerifyConfig { seed: 1, ..Default::default() }).unwrap();
        for c in summary.checks.iter().filter(|c| !c.passed) {
            eprintln!("{c:?}");
        }
        assert!(summary.passed);
        for module in MODULES {
            assert!(summary.checks.iter().any(|c| c.module == module));
        }
    }

    #[test]
    fn tiny_tolerance_reports_failures() {
        let config = VerifyConfig { seed: 1, tol_override: Some(1e-16), module_filter: Some("core_linalg".into()) };
        let summary = run_verify(&config).unwrap();
        assert!(!summary.passed);
        assert!(summary.checks.iter().all(|c| c.module == "core_linalg"));
    }

    #[test]
    fn unknown_module_is_rejected() {
        let config = VerifyConfig { module_filter: Some("nope".into()), ..Default::default() };
        assert!(matches!(run_verify(&config), Err(Error::SpecInvalid(_))));
    }
}
