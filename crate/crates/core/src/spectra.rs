//! Spectral statistics: unfolding, Wigner surmises, +-E pairing, and the
//! density of levels near zero.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::classifier::SymmetryClass;
use crate::error::{Error, Result};

pub const MIN_LEVELS: usize = 20;
pub const MIN_SPACINGS: usize = 1000;
pub const MIN_LOW_ENERGY_LEVELS: usize = 10_000;
pub const DEFAULT_POLY_DEGREE: usize = 7;
/// Fraction of each spectrum kept as bulk.
pub const BULK_FRACTION: f64 = 0.8;
/// Relative gap below which two levels are one Kramers pair.
pub const KRAMERS_REL_GAP: f64 = 1e-6;
pub const ZERO_MODE_REL_TOL: f64 = 1e-8;
pub const DEFAULT_BIN_WIDTH: f64 = 0.25;

fn spectral_radius(levels: &[f64]) -> f64 {
    levels.iter().fold(0.0f64, |a, l| a.max(l.abs()))
}

/// Maps sorted levels through a least-squares polynomial fit of the staircase
/// `N(E_i) = i + 1/2`.
pub fn unfold(levels: &[f64], poly_degree: usize) -> Result<Vec<f64>> {
    if poly_degree == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if levels.len() < MIN_LEVELS {
        return Err(Error::TooFewLevels { needed: MIN_LEVELS, got: levels.len() });
    }
    let (lo, hi) = (levels[0], levels[levels.len() - 1]);
    let center = 0.5 * (lo + hi);
    let half = (0.5 * (hi - lo)).max(f64::MIN_POSITIVE);
    // Chebyshev-like conditioning: fit on [-1, 1]
    let xs: Vec<f64> = levels.iter().map(|l| (l - center) / half).collect();
    let basis = |x: f64| -> Vec<f64> {
        let mut row = Vec::with_capacity(poly_degree + 1);
        let mut p = 1.0;
        for _ in 0..=poly_degree {
            row.push(p);
            p *= x;
        }
        row
    };
    let a = DMatrix::from_fn(xs.len(), poly_degree + 1, |i, j| basis(xs[i])[j]);
    let b = DVector::from_fn(xs.len(), |i, _| i as f64 + 0.5);
    let coeffs = a.svd(true, true).solve(&b, 1e-14).map_err(|_| Error::NoConvergence)?;
    Ok(xs.iter().map(|&x| basis(x).iter().zip(coeffs.iter()).map(|(p, c)| p * c).sum()).collect())
}

/// Spacings of the middle [`BULK_FRACTION`] of an unfolded spectrum.
pub fn bulk_spacings(unfolded: &[f64]) -> Vec<f64> {
    let n = unfolded.len();
    let cut = ((1.0 - BULK_FRACTION) * 0.5 * n as f64).round() as usize;
    let bulk = &unfolded[cut.min(n)..n.saturating_sub(cut).max(cut.min(n))];
    bulk.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Drops the second member of every near-degenerate pair.
pub fn kramers_deduplicate(levels: &[f64]) -> Vec<f64> {
    let threshold = KRAMERS_REL_GAP * spectral_radius(levels);
    let mut out = Vec::with_capacity(levels.len() / 2 + 1);
    let mut i = 0;
    while i < levels.len() {
        out.push(levels[i]);
        i += if i + 1 < levels.len() && levels[i + 1] - levels[i] < threshold { 2 } else { 1 };
    }
    out
}

fn check_beta(beta: u32) -> Result<()> {
    if matches!(beta, 1 | 2 | 4) {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}

/// Wigner surmise density with unit mean.
pub fn wigner_surmise(beta: u32, s: f64) -> Result<f64> {
    check_beta(beta)?;
    let s = s.max(0.0);
    Ok(match beta {
        1 => PI / 2.0 * s * (-PI * s * s / 4.0).exp(),
        2 => 32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp(),
        _ => 2f64.powi(18) / (3f64.powi(6) * PI.powi(3)) * s.powi(4) * (-64.0 * s * s / (9.0 * PI)).exp(),
    })
}

/// Closed-form cumulative distribution of the surmise.
pub fn surmise_cdf(beta: u32, s: f64) -> Result<f64> {
    check_beta(beta)?;
    let s = s.max(0.0);
    Ok(match beta {
        1 => 1.0 - (-PI * s * s / 4.0).exp(),
        2 => erf(2.0 * s / PI.sqrt()) - 4.0 / PI * s * (-4.0 * s * s / PI).exp(),
        _ => {
            // int_0^s x^4 e^(-b x^2) dx
            let b = 64.0 / (9.0 * PI);
            let c = 2f64.powi(18) / (3f64.powi(6) * PI.powi(3));
            let g = (-b * s * s).exp();
            let integral =
                3.0 * PI.sqrt() / (8.0 * b.powf(2.5)) * erf(b.sqrt() * s) - g * (s.powi(3) / (2.0 * b) + 3.0 * s / (4.0 * b * b));
            c * integral
        }
    })
}

/// Kolmogorov-Smirnov distance between the empirical spacing distribution and the surmise.
pub fn spacing_ks(spacings: &[f64], beta: u32) -> Result<f64> {
    check_beta(beta)?;
    if spacings.len() < MIN_SPACINGS {
        return Err(Error::TooFewSpacings { needed: MIN_SPACINGS, got: spacings.len() });
    }
    let mut sorted = spacings.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &s) in sorted.iter().enumerate() {
        let f = surmise_cdf(beta, s)?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// `max |lambda_i + lambda_(n+1-i)|` over the sorted spectrum.
pub fn symmetric_spectrum_check(levels: &[f64]) -> f64 {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().zip(sorted.iter().rev()).fold(0.0f64, |a, (x, y)| a.max((x + y).abs()))
}

/// Histogram of `|lambda|` in units of the mean level spacing at the band centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowEnergyDensity {
    pub bin_width: f64,
    /// Density per bin relative to the bulk density.
    pub relative_density: Vec<f64>,
    /// Bins with `x >= BULK_START` define the bulk reference.
    pub bulk_density: f64,
}

impl LowEnergyDensity {
    pub fn first_bin_ratio(&self) -> f64 {
        self.relative_density[0]
    }
}

const LOW_ENERGY_RANGE: f64 = 10.0;
const BULK_START: f64 = 3.0;
/// Fraction of each spectrum around its median used to set the local spacing.
const CENTRAL_WINDOW: f64 = 0.2;

/// Near-zero density profile pooled over many spectra.
pub fn low_energy_density(spectra: &[Vec<f64>], bin_width: f64) -> Result<LowEnergyDensity> {
    let total: usize = spectra.iter().map(Vec::len).sum();
    if total < MIN_LOW_ENERGY_LEVELS {
        return Err(Error::TooFewLevels { needed: MIN_LOW_ENERGY_LEVELS, got: total });
    }
    if !(bin_width > 0.0 && bin_width < LOW_ENERGY_RANGE) {
        return Err(Error::SpecInvalid(format!("bin width must lie in (0, {LOW_ENERGY_RANGE}), got {bin_width}")));
    }
    let bins = (LOW_ENERGY_RANGE / bin_width).ceil() as usize;
    let mut counts = vec![0.0f64; bins];
    for levels in spectra {
        let mut sorted = levels.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let half_window = ((CENTRAL_WINDOW * n as f64) / 2.0).round().max(1.0) as usize;
        let mid = n / 2;
        let (lo, hi) = (mid.saturating_sub(half_window), (mid + half_window).min(n - 1));
        if hi <= lo {
            return Err(Error::TooFewLevels { needed: MIN_LEVELS, got: n });
        }
        let spacing = (sorted[hi] - sorted[lo]) / (hi - lo) as f64;
        for &l in &sorted {
            let x = l.abs() / spacing;
            let bin = (x / bin_width) as usize;
            if bin < bins {
                counts[bin] += 1.0;
            }
        }
    }
    let bulk_bins: Vec<f64> =
        counts.iter().enumerate().filter(|(i, _)| *i as f64 * bin_width >= BULK_START).map(|(_, c)| *c).collect();
    let bulk_density = bulk_bins.iter().sum::<f64>() / bulk_bins.len().max(1) as f64 / (spectra.len() as f64 * bin_width);
    let relative_density =
        counts.iter().map(|c| c / (spectra.len() as f64 * bin_width) / bulk_density.max(f64::MIN_POSITIVE)).collect();
    Ok(LowEnergyDensity { bin_width, relative_density, bulk_density })
}

/// Number of levels with `|lambda| <= ZERO_MODE_REL_TOL * radius`.
pub fn count_zero_levels(levels: &[f64]) -> usize {
    let tol = ZERO_MODE_REL_TOL * spectral_radius(levels);
    levels.iter().filter(|l| l.abs() <= tol).count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub class: SymmetryClass,
    pub n_samples: usize,
    /// Pooled bulk spacings after unfolding (and Kramers deduplication where it applies).
    pub spacings: Vec<f64>,
    pub mean_spacing: f64,
    pub ks_beta1: f64,
    pub ks_beta2: f64,
    pub ks_beta4: f64,
    /// Number of zero levels -> fraction of samples.
    pub zero_mode_histogram: BTreeMap<usize, f64>,
    pub symmetry_violation: f64,
    pub low_energy: Option<LowEnergyDensity>,
}

impl SpectralReport {
    /// The surmise with the smallest KS distance.
    pub fn best_beta(&self) -> u32 {
        let ks = [(1, self.ks_beta1), (2, self.ks_beta2), (4, self.ks_beta4)];
        ks.iter().min_by(|a, b| a.1.total_cmp(&b.1)).map(|x| x.0).unwrap_or(2)
    }
}

/// Statistics of a set of spectra from one class.
pub fn spectral_report(class: SymmetryClass, spectra: &[Vec<f64>]) -> Result<SpectralReport> {
    if spectra.is_empty() {
        return Err(Error::TooFewLevels { needed: MIN_LEVELS, got: 0 });
    }
    let per_sample: Vec<Vec<f64>> = spectra
        .par_iter()
        .map(|levels| {
            let mut sorted = levels.clone();
            sorted.sort_by(f64::total_cmp);
            let levels = if class.is_kramers_doubled() { kramers_deduplicate(&sorted) } else { sorted };
            unfold(&levels, DEFAULT_POLY_DEGREE).map(|u| bulk_spacings(&u))
        })
        .collect::<Result<_>>()?;
    let spacings: Vec<f64> = per_sample.concat();
    let mean_spacing = spacings.iter().sum::<f64>() / spacings.len().max(1) as f64;
    let mut zero_counts = BTreeMap::new();
    for levels in spectra {
        *zero_counts.entry(count_zero_levels(levels)).or_insert(0usize) += 1;
    }
    let zero_mode_histogram =
        zero_counts.into_iter().map(|(k, c)| (k, c as f64 / spectra.len() as f64)).collect();
    let total: usize = spectra.iter().map(Vec::len).sum();
    let low_energy = if class.has_symmetric_spectrum() && total >= MIN_LOW_ENERGY_LEVELS {
        Some(low_energy_density(spectra, DEFAULT_BIN_WIDTH)?)
    } else {
        None
    };
    Ok(SpectralReport {
        class,
        n_samples: spectra.len(),
        mean_spacing,
        ks_beta1: spacing_ks(&spacings, 1)?,
        ks_beta2: spacing_ks(&spacings, 2)?,
        ks_beta4: spacing_ks(&spacings, 4)?,
        spacings,
        zero_mode_histogram,
        symmetry_violation: spectra.iter().map(|l| symmetric_spectrum_check(l)).fold(0.0, f64::max),
        low_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample, EnsembleSpec};
    use crate::linalg::{hermitian_eigenvalues, RngStream};

    fn spectra(class: SymmetryClass, n: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
        let spec = EnsembleSpec::new(class, n);
        (0..samples)
            .map(|k| {
                let h = sample(&spec, &mut RngStream::new(seed, k as u64)).unwrap();
                hermitian_eigenvalues(&h.matrix).unwrap()
            })
            .collect()
    }

    fn quadrature(f: impl Fn(f64) -> f64) -> f64 {
        quadrature_to(12.0, f)
    }

    /// Composite Simpson on `[0, upper]`.
    fn quadrature_to(upper: f64, f: impl Fn(f64) -> f64) -> f64 {
        let n = 200_000;
        let h = upper / n as f64;
        let mut sum = f(0.0) + f(upper);
        for i in 1..n {
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn surmises_are_normalized_with_unit_mean() {
        for beta in [1, 2, 4] {
            assert_eq!(wigner_surmise(beta, 0.0).unwrap(), 0.0);
            let norm = quadrature(|s| wigner_surmise(beta, s).unwrap());
            let mean = quadrature(|s| s * wigner_surmise(beta, s).unwrap());
            assert!((norm - 1.0).abs() < 1e-10, "beta {beta}: norm {norm}");
            assert!((mean - 1.0).abs() < 1e-10, "beta {beta}: mean {mean}");
            for s in [0.3, 1.0, 2.2] {
                let numeric = quadrature_to(s, |x| wigner_surmise(beta, x).unwrap());
                assert!((numeric - surmise_cdf(beta, s).unwrap()).abs() < 1e-10);
            }
            assert!((surmise_cdf(beta, 50.0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(wigner_surmise(3, 1.0), Err(Error::InvalidBeta(3))));
    }

    fn normalized(mut s: Vec<f64>) -> Vec<f64> {
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        s.iter_mut().for_each(|x| *x /= mean);
        s
    }

    fn two_level_spacing(h: &crate::linalg::ComplexMatrix) -> f64 {
        let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
        2.0 * (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt()
    }

    #[test]
    fn surmises_match_two_by_two_monte_carlo() {
        let draws = 1_000_000;
        for (class, beta) in [(SymmetryClass::AI, 1), (SymmetryClass::A, 2)] {
            let spec = EnsembleSpec::new(class, 2);
            let mut rng = RngStream::new(11, beta as u64);
            let s: Vec<f64> = (0..draws).map(|_| two_level_spacing(&sample(&spec, &mut rng).unwrap().matrix)).collect();
            let ks = spacing_ks(&normalized(s), beta).unwrap();
            assert!(ks < 0.01, "beta {beta}: KS {ks}");
        }
        let spec = EnsembleSpec::new(SymmetryClass::AII, 4);
        let mut rng = RngStream::new(11, 4);
        let s: Vec<f64> = (0..200_000)
            .map(|_| {
                let ev = hermitian_eigenvalues(&sample(&spec, &mut rng).unwrap().matrix).unwrap();
                assert!(ev[1] - ev[0] < 1e-10 && ev[3] - ev[2] < 1e-10);
                ev[2] - ev[1]
            })
            .collect();
        let ks = spacing_ks(&normalized(s), 4).unwrap();
        assert!(ks < 0.01, "beta 4: KS {ks}");
    }

    #[test]
    fn inverse_cdf_samples_pass_self_test() {
        let mut rng = RngStream::new(12, 0);
        let s: Vec<f64> = (0..100_000)
            .map(|_| {
                let u = rng.uniform();
                let (mut lo, mut hi) = (0.0, 10.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if surmise_cdf(2, mid).unwrap() < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        assert!(spacing_ks(&s, 2).unwrap() < 0.01);
        assert!(matches!(spacing_ks(&s[..999], 2), Err(Error::TooFewSpacings { .. })));
    }

    #[test]
    fn unfolding_examples() {
        let uniform: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let u = unfold(&uniform, 1).unwrap();
        assert!(u.windows(2).all(|w| (w[1] - w[0] - 1.0).abs() < 1e-9));
        // idempotence on unfolded data
        let again = unfold(&u, 1).unwrap();
        for (a, b) in bulk_spacings(&u).iter().zip(bulk_spacings(&again).iter()) {
            assert!((a - b).abs() < 0.01);
        }
        assert!(matches!(unfold(&uniform, 0), Err(Error::InvalidDegree(0))));
        assert!(matches!(unfold(&uniform[..10], 3), Err(Error::TooFewLevels { .. })));
        let gue = &spectra(SymmetryClass::A, 200, 1, 13)[0];
        let s = bulk_spacings(&unfold(gue, 7).unwrap());
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean spacing {mean}");
    }

    #[test]
    fn pairing_defect_examples() {
        assert_eq!(symmetric_spectrum_check(&[-2.0, -1.0, 1.0, 2.0]), 0.0);
        let c = &spectra(SymmetryClass::C, 40, 1, 14)[0];
        assert!(symmetric_spectrum_check(c) < 1e-9);
        let a = &spectra(SymmetryClass::A, 40, 1, 14)[0];
        assert!(symmetric_spectrum_check(a) > 0.1);
    }

    #[test]
    fn kramers_partners_collapse_naive_spacings() {
        let aii = spectra(SymmetryClass::AII, 120, 30, 15);
        let naive: Vec<f64> = aii.iter().flat_map(|l| l.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>()).collect();
        let collapsed = naive.iter().filter(|s| **s < 1e-9).count();
        assert!((collapsed as f64 / naive.len() as f64 - 0.5).abs() < 0.01);
        for l in &aii {
            assert_eq!(kramers_deduplicate(l).len(), l.len() / 2);
        }
        let report = spectral_report(SymmetryClass::AII, &aii).unwrap();
        assert_eq!(report.best_beta(), 4);
    }

    #[test]
    fn gue_campaign_prefers_beta_two() {
        let report = spectral_report(SymmetryClass::A, &spectra(SymmetryClass::A, 100, 30, 16)).unwrap();
        assert!((report.mean_spacing - 1.0).abs() < 0.02);
        assert!(report.spacings.iter().all(|s| *s >= 0.0));
        assert_eq!(report.best_beta(), 2);
        assert!(report.ks_beta2 < 0.05);
        assert!(report.low_energy.is_none());
        assert_eq!(report.zero_mode_histogram.get(&0), Some(&1.0));
    }

    #[test]
    fn class_d_bulk_spacings_follow_beta_two() {
        let report = spectral_report(SymmetryClass::D, &spectra(SymmetryClass::D, 100, 30, 19)).unwrap();
        assert_eq!(report.best_beta(), 2);
        assert!(report.ks_beta2 < 0.05, "KS {}", report.ks_beta2);
    }

    #[test]
    fn goe_is_far_from_beta_four() {
        let report = spectral_report(SymmetryClass::AI, &spectra(SymmetryClass::AI, 100, 30, 17)).unwrap();
        assert!(report.ks_beta4 > 0.15, "KS {}", report.ks_beta4);
        assert_eq!(report.best_beta(), 1);
    }

    #[test]
    fn low_energy_contrast_between_c_and_d() {
        let c = low_energy_density(&spectra(SymmetryClass::C, 100, 150, 18), 0.25).unwrap();
        let d = low_energy_density(&spectra(SymmetryClass::D, 100, 150, 18), 0.25).unwrap();
        assert!(c.first_bin_ratio() < 0.6, "C {}", c.first_bin_ratio());
        assert!(d.first_bin_ratio() >= 0.8, "D {}", d.first_bin_ratio());
        let gue = low_energy_density(&spectra(SymmetryClass::A, 100, 150, 18), 0.25).unwrap();
        assert!((gue.first_bin_ratio() - 1.0).abs() < 0.3, "A {}", gue.first_bin_ratio());
        assert!(matches!(low_energy_density(&spectra(SymmetryClass::C, 10, 3, 1), 0.25), Err(Error::TooFewLevels { .. })));
    }
}
