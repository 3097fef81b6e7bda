//! Eigenvalues, decay-matrix blocks, critical coherence and the two verdicts.

use std::sync::Arc;

use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use nmbath::cli;
use nmbath::diagnostics::{
    block_determinants, critical_coherence, hermitian_eigenvalues, markovianity_check, min_decay_eigenvalue,
    positivity_report,
};
use nmbath::evolve::{evolve, IntegratorConfig};
use nmbath::generator::{DensityMatrix, Generator, GeneratorConfig, Mode, RateSource, SystemSpec};
use nmbath::rates::{decay_matrix, static_rates, DecayMatrix, QuadratureSettings, RateSet, RateTable, RateTime};
use nmbath::spectra::{photon_number, CouplingSpectrum, TemperatureProfile};

fn random_hermitian<const N: usize>(rng: &mut impl Rng) -> SMatrix<Complex64, N, N> {
    let mut m = SMatrix::<Complex64, N, N>::zeros();
    for i in 0..N {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..N {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Characteristic polynomial coefficients (highest degree first) by
/// Faddeev–LeVerrier.
fn characteristic_polynomial(a: &DMatrix<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    let identity = DMatrix::<Complex64>::identity(n, n);
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &identity * Complex64::new(*coeffs.last().unwrap(), 0.0);
        let c = -(a * &m).trace().re / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Real roots of a polynomial with only real, separated roots: scan for
/// sign changes, then bisect.
fn polynomial_roots(coeffs: &[f64], bound: f64) -> Vec<f64> {
    let eval = |x: f64| coeffs.iter().fold(0.0, |acc, c| acc * x + c);
    let samples = 20_000;
    let mut roots = Vec::new();
    let mut prev = -bound;
    for k in 1..=samples {
        let x = -bound + 2.0 * bound * k as f64 / samples as f64;
        if eval(prev) == 0.0 {
            roots.push(prev);
        } else if eval(prev).signum() != eval(x).signum() && eval(x) != 0.0 {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if eval(lo).signum() == eval(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = x;
    }
    roots
}

fn check_against_polynomial<const N: usize>(seed: u64) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < 200 {
        let h = random_hermitian::<N>(&mut rng);
        let ev = hermitian_eigenvalues(&h).unwrap();
        if ev.windows(2).any(|w| w[1] - w[0] < 1e-2) {
            continue;
        }
        let dense = DMatrix::from_fn(N, N, |i, j| h[(i, j)]);
        let roots = polynomial_roots(&characteristic_polynomial(&dense), dense.norm() + 1.0);
        assert_eq!(roots.len(), N, "{h}");
        for (a, b) in ev.iter().zip(&roots) {
            assert!((a - b).abs() <= 1e-12, "N={N}: {ev:?} vs {roots:?}");
        }
        checked += 1;
    }
}

#[test]
fn eigenvalues_match_characteristic_polynomial_roots() {
    check_against_polynomial::<2>(1);
    check_against_polynomial::<3>(2);
    check_against_polynomial::<4>(3);
}

#[test]
fn eigenvalues_of_simple_states() {
    let id = SMatrix::<Complex64, 3, 3>::identity();
    assert_eq!(hermitian_eigenvalues(&id).unwrap(), [1.0, 1.0, 1.0]);
    let ev = DensityMatrix::superposition_e1_e2().eigenvalues();
    assert!(ev[0].abs() < 1e-15 && ev[1].abs() < 1e-15 && (ev[2] - 1.0).abs() < 1e-15, "{ev:?}");
}

fn sum_and_product<const N: usize>(h: &SMatrix<Complex64, N, N>) {
    let ev = hermitian_eigenvalues(h).unwrap();
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    let trace = h.trace().re;
    assert!((ev.iter().sum::<f64>() - trace).abs() <= 1e-12, "{ev:?} trace {trace}");
    let det = DMatrix::from_fn(N, N, |i, j| h[(i, j)]).determinant().re;
    let product: f64 = ev.iter().product();
    let scale = ev.iter().map(|v| v.abs()).product::<f64>().max(1e-300);
    assert!((product - det).abs() <= 1e-10 * scale.max(det.abs()), "{product} vs {det}");
}

proptest! {
    #[test]
    fn eigenvalue_sum_and_product(seed in any::<u64>()) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        sum_and_product(&random_hermitian::<2>(&mut rng));
        sum_and_product(&random_hermitian::<3>(&mut rng));
        sum_and_product(&random_hermitian::<4>(&mut rng));
    }

    #[test]
    fn decay_blocks_lose_positivity_at_the_critical_coherence(n1 in 0.01f64..100.0, n2 in 0.01f64..100.0) {
        let pc = critical_coherence(n1, n2).unwrap().plus;
        let min_eig = |p: f64| min_decay_eigenvalue(&flat_decay(n1, n2, p));
        prop_assert!(min_eig(pc).abs() <= 1e-10, "{}", min_eig(pc));
        prop_assert!(min_eig(pc - 1e-3) >= 0.0);
        if pc + 1e-3 <= 1.0 {
            prop_assert!(min_eig(pc + 1e-3) < 0.0);
        }
    }

    #[test]
    fn constant_series_verdict_is_the_sign_test(n1 in 0.0f64..10.0, n2 in 0.0f64..10.0, p in -1.0f64..1.0) {
        let d = flat_decay(n1, n2, p);
        let series: Vec<_> = (0..5).map(|k| (k as f64, d)).collect();
        let verdict = markovianity_check(&series, 1e-9).unwrap();
        prop_assert_eq!(verdict.is_markovian, min_decay_eigenvalue(&d) >= -1e-9);
        prop_assert_eq!(verdict.min_decay_eigenvalue_over_time, min_decay_eigenvalue(&d));
    }
}

/// Decay matrix of unit flat couplings with the given occupations.
fn flat_decay(n1: f64, n2: f64, p: f64) -> DecayMatrix {
    let block = |a: f64, b: f64| [[[a, p * a], [p * a, a]], [[b, p * b], [p * b, b]]];
    let rates = RateSet::new([0.95, 1.05], block(n1, n2), block(n1 + 1.0, n2 + 1.0), RateTime::Infinite).unwrap();
    decay_matrix(&rates)
}

#[test]
fn critical_coherence_reference_values() {
    let fig3 = critical_coherence(0.630_632_470_531_490_4, 475.690_651_190_463_3).unwrap();
    assert!((fig3.plus - 0.0727).abs() < 5e-5, "{fig3:?}");
    assert!((fig3.unrooted - 0.00529).abs() < 5e-6, "{fig3:?}");
    let thermal = TemperatureProfile::constant(5.0).unwrap();
    let n = [photon_number(&thermal, 0.95).unwrap(), photon_number(&thermal, 1.05).unwrap()];
    assert!((n[0] - 4.779).abs() < 5e-4 && (n[1] - 4.2794).abs() < 5e-5, "{n:?}");
    let fig4 = critical_coherence(n[0], n[1]).unwrap();
    assert!((fig4.plus - 0.99847).abs() < 1e-5, "{fig4:?}");
    assert_eq!(critical_coherence(3.0, 3.0).unwrap().overall, 1.0);
    assert_eq!(critical_coherence(0.0, 0.0).unwrap().plus, 1.0);
    assert!(critical_coherence(-1.0, 2.0).is_err());
}

#[test]
fn block_determinant_cases() {
    let equal = flat_decay(2.0, 2.0, 1.0);
    assert_eq!(block_determinants(&equal), (0.0, 0.0));
    let diagonal = flat_decay(2.0, 3.0, 0.0);
    assert_eq!(block_determinants(&diagonal), (6.0, 12.0));

    let spectrum = CouplingSpectrum::flat_band(0.0005, 0.0005, 20.0, 1.0).unwrap();
    let profile = TemperatureProfile::two_step(1.0, 500.0, 1.0).unwrap();
    let (det_plus, det_minus) =
        block_determinants(&decay_matrix(&static_rates(&spectrum, &profile, 0.95, 1.05).unwrap()));
    assert!((det_plus / -1.41e-2 - 1.0).abs() < 5e-3, "{det_plus}");
    assert!(det_minus < 0.0);
}

fn markov2_generator(spectrum: &CouplingSpectrum, profile: &TemperatureProfile) -> Generator {
    let rates = static_rates(spectrum, profile, 0.95, 1.05).unwrap();
    let cfg = GeneratorConfig { mode: Mode::Markov2, secular: false, include_hc: true };
    Generator::new(SystemSpec::new(0.95, 1.05).unwrap(), cfg, RateSource::Static(rates)).unwrap()
}

#[test]
fn markovianity_verdicts() {
    let thermal = TemperatureProfile::constant(5.0).unwrap();
    let at = |g: &Generator| vec![(0.0, g.effective_decay(0.0).unwrap())];
    let p0 = markov2_generator(&CouplingSpectrum::flat_band(0.01, 0.01, 20.0, 0.0).unwrap(), &thermal);
    assert!(markovianity_check(&at(&p0), 1e-9).unwrap().is_markovian);
    let p1 = markov2_generator(&CouplingSpectrum::flat_band(0.01, 0.01, 20.0, 1.0).unwrap(), &thermal);
    let verdict = markovianity_check(&at(&p1), 1e-9).unwrap();
    assert!(!verdict.is_markovian);
    assert_eq!(verdict.witness_time, Some(0.0));

    // Finite-time rates of the non-thermal ohmic bath at p = 0.
    let spectrum = CouplingSpectrum::ohmic(0.0005, 0.0005, 20.0, 0.0).unwrap();
    let profile = TemperatureProfile::two_step(1.0, 500.0, 1.0).unwrap();
    let table = Arc::new(
        RateTable::build(&spectrum, &profile, [0.95, 1.05], 0.05, 300.0, &QuadratureSettings::default()).unwrap(),
    );
    let cfg = GeneratorConfig { mode: Mode::Markov1, secular: false, include_hc: true };
    let generator =
        Generator::new(SystemSpec::new(0.95, 1.05).unwrap(), cfg, RateSource::TimeDependent(table.clone())).unwrap();
    let series: Vec<_> = (0..table.len())
        .map(|j| {
            let t = j as f64 * table.dt();
            (t, generator.effective_decay(t).unwrap())
        })
        .collect();
    let verdict = markovianity_check(&series, 1e-9).unwrap();
    assert!(!verdict.is_markovian);
    let witness = verdict.witness_time.unwrap();
    assert!(table.at(witness).unwrap().gamma_plus[0][0][0] < 0.0, "witness at {witness}");
}

#[test]
fn positivity_reports() {
    // Unitary evolution of a pure state never goes negative.
    let spec = SystemSpec::new(0.95, 1.05).unwrap();
    let cfg = GeneratorConfig { mode: Mode::Markov2, secular: false, include_hc: true };
    let unitary =
        Generator::new(spec, cfg, RateSource::Static(RateSet::zero([0.95, 1.05], RateTime::Infinite))).unwrap();
    let psi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.64), Complex64::new(0.48, 0.0)];
    // RK4 phase errors differ between the three coherences and split the
    // zero eigenvalues by about 1e-11 per unit time at Δt = 0.01.
    let config = IntegratorConfig { dt: 0.005, t_max: 30.0, record_every: 10 };
    let traj = evolve(&unitary, &DensityMatrix::pure(psi).unwrap(), &config).unwrap();
    let report = positivity_report(&traj, 1e-10).unwrap();
    assert_eq!((report.first_violation_time, report.violation_measure), (None, 0.0));

    // A trajectory whose minimum eigenvalue never drops below zero.
    let gibbs = markov2_generator(
        &CouplingSpectrum::flat_band(0.01, 0.01, 20.0, 0.0).unwrap(),
        &TemperatureProfile::constant(2.0).unwrap(),
    );
    let traj = evolve(
        &gibbs,
        &DensityMatrix::new(nmbath::operators::Mat3::identity() / Complex64::new(3.0, 0.0)).unwrap(),
        &config,
    )
    .unwrap();
    assert!(traj.diagnostics.iter().all(|d| d.min_eig_rho >= 0.0));
    let report = positivity_report(&traj, 0.0).unwrap();
    assert_eq!((report.first_violation_time, report.violation_measure), (None, 0.0));

    // The non-thermal flat band at p = 1 violates positivity for a long time.
    let scenario = cli::preset("fig3").unwrap();
    let generator = cli::build_generator(&scenario).unwrap();
    let config = IntegratorConfig { t_max: 300.0, ..scenario.integrator };
    let traj = evolve(&generator, &scenario.initial.density_matrix(), &config).unwrap();
    let report = positivity_report(&traj, 1e-9).unwrap();
    assert!(report.first_violation_time.unwrap() < 1.0);
    assert!(report.violation_measure > 250.0 && report.max_violation_magnitude > 1e-3, "{report:?}");
}
