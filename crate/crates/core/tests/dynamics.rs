//! Generator and integrator against closed-form and independent solutions.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use nmbath::cli;
use nmbath::evolve::{evolve, rk4_step, steady_state_markov2, IntegratorConfig};
use nmbath::generator::{DensityMatrix, Generator, GeneratorConfig, Mode, RateSource, SystemSpec};
use nmbath::operators::Mat3;
use nmbath::rates::{static_rates, QuadratureSettings, RateSet, RateTable, RateTime};
use nmbath::spectra::{photon_number, CouplingSpectrum, TemperatureProfile};
use nmbath::Error;

const EPS: [f64; 2] = [0.95, 1.05];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn markov2(spectrum: &CouplingSpectrum, profile: &TemperatureProfile, secular: bool) -> Generator {
    let rates = static_rates(spectrum, profile, EPS[0], EPS[1]).unwrap();
    let cfg = GeneratorConfig { mode: Mode::Markov2, secular, include_hc: true };
    Generator::new(SystemSpec::new(EPS[0], EPS[1]).unwrap(), cfg, RateSource::Static(rates)).unwrap()
}

fn diagonal_state(p: [f64; 3]) -> DensityMatrix {
    DensityMatrix::new(Mat3::from_diagonal(&Vector3::new(c(p[0]), c(p[1]), c(p[2])))).unwrap()
}

/// `x' = M x` for `x = (ρ_gg, ρ_11, ρ_22)` with rates from the spectrum and
/// occupation directly: `ρ̇_nn = J ñ ρ_gg − J (ñ+1) ρ_nn`.
fn classical_rate_matrix(spectrum: &CouplingSpectrum, profile: &TemperatureProfile) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for n in 1..=2 {
        let w = EPS[n - 1];
        let up = spectrum.coupling(n, n, w) * photon_number(profile, w).unwrap();
        let down = spectrum.coupling(n, n, w) * (photon_number(profile, w).unwrap() + 1.0);
        m[(n, 0)] += up;
        m[(0, 0)] -= up;
        m[(n, n)] -= down;
        m[(0, n)] += down;
    }
    m
}

/// Equal superposition of all three levels.
fn all_levels() -> DensityMatrix {
    let a = c(1.0 / 3f64.sqrt());
    DensityMatrix::pure([a, a, a]).unwrap()
}

#[test]
fn populations_match_matrix_exponential() {
    let cases = [
        (CouplingSpectrum::flat_band(0.01, 0.01, 20.0, 0.0).unwrap(), TemperatureProfile::constant(5.0).unwrap()),
        (
            CouplingSpectrum::ohmic(0.002, 0.004, 20.0, 0.0).unwrap(),
            TemperatureProfile::two_step(1.0, 50.0, 1.0).unwrap(),
        ),
    ];
    for (spectrum, profile) in cases {
        let x0 = Vector3::new(0.2, 0.5, 0.3);
        let generator = markov2(&spectrum, &profile, false);
        let config = IntegratorConfig { dt: 0.05, t_max: 300.0, record_every: 40 };
        let traj = evolve(&generator, &diagonal_state([x0[0], x0[1], x0[2]]), &config).unwrap();
        let m = classical_rate_matrix(&spectrum, &profile);
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let x = (m * *t).exp() * x0;
            let pops = rho.populations();
            for k in 0..3 {
                assert!((pops[k] - x[k]).abs() <= 1e-6, "t={t} k={k}: {} vs {}", pops[k], x[k]);
            }
            let off = rho.matrix()[(1, 2)].norm() + rho.matrix()[(0, 1)].norm() + rho.matrix()[(0, 2)].norm();
            assert!(off <= 1e-12, "t={t}: coherence {off:e}");
        }
    }
}

#[test]
fn steady_state_matches_long_time_evolution() {
    let spectrum = CouplingSpectrum::ohmic(0.01, 0.01, 20.0, 0.0).unwrap();
    let profile = TemperatureProfile::two_step(1.0, 500.0, 1.0).unwrap();
    let generator = markov2(&spectrum, &profile, false);
    let steady = steady_state_markov2(&generator).unwrap();
    let config = IntegratorConfig { dt: 0.05, t_max: 1500.0, record_every: 1000 };
    let last = *evolve(&generator, &DensityMatrix::superposition_e1_e2(), &config).unwrap().last_state().unwrap();
    let diff = (last.matrix() - steady.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff <= 1e-6, "{diff:e}");

    // Two effective temperatures: ρ_nn/ρ_gg = ñ_n/(ñ_n+1) at each level.
    let pops = steady.populations();
    for n in 1..=2 {
        let occ = photon_number(&profile, EPS[n - 1]).unwrap();
        assert!((pops[n] / pops[0] - occ / (occ + 1.0)).abs() <= 1e-10);
    }
}

#[test]
fn rk4_is_fourth_order_on_the_thermal_preset() {
    let scenario = cli::preset("fig4").unwrap();
    let generator = cli::build_generator(&scenario).unwrap();
    // Ground coherences rotate at ε ≈ 1, which is what limits the step.
    let rho0 = all_levels();
    let end = |dt: f64| {
        // Short enough that the coherences have not yet relaxed away.
        let config = IntegratorConfig { dt, t_max: 40.0, record_every: usize::MAX };
        *evolve(&generator, &rho0, &config).unwrap().last_state().unwrap().matrix()
    };
    let (coarse, fine, reference) = (end(0.08), end(0.04), end(0.02));
    let err = |m: Mat3| (m - reference).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let ratio = err(coarse) / err(fine);
    assert!(ratio >= 14.0, "error ratio {ratio}");
    assert!(err(fine) > 1e-10, "error {:e} is at rounding level", err(fine));
}

#[test]
fn secular_generator_keeps_coherence_free_states_diagonal() {
    let spectrum = CouplingSpectrum::flat_band(0.01, 0.02, 20.0, 1.0).unwrap();
    let profile = TemperatureProfile::two_step(1.0, 500.0, 1.0).unwrap();
    let generator = markov2(&spectrum, &profile, true);
    let config = IntegratorConfig { dt: 0.01, t_max: 200.0, record_every: 50 };
    let traj = evolve(&generator, &diagonal_state([0.5, 0.3, 0.2]), &config).unwrap();
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let m = rho.matrix();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(m[(i, j)].norm() <= 1e-12, "t={t} ({i},{j}) = {}", m[(i, j)]);
        }
    }
    // Without the secular cut the same state picks up an e1-e2 coherence.
    let full = evolve(&markov2(&spectrum, &profile, false), &diagonal_state([0.5, 0.3, 0.2]), &config).unwrap();
    assert!(full.last_state().unwrap().matrix()[(1, 2)].norm() > 1e-6);
}

fn markov1(scenario: &nmbath::cli::Scenario, dt: f64, t_max: f64) -> Generator {
    let table = RateTable::build(
        &scenario.spectrum,
        &scenario.profile,
        scenario.system.levels(),
        dt,
        t_max,
        &QuadratureSettings::default(),
    )
    .unwrap();
    Generator::new(scenario.system, scenario.generator, RateSource::TimeDependent(Arc::new(table))).unwrap()
}

#[test]
fn markov1_starts_purely_unitary() {
    let scenario = cli::preset("fig5-nonthermal").unwrap();
    let generator = markov1(&scenario, 0.01, 1.0);
    let rho = *DensityMatrix::superposition_e1_e2().matrix();
    let h = scenario.system.hamiltonian();
    let unitary = (rho * h - h * rho) * Complex64::new(0.0, 1.0);
    assert_eq!(generator.apply(0.0, &rho).unwrap(), unitary);
    assert!(matches!(generator.apply(1.5, &rho), Err(Error::Range(_))));
    let config = IntegratorConfig { dt: 0.01, t_max: 2.0, record_every: 1 };
    assert!(matches!(evolve(&generator, &DensityMatrix::ground(), &config), Err(Error::Range(_))));
}

#[test]
fn markov1_dissipation_grows_quadratically_at_early_times() {
    let scenario = cli::preset("fig5-thermal").unwrap();
    let dt = 0.0005;
    let generator = markov1(&scenario, dt, 0.02);
    let unitary = Generator::new(
        scenario.system,
        GeneratorConfig { mode: Mode::Markov2, ..scenario.generator },
        RateSource::Static(RateSet::zero(EPS, RateTime::Infinite)),
    )
    .unwrap();
    let rho0 = *all_levels().matrix();
    let run = |g: &Generator, steps: usize| {
        let mut rho = rho0;
        for n in 0..steps {
            rho = rk4_step(g, n as f64 * dt, &rho, dt).unwrap();
        }
        rho
    };
    let norm = |m: Mat3| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dissipative = |steps| norm(run(&generator, steps) - run(&unitary, steps));
    let (a, b) = (dissipative(10), dissipative(20));
    assert!((3.5..4.5).contains(&(b / a)), "ratio {}", b / a);
    assert!(a < 1e-2 * norm(run(&unitary, 10) - rho0), "{a:e}");
}

#[test]
fn non_finite_state_is_reported_with_its_time() {
    let huge =
        RateSet::new(EPS, [[[1e300, 0.0], [0.0, 1e300]]; 2], [[[1e300, 0.0], [0.0, 1e300]]; 2], RateTime::Infinite)
            .unwrap();
    let cfg = GeneratorConfig { mode: Mode::Markov2, secular: false, include_hc: false };
    let generator = Generator::new(SystemSpec::new(EPS[0], EPS[1]).unwrap(), cfg, RateSource::Static(huge)).unwrap();
    let config = IntegratorConfig { dt: 0.01, t_max: 1.0, record_every: 1 };
    match evolve(&generator, &DensityMatrix::superposition_e1_e2(), &config) {
        Err(Error::Integration { time, .. }) => assert!(time > 0.0 && time <= 1.0),
        other => panic!("expected an integration failure, got {other:?}"),
    }
}
