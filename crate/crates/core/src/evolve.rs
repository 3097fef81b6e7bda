//! Fixed-step RK4 integration of the density-matrix equation and the
//! stationary state of constant generators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::diagnostics::{block_determinants, min_decay_eigenvalue};
use crate::error::{Error, Result};
use crate::generator::{DensityMatrix, Generator, Mode};
use crate::operators::Mat3;
use crate::rates::RateSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Record every n-th step; the final step is always recorded.
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { dt: 0.01, t_max: 600.0, record_every: 10 }
    }
}

impl IntegratorConfig {
    /// Largest `ε₂ Δt` accepted; keeps the unitary phase well resolved.
    pub const MAX_PHASE_STEP: f64 = 0.1;

    /// Check the step against the level energies and return the step count.
    pub fn validate(&self, eps2: f64) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config("integrator.dt", format!("must be positive, got {}", self.dt)));
        }
        if self.dt * eps2 > Self::MAX_PHASE_STEP * (1.0 + 1e-12) {
            return Err(Error::config(
                "integrator.dt",
                format!("{} exceeds {}/eps2 = {}", self.dt, Self::MAX_PHASE_STEP, Self::MAX_PHASE_STEP / eps2),
            ));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::config("integrator.t_max", format!("must be positive, got {}", self.t_max)));
        }
        if self.record_every == 0 {
            return Err(Error::config("integrator.record_every", "must be at least 1"));
        }
        let steps = (self.t_max / self.dt).round();
        if steps < 1.0 || (steps * self.dt - self.t_max).abs() > 1e-9 * self.t_max {
            return Err(Error::config("integrator.t_max", "must be a whole number of steps"));
        }
        Ok(steps as usize)
    }

    /// Time of step `n`.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}

/// Per-record diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub populations: [f64; 3],
    pub min_eig_rho: f64,
    pub det_d_plus: f64,
    pub det_d_minus: f64,
    pub min_eig_d: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Rates in effect at each record, for time-dependent generators.
    pub rate_samples: Option<Vec<RateSet>>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }
}

fn diagnose(generator: &Generator, t: f64, rho: &DensityMatrix) -> Result<Diagnostics> {
    let d = generator.effective_decay(t)?;
    let (det_d_plus, det_d_minus) = block_determinants(&d);
    Ok(Diagnostics {
        populations: rho.populations(),
        min_eig_rho: rho.eigenvalues()[0],
        det_d_plus,
        det_d_minus,
        min_eig_d: min_decay_eigenvalue(&d),
        trace_error: rho.trace_error(),
        hermiticity_error: rho.hermiticity_error(),
    })
}

/// One classical Runge–Kutta step.
pub fn rk4_step(generator: &Generator, t: f64, rho: &Mat3, dt: f64) -> Result<Mat3> {
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let k1 = generator.apply(t, rho)?;
    let k2 = generator.apply(t + 0.5 * dt, &(rho + k1 * half))?;
    let k3 = generator.apply(t + 0.5 * dt, &(rho + k2 * half))?;
    let k4 = generator.apply(t + dt, &(rho + k3 * full))?;
    let two = Complex64::new(2.0, 0.0);
    Ok(rho + (k1 + k2 * two + k3 * two + k4) * Complex64::new(dt / 6.0, 0.0))
}

/// Integrate from `t = 0` to `config.t_max`.
pub fn evolve(generator: &Generator, rho0: &DensityMatrix, config: &IntegratorConfig) -> Result<Trajectory> {
    let steps = config.validate(generator.spec().eps2)?;
    if let Some(horizon) = generator.horizon() {
        if config.time(steps) > horizon * (1.0 + 1e-12) {
            return Err(Error::Range(format!(
                "evolution to t = {} exceeds the rate table horizon {horizon}",
                config.t_max
            )));
        }
    }
    let time_dependent = generator.config().mode == Mode::Markov1;
    let capacity = steps / config.record_every + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        rate_samples: time_dependent.then(|| Vec::with_capacity(capacity)),
        diagnostics: Vec::with_capacity(capacity),
    };
    let record = |traj: &mut Trajectory, t: f64, rho: DensityMatrix| -> Result<()> {
        traj.diagnostics.push(diagnose(generator, t, &rho)?);
        if let Some(samples) = traj.rate_samples.as_mut() {
            samples.push(generator.rates_at(t)?);
        }
        traj.times.push(t);
        traj.states.push(rho);
        Ok(())
    };

    let mut rho = *rho0.matrix();
    record(&mut traj, 0.0, *rho0)?;
    for n in 0..steps {
        let t = config.time(n);
        rho = rk4_step(generator, t, &rho, config.dt)?;
        if rho.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Integration { time: config.time(n + 1), message: "state became non-finite".into() });
        }
        if (n + 1) % config.record_every == 0 || n + 1 == steps {
            record(&mut traj, config.time(n + 1), DensityMatrix::from_matrix_unchecked(rho))?;
        }
    }
    Ok(traj)
}

/// Stationary state of a constant generator, from `L ρ = 0` with the
/// `ρ_gg` equation replaced by `tr ρ = 1`.
pub fn steady_state_markov2(generator: &Generator) -> Result<DensityMatrix> {
    if generator.config().mode != Mode::Markov2 {
        return Err(Error::Contract("steady state needs a constant (markov2) generator".into()));
    }
    let d = generator.effective_decay(0.0)?;
    if !(d.d_minus[0][0] > 0.0 && d.d_minus[1][1] > 0.0) {
        return Err(Error::Contract("steady state needs positive relaxation rates".into()));
    }
    let mut l = DMatrix::<Complex64>::zeros(9, 9);
    for col in 0..9 {
        let mut basis = Mat3::zeros();
        basis[(col / 3, col % 3)] = Complex64::new(1.0, 0.0);
        let image = generator.apply(0.0, &basis)?;
        for row in 0..9 {
            l[(row, col)] = image[(row / 3, row % 3)];
        }
    }
    let mut rhs = DVector::<Complex64>::zeros(9);
    for col in 0..9 {
        l[(0, col)] = Complex64::new(if col % 4 == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    rhs[0] = Complex64::new(1.0, 0.0);

    let scale = l.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lu = l.clone().lu();
    let x = lu
        .solve(&rhs)
        .filter(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::Singular("stationarity system has no unique solution".into()))?;
    let residual = (&l * &x - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = lu.u().diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if pivot <= 1e-14 * scale || residual > 1e-8 {
        return Err(Error::Singular(format!("degenerate generator (pivot {pivot:e})")));
    }
    let m = Mat3::from_fn(|i, j| x[3 * i + j]);
    let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}
