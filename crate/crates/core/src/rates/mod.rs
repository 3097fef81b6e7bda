//! Decay rates of the two transitions, the decay matrices `D±` built from
//! them, and the unitary correction `H_c`.
//!
//! Static (long-time) rates are `Γ⁺_mn(ω) = J_nm(ω) ñ(ω)` and
//! `Γ⁻_mn(ω) = J_mn(ω) (ñ(ω) + 1)`. Finite-time rates come from the bath
//! correlation kernels in [`kernel`].

mod filon;
pub mod kernel;

pub use filon::{NuGrid, QuadratureSettings};
pub use kernel::{gamma_zero, time_dependent_rates, BathKernel, KernelKind, RateTable};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{lowering, raising, Mat3, Mat4};
use crate::spectra::{photon_number, CouplingSpectrum, TemperatureProfile};

/// Real 2×2 matrix indexed by transition (0 ↔ `e_1`, 1 ↔ `e_2`).
pub type Mat2 = [[f64; 2]; 2];

const SYMMETRY_TOL: f64 = 1e-12;

/// Time at which a set of rates is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateTime {
    At(f64),
    Infinite,
}

/// `Γ±_mn(ω, t)` at the two transition frequencies.
///
/// `gamma_plus[i][m][n]` is `Γ⁺_{m+1,n+1}(ε_{i+1})`, likewise for
/// `gamma_minus`. Each 2×2 slice is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSet {
    pub eps: [f64; 2],
    pub gamma_plus: [Mat2; 2],
    pub gamma_minus: [Mat2; 2],
    pub time: RateTime,
}

fn is_symmetric(m: &Mat2) -> bool {
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    (m[0][1] - m[1][0]).abs() <= SYMMETRY_TOL * scale
}

impl RateSet {
    pub fn new(eps: [f64; 2], gamma_plus: [Mat2; 2], gamma_minus: [Mat2; 2], time: RateTime) -> Result<Self> {
        if gamma_plus.iter().chain(gamma_minus.iter()).any(|m| !is_symmetric(m)) {
            return Err(Error::Contract("rate matrices must be symmetric in the transition indices".into()));
        }
        if gamma_plus.iter().chain(gamma_minus.iter()).flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Contract("rates must be finite".into()));
        }
        Ok(RateSet { eps, gamma_plus, gamma_minus, time })
    }

    /// All rates zero (pure unitary dynamics).
    pub fn zero(eps: [f64; 2], time: RateTime) -> Self {
        RateSet { eps, gamma_plus: [[[0.0; 2]; 2]; 2], gamma_minus: [[[0.0; 2]; 2]; 2], time }
    }
}

/// Long-time rates at `ε_1` and `ε_2`.
pub fn static_rates(
    spectrum: &CouplingSpectrum,
    profile: &TemperatureProfile,
    eps1: f64,
    eps2: f64,
) -> Result<RateSet> {
    if !(eps1 > 0.0 && eps1 <= eps2) {
        return Err(Error::config("system", format!("need 0 < eps1 <= eps2, got ({eps1}, {eps2})")));
    }
    for (key, e) in [("system.eps1", eps1), ("system.eps2", eps2)] {
        if !spectrum.supports(e) {
            return Err(Error::config(
                key,
                format!("level {e} lies outside the spectrum support (0, {}]", spectrum.cutoff()),
            ));
        }
    }
    let eps = [eps1, eps2];
    let mut gamma_plus = [[[0.0; 2]; 2]; 2];
    let mut gamma_minus = [[[0.0; 2]; 2]; 2];
    for (i, &w) in eps.iter().enumerate() {
        let occupation = photon_number(profile, w)?;
        for m in 0..2 {
            for n in 0..2 {
                gamma_plus[i][m][n] = spectrum.coupling(n + 1, m + 1, w) * occupation;
                gamma_minus[i][m][n] = spectrum.coupling(m + 1, n + 1, w) * (occupation + 1.0);
            }
        }
    }
    RateSet::new(eps, gamma_plus, gamma_minus, RateTime::Infinite)
}

/// Which dissipator block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// Excitation channel, operators `τ⁺_n`.
    Plus,
    /// Relaxation channel, operators `τ⁻_n`.
    Minus,
}

/// Dissipator coefficients for the operator set `{τ⁺_1, τ⁺_2, τ⁻_1, τ⁻_2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayMatrix {
    pub d_plus: Mat2,
    pub d_minus: Mat2,
    pub time: RateTime,
}

impl DecayMatrix {
    pub fn block(&self, block: Block) -> &Mat2 {
        match block {
            Block::Plus => &self.d_plus,
            Block::Minus => &self.d_minus,
        }
    }

    /// Drop the cross-transition coefficients.
    pub fn secular(&self) -> Self {
        let strip = |m: &Mat2| [[m[0][0], 0.0], [0.0, m[1][1]]];
        DecayMatrix { d_plus: strip(&self.d_plus), d_minus: strip(&self.d_minus), time: self.time }
    }

    /// Block-diagonal 4×4 form `diag(D⁺, D⁻)`.
    pub fn full(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = Complex64::new(self.d_plus[i][j], 0.0);
                m[(i + 2, j + 2)] = Complex64::new(self.d_minus[i][j], 0.0);
            }
        }
        m
    }
}

/// `D±_mn = [Γ±_mn(ε_m) + Γ±_mn(ε_n)] / 2`.
pub fn decay_matrix(rates: &RateSet) -> DecayMatrix {
    let average = |g: &[Mat2; 2]| {
        let mut d = [[0.0; 2]; 2];
        for (m, row) in d.iter_mut().enumerate() {
            for (n, entry) in row.iter_mut().enumerate() {
                *entry = 0.5 * (g[m][m][n] + g[n][m][n]);
            }
        }
        d
    };
    DecayMatrix { d_plus: average(&rates.gamma_plus), d_minus: average(&rates.gamma_minus), time: rates.time }
}

/// Unitary correction
/// `H_c = Σ_mn (1/4i)[Γ⁺_mn(ε_m) − Γ⁺_mn(ε_n)] τ⁻_n τ⁺_m
///        + (1/4i)[Γ⁻_mn(ε_m) − Γ⁻_mn(ε_n)] τ⁺_n τ⁻_m`.
pub fn hc_hamiltonian(rates: &RateSet) -> Mat3 {
    let quarter_over_i = Complex64::new(0.0, -0.25);
    let mut h = Mat3::zeros();
    for m in 0..2 {
        for n in 0..2 {
            let dp = rates.gamma_plus[m][m][n] - rates.gamma_plus[n][m][n];
            let dm = rates.gamma_minus[m][m][n] - rates.gamma_minus[n][m][n];
            h += (lowering(n + 1) * raising(m + 1)) * (quarter_over_i * dp);
            h += (raising(n + 1) * lowering(m + 1)) * (quarter_over_i * dm);
        }
    }
    h
}
