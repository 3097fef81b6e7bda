//! Bath correlation kernels and the finite-time decay rates built from them.
//!
//! With `g⁺ = J ñ`, `g⁻ = J (ñ + 1)` and `g⁰ = J`, the kernels are
//!
//! ```text
//! c⁺_mn(s) = (1/π) ∫₀^∞ g⁺_nm(ν) e^{+iνs} dν
//! c⁻_mn(s) = (1/π) ∫₀^∞ g⁻_mn(ν) e^{−iνs} dν
//! c⁰_mn(s) = (1/π) ∫₀^∞ g⁰_mn(ν) e^{+iνs} dν
//! ```
//!
//! and the rates are `Γ±_mn(ω, t) = Re ∫₀^t e^{∓iωs} c±_mn(s) ds`
//! (`Γ⁰` takes the `+` phase convention). The `1/π` prefactor is twice the
//! `1/2π` of the bare second-order expansion, which makes `Γ±(ω, t → ∞)`
//! equal the static rates `J ñ` and `J (ñ + 1)`.
//!
//! Kernels are sampled on `s_j = j Δs`; the `s` integral is a cumulative
//! trapezoid on that grid, with linear interpolation for off-grid times.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::filon::{transform, NuGrid, QuadratureSettings};
use super::{Mat2, RateSet, RateTime};
use crate::error::{Error, Result};
use crate::spectra::{planck, CouplingSpectrum, TemperatureProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `⟨B†_n(t) B_m(t−s)⟩`, weight `J ñ`.
    Plus,
    /// `⟨B_n(t) B†_m(t−s)⟩`, weight `J (ñ + 1)`.
    Minus,
    /// Bath-state independent part, weight `J`.
    Zero,
}

/// Index pairs stored per kernel; `J` is real symmetric so `(2,1)` is `(1,2)`.
const PAIRS: [(usize, usize); 3] = [(1, 1), (1, 2), (2, 2)];

fn pair_index(m: usize, n: usize) -> usize {
    match (m, n) {
        (1, 1) => 0,
        (1, 2) | (2, 1) => 1,
        (2, 2) => 2,
        _ => panic!("transition index must be 1 or 2"),
    }
}

#[derive(Debug, Clone)]
pub struct BathKernel {
    kind: KernelKind,
    ds: f64,
    samples: [Vec<Complex64>; 3],
}

fn weight(spectrum: &CouplingSpectrum, kind: KernelKind, m: usize, n: usize, nu: f64, temperature: f64) -> f64 {
    if nu <= 0.0 {
        // J ñ → slope · T as ν → 0⁺ for the ohmic family; J itself vanishes.
        return match (kind, spectrum.slope_at_zero(m, n)) {
            (KernelKind::Zero, _) | (_, None) => 0.0,
            (_, Some(slope)) => slope * temperature,
        };
    }
    let j = spectrum.coupling(m, n, nu);
    match kind {
        KernelKind::Plus => j * planck(nu, temperature),
        KernelKind::Minus => j * (planck(nu, temperature) + 1.0),
        KernelKind::Zero => j,
    }
}

fn grid_len(ds: f64, t_max: f64) -> Result<usize> {
    if !(ds.is_finite() && ds > 0.0) {
        return Err(Error::config("kernel.ds", format!("step must be positive, got {ds}")));
    }
    if !(t_max.is_finite() && t_max >= ds) {
        return Err(Error::config("kernel.t_max", format!("horizon must be at least one step, got {t_max}")));
    }
    Ok((t_max / ds - 1e-9).ceil() as usize + 1)
}

impl BathKernel {
    pub fn build(
        spectrum: &CouplingSpectrum,
        profile: &TemperatureProfile,
        kind: KernelKind,
        ds: f64,
        t_max: f64,
        settings: &QuadratureSettings,
    ) -> Result<Self> {
        Ok(Self::build_set(spectrum, profile, &[kind], ds, t_max, settings)?.remove(0))
    }

    /// Several kernels on one grid, sharing the oscillatory sums. Identical
    /// weight functions (e.g. all pairs at `p = 1` with equal strengths) are
    /// transformed once.
    pub fn build_set(
        spectrum: &CouplingSpectrum,
        profile: &TemperatureProfile,
        kinds: &[KernelKind],
        ds: f64,
        t_max: f64,
        settings: &QuadratureSettings,
    ) -> Result<Vec<Self>> {
        let len = grid_len(ds, t_max)?;
        let grid = NuGrid::new(spectrum, profile, settings);

        let mut unique: Vec<Vec<Vec<f64>>> = Vec::new();
        // slot[kind][pair] = index into `unique`, or None for a zero weight.
        let mut slots: Vec<[Option<usize>; 3]> = Vec::with_capacity(kinds.len());
        for &kind in kinds {
            let mut slot = [None; 3];
            for (p, &(m, n)) in PAIRS.iter().enumerate() {
                let w = grid.sample(|nu, t| weight(spectrum, kind, m, n, nu, t));
                if w.iter().flatten().all(|&v| v == 0.0) {
                    continue;
                }
                let idx = match unique.iter().position(|u| *u == w) {
                    Some(i) => i,
                    None => {
                        unique.push(w);
                        unique.len() - 1
                    }
                };
                slot[p] = Some(idx);
            }
            slots.push(slot);
        }

        let s_values: Vec<f64> = (0..len).map(|j| j as f64 * ds).collect();
        let transforms = transform(&grid, &unique, &s_values);

        Ok(kinds
            .iter()
            .zip(slots)
            .map(|(&kind, slot)| {
                let samples = slot.map(|idx| match idx {
                    None => vec![Complex64::new(0.0, 0.0); len],
                    Some(i) => transforms[i]
                        .iter()
                        .map(|z| {
                            let c = z / PI;
                            if kind == KernelKind::Minus {
                                c.conj()
                            } else {
                                c
                            }
                        })
                        .collect(),
                });
                BathKernel { kind, ds, samples }
            })
            .collect())
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn len(&self) -> usize {
        self.samples[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Last grid time.
    pub fn t_max(&self) -> f64 {
        (self.len() - 1) as f64 * self.ds
    }

    pub fn s(&self, j: usize) -> f64 {
        j as f64 * self.ds
    }

    /// `c_mn(s_j)`.
    pub fn sample(&self, m: usize, n: usize, j: usize) -> Complex64 {
        self.samples[pair_index(m, n)][j]
    }

    pub fn samples(&self, m: usize, n: usize) -> &[Complex64] {
        &self.samples[pair_index(m, n)]
    }

    fn phase_sign(&self) -> f64 {
        match self.kind {
            KernelKind::Plus | KernelKind::Zero => -1.0,
            KernelKind::Minus => 1.0,
        }
    }

    /// `Γ_mn(ω, s_j)` at every grid point.
    pub fn rate_curve(&self, m: usize, n: usize, omega: f64) -> Vec<f64> {
        let c = self.samples(m, n);
        let sign = self.phase_sign();
        let f = |j: usize| (Complex64::from_polar(1.0, sign * omega * self.s(j)) * c[j]).re;
        let mut out = Vec::with_capacity(c.len());
        let mut acc = 0.0;
        let mut prev = f(0);
        out.push(0.0);
        for j in 1..c.len() {
            let cur = f(j);
            acc += 0.5 * self.ds * (prev + cur);
            out.push(acc);
            prev = cur;
        }
        out
    }
}

/// Linear interpolation of a curve sampled on `t_j = j dt`.
pub(crate) fn interpolate(curve: &[f64], dt: f64, t: f64) -> Result<f64> {
    let t_last = (curve.len() - 1) as f64 * dt;
    if !(t >= 0.0) || t > t_last * (1.0 + 1e-12) {
        return Err(Error::Range(format!("t = {t} lies outside the tabulated range [0, {t_last}]")));
    }
    let x = t / dt;
    let j = (x.floor() as usize).min(curve.len() - 1);
    let frac = x - j as f64;
    if j + 1 >= curve.len() || frac <= 0.0 {
        return Ok(curve[j]);
    }
    Ok(curve[j] + frac * (curve[j + 1] - curve[j]))
}

/// `Γ_mn(ω, t)` for all index pairs from one kernel.
pub fn time_dependent_rates(kernel: &BathKernel, omega: f64, t: f64) -> Result<Mat2> {
    let mut out = [[0.0; 2]; 2];
    for &(m, n) in &PAIRS {
        let v = interpolate(&kernel.rate_curve(m, n, omega), kernel.ds(), t)?;
        out[m - 1][n - 1] = v;
        out[n - 1][m - 1] = v;
    }
    Ok(out)
}

/// `Γ⁰_mn(ω, t)`, which depends on the spectrum only.
pub fn gamma_zero(
    spectrum: &CouplingSpectrum,
    omega: f64,
    t: f64,
    ds: f64,
    settings: &QuadratureSettings,
) -> Result<Mat2> {
    if t == 0.0 {
        return Ok([[0.0; 2]; 2]);
    }
    // The bath state does not enter; any profile yields the same weights.
    let profile = TemperatureProfile::Constant { temperature: 1.0 };
    let kernel = BathKernel::build(spectrum, &profile, KernelKind::Zero, ds, t.max(ds), settings)?;
    time_dependent_rates(&kernel, omega, t)
}

/// `Γ±_mn(ε_i, t)` tabulated on the kernel grid, for time-dependent generators.
#[derive(Debug, Clone)]
pub struct RateTable {
    eps: [f64; 2],
    dt: f64,
    // [level][pair] curves
    plus: [[Vec<f64>; 3]; 2],
    minus: [[Vec<f64>; 3]; 2],
}

impl RateTable {
    pub fn build(
        spectrum: &CouplingSpectrum,
        profile: &TemperatureProfile,
        eps: [f64; 2],
        dt: f64,
        t_max: f64,
        settings: &QuadratureSettings,
    ) -> Result<Self> {
        let kernels =
            BathKernel::build_set(spectrum, profile, &[KernelKind::Plus, KernelKind::Minus], dt, t_max, settings)?;
        Ok(Self::from_kernels(&kernels[0], &kernels[1], eps))
    }

    pub fn from_kernels(plus: &BathKernel, minus: &BathKernel, eps: [f64; 2]) -> Self {
        assert_eq!(plus.kind(), KernelKind::Plus);
        assert_eq!(minus.kind(), KernelKind::Minus);
        assert_eq!(plus.len(), minus.len());
        let curves = |k: &BathKernel, w: f64| PAIRS.map(|(m, n)| k.rate_curve(m, n, w));
        RateTable { eps, dt: plus.ds(), plus: eps.map(|w| curves(plus, w)), minus: eps.map(|w| curves(minus, w)) }
    }

    pub fn eps(&self) -> [f64; 2] {
        self.eps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.plus[0][0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t_max(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    /// `Γ⁺_mn(ε_level, t_j)` on the grid (`level`, `m`, `n` 1-based).
    pub fn plus_curve(&self, level: usize, m: usize, n: usize) -> &[f64] {
        &self.plus[level - 1][pair_index(m, n)]
    }

    pub fn minus_curve(&self, level: usize, m: usize, n: usize) -> &[f64] {
        &self.minus[level - 1][pair_index(m, n)]
    }

    /// Rates at time `t`, linearly interpolated between grid points.
    pub fn at(&self, t: f64) -> Result<RateSet> {
        let mut gamma_plus = [[[0.0; 2]; 2]; 2];
        let mut gamma_minus = [[[0.0; 2]; 2]; 2];
        for level in 0..2 {
            for (p, &(m, n)) in PAIRS.iter().enumerate() {
                let gp = interpolate(&self.plus[level][p], self.dt, t)?;
                let gm = interpolate(&self.minus[level][p], self.dt, t)?;
                gamma_plus[level][m - 1][n - 1] = gp;
                gamma_plus[level][n - 1][m - 1] = gp;
                gamma_minus[level][m - 1][n - 1] = gm;
                gamma_minus[level][n - 1][m - 1] = gm;
            }
        }
        Ok(RateSet { eps: self.eps, gamma_plus, gamma_minus, time: RateTime::At(t) })
    }

    /// Rates at grid index `j`.
    pub fn at_index(&self, j: usize) -> RateSet {
        let mut gamma_plus = [[[0.0; 2]; 2]; 2];
        let mut gamma_minus = [[[0.0; 2]; 2]; 2];
        for level in 0..2 {
            for (p, &(m, n)) in PAIRS.iter().enumerate() {
                gamma_plus[level][m - 1][n - 1] = self.plus[level][p][j];
                gamma_plus[level][n - 1][m - 1] = self.plus[level][p][j];
                gamma_minus[level][m - 1][n - 1] = self.minus[level][p][j];
                gamma_minus[level][n - 1][m - 1] = self.minus[level][p][j];
            }
        }
        RateSet { eps: self.eps, gamma_plus, gamma_minus, time: RateTime::At(j as f64 * self.dt) }
    }
}
