//! Bath description: effective temperature profiles, the photon-number
//! distribution they induce, and the coupling-spectrum family `J_mn(ω)`.
//!
//! Frequencies and temperatures share one energy unit (`k_B = ħ = 1`).

use crate::error::{Error, Result};

/// Effective temperature `T(ω)` of the bath mode at frequency `ω`.
#[derive(Debug, Clone, PartialEq)]
pub enum TemperatureProfile {
    /// Thermal bath: every mode at the same temperature.
    Constant { temperature: f64 },
    /// `T1` on `0 < ω ≤ split`, `T2` above it.
    TwoStep { t1: f64, t2: f64, split: f64 },
    /// Piecewise-constant table of `(ω_i, T_i)`.
    ///
    /// `T_i` applies on `ω_i < ω ≤ ω_{i+1}`; the first temperature also
    /// covers everything at or below `ω_0` and the last one everything above
    /// the final breakpoint. `TwoStep { t1, t2, split }` is the table
    /// `[(0, t1), (split, t2)]`.
    Tabulated { breakpoints: Vec<(f64, f64)> },
}

/// Interval `(lo, hi]` on which a profile has one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePiece {
    pub lo: f64,
    pub hi: f64,
    pub temperature: f64,
}

fn check_temperature(key: &str, t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("temperature must be positive and finite, got {t}")))
    }
}

impl TemperatureProfile {
    pub fn constant(temperature: f64) -> Result<Self> {
        let p = TemperatureProfile::Constant { temperature };
        p.validate()?;
        Ok(p)
    }

    pub fn two_step(t1: f64, t2: f64, split: f64) -> Result<Self> {
        let p = TemperatureProfile::TwoStep { t1, t2, split };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let p = TemperatureProfile::Tabulated { breakpoints };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TemperatureProfile::Constant { temperature } => check_temperature("temperature.t", *temperature),
            TemperatureProfile::TwoStep { t1, t2, split } => {
                check_temperature("temperature.t1", *t1)?;
                check_temperature("temperature.t2", *t2)?;
                if !(split.is_finite() && *split > 0.0) {
                    return Err(Error::config("temperature.split", format!("split must be positive, got {split}")));
                }
                Ok(())
            }
            TemperatureProfile::Tabulated { breakpoints } => {
                if breakpoints.is_empty() {
                    return Err(Error::config("temperature.breakpoints", "table is empty"));
                }
                for (i, &(w, t)) in breakpoints.iter().enumerate() {
                    if !(w.is_finite() && w >= 0.0) {
                        return Err(Error::config(
                            format!("temperature.breakpoints[{i}]"),
                            format!("frequency must be finite and non-negative, got {w}"),
                        ));
                    }
                    check_temperature(&format!("temperature.breakpoints[{i}]"), t)?;
                }
                if breakpoints.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::config("temperature.breakpoints", "frequencies must be strictly increasing"));
                }
                Ok(())
            }
        }
    }

    /// `T(ω)`; boundary points belong to the lower interval.
    pub fn temperature_at(&self, omega: f64) -> f64 {
        match self {
            TemperatureProfile::Constant { temperature } => *temperature,
            TemperatureProfile::TwoStep { t1, t2, split } => {
                if omega <= *split {
                    *t1
                } else {
                    *t2
                }
            }
            TemperatureProfile::Tabulated { breakpoints } => {
                let idx = breakpoints.partition_point(|&(w, _)| w < omega);
                breakpoints[idx.saturating_sub(1)].1
            }
        }
    }

    /// Frequencies in `(0, upper)` at which the temperature may jump.
    pub fn discontinuities(&self, upper: f64) -> Vec<f64> {
        let raw: Vec<f64> = match self {
            TemperatureProfile::Constant { .. } => Vec::new(),
            TemperatureProfile::TwoStep { split, .. } => vec![*split],
            TemperatureProfile::Tabulated { breakpoints } => breakpoints.iter().skip(1).map(|&(w, _)| w).collect(),
        };
        raw.into_iter().filter(|&w| w > 0.0 && w < upper).collect()
    }

    /// Split `(0, upper]` into intervals of constant temperature.
    pub fn pieces(&self, upper: f64) -> Vec<ProfilePiece> {
        let mut edges = vec![0.0];
        edges.extend(self.discontinuities(upper));
        edges.push(upper);
        edges
            .windows(2)
            .map(|w| ProfilePiece {
                lo: w[0],
                hi: w[1],
                // Any interior point of the piece carries its temperature.
                temperature: self.temperature_at(0.5 * (w[0] + w[1])),
            })
            .collect()
    }

    /// Temperature of the modes just above zero frequency.
    pub fn temperature_near_zero(&self) -> f64 {
        match self {
            TemperatureProfile::Constant { temperature } => *temperature,
            TemperatureProfile::TwoStep { t1, .. } => *t1,
            TemperatureProfile::Tabulated { breakpoints } => breakpoints[0].1,
        }
    }
}

/// Planck occupation `1/(e^{ω/T} − 1)` for a single temperature.
pub fn planck(omega: f64, temperature: f64) -> f64 {
    1.0 / (omega / temperature).exp_m1()
}

/// Mean photon number `ñ(ω)` of the mode at `ω` under `profile`.
pub fn photon_number(profile: &TemperatureProfile, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("photon number is undefined at omega = {omega}; it requires omega > 0")));
    }
    Ok(planck(omega, profile.temperature_at(omega)))
}

/// Shape of the diagonal spectra `J_11`, `J_22`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumFamily {
    /// `J_nn(ω) = γ_n` on `(0, Ω_c]`.
    FlatBand { gamma1: f64, gamma2: f64, cutoff: f64 },
    /// `J_nn(ω) = λ_n ω` on `(0, Ω_c]`.
    Ohmic { lambda1: f64, lambda2: f64, cutoff: f64 },
}

/// Coupling spectra of the two transitions `g ↔ e_1`, `g ↔ e_2`, with the
/// cross spectrum fixed by the coherence strength `p`:
/// `J_12 = J_21 = p √(J_11 J_22)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpectrum {
    pub family: SpectrumFamily,
    pub p: f64,
}

impl CouplingSpectrum {
    pub fn new(family: SpectrumFamily, p: f64) -> Result<Self> {
        let s = CouplingSpectrum { family, p };
        s.validate()?;
        Ok(s)
    }

    pub fn flat_band(gamma1: f64, gamma2: f64, cutoff: f64, p: f64) -> Result<Self> {
        Self::new(SpectrumFamily::FlatBand { gamma1, gamma2, cutoff }, p)
    }

    pub fn ohmic(lambda1: f64, lambda2: f64, cutoff: f64, p: f64) -> Result<Self> {
        Self::new(SpectrumFamily::Ohmic { lambda1, lambda2, cutoff }, p)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, cutoff) = self.parameters();
        for (key, v) in [("spectrum.strength1", a), ("spectrum.strength2", b)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(key, format!("coupling strength must be non-negative, got {v}")));
            }
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::config("spectrum.cutoff", format!("cutoff must be positive, got {cutoff}")));
        }
        if !(self.p.is_finite() && self.p.abs() <= 1.0) {
            return Err(Error::config("spectrum.p", format!("coherence strength must lie in [-1, 1], got {}", self.p)));
        }
        Ok(())
    }

    fn parameters(&self) -> (f64, f64, f64) {
        match self.family {
            SpectrumFamily::FlatBand { gamma1, gamma2, cutoff } => (gamma1, gamma2, cutoff),
            SpectrumFamily::Ohmic { lambda1, lambda2, cutoff } => (lambda1, lambda2, cutoff),
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.parameters().2
    }

    pub fn is_flat_band(&self) -> bool {
        matches!(self.family, SpectrumFamily::FlatBand { .. })
    }

    /// Whether `ω` lies in the support `(0, Ω_c]`.
    pub fn supports(&self, omega: f64) -> bool {
        omega > 0.0 && omega <= self.cutoff()
    }

    fn diagonal(&self, n: usize, omega: f64) -> f64 {
        if !self.supports(omega) {
            return 0.0;
        }
        let (a, b, _) = self.parameters();
        let strength = if n == 1 { a } else { b };
        match self.family {
            SpectrumFamily::FlatBand { .. } => strength,
            SpectrumFamily::Ohmic { .. } => strength * omega,
        }
    }

    /// `J_mn(ω)` for `m, n ∈ {1, 2}`.
    ///
    /// # Panics
    /// If an index is not 1 or 2.
    pub fn coupling(&self, m: usize, n: usize, omega: f64) -> f64 {
        assert!((1..=2).contains(&m) && (1..=2).contains(&n), "transition index must be 1 or 2");
        if m == n {
            self.diagonal(m, omega)
        } else {
            self.p * (self.diagonal(1, omega) * self.diagonal(2, omega)).sqrt()
        }
    }

    /// `lim_{ω→0⁺} J_mn(ω)/ω` for the ohmic family; `None` for flat band,
    /// where `J ñ` diverges at zero frequency.
    pub fn slope_at_zero(&self, m: usize, n: usize) -> Option<f64> {
        match self.family {
            SpectrumFamily::Ohmic { lambda1, lambda2, .. } => Some(match (m, n) {
                (1, 1) => lambda1,
                (2, 2) => lambda2,
                _ => self.p * (lambda1 * lambda2).sqrt(),
            }),
            SpectrumFamily::FlatBand { .. } => None,
        }
    }
}

/// Symmetrized noise spectrum `S̄_mn(ω) = J_mn(ω) (ñ(ω) + ½)`.
pub fn noise_spectrum(
    spectrum: &CouplingSpectrum,
    profile: &TemperatureProfile,
    m: usize,
    n: usize,
    omega: f64,
) -> Result<f64> {
    let occupation = photon_number(profile, omega)?;
    Ok(spectrum.coupling(m, n, omega) * (occupation + 0.5))
}
