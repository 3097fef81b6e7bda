//! Liouvillian of the three-level system in the Schrödinger picture:
//!
//! ```text
//! dρ/dt = i[ρ, H_S + H_c] + Σ_mn D⁺_mn (τ⁺_m ρ τ⁻_n − ½{τ⁻_n τ⁺_m, ρ})
//!                          + D⁻_mn (τ⁻_m ρ τ⁺_n − ½{τ⁺_n τ⁻_m, ρ})
//! ```
//!
//! with constant coefficients (Markov-2) or coefficients taken from
//! finite-time rates (Markov-1). The state is never projected or
//! renormalized.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{hermiticity_defect, system_hamiltonian, Mat3, GROUND};
use crate::rates::{decay_matrix, hc_hamiltonian, DecayMatrix, RateSet, RateTable};

/// Level energies; the ground state sits at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    pub eps1: f64,
    pub eps2: f64,
}

impl SystemSpec {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        if !(eps1.is_finite() && eps2.is_finite() && eps1 > 0.0 && eps1 <= eps2) {
            let key = if eps1.is_finite() && eps1 > 0.0 { "system.eps2" } else { "system.eps1" };
            return Err(Error::config(key, format!("need 0 < eps1 <= eps2, got ({eps1}, {eps2})")));
        }
        Ok(SystemSpec { eps1, eps2 })
    }

    /// `ε̄ = (ε₁ + ε₂)/2`.
    pub fn mean_energy(&self) -> f64 {
        0.5 * (self.eps1 + self.eps2)
    }

    pub fn levels(&self) -> [f64; 2] {
        [self.eps1, self.eps2]
    }

    pub fn hamiltonian(&self) -> Mat3 {
        system_hamiltonian(self.eps1, self.eps2)
    }
}

/// Tolerance for Hermiticity and unit trace at construction.
pub const STATE_TOL: f64 = 1e-12;

/// 3×3 density matrix in the basis `(g, e_1, e_2)`. Positivity is not
/// enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat3);

impl DensityMatrix {
    pub fn new(m: Mat3) -> Result<Self> {
        let rho = DensityMatrix(m);
        if !(rho.hermiticity_error() <= STATE_TOL) {
            return Err(Error::Contract(format!(
                "density matrix is not Hermitian (defect {:e})",
                rho.hermiticity_error()
            )));
        }
        if !(rho.trace_error() <= STATE_TOL) {
            return Err(Error::Contract(format!("density matrix trace is {}", m.trace().re)));
        }
        Ok(rho)
    }

    /// Wrap an evolved matrix without checks; drift is reported by diagnostics.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        DensityMatrix(m)
    }

    /// `|ψ⟩⟨ψ|` for the normalized `ψ`.
    pub fn pure(psi: [Complex64; 3]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Contract("state vector has zero norm".into()));
        }
        let v = nalgebra::Vector3::from_iterator(psi.iter().map(|z| z / norm));
        Self::new(v * v.adjoint())
    }

    pub fn ground() -> Self {
        DensityMatrix(crate::operators::ket_bra(GROUND, GROUND))
    }

    /// `(|e_1⟩ + |e_2⟩)/√2`.
    pub fn superposition_e1_e2() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::pure([Complex64::new(0.0, 0.0), one, one]).expect("normalized by construction")
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    pub fn trace_error(&self) -> f64 {
        (self.0.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_defect(&self.0)
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        crate::diagnostics::hermitian_eigenvalues(&h).expect("Hermitian part")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Constant coefficients from the long-time rates.
    Markov2,
    /// Coefficients from the finite-time rates `Γ(ω, t)`.
    Markov1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub mode: Mode,
    /// Drop every `m ≠ n` term, which also removes `H_c`.
    pub secular: bool,
    pub include_hc: bool,
}

/// `dρ/dt` for given coefficients.
///
/// Uses `τ⁺_m ρ τ⁻_n = ρ_gg |e_m⟩⟨e_n|`, `τ⁻_n τ⁺_m = δ_nm |g⟩⟨g|`,
/// `τ⁻_m ρ τ⁺_n = ρ_{e_m e_n} |g⟩⟨g|` and `τ⁺_n τ⁻_m = |e_n⟩⟨e_m|`.
pub fn lindblad_apply(rho: &Mat3, d: &DecayMatrix, h_total: &Mat3, secular: bool) -> Mat3 {
    let d = if secular { d.secular() } else { *d };
    let i = Complex64::new(0.0, 1.0);
    let mut out = (rho * h_total - h_total * rho) * i;

    // Excitation: ρ_gg Σ D⁺_mn |e_m⟩⟨e_n| − ½ (D⁺_11 + D⁺_22) {P_g, ρ}
    let rho_gg = rho[(GROUND, GROUND)];
    let half_out = 0.5 * (d.d_plus[0][0] + d.d_plus[1][1]);
    for m in 0..2 {
        for n in 0..2 {
            out[(m + 1, n + 1)] += rho_gg * d.d_plus[m][n];
        }
    }
    for k in 0..3 {
        out[(GROUND, k)] -= rho[(GROUND, k)] * half_out;
        out[(k, GROUND)] -= rho[(k, GROUND)] * half_out;
    }

    // Relaxation: Σ D⁻_mn ρ_{e_m e_n} P_g − ½ (Kρ + ρK), K = Σ D⁻_mn |e_n⟩⟨e_m|
    let mut feed = Complex64::new(0.0, 0.0);
    for m in 0..2 {
        for n in 0..2 {
            feed += rho[(m + 1, n + 1)] * d.d_minus[m][n];
        }
    }
    out[(GROUND, GROUND)] += feed;
    for r in 0..2 {
        for m in 0..2 {
            // K_{e_r, e_m} = D⁻_{m r}
            let k_rm = 0.5 * d.d_minus[m][r];
            for col in 0..3 {
                out[(r + 1, col)] -= rho[(m + 1, col)] * k_rm;
                out[(col, m + 1)] -= rho[(col, r + 1)] * k_rm;
            }
        }
    }
    out
}

/// Where the generator takes its rates from.
#[derive(Debug, Clone)]
pub enum RateSource {
    Static(RateSet),
    TimeDependent(Arc<RateTable>),
}

/// Time-parameterized map `ρ ↦ dρ/dt`.
#[derive(Debug, Clone)]
pub struct Generator {
    spec: SystemSpec,
    config: GeneratorConfig,
    source: RateSource,
    h_system: Mat3,
    fixed: Option<(DecayMatrix, Mat3)>,
}

impl Generator {
    pub fn new(spec: SystemSpec, config: GeneratorConfig, source: RateSource) -> Result<Self> {
        let h_system = spec.hamiltonian();
        let fixed = match (&source, config.mode) {
            (RateSource::Static(rates), Mode::Markov2) => Some(Self::assemble(&config, &h_system, rates)),
            (RateSource::TimeDependent(_), Mode::Markov1) => None,
            (RateSource::Static(_), Mode::Markov1) => {
                return Err(Error::config("generator.mode", "markov1 needs time-dependent rates"))
            }
            (RateSource::TimeDependent(_), Mode::Markov2) => {
                return Err(Error::config("generator.mode", "markov2 needs static rates"))
            }
        };
        Ok(Generator { spec, config, source, h_system, fixed })
    }

    fn assemble(config: &GeneratorConfig, h_system: &Mat3, rates: &RateSet) -> (DecayMatrix, Mat3) {
        let d = decay_matrix(rates);
        let h = if config.include_hc && !config.secular { h_system + hc_hamiltonian(rates) } else { *h_system };
        (d, h)
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn source(&self) -> &RateSource {
        &self.source
    }

    /// Last time at which the generator is defined.
    pub fn horizon(&self) -> Option<f64> {
        match &self.source {
            RateSource::Static(_) => None,
            RateSource::TimeDependent(table) => Some(table.t_max()),
        }
    }

    pub fn rates_at(&self, t: f64) -> Result<RateSet> {
        match &self.source {
            RateSource::Static(r) => Ok(r.clone()),
            RateSource::TimeDependent(table) => table.at(t),
        }
    }

    /// `(D(t), H_S + H_c(t))` as used by [`Generator::apply`].
    pub fn coefficients(&self, t: f64) -> Result<(DecayMatrix, Mat3)> {
        if let Some(fixed) = &self.fixed {
            return Ok(*fixed);
        }
        let rates = self.rates_at(t)?;
        Ok(Self::assemble(&self.config, &self.h_system, &rates))
    }

    /// Decay matrix that actually enters the dissipator.
    pub fn effective_decay(&self, t: f64) -> Result<DecayMatrix> {
        let (d, _) = self.coefficients(t)?;
        Ok(if self.config.secular { d.secular() } else { d })
    }

    pub fn apply(&self, t: f64, rho: &Mat3) -> Result<Mat3> {
        let (d, h) = self.coefficients(t)?;
        Ok(lindblad_apply(rho, &d, &h, self.config.secular))
    }
}
