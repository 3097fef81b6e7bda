//! Positivity and Markovianity analysis.
//!
//! A dissipator `Σ κ_mn (L_m ρ L_n† − ½{L_n† L_m, ρ})` generates completely
//! positive dynamics iff `κ ⪰ 0`. For time-dependent coefficients the same
//! test at every `t` decides divisibility, i.e. Markovianity. Here `κ` is the
//! block-diagonal `diag(D⁺, D⁻)` over `{τ⁺_1, τ⁺_2, τ⁻_1, τ⁻_2}`.

mod eigen;

pub use eigen::{eig2, eig2_real, hermitian_eigenvalues, jacobi_eigenvalues, HERMITIAN_TOL};

use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::rates::{DecayMatrix, Mat2};

/// Default threshold below which an eigenvalue counts as a violation.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - 0.25 * (m[0][1] + m[1][0]).powi(2)
}

/// `(det D⁺, det D⁻)`.
pub fn block_determinants(d: &DecayMatrix) -> (f64, f64) {
    (det2(&d.d_plus), det2(&d.d_minus))
}

/// Smallest eigenvalue of `diag(D⁺, D⁻)`.
pub fn min_decay_eigenvalue(d: &DecayMatrix) -> f64 {
    let ev = hermitian_eigenvalues(&d.full()).expect("decay matrix is real symmetric");
    ev[0]
}

/// Largest admissible coherence strength for each block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCoherence {
    /// `√(4 ñ₁ñ₂ / (ñ₁+ñ₂)²)`.
    pub plus: f64,
    /// `√(4 (ñ₁+1)(ñ₂+1) / (ñ₁+ñ₂+2)²)`.
    pub minus: f64,
    /// `min(plus, minus)`.
    pub overall: f64,
    /// `4 ñ₁ñ₂ / (ñ₁+ñ₂)²` without the square root, for comparison.
    pub unrooted: f64,
}

fn coherence_bound(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        return 1.0;
    }
    // 2√(ab)/(a+b) ≤ 1 by AM-GM; clamp the rounding.
    (2.0 * (a * b).sqrt() / (a + b)).min(1.0)
}

/// The coherence strength at which each block of `D` (flat couplings at the
/// two levels) loses positive semidefiniteness.
pub fn critical_coherence(n1: f64, n2: f64) -> Result<CriticalCoherence> {
    if !(n1.is_finite() && n2.is_finite() && n1 >= 0.0 && n2 >= 0.0) {
        return Err(Error::Domain(format!("occupations must be finite and non-negative, got ({n1}, {n2})")));
    }
    let plus = coherence_bound(n1, n2);
    let minus = coherence_bound(n1 + 1.0, n2 + 1.0);
    let unrooted = if n1 + n2 == 0.0 { 1.0 } else { plus * plus };
    Ok(CriticalCoherence { plus, minus, overall: plus.min(minus), unrooted })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovianityVerdict {
    pub is_markovian: bool,
    pub min_decay_eigenvalue_over_time: f64,
    /// Time of the most negative eigenvalue when the verdict is negative.
    pub witness_time: Option<f64>,
    pub tolerance: f64,
}

/// Sign test of `D(t)` over a time series.
pub fn markovianity_check(series: &[(f64, DecayMatrix)], tolerance: f64) -> Result<MarkovianityVerdict> {
    if series.is_empty() {
        return Err(Error::Contract("markovianity check needs at least one time point".into()));
    }
    let (mut worst_t, mut worst) = (series[0].0, f64::INFINITY);
    for (t, d) in series {
        let ev = min_decay_eigenvalue(d);
        if ev < worst {
            worst = ev;
            worst_t = *t;
        }
    }
    let is_markovian = worst >= -tolerance;
    Ok(MarkovianityVerdict {
        is_markovian,
        min_decay_eigenvalue_over_time: worst,
        witness_time: (!is_markovian).then_some(worst_t),
        tolerance,
    })
}

/// Counts of the eigenvalue signs of one 2×2 block over a series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BlockSignature {
    /// One positive and one negative eigenvalue.
    pub indefinite: usize,
    /// Both eigenvalues ≥ −tolerance.
    pub semidefinite: usize,
    /// Both eigenvalues < −tolerance.
    pub negative: usize,
}

/// Classify each block of `D(t)` at every sample.
pub fn block_signatures(series: &[(f64, DecayMatrix)], tolerance: f64) -> (BlockSignature, BlockSignature) {
    let classify = |sig: &mut BlockSignature, m: &Mat2| {
        let [lo, hi] = eig2_real(m);
        if lo >= -tolerance {
            sig.semidefinite += 1;
        } else if hi > tolerance {
            sig.indefinite += 1;
        } else {
            sig.negative += 1;
        }
    };
    let mut plus = BlockSignature::default();
    let mut minus = BlockSignature::default();
    for (_, d) in series {
        classify(&mut plus, &d.d_plus);
        classify(&mut minus, &d.d_minus);
    }
    (plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    pub first_violation_time: Option<f64>,
    /// `max(0, −min_t λ_min(ρ(t)))`.
    pub max_violation_magnitude: f64,
    /// Total time during which `λ_min(ρ) < −tolerance`.
    pub violation_measure: f64,
    pub tolerance: f64,
    /// Time of the last violating sample.
    pub last_violation_time: Option<f64>,
}

/// Scan `λ_min(ρ(t))` along a trajectory.
///
/// Each sample stands for the half-intervals to its neighbours, so a
/// violation at a single interior sample contributes one record spacing.
pub fn positivity_report(trajectory: &Trajectory, tolerance: f64) -> Result<PositivityReport> {
    let times = &trajectory.times;
    if times.is_empty() {
        return Err(Error::Contract("positivity report needs a non-empty trajectory".into()));
    }
    let n = times.len();
    let weight = |i: usize| {
        let left = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
        let right = if i + 1 < n { times[i + 1] - times[i] } else { 0.0 };
        0.5 * (left + right)
    };
    let mut report = PositivityReport {
        first_violation_time: None,
        max_violation_magnitude: 0.0,
        violation_measure: 0.0,
        tolerance,
        last_violation_time: None,
    };
    for (i, diag) in trajectory.diagnostics.iter().enumerate() {
        let ev = diag.min_eig_rho;
        report.max_violation_magnitude = report.max_violation_magnitude.max(-ev);
        if ev < -tolerance {
            report.first_violation_time.get_or_insert(times[i]);
            report.last_violation_time = Some(times[i]);
            report.violation_measure += weight(i);
        }
    }
    Ok(report)
}
