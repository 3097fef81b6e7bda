//! Filon-type transform `F[g](s) = ∫ g(ν) e^{iνs} dν` for a real `g` that is
//! sampled on a frequency grid and taken to be piecewise linear between
//! samples. Each panel's oscillatory moment is integrated exactly, so the
//! error is the interpolation error of `g` alone, uniformly in `s`.
//!
//! The grid is a list of uniform segments. Segment edges sit on every
//! temperature discontinuity and on the cutoff; samples at a segment edge are
//! one-sided limits from inside that segment, so jumps are represented
//! exactly.

use num_complex::Complex64;

use crate::spectra::{CouplingSpectrum, TemperatureProfile};

/// Frequency-quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Panels across `(0, Ω_c]`, shared among segments by length.
    pub nu_panels: usize,
    /// Lower truncation for spectra whose `J ñ` diverges at zero.
    pub nu_floor: f64,
    /// Panels per decade in the geometric refinement above `nu_floor`.
    pub panels_per_decade: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { nu_panels: 4096, nu_floor: 1e-8, panels_per_decade: 256 }
    }
}

/// Uniform run of `panels` panels of width `h` starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub panels: usize,
    pub temperature: f64,
}

impl Segment {
    pub fn width(&self) -> f64 {
        (self.end - self.start) / self.panels as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.panels {
            self.end
        } else {
            self.start + k as f64 * self.width()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NuGrid {
    pub segments: Vec<Segment>,
}

/// Upper edge of the geometric refinement for flat-band spectra.
const REFINE_EDGE: f64 = 0.1;

impl NuGrid {
    pub fn new(spectrum: &CouplingSpectrum, profile: &TemperatureProfile, settings: &QuadratureSettings) -> Self {
        let cutoff = spectrum.cutoff();
        let per_unit = settings.nu_panels.max(1) as f64 / cutoff;
        let mut segments = Vec::new();
        for (idx, piece) in profile.pieces(cutoff).into_iter().enumerate() {
            let mut lo = piece.lo;
            if idx == 0 && spectrum.is_flat_band() {
                let edge = REFINE_EDGE.min(0.5 * piece.hi);
                let mut a = settings.nu_floor;
                while a < edge {
                    let b = (a * 10.0).min(edge);
                    segments.push(Segment {
                        start: a,
                        end: b,
                        panels: settings.panels_per_decade.max(1),
                        temperature: piece.temperature,
                    });
                    a = b;
                }
                lo = edge;
            }
            let panels = ((piece.hi - lo) * per_unit).round().max(1.0) as usize;
            segments.push(Segment { start: lo, end: piece.hi, panels, temperature: piece.temperature });
        }
        NuGrid { segments }
    }

    pub fn total_panels(&self) -> usize {
        self.segments.iter().map(|s| s.panels).sum()
    }

    /// Sample `g(ν, T_segment)` at every node, segment by segment.
    pub fn sample<F>(&self, g: F) -> Vec<Vec<f64>>
    where
        F: Fn(f64, f64) -> f64,
    {
        self.segments.iter().map(|seg| (0..=seg.panels).map(|k| g(seg.node(k), seg.temperature)).collect()).collect()
    }
}

/// `(e^x − 1 − x) / x²` for imaginary `x = iθ`: the weight of a half-hat
/// basis function against `e^{iθu}` on `u ∈ [0, 1]`.
pub(crate) fn half_hat_weight(theta: f64) -> Complex64 {
    let x = Complex64::new(0.0, theta);
    if theta.abs() < 0.5 {
        // Σ x^k / (k+2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..16 {
            term = term * x / (k as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (x.exp() - 1.0 - x) / (x * x)
    }
}

/// Nodes between exact phase re-evaluations in the recurrence.
const REANCHOR: usize = 256;

/// `F[g_w](s)` for each weight set `w` at every `s` in `s_values`.
///
/// `weights[w][seg][k]` is `g_w` at node `k` of segment `seg`. Returns
/// `out[w][j] = ∫ g_w(ν) e^{iνs_j} dν`.
pub fn transform(grid: &NuGrid, weights: &[Vec<Vec<f64>>], s_values: &[f64]) -> Vec<Vec<Complex64>> {
    use rayon::prelude::*;

    let nw = weights.len();
    let columns: Vec<Vec<Complex64>> = s_values
        .par_iter()
        .map(|&s| {
            let mut acc = vec![Complex64::new(0.0, 0.0); nw];
            let mut sums = vec![Complex64::new(0.0, 0.0); nw];
            for (si, seg) in grid.segments.iter().enumerate() {
                let h = seg.width();
                let theta = h * s;
                let w_left = half_hat_weight(theta);
                let w_right = half_hat_weight(-theta);
                let interior = w_left + w_right;
                let step = Complex64::from_polar(1.0, theta);
                let n = seg.panels;

                let seg_weights: Vec<&[f64]> = weights.iter().map(|w| &w[si][..]).collect();
                sums.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                let mut phase = Complex64::new(0.0, 0.0);
                for k in 0..=n {
                    if k % REANCHOR == 0 {
                        phase = Complex64::from_polar(1.0, s * seg.node(k));
                    }
                    for (sum, g) in sums.iter_mut().zip(&seg_weights) {
                        *sum += phase * g[k];
                    }
                    phase *= step;
                }
                let z_first = Complex64::from_polar(1.0, s * seg.start);
                let z_last = Complex64::from_polar(1.0, s * seg.end);
                for (w, wt) in weights.iter().enumerate() {
                    let g = &wt[si];
                    let first = g[0] * z_first;
                    let last = g[n] * z_last;
                    let inner = sums[w] - first - last;
                    acc[w] += h * (w_left * first + interior * inner + w_right * last);
                }
            }
            acc
        })
        .collect();

    (0..nw).map(|w| columns.iter().map(|c| c[w]).collect()).collect()
}
