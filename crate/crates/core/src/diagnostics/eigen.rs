//! Eigenvalues of small Hermitian matrices.
//!
//! 2×2 and 3×3 use closed forms (3×3 falls back to Jacobi when two
//! eigenvalues nearly coincide); 4×4 (and the cross-check path for any size)
//! runs cyclic Jacobi on the real symmetric embedding
//! `[[Re M, −Im M], [Im M, Re M]]`, whose spectrum is that of `M` with every
//! eigenvalue doubled.

use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute Hermiticity tolerance, scaled by `max(1, max |m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

fn symmetrized<const N: usize>(m: &SMatrix<Complex64, N, N>) -> Result<SMatrix<Complex64, N, N>> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(defect <= HERMITIAN_TOL * scale) {
        return Err(Error::Contract(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    Ok((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Ascending eigenvalues of a Hermitian `N×N` matrix, `N ∈ {2, 3, 4}`.
pub fn hermitian_eigenvalues<const N: usize>(m: &SMatrix<Complex64, N, N>) -> Result<[f64; N]> {
    let h = symmetrized(m)?;
    let mut out = [0.0; N];
    match N {
        2 => out.copy_from_slice(&eig2(h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)])),
        3 => {
            let closed = eig3(&[
                [h[(0, 0)], h[(0, 1)], h[(0, 2)]],
                [h[(1, 0)], h[(1, 1)], h[(1, 2)]],
                [h[(2, 0)], h[(2, 1)], h[(2, 2)]],
            ]);
            // The arccos form loses about half the digits on close pairs.
            let spread = (closed[2] - closed[0]).abs().max(f64::MIN_POSITIVE);
            if (closed[1] - closed[0]).min(closed[2] - closed[1]) > 1e-3 * spread {
                out.copy_from_slice(&closed);
            } else {
                out.copy_from_slice(&jacobi_eigenvalues(&DMatrix::from_fn(N, N, |i, j| h[(i, j)])));
            }
        }
        4 => {
            let d = DMatrix::from_fn(N, N, |i, j| h[(i, j)]);
            out.copy_from_slice(&jacobi_eigenvalues(&d));
        }
        _ => return Err(Error::Contract(format!("unsupported matrix size {N}"))),
    }
    Ok(out)
}

/// `[[a, b], [b*, d]]`.
pub fn eig2(a: f64, d: f64, b: Complex64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b.norm());
    [mean - radius, mean + radius]
}

/// Real symmetric 2×2 block, ascending.
pub fn eig2_real(m: &[[f64; 2]; 2]) -> [f64; 2] {
    eig2(m[0][0], m[1][1], Complex64::new(0.5 * (m[0][1] + m[1][0]), 0.0))
}

fn eig3(a: &[[Complex64; 3]; 3]) -> [f64; 3] {
    let q = (a[0][0].re + a[1][1].re + a[2][2].re) / 3.0;
    let off = a[0][1].norm_sqr() + a[0][2].norm_sqr() + a[1][2].norm_sqr();
    let d0 = a[0][0].re - q;
    let d1 = a[1][1].re - q;
    let d2 = a[2][2].re - q;
    let p2 = (d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off) / 6.0;
    if p2 <= f64::MIN_POSITIVE {
        return [q; 3];
    }
    let p = p2.sqrt();
    // det(B) / (2 p³) for B = A − qI, which is real for Hermitian A.
    let det = d0 * d1 * d2 + 2.0 * (a[0][1] * a[1][2] * a[2][0]).re
        - d0 * a[1][2].norm_sqr()
        - d1 * a[0][2].norm_sqr()
        - d2 * a[0][1].norm_sqr();
    let r = (det / (2.0 * p * p2)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let middle = 3.0 * q - largest - smallest;
    let mut out = [smallest, middle, largest];
    out.sort_by(f64::total_cmp);
    out
}

/// Cyclic Jacobi on the real embedding; ascending eigenvalues of `m`.
pub fn jacobi_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let size = 2 * n;
    let mut a = DMatrix::<f64>::from_fn(size, size, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });

    let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for _sweep in 0..64 {
        let off: f64 = (0..size)
            .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * scale || scale == 0.0 {
            break;
        }
        for p in 0..size {
            for q in p + 1..size {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut diag: Vec<f64> = (0..size).map(|i| a[(i, i)]).collect();
    diag.sort_by(f64::total_cmp);
    // Each eigenvalue appears twice in the embedding.
    diag.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}
