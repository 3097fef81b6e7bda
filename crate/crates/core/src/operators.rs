//! Three-level operator algebra in the basis `(g, e_1, e_2)`.

use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64;

pub type Mat3 = Matrix3<Complex64>;
pub type Mat4 = Matrix4<Complex64>;

pub const GROUND: usize = 0;

/// Basis index of `|e_n⟩`, `n ∈ {1, 2}`.
pub fn excited(n: usize) -> usize {
    debug_assert!(n == 1 || n == 2);
    n
}

/// `|i⟩⟨j|` in the basis `(g, e_1, e_2)`.
pub fn ket_bra(i: usize, j: usize) -> Mat3 {
    let mut m = Mat3::zeros();
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

/// Raising operator `τ⁺_n = |e_n⟩⟨g|`.
pub fn raising(n: usize) -> Mat3 {
    ket_bra(excited(n), GROUND)
}

/// Lowering operator `τ⁻_n = |g⟩⟨e_n|`.
pub fn lowering(n: usize) -> Mat3 {
    ket_bra(GROUND, excited(n))
}

/// `ε_1 |e_1⟩⟨e_1| + ε_2 |e_2⟩⟨e_2|`.
pub fn system_hamiltonian(eps1: f64, eps2: f64) -> Mat3 {
    Mat3::from_diagonal(&nalgebra::Vector3::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(eps1, 0.0),
        Complex64::new(eps2, 0.0),
    ))
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_defect(m: &Mat3) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &Mat3, b: &Mat3) -> Mat3 {
    a * b - b * a
}

pub fn anticommutator(a: &Mat3, b: &Mat3) -> Mat3 {
    a * b + b * a
}
