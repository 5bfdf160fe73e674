//! Bulk symbols of the shipped models.

use num_complex::Complex64;

use crate::numerics::{pauli, CMatrix};
use crate::symbol::Symbol;

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `σ_x k1 − σ_y k2 + m σ_z`.
pub fn dirac(m: f64) -> Symbol {
    Symbol::new(2)
        .with_term(0, 0, pauli::sz().scale_re(m))
        .and_then(|s| s.with_term(1, 0, pauli::sx()))
        .and_then(|s| s.with_term(0, 1, pauli::sy().scale_re(-1.0)))
        .expect("Dirac coefficients are Hermitian")
}

/// `σ_x k1 − σ_y k2 + (m + ε|k|²) σ_z`.
pub fn regularized_dirac(m: f64, eps: f64) -> Symbol {
    let e = pauli::sz().scale_re(eps);
    dirac(m)
        .with_term(2, 0, e.clone())
        .and_then(|s| s.with_term(0, 2, e))
        .expect("regularized Dirac coefficients are Hermitian")
}

/// `k1² + k2²`.
pub fn laplacian() -> Symbol {
    let one = CMatrix::scalar(r(1.0));
    Symbol::new(1)
        .with_term(2, 0, one.clone())
        .and_then(|s| s.with_term(0, 2, one))
        .expect("Laplacian coefficients are Hermitian")
}

/// Rotating shallow water with odd viscosity, velocity components `(η, u, v)`.
pub fn shallow_water(f: f64, nu: f64) -> Symbol {
    let z = r(0.0);
    let i = Complex64::new(0.0, 1.0);
    let m = |rows: [[Complex64; 3]; 3]| CMatrix::from_rows(&rows.map(|row| row.to_vec())).unwrap();
    let k1 = m([[z, r(1.), z], [r(1.), z, z], [z, z, z]]);
    let k2 = m([[z, z, r(-1.)], [z, z, z], [r(-1.), z, z]]);
    let rot = m([[z, z, z], [z, z, i], [z, -i, z]]);
    Symbol::new(3)
        .with_term(1, 0, k1)
        .and_then(|s| s.with_term(0, 1, k2))
        .and_then(|s| s.with_term(0, 0, rot.scale_re(f)))
        .and_then(|s| s.with_term(2, 0, rot.scale_re(-nu)))
        .and_then(|s| s.with_term(0, 2, rot.scale_re(-nu)))
        .expect("shallow-water coefficients are Hermitian")
}
