//! Small dense complex linear algebra, polynomial roots, quadrature and phase unwinding.

pub mod eig;
pub mod matrix;
pub mod phase;
pub mod poly;
pub mod quad;
pub mod svd;

pub use eig::{complex_eig, herm_eig, EigPair, HermEig};
pub use matrix::{c, pauli, CMatrix};
pub use phase::unwind_phase;
pub use poly::{poly_roots, ScalarPolynomial};
pub use quad::{quad_2d, QuadOptions, QuadResult};
pub use svd::{min_singular, norm2, null_vector};
