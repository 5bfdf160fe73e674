//! Bulk and edge topological invariants of translation-invariant continuum Hamiltonians
//! in two dimensions: Chern numbers, von Neumann unitaries of boundary conditions,
//! their winding numbers, and the spectral flow of edge modes.

pub mod edge;
pub mod error;
pub mod extension;
pub mod models;
pub mod numerics;
pub mod symbol;

pub use error::{BecError, Result};
