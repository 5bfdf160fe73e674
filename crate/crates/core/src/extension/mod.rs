//! Boundary data for half-space and interface problems: decaying solutions,
//! boundary triples, boundary conditions and the von Neumann unitary.

pub mod condition;
pub mod deficiency;
pub mod problem;
pub mod triple;

pub use condition::{klm_to_ab, BoundaryCondition, Converter, Klm};
pub use deficiency::{decaying_basis_real, deficiency_basis, DeficiencyBasis, DeficiencyEntry, Side};
pub use problem::{
    affiliation_check, krein_q, weyl_w, AffiliationReport, BoundaryOperator, Direction, EdgeProblem, Verdict,
};
pub use triple::{
    dirac_halfline_triple, dirac_interface_triple, laplacian_triple, regularized_dirac_triple, BoundaryTriple,
    TripleKind,
};
