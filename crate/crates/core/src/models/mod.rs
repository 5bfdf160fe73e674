//! Shipped models, their boundary-condition families and reproducible tables.

mod descriptor;
pub mod symbols;
pub mod tables;
mod verify;

pub use descriptor::{
    builtin, dirac, dirac_a_condition, dirac_decoupled_condition, dirac_interface, laplacian,
    laplacian_klm_condition, regularized_a_condition, regularized_dirac, shallow_water, BcFamily, Geometry,
    InterfaceData, ModelDescriptor, ModelKind, Params, BUILTIN_NAMES,
};
pub use verify::{verify_pair, BulkCheck, Correspondence, Status};
