//! Edge spectra of half-space and interface problems, their spectral flow,
//! and winding numbers of von Neumann unitaries.

pub mod bands;
pub mod spectrum;
pub mod winding;

pub use bands::{
    spectral_flow, spectral_flow_direct, track_bands, Crossing, DispersionBand, EdgeOptions, EdgeSpectrum, Endpoint,
    FlowResult, KSample,
};
pub use spectrum::{dirac_edge_band, dirac_touch_point, edge_eigenvalues, fiber_gap};
pub use winding::{phase_winding, relative_winding, winding, WindingResult};
