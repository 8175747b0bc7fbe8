//! Lens data: the scattering map, the renormalized length with its
//! invariances, and the length variation against `I₂`.

pub mod length;
pub mod perturbative;
pub mod scattering;
pub mod variation;

pub use length::{
    bdf_change_check, euclidean_chord_regularized, lens_record, renormalized_length, BdfChangeCheck,
    LengthMethod, LensRecord,
};
pub use perturbative::{perturbative_identities, PerturbativeQuadratures};
pub use scattering::{
    scattering_jacobian_det, scattering_large_eta, scattering_map, ScatterPoint, ScatteringLimit,
};
pub use variation::{lens_variation, LensVariation};
