//! Boundary manifolds, metric families in normal form, and curvature.

pub mod boundary;
pub mod curvature;
pub mod model;
pub mod perturbation;
pub mod profile;

pub use boundary::BoundaryManifold;
pub use model::{CollarJet1, CollarJet2, CollarMetric, Family, InteriorPatch, MetricModel};
pub use perturbation::{BoundaryScalar, BoundaryTensor, CapBump, CapTensor, CollarPerturbation, RhoCutoff};
pub use profile::{CapKind, WarpedProfile};
