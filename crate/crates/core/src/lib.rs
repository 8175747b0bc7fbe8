//! Geodesic flow, X-ray transforms and lens data on asymptotically conic
//! Riemannian manifolds.
//!
//! A metric in normal form near the compactifying boundary,
//! `g = dρ²/ρ⁴ + h_ρ/ρ²`, is integrated as the rescaled flow of
//! `X̄ = ρ⁻²X` on the compactified unit cosphere bundle, where boundary
//! arrival becomes a regular event. On top of the flow the crate provides
//! curvature evaluation with decay-rate fits, symmetric tensor fields with
//! their lifts and gauge normalization, X-ray transforms `I_m` and
//! resolvents, the scattering map and renormalized length, linearized
//! (variational) flows, and Jacobi fields with conjugate-point detection.

pub mod error;
pub mod num;

pub mod geometry;
pub mod dynamics;
pub mod tensors;
pub mod transform;
pub mod lens;
pub mod jacobi;

pub use error::{Error, Result};
