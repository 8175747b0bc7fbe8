//! Boundary quadrature identities of the linearized scattering analysis.
//!
//! For a model pair agreeing to order m−1 with jet difference `T_m`,
//! evaluated along the boundary flow `e^{sH₀}(y₀, η₀)`:
//!
//! - energy row: `∫₀^π sin^m(s) H₀T_m ds` (vanishes when the scattering
//!   maps agree; equals `−dE·e_m(π)` as measured),
//! - cosine row: `∫₀^π cos(s) sin^{m+1}(s) T_m ds`,
//! - flow-direction row: `∫₀^π (sin^m − (m/2+1) sin^{m+2}) T_m ds`.
//!
//! For generic `T_m` these are the predicted ε^m-order scattering
//! differences; the identities assert their vanishing only for pairs with
//! equal lens data.

use crate::dynamics::linearized::ModelPair;
use crate::error::Result;
use crate::num::linalg::BVec;
use crate::num::quad;

#[derive(Clone, Debug)]
pub struct PerturbativeQuadratures {
    pub energy_row: f64,
    pub cosine_row: f64,
    pub direction_row: f64,
}

pub fn perturbative_identities(
    pair: &ModelPair,
    y0: &BVec,
    eta0: &BVec,
) -> Result<PerturbativeQuadratures> {
    pair.validate()?;
    let b = pair.g.boundary().clone();
    let m = pair.order as i32;
    let pi = std::f64::consts::PI;
    let energy_row = quad::integrate(
        |s| {
            let (ys, es) = b.exact_flow(y0, eta0, s);
            s.sin().powi(m) * pair.h0_tm(&ys, &es).unwrap_or(f64::NAN)
        },
        0.0,
        pi,
        1e-10,
        1e-12,
    )?;
    let cosine_row = quad::integrate(
        |s| {
            let (ys, es) = b.exact_flow(y0, eta0, s);
            s.cos() * s.sin().powi(m + 1) * pair.tm_value(&ys, &es).unwrap_or(f64::NAN)
        },
        0.0,
        pi,
        1e-11,
        1e-13,
    )?;
    let factor = pair.order as f64 / 2.0 + 1.0;
    let direction_row = quad::integrate(
        |s| {
            let (ys, es) = b.exact_flow(y0, eta0, s);
            (s.sin().powi(m) - factor * s.sin().powi(m + 2)) * pair.tm_value(&ys, &es).unwrap_or(f64::NAN)
        },
        0.0,
        pi,
        1e-11,
        1e-13,
    )?;
    Ok(PerturbativeQuadratures { energy_row, cosine_row, direction_row })
}
