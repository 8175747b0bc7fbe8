//! Symmetric scattering tensor fields: lifts to the cosphere bundle, the
//! symmetrized covariant derivative, and the gauge normalization killing
//! transversal components.

pub mod derivative;
pub mod field;
pub mod gauge;
pub mod sym;

pub use derivative::{sym_derivative_at, sym_derivative_cap, sym_derivative_collar, DerivedField};
pub use field::{CollarFrameField, CollarScalar, GaussianRadial, MetricField, TensorField};
pub use gauge::{gauge_normalize, GaugePotential, GaugeReport};
pub use sym::SymTensor;

use crate::dynamics::phase::Chart;
use crate::dynamics::PhasePoint;
use crate::geometry::MetricModel;
use crate::num::linalg::{bmat_inv, bmat_mulvec, cmat_inv, cmat_mulvec};

/// Lift `π*_m f` evaluated at a flow state: `f(ξ^♯, ..., ξ^♯)`.
///
/// In the collar the dual `ξ^♯ = ξ̄₀ E₀ + ρ(h⁻¹η)ᵢ Eᵢ` is contracted with
/// the frame components, so the lift stays smooth up to ρ = 0; in the cap
/// the coordinate dual `G⁻¹ξ` is used.
pub fn lift_state(model: &MetricModel, f: &dyn TensorField, chart: Chart, s: &[f64]) -> f64 {
    match chart {
        Chart::Collar => {
            let d = model.boundary_dim();
            let rho = s[0];
            let y = [s[2], s[3]];
            let eta = [s[4], s[5]];
            let h = model.collar_jet1(rho, &y).h;
            let w = bmat_inv(&h, d);
            let weta = bmat_mulvec(&w, &eta, d);
            let mut u = [0.0; 3];
            u[0] = s[1];
            for i in 0..d {
                u[1 + i] = rho * weta[i];
            }
            f.collar_value(model, rho, &y).eval_power(&u)
        }
        Chart::Cap => {
            let n = model.dim();
            let u_pt = [s[0], s[1], s[2]];
            let xi = [s[3], s[4], s[5]];
            let (g, _) = model.cap_metric_jet1(&u_pt);
            let w = cmat_inv(&g, n);
            let v = cmat_mulvec(&w, &xi, n);
            f.cap_value(model, &u_pt).eval_power(&v)
        }
    }
}

/// Lift at a phase point.
pub fn lift(model: &MetricModel, f: &dyn TensorField, z: &PhasePoint) -> f64 {
    lift_state(model, f, z.chart(), &z.to_state())
}
