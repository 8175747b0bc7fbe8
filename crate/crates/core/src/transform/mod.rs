//! X-ray transforms `I_m`, forward/backward resolvents, and the
//! near-boundary π-transform limits.

pub mod boundary_limit;

use crate::dynamics::flow::{integrate_flow, AccFn, FlowOptions};
use crate::dynamics::phase::{Chart, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::MetricModel;
use crate::num::linalg::BVec;
use crate::tensors::{lift_state, TensorField};

pub use boundary_limit::{boundary_pi_transform, i0_jet_probe, JetProbeRow, PiTransformResult};

/// One X-ray transform evaluation.
#[derive(Clone, Debug)]
pub struct XrayValue {
    pub entry_y: BVec,
    pub entry_eta: BVec,
    pub value: f64,
    pub tau_plus: f64,
    /// Crude quadrature error bound from the step tolerances.
    pub quad_error_estimate: f64,
}

/// The global boundary defining function at a flow state.
pub fn rho_global(model: &MetricModel, chart: Chart, s: &[f64]) -> f64 {
    match chart {
        Chart::Collar => s[0],
        Chart::Cap => {
            let r = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
            model.rho_global_of_r(r)
        }
    }
}

/// Integrand-side state with ρ clamped away from 0: stage evaluations of
/// endpoint quadrature rates would otherwise form `0·∞` at the faces (and
/// event location may overshoot to slightly negative ρ). The floor is far
/// below every tolerance, and minimal-decay integrands (`k+m−ℓ = 2`) still
/// evaluate to their correct finite endpoint limit.
pub fn floored_state(chart: Chart, s: &[f64]) -> ([f64; 6], f64) {
    let mut sf = [s[0], s[1], s[2], s[3], s[4], s[5]];
    match chart {
        Chart::Collar => {
            sf[0] = sf[0].max(1e-120);
            (sf, sf[0])
        }
        Chart::Cap => (sf, f64::NAN), // cap ρ computed by the caller; never near 0
    }
}

/// `ρ⁻² π*_m f` at a flow state, safe at the boundary faces.
pub fn xray_rate(model: &MetricModel, f: &dyn TensorField, chart: Chart, s: &[f64]) -> f64 {
    match chart {
        Chart::Collar => {
            let (sf, rho) = floored_state(chart, s);
            lift_state(model, f, chart, &sf) / (rho * rho)
        }
        Chart::Cap => {
            let rho = rho_global(model, chart, s);
            lift_state(model, f, chart, s) / (rho * rho)
        }
    }
}

fn integrability_check(f: &dyn TensorField) -> Result<()> {
    let ell = f.transversal_depth() as f64;
    if f.decay() + f.order() as f64 - ell < 2.0 {
        return Err(Error::DecayHypothesis(format!(
            "integrand needs k + m - l >= 2 (k={}, m={}, l={})",
            f.decay(),
            f.order(),
            ell
        )));
    }
    Ok(())
}

/// X-ray transform `I_m f` over the geodesic entering at `(y₀, η₀)`:
/// `∫₀^{τ⁺} ρ⁻² π*_m f dτ`, carried as a quadrature accumulator on the
/// flow state.
pub fn xray(
    model: &MetricModel,
    f: &dyn TensorField,
    y0: &BVec,
    eta0: &BVec,
    opts: &FlowOptions,
) -> Result<XrayValue> {
    let vals = xray_multi(model, &[f], y0, eta0, opts)?;
    Ok(XrayValue {
        entry_y: *y0,
        entry_eta: *eta0,
        value: vals.values[0],
        tau_plus: vals.tau_plus,
        quad_error_estimate: opts.rtol * vals.values[0].abs() + opts.atol * (1.0 + vals.tau_plus),
    })
}

pub struct XrayMulti {
    pub values: Vec<f64>,
    pub tau_plus: f64,
}

/// X-ray transforms of several fields along one shared geodesic.
pub fn xray_multi(
    model: &MetricModel,
    fields: &[&dyn TensorField],
    y0: &BVec,
    eta0: &BVec,
    opts: &FlowOptions,
) -> Result<XrayMulti> {
    for f in fields {
        integrability_check(*f)?;
    }
    let accs: Vec<AccFn> = fields
        .iter()
        .map(|f| {
            let f = *f;
            let b: AccFn = Box::new(move |chart, s: &[f64]| xray_rate(model, f, chart, s));
            b
        })
        .collect();
    let z0 = PhasePoint::entry(*y0, *eta0);
    let flow = integrate_flow(model, &z0, opts.tau_max, opts, &accs, &[])?;
    let tau_plus = flow.trajectory.arrival_tau().ok_or(Error::TrappedGeodesic)?;
    Ok(XrayMulti { values: flow.acc_end, tau_plus })
}

/// Forward/backward resolvent sample at an interior phase point.
#[derive(Clone, Debug)]
pub struct ResolventSample {
    pub u_plus: f64,
    pub u_minus: f64,
}

/// `u₊ = R₊π*_m f (z)` and `u₋ = R₋π*_m f (z)`; `u₊ − u₋` is the full-line
/// transform transported to z's geodesic.
pub fn resolvent(
    model: &MetricModel,
    f: &dyn TensorField,
    z: &PhasePoint,
    opts: &FlowOptions,
) -> Result<ResolventSample> {
    integrability_check(f)?;
    let mk = || -> Vec<AccFn> { vec![Box::new(move |chart, s: &[f64]| xray_rate(model, f, chart, s))] };
    let fwd = integrate_flow(model, z, opts.tau_max, opts, &mk(), &[])?;
    fwd.trajectory.arrival_tau().ok_or(Error::TrappedGeodesic)?;
    let bwd = integrate_flow(model, z, -opts.tau_max, opts, &mk(), &[])?;
    bwd.trajectory.arrival_tau().ok_or(Error::TrappedGeodesic)?;
    // the backward accumulator is ∫₀^{τ⁻} = −∫_{τ⁻}^0, which is R₋ directly
    Ok(ResolventSample { u_plus: fwd.acc_end[0], u_minus: bwd.acc_end[0] })
}

/// Entry data of the straight line in the Euclidean plane with signed
/// impact parameter `d` and closest-point direction `α`
/// (counter-clockwise motion).
pub fn plane_line_entry(alpha: f64, d: f64) -> (BVec, BVec) {
    let y0 = (alpha - std::f64::consts::FRAC_PI_2).rem_euclid(crate::geometry::boundary::TWO_PI);
    ([y0, 0.0], [d, 0.0])
}

/// Direct 1-D quadrature of a function along the plane line with impact
/// parameter `d`, closest point at angle `α`: the independent oracle path.
pub fn plane_line_integral(
    g: impl Fn(f64, f64) -> f64,
    alpha: f64,
    d: f64,
    half_length: f64,
) -> Result<f64> {
    let (sa, ca) = alpha.sin_cos();
    // x(s) = d·(cos α, sin α) + s·(−sin α, cos α)
    crate::num::quad::integrate(
        |s| g(d * ca - s * sa, d * sa + s * ca),
        -half_length,
        half_length,
        1e-12,
        1e-14,
    )
}
