//! Phase points on the compactified unit cosphere bundle and chart state
//! conversions.
//!
//! Flow states are stored in fixed six-slot arrays shared by both charts:
//! collar `[ρ, ξ̄₀, y₁, y₂, η₁, η₂]`, cap `[u₁, u₂, u₃, ξ₁, ξ₂, ξ₃]`
//! (unused slots stay zero). Accumulator components are appended after the
//! first six.

use crate::error::{Error, Result};
use crate::geometry::boundary::BoundaryManifold;
use crate::geometry::MetricModel;
use crate::num::linalg::{bmat_inv, bquad, BVec, cmat_inv, cquad, CVec};

pub const STATE_W: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Collar,
    Cap,
}

/// A point of the compactified unit cosphere bundle.
#[derive(Clone, Copy, Debug)]
pub enum PhasePoint {
    Collar { rho: f64, y: BVec, xibar0: f64, eta: BVec },
    Cap { u: CVec, xi: CVec },
}

impl PhasePoint {
    /// Entry point on the incoming face `∂₋S*M = {ρ = 0, ξ̄₀ = +1}`.
    pub fn entry(y: BVec, eta: BVec) -> Self {
        PhasePoint::Collar { rho: 0.0, y, xibar0: 1.0, eta }
    }

    /// Collar point on the constraint surface: `ξ̄₀` is solved from
    /// `ξ̄₀² + ρ²|η|²_{h_ρ} = 1` with the requested sign (negative =
    /// outgoing).
    pub fn collar_on_shell(
        model: &MetricModel,
        rho: f64,
        y: BVec,
        eta: BVec,
        outgoing: bool,
    ) -> Result<Self> {
        let d = model.boundary_dim();
        let h = model.collar_jet1(rho, &y).h;
        let w = bmat_inv(&h, d);
        let rest = 1.0 - rho * rho * bquad(&w, &eta, &eta, d);
        if rest < 0.0 {
            return Err(Error::InvalidModel(format!(
                "no unit covector with this (rho, eta): 1 - rho^2|eta|^2 = {rest}"
            )));
        }
        let xibar0 = if outgoing { -rest.sqrt() } else { rest.sqrt() };
        Ok(PhasePoint::Collar { rho, y, xibar0, eta })
    }

    /// Reverse the fiber direction `(ξ̄₀, η) ↦ (−ξ̄₀, −η)`.
    pub fn reversed(&self) -> Self {
        match *self {
            PhasePoint::Collar { rho, y, xibar0, eta } => {
                PhasePoint::Collar { rho, y, xibar0: -xibar0, eta: [-eta[0], -eta[1]] }
            }
            PhasePoint::Cap { u, xi } => PhasePoint::Cap { u, xi: [-xi[0], -xi[1], -xi[2]] },
        }
    }

    pub fn chart(&self) -> Chart {
        match self {
            PhasePoint::Collar { .. } => Chart::Collar,
            PhasePoint::Cap { .. } => Chart::Cap,
        }
    }

    pub fn to_state(&self) -> [f64; STATE_W] {
        match *self {
            PhasePoint::Collar { rho, y, xibar0, eta } => [rho, xibar0, y[0], y[1], eta[0], eta[1]],
            PhasePoint::Cap { u, xi } => [u[0], u[1], u[2], xi[0], xi[1], xi[2]],
        }
    }

    pub fn from_state(chart: Chart, s: &[f64]) -> Self {
        match chart {
            Chart::Collar => PhasePoint::Collar {
                rho: s[0],
                xibar0: s[1],
                y: [s[2], s[3]],
                eta: [s[4], s[5]],
            },
            Chart::Cap => PhasePoint::Cap { u: [s[0], s[1], s[2]], xi: [s[3], s[4], s[5]] },
        }
    }

    /// Collar components, when in the collar chart.
    pub fn as_collar(&self) -> Option<(f64, BVec, f64, BVec)> {
        match *self {
            PhasePoint::Collar { rho, y, xibar0, eta } => Some((rho, y, xibar0, eta)),
            _ => None,
        }
    }
}

/// Hamiltonian constraint value `ξ̄₀² + ρ²|η|²_{h_ρ}` (collar) or
/// `|ξ|²_G` (cap); equals 1 on the unit bundle.
pub fn constraint_value(model: &MetricModel, chart: Chart, s: &[f64]) -> f64 {
    match chart {
        Chart::Collar => {
            let d = model.boundary_dim();
            let (rho, xibar0) = (s[0], s[1]);
            let y = [s[2], s[3]];
            let eta = [s[4], s[5]];
            let h = model.collar_jet1(rho, &y).h;
            let w = bmat_inv(&h, d);
            xibar0 * xibar0 + rho * rho * bquad(&w, &eta, &eta, d)
        }
        Chart::Cap => {
            let n = model.dim();
            let u = [s[0], s[1], s[2]];
            let xi = [s[3], s[4], s[5]];
            let (g, _) = model.cap_metric_jet1(&u);
            let w = cmat_inv(&g, n);
            cquad(&w, &xi, &xi, n)
        }
    }
}

fn circle_dirs(y: f64) -> (CVec, CVec) {
    let (s, c) = y.sin_cos();
    ([c, s, 0.0], [-s, c, 0.0])
}

/// Convert a collar state to cap coordinates (warped models).
pub fn collar_to_cap(model: &MetricModel, s: &[f64]) -> Result<[f64; STATE_W]> {
    let (rho, xibar0) = (s[0], s[1]);
    if rho <= 0.0 {
        return Err(Error::ChartTransition("cap conversion needs rho > 0".into()));
    }
    let r = 1.0 / rho;
    let y = [s[2], s[3]];
    let eta = [s[4], s[5]];
    match model.section() {
        BoundaryManifold::Circle { .. } => {
            let (n, t) = circle_dirs(y[0]);
            let u = [r * n[0], r * n[1], 0.0];
            // ξ_u = −ξ̄₀ n̂ + (η/r) t̂
            let xi = [
                -xibar0 * n[0] + eta[0] / r * t[0],
                -xibar0 * n[1] + eta[0] / r * t[1],
                0.0,
            ];
            Ok([u[0], u[1], u[2], xi[0], xi[1], xi[2]])
        }
        BoundaryManifold::Sphere { .. } => {
            let (st, ct) = y[0].sin_cos();
            let (sp, cp) = y[1].sin_cos();
            let n = [st * cp, st * sp, ct];
            let n_t = [ct * cp, ct * sp, -st];
            let n_p = [-st * sp, st * cp, 0.0];
            let s2 = st * st;
            let u = [r * n[0], r * n[1], r * n[2]];
            let mut xi = [0.0; 3];
            for i in 0..3 {
                xi[i] = -xibar0 * n[i] + eta[0] / r * n_t[i] + eta[1] / (r * s2) * n_p[i];
            }
            Ok([u[0], u[1], u[2], xi[0], xi[1], xi[2]])
        }
        _ => Err(Error::ChartTransition("no cap chart for this model".into())),
    }
}

/// Convert a cap state to collar coordinates (warped models).
pub fn cap_to_collar(model: &MetricModel, s: &[f64]) -> Result<[f64; STATE_W]> {
    let u = [s[0], s[1], s[2]];
    let xi = [s[3], s[4], s[5]];
    let r = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if r <= 0.0 {
        return Err(Error::ChartTransition("cap->collar at the origin".into()));
    }
    let rho = 1.0 / r;
    match model.section() {
        BoundaryManifold::Circle { .. } => {
            let theta = u[1].atan2(u[0]);
            let theta = if theta < 0.0 { theta + crate::geometry::boundary::TWO_PI } else { theta };
            let (n, t) = circle_dirs(theta);
            let xibar0 = -(xi[0] * n[0] + xi[1] * n[1]);
            let eta = r * (xi[0] * t[0] + xi[1] * t[1]);
            Ok([rho, xibar0, theta, 0.0, eta, 0.0])
        }
        BoundaryManifold::Sphere { .. } => {
            let theta = (u[2] / r).clamp(-1.0, 1.0).acos();
            let phi = u[1].atan2(u[0]);
            let phi = if phi < 0.0 { phi + crate::geometry::boundary::TWO_PI } else { phi };
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let n = [st * cp, st * sp, ct];
            let n_t = [ct * cp, ct * sp, -st];
            let n_p = [-st * sp, st * cp, 0.0];
            let dot = |a: &CVec, b: &CVec| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let xibar0 = -dot(&xi, &n);
            // η_θ = ξ·(r n_θ), η_φ = ξ·(r n_φ)
            let eta = [r * dot(&xi, &n_t), r * dot(&xi, &n_p)];
            Ok([rho, xibar0, theta, phi, eta[0], eta[1]])
        }
        _ => Err(Error::ChartTransition("no cap chart for this model".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::profile::{CapKind, WarpedProfile};
    use crate::geometry::{BoundaryManifold, InteriorPatch, MetricModel};
    use approx::assert_relative_eq;

    fn warped_circle() -> MetricModel {
        let prof = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        MetricModel::warped(
            BoundaryManifold::circle(crate::geometry::boundary::TWO_PI).unwrap(),
            prof,
            InteriorPatch::None,
        )
        .unwrap()
    }

    fn warped_sphere() -> MetricModel {
        let prof = WarpedProfile::new(CapKind::Flat, 1.0, 4.0, 0.7).unwrap();
        MetricModel::warped(BoundaryManifold::sphere(1.0).unwrap(), prof, InteriorPatch::None).unwrap()
    }

    #[test]
    fn chart_conversion_roundtrip_and_isometry() {
        for model in [warped_circle(), warped_sphere()] {
            let d = model.boundary_dim();
            let y = if d == 1 { [0.8, 0.0] } else { [1.2, 0.8] };
            let eta = if d == 1 { [1.3, 0.0] } else { [0.5, -0.9] };
            let rho = 0.45;
            // normalize ξ̄₀ from the constraint
            let h = model.collar_jet1(rho, &y).h;
            let w = bmat_inv(&h, d);
            let e2 = bquad(&w, &eta, &eta, d);
            let xibar0 = -(1.0 - rho * rho * e2).max(0.0).sqrt();
            let s = [rho, xibar0, y[0], y[1], eta[0], eta[1]];
            assert_relative_eq!(constraint_value(&model, Chart::Collar, &s), 1.0, epsilon = 1e-12);
            let cap = collar_to_cap(&model, &s).unwrap();
            // conversion preserves the unit norm
            assert_relative_eq!(constraint_value(&model, Chart::Cap, &cap), 1.0, epsilon = 1e-11);
            let back = cap_to_collar(&model, &cap).unwrap();
            for i in 0..STATE_W {
                assert_relative_eq!(back[i], s[i], epsilon = 1e-11);
            }
        }
    }
}
