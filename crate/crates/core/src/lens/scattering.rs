//! The scattering map `S_g : ∂₋S*M → ∂₊S*M` and its large-|η| limit.

use crate::dynamics::flow::{integrate_entry, FlowOptions};
use crate::error::{Error, Result};
use crate::geometry::MetricModel;
use crate::num::fit::line_fit;
use crate::num::linalg::BVec;
use nalgebra::DMatrix;

/// Scattering data of one entry point.
#[derive(Clone, Debug)]
pub struct ScatterPoint {
    pub exit_y: BVec,
    pub exit_eta: BVec,
    pub tau_plus: f64,
    pub constraint_drift: f64,
}

/// `S_g(y₀, η₀)`, or the trapped error when guards trip.
pub fn scattering_map(
    model: &MetricModel,
    y0: &BVec,
    eta0: &BVec,
    opts: &FlowOptions,
) -> Result<ScatterPoint> {
    let traj = integrate_entry(model, y0, eta0, opts)?;
    let tau_plus = traj.arrival_tau().ok_or(Error::TrappedGeodesic)?;
    let (y, eta) = traj.exit_boundary_point()?;
    Ok(ScatterPoint {
        exit_y: model.boundary().wrap(&y),
        exit_eta: eta,
        tau_plus,
        constraint_drift: traj.diagnostics.max_constraint_defect,
    })
}

/// Large-|η| scattering limit: compares `ε·S_g(y₀, ε⁻¹η₀)` against
/// `|η₀|·e^{πH₀}(y₀, η₀/|η₀|)` over an ε-ladder and fits the gap rate.
#[derive(Clone, Debug)]
pub struct ScatteringLimit {
    pub table: Vec<(f64, f64)>,
    /// Fitted ε-rate of the gap (`None` when exact at every ε).
    pub rate: Option<f64>,
    pub target_y: BVec,
    pub target_eta: BVec,
}

pub fn scattering_large_eta(
    model: &MetricModel,
    y0: &BVec,
    eta0: &BVec,
    eps_ladder: &[f64],
    opts: &FlowOptions,
) -> Result<ScatteringLimit> {
    let b = model.boundary().clone();
    let norm = b.conorm(y0, eta0);
    let unit = [eta0[0] / norm, eta0[1] / norm];
    let (ty, teta_unit) = b.exact_flow(y0, &unit, std::f64::consts::PI);
    let target_eta = [norm * teta_unit[0], norm * teta_unit[1]];
    let mut table = Vec::new();
    for &eps in eps_ladder {
        let eta_in = [eta0[0] / eps, eta0[1] / eps];
        let s = scattering_map(model, y0, &eta_in, opts)?;
        let scaled_eta = [eps * s.exit_eta[0], eps * s.exit_eta[1]];
        let dy = angle_gap(&b, &s.exit_y, &ty);
        let de = ((scaled_eta[0] - target_eta[0]).powi(2) + (scaled_eta[1] - target_eta[1]).powi(2)).sqrt();
        table.push((eps, (dy * dy + de * de).sqrt()));
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (e, g) in &table {
        if *g > 1e-11 {
            lx.push(e.ln());
            ly.push(g.ln());
        }
    }
    let rate = if lx.len() >= 3 { Some(line_fit(&lx, &ly)?.slope) } else { None };
    Ok(ScatteringLimit { table, rate, target_y: ty, target_eta })
}

fn angle_gap(b: &crate::geometry::BoundaryManifold, a: &BVec, c: &BVec) -> f64 {
    let wrap = |x: f64| {
        let mut r = x % crate::geometry::boundary::TWO_PI;
        if r > std::f64::consts::PI {
            r -= crate::geometry::boundary::TWO_PI;
        }
        if r < -std::f64::consts::PI {
            r += crate::geometry::boundary::TWO_PI;
        }
        r
    };
    match b {
        crate::geometry::BoundaryManifold::Sphere { .. } => {
            ((a[0] - c[0]).powi(2) + wrap(a[1] - c[1]).powi(2)).sqrt()
        }
        _ => (wrap(a[0] - c[0]).powi(2) + wrap(a[1] - c[1]).powi(2)).sqrt(),
    }
}

/// Finite-difference Jacobian determinant of `S_g` at an entry point
/// (2(n−1) × 2(n−1)); equals 1 for the symplectic scattering map.
pub fn scattering_jacobian_det(
    model: &MetricModel,
    y0: &BVec,
    eta0: &BVec,
    step: f64,
    opts: &FlowOptions,
) -> Result<f64> {
    let d = model.boundary_dim();
    let dim = 2 * d;
    let mut jac = DMatrix::zeros(dim, dim);
    let pack = |y: &BVec, e: &BVec| -> Vec<f64> {
        let mut v = Vec::with_capacity(dim);
        v.extend_from_slice(&y[..d]);
        v.extend_from_slice(&e[..d]);
        v
    };
    for col in 0..dim {
        let perturb = |sign: f64| -> Result<Vec<f64>> {
            let mut y = *y0;
            let mut e = *eta0;
            if col < d {
                y[col] += sign * step;
            } else {
                e[col - d] += sign * step;
            }
            let s = scattering_map(model, &y, &e, opts)?;
            Ok(pack(&s.exit_y, &s.exit_eta))
        };
        let plus = perturb(1.0)?;
        let minus = perturb(-1.0)?;
        for row in 0..dim {
            let mut diff = plus[row] - minus[row];
            // wrap periodic exit coordinates
            if row < d {
                if diff > std::f64::consts::PI {
                    diff -= crate::geometry::boundary::TWO_PI;
                }
                if diff < -std::f64::consts::PI {
                    diff += crate::geometry::boundary::TWO_PI;
                }
            }
            jac[(row, col)] = diff / (2.0 * step);
        }
    }
    Ok(jac.determinant())
}
