//! Closed boundary manifolds `(∂M, h₀)` with exact geodesic flows.
//!
//! All supported kinds use fixed coordinate ranges (angles in `[0, 2π)`,
//! colatitude in `(0, π)`); the size parameters enter through the metric.
//! The flow `e^{sH₀}` of the Hamiltonian `½|η|²_{h₀}` is exact for every
//! kind: straight lines modulo the lattice, arc-length rotation on the
//! circle, great circles on the sphere (computed in the ambient embedding).

use crate::error::{Error, Result};
use crate::num::linalg::{BMat, BVec, bmat_inv, bquad, BZERO};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Colatitude band on the sphere inside which the `(θ, φ)` chart is used.
pub const SPHERE_CHART_MARGIN: f64 = 0.08;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryManifold {
    /// Circle of the given length; coordinate `y ∈ [0, 2π)`, metric `c² dy²`
    /// with `c = length / 2π`.
    Circle { length: f64 },
    /// Round 2-sphere of the given radius; coordinates `(θ, φ)`.
    Sphere { radius: f64 },
    /// Flat 2-torus with the given side lengths; coordinates in `[0, 2π)²`.
    Torus { lengths: [f64; 2] },
}

impl BoundaryManifold {
    pub fn circle(length: f64) -> Result<Self> {
        if length <= 0.0 {
            return Err(Error::InvalidModel("circle length must be positive".into()));
        }
        Ok(BoundaryManifold::Circle { length })
    }
    pub fn sphere(radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidModel("sphere radius must be positive".into()));
        }
        Ok(BoundaryManifold::Sphere { radius })
    }
    pub fn torus(lengths: [f64; 2]) -> Result<Self> {
        if lengths[0] <= 0.0 || lengths[1] <= 0.0 {
            return Err(Error::InvalidModel("torus side lengths must be positive".into()));
        }
        Ok(BoundaryManifold::Torus { lengths })
    }

    pub fn dim(&self) -> usize {
        match self {
            BoundaryManifold::Circle { .. } => 1,
            _ => 2,
        }
    }

    /// Same manifold with all lengths scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            BoundaryManifold::Circle { length } => BoundaryManifold::Circle { length: length * factor },
            BoundaryManifold::Sphere { radius } => BoundaryManifold::Sphere { radius: radius * factor },
            BoundaryManifold::Torus { lengths } => {
                BoundaryManifold::Torus { lengths: [lengths[0] * factor, lengths[1] * factor] }
            }
        }
    }

    pub fn metric(&self, y: &BVec) -> BMat {
        let mut h = BZERO;
        match self {
            BoundaryManifold::Circle { length } => {
                let c = length / TWO_PI;
                h[0][0] = c * c;
            }
            BoundaryManifold::Sphere { radius } => {
                h[0][0] = radius * radius;
                let s = y[0].sin();
                h[1][1] = radius * radius * s * s;
            }
            BoundaryManifold::Torus { lengths } => {
                let c0 = lengths[0] / TWO_PI;
                let c1 = lengths[1] / TWO_PI;
                h[0][0] = c0 * c0;
                h[1][1] = c1 * c1;
            }
        }
        h
    }

    pub fn metric_dy(&self, y: &BVec) -> [BMat; 2] {
        let mut d = [BZERO; 2];
        if let BoundaryManifold::Sphere { radius } = self {
            // ∂θ h_φφ = R² sin(2θ)
            d[0][1][1] = radius * radius * (2.0 * y[0]).sin();
        }
        d
    }

    pub fn metric_dyy(&self, y: &BVec) -> [[BMat; 2]; 2] {
        let mut d = [[BZERO; 2]; 2];
        if let BoundaryManifold::Sphere { radius } = self {
            d[0][0][1][1] = 2.0 * radius * radius * (2.0 * y[0]).cos();
        }
        d
    }

    pub fn inv_metric(&self, y: &BVec) -> BMat {
        bmat_inv(&self.metric(y), self.dim())
    }

    /// Squared co-norm `|η|²_{h₀}`.
    pub fn conorm2(&self, y: &BVec, eta: &BVec) -> f64 {
        bquad(&self.inv_metric(y), eta, eta, self.dim())
    }

    pub fn conorm(&self, y: &BVec, eta: &BVec) -> f64 {
        self.conorm2(y, eta).sqrt()
    }

    /// Normalize periodic coordinates into their fundamental ranges.
    pub fn wrap(&self, y: &BVec) -> BVec {
        fn modpos(x: f64) -> f64 {
            let r = x % TWO_PI;
            if r < 0.0 {
                r + TWO_PI
            } else {
                r
            }
        }
        match self {
            BoundaryManifold::Circle { .. } => [modpos(y[0]), 0.0],
            BoundaryManifold::Sphere { .. } => [y[0], modpos(y[1])],
            BoundaryManifold::Torus { .. } => [modpos(y[0]), modpos(y[1])],
        }
    }

    /// Whether the point lies inside the coordinate chart's safe region
    /// (away from the sphere's coordinate poles).
    pub fn chart_ok(&self, y: &BVec) -> bool {
        match self {
            BoundaryManifold::Sphere { .. } => {
                y[0] > SPHERE_CHART_MARGIN && y[0] < std::f64::consts::PI - SPHERE_CHART_MARGIN
            }
            _ => true,
        }
    }

    /// Exact geodesic flow `e^{sH₀}(y, η)` of `½|η|²_{h₀}`.
    pub fn exact_flow(&self, y: &BVec, eta: &BVec, s: f64) -> (BVec, BVec) {
        match self {
            BoundaryManifold::Circle { length } => {
                let c = length / TWO_PI;
                let ynew = [y[0] + s * eta[0] / (c * c), 0.0];
                (self.wrap(&ynew), *eta)
            }
            BoundaryManifold::Torus { lengths } => {
                let c0 = lengths[0] / TWO_PI;
                let c1 = lengths[1] / TWO_PI;
                let ynew = [y[0] + s * eta[0] / (c0 * c0), y[1] + s * eta[1] / (c1 * c1)];
                (self.wrap(&ynew), *eta)
            }
            BoundaryManifold::Sphere { radius } => {
                let r = *radius;
                let (x, p) = sphere_embed(r, y, eta);
                let pn = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                if pn == 0.0 {
                    return (*y, *eta);
                }
                let omega = pn / r;
                let (sn, cs) = (omega * s).sin_cos();
                let xn = [
                    cs * x[0] + sn * r * p[0] / pn,
                    cs * x[1] + sn * r * p[1] / pn,
                    cs * x[2] + sn * r * p[2] / pn,
                ];
                let pnw = [
                    pn * (-sn * x[0] / r + cs * p[0] / pn),
                    pn * (-sn * x[1] / r + cs * p[1] / pn),
                    pn * (-sn * x[2] / r + cs * p[2] / pn),
                ];
                sphere_unembed(r, &xn, &pnw)
            }
        }
    }

    /// Gauss curvature of `(∂M, h₀)` (two-dimensional kinds).
    pub fn gauss_curvature(&self) -> f64 {
        match self {
            BoundaryManifold::Sphere { radius } => 1.0 / (radius * radius),
            _ => 0.0,
        }
    }
}

/// Embed a sphere cotangent point into `R³ × R³`: `|x| = R`, `x·p = 0`,
/// `|p| = |η|_{h₀}`.
pub fn sphere_embed(radius: f64, y: &BVec, eta: &BVec) -> ([f64; 3], [f64; 3]) {
    let (st, ct) = y[0].sin_cos();
    let (sp, cp) = y[1].sin_cos();
    let x = [radius * st * cp, radius * st * sp, radius * ct];
    let e_th = [radius * ct * cp, radius * ct * sp, -radius * st];
    let e_ph = [-radius * st * sp, radius * st * cp, 0.0];
    let r2 = radius * radius;
    let s2 = (st * st).max(1e-300);
    let p = [
        eta[0] * e_th[0] / r2 + eta[1] * e_ph[0] / (r2 * s2),
        eta[0] * e_th[1] / r2 + eta[1] * e_ph[1] / (r2 * s2),
        eta[0] * e_th[2] / r2 + eta[1] * e_ph[2] / (r2 * s2),
    ];
    (x, p)
}

/// Inverse of [`sphere_embed`].
pub fn sphere_unembed(radius: f64, x: &[f64; 3], p: &[f64; 3]) -> (BVec, BVec) {
    let theta = (x[2] / radius).clamp(-1.0, 1.0).acos();
    let phi = x[1].atan2(x[0]);
    let phi = if phi < 0.0 { phi + TWO_PI } else { phi };
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let e_th = [radius * ct * cp, radius * ct * sp, -radius * st];
    let e_ph = [-radius * st * sp, radius * st * cp, 0.0];
    let eta_th = p[0] * e_th[0] + p[1] * e_th[1] + p[2] * e_th[2];
    let eta_ph = p[0] * e_ph[0] + p[1] * e_ph[1] + p[2] * e_ph[2];
    ([theta, phi], [eta_th, eta_ph])
}
