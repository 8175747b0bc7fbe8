//! Analytic perturbation data: boundary scalar/tensor fields with two
//! derivatives, the compactly supported ρ-cutoff, and interior bump
//! functions in cap coordinates.

use crate::error::{Error, Result};
use crate::geometry::boundary::BoundaryManifold;
use crate::num::linalg::{BMat, BVec, BZERO};

/// Scalar field on the boundary manifold with closed-form derivatives.
#[derive(Clone, Debug)]
pub enum BoundaryScalar {
    Constant(f64),
    /// Circle: Σ amp·cos(k·y + phase).
    CircleTrig { terms: Vec<(f64, f64, f64)> },
    /// Torus: Σ amp·cos(k1·y1 + k2·y2 + phase).
    TorusTrig { terms: Vec<(f64, f64, f64, f64)> },
    /// Sphere: `c0 + v·n(θ, φ)` (restriction of a linear polynomial, a
    /// degree-one spherical harmonic plus constant).
    SphereHarmonic { v: [f64; 3], c0: f64 },
}

impl BoundaryScalar {
    /// Value, gradient and Hessian in boundary coordinates.
    pub fn jet(&self, y: &BVec) -> (f64, BVec, BMat) {
        match self {
            BoundaryScalar::Constant(c) => (*c, [0.0; 2], BZERO),
            BoundaryScalar::CircleTrig { terms } => {
                let mut v = 0.0;
                let mut d = 0.0;
                let mut dd = 0.0;
                for &(a, k, p) in terms {
                    let (s, c) = (k * y[0] + p).sin_cos();
                    v += a * c;
                    d += -a * k * s;
                    dd += -a * k * k * c;
                }
                (v, [d, 0.0], [[dd, 0.0], [0.0, 0.0]])
            }
            BoundaryScalar::TorusTrig { terms } => {
                let mut v = 0.0;
                let mut d = [0.0; 2];
                let mut dd = BZERO;
                for &(a, k1, k2, p) in terms {
                    let (s, c) = (k1 * y[0] + k2 * y[1] + p).sin_cos();
                    v += a * c;
                    d[0] += -a * k1 * s;
                    d[1] += -a * k2 * s;
                    dd[0][0] += -a * k1 * k1 * c;
                    dd[0][1] += -a * k1 * k2 * c;
                    dd[1][0] += -a * k1 * k2 * c;
                    dd[1][1] += -a * k2 * k2 * c;
                }
                (v, d, dd)
            }
            BoundaryScalar::SphereHarmonic { v, c0 } => {
                let (st, ct) = y[0].sin_cos();
                let (sp, cp) = y[1].sin_cos();
                let n = [st * cp, st * sp, ct];
                let n_t = [ct * cp, ct * sp, -st];
                let n_p = [-st * sp, st * cp, 0.0];
                let n_tt = [-st * cp, -st * sp, -ct];
                let n_tp = [-ct * sp, ct * cp, 0.0];
                let n_pp = [-st * cp, -st * sp, 0.0];
                let dot = |a: &[f64; 3]| v[0] * a[0] + v[1] * a[1] + v[2] * a[2];
                (
                    c0 + dot(&n),
                    [dot(&n_t), dot(&n_p)],
                    [[dot(&n_tt), dot(&n_tp)], [dot(&n_tp), dot(&n_pp)]],
                )
            }
        }
    }

    pub fn value(&self, y: &BVec) -> f64 {
        self.jet(y).0
    }
}

/// Symmetric 2-tensor field on the boundary with two derivatives.
#[derive(Clone, Debug)]
pub enum BoundaryTensor {
    /// `s(y) · h₀(y)`; valid on every boundary kind.
    Conformal(BoundaryScalar),
    /// `s(y) · E` with a constant coefficient matrix; only a smooth tensor
    /// field on flat kinds (circle, torus).
    Modulated { scalar: BoundaryScalar, e: BMat },
}

impl BoundaryTensor {
    pub fn validate(&self, boundary: &BoundaryManifold) -> Result<()> {
        if let (BoundaryTensor::Modulated { .. }, BoundaryManifold::Sphere { .. }) = (self, boundary) {
            return Err(Error::InvalidModel(
                "coordinate-constant tensor perturbations are not smooth on the sphere; use Conformal".into(),
            ));
        }
        Ok(())
    }

    /// Value, y-gradient and y-Hessian of the tensor components.
    pub fn jet(&self, boundary: &BoundaryManifold, y: &BVec) -> (BMat, [BMat; 2], [[BMat; 2]; 2]) {
        match self {
            BoundaryTensor::Conformal(s) => {
                let (v, d, dd) = s.jet(y);
                let h = boundary.metric(y);
                let dh = boundary.metric_dy(y);
                let ddh = boundary.metric_dyy(y);
                let mut p = BZERO;
                let mut dp = [BZERO; 2];
                let mut ddp = [[BZERO; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        p[i][j] = v * h[i][j];
                        for k in 0..2 {
                            dp[k][i][j] = d[k] * h[i][j] + v * dh[k][i][j];
                            for l in 0..2 {
                                ddp[k][l][i][j] = dd[k][l] * h[i][j]
                                    + d[k] * dh[l][i][j]
                                    + d[l] * dh[k][i][j]
                                    + v * ddh[k][l][i][j];
                            }
                        }
                    }
                }
                (p, dp, ddp)
            }
            BoundaryTensor::Modulated { scalar, e } => {
                let (v, d, dd) = scalar.jet(y);
                let mut p = BZERO;
                let mut dp = [BZERO; 2];
                let mut ddp = [[BZERO; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        p[i][j] = v * e[i][j];
                        for k in 0..2 {
                            dp[k][i][j] = d[k] * e[i][j];
                            for l in 0..2 {
                                ddp[k][l][i][j] = dd[k][l] * e[i][j];
                            }
                        }
                    }
                }
                (p, dp, ddp)
            }
        }
    }
}

/// Even compactly supported cutoff in ρ: `χ = (1 − (ρ/ρs)²)⁴` inside
/// `|ρ| < ρs`, zero outside. `χ(0) = 1`, `χ'(0) = 0`.
#[derive(Clone, Copy, Debug)]
pub struct RhoCutoff {
    pub rho_s: f64,
}

impl RhoCutoff {
    pub fn jet(&self, rho: f64) -> (f64, f64, f64) {
        let q = rho / self.rho_s;
        if q.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let u = 1.0 - q * q;
        let chi = u.powi(4);
        let chip = -8.0 * q * u.powi(3) / self.rho_s;
        let chipp = (-8.0 * u.powi(3) + 48.0 * q * q * u.powi(2)) / (self.rho_s * self.rho_s);
        (chi, chip, chipp)
    }
}

/// Collar perturbation `ρ^m χ(ρ) P₀(y)` of the boundary family.
#[derive(Clone, Debug)]
pub struct CollarPerturbation {
    pub cutoff: RhoCutoff,
    pub tensor: BoundaryTensor,
}

/// Smooth compactly supported radial bump in cap coordinates:
/// `β(u) = amp · exp(−t²/(1−t²))`, `t = |u − center|/σ`, zero for `t ≥ 1`.
#[derive(Clone, Copy, Debug)]
pub struct CapBump {
    pub center: [f64; 3],
    pub sigma: f64,
    pub amp: f64,
}

impl CapBump {
    fn shapes(t: f64) -> (f64, f64, f64) {
        // value b, m1 = b'/t, m2 = (m1)'/t — all even and smooth in t
        if t >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let u = 1.0 - t * t;
        let b = (-t * t / u).exp();
        let m1 = -2.0 * b / (u * u);
        let m2 = -2.0 * b * (2.0 - 4.0 * t * t) / (u * u * u * u);
        (b, m1, m2)
    }

    /// Value, gradient and Hessian at `u` (first `n` components used).
    pub fn jet(&self, u: &[f64; 3], n: usize) -> (f64, [f64; 3], [[f64; 3]; 3]) {
        let mut v = [0.0; 3];
        let mut t2 = 0.0;
        for i in 0..n {
            v[i] = u[i] - self.center[i];
            t2 += v[i] * v[i];
        }
        let t = t2.sqrt() / self.sigma;
        let (b, m1, m2) = Self::shapes(t);
        let s2 = self.sigma * self.sigma;
        let mut grad = [0.0; 3];
        let mut hess = [[0.0; 3]; 3];
        for i in 0..n {
            grad[i] = self.amp * m1 * v[i] / s2;
            for j in 0..n {
                hess[i][j] = self.amp * (m2 * v[i] * v[j] / (s2 * s2));
                if i == j {
                    hess[i][j] += self.amp * m1 / s2;
                }
            }
        }
        (self.amp * b, grad, hess)
    }

    pub fn value(&self, u: &[f64; 3], n: usize) -> f64 {
        self.jet(u, n).0
    }
}

/// Compactly supported symmetric 2-tensor in cap coordinates:
/// `q_ij(u) = β(u) · Q_ij`.
#[derive(Clone, Debug)]
pub struct CapTensor {
    pub bump: CapBump,
    pub coeff: [[f64; 3]; 3],
}

/// Cap tensor components with first and second derivatives.
pub type CapTensorJet2 = ([[f64; 3]; 3], [[[f64; 3]; 3]; 3], [[[[f64; 3]; 3]; 3]; 3]);

impl CapTensor {
    pub fn jet(&self, u: &[f64; 3], n: usize) -> CapTensorJet2 {
        let (b, g, hss) = self.bump.jet(u, n);
        let mut q = [[0.0; 3]; 3];
        let mut dq = [[[0.0; 3]; 3]; 3];
        let mut ddq = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                q[i][j] = b * self.coeff[i][j];
                for k in 0..n {
                    dq[k][i][j] = g[k] * self.coeff[i][j];
                    for l in 0..n {
                        ddq[k][l][i][j] = hss[k][l] * self.coeff[i][j];
                    }
                }
            }
        }
        (q, dq, ddq)
    }
}
