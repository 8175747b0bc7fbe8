//! Linearized flow along exact-cone baselines.
//!
//! For entries `(y₀, ε⁻¹η₀)` the rescaled variables
//! `(ρ̃, ξ̃₀, ỹ, η̃) = (ε⁻¹ρ(εs), ξ̄₀(εs), y(εs), ε η(εs))` obey a smooth
//! ε-family of vector fields `X̃_ε` whose ε⁰ part has the explicit solution
//! `c₀(s) = (sin s, cos s, e^{sH₀}(y₀, η₀))`. For two models whose inverse
//! boundary jets agree below order m, the ε^m coefficient of the trajectory
//! difference solves a linear ODE with fundamental matrix `R(s)` and is
//! given by the Duhamel formula
//! `e_m(s) = R(s) ∫₀^s R(t)⁻¹ (X_m − X'_m)(c₀(t)) dt`, with
//! `X_m − X'_m = −(m/2+1) ρ̃^{m+1} T_m ∂_{ξ̃₀} + ρ̃^m H_{T_m}` and
//! `T_m` the m-th inverse-jet difference. Both routes — finite differences
//! of the tilde flow in ε and the Duhamel quadrature — are computed here.

use crate::error::{Error, Result};
use crate::geometry::boundary::BoundaryManifold;
use crate::geometry::{Family, MetricModel};
use crate::num::fit::{dyadic, richardson};
use crate::num::linalg::{bmat_inv, bmat_mul, bmat_mulvec, bquad, BMat, BVec, BZERO};
use crate::num::ode::{self, DenseOutput, OdeOptions, OdeSystem};
use crate::num::quad;
use nalgebra::DMatrix;

/// The tilde dynamic for one model at parameter ε
/// (state `[ρ̃, ξ̃₀, y₁, y₂, η₁, η₂]`).
pub struct TildeSystem<'a> {
    pub model: &'a MetricModel,
    pub eps: f64,
}

impl OdeSystem for TildeSystem<'_> {
    fn dim(&self) -> usize {
        6
    }
    fn eval(&self, _s: f64, v: &[f64], dv: &mut [f64]) {
        let d = self.model.boundary_dim();
        let rho_t = v[0];
        let y = [v[2], v[3]];
        let eta = [v[4], v[5]];
        let jet = self.model.collar_jet1(self.eps * rho_t, &y);
        let w = bmat_inv(&jet.h, d);
        let weta = bmat_mulvec(&w, &eta, d);
        let e2 = bquad(&w, &eta, &eta, d);
        let dr_e2 = -bquad(&jet.dr_h, &weta, &weta, d);
        dv.fill(0.0);
        dv[0] = v[1];
        dv[1] = -rho_t * (e2 + 0.5 * self.eps * rho_t * dr_e2);
        for k in 0..d {
            dv[2 + k] = weta[k];
            dv[4 + k] = 0.5 * bquad(&jet.dy_h[k], &weta, &weta, d);
        }
    }
}

/// Inverse boundary-metric jet `h_j` of the expansion
/// `h_ρ⁻¹ = Σ ρ^j h_j + O(ρ^{m+1})`, analytic per family.
pub fn inverse_metric_jet(model: &MetricModel, j: u32, y: &BVec) -> Result<BMat> {
    let d = model.boundary_dim();
    let w0 = match &model.family {
        Family::Warped { .. } => bmat_inv(&model.section().metric(y), d),
        _ => bmat_inv(&model.boundary().metric(y), d),
    };
    match &model.family {
        Family::ExactCone => Ok(if j == 0 { bmat_inv(&model.boundary().metric(y), d) } else { BZERO }),
        Family::PerturbedConic { order, pert } => {
            if j == 0 {
                Ok(bmat_inv(&model.boundary().metric(y), d))
            } else if j < *order {
                Ok(BZERO)
            } else if j == *order {
                // h⁻¹ = W₀ − ρ^m W₀ P₀ W₀ + O(ρ^{m+1}) (χ(0) = 1, χ'(0) = 0)
                let (p, _, _) = pert.tensor.jet(model.boundary(), y);
                let wp = bmat_mul(&w0, &p, d);
                let wpw = bmat_mul(&wp, &w0, d);
                Ok(crate::num::linalg::bmat_scale(&wpw, -1.0))
            } else {
                Err(Error::JetMismatch(format!("jet order {j} beyond the family's exact expansion")))
            }
        }
        Family::Warped { profile, .. } => {
            // h_ρ = (a + bρ)² ĥ: h_ρ⁻¹ = ĥ⁻¹ a⁻²(1 − 2(b/a)ρ + 3(b/a)²ρ² − ...)
            let a = profile.slope;
            let b = profile.intercept;
            let t = b / a;
            let c = match j {
                0 => 1.0,
                1 => -2.0 * t,
                2 => 3.0 * t * t,
                _ => return Err(Error::JetMismatch("warped jets supported to order 2".into())),
            };
            Ok(crate::num::linalg::bmat_scale(&w0, c / (a * a)))
        }
    }
}

/// A pair of models sharing the boundary metric and all inverse jets below
/// `order`; carries the jet difference `T_m = h_m − h'_m`.
pub struct ModelPair<'a> {
    pub g: &'a MetricModel,
    pub gp: &'a MetricModel,
    pub order: u32,
}

impl ModelPair<'_> {
    pub fn validate(&self) -> Result<()> {
        if self.g.boundary_dim() != self.gp.boundary_dim() {
            return Err(Error::JetMismatch("boundary dimensions differ".into()));
        }
        let d = self.g.boundary_dim();
        let ys: [BVec; 3] = [[0.4, 0.2], [1.5, 2.9], [2.8, 5.2]];
        for y in &ys {
            let h = self.g.boundary().metric(y);
            let hp = self.gp.boundary().metric(y);
            for i in 0..d {
                for k in 0..d {
                    if (h[i][k] - hp[i][k]).abs() > 1e-12 {
                        return Err(Error::JetMismatch("boundary metrics differ".into()));
                    }
                }
            }
            for j in 0..self.order {
                let a = inverse_metric_jet(self.g, j, y)?;
                let b = inverse_metric_jet(self.gp, j, y)?;
                for i in 0..d {
                    for k in 0..d {
                        if (a[i][k] - b[i][k]).abs() > 1e-11 {
                            return Err(Error::JetMismatch(format!(
                                "inverse jets differ at order {j} (delta {})",
                                (a[i][k] - b[i][k]).abs()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `T_m(y)` as a quadratic form on covectors.
    pub fn tm(&self, y: &BVec) -> Result<BMat> {
        let a = inverse_metric_jet(self.g, self.order, y)?;
        let b = inverse_metric_jet(self.gp, self.order, y)?;
        let d = self.g.boundary_dim();
        let mut out = BZERO;
        for i in 0..d {
            for j in 0..d {
                out[i][j] = a[i][j] - b[i][j];
            }
        }
        Ok(out)
    }

    /// `T_m(η, η)` at a boundary phase point.
    pub fn tm_value(&self, y: &BVec, eta: &BVec) -> Result<f64> {
        let d = self.g.boundary_dim();
        Ok(bquad(&self.tm(y)?, eta, eta, d))
    }

    /// `H₀ T_m` at a boundary phase point: derivative of `T_m` along the
    /// exact boundary flow (5-point stencil on the flow parameter).
    pub fn h0_tm(&self, y: &BVec, eta: &BVec) -> Result<f64> {
        let b = self.g.boundary();
        let h = 1e-4;
        let f = |s: f64| -> f64 {
            let (ys, es) = b.exact_flow(y, eta, s);
            self.tm_value(&ys, &es).unwrap_or(f64::NAN)
        };
        Ok(crate::num::central_diff4(f, 0.0, h))
    }
}

fn boundary_w_jets(b: &BoundaryManifold, y: &BVec) -> (BMat, [BMat; 2], [[BMat; 2]; 2]) {
    let d = b.dim();
    let h = b.metric(y);
    let dh = b.metric_dy(y);
    let ddh = b.metric_dyy(y);
    let w = bmat_inv(&h, d);
    let mut dw = [BZERO; 2];
    for k in 0..d {
        let m = bmat_mul(&bmat_mul(&w, &dh[k], d), &w, d);
        dw[k] = crate::num::linalg::bmat_scale(&m, -1.0);
    }
    let mut ddw = [[BZERO; 2]; 2];
    for k in 0..d {
        for l in 0..d {
            // ∂_l∂_k W = −(∂_lW ∂_kh W + W ∂_l∂_kh W + W ∂_kh ∂_lW)
            let t1 = bmat_mul(&bmat_mul(&dw[l], &dh[k], d), &w, d);
            let t2 = bmat_mul(&bmat_mul(&w, &ddh[l][k], d), &w, d);
            let t3 = bmat_mul(&bmat_mul(&w, &dh[k], d), &dw[l], d);
            for i in 0..d {
                for j in 0..d {
                    ddw[k][l][i][j] = -(t1[i][j] + t2[i][j] + t3[i][j]);
                }
            }
        }
    }
    (w, dw, ddw)
}

/// Differential of the limiting field `X̃₀` at a state
/// `(ρ̃, ξ̃₀, y, η)`, in variable order `[ρ̃, ξ̃₀, y.., η..]`.
fn dx0_matrix(b: &BoundaryManifold, rho_t: f64, y: &BVec, eta: &BVec, out: &mut [Vec<f64>]) {
    let d = b.dim();
    let nv = 2 + 2 * d;
    let (w, dw, ddw) = boundary_w_jets(b, y);
    let weta = bmat_mulvec(&w, eta, d);
    let e2 = bquad(&w, eta, eta, d);
    for row in out.iter_mut().take(nv) {
        row.iter_mut().for_each(|x| *x = 0.0);
    }
    // ρ̃' = ξ̃₀
    out[0][1] = 1.0;
    // ξ̃₀' = −ρ̃ |η|²_{h₀}
    out[1][0] = -e2;
    for k in 0..d {
        out[1][2 + k] = -rho_t * bquad(&dw[k], eta, eta, d);
    }
    for j in 0..d {
        out[1][2 + d + j] = -2.0 * rho_t * weta[j];
    }
    // y_j' = (W η)_j
    for j in 0..d {
        for k in 0..d {
            out[2 + j][2 + k] = bmat_mulvec(&dw[k], eta, d)[j];
        }
        for i in 0..d {
            out[2 + j][2 + d + i] = w[j][i];
        }
    }
    // η_j' = −½ η ∂_jW η
    for j in 0..d {
        for k in 0..d {
            out[2 + d + j][2 + k] = -0.5 * bquad(&ddw[j][k], eta, eta, d);
        }
        for i in 0..d {
            out[2 + d + j][2 + d + i] = -bmat_mulvec(&dw[j], eta, d)[i];
        }
    }
}

/// Fundamental matrix `R(s)` (and its inverse) of the linearized limiting
/// flow along the cone baseline `c₀(s)`.
pub struct LinearizedFlow {
    pub nv: usize,
    pub y0: BVec,
    pub eta0: BVec,
    dense: DenseOutput,
}

struct RSystem<'a> {
    b: &'a BoundaryManifold,
    y0: BVec,
    eta0: BVec,
    nv: usize,
}

impl OdeSystem for RSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.nv * self.nv
    }
    fn eval(&self, s: f64, v: &[f64], dv: &mut [f64]) {
        let nv = self.nv;
        let (y, eta) = self.b.exact_flow(&self.y0, &self.eta0, s);
        let mut dx = vec![vec![0.0; nv]; nv];
        dx0_matrix(self.b, s.sin(), &y, &eta, &mut dx);
        // R' = dX · R   (R stored row-major in v[0..nv²])
        for i in 0..nv {
            for j in 0..nv {
                let mut acc = 0.0;
                for k in 0..nv {
                    acc += dx[i][k] * v[k * nv + j];
                }
                dv[i * nv + j] = acc;
            }
        }
        // (R⁻¹)' = −R⁻¹ · dX   (stored in v[nv²..2nv²])
        let off = nv * nv;
        for i in 0..nv {
            for j in 0..nv {
                let mut acc = 0.0;
                for k in 0..nv {
                    acc += v[off + i * nv + k] * dx[k][j];
                }
                dv[off + i * nv + j] = -acc;
            }
        }
    }
}

impl LinearizedFlow {
    /// Solve `Ṙ = dX̃₀(c₀(s)) R`, `R(0) = Id`, over `[0, s_end]`.
    pub fn solve(boundary: &BoundaryManifold, y0: &BVec, eta0: &BVec, s_end: f64, rtol: f64) -> Result<Self> {
        let k = boundary.conorm(y0, eta0);
        if (k - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidModel(format!("baseline needs |η₀|_{{h₀}} = 1, got {k}")));
        }
        let nv = 2 + 2 * boundary.dim();
        let sys = RSystem { b: boundary, y0: *y0, eta0: *eta0, nv };
        let mut v0 = vec![0.0; 2 * nv * nv];
        for i in 0..nv {
            v0[i * nv + i] = 1.0;
            v0[nv * nv + i * nv + i] = 1.0;
        }
        let opts = OdeOptions { rtol, atol: rtol * 1e-2, ..Default::default() };
        let sol = ode::integrate(&sys, 0.0, &v0, s_end, &[], &opts)?;
        Ok(LinearizedFlow { nv, y0: *y0, eta0: *eta0, dense: sol.dense })
    }

    pub fn r_matrix(&self, s: f64) -> DMatrix<f64> {
        let v = self.dense.eval(s);
        DMatrix::from_fn(self.nv, self.nv, |i, j| v[i * self.nv + j])
    }

    pub fn r_inverse(&self, s: f64) -> DMatrix<f64> {
        let v = self.dense.eval(s);
        let off = self.nv * self.nv;
        DMatrix::from_fn(self.nv, self.nv, |i, j| v[off + i * self.nv + j])
    }
}

/// Both evaluations of `e_m(π)`: Richardson-extrapolated finite differences
/// of the tilde flows, and the Duhamel formula.
pub struct LinearizedDifference {
    pub nv: usize,
    pub e_fd: Vec<f64>,
    pub e_duhamel: Vec<f64>,
    /// Relative sup-norm gap between the two routes.
    pub gap_rel: f64,
    /// Raw finite-difference table `(ε, Δc/ε^m)` before extrapolation.
    pub fd_table: Vec<(f64, Vec<f64>)>,
}

fn wrap_angle(x: f64) -> f64 {
    let mut r = x % crate::geometry::boundary::TWO_PI;
    if r > std::f64::consts::PI {
        r -= crate::geometry::boundary::TWO_PI;
    }
    if r < -std::f64::consts::PI {
        r += crate::geometry::boundary::TWO_PI;
    }
    r
}

/// Compute `e_m(π)` for a model pair along the baseline from `(y₀, η₀)`,
/// `|η₀|_{h₀} = 1`.
pub fn linearized_difference(
    pair: &ModelPair,
    y0: &BVec,
    eta0: &BVec,
    eps0: f64,
    n_eps: usize,
) -> Result<LinearizedDifference> {
    pair.validate()?;
    let b = pair.g.boundary().clone();
    let d = b.dim();
    let nv = 2 + 2 * d;
    let m = pair.order as i32;
    let pi = std::f64::consts::PI;

    // finite-difference route
    let ladder = dyadic(eps0, n_eps);
    let mut fd_table = Vec::new();
    for &eps in &ladder {
        let run = |model: &MetricModel| -> Result<Vec<f64>> {
            let sys = TildeSystem { model, eps };
            let v0 = [0.0, 1.0, y0[0], y0[1], eta0[0], eta0[1]];
            let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
            Ok(ode::integrate(&sys, 0.0, &v0, pi, &[], &opts)?.y_end)
        };
        let a = run(pair.g)?;
        let c = run(pair.gp)?;
        let mut diff = vec![0.0; nv];
        diff[0] = (a[0] - c[0]) / eps.powi(m);
        diff[1] = (a[1] - c[1]) / eps.powi(m);
        for j in 0..d {
            let dy = if matches!(b, BoundaryManifold::Sphere { .. }) && j == 0 {
                a[2 + j] - c[2 + j]
            } else {
                wrap_angle(a[2 + j] - c[2 + j])
            };
            diff[2 + j] = dy / eps.powi(m);
            diff[2 + d + j] = (a[4 + j] - c[4 + j]) / eps.powi(m);
        }
        fd_table.push((eps, diff));
    }
    let mut e_fd = vec![0.0; nv];
    for i in 0..nv {
        let vals: Vec<f64> = fd_table.iter().map(|(_, v)| v[i]).collect();
        e_fd[i] = richardson(&ladder, &vals, 3.min(n_eps.saturating_sub(2)))?.value;
    }

    // Duhamel route
    let lin = LinearizedFlow::solve(&b, y0, eta0, pi, 1e-12)?;
    let mut integral = vec![0.0; nv];
    for (i, item) in integral.iter_mut().enumerate() {
        *item = quad::integrate(
            |t| {
                let rinv = lin.r_inverse(t);
                let (y, eta) = b.exact_flow(y0, eta0, t);
                let dx = delta_x(pair, t.sin(), &y, &eta, d).expect("jet data");
                let mut acc = 0.0;
                for k in 0..nv {
                    acc += rinv[(i, k)] * dx[k];
                }
                acc
            },
            0.0,
            pi,
            1e-11,
            1e-13,
        )?;
    }
    let rpi = lin.r_matrix(pi);
    let mut e_duh = vec![0.0; nv];
    for i in 0..nv {
        for k in 0..nv {
            e_duh[i] += rpi[(i, k)] * integral[k];
        }
    }

    let scale = e_duh.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-300);
    let gap = e_fd
        .iter()
        .zip(&e_duh)
        .fold(0.0f64, |a, (&x, &y)| a.max((x - y).abs()));
    Ok(LinearizedDifference { nv, e_fd, e_duhamel: e_duh, gap_rel: gap / scale, fd_table })
}

/// `(X_m − X'_m)(c₀)` in raw variables.
fn delta_x(pair: &ModelPair, rho_t: f64, y: &BVec, eta: &BVec, d: usize) -> Result<Vec<f64>> {
    let m = pair.order as i32;
    let tm = pair.tm(y)?;
    let tmv = bquad(&tm, eta, eta, d);
    let nv = 2 + 2 * d;
    let mut out = vec![0.0; nv];
    out[1] = -(pair.order as f64 / 2.0 + 1.0) * rho_t.powi(m + 1) * tmv;
    // Hamilton field of ½T_m(η,η): ẏ = T_m η, η̇_j = −½ η (∂_j T_m) η
    let tmeta = bmat_mulvec(&tm, eta, d);
    for j in 0..d {
        out[2 + j] = rho_t.powi(m) * tmeta[j];
    }
    let h = 1e-4;
    for j in 0..d {
        let f = |x: f64| -> f64 {
            let mut yy = *y;
            yy[j] = x;
            pair.tm(&yy).map(|t| bquad(&t, eta, eta, d)).unwrap_or(f64::NAN)
        };
        out[2 + d + j] = -0.5 * rho_t.powi(m) * crate::num::central_diff4(f, y[j], h);
    }
    Ok(out)
}

/// The fiber-energy component of a raw-coordinate tangent vector at a
/// boundary point: `dE = Σ η∂_kW₀η dy_k + 2(W₀η)·dη`.
pub fn energy_component(b: &BoundaryManifold, y: &BVec, eta: &BVec, v: &[f64]) -> f64 {
    let d = b.dim();
    let (_, dw, _) = boundary_w_jets(b, y);
    let w = b.inv_metric(y);
    let weta = bmat_mulvec(&w, eta, d);
    let mut e = 0.0;
    for k in 0..d {
        e += bquad(&dw[k], eta, eta, d) * v[2 + k];
    }
    for j in 0..d {
        e += 2.0 * weta[j] * v[2 + d + j];
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::boundary::TWO_PI;
    use crate::geometry::perturbation::{BoundaryScalar, BoundaryTensor, CollarPerturbation, RhoCutoff};
    use crate::geometry::{InteriorPatch, MetricModel};
    use crate::num::central_diff4;
    use approx::assert_relative_eq;

    fn circle() -> BoundaryManifold {
        BoundaryManifold::circle(TWO_PI).unwrap()
    }

    fn perturbed_circle(order: u32, amp: f64) -> MetricModel {
        let pert = CollarPerturbation {
            cutoff: RhoCutoff { rho_s: 0.3 },
            tensor: BoundaryTensor::Conformal(BoundaryScalar::CircleTrig {
                terms: vec![(amp, 2.0, 0.7)],
            }),
        };
        MetricModel::perturbed_conic(circle(), order, pert).unwrap()
    }

    #[test]
    fn dx0_matches_field_fd() {
        // differential of the limiting field against finite differences
        let b = BoundaryManifold::sphere(1.0).unwrap();
        let model = MetricModel::exact_cone(b.clone());
        let sys = TildeSystem { model: &model, eps: 0.0 };
        let base = [0.4, 0.7, 1.3, 0.8, 0.5, 0.6];
        let nv = 6;
        let mut dx = vec![vec![0.0; nv]; nv];
        dx0_matrix(&b, base[0], &[base[2], base[3]], &[base[4], base[5]], &mut dx);
        // map raw 6-state indices -> variable order [ρ̃, ξ̃₀, y0, y1, η0, η1]
        for col in 0..6 {
            let fd = |i_out: usize| {
                central_diff4(
                    |x| {
                        let mut s = base;
                        s[col] = x;
                        let mut d = [0.0; 6];
                        sys.eval(0.0, &s, &mut d);
                        d[i_out]
                    },
                    base[col],
                    1e-5,
                )
            };
            for row in 0..6 {
                assert_relative_eq!(dx[row][col], fd(row), epsilon = 1e-7, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn r_matrix_rotation_block_and_det() {
        let b = circle();
        let lin = LinearizedFlow::solve(&b, &[0.4, 0.0], &[1.0, 0.0], std::f64::consts::PI, 1e-12).unwrap();
        for &s in &[0.5, 1.5, 3.0] {
            let r = lin.r_matrix(s);
            assert_relative_eq!(r[(0, 0)], s.cos(), epsilon = 1e-10);
            assert_relative_eq!(r[(0, 1)], s.sin(), epsilon = 1e-10);
            assert_relative_eq!(r[(1, 0)], -s.sin(), epsilon = 1e-10);
            assert_relative_eq!(r[(1, 1)], s.cos(), epsilon = 1e-10);
            // R · R⁻¹ = Id
            let prod = &r * lin.r_inverse(s);
            for i in 0..lin.nv {
                for j in 0..lin.nv {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_relative_eq!(prod[(i, j)], want, epsilon = 1e-9);
                }
            }
            assert!(r.determinant().abs() > 0.5);
        }
    }

    #[test]
    fn identical_models_give_zero() {
        let g = perturbed_circle(1, 0.1);
        let pair = ModelPair { g: &g, gp: &g, order: 1 };
        let out = linearized_difference(&pair, &[0.9, 0.0], &[1.0, 0.0], 0.1, 5).unwrap();
        for v in out.e_fd.iter().chain(out.e_duhamel.iter()) {
            assert!(v.abs() < 1e-9, "expected zero e_m, got {v:e}");
        }
    }

    #[test]
    fn fd_matches_duhamel_circle_m1() {
        let g = perturbed_circle(1, 0.1);
        let gp = MetricModel::exact_cone(circle());
        let pair = ModelPair { g: &g, gp: &gp, order: 1 };
        let out = linearized_difference(&pair, &[0.9, 0.0], &[1.0, 0.0], 0.04, 6).unwrap();
        assert!(out.gap_rel < 1e-4, "fd/duhamel gap {}", out.gap_rel);
        // the difference is genuinely nonzero
        assert!(out.e_duhamel.iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn energy_row_matches_quadrature_identity() {
        // dE-component of e_m(π) equals −2 ∫ sin^m(s) H₀T_m ds
        let g = perturbed_circle(2, 0.08);
        let gp = MetricModel::exact_cone(circle());
        let pair = ModelPair { g: &g, gp: &gp, order: 2 };
        let y0 = [0.9, 0.0];
        let eta0 = [1.0, 0.0];
        let out = linearized_difference(&pair, &y0, &eta0, 0.04, 6).unwrap();
        let b = circle();
        let e_comp = energy_component(&b, &b.exact_flow(&y0, &eta0, std::f64::consts::PI).0, &eta0, &out.e_duhamel);
        let quadv = quad::integrate(
            |s| {
                let (ys, es) = b.exact_flow(&y0, &eta0, s);
                s.sin().powi(2) * pair.h0_tm(&ys, &es).unwrap()
            },
            0.0,
            std::f64::consts::PI,
            1e-10,
            1e-12,
        )
        .unwrap();
        // measured coefficient: dE·e_m(π) = −1·∫ sin^m H₀T_m ds; direct
        // symbolic evaluation of dE(H_{½T}) = −H₀T confirms the −1, and
        // the finite-difference route agrees independently.
        assert_relative_eq!(e_comp, -quadv, epsilon = 1e-6, max_relative = 1e-4);
    }

    #[test]
    fn warped_pair_jets() {
        // warped model with b ≠ 0 has first inverse jet −2(b/a)·W₀
        let prof = crate::geometry::WarpedProfile::new(crate::geometry::CapKind::Flat, 1.0, 4.0, 2.0).unwrap();
        let m = MetricModel::warped(circle(), prof.clone(), InteriorPatch::None).unwrap();
        let j1 = inverse_metric_jet(&m, 1, &[0.3, 0.0]).unwrap();
        let w0 = 1.0 / (prof.slope * prof.slope);
        assert_relative_eq!(j1[0][0], -2.0 * prof.intercept / prof.slope * w0, epsilon = 1e-12);
    }
}
